use serde::{Deserialize, Serialize};

use super::features::FeatureVector;
use super::knn::Knn;
use super::logistic::{fit_logistic, Logistic, LogisticHyper};
use super::mlp::{fit_mlp, Mlp, MlpHyper};
use super::preprocess::Normalizer;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Mlp,
    Logistic,
    Knn,
    Majority,
}

impl ModelKind {
    pub const ALL: [ModelKind; 4] = [
        ModelKind::Mlp,
        ModelKind::Logistic,
        ModelKind::Knn,
        ModelKind::Majority,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Mlp => "mlp",
            ModelKind::Logistic => "logistic",
            ModelKind::Knn => "knn",
            ModelKind::Majority => "majority",
        }
    }

    fn tag(self) -> u8 {
        match self {
            ModelKind::Mlp => 1,
            ModelKind::Logistic => 2,
            ModelKind::Knn => 3,
            ModelKind::Majority => 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModelState {
    Mlp(Mlp),
    Logistic(Logistic),
    Knn(Knn),
    Majority(u8),
}

/// A fitted classifier with the input transform fitted alongside it.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainedModel {
    pub normalizer: Option<Normalizer>,
    pub state: ModelState,
}

fn split(rows: &[FeatureVector]) -> (Vec<&[f64]>, Vec<f64>) {
    rows.iter().map(|f| (f.values.as_slice(), f.label as f64)).unzip()
}

fn normalized(norm: &Normalizer, rows: &[&[f64]]) -> Vec<Vec<f64>> {
    rows.iter().map(|r| norm.transform(r)).collect()
}

pub fn train_mlp(
    train: &[FeatureVector],
    validation: &[FeatureVector],
    hyper: &MlpHyper,
) -> Result<TrainedModel> {
    let (tx, ty) = split(train);
    let (vx, vy) = split(validation);
    let norm = Normalizer::fit(tx.iter().copied());
    let net = fit_mlp(&normalized(&norm, &tx), &ty, &normalized(&norm, &vx), &vy, hyper)?;
    Ok(TrainedModel {
        normalizer: Some(norm),
        state: ModelState::Mlp(net),
    })
}

pub fn train_logistic(train: &[FeatureVector], hyper: &LogisticHyper) -> Result<TrainedModel> {
    let (tx, ty) = split(train);
    let norm = Normalizer::fit(tx.iter().copied());
    let model = fit_logistic(&normalized(&norm, &tx), &ty, hyper)?;
    Ok(TrainedModel {
        normalizer: Some(norm),
        state: ModelState::Logistic(model),
    })
}

pub fn train_knn(train: &[FeatureVector], k: usize) -> Result<TrainedModel> {
    if train.is_empty() {
        return Err(Error::EmptyInput("training split"));
    }
    if k == 0 {
        return Err(Error::InvalidConfig("k_neighbors must be positive".into()));
    }
    let (tx, _) = split(train);
    let norm = Normalizer::fit(tx.iter().copied());
    let knn = Knn {
        k,
        points: normalized(&norm, &tx),
        labels: train.iter().map(|f| f.label).collect(),
    };
    Ok(TrainedModel {
        normalizer: Some(norm),
        state: ModelState::Knn(knn),
    })
}

/// Always predicts the more frequent training label; a tie predicts 0.
pub fn majority_baseline(train: &[FeatureVector]) -> Result<TrainedModel> {
    if train.is_empty() {
        return Err(Error::EmptyInput("training split"));
    }
    let ones = train.iter().filter(|f| f.label == 1).count();
    let label = u8::from(2 * ones > train.len());
    Ok(TrainedModel {
        normalizer: None,
        state: ModelState::Majority(label),
    })
}

const MAGIC: &[u8; 8] = b"PSCMODEL";
const FORMAT_VERSION: u16 = 1;

struct Writer(Vec<u8>);

impl Writer {
    fn u8(&mut self, v: u8) {
        self.0.push(v);
    }
    fn u64(&mut self, v: usize) {
        self.0.extend_from_slice(&(v as u64).to_le_bytes());
    }
    fn f64s(&mut self, v: &[f64]) {
        self.u64(v.len());
        for x in v {
            self.0.extend_from_slice(&x.to_le_bytes());
        }
    }
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.buf.len());
        let end = end.ok_or_else(|| Error::ModelFormat("truncated container".into()))?;
        let out = &self.buf[self.pos..end];
        self.pos = end;
        Ok(out)
    }
    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }
    fn u64(&mut self) -> Result<usize> {
        let b = self.take(8)?;
        Ok(u64::from_le_bytes(b.try_into().unwrap()) as usize)
    }
    fn f64s(&mut self) -> Result<Vec<f64>> {
        let n = self.u64()?;
        let bytes = self.take(
            n.checked_mul(8)
                .ok_or_else(|| Error::ModelFormat("length overflow".into()))?,
        )?;
        Ok(bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect())
    }
}

impl TrainedModel {
    pub fn kind(&self) -> ModelKind {
        match self.state {
            ModelState::Mlp(_) => ModelKind::Mlp,
            ModelState::Logistic(_) => ModelKind::Logistic,
            ModelState::Knn(_) => ModelKind::Knn,
            ModelState::Majority(_) => ModelKind::Majority,
        }
    }

    /// Probability of label 1 for raw (unnormalized) features.
    pub fn predict_proba(&self, raw: &[f64]) -> f64 {
        let x = match &self.normalizer {
            Some(n) => n.transform(raw),
            None => raw.to_vec(),
        };
        match &self.state {
            ModelState::Mlp(m) => m.predict_proba(&x),
            ModelState::Logistic(m) => m.predict_proba(&x),
            ModelState::Knn(m) => m.predict_proba(&x),
            ModelState::Majority(l) => *l as f64,
        }
    }

    pub fn predict(&self, raw: &[f64]) -> u8 {
        u8::from(self.predict_proba(raw) > 0.5)
    }

    /// Versioned little-endian container: magic, format version, model tag,
    /// optional normalizer, then the model parameters.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer(MAGIC.to_vec());
        w.0.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
        w.u8(self.kind().tag());
        match &self.normalizer {
            Some(n) => {
                w.u8(1);
                w.f64s(&n.mean);
                w.f64s(&n.scale);
            }
            None => w.u8(0),
        }
        match &self.state {
            ModelState::Mlp(m) => {
                w.u64(m.input);
                w.u64(m.hidden[0]);
                w.u64(m.hidden[1]);
                w.f64s(&m.params);
            }
            ModelState::Logistic(m) => {
                w.f64s(&m.weights);
                w.f64s(&[m.bias]);
            }
            ModelState::Knn(m) => {
                w.u64(m.k);
                w.u64(m.points.len());
                for p in &m.points {
                    w.f64s(p);
                }
                w.0.extend_from_slice(&m.labels);
            }
            ModelState::Majority(l) => w.u8(*l),
        }
        w.0
    }

    pub fn from_bytes(buf: &[u8]) -> Result<Self> {
        let mut r = Reader { buf, pos: 0 };
        if r.take(8)? != MAGIC {
            return Err(Error::ModelFormat("not a model container".into()));
        }
        let version = u16::from_le_bytes(r.take(2)?.try_into().unwrap());
        if version != FORMAT_VERSION {
            return Err(Error::ModelFormat(format!(
                "unsupported format version {version}"
            )));
        }
        let tag = r.u8()?;
        let normalizer = match r.u8()? {
            0 => None,
            1 => Some(Normalizer {
                mean: r.f64s()?,
                scale: r.f64s()?,
            }),
            other => return Err(Error::ModelFormat(format!("bad normalizer flag {other}"))),
        };
        let state = match tag {
            1 => {
                let input = r.u64()?;
                let hidden = [r.u64()?, r.u64()?];
                let params = r.f64s()?;
                if params.len() != Mlp::n_params(input, hidden) {
                    return Err(Error::ModelFormat("parameter count mismatch".into()));
                }
                ModelState::Mlp(Mlp {
                    input,
                    hidden,
                    params,
                })
            }
            2 => {
                let weights = r.f64s()?;
                let bias = r.f64s()?;
                if bias.len() != 1 {
                    return Err(Error::ModelFormat("bad logistic bias".into()));
                }
                ModelState::Logistic(Logistic {
                    weights,
                    bias: bias[0],
                })
            }
            3 => {
                let k = r.u64()?;
                let n = r.u64()?;
                let points = (0..n).map(|_| r.f64s()).collect::<Result<Vec<_>>>()?;
                let labels = r.take(n)?.to_vec();
                ModelState::Knn(Knn { k, points, labels })
            }
            4 => ModelState::Majority(r.u8()?),
            other => return Err(Error::ModelFormat(format!("unknown model tag {other}"))),
        };
        if r.pos != buf.len() {
            return Err(Error::ModelFormat("trailing bytes".into()));
        }
        Ok(TrainedModel { normalizer, state })
    }
}
