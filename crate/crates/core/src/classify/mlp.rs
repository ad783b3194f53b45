use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Training settings for the two-hidden-layer network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MlpHyper {
    pub hidden: [usize; 2],
    pub learning_rate: f64,
    pub momentum: f64,
    pub batch_size: usize,
    pub max_epochs: usize,
    /// Epochs without a validation-accuracy improvement before stopping.
    /// `None` trains for `max_epochs` and keeps the final weights.
    pub patience: Option<usize>,
    pub seed: u64,
}

impl Default for MlpHyper {
    fn default() -> Self {
        MlpHyper {
            hidden: [64, 32],
            learning_rate: 0.01,
            momentum: 0.9,
            batch_size: 32,
            max_epochs: 200,
            patience: Some(20),
            seed: 0,
        }
    }
}

/// Dense network `d → h1 → h2 → 1` with ReLU hidden units and a sigmoid
/// output. Parameters live in one flat vector laid out as
/// `W1 (h1×d), b1, W2 (h2×h1), b2, W3 (1×h2), b3`, rows by output unit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mlp {
    pub input: usize,
    pub hidden: [usize; 2],
    pub params: Vec<f64>,
}

struct Layout {
    w1: usize,
    b1: usize,
    w2: usize,
    b2: usize,
    w3: usize,
    b3: usize,
    len: usize,
}

/// Numerically stable binary cross-entropy of a logit.
#[inline]
pub fn bce_with_logit(z: f64, y: f64) -> f64 {
    z.max(0.0) - z * y + (-z.abs()).exp().ln_1p()
}

#[inline]
pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

impl Mlp {
    pub fn n_params(input: usize, hidden: [usize; 2]) -> usize {
        let [h1, h2] = hidden;
        h1 * input + h1 + h2 * h1 + h2 + h2 + 1
    }

    fn layout(&self) -> Layout {
        let [h1, h2] = self.hidden;
        let w1 = 0;
        let b1 = w1 + h1 * self.input;
        let w2 = b1 + h1;
        let b2 = w2 + h2 * h1;
        let w3 = b2 + h2;
        let b3 = w3 + h2;
        Layout {
            w1,
            b1,
            w2,
            b2,
            w3,
            b3,
            len: b3 + 1,
        }
    }

    /// He-initialized weights and zero biases.
    pub fn init(input: usize, hidden: [usize; 2], rng: &mut ChaCha8Rng) -> Self {
        let mut m = Mlp {
            input,
            hidden,
            params: vec![0.0; Self::n_params(input, hidden)],
        };
        let l = m.layout();
        let [h1, h2] = hidden;
        let mut fill = |range: std::ops::Range<usize>, fan_in: usize| {
            let sd = (2.0 / fan_in as f64).sqrt();
            for p in &mut m.params[range] {
                *p = sd * normal(rng);
            }
        };
        fill(l.w1..l.b1, input);
        fill(l.w2..l.b2, h1);
        fill(l.w3..l.b3, h2);
        m
    }

    fn hidden_pre(&self, x: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let l = self.layout();
        let [h1, h2] = self.hidden;
        let p = &self.params;
        let z1: Vec<f64> = (0..h1)
            .map(|i| {
                let row = &p[l.w1 + i * self.input..l.w1 + (i + 1) * self.input];
                p[l.b1 + i] + dot(row, x)
            })
            .collect();
        let a1: Vec<f64> = z1.iter().map(|z| z.max(0.0)).collect();
        let z2: Vec<f64> = (0..h2)
            .map(|i| {
                let row = &p[l.w2 + i * h1..l.w2 + (i + 1) * h1];
                p[l.b2 + i] + dot(row, &a1)
            })
            .collect();
        (z1, z2)
    }

    pub fn logit(&self, x: &[f64]) -> f64 {
        let l = self.layout();
        let (_, z2) = self.hidden_pre(x);
        let a2: Vec<f64> = z2.iter().map(|z| z.max(0.0)).collect();
        self.params[l.b3] + dot(&self.params[l.w3..l.b3], &a2)
    }

    pub fn predict_proba(&self, x: &[f64]) -> f64 {
        sigmoid(self.logit(x))
    }

    /// Smallest |pre-activation| over all hidden units and samples; gradient
    /// checks want this away from the ReLU kink.
    pub fn min_abs_preactivation(&self, xs: &[Vec<f64>]) -> f64 {
        xs.iter()
            .flat_map(|x| {
                let (z1, z2) = self.hidden_pre(x);
                z1.into_iter().chain(z2)
            })
            .map(f64::abs)
            .fold(f64::INFINITY, f64::min)
    }

    /// Mean cross-entropy over the batch and its gradient with respect to
    /// `params`, by backpropagation.
    pub fn loss_and_gradient<X: AsRef<[f64]>>(&self, xs: &[X], ys: &[f64]) -> (f64, Vec<f64>) {
        let l = self.layout();
        let [h1, h2] = self.hidden;
        let p = &self.params;
        let mut grad = vec![0.0; l.len];
        let mut loss = 0.0;
        let inv_n = 1.0 / xs.len() as f64;

        for (x, &y) in xs.iter().zip(ys) {
            let x = x.as_ref();
            let (z1, z2) = self.hidden_pre(x);
            let a1: Vec<f64> = z1.iter().map(|z| z.max(0.0)).collect();
            let a2: Vec<f64> = z2.iter().map(|z| z.max(0.0)).collect();
            let z3 = p[l.b3] + dot(&p[l.w3..l.b3], &a2);
            loss += bce_with_logit(z3, y);

            let d3 = (sigmoid(z3) - y) * inv_n;
            grad[l.b3] += d3;
            let mut d2 = vec![0.0; h2];
            for i in 0..h2 {
                grad[l.w3 + i] += d3 * a2[i];
                if z2[i] > 0.0 {
                    d2[i] = d3 * p[l.w3 + i];
                }
            }
            let mut d1 = vec![0.0; h1];
            for (i, &di) in d2.iter().enumerate() {
                if di == 0.0 {
                    continue;
                }
                grad[l.b2 + i] += di;
                let row = l.w2 + i * h1;
                for j in 0..h1 {
                    grad[row + j] += di * a1[j];
                    d1[j] += di * p[row + j];
                }
            }
            for (j, dj) in d1.iter_mut().enumerate() {
                if z1[j] <= 0.0 {
                    *dj = 0.0;
                    continue;
                }
                grad[l.b1 + j] += *dj;
                let row = l.w1 + j * self.input;
                for (g, xk) in grad[row..row + self.input].iter_mut().zip(x) {
                    *g += *dj * xk;
                }
            }
        }
        (loss * inv_n, grad)
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn normal(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = 1.0 - rng.random::<f64>();
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

pub(crate) fn accuracy_of(predict: impl Fn(&[f64]) -> f64, xs: &[Vec<f64>], ys: &[f64]) -> f64 {
    let correct = xs
        .iter()
        .zip(ys)
        .filter(|(x, &y)| (predict(x) > 0.5) == (y > 0.5))
        .count();
    correct as f64 / xs.len().max(1) as f64
}

/// Minibatch SGD with momentum on normalized inputs, keeping the weights with
/// the best validation accuracy when early stopping is on.
pub fn fit_mlp(
    train_x: &[Vec<f64>],
    train_y: &[f64],
    val_x: &[Vec<f64>],
    val_y: &[f64],
    hyper: &MlpHyper,
) -> Result<Mlp> {
    if train_x.is_empty() || val_x.is_empty() {
        return Err(Error::EmptyInput("training or validation split"));
    }
    if hyper.batch_size == 0 {
        return Err(Error::InvalidConfig("batch_size must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(hyper.seed);
    let mut net = Mlp::init(train_x[0].len(), hyper.hidden, &mut rng);
    let mut velocity = vec![0.0; net.params.len()];
    let mut order: Vec<usize> = (0..train_x.len()).collect();

    let mut best = (
        accuracy_of(|x| net.predict_proba(x), val_x, val_y),
        net.params.clone(),
    );
    let mut since_best = 0;
    let mut step = 0;
    for _ in 0..hyper.max_epochs {
        order.shuffle(&mut rng);
        for batch in order.chunks(hyper.batch_size) {
            let bx: Vec<&[f64]> = batch.iter().map(|&i| train_x[i].as_slice()).collect();
            let by: Vec<f64> = batch.iter().map(|&i| train_y[i]).collect();
            let (loss, grad) = net.loss_and_gradient(&bx, &by);
            step += 1;
            if !loss.is_finite() {
                return Err(Error::Divergence { step, loss });
            }
            for ((p, v), g) in net.params.iter_mut().zip(&mut velocity).zip(&grad) {
                *v = hyper.momentum * *v - hyper.learning_rate * g;
                *p += *v;
            }
            if net.params.iter().any(|p| !p.is_finite()) {
                return Err(Error::Divergence { step, loss: f64::NAN });
            }
        }
        if let Some(patience) = hyper.patience {
            let acc = accuracy_of(|x| net.predict_proba(x), val_x, val_y);
            if acc > best.0 {
                best = (acc, net.params.clone());
                since_best = 0;
            } else {
                since_best += 1;
                if since_best >= patience {
                    break;
                }
            }
        }
    }
    if hyper.patience.is_some() {
        net.params = best.1;
    }
    Ok(net)
}
