use serde::{Deserialize, Serialize};

/// `log(1 + v)` followed by per-dimension standardization, fitted on training
/// rows only. Dimensions with zero spread keep scale 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Normalizer {
    pub mean: Vec<f64>,
    pub scale: Vec<f64>,
}

impl Normalizer {
    pub fn fit<'a>(rows: impl IntoIterator<Item = &'a [f64]>) -> Self {
        let logged: Vec<Vec<f64>> = rows
            .into_iter()
            .map(|r| r.iter().map(|v| v.ln_1p()).collect())
            .collect();
        let dim = logged.first().map_or(0, |r| r.len());
        let n = logged.len().max(1) as f64;
        let mut mean = vec![0.0; dim];
        for r in &logged {
            for (m, v) in mean.iter_mut().zip(r) {
                *m += v;
            }
        }
        mean.iter_mut().for_each(|m| *m /= n);
        let mut var = vec![0.0; dim];
        for r in &logged {
            for ((s, v), m) in var.iter_mut().zip(r).zip(&mean) {
                *s += (v - m) * (v - m);
            }
        }
        let scale = var
            .into_iter()
            .map(|s| {
                let sd = (s / n).sqrt();
                if sd > 0.0 {
                    sd
                } else {
                    1.0
                }
            })
            .collect();
        Normalizer { mean, scale }
    }

    pub fn transform(&self, row: &[f64]) -> Vec<f64> {
        row.iter()
            .zip(&self.mean)
            .zip(&self.scale)
            .map(|((v, m), s)| (v.ln_1p() - m) / s)
            .collect()
    }
}
