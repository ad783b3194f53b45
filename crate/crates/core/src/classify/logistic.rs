use serde::{Deserialize, Serialize};

use super::mlp::{bce_with_logit, dot, sigmoid};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LogisticHyper {
    pub learning_rate: f64,
    pub epochs: usize,
    pub l2: f64,
}

impl Default for LogisticHyper {
    fn default() -> Self {
        LogisticHyper {
            learning_rate: 0.1,
            epochs: 500,
            l2: 1e-4,
        }
    }
}

/// `p = sigmoid(w·x + b)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Logistic {
    pub weights: Vec<f64>,
    pub bias: f64,
}

impl Logistic {
    pub fn zeros(dim: usize) -> Self {
        Logistic {
            weights: vec![0.0; dim],
            bias: 0.0,
        }
    }

    pub fn logit(&self, x: &[f64]) -> f64 {
        self.bias + dot(&self.weights, x)
    }

    pub fn predict_proba(&self, x: &[f64]) -> f64 {
        sigmoid(self.logit(x))
    }

    /// Mean cross-entropy plus `l2/2 · |w|²` (bias unpenalized), and its
    /// gradient laid out as `[w..., b]`.
    pub fn loss_and_gradient<X: AsRef<[f64]>>(&self, xs: &[X], ys: &[f64], l2: f64) -> (f64, Vec<f64>) {
        let d = self.weights.len();
        let mut grad = vec![0.0; d + 1];
        let mut loss = 0.0;
        let inv_n = 1.0 / xs.len() as f64;
        for (x, &y) in xs.iter().zip(ys) {
            let x = x.as_ref();
            let z = self.logit(x);
            loss += bce_with_logit(z, y);
            let r = (sigmoid(z) - y) * inv_n;
            for (g, xi) in grad[..d].iter_mut().zip(x) {
                *g += r * xi;
            }
            grad[d] += r;
        }
        let mut penalty = 0.0;
        for (g, w) in grad[..d].iter_mut().zip(&self.weights) {
            *g += l2 * w;
            penalty += w * w;
        }
        (loss * inv_n + 0.5 * l2 * penalty, grad)
    }

    pub fn params(&self) -> Vec<f64> {
        let mut p = self.weights.clone();
        p.push(self.bias);
        p
    }

    pub fn set_params(&mut self, p: &[f64]) {
        let d = self.weights.len();
        self.weights.copy_from_slice(&p[..d]);
        self.bias = p[d];
    }
}

/// Full-batch gradient descent from zero weights.
pub fn fit_logistic(xs: &[Vec<f64>], ys: &[f64], hyper: &LogisticHyper) -> Result<Logistic> {
    let Some(first) = xs.first() else {
        return Err(Error::EmptyInput("training split"));
    };
    let mut model = Logistic::zeros(first.len());
    for step in 1..=hyper.epochs {
        let (loss, grad) = model.loss_and_gradient(xs, ys, hyper.l2);
        if !loss.is_finite() {
            return Err(Error::Divergence { step, loss });
        }
        for (w, g) in model.weights.iter_mut().zip(&grad) {
            *w -= hyper.learning_rate * g;
        }
        model.bias -= hyper.learning_rate * grad[grad.len() - 1];
    }
    Ok(model)
}
