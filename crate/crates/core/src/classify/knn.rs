use serde::{Deserialize, Serialize};

/// Stored normalized training points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Knn {
    pub k: usize,
    pub points: Vec<Vec<f64>>,
    pub labels: Vec<u8>,
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

impl Knn {
    /// Training positions of the `k` nearest points, nearest first; equal
    /// distances go to the smaller position.
    pub fn neighbors(&self, x: &[f64]) -> Vec<usize> {
        let mut d: Vec<(f64, usize)> = self
            .points
            .iter()
            .enumerate()
            .map(|(i, p)| (sq_dist(p, x), i))
            .collect();
        let k = self.k.min(d.len());
        if k == 0 {
            return Vec::new();
        }
        let cmp = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
        if k < d.len() {
            d.select_nth_unstable_by(k - 1, cmp);
            d.truncate(k);
        }
        d.sort_unstable_by(cmp);
        d.into_iter().map(|(_, i)| i).collect()
    }

    /// Share of label-1 votes among the neighbors.
    pub fn predict_proba(&self, x: &[f64]) -> f64 {
        let nb = self.neighbors(x);
        let ones = nb.iter().filter(|&&i| self.labels[i] == 1).count();
        ones as f64 / nb.len().max(1) as f64
    }

    /// Majority vote; a tie predicts 0.
    pub fn predict(&self, x: &[f64]) -> u8 {
        u8::from(self.predict_proba(x) > 0.5)
    }
}
