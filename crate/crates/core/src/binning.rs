//! Uniform binning over a closed interval and the binned-curve table type.

use serde::{Deserialize, Serialize};

/// `n` equal-width bins over `[lo, hi]`. Every bin is half-open except the
/// last, which is closed so `hi` itself is counted.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformBins {
    lo: f64,
    hi: f64,
    n: usize,
}

impl UniformBins {
    pub fn new(lo: f64, hi: f64, n: usize) -> Self {
        assert!(n > 0 && hi > lo, "invalid bins [{lo}, {hi}] x {n}");
        UniformBins { lo, hi, n }
    }

    /// The leaning axis `[-1, 1]`.
    pub fn leaning(n: usize) -> Self {
        Self::new(-1.0, 1.0, n)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn edge(&self, i: usize) -> f64 {
        if i == self.n {
            self.hi
        } else {
            self.lo + (self.hi - self.lo) * i as f64 / self.n as f64
        }
    }

    pub fn edges(&self) -> Vec<f64> {
        (0..=self.n).map(|i| self.edge(i)).collect()
    }

    pub fn center(&self, i: usize) -> f64 {
        (self.edge(i) + self.edge(i + 1)) / 2.0
    }

    /// Bin holding `x`, or `None` outside `[lo, hi]` (and for NaN).
    pub fn index(&self, x: f64) -> Option<usize> {
        if !(x >= self.lo && x <= self.hi) {
            return None;
        }
        let raw = ((x - self.lo) / (self.hi - self.lo) * self.n as f64).floor() as usize;
        let mut i = raw.min(self.n - 1);
        // keep the index consistent with the reported edges
        if i > 0 && x < self.edge(i) {
            i -= 1;
        } else if i + 1 < self.n && x >= self.edge(i + 1) {
            i += 1;
        }
        Some(i)
    }
}

/// Per-bin values with sample counts. Bins without samples hold `None`
/// unless the curve is a normalized histogram.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinnedCurve {
    pub bin_edges: Vec<f64>,
    pub values: Vec<Option<f64>>,
    pub counts: Vec<u64>,
}

impl BinnedCurve {
    pub fn n_bins(&self) -> usize {
        self.values.len()
    }

    pub fn center(&self, i: usize) -> f64 {
        (self.bin_edges[i] + self.bin_edges[i + 1]) / 2.0
    }

    pub fn total_count(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// `(center, value)` for every bin holding a value.
    pub fn occupied(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .filter_map(|(i, v)| v.map(|v| (self.center(i), v)))
    }

    /// Mean of `value_of(sample)` per bin of `key_of(sample)`.
    pub(crate) fn mean_by_bin<T>(
        bins: UniformBins,
        samples: impl IntoIterator<Item = T>,
        key_of: impl Fn(&T) -> f64,
        value_of: impl Fn(&T) -> f64,
    ) -> Self {
        let mut sums = vec![0.0; bins.len()];
        let mut counts = vec![0u64; bins.len()];
        for s in samples {
            if let Some(i) = bins.index(key_of(&s)) {
                sums[i] += value_of(&s);
                counts[i] += 1;
            }
        }
        let values = sums
            .iter()
            .zip(&counts)
            .map(|(&s, &c)| (c > 0).then(|| s / c as f64))
            .collect();
        BinnedCurve {
            bin_edges: bins.edges(),
            values,
            counts,
        }
    }
}
