use rayon::prelude::*;

use super::SympathyMatrix;
use crate::corpus::MediumIx;
use crate::stats::pearson;

/// Symmetric media × media correlation of user sympathy ratios.
#[derive(Debug, Clone, PartialEq)]
pub struct MediaCorrelation {
    media: Vec<MediumIx>,
    r: Vec<f64>,
    support: Vec<u32>,
}

impl MediaCorrelation {
    /// Builds a correlation from a full row-major matrix. Used by tests and by
    /// table readers; the matrix must be square, symmetric with unit diagonal.
    pub fn from_parts(media: Vec<MediumIx>, r: Vec<f64>, support: Vec<u32>) -> Self {
        let n = media.len();
        assert_eq!(r.len(), n * n, "correlation shape mismatch");
        assert_eq!(support.len(), n * n, "support shape mismatch");
        MediaCorrelation { media, r, support }
    }

    pub fn media(&self) -> &[MediumIx] {
        &self.media
    }

    pub fn len(&self) -> usize {
        self.media.len()
    }

    pub fn is_empty(&self) -> bool {
        self.media.is_empty()
    }

    #[inline]
    pub fn r(&self, i: usize, j: usize) -> f64 {
        self.r[i * self.media.len() + j]
    }

    /// Users with a value in both columns.
    #[inline]
    pub fn support(&self, i: usize, j: usize) -> u32 {
        self.support[i * self.media.len() + j]
    }

    pub fn is_symmetric(&self) -> bool {
        let n = self.len();
        (0..n).all(|i| {
            self.r(i, i) == 1.0 && (0..n).all(|j| self.r(i, j) == self.r(j, i) && self.r(i, j).abs() <= 1.0)
        })
    }
}

/// Pairwise-complete Pearson correlation between matrix columns.
///
/// Pairs with fewer than `min_overlap` shared users, or with a constant column
/// on the overlap, get r = 0. Each pair is summed over users in row order, so
/// the result does not depend on the thread count.
pub fn media_correlation(matrix: &SympathyMatrix, min_overlap: usize) -> MediaCorrelation {
    let n = matrix.media().len();
    let n_users = matrix.users().len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();

    let cells: Vec<(f64, u32)> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let mut xs = Vec::new();
            let mut ys = Vec::new();
            for row in 0..n_users {
                if let (Some(x), Some(y)) = (matrix.get(row, i), matrix.get(row, j)) {
                    xs.push(x);
                    ys.push(y);
                }
            }
            let r = if xs.len() < min_overlap {
                0.0
            } else {
                pearson(&xs, &ys).unwrap_or(0.0)
            };
            (r, xs.len() as u32)
        })
        .collect();

    let mut r = vec![0.0; n * n];
    let mut support = vec![0u32; n * n];
    for i in 0..n {
        r[i * n + i] = 1.0;
        support[i * n + i] = (0..n_users).filter(|&u| matrix.get(u, i).is_some()).count() as u32;
    }
    for (&(i, j), &(rij, s)) in pairs.iter().zip(&cells) {
        r[i * n + j] = rij;
        r[j * n + i] = rij;
        support[i * n + j] = s;
        support[j * n + i] = s;
    }
    MediaCorrelation {
        media: matrix.media().to_vec(),
        r,
        support,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::UserIx;

    fn matrix(cols: &[Vec<Option<f64>>]) -> SympathyMatrix {
        let n_users = cols[0].len();
        let mut values = Vec::new();
        for u in 0..n_users {
            for c in cols {
                values.push(c[u]);
            }
        }
        SympathyMatrix::from_parts(
            (0..n_users as u32).map(UserIx).collect(),
            (0..cols.len() as u32).map(MediumIx).collect(),
            values,
        )
    }

    fn ramp(n: usize) -> Vec<Option<f64>> {
        (0..n)
            .map(|i| Some((i as f64 * 0.37).sin() * 0.5 + 0.5))
            .collect()
    }

    #[test]
    fn identical_columns_correlate_perfectly() {
        let c = ramp(30);
        let corr = media_correlation(&matrix(&[c.clone(), c]), 20);
        assert!((corr.r(0, 1) - 1.0).abs() < 1e-12);
        assert_eq!(corr.support(0, 1), 30);
    }

    #[test]
    fn reflected_column_anticorrelates() {
        let c = ramp(30);
        let refl: Vec<_> = c.iter().map(|v| v.map(|v| 1.0 - v)).collect();
        let corr = media_correlation(&matrix(&[c, refl]), 20);
        assert!((corr.r(0, 1) + 1.0).abs() < 1e-12);
    }

    #[test]
    fn small_overlap_and_constant_columns_zero_fill() {
        let mut a = ramp(30);
        let b = ramp(30);
        for v in a.iter_mut().skip(15) {
            *v = None;
        }
        let constant = vec![Some(0.5); 30];
        let corr = media_correlation(&matrix(&[a, b.clone(), constant]), 20);
        assert_eq!(corr.r(0, 1), 0.0);
        assert_eq!(corr.support(0, 1), 15);
        assert_eq!(corr.r(1, 2), 0.0);
        assert_eq!(corr.support(1, 2), 30);
        assert!(corr.is_symmetric());
    }
}
