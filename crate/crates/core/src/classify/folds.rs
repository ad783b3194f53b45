use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::ArticleIx;
use crate::{Error, Result};

pub const N_FOLDS: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fold {
    pub train: Vec<ArticleIx>,
    pub validation: Vec<ArticleIx>,
    pub test: Vec<ArticleIx>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldPlan {
    pub folds: Vec<Fold>,
}

/// Rotating 60/20/20 splits.
///
/// Articles are shuffled with the seed and cut into five consecutive parts
/// (the first `n % 5` parts get one extra article). Fold `f` tests on part
/// `f`, validates on part `f + 1 mod 5` and trains on the other three.
pub fn make_folds(articles: &[ArticleIx], seed: u64) -> Result<FoldPlan> {
    if articles.len() < 2 * N_FOLDS {
        return Err(Error::InvalidArgument(format!(
            "need at least {} articles for {N_FOLDS} folds, got {}",
            2 * N_FOLDS,
            articles.len()
        )));
    }
    let mut order = articles.to_vec();
    order.sort_unstable();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));

    let n = order.len();
    let mut parts = Vec::with_capacity(N_FOLDS);
    let mut start = 0;
    for p in 0..N_FOLDS {
        let len = n / N_FOLDS + usize::from(p < n % N_FOLDS);
        let mut part = order[start..start + len].to_vec();
        part.sort_unstable();
        parts.push(part);
        start += len;
    }
    let folds = (0..N_FOLDS)
        .map(|f| {
            let v = (f + 1) % N_FOLDS;
            let mut train: Vec<ArticleIx> = (0..N_FOLDS)
                .filter(|&p| p != f && p != v)
                .flat_map(|p| parts[p].iter().copied())
                .collect();
            train.sort_unstable();
            Fold {
                train,
                validation: parts[v].clone(),
                test: parts[f].clone(),
            }
        })
        .collect();
    Ok(FoldPlan { folds })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(n: u32) -> Vec<ArticleIx> {
        (0..n).map(ArticleIx).collect()
    }

    #[test]
    fn ten_articles_split_six_two_two() {
        let plan = make_folds(&ids(10), 7).unwrap();
        assert_eq!(plan.folds.len(), 5);
        for f in &plan.folds {
            assert_eq!((f.train.len(), f.validation.len(), f.test.len()), (6, 2, 2));
            let mut all: Vec<_> = f.train.iter().chain(&f.validation).chain(&f.test).collect();
            all.sort();
            all.dedup();
            assert_eq!(all.len(), 10);
        }
        let mut tests: Vec<_> = plan.folds.iter().flat_map(|f| f.test.clone()).collect();
        tests.sort();
        assert_eq!(tests, ids(10));
        assert_eq!(make_folds(&ids(10), 7).unwrap(), plan);
        assert_ne!(make_folds(&ids(10), 8).unwrap(), plan);
        assert!(make_folds(&ids(9), 7).is_err());
    }
}
