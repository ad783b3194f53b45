//! Individual leanings from where users comment, and population curves.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::binning::{BinnedCurve, UniformBins};
use crate::corpus::{Corpus, UserIx};
use crate::mediaclust::MediaGrouping;
use crate::{Error, Result};

/// Mean media leaning over one user's comments on group media.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UserLeaning {
    pub user: UserIx,
    pub x: f64,
    /// Comments on group media.
    pub n: u64,
    pub n_positive: u64,
    pub n_negative: u64,
}

/// x = Σ c_j / n over the user's comments on media of either group.
pub fn individual_leaning(corpus: &Corpus, user: UserIx, grouping: &MediaGrouping) -> Result<UserLeaning> {
    let signs = grouping.leaning_vector(corpus.media().len());
    leaning_with(corpus, user, &signs)
        .ok_or_else(|| Error::NoQualifyingComments(corpus.user_id(user).to_owned()))
}

fn leaning_with(corpus: &Corpus, user: UserIx, signs: &[Option<f64>]) -> Option<UserLeaning> {
    let (mut pos, mut neg) = (0u64, 0u64);
    for c in corpus.comments_by(user) {
        match signs[corpus.medium_of_comment(c).index()] {
            Some(s) if s > 0.0 => pos += 1,
            Some(_) => neg += 1,
            None => {}
        }
    }
    let n = pos + neg;
    (n > 0).then(|| UserLeaning {
        user,
        x: (pos as i64 - neg as i64) as f64 / n as f64,
        n,
        n_positive: pos,
        n_negative: neg,
    })
}

/// Leanings for every listed user with at least one group comment, in input
/// order.
pub fn compute_leanings(corpus: &Corpus, users: &[UserIx], grouping: &MediaGrouping) -> Vec<UserLeaning> {
    let signs = grouping.leaning_vector(corpus.media().len());
    users
        .par_iter()
        .filter_map(|&u| leaning_with(corpus, u, &signs))
        .collect()
}

/// Dense user → x lookup.
#[derive(Debug, Clone, PartialEq)]
pub struct LeaningIndex {
    x: Vec<Option<f64>>,
}

impl LeaningIndex {
    pub fn new(n_users: usize, leanings: &[UserLeaning]) -> Self {
        let mut x = vec![None; n_users];
        for l in leanings {
            x[l.user.index()] = Some(l.x);
        }
        LeaningIndex { x }
    }

    #[inline]
    pub fn get(&self, user: UserIx) -> Option<f64> {
        self.x.get(user.index()).copied().flatten()
    }

    pub fn len(&self) -> usize {
        self.x.iter().filter(|v| v.is_some()).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Normalized histogram of x on uniform bins over [-1, 1]; each value is the
/// bin's share of users.
pub fn leaning_distribution(leanings: &[UserLeaning], n_bins: usize) -> Result<BinnedCurve> {
    if leanings.is_empty() {
        return Err(Error::EmptyInput("leanings"));
    }
    let bins = UniformBins::leaning(n_bins);
    let mut counts = vec![0u64; n_bins];
    for l in leanings {
        if let Some(i) = bins.index(l.x) {
            counts[i] += 1;
        }
    }
    let total: u64 = counts.iter().sum();
    Ok(BinnedCurve {
        bin_edges: bins.edges(),
        values: counts.iter().map(|&c| Some(c as f64 / total as f64)).collect(),
        counts,
    })
}

/// Mean comment count n per x bin; empty bins hold `None`.
pub fn activity_by_leaning(leanings: &[UserLeaning], n_bins: usize) -> Result<BinnedCurve> {
    if leanings.is_empty() {
        return Err(Error::EmptyInput("leanings"));
    }
    Ok(BinnedCurve::mean_by_bin(
        UniformBins::leaning(n_bins),
        leanings,
        |l| l.x,
        |l| l.n as f64,
    ))
}

/// Shares of users by sign of x, with comment totals on each side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PopulationSummary {
    pub n_users: u64,
    pub share_positive: f64,
    pub share_negative: f64,
    pub share_zero: f64,
    pub comments_positive: u64,
    pub comments_negative: u64,
    pub comments_zero: u64,
}

pub fn population_summary(leanings: &[UserLeaning]) -> Result<PopulationSummary> {
    if leanings.is_empty() {
        return Err(Error::EmptyInput("leanings"));
    }
    let (mut up, mut un, mut uz) = (0u64, 0u64, 0u64);
    let (mut cp, mut cn, mut cz) = (0u64, 0u64, 0u64);
    for l in leanings {
        if l.x > 0.0 {
            up += 1;
            cp += l.n;
        } else if l.x < 0.0 {
            un += 1;
            cn += l.n;
        } else {
            uz += 1;
            cz += l.n;
        }
    }
    let total = leanings.len() as f64;
    Ok(PopulationSummary {
        n_users: leanings.len() as u64,
        share_positive: up as f64 / total,
        share_negative: un as f64 / total,
        share_zero: uz as f64 / total,
        comments_positive: cp,
        comments_negative: cn,
        comments_zero: cz,
    })
}
