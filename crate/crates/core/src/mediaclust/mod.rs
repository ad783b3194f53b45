//! Media grouping from the correlation structure of user sympathy ratios.
//!
//! Pipeline: [`build_sympathy_matrix`] → [`media_correlation`] →
//! [`hierarchical_cluster`] → [`extract_polar_groups`].

mod correlation;
mod dendrogram;
mod matrix;
mod polar;

use serde::{Deserialize, Serialize};

use crate::corpus::MediumIx;

pub use correlation::{media_correlation, MediaCorrelation};
pub use dendrogram::{hierarchical_cluster, Dendrogram, Merge};
pub use matrix::{build_sympathy_matrix, comment_sympathy_ratio, SympathyMatrix};
pub use polar::{extract_polar_groups, polarization_score, Orientation};

/// One side of the media bipartition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GroupSign {
    Positive,
    Negative,
}

impl GroupSign {
    pub fn value(self) -> f64 {
        match self {
            GroupSign::Positive => 1.0,
            GroupSign::Negative => -1.0,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            GroupSign::Positive => "A",
            GroupSign::Negative => "B",
        }
    }

    pub fn flip(self) -> Self {
        match self {
            GroupSign::Positive => GroupSign::Negative,
            GroupSign::Negative => GroupSign::Positive,
        }
    }
}

/// Two polar media groups with leanings +1 (group A) and -1 (group B).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MediaGrouping {
    pub group_a: Vec<MediumIx>,
    pub group_b: Vec<MediumIx>,
    pub unassigned: Vec<MediumIx>,
}

impl MediaGrouping {
    /// Builds a grouping; every list is sorted.
    pub fn new(
        mut group_a: Vec<MediumIx>,
        mut group_b: Vec<MediumIx>,
        mut unassigned: Vec<MediumIx>,
    ) -> Self {
        group_a.sort();
        group_b.sort();
        unassigned.sort();
        MediaGrouping {
            group_a,
            group_b,
            unassigned,
        }
    }

    pub fn group(&self, sign: GroupSign) -> &[MediumIx] {
        match sign {
            GroupSign::Positive => &self.group_a,
            GroupSign::Negative => &self.group_b,
        }
    }

    pub fn sign_of(&self, m: MediumIx) -> Option<GroupSign> {
        if self.group_a.binary_search(&m).is_ok() {
            Some(GroupSign::Positive)
        } else if self.group_b.binary_search(&m).is_ok() {
            Some(GroupSign::Negative)
        } else {
            None
        }
    }

    /// Media of both groups, sorted.
    pub fn group_media(&self) -> Vec<MediumIx> {
        let mut all: Vec<_> = self.group_a.iter().chain(&self.group_b).copied().collect();
        all.sort();
        all
    }

    /// Leaning `c_m` per medium index (`None` off-group), sized `n_media`.
    pub fn leaning_vector(&self, n_media: usize) -> Vec<Option<f64>> {
        let mut v = vec![None; n_media];
        for &m in &self.group_a {
            v[m.index()] = Some(1.0);
        }
        for &m in &self.group_b {
            v[m.index()] = Some(-1.0);
        }
        v
    }

    /// The same bipartition with the signs exchanged.
    pub fn flipped(&self) -> Self {
        MediaGrouping {
            group_a: self.group_b.clone(),
            group_b: self.group_a.clone(),
            unassigned: self.unassigned.clone(),
        }
    }
}
