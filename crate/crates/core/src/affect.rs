//! How each media group responds to commenters across the leaning axis.

use serde::{Deserialize, Serialize};

use crate::binning::{BinnedCurve, UniformBins};
use crate::corpus::{Comment, Corpus};
use crate::leaning::LeaningIndex;
use crate::mediaclust::{GroupSign, MediaGrouping};
use crate::stats::spearman;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ResponseKind {
    Replies,
    Sympathies,
    Antipathies,
}

impl ResponseKind {
    pub const ALL: [ResponseKind; 3] = [
        ResponseKind::Replies,
        ResponseKind::Sympathies,
        ResponseKind::Antipathies,
    ];

    pub fn of(self, c: &Comment) -> u32 {
        match self {
            ResponseKind::Replies => c.replies,
            ResponseKind::Sympathies => c.sympathies,
            ResponseKind::Antipathies => c.antipathies,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ResponseKind::Replies => "replies",
            ResponseKind::Sympathies => "sympathies",
            ResponseKind::Antipathies => "antipathies",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResponseCurve {
    pub group: GroupSign,
    pub kind: ResponseKind,
    pub curve: BinnedCurve,
}

fn group_comments<'a>(
    corpus: &'a Corpus,
    grouping: &'a MediaGrouping,
    group: GroupSign,
) -> impl Iterator<Item = &'a Comment> + 'a {
    let media = grouping.group(group);
    media
        .iter()
        .flat_map(move |&m| corpus.articles_of(m))
        .flat_map(move |a| corpus.comments_on(a))
}

/// Mean response count per comment on the group's media, binned by the
/// commenter's leaning. Commenters without a leaning are skipped.
///
/// Counts are summed as integers, so the result is independent of comment
/// order.
pub fn response_curve(
    corpus: &Corpus,
    leanings: &LeaningIndex,
    grouping: &MediaGrouping,
    group: GroupSign,
    kind: ResponseKind,
    n_bins: usize,
) -> Result<ResponseCurve> {
    let bins = UniformBins::leaning(n_bins);
    let mut sums = vec![0u64; n_bins];
    let mut counts = vec![0u64; n_bins];
    for c in group_comments(corpus, grouping, group) {
        let Some(x) = leanings.get(c.user) else {
            continue;
        };
        if let Some(i) = bins.index(x) {
            sums[i] += kind.of(c) as u64;
            counts[i] += 1;
        }
    }
    if counts.iter().all(|&c| c == 0) {
        return Err(Error::EmptyInput("group comments"));
    }
    let values = sums
        .iter()
        .zip(&counts)
        .map(|(&s, &n)| (n > 0).then(|| s as f64 / n as f64))
        .collect();
    Ok(ResponseCurve {
        group,
        kind,
        curve: BinnedCurve {
            bin_edges: bins.edges(),
            values,
            counts,
        },
    })
}

/// Comments with a given reply count, or at least `lo` replies when `hi` is
/// `None`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReplyBucket {
    pub lo: u32,
    pub hi: Option<u32>,
    pub count: u64,
    pub mean_sympathies: Option<f64>,
    pub mean_antipathies: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplyAffectRelation {
    pub group: GroupSign,
    pub buckets: Vec<ReplyBucket>,
}

/// Mean sympathies and antipathies by reply count on the group's media:
/// buckets hold exactly 0, 1, …, K-1 replies, then K or more.
pub fn reply_affect_relation(
    corpus: &Corpus,
    grouping: &MediaGrouping,
    group: GroupSign,
    max_bucket: u32,
) -> Result<ReplyAffectRelation> {
    let k = max_bucket as usize;
    let mut n = vec![0u64; k + 1];
    let mut s = vec![0u64; k + 1];
    let mut a = vec![0u64; k + 1];
    for c in group_comments(corpus, grouping, group) {
        let b = (c.replies as usize).min(k);
        n[b] += 1;
        s[b] += c.sympathies as u64;
        a[b] += c.antipathies as u64;
    }
    if n.iter().all(|&c| c == 0) {
        return Err(Error::EmptyInput("group comments"));
    }
    let mean = |sum: u64, count: u64| (count > 0).then(|| sum as f64 / count as f64);
    let buckets = (0..=k)
        .map(|b| ReplyBucket {
            lo: b as u32,
            hi: (b < k).then_some(b as u32),
            count: n[b],
            mean_sympathies: mean(s[b], n[b]),
            mean_antipathies: mean(a[b], n[b]),
        })
        .collect();
    Ok(ReplyAffectRelation { group, buckets })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShapeStats {
    /// Spearman correlation of bin centre against value over occupied bins.
    pub spearman: f64,
    /// Centre of the highest bin, leftmost on ties.
    pub peak_center: f64,
}

pub const MIN_SHAPE_BINS: usize = 5;

pub fn curve_shape_stats(curve: &BinnedCurve) -> Result<ShapeStats> {
    let (centers, values): (Vec<f64>, Vec<f64>) = curve.occupied().unzip();
    if centers.len() < MIN_SHAPE_BINS {
        return Err(Error::TooFewBins {
            needed: MIN_SHAPE_BINS,
            found: centers.len(),
        });
    }
    let mut peak = 0;
    for i in 1..values.len() {
        if values[i] > values[peak] {
            peak = i;
        }
    }
    // a constant curve has no rank order
    let rho = spearman(&centers, &values).unwrap_or(0.0);
    Ok(ShapeStats {
        spearman: rho,
        peak_center: centers[peak],
    })
}
