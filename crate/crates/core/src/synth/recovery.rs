use serde::{Deserialize, Serialize};

use super::GroundTruth;
use crate::corpus::Corpus;
use crate::leaning::UserLeaning;
use crate::mediaclust::MediaGrouping;
use crate::stats::{adjusted_rand_index, pearson};
use crate::{Error, Result};

/// How well a recovered grouping and leanings match the planted truth.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RecoveryReport {
    pub group_exact_match: bool,
    pub group_ari: f64,
    pub leaning_sign_accuracy: f64,
    /// `None` when either side is constant over the shared users.
    pub leaning_pearson: Option<f64>,
}

/// Compares a recovered grouping and leanings with the planted truth.
///
/// The recovered orientation is unidentifiable, so the grouping is first
/// aligned with the truth: the global sign that agrees on more polar media
/// wins, with leaning sign agreement as tie-break and +1 last. ARI is taken
/// over media that are polar in both the truth and the grouping.
pub fn evaluate_recovery(
    truth: &GroundTruth,
    corpus: &Corpus,
    grouping: &MediaGrouping,
    leanings: &[UserLeaning],
) -> Result<RecoveryReport> {
    let assigned: Vec<(i8, i8)> = corpus
        .media()
        .iter()
        .enumerate()
        .filter_map(|(i, m)| {
            let t = *truth.media_group.get(&m.id)?;
            let g = grouping.sign_of(crate::corpus::MediumIx(i as u32))?;
            (t != 0).then_some((t, g.value() as i8))
        })
        .collect();
    if assigned.is_empty() {
        return Err(Error::DisjointIds("media"));
    }
    let users: Vec<(f64, f64)> = leanings
        .iter()
        .filter_map(|l| {
            let t = *truth.user_leaning.get(corpus.user_id(l.user))?;
            Some((t, l.x))
        })
        .collect();
    if users.is_empty() {
        return Err(Error::DisjointIds("users"));
    }

    let media_agree = |s: i8| assigned.iter().filter(|(t, g)| *t == s * g).count();
    let sign_agree = |s: f64| users.iter().filter(|(t, x)| same_sign(*t, s * x)).count();
    let s: i8 = match media_agree(1).cmp(&media_agree(-1)) {
        std::cmp::Ordering::Greater => 1,
        std::cmp::Ordering::Less => -1,
        std::cmp::Ordering::Equal if sign_agree(-1.0) > sign_agree(1.0) => -1,
        std::cmp::Ordering::Equal => 1,
    };

    let truth_pos: Vec<&str> = truth.media_in_group(s);
    let truth_neg: Vec<&str> = truth.media_in_group(-s);
    let ids = |v: &[crate::corpus::MediumIx]| {
        let mut out: Vec<&str> = v.iter().map(|&m| corpus.medium(m).id.as_str()).collect();
        out.sort_unstable();
        out
    };
    let group_exact_match = ids(&grouping.group_a) == truth_pos && ids(&grouping.group_b) == truth_neg;

    let (t, g): (Vec<i8>, Vec<i8>) = assigned.into_iter().unzip();
    let group_ari = adjusted_rand_index(&t, &g);
    let sf = s as f64;
    let leaning_sign_accuracy = sign_agree(sf) as f64 / users.len() as f64;
    let (tx, rx): (Vec<f64>, Vec<f64>) = users.iter().map(|&(t, x)| (t, sf * x)).unzip();
    Ok(RecoveryReport {
        group_exact_match,
        group_ari,
        leaning_sign_accuracy,
        leaning_pearson: pearson(&tx, &rx),
    })
}

fn same_sign(a: f64, b: f64) -> bool {
    a.signum() == b.signum() && (a == 0.0) == (b == 0.0)
}
