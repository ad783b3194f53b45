use super::{Dendrogram, MediaCorrelation, MediaGrouping};
use crate::corpus::MediumIx;
use crate::{Error, Result};

/// Which of the two extracted clusters receives leaning +1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Orientation {
    /// The cluster holding this medium is group A. Falls back to
    /// [`Orientation::SmallestMember`] when the medium is in neither cluster.
    Anchor(MediumIx),
    /// The cluster holding the smallest medium id is group A.
    #[default]
    SmallestMember,
}

fn mean_intra(corr: &MediaCorrelation, members: &[usize]) -> f64 {
    let mut sum = 0.0;
    let mut n = 0usize;
    for (k, &i) in members.iter().enumerate() {
        for &j in &members[k + 1..] {
            sum += corr.r(i, j);
            n += 1;
        }
    }
    sum / n as f64
}

fn inter_sum(corr: &MediaCorrelation, a: &[usize], b: &[usize]) -> f64 {
    let mut sum = 0.0;
    for &i in a {
        for &j in b {
            sum += corr.r(i, j);
        }
    }
    sum
}

/// Separation score of two disjoint media sets (positions in `corr`):
/// the mean inter-set correlation scaled by `sqrt(|a| * |b|)`, i.e.
/// `Σ r / sqrt(|a| |b|)`. Lower is more polarized.
pub fn polarization_score(corr: &MediaCorrelation, a: &[usize], b: &[usize]) -> f64 {
    inter_sum(corr, a, b) / ((a.len() * b.len()) as f64).sqrt()
}

/// Finds the two disjoint dendrogram clusters that are most strongly
/// anticorrelated with each other.
///
/// Candidates are pairs of disjoint clusters with at least `min_size` media
/// each, positive mean intra-cluster correlation and negative mean
/// inter-cluster correlation. The pair with the lowest
/// [`polarization_score`] wins; exact ties go to the pair with the smaller
/// (label, label) key, a cluster's label being its smallest medium index.
/// Media outside the winning pair are unassigned.
pub fn extract_polar_groups(
    dendro: &Dendrogram,
    corr: &MediaCorrelation,
    min_size: usize,
    orientation: Orientation,
) -> Result<MediaGrouping> {
    let n = corr.len();
    if min_size == 0 {
        return Err(Error::InvalidArgument("min_size must be positive".into()));
    }
    if n < 2 * min_size {
        // no two disjoint clusters of the required size can exist
        return Err(Error::NoQualifyingPair);
    }
    assert_eq!(
        dendro.leaves(),
        corr.media(),
        "dendrogram and correlation disagree"
    );

    let media = corr.media();
    let candidates: Vec<(Vec<usize>, MediumIx)> = dendro
        .clusters()
        .into_iter()
        .filter(|c| c.len() >= min_size && c.len() < n)
        .filter(|c| mean_intra(corr, c) > 0.0)
        .map(|c| {
            let label = c.iter().map(|&i| media[i]).min().unwrap();
            (c, label)
        })
        .collect();

    let mut best: Option<(f64, (MediumIx, MediumIx), usize, usize)> = None;
    for (x, (a, la)) in candidates.iter().enumerate() {
        for (y, (b, lb)) in candidates.iter().enumerate().skip(x + 1) {
            // dendrogram clusters are nested or disjoint
            if a.iter().any(|i| b.binary_search(i).is_ok()) {
                continue;
            }
            let inter = inter_sum(corr, a, b);
            if inter / (a.len() * b.len()) as f64 >= 0.0 {
                continue;
            }
            let score = inter / ((a.len() * b.len()) as f64).sqrt();
            let key = ((*la).min(*lb), (*la).max(*lb));
            let better = match &best {
                None => true,
                Some((bs, bkey, _, _)) => score < *bs || (score == *bs && key < *bkey),
            };
            if better {
                best = Some((score, key, x, y));
            }
        }
    }
    let (_, _, x, y) = best.ok_or(Error::NoQualifyingPair)?;

    let to_media = |c: &[usize]| c.iter().map(|&i| media[i]).collect::<Vec<_>>();
    let (mut pos, mut neg) = (to_media(&candidates[x].0), to_media(&candidates[y].0));
    let smallest_first = candidates[x].1 < candidates[y].1;
    let flip = match orientation {
        Orientation::Anchor(m) if pos.contains(&m) => false,
        Orientation::Anchor(m) if neg.contains(&m) => true,
        _ => !smallest_first,
    };
    if flip {
        std::mem::swap(&mut pos, &mut neg);
    }
    let unassigned = media
        .iter()
        .copied()
        .filter(|m| !pos.contains(m) && !neg.contains(m))
        .collect();
    Ok(MediaGrouping::new(pos, neg, unassigned))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mediaclust::hierarchical_cluster;

    fn corr_from(f: impl Fn(usize, usize) -> f64, n: usize) -> MediaCorrelation {
        let r = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| if i == j { 1.0 } else { f(i, j) })
            .collect();
        MediaCorrelation::from_parts((0..n as u32).map(MediumIx).collect(), r, vec![0; n * n])
    }

    fn ixs(v: &[u32]) -> Vec<MediumIx> {
        v.iter().copied().map(MediumIx).collect()
    }

    #[test]
    fn perfect_blocks_are_returned() {
        let corr = corr_from(|i, j| if (i < 3) == (j < 3) { 1.0 } else { -1.0 }, 6);
        let g = extract_polar_groups(&hierarchical_cluster(&corr), &corr, 3, Orientation::default()).unwrap();
        assert_eq!(g.group_a, ixs(&[0, 1, 2]));
        assert_eq!(g.group_b, ixs(&[3, 4, 5]));
        assert!(g.unassigned.is_empty());
    }

    #[test]
    fn all_positive_matrix_has_no_pair() {
        let corr = corr_from(|i, j| 0.1 + 0.05 * ((i + j) % 3) as f64, 8);
        let err = extract_polar_groups(&hierarchical_cluster(&corr), &corr, 3, Orientation::default());
        assert!(matches!(err, Err(Error::NoQualifyingPair)));
    }

    #[test]
    fn anchor_orients_groups_and_neutrals_stay_out() {
        // blocks {0,1,2} and {4,5,6}; 3 and 7 uncorrelated
        let block = |i: usize| match i {
            0..=2 => 1,
            4..=6 => -1,
            _ => 0,
        };
        let corr = corr_from(|i, j| 0.8 * (block(i) * block(j)) as f64, 8);
        let d = hierarchical_cluster(&corr);
        let g = extract_polar_groups(&d, &corr, 3, Orientation::Anchor(MediumIx(5))).unwrap();
        assert_eq!(g.group_a, ixs(&[4, 5, 6]));
        assert_eq!(g.group_b, ixs(&[0, 1, 2]));
        assert_eq!(g.unassigned, ixs(&[3, 7]));
        let h = extract_polar_groups(&d, &corr, 3, Orientation::SmallestMember).unwrap();
        assert_eq!(h, g.flipped());
    }

    #[test]
    fn too_few_media_has_no_pair() {
        let corr = corr_from(|i, j| if (i < 2) == (j < 2) { 0.9 } else { -0.9 }, 5);
        let d = hierarchical_cluster(&corr);
        assert!(matches!(
            extract_polar_groups(&d, &corr, 3, Orientation::default()),
            Err(Error::NoQualifyingPair)
        ));
    }
}
