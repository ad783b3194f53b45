use super::MediaCorrelation;
use crate::corpus::MediumIx;

/// One agglomeration step. Cluster ids follow the usual convention: leaves are
/// `0..n`, and merge `k` creates cluster `n + k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Merge {
    /// The merged cluster with the smaller label.
    pub left: usize,
    pub right: usize,
    pub distance: f64,
    pub size: usize,
}

/// Average-linkage merge tree over media, with distance `1 - r`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dendrogram {
    leaves: Vec<MediumIx>,
    merges: Vec<Merge>,
}

impl Dendrogram {
    pub fn leaves(&self) -> &[MediumIx] {
        &self.leaves
    }

    pub fn merges(&self) -> &[Merge] {
        &self.merges
    }

    /// Leaf positions of every cluster id, `0..2n-1`, each sorted.
    pub fn clusters(&self) -> Vec<Vec<usize>> {
        let n = self.leaves.len();
        let mut out: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
        for m in &self.merges {
            let mut members = out[m.left].clone();
            members.extend_from_slice(&out[m.right]);
            members.sort_unstable();
            out.push(members);
        }
        out
    }

    /// Leaf positions in plotting order (left-to-right traversal of the tree).
    pub fn leaf_order(&self) -> Vec<usize> {
        let n = self.leaves.len();
        if n == 0 {
            return Vec::new();
        }
        let mut order = Vec::with_capacity(n);
        let mut stack = vec![n + self.merges.len() - 1];
        while let Some(c) = stack.pop() {
            if c < n {
                order.push(c);
            } else {
                let m = &self.merges[c - n];
                stack.push(m.right);
                stack.push(m.left);
            }
        }
        order
    }
}

/// Agglomerative clustering with average linkage on `d = 1 - r`.
///
/// Distances between clusters are kept up to date with the Lance-Williams
/// recurrence. Among equally close pairs the one whose (smaller, larger)
/// cluster labels are lexicographically smallest merges first, where a
/// cluster's label is its smallest medium index (medium indices follow id
/// order). Merge heights are made non-decreasing against rounding.
pub fn hierarchical_cluster(corr: &MediaCorrelation) -> Dendrogram {
    let n = corr.len();
    let leaves = corr.media().to_vec();
    let mut dist = vec![0.0f64; n * n];
    for i in 0..n {
        for j in 0..n {
            dist[i * n + j] = 1.0 - corr.r(i, j);
        }
    }
    // slot i holds the live cluster that started at leaf i
    let mut alive = vec![true; n];
    let mut id: Vec<usize> = (0..n).collect();
    let mut size = vec![1usize; n];
    let mut label: Vec<MediumIx> = leaves.clone();
    let mut merges = Vec::with_capacity(n.saturating_sub(1));
    let mut floor = f64::NEG_INFINITY;

    for step in 0..n.saturating_sub(1) {
        let mut best: Option<(f64, (MediumIx, MediumIx), usize, usize)> = None;
        for i in 0..n {
            if !alive[i] {
                continue;
            }
            for j in i + 1..n {
                if !alive[j] {
                    continue;
                }
                let d = dist[i * n + j];
                let key = (label[i].min(label[j]), label[i].max(label[j]));
                let better = match &best {
                    None => true,
                    Some((bd, bkey, _, _)) => d < *bd || (d == *bd && key < *bkey),
                };
                if better {
                    best = Some((d, key, i, j));
                }
            }
        }
        let (d, _, i, j) = best.expect("at least two live clusters");
        let (keep, gone) = if label[i] < label[j] { (i, j) } else { (j, i) };
        floor = floor.max(d);
        merges.push(Merge {
            left: id[keep],
            right: id[gone],
            distance: floor,
            size: size[keep] + size[gone],
        });

        let (si, sj) = (size[keep] as f64, size[gone] as f64);
        for k in 0..n {
            if alive[k] && k != keep && k != gone {
                let dk = (si * dist[k * n + keep] + sj * dist[k * n + gone]) / (si + sj);
                dist[k * n + keep] = dk;
                dist[keep * n + k] = dk;
            }
        }
        alive[gone] = false;
        size[keep] += size[gone];
        label[keep] = label[keep].min(label[gone]);
        id[keep] = n + step;
    }
    Dendrogram { leaves, merges }
}
