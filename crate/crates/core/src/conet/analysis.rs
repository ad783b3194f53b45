use std::cmp::Reverse;
use std::collections::BinaryHeap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{CoCommentGraph, GraphMode};
use crate::binning::UniformBins;
use crate::corpus::UserIx;
use crate::leaning::LeaningIndex;
use crate::stats::pearson;
use crate::{Error, Result};

/// ⟨x_nn⟩ per non-isolated node, ascending by user.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NeighborLeanings {
    pub mode: GraphMode,
    pub values: Vec<(UserIx, f64)>,
}

impl NeighborLeanings {
    pub fn get(&self, user: UserIx) -> Option<f64> {
        self.values
            .binary_search_by_key(&user, |p| p.0)
            .ok()
            .map(|k| self.values[k].1)
    }
}

fn node_leanings(graph: &CoCommentGraph, leanings: &LeaningIndex) -> Result<Vec<f64>> {
    graph
        .nodes()
        .iter()
        .map(|&u| {
            leanings
                .get(u)
                .ok_or_else(|| Error::InvalidArgument(format!("graph node {} has no leaning", u.0)))
        })
        .collect()
}

fn neighbor_means(graph: &CoCommentGraph, x: &[f64]) -> Vec<Option<f64>> {
    (0..graph.n_nodes())
        .into_par_iter()
        .map(|i| {
            let (mut num, mut den) = (0.0, 0u64);
            for (j, w) in graph.neighbors(i) {
                num += w as f64 * x[j];
                den += w as u64;
            }
            (den > 0).then(|| num / den as f64)
        })
        .collect()
}

/// Mean neighbor leaning under the graph's mode: Σ w x / Σ w when weighted,
/// the plain neighbor mean otherwise. Isolated nodes are left out.
pub fn neighbor_mean_leaning(graph: &CoCommentGraph, leanings: &LeaningIndex) -> Result<NeighborLeanings> {
    let x = node_leanings(graph, leanings)?;
    let values = neighbor_means(graph, &x)
        .into_iter()
        .zip(graph.nodes())
        .filter_map(|(m, &u)| m.map(|m| (u, m)))
        .collect();
    Ok(NeighborLeanings {
        mode: graph.mode(),
        values,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AssortativityResult {
    pub pearson: f64,
    pub n_nodes_used: usize,
    pub mode: GraphMode,
}

fn paired(leanings: &LeaningIndex, xnn: &NeighborLeanings) -> (Vec<f64>, Vec<f64>) {
    xnn.values
        .iter()
        .filter_map(|&(u, m)| leanings.get(u).map(|x| (x, m)))
        .unzip()
}

/// Pearson correlation between x and ⟨x_nn⟩ over users having both.
pub fn leaning_assortativity(leanings: &LeaningIndex, xnn: &NeighborLeanings) -> Result<AssortativityResult> {
    let (xs, ys) = paired(leanings, xnn);
    if xs.len() < 3 {
        return Err(Error::InvalidArgument(format!(
            "assortativity needs at least 3 users, got {}",
            xs.len()
        )));
    }
    let r = pearson(&xs, &ys).ok_or(Error::ConstantInput("leaning"))?;
    Ok(AssortativityResult {
        pearson: r,
        n_nodes_used: xs.len(),
        mode: xnn.mode,
    })
}

/// Assortativity after randomly permuting leanings across graph nodes, once
/// per shuffle. Shuffle `k` uses a generator seeded with `seed + k`.
pub fn shuffled_assortativity(
    graph: &CoCommentGraph,
    leanings: &LeaningIndex,
    n_shuffles: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    let x = node_leanings(graph, leanings)?;
    (0..n_shuffles)
        .map(|k| {
            let mut perm = x.clone();
            perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed.wrapping_add(k as u64)));
            let (xs, ys): (Vec<f64>, Vec<f64>) = neighbor_means(graph, &perm)
                .into_iter()
                .zip(&perm)
                .filter_map(|(m, &xi)| m.map(|m| (xi, m)))
                .unzip();
            pearson(&xs, &ys).ok_or(Error::ConstantInput("leaning"))
        })
        .collect()
}

/// Normalized 2-D histogram of (x, ⟨x_nn⟩) over [-1, 1]², row-major in x.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointDensity {
    pub n_bins: usize,
    pub mass: Vec<f64>,
    pub counts: Vec<u64>,
}

impl JointDensity {
    pub fn at(&self, ix: usize, iy: usize) -> f64 {
        self.mass[ix * self.n_bins + iy]
    }

    pub fn bins(&self) -> UniformBins {
        UniformBins::leaning(self.n_bins)
    }

    /// Mass in cells whose centres have x and ⟨x_nn⟩ of the same strict
    /// sign. Cells on the zero row or column count for neither quadrant.
    pub fn diagonal_quadrant_mass(&self) -> f64 {
        let b = self.bins();
        let mut total = 0.0;
        for ix in 0..self.n_bins {
            for iy in 0..self.n_bins {
                if b.center(ix) * b.center(iy) > 0.0 {
                    total += self.at(ix, iy);
                }
            }
        }
        total
    }
}

pub fn joint_density(leanings: &LeaningIndex, xnn: &NeighborLeanings, n_bins: usize) -> Result<JointDensity> {
    let (xs, ys) = paired(leanings, xnn);
    if xs.is_empty() {
        return Err(Error::EmptyInput("joint density"));
    }
    let bins = UniformBins::leaning(n_bins);
    let mut counts = vec![0u64; n_bins * n_bins];
    for (x, y) in xs.iter().zip(&ys) {
        if let (Some(i), Some(j)) = (bins.index(*x), bins.index(*y)) {
            counts[i * n_bins + j] += 1;
        }
    }
    let total: u64 = counts.iter().sum();
    let mass = counts.iter().map(|&c| c as f64 / total as f64).collect();
    Ok(JointDensity { n_bins, mass, counts })
}

/// An exported edge, endpoints ordered `a < b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub a: UserIx,
    pub b: UserIx,
    pub weight: u32,
}

/// Heavier first, then the smaller user pair.
type EdgeRank = (u32, Reverse<(UserIx, UserIx)>);

/// The heaviest `ceil(fraction * |E|)` edges by shared-article count,
/// heaviest first, ties by ascending user pair.
pub fn export_top_edges(graph: &CoCommentGraph, fraction: f64) -> Vec<Edge> {
    let n_edges = graph.n_edges();
    let k = ((fraction.clamp(0.0, 1.0) * n_edges as f64).ceil() as usize).min(n_edges);
    if k == 0 {
        return Vec::new();
    }
    let nodes = graph.nodes();
    // min-heap on rank: the root is the worst edge kept so far
    let mut heap: BinaryHeap<Reverse<EdgeRank>> = BinaryHeap::with_capacity(k + 1);
    for i in 0..graph.n_nodes() {
        for (j, _) in graph.neighbors(i).filter(|&(j, _)| j > i) {
            let w = graph.shared_articles(i, j);
            let key = (w, Reverse((nodes[i], nodes[j])));
            if heap.len() < k {
                heap.push(Reverse(key));
            } else if key > heap.peek().unwrap().0 {
                heap.pop();
                heap.push(Reverse(key));
            }
        }
    }
    let mut out: Vec<Edge> = heap
        .into_iter()
        .map(|Reverse((w, Reverse((a, b))))| Edge { a, b, weight: w })
        .collect();
    out.sort_unstable_by(|x, y| y.weight.cmp(&x.weight).then((x.a, x.b).cmp(&(y.a, y.b))));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conet::build_cocomment_graph;
    use crate::corpus::test_support::Builder;
    use crate::corpus::Corpus;
    use crate::leaning::UserLeaning;

    fn index(xs: &[(u32, f64)], n: usize) -> LeaningIndex {
        let ls: Vec<UserLeaning> = xs
            .iter()
            .map(|&(u, x)| UserLeaning {
                user: UserIx(u),
                x,
                n: 1,
                n_positive: 0,
                n_negative: 0,
            })
            .collect();
        LeaningIndex::new(n, &ls)
    }

    /// c co-comments with p on 3 articles and with q on 1.
    fn star() -> Corpus {
        Builder::default()
            .medium("m")
            .article("a1", "m")
            .article("a2", "m")
            .article("a3", "m")
            .article("a4", "m")
            .comment("a1", "c", (0, 0, 0))
            .comment("a1", "p", (0, 0, 0))
            .comment("a2", "c", (0, 0, 0))
            .comment("a2", "p", (0, 0, 0))
            .comment("a3", "c", (0, 0, 0))
            .comment("a3", "p", (0, 0, 0))
            .comment("a4", "c", (0, 0, 0))
            .comment("a4", "q", (0, 0, 0))
            .build()
    }

    #[test]
    fn weighted_and_plain_neighbor_means() {
        let c = star();
        let users = [UserIx(0), UserIx(1), UserIx(2)];
        let lx = index(&[(0, 0.0), (1, 1.0), (2, -1.0)], 3);
        let g = build_cocomment_graph(&c, &users, GraphMode::Weighted);
        let w = neighbor_mean_leaning(&g, &lx).unwrap();
        assert_eq!(w.get(UserIx(0)), Some(0.5));
        let u = neighbor_mean_leaning(&g.with_mode(GraphMode::Unweighted), &lx).unwrap();
        assert_eq!(u.get(UserIx(0)), Some(0.0));
        assert_eq!(u.get(UserIx(1)), Some(0.0));
    }

    #[test]
    fn missing_leaning_is_an_error() {
        let c = star();
        let g = build_cocomment_graph(&c, &[UserIx(0), UserIx(1)], GraphMode::Weighted);
        assert!(neighbor_mean_leaning(&g, &index(&[(0, 1.0)], 3)).is_err());
    }

    #[test]
    fn identity_assortativity_is_one() {
        let lx = index(&[(0, -1.0), (1, 0.2), (2, 0.9)], 3);
        let xnn = NeighborLeanings {
            mode: GraphMode::Weighted,
            values: vec![(UserIx(0), -1.0), (UserIx(1), 0.2), (UserIx(2), 0.9)],
        };
        let r = leaning_assortativity(&lx, &xnn).unwrap();
        assert!((r.pearson - 1.0).abs() < 1e-12);
        assert_eq!(r.n_nodes_used, 3);
        let flat = index(&[(0, 0.5), (1, 0.5), (2, 0.5)], 3);
        assert!(matches!(
            leaning_assortativity(&flat, &xnn),
            Err(Error::ConstantInput(_))
        ));
    }

    #[test]
    fn joint_density_point_mass() {
        let lx = index(&[(0, 1.0), (1, 1.0)], 2);
        let xnn = NeighborLeanings {
            mode: GraphMode::Weighted,
            values: vec![(UserIx(0), 1.0), (UserIx(1), 1.0)],
        };
        let d = joint_density(&lx, &xnn, 61).unwrap();
        assert_eq!(d.at(60, 60), 1.0);
        assert_eq!(d.mass.iter().sum::<f64>(), 1.0);
        assert_eq!(d.diagonal_quadrant_mass(), 1.0);
    }

    #[test]
    fn top_edges_fraction_and_ties() {
        let c = star();
        let g = build_cocomment_graph(&c, &[UserIx(0), UserIx(1), UserIx(2)], GraphMode::Weighted);
        let top = export_top_edges(&g, 0.02);
        assert_eq!(
            top,
            vec![Edge {
                a: UserIx(0),
                b: UserIx(1),
                weight: 3
            }]
        );
        assert_eq!(export_top_edges(&g, 1.0).len(), 2);
        assert!(export_top_edges(&g, 0.0).is_empty());
    }
}
