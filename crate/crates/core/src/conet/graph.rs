use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, UserIx};

/// Whether edge weights count shared articles or are collapsed to 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GraphMode {
    Weighted,
    Unweighted,
}

impl GraphMode {
    pub fn name(self) -> &'static str {
        match self {
            GraphMode::Weighted => "weighted",
            GraphMode::Unweighted => "unweighted",
        }
    }
}

/// Undirected co-commenting graph in symmetric compressed-row form.
///
/// Nodes are positions into `nodes` (sorted user indices); every edge is
/// stored once per endpoint with neighbors sorted. The stored weight is
/// always the shared-article count; `mode` decides what [`Self::neighbors`]
/// reports.
#[derive(Debug, Clone, PartialEq)]
pub struct CoCommentGraph {
    nodes: Vec<UserIx>,
    offsets: Vec<usize>,
    neighbors: Vec<u32>,
    weights: Vec<u32>,
    mode: GraphMode,
}

impl CoCommentGraph {
    pub fn nodes(&self) -> &[UserIx] {
        &self.nodes
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn n_edges(&self) -> usize {
        self.neighbors.len() / 2
    }

    pub fn mode(&self) -> GraphMode {
        self.mode
    }

    /// Same edges, read in another mode.
    pub fn with_mode(mut self, mode: GraphMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn set_mode(&mut self, mode: GraphMode) {
        self.mode = mode;
    }

    pub fn position(&self, user: UserIx) -> Option<usize> {
        self.nodes.binary_search(&user).ok()
    }

    /// `(neighbor position, effective weight)` in ascending neighbor order.
    pub fn neighbors(&self, i: usize) -> impl ExactSizeIterator<Item = (usize, u32)> + '_ {
        let range = self.offsets[i]..self.offsets[i + 1];
        let unweighted = self.mode == GraphMode::Unweighted;
        self.neighbors[range.clone()]
            .iter()
            .zip(&self.weights[range])
            .map(move |(&j, &w)| (j as usize, if unweighted { 1 } else { w }))
    }

    pub fn degree(&self, i: usize) -> usize {
        self.offsets[i + 1] - self.offsets[i]
    }

    /// Sum of effective weights at node `i`.
    pub fn strength(&self, i: usize) -> u64 {
        self.neighbors(i).map(|(_, w)| w as u64).sum()
    }

    /// Shared-article count of an edge, regardless of mode; 0 if absent.
    pub fn shared_articles(&self, i: usize, j: usize) -> u32 {
        let range = self.offsets[i]..self.offsets[i + 1];
        match self.neighbors[range.clone()].binary_search(&(j as u32)) {
            Ok(k) => self.weights[range.start + k],
            Err(_) => 0,
        }
    }

    /// Effective weight of an edge; 0 if absent.
    pub fn weight(&self, i: usize, j: usize) -> u32 {
        match (self.shared_articles(i, j), self.mode) {
            (0, _) => 0,
            (_, GraphMode::Unweighted) => 1,
            (w, GraphMode::Weighted) => w,
        }
    }

    /// Every edge once as `(i, j, effective weight)` with `i < j`, in
    /// ascending `(i, j)` order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, u32)> + '_ {
        (0..self.n_nodes()).flat_map(move |i| {
            self.neighbors(i)
                .filter(move |&(j, _)| j > i)
                .map(move |(j, w)| (i, j, w))
        })
    }

    /// Sum of effective weights over edges.
    pub fn total_weight(&self) -> u64 {
        (0..self.n_nodes()).map(|i| self.strength(i)).sum::<u64>() / 2
    }
}

/// Builds the co-commenting graph over `users` with no per-article cap.
pub fn build_cocomment_graph(corpus: &Corpus, users: &[UserIx], mode: GraphMode) -> CoCommentGraph {
    build_cocomment_graph_capped(corpus, users, mode, None)
}

/// Builds the co-commenting graph over `users`.
///
/// Two users are linked when both commented on an article; the weight is the
/// number of distinct such articles. With `max_commenters` set, only the
/// earliest that many distinct listed commenters of each article (by first
/// comment time, then comment id) take part, which bounds the quadratic cost
/// of very busy articles.
///
/// Rows are accumulated independently per user into a dense scratch counter,
/// so the result does not depend on thread count or article order.
pub fn build_cocomment_graph_capped(
    corpus: &Corpus,
    users: &[UserIx],
    mode: GraphMode,
    max_commenters: Option<usize>,
) -> CoCommentGraph {
    let mut nodes = users.to_vec();
    nodes.sort_unstable();
    nodes.dedup();
    let n = nodes.len();
    let mut pos_of = vec![u32::MAX; corpus.users().len()];
    for (p, u) in nodes.iter().enumerate() {
        pos_of[u.index()] = p as u32;
    }

    // article -> distinct participating node positions
    let art_nodes: Vec<Vec<u32>> = (0..corpus.articles().len())
        .into_par_iter()
        .map(|a| {
            let mut seen: Vec<(chrono::DateTime<chrono::Utc>, &str, u32)> = corpus
                .comments_on(crate::corpus::ArticleIx(a as u32))
                .filter_map(|c| {
                    let p = pos_of[c.user.index()];
                    (p != u32::MAX).then_some((c.created_at, c.id.as_str(), p))
                })
                .collect();
            let mut out: Vec<u32> = match max_commenters {
                None => seen.iter().map(|t| t.2).collect(),
                Some(cap) => {
                    seen.sort_unstable();
                    let mut firsts = Vec::new();
                    let mut taken = std::collections::HashSet::new();
                    for &(_, _, p) in &seen {
                        if firsts.len() == cap {
                            break;
                        }
                        if taken.insert(p) {
                            firsts.push(p);
                        }
                    }
                    firsts
                }
            };
            out.sort_unstable();
            out.dedup();
            out
        })
        .collect();

    // node -> articles it takes part in
    let mut node_arts: Vec<Vec<u32>> = vec![Vec::new(); n];
    for (a, ps) in art_nodes.iter().enumerate() {
        for &p in ps {
            node_arts[p as usize].push(a as u32);
        }
    }

    let rows: Vec<(Vec<u32>, Vec<u32>)> = (0..n)
        .into_par_iter()
        .map_init(
            || (vec![0u32; n], Vec::<u32>::new()),
            |(count, touched), i| {
                for &a in &node_arts[i] {
                    for &j in &art_nodes[a as usize] {
                        if j as usize == i {
                            continue;
                        }
                        if count[j as usize] == 0 {
                            touched.push(j);
                        }
                        count[j as usize] += 1;
                    }
                }
                touched.sort_unstable();
                let weights = touched
                    .iter()
                    .map(|&j| std::mem::take(&mut count[j as usize]))
                    .collect();
                (std::mem::take(touched), weights)
            },
        )
        .collect();

    let mut offsets = Vec::with_capacity(n + 1);
    offsets.push(0);
    let total: usize = rows.iter().map(|r| r.0.len()).sum();
    let mut neighbors = Vec::with_capacity(total);
    let mut weights = Vec::with_capacity(total);
    for (nb, w) in rows {
        neighbors.extend_from_slice(&nb);
        weights.extend_from_slice(&w);
        offsets.push(neighbors.len());
    }
    CoCommentGraph {
        nodes,
        offsets,
        neighbors,
        weights,
        mode,
    }
}
