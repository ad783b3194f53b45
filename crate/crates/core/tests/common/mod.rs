//! Brute-force reference implementations and small random corpora shared by
//! the integration tests and the acceptance run.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use chrono::{TimeZone, Utc};
use polarscope_core::corpus::{
    ArticleIx, ArticleRecord, CommentRecord, Corpus, MediumIx, MediumRecord, UserIx,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Uniformly random corpus. Timestamps come from a small range so ties in
/// creation time are common.
pub fn random_corpus(
    seed: u64,
    n_media: usize,
    n_articles: usize,
    n_users: usize,
    n_comments: usize,
) -> Corpus {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let t0 = Utc.with_ymd_and_hms(2022, 1, 1, 0, 0, 0).unwrap();
    let media: Vec<MediumRecord> = (0..n_media)
        .map(|m| MediumRecord {
            medium_id: format!("m{m:02}"),
            name: format!("M{m}"),
        })
        .collect();
    let articles: Vec<ArticleRecord> = (0..n_articles)
        .map(|a| ArticleRecord {
            article_id: format!("a{a:04}"),
            medium_id: format!("m{:02}", rng.random_range(0..n_media)),
            published_at: t0,
        })
        .collect();
    let comments: Vec<CommentRecord> = (0..n_comments)
        .map(|c| {
            let votes = rng.random_range(0..4u32);
            CommentRecord {
                comment_id: format!("c{c:06}"),
                article_id: format!("a{:04}", rng.random_range(0..n_articles)),
                user_id: format!("u{:03}", rng.random_range(0..n_users)),
                created_at: t0 + chrono::Duration::seconds(rng.random_range(0..50)),
                replies: rng.random_range(0..6),
                sympathies: if votes == 0 { 0 } else { rng.random_range(0..30) },
                antipathies: if votes == 0 { 0 } else { rng.random_range(0..30) },
            }
        })
        .collect();
    Corpus::from_records(media, articles, comments).unwrap()
}

pub fn all_users(c: &Corpus) -> Vec<UserIx> {
    (0..c.users().len() as u32).map(UserIx).collect()
}

pub fn all_media(c: &Corpus) -> Vec<MediumIx> {
    (0..c.media().len() as u32).map(MediumIx).collect()
}

/// Edge weights by intersecting every pair's article sets.
pub fn graph_by_intersection(c: &Corpus, users: &[UserIx]) -> BTreeMap<(UserIx, UserIx), u32> {
    let arts: BTreeMap<UserIx, BTreeSet<ArticleIx>> = users
        .iter()
        .map(|&u| {
            (
                u,
                c.comments()
                    .iter()
                    .filter(|x| x.user == u)
                    .map(|x| x.article)
                    .collect(),
            )
        })
        .collect();
    let mut out = BTreeMap::new();
    let us: Vec<UserIx> = arts.keys().copied().collect();
    for (i, &a) in us.iter().enumerate() {
        for &b in &us[i + 1..] {
            let w = arts[&a].intersection(&arts[&b]).count() as u32;
            if w > 0 {
                out.insert((a, b), w);
            }
        }
    }
    out
}

/// Sympathy matrix by looping over users, media, articles and comments.
pub fn sympathy_matrix_by_loops(
    c: &Corpus,
    users: &[UserIx],
    media: &[MediumIx],
    min_responses: u64,
) -> Vec<Option<f64>> {
    let mut out = Vec::new();
    for &u in users {
        for &m in media {
            let mut total = 0.0;
            let mut n_articles = 0usize;
            for (a, art) in c.articles().iter().enumerate() {
                if art.medium != m {
                    continue;
                }
                let mut sum = 0.0;
                let mut n = 0usize;
                for cm in c.comments() {
                    let votes = cm.sympathies as u64 + cm.antipathies as u64;
                    if cm.user == u && cm.article == ArticleIx(a as u32) && votes >= min_responses.max(1) {
                        sum += cm.sympathies as f64 / votes as f64;
                        n += 1;
                    }
                }
                if n > 0 {
                    total += sum / n as f64;
                    n_articles += 1;
                }
            }
            out.push((n_articles > 0).then(|| total / n_articles as f64));
        }
    }
    out
}

/// Textbook two-pass Pearson correlation.
pub fn textbook_pearson(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let n = xs.len() as f64;
    let mut mx = 0.0;
    let mut my = 0.0;
    for i in 0..xs.len() {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    let mut num = 0.0;
    let mut vx = 0.0;
    let mut vy = 0.0;
    for i in 0..xs.len() {
        num += (xs[i] - mx) * (ys[i] - my);
        vx += (xs[i] - mx) * (xs[i] - mx);
        vy += (ys[i] - my) * (ys[i] - my);
    }
    if xs.len() < 2 || vx == 0.0 || vy == 0.0 {
        return None;
    }
    Some((num / (vx * vy).sqrt()).clamp(-1.0, 1.0))
}

/// Pairwise-complete correlation matrix with zero fill, row-major.
pub fn correlation_by_pairs(
    values: &[Option<f64>],
    n_rows: usize,
    n_cols: usize,
    min_overlap: usize,
) -> Vec<f64> {
    let mut r = vec![0.0; n_cols * n_cols];
    for i in 0..n_cols {
        for j in 0..n_cols {
            if i == j {
                r[i * n_cols + j] = 1.0;
                continue;
            }
            let (mut xs, mut ys) = (Vec::new(), Vec::new());
            for row in 0..n_rows {
                if let (Some(x), Some(y)) = (values[row * n_cols + i], values[row * n_cols + j]) {
                    xs.push(x);
                    ys.push(y);
                }
            }
            if xs.len() >= min_overlap {
                r[i * n_cols + j] = textbook_pearson(&xs, &ys).unwrap_or(0.0);
            }
        }
    }
    r
}

/// Feature vector by fully sorting an article's comments.
pub fn features_by_full_sort(c: &Corpus, article: ArticleIx, k: usize) -> Vec<f64> {
    let mut cs: Vec<_> = c.comments().iter().filter(|x| x.article == article).collect();
    cs.sort_by(|a, b| {
        let ta = a.sympathies as u64 + a.antipathies as u64 + a.replies as u64;
        let tb = b.sympathies as u64 + b.antipathies as u64 + b.replies as u64;
        tb.cmp(&ta)
            .then(a.created_at.cmp(&b.created_at))
            .then(a.id.cmp(&b.id))
    });
    let mut out = vec![0.0; 3 * k];
    for (i, cm) in cs.iter().take(k).enumerate() {
        out[3 * i] = cm.sympathies as f64;
        out[3 * i + 1] = cm.antipathies as f64;
        out[3 * i + 2] = cm.replies as f64;
    }
    out
}

/// Exhaustive k-NN: (predicted label, share of label-1 votes).
pub fn knn_exhaustive(points: &[Vec<f64>], labels: &[u8], k: usize, x: &[f64]) -> (u8, f64) {
    let mut d: Vec<(f64, usize)> = points
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let mut s = 0.0;
            for (a, b) in p.iter().zip(x) {
                s += (a - b) * (a - b);
            }
            (s, i)
        })
        .collect();
    d.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
    let k = k.min(d.len());
    let ones = d[..k].iter().filter(|(_, i)| labels[*i] == 1).count();
    let p = ones as f64 / k as f64;
    (u8::from(p > 0.5), p)
}

/// Central differences of `f` at `params`.
pub fn central_difference(f: impl Fn(&[f64]) -> f64, params: &[f64], h: f64) -> Vec<f64> {
    let mut p = params.to_vec();
    (0..p.len())
        .map(|i| {
            let orig = p[i];
            p[i] = orig + h;
            let up = f(&p);
            p[i] = orig - h;
            let down = f(&p);
            p[i] = orig;
            (up - down) / (2.0 * h)
        })
        .collect()
}

/// Largest componentwise relative error, with a floor on the denominator so
/// that components that are both near zero compare absolutely.
pub fn max_relative_error(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs() / (x.abs() + y.abs()).max(1e-8))
        .fold(0.0, f64::max)
}

/// Adjusted Rand index by counting agreeing and disagreeing pairs directly.
pub fn ari_by_pairs<A: PartialEq, B: PartialEq>(a: &[A], b: &[B]) -> f64 {
    let n = a.len();
    let (mut both, mut only_a, mut only_b, mut total) = (0.0, 0.0, 0.0, 0.0);
    for i in 0..n {
        for j in i + 1..n {
            let sa = a[i] == a[j];
            let sb = b[i] == b[j];
            total += 1.0;
            match (sa, sb) {
                (true, true) => both += 1.0,
                (true, false) => only_a += 1.0,
                (false, true) => only_b += 1.0,
                _ => {}
            }
        }
    }
    let pairs_a = both + only_a;
    let pairs_b = both + only_b;
    let expected = pairs_a * pairs_b / total;
    let max = (pairs_a + pairs_b) / 2.0;
    if max == expected {
        return 1.0;
    }
    (both - expected) / (max - expected)
}

/// Average-linkage clustering by rescanning all cluster pairs each step
/// and averaging over original members. Returns merges as
/// (left id, right id, distance, size) with scipy-style cluster ids; the
/// left cluster is the one holding the smaller leaf.
pub fn naive_average_linkage(r: &[f64], n: usize) -> Vec<(usize, usize, f64, usize)> {
    // (id, members); label = min member
    let mut clusters: Vec<(usize, Vec<usize>)> = (0..n).map(|i| (i, vec![i])).collect();
    let mut merges = Vec::new();
    let mut last = f64::NEG_INFINITY;
    while clusters.len() > 1 {
        let mut best: Option<(f64, (usize, usize), usize, usize)> = None;
        for x in 0..clusters.len() {
            for y in x + 1..clusters.len() {
                let (a, b) = (&clusters[x].1, &clusters[y].1);
                let mut s = 0.0;
                for &i in a {
                    for &j in b {
                        s += 1.0 - r[i * n + j];
                    }
                }
                let d = s / (a.len() * b.len()) as f64;
                let la = *a.iter().min().unwrap();
                let lb = *b.iter().min().unwrap();
                let key = (la.min(lb), la.max(lb));
                let better = match best {
                    None => true,
                    Some((bd, bk, _, _)) => d < bd - 1e-12 || ((d - bd).abs() <= 1e-12 && key < bk),
                };
                if better {
                    best = Some((d, key, x, y));
                }
            }
        }
        let (d, _, x, y) = best.unwrap();
        let (cy, cx) = (clusters.remove(y), clusters.remove(x));
        let label = |c: &(usize, Vec<usize>)| *c.1.iter().min().unwrap();
        let (lo, hi) = if label(&cx) < label(&cy) {
            (cx.0, cy.0)
        } else {
            (cy.0, cx.0)
        };
        let d = d.max(last);
        last = d;
        let mut members = cx.1;
        members.extend(cy.1);
        merges.push((lo, hi, d, members.len()));
        clusters.push((n + merges.len() - 1, members));
    }
    merges
}

/// Top `ceil(fraction * |E|)` edges by fully sorting all edges.
pub fn top_edges_by_full_sort(
    edges: &BTreeMap<(UserIx, UserIx), u32>,
    fraction: f64,
) -> Vec<(UserIx, UserIx, u32)> {
    let mut all: Vec<(UserIx, UserIx, u32)> = edges.iter().map(|(&(a, b), &w)| (a, b, w)).collect();
    all.sort_by(|x, y| y.2.cmp(&x.2).then((x.0, x.1).cmp(&(y.0, y.1))));
    let k = (fraction * all.len() as f64).ceil() as usize;
    all.truncate(k);
    all
}
