//! The individual pipeline stages. Each one writes its tables under
//! `tables/` and can rebuild its inputs from earlier stages' tables.

use std::fs;
use std::path::{Path, PathBuf};

use super::config::{PipelineConfig, Source};
use super::table::{Cell, Table};
use crate::affect::{curve_shape_stats, reply_affect_relation, response_curve, ResponseKind};
use crate::binning::BinnedCurve;
use crate::classify::{build_features, cross_validate, make_folds, select_articles, N_FOLDS};
use crate::conet::{
    build_cocomment_graph_capped, export_top_edges, joint_density, leaning_assortativity,
    neighbor_mean_leaning, shuffled_assortativity, GraphMode, JointDensity,
};
use crate::corpus::{corpus_stats, filter_active_users, filter_clustering_users, top_media};
use crate::corpus::{load_corpus, write_corpus, Corpus, CorpusPaths, UserIx};
use crate::leaning::{
    activity_by_leaning, compute_leanings, leaning_distribution, population_summary, LeaningIndex,
    UserLeaning,
};
use crate::mediaclust::{
    build_sympathy_matrix, extract_polar_groups, hierarchical_cluster, media_correlation, GroupSign,
    MediaGrouping, Orientation,
};
use crate::synth::{evaluate_recovery, generate, GroundTruth};
use crate::{Error, Result};

pub fn tables_dir(out: &Path) -> PathBuf {
    out.join("tables")
}

pub fn corpus_dir(out: &Path) -> PathBuf {
    out.join("corpus")
}

pub fn models_dir(out: &Path) -> PathBuf {
    out.join("models")
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn write(out: &Path, table: &Table) -> Result<()> {
    let dir = tables_dir(out);
    ensure_dir(&dir)?;
    table.write(&dir)
}

fn read(out: &Path, name: &str) -> Result<Table> {
    Table::read(&tables_dir(out), name)
}

/// Generates or loads the corpus. A generated corpus and its ground truth
/// are written under `corpus/`.
pub fn stage_corpus(config: &PipelineConfig, out: &Path) -> Result<(Corpus, Option<GroundTruth>)> {
    let (corpus, truth) = match config.source()? {
        Source::Files(paths) => (load_corpus(&paths)?, None),
        Source::Synth(s) => {
            let (corpus, truth) = generate(&s)?;
            let dir = corpus_dir(out);
            ensure_dir(&dir)?;
            write_corpus(&corpus, &CorpusPaths::in_dir(&dir))?;
            truth.write(&dir)?;
            (corpus, Some(truth))
        }
    };
    let st = corpus_stats(&corpus)?;
    let mut t = Table::new(
        "corpus_stats",
        &[
            "n_media:int",
            "n_articles:int",
            "n_comments:int",
            "n_users:int",
            "mean_sympathies:float",
            "mean_antipathies:float",
            "sympathy_antipathy_ratio:float?",
        ],
    );
    t.push(vec![
        st.n_media.into(),
        st.n_articles.into(),
        st.n_comments.into(),
        st.n_users.into(),
        st.mean_sympathies_per_comment.into(),
        st.mean_antipathies_per_comment.into(),
        st.sympathy_antipathy_ratio.into(),
    ]);
    write(out, &t)?;
    Ok((corpus, truth))
}

/// The corpus for a single later stage: the configured files, or the
/// generated corpus already in `corpus/`, generating it if absent.
pub fn load_stage_corpus(config: &PipelineConfig, out: &Path) -> Result<(Corpus, Option<GroundTruth>)> {
    match config.source()? {
        Source::Files(paths) => Ok((load_corpus(&paths)?, None)),
        Source::Synth(_) => {
            let dir = corpus_dir(out);
            if dir.join("comments.jsonl").exists() {
                Ok((
                    load_corpus(&CorpusPaths::in_dir(&dir))?,
                    Some(GroundTruth::read(&dir)?),
                ))
            } else {
                stage_corpus(config, out)
            }
        }
    }
}

fn orientation(config: &PipelineConfig, corpus: &Corpus, truth: Option<&GroundTruth>) -> Result<Orientation> {
    let anchor = match (&config.mediaclust.anchor, truth) {
        (Some(id), _) => Some(id.as_str()),
        // planted data: orient so that group A is the planted +1 group
        (None, Some(t)) => t.media_in_group(1).first().copied(),
        (None, None) => None,
    };
    match anchor {
        None => Ok(Orientation::SmallestMember),
        Some(id) => corpus
            .medium_ix(id)
            .map(Orientation::Anchor)
            .ok_or_else(|| Error::InvalidConfig(format!("anchor medium {id:?} is not in the corpus"))),
    }
}

/// Sympathy matrix, media correlation and dendrogram tables, then the
/// polar grouping. The grouping table is only written on success.
pub fn stage_mediaclust(
    config: &PipelineConfig,
    out: &Path,
    corpus: &Corpus,
    truth: Option<&GroundTruth>,
) -> Result<MediaGrouping> {
    let p = &config.corpus;
    let k = p.top_media.min(corpus.media().len());
    let media = top_media(corpus, k)?;
    let users = filter_clustering_users(corpus, &media, p.cluster_min_comments, p.min_responses)?;
    let matrix = build_sympathy_matrix(corpus, &users, &media, p.min_responses);

    let mut t = Table::new("sympathy_matrix", &["user_id", "medium_id", "rho:float"]);
    for (i, &u) in matrix.users().iter().enumerate() {
        for (j, &m) in matrix.media().iter().enumerate() {
            if let Some(v) = matrix.get(i, j) {
                t.push(vec![
                    corpus.user_id(u).into(),
                    corpus.medium(m).id.as_str().into(),
                    v.into(),
                ]);
            }
        }
    }
    write(out, &t)?;

    let corr = media_correlation(&matrix, config.mediaclust.min_overlap);
    let ids: Vec<&str> = corr
        .media()
        .iter()
        .map(|&m| corpus.medium(m).id.as_str())
        .collect();
    let mut t = Table::new(
        "media_correlation",
        &["medium_a", "medium_b", "r:float", "support:int"],
    );
    for i in 0..corr.len() {
        for j in 0..corr.len() {
            t.push(vec![
                ids[i].into(),
                ids[j].into(),
                corr.r(i, j).into(),
                corr.support(i, j).into(),
            ]);
        }
    }
    write(out, &t)?;

    let dendro = hierarchical_cluster(&corr);
    let mut t = Table::new(
        "dendrogram",
        &["step:int", "left:int", "right:int", "distance:float", "size:int"],
    );
    for (s, m) in dendro.merges().iter().enumerate() {
        t.push(vec![
            s.into(),
            m.left.into(),
            m.right.into(),
            m.distance.into(),
            m.size.into(),
        ]);
    }
    write(out, &t)?;
    let mut t = Table::new("media_order", &["position:int", "medium_id"]);
    for (pos, leaf) in dendro.leaf_order().into_iter().enumerate() {
        t.push(vec![pos.into(), ids[leaf].into()]);
    }
    write(out, &t)?;

    let grouping = extract_polar_groups(
        &dendro,
        &corr,
        config.mediaclust.min_size,
        orientation(config, corpus, truth)?,
    )?;
    let mut t = Table::new("media_groups", &["medium_id", "group", "leaning:int?"]);
    for &m in corr.media() {
        let (group, leaning) = match grouping.sign_of(m) {
            Some(s) => (s.label(), Some(s.value() as i64)),
            None => ("unassigned", None),
        };
        t.push(vec![
            corpus.medium(m).id.as_str().into(),
            group.into(),
            leaning.into(),
        ]);
    }
    write(out, &t)?;
    Ok(grouping)
}

pub fn load_grouping(out: &Path, corpus: &Corpus) -> Result<MediaGrouping> {
    let t = read(out, "media_groups")?;
    let (mut a, mut b, mut rest) = (Vec::new(), Vec::new(), Vec::new());
    for (id, group) in t.strings("medium_id")?.into_iter().zip(t.strings("group")?) {
        let m = corpus.medium_ix(id).ok_or_else(|| Error::DanglingReference {
            kind: "medium",
            id: id.to_owned(),
            referrer: "media_groups table".into(),
        })?;
        match group {
            "A" => a.push(m),
            "B" => b.push(m),
            _ => rest.push(m),
        }
    }
    Ok(MediaGrouping::new(a, b, rest))
}

fn curve_table(name: &str, curve: &BinnedCurve) -> Table {
    let mut t = Table::new(
        name,
        &["bin_low:float", "bin_high:float", "value:float?", "count:int"],
    );
    for i in 0..curve.n_bins() {
        t.push(vec![
            curve.bin_edges[i].into(),
            curve.bin_edges[i + 1].into(),
            curve.values[i].into(),
            curve.counts[i].into(),
        ]);
    }
    t
}

/// Leanings of active users, their distribution and activity curves, the
/// population split and, for planted corpora, the recovery report.
pub fn stage_leaning(
    config: &PipelineConfig,
    out: &Path,
    corpus: &Corpus,
    grouping: &MediaGrouping,
    truth: Option<&GroundTruth>,
) -> Result<Vec<UserLeaning>> {
    let users = filter_active_users(corpus, &grouping.group_media(), config.corpus.active_min_comments)?;
    let leanings = compute_leanings(corpus, &users, grouping);

    let mut t = Table::new(
        "leanings",
        &["user_id", "x:float", "n:int", "n_positive:int", "n_negative:int"],
    );
    for l in &leanings {
        t.push(vec![
            corpus.user_id(l.user).into(),
            l.x.into(),
            l.n.into(),
            l.n_positive.into(),
            l.n_negative.into(),
        ]);
    }
    write(out, &t)?;

    let n_bins = config.leaning.n_bins;
    write(
        out,
        &curve_table("leaning_distribution", &leaning_distribution(&leanings, n_bins)?),
    )?;
    write(
        out,
        &curve_table("activity", &activity_by_leaning(&leanings, n_bins)?),
    )?;

    let s = population_summary(&leanings)?;
    let mut t = Table::new(
        "population",
        &[
            "n_users:int",
            "share_positive:float",
            "share_negative:float",
            "share_zero:float",
            "comments_positive:int",
            "comments_negative:int",
            "comments_zero:int",
        ],
    );
    t.push(vec![
        s.n_users.into(),
        s.share_positive.into(),
        s.share_negative.into(),
        s.share_zero.into(),
        s.comments_positive.into(),
        s.comments_negative.into(),
        s.comments_zero.into(),
    ]);
    write(out, &t)?;

    if let Some(truth) = truth {
        let r = evaluate_recovery(truth, corpus, grouping, &leanings)?;
        let mut t = Table::new(
            "recovery",
            &[
                "group_exact_match:int",
                "group_ari:float",
                "leaning_sign_accuracy:float",
                "leaning_pearson:float?",
            ],
        );
        t.push(vec![
            (r.group_exact_match as u8).into(),
            r.group_ari.into(),
            r.leaning_sign_accuracy.into(),
            r.leaning_pearson.into(),
        ]);
        write(out, &t)?;
    }
    Ok(leanings)
}

pub fn load_leanings(out: &Path, corpus: &Corpus) -> Result<Vec<UserLeaning>> {
    let t = read(out, "leanings")?;
    let ids = t.strings("user_id")?;
    let xs = t.floats("x")?;
    let ns = t.ints("n")?;
    let ps = t.ints("n_positive")?;
    let qs = t.ints("n_negative")?;
    let mut out = Vec::with_capacity(ids.len());
    for k in 0..ids.len() {
        let user = corpus.user_ix(ids[k]).ok_or_else(|| Error::DanglingReference {
            kind: "user",
            id: ids[k].to_owned(),
            referrer: "leanings table".into(),
        })?;
        let (Some(x), Some(n), Some(np), Some(nn)) = (xs[k], ns[k], ps[k], qs[k]) else {
            return Err(Error::MissingTable("leanings has empty cells".into()));
        };
        out.push(UserLeaning {
            user,
            x,
            n: n as u64,
            n_positive: np as u64,
            n_negative: nn as u64,
        });
    }
    out.sort_by_key(|l| l.user);
    Ok(out)
}

fn density_table(name: &str, d: &JointDensity) -> Table {
    let mut t = Table::new(
        name,
        &[
            "ix:int",
            "iy:int",
            "x_center:float",
            "xnn_center:float",
            "mass:float",
            "count:int",
        ],
    );
    let b = d.bins();
    for ix in 0..d.n_bins {
        for iy in 0..d.n_bins {
            t.push(vec![
                ix.into(),
                iy.into(),
                b.center(ix).into(),
                b.center(iy).into(),
                d.at(ix, iy).into(),
                d.counts[ix * d.n_bins + iy].into(),
            ]);
        }
    }
    t
}

/// Co-commenting graph over users with a leaning, in both modes.
pub fn stage_conet(
    config: &PipelineConfig,
    out: &Path,
    corpus: &Corpus,
    leanings: &[UserLeaning],
) -> Result<()> {
    let p = &config.conet;
    let index = LeaningIndex::new(corpus.users().len(), leanings);
    let users: Vec<UserIx> = leanings.iter().map(|l| l.user).collect();
    let mut graph = build_cocomment_graph_capped(corpus, &users, GraphMode::Weighted, p.max_commenters);

    let xnn_w = neighbor_mean_leaning(&graph, &index)?;
    let xnn_u = neighbor_mean_leaning(&graph.clone().with_mode(GraphMode::Unweighted), &index)?;

    let mut t = Table::new(
        "assortativity",
        &[
            "mode",
            "pearson:float",
            "n_nodes_used:int",
            "null_mean:float?",
            "null_max_abs:float?",
        ],
    );
    for xnn in [&xnn_w, &xnn_u] {
        let a = leaning_assortativity(&index, xnn)?;
        graph.set_mode(xnn.mode);
        let null = (p.n_shuffles > 0)
            .then(|| shuffled_assortativity(&graph, &index, p.n_shuffles, config.seed))
            .transpose()?;
        let mean = null.as_ref().map(|v| v.iter().sum::<f64>() / v.len() as f64);
        let max_abs = null
            .as_ref()
            .map(|v| v.iter().fold(0.0f64, |m, x| m.max(x.abs())));
        t.push(vec![
            xnn.mode.name().into(),
            a.pearson.into(),
            a.n_nodes_used.into(),
            mean.into(),
            max_abs.into(),
        ]);
    }
    graph.set_mode(GraphMode::Weighted);
    write(out, &t)?;

    let n_bins = p.joint_bins;
    write(
        out,
        &density_table("joint_density_weighted", &joint_density(&index, &xnn_w, n_bins)?),
    )?;
    write(
        out,
        &density_table(
            "joint_density_unweighted",
            &joint_density(&index, &xnn_u, n_bins)?,
        ),
    )?;

    let mut t = Table::new(
        "conet_nodes",
        &[
            "user_id",
            "x:float",
            "xnn_weighted:float?",
            "xnn_unweighted:float?",
            "degree:int",
            "strength:int",
        ],
    );
    for (i, &u) in graph.nodes().iter().enumerate() {
        t.push(vec![
            corpus.user_id(u).into(),
            index.get(u).into(),
            xnn_w.get(u).into(),
            xnn_u.get(u).into(),
            graph.degree(i).into(),
            graph.strength(i).into(),
        ]);
    }
    write(out, &t)?;

    let mut t = Table::new(
        "conet_summary",
        &["n_nodes:int", "n_edges:int", "total_weight:int"],
    );
    t.push(vec![
        graph.n_nodes().into(),
        graph.n_edges().into(),
        graph.total_weight().into(),
    ]);
    write(out, &t)?;

    let mut t = Table::new("top_edges", &["user_a", "user_b", "weight:int"]);
    for e in export_top_edges(&graph, p.top_fraction) {
        t.push(vec![
            corpus.user_id(e.a).into(),
            corpus.user_id(e.b).into(),
            e.weight.into(),
        ]);
    }
    write(out, &t)
}

/// Response curves per group and kind, their shape statistics, and the
/// reply-affect relation.
pub fn stage_affect(
    config: &PipelineConfig,
    out: &Path,
    corpus: &Corpus,
    grouping: &MediaGrouping,
    leanings: &[UserLeaning],
) -> Result<()> {
    let p = &config.affect;
    let index = LeaningIndex::new(corpus.users().len(), leanings);
    let mut curves = Table::new(
        "response_curves",
        &[
            "group",
            "kind",
            "bin_low:float",
            "bin_high:float",
            "value:float?",
            "count:int",
        ],
    );
    let mut shapes = Table::new(
        "curve_shape",
        &["group", "kind", "spearman:float?", "peak_center:float?"],
    );
    let mut replies = Table::new(
        "reply_affect",
        &[
            "group",
            "replies_lo:int",
            "replies_hi:int?",
            "count:int",
            "mean_sympathies:float?",
            "mean_antipathies:float?",
        ],
    );
    for sign in [GroupSign::Positive, GroupSign::Negative] {
        for kind in ResponseKind::ALL {
            let rc = response_curve(corpus, &index, grouping, sign, kind, p.n_bins)?;
            let c = &rc.curve;
            for i in 0..c.n_bins() {
                curves.push(vec![
                    sign.label().into(),
                    kind.name().into(),
                    c.bin_edges[i].into(),
                    c.bin_edges[i + 1].into(),
                    c.values[i].into(),
                    c.counts[i].into(),
                ]);
            }
            let stats = match curve_shape_stats(c) {
                Ok(s) => Some(s),
                Err(Error::TooFewBins { .. }) => None,
                Err(e) => return Err(e),
            };
            shapes.push(vec![
                sign.label().into(),
                kind.name().into(),
                stats.map(|s| s.spearman).into(),
                stats.map(|s| s.peak_center).into(),
            ]);
        }
        let rel = reply_affect_relation(corpus, grouping, sign, p.max_bucket)?;
        for b in &rel.buckets {
            replies.push(vec![
                sign.label().into(),
                b.lo.into(),
                b.hi.into(),
                b.count.into(),
                b.mean_sympathies.into(),
                b.mean_antipathies.into(),
            ]);
        }
    }
    write(out, &curves)?;
    write(out, &shapes)?;
    write(out, &replies)
}

/// Cross-validated classifier comparison. Returns a note instead of running
/// when there are too few qualifying articles for the fold plan.
pub fn stage_classify(
    config: &PipelineConfig,
    out: &Path,
    corpus: &Corpus,
    grouping: &MediaGrouping,
) -> Result<Option<String>> {
    let cfg = config.classify_seeded();
    let articles = select_articles(corpus, grouping, cfg.min_comments);
    if articles.len() < 2 * N_FOLDS {
        return Ok(Some(format!(
            "{} articles with more than {} comments; need {}",
            articles.len(),
            cfg.min_comments,
            2 * N_FOLDS
        )));
    }
    let features = build_features(corpus, grouping, &articles, cfg.top_k)?;
    let id = |a: crate::corpus::ArticleIx| corpus.article(a).id.as_str();

    let dim = 3 * cfg.top_k;
    let names: Vec<String> = ["article_id".to_owned(), "label:int".to_owned()]
        .into_iter()
        .chain((0..dim).map(|i| format!("f{i:03}:float")))
        .collect();
    let cols: Vec<&str> = names.iter().map(String::as_str).collect();
    let mut t = Table::new("features", &cols);
    for f in &features {
        let mut row: Vec<Cell> = vec![id(f.article).into(), f.label.into()];
        row.extend(f.values.iter().map(|&v| Cell::from(v)));
        t.push(row);
    }
    write(out, &t)?;

    let plan = make_folds(&articles, cfg.fold_seed)?;
    let mut t = Table::new("folds", &["fold:int", "role", "article_id"]);
    for (k, fold) in plan.folds.iter().enumerate() {
        for (role, ids) in [
            ("train", &fold.train),
            ("validation", &fold.validation),
            ("test", &fold.test),
        ] {
            for &a in ids.iter() {
                t.push(vec![k.into(), role.into(), id(a).into()]);
            }
        }
    }
    write(out, &t)?;

    let (report, models) = cross_validate(&features, &plan, &cfg)?;
    let mut acc = Table::new(
        "fold_accuracy",
        &[
            "fold:int",
            "model",
            "accuracy:float",
            "tp:int",
            "fp:int",
            "tn:int",
            "fn:int",
        ],
    );
    let mut preds = Table::new(
        "predictions",
        &[
            "fold:int",
            "model",
            "article_id",
            "label:int",
            "probability:float",
            "predicted:int",
        ],
    );
    for o in &report.outcomes {
        let e = &o.evaluation;
        acc.push(vec![
            o.fold.into(),
            o.model.name().into(),
            e.accuracy.into(),
            e.true_positive.into(),
            e.false_positive.into(),
            e.true_negative.into(),
            e.false_negative.into(),
        ]);
        for p in &e.predictions {
            preds.push(vec![
                o.fold.into(),
                o.model.name().into(),
                id(p.article).into(),
                p.label.into(),
                p.probability.into(),
                p.predicted.into(),
            ]);
        }
    }
    write(out, &acc)?;
    write(out, &preds)?;

    let mut t = Table::new(
        "model_comparison",
        &[
            "model",
            "mean_accuracy:float",
            "min_accuracy:float",
            "max_accuracy:float",
        ],
    );
    for r in &report.comparison {
        t.push(vec![
            r.model.name().into(),
            r.mean_accuracy.into(),
            r.min_accuracy.into(),
            r.max_accuracy.into(),
        ]);
    }
    write(out, &t)?;

    let dir = models_dir(out);
    ensure_dir(&dir)?;
    for (k, fold_models) in models.iter().enumerate() {
        for m in fold_models {
            let path = dir.join(format!("fold{k}-{}.bin", m.kind().name()));
            fs::write(&path, m.to_bytes()).map_err(|e| Error::io(&path, e))?;
        }
    }
    Ok(None)
}
