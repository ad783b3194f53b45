mod common;

use std::collections::BTreeSet;

use polarscope_core::classify::{article_features, Knn};
use polarscope_core::conet::{
    build_cocomment_graph, export_top_edges, joint_density, neighbor_mean_leaning, GraphMode,
};
use polarscope_core::corpus::{
    filter_active_users, filter_clustering_users, ArticleIx, Corpus, MediumIx, UserIx,
};
use polarscope_core::leaning::{activity_by_leaning, compute_leanings, leaning_distribution, LeaningIndex};
use polarscope_core::mediaclust::{
    build_sympathy_matrix, hierarchical_cluster, media_correlation, MediaCorrelation, MediaGrouping,
};
use polarscope_core::stats::adjusted_rand_index;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn corpus_strategy() -> impl Strategy<Value = Corpus> {
    (any::<u64>(), 2usize..=8, 5usize..=40, 3usize..=50, 0usize..=400)
        .prop_map(|(seed, m, a, u, c)| common::random_corpus(seed, m, a, u, c.max(1)))
}

/// First half of the media in group A, the rest in group B.
fn halves(c: &Corpus) -> MediaGrouping {
    let media = common::all_media(c);
    let (a, b) = media.split_at(media.len() / 2);
    MediaGrouping::new(a.to_vec(), b.to_vec(), vec![])
}

fn symmetric_correlation(seed: u64, n: usize) -> MediaCorrelation {
    use rand::Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut r = vec![1.0; n * n];
    for i in 0..n {
        for j in i + 1..n {
            // quantized so that distance ties occur
            let v = f64::from(rng.random_range(-4..=4i32)) / 4.0;
            r[i * n + j] = v;
            r[j * n + i] = v;
        }
    }
    let media = (0..n as u32).map(MediumIx).collect();
    MediaCorrelation::from_parts(media, r, vec![0; n * n])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn graph_matches_pairwise_intersection(c in corpus_strategy()) {
        let users = common::all_users(&c);
        let g = build_cocomment_graph(&c, &users, GraphMode::Weighted);
        let got: std::collections::BTreeMap<_, _> = g
            .edges()
            .map(|(i, j, w)| {
                let (a, b) = (g.nodes()[i], g.nodes()[j]);
                ((a.min(b), a.max(b)), w)
            })
            .collect();
        prop_assert_eq!(got, common::graph_by_intersection(&c, &users));
    }

    #[test]
    fn top_edges_match_full_sort(c in corpus_strategy(), fraction in 0.0f64..=1.0) {
        let users = common::all_users(&c);
        let g = build_cocomment_graph(&c, &users, GraphMode::Unweighted);
        let got: Vec<_> = export_top_edges(&g, fraction).into_iter().map(|e| (e.a, e.b, e.weight)).collect();
        let expected = common::top_edges_by_full_sort(&common::graph_by_intersection(&c, &users), fraction);
        prop_assert_eq!(got, expected);
    }

    #[test]
    fn graph_is_symmetric_and_obeys_handshake(c in corpus_strategy()) {
        let users = common::all_users(&c);
        let g = build_cocomment_graph(&c, &users, GraphMode::Weighted);
        for i in 0..g.n_nodes() {
            for (j, w) in g.neighbors(i) {
                prop_assert_ne!(i, j);
                prop_assert_eq!(g.weight(j, i), w);
            }
        }
        let handshake: u64 = (0..c.articles().len() as u32)
            .map(|a| {
                let k = c.comments_on(ArticleIx(a)).map(|x| x.user).collect::<BTreeSet<_>>().len() as u64;
                k * k.saturating_sub(1) / 2
            })
            .sum();
        prop_assert_eq!(g.total_weight(), handshake);
    }

    #[test]
    fn sympathy_matrix_matches_loops(c in corpus_strategy(), min_responses in 0u64..20) {
        let users = common::all_users(&c);
        let media = common::all_media(&c);
        let m = build_sympathy_matrix(&c, &users, &media, min_responses);
        let expected = common::sympathy_matrix_by_loops(&c, &users, &media, min_responses);
        for (k, e) in expected.iter().enumerate() {
            let v = m.get(k / media.len(), k % media.len());
            prop_assert_eq!(v, *e);
            if let Some(v) = v {
                prop_assert!((0.0..=1.0).contains(&v));
            }
        }
    }

    #[test]
    fn correlation_matches_pairs_and_is_symmetric(c in corpus_strategy(), min_overlap in 2usize..8) {
        let users = common::all_users(&c);
        let media = common::all_media(&c);
        let m = build_sympathy_matrix(&c, &users, &media, 1);
        let values: Vec<Option<f64>> = (0..users.len() * media.len())
            .map(|k| m.get(k / media.len(), k % media.len()))
            .collect();
        let corr = media_correlation(&m, min_overlap);
        let expected = common::correlation_by_pairs(&values, users.len(), media.len(), min_overlap);
        prop_assert!(corr.is_symmetric());
        for i in 0..media.len() {
            prop_assert_eq!(corr.r(i, i), 1.0);
            for j in 0..media.len() {
                prop_assert_eq!(corr.r(i, j), expected[i * media.len() + j]);
            }
        }
    }

    #[test]
    fn dendrogram_matches_naive_linkage(seed in any::<u64>(), n in 2usize..12) {
        let corr = symmetric_correlation(seed, n);
        let r: Vec<f64> = (0..n * n).map(|k| corr.r(k / n, k % n)).collect();
        let expected = common::naive_average_linkage(&r, n);
        let d = hierarchical_cluster(&corr);
        prop_assert_eq!(d.merges().len(), n - 1);
        for (m, e) in d.merges().iter().zip(&expected) {
            prop_assert_eq!((m.left, m.right, m.size), (e.0, e.1, e.3));
            prop_assert!((m.distance - e.2).abs() < 1e-12);
        }
        let mut order = d.leaf_order();
        order.sort_unstable();
        prop_assert_eq!(order, (0..n).collect::<Vec<_>>());
    }

    #[test]
    fn top_k_features_match_full_sort(c in corpus_strategy(), k in 1usize..12) {
        let g = MediaGrouping::new(common::all_media(&c), vec![], vec![]);
        for a in 0..c.articles().len() as u32 {
            let f = article_features(ArticleIx(a), &c, &g, k).unwrap();
            prop_assert_eq!(f.values.len(), 3 * k);
            prop_assert_eq!(f.values, common::features_by_full_sort(&c, ArticleIx(a), k));
        }
    }

    #[test]
    fn knn_matches_exhaustive_search(
        seed in any::<u64>(),
        n in 1usize..200,
        k in 1usize..20,
        dim in 1usize..5,
    ) {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut draw = || (0..dim).map(|_| f64::from(rng.random_range(0..4i32))).collect::<Vec<f64>>();
        let points: Vec<Vec<f64>> = (0..n).map(|_| draw()).collect();
        let queries: Vec<Vec<f64>> = (0..10).map(|_| draw()).collect();
        let labels: Vec<u8> = (0..n).map(|i| (seed >> (i % 64)) as u8 & 1).collect();
        let knn = Knn { k, points: points.clone(), labels: labels.clone() };
        for x in &queries {
            let (label, p) = common::knn_exhaustive(&points, &labels, k, x);
            prop_assert_eq!(knn.predict(x), label);
            prop_assert_eq!(knn.predict_proba(x), p);
        }
    }

    #[test]
    fn leaning_is_signed_share_and_flips_with_groups(c in corpus_strategy()) {
        let g = halves(&c);
        let users = common::all_users(&c);
        let l = compute_leanings(&c, &users, &g);
        let flipped = compute_leanings(&c, &users, &g.flipped());
        prop_assert_eq!(l.len(), flipped.len());
        for (a, b) in l.iter().zip(&flipped) {
            prop_assert_eq!(a.n, a.n_positive + a.n_negative);
            let x = (a.n_positive as f64 - a.n_negative as f64) / a.n as f64;
            prop_assert_eq!(a.x, x);
            prop_assert!((-1.0..=1.0).contains(&a.x));
            prop_assert_eq!(a.user, b.user);
            prop_assert_eq!(b.x, -a.x);
        }
    }

    #[test]
    fn histograms_normalize(c in corpus_strategy(), n_bins in 1usize..60) {
        let g = halves(&c);
        let l = compute_leanings(&c, &common::all_users(&c), &g);
        prop_assume!(!l.is_empty());
        let h = leaning_distribution(&l, n_bins).unwrap();
        let total: f64 = h.values.iter().flatten().sum();
        prop_assert!((total - 1.0).abs() <= 1e-12);
        let act = activity_by_leaning(&l, n_bins).unwrap();
        prop_assert_eq!(act.total_count(), l.len() as u64);

        let index = LeaningIndex::new(c.users().len(), &l);
        let users: Vec<UserIx> = l.iter().map(|u| u.user).collect();
        let graph = build_cocomment_graph(&c, &users, GraphMode::Weighted);
        let xnn = neighbor_mean_leaning(&graph, &index).unwrap();
        if !xnn.values.is_empty() {
            let jd = joint_density(&index, &xnn, n_bins).unwrap();
            prop_assert!((jd.mass.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn neighbor_mean_is_a_convex_combination(c in corpus_strategy()) {
        let g = halves(&c);
        let l = compute_leanings(&c, &common::all_users(&c), &g);
        let index = LeaningIndex::new(c.users().len(), &l);
        let users: Vec<UserIx> = l.iter().map(|u| u.user).collect();
        for mode in [GraphMode::Weighted, GraphMode::Unweighted] {
            let graph = build_cocomment_graph(&c, &users, mode);
            let xnn = neighbor_mean_leaning(&graph, &index).unwrap();
            for i in 0..graph.n_nodes() {
                let xs: Vec<f64> = graph.neighbors(i).map(|(j, _)| index.get(graph.nodes()[j]).unwrap()).collect();
                let v = xnn.get(graph.nodes()[i]);
                if xs.is_empty() {
                    prop_assert!(v.is_none());
                    continue;
                }
                let v = v.unwrap();
                let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
                let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                prop_assert!(v >= lo - 1e-12 && v <= hi + 1e-12);
            }
        }
    }

    #[test]
    fn user_filters_are_monotone(c in corpus_strategy(), lo in 0usize..10, extra in 0usize..10, r in 0u64..20) {
        let media = common::all_media(&c);
        let loose: BTreeSet<_> = filter_active_users(&c, &media, lo).unwrap().into_iter().collect();
        let strict: BTreeSet<_> = filter_active_users(&c, &media, lo + extra).unwrap().into_iter().collect();
        prop_assert!(strict.is_subset(&loose));
        let a: BTreeSet<_> = filter_clustering_users(&c, &media, lo, r).unwrap().into_iter().collect();
        let b: BTreeSet<_> = filter_clustering_users(&c, &media, lo, r + extra as u64).unwrap().into_iter().collect();
        prop_assert!(b.is_subset(&a));
        prop_assert!(a.is_subset(&loose));
    }

    #[test]
    fn corpus_is_independent_of_record_order(c in corpus_strategy(), seed in any::<u64>()) {
        let (mut m, mut a, mut cm) = c.to_records();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        m.shuffle(&mut rng);
        a.shuffle(&mut rng);
        cm.shuffle(&mut rng);
        prop_assert_eq!(Corpus::from_records(m, a, cm).unwrap(), c);
    }

    #[test]
    fn ari_matches_pair_counting(seed in any::<u64>(), n in 2usize..40, ka in 1u8..5, kb in 1u8..5) {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a: Vec<u8> = (0..n).map(|_| rng.random_range(0..ka)).collect();
        let b: Vec<u8> = (0..n).map(|_| rng.random_range(0..kb)).collect();
        let got = adjusted_rand_index(&a, &b);
        prop_assert!((got - common::ari_by_pairs(&a, &b)).abs() < 1e-12);
    }
}

#[test]
fn corpus_stats_match_single_pass_over_raw_records() {
    use polarscope_core::corpus::corpus_stats;
    use polarscope_core::synth::{generate, SynthConfig};
    let cfg = SynthConfig {
        n_users: 300,
        articles_per_medium: 10,
        ..SynthConfig::default()
    };
    let (corpus, _) = generate(&cfg).unwrap();
    let (_, _, records) = corpus.to_records();
    let (mut s, mut a) = (0u64, 0u64);
    let mut users = BTreeSet::new();
    for r in &records {
        s += u64::from(r.sympathies);
        a += u64::from(r.antipathies);
        users.insert(r.user_id.as_str());
    }
    let n = records.len() as f64;
    let stats = corpus_stats(&corpus).unwrap();
    assert_eq!(stats.n_comments, records.len());
    assert_eq!(stats.n_users, users.len());
    assert!((stats.mean_sympathies_per_comment - s as f64 / n).abs() < 1e-12);
    assert!((stats.mean_antipathies_per_comment - a as f64 / n).abs() < 1e-12);
    let ratio = stats.sympathy_antipathy_ratio.unwrap();
    assert!((ratio - s as f64 / a as f64).abs() < 1e-12);
}
