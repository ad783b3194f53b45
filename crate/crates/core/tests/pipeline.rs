use std::fs;
use std::path::Path;

use polarscope_core::corpus::{load_corpus, CorpusPaths};
use polarscope_core::report::{
    render_figures, run_pipeline, run_stage, sha256_file, InputPaths, Manifest, Outcome, PipelineConfig,
    Stage, Table,
};
use polarscope_core::synth::{Preset, SynthConfig};
use polarscope_core::{Error, ErrorClass};

fn small_config(out: &Path, workers: usize) -> PipelineConfig {
    let mut c = PipelineConfig {
        seed: 11,
        workers,
        output_dir: out.to_owned(),
        synth: Some(SynthConfig {
            n_media_group_a: 3,
            n_media_group_b: 4,
            n_media_neutral: 5,
            n_users: 1500,
            articles_per_medium: 30,
            comments_max: 400,
            ..SynthConfig::default()
        }),
        ..PipelineConfig::default()
    };
    c.corpus.active_min_comments = 30;
    c.classify.min_comments = 60;
    c.classify.top_k = 10;
    c.classify.mlp.max_epochs = 15;
    c.classify.mlp.hidden = [8, 4];
    c.classify.logistic.epochs = 50;
    c.conet.n_shuffles = 2;
    c
}

fn file_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    for sub in ["tables", "figures", "models", "corpus"] {
        let d = dir.join(sub);
        let Ok(entries) = fs::read_dir(&d) else { continue };
        let mut names: Vec<_> = entries.map(|e| e.unwrap().path()).collect();
        names.sort();
        for p in names {
            out.push((
                format!("{sub}/{}", p.file_name().unwrap().to_string_lossy()),
                fs::read(&p).unwrap(),
            ));
        }
    }
    out
}

#[test]
fn full_run_completes_and_lists_every_artifact() {
    let dir = tempfile::tempdir().unwrap();
    let bundle = run_pipeline(&small_config(dir.path(), 2)).unwrap();
    assert!(bundle.halted().is_none());
    for stage in Stage::ALL {
        let r = bundle
            .manifest
            .stage(stage)
            .unwrap_or_else(|| panic!("{stage:?} missing"));
        assert_eq!(r.outcome, Outcome::Completed, "{stage:?}: {:?}", r.note);
    }
    let on_disk = file_bytes(dir.path());
    assert_eq!(on_disk.len(), bundle.manifest.artifacts.len());
    for a in &bundle.manifest.artifacts {
        assert_eq!(sha256_file(&dir.path().join(&a.path)).unwrap().0, a.sha256);
    }
    assert!(bundle.figures.iter().all(|f| f.skipped.is_none()));
    assert_eq!(Manifest::read(dir.path()).unwrap(), bundle.manifest);
}

#[test]
fn digest_is_identical_across_worker_counts() {
    let dir = tempfile::tempdir().unwrap();
    let mut digests = Vec::new();
    let mut files = Vec::new();
    for w in [1, 3, 8] {
        let out = dir.path().join(format!("w{w}"));
        digests.push(run_pipeline(&small_config(&out, w)).unwrap().manifest.digest);
        files.push(file_bytes(&out));
    }
    assert!(digests.windows(2).all(|d| d[0] == d[1]));
    assert!(files.windows(2).all(|f| f[0] == f[1]));
}

#[test]
fn rerunning_into_the_same_directory_reproduces_it() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path(), 4);
    let first = run_pipeline(&cfg).unwrap();
    let before = file_bytes(dir.path());
    let second = run_pipeline(&cfg).unwrap();
    assert_eq!(first.manifest.digest, second.manifest.digest);
    assert_eq!(before, file_bytes(dir.path()));
}

#[test]
fn stage_by_stage_matches_one_shot() {
    let dir = tempfile::tempdir().unwrap();
    let one_shot = run_pipeline(&small_config(&dir.path().join("a"), 2)).unwrap();
    let cfg = small_config(&dir.path().join("b"), 2);
    for stage in Stage::ALL {
        assert_eq!(run_stage(&cfg, stage).unwrap().outcome, Outcome::Completed);
    }
    let staged = Manifest::read(&cfg.output_dir).unwrap();
    assert_eq!(staged.artifacts, one_shot.manifest.artifacts);
    assert_eq!(staged.digest, one_shot.manifest.digest);
}

#[test]
fn both_sources_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = small_config(dir.path(), 1);
    cfg.input = Some(InputPaths::in_dir(dir.path()));
    let err = run_pipeline(&cfg).unwrap_err();
    assert_eq!(err.class(), ErrorClass::Config);
    cfg.input = None;
    cfg.synth = None;
    assert_eq!(run_pipeline(&cfg).unwrap_err().class(), ErrorClass::Config);
}

#[test]
fn unpolarized_corpus_halts_after_media_clustering() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = PipelineConfig {
        preset: Some(Preset::Unpolarized),
        output_dir: dir.path().to_owned(),
        ..PipelineConfig::default()
    };
    let bundle = run_pipeline(&cfg).unwrap();
    let halted = bundle.halted().expect("run should halt");
    assert_eq!(halted.stage, Stage::Mediaclust);
    for s in [Stage::Leaning, Stage::Conet, Stage::Affect, Stage::Classify] {
        assert!(bundle.manifest.stage(s).is_none());
    }
    let heat = bundle
        .figures
        .iter()
        .find(|f| f.name == "correlation_heatmap")
        .unwrap();
    assert!(heat.skipped.is_none());
    assert!(bundle
        .figures
        .iter()
        .filter(|f| f.name != "correlation_heatmap")
        .all(|f| f.skipped.is_some()));
    assert!(dir.path().join("tables/media_correlation.csv").exists());
    assert!(!dir.path().join("tables/media_groups.csv").exists());

    let err = run_stage(&cfg, Stage::Mediaclust).unwrap_err();
    assert_eq!(err.class(), ErrorClass::Unpolarized);
}

#[test]
fn figures_are_reproducible_from_tables_alone() {
    let dir = tempfile::tempdir().unwrap();
    let bundle = run_pipeline(&small_config(dir.path(), 2)).unwrap();
    let figs = dir.path().join("figures");
    let before: Vec<_> = bundle
        .figures
        .iter()
        .map(|f| fs::read(dir.path().join(f.file.as_ref().unwrap())).unwrap())
        .collect();
    fs::remove_dir_all(&figs).unwrap();
    let again = render_figures(dir.path(), &Default::default()).unwrap();
    let after: Vec<_> = again
        .iter()
        .map(|f| fs::read(dir.path().join(f.file.as_ref().unwrap())).unwrap())
        .collect();
    assert_eq!(before, after);
}

#[test]
fn heatmap_has_one_cell_per_correlation_entry() {
    let dir = tempfile::tempdir().unwrap();
    run_pipeline(&small_config(dir.path(), 2)).unwrap();
    let corr = Table::read(&dir.path().join("tables"), "media_correlation").unwrap();
    let n = Table::read(&dir.path().join("tables"), "media_order")
        .unwrap()
        .len();
    assert_eq!(corr.len(), n * n);
    let svg = fs::read_to_string(dir.path().join("figures/correlation_heatmap.svg")).unwrap();
    assert_eq!(svg.matches("class=\"cell\"").count(), n * n);
}

#[test]
fn failing_stage_is_tagged_and_keeps_earlier_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = small_config(dir.path(), 1);
    cfg.mediaclust.anchor = Some("no-such-medium".into());
    let err = run_pipeline(&cfg).unwrap_err();
    match &err {
        Error::Stage { stage, .. } => assert_eq!(*stage, "mediaclust"),
        other => panic!("unexpected {other:?}"),
    }
    let m = Manifest::read(dir.path()).unwrap();
    assert_eq!(m.stage(Stage::Corpus).unwrap().outcome, Outcome::Completed);
    assert_eq!(m.stage(Stage::Mediaclust).unwrap().outcome, Outcome::Failed);
    assert!(dir.path().join("tables/corpus_stats.csv").exists());
}

#[test]
fn generated_corpus_round_trips_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path(), 1);
    run_stage(&cfg, Stage::Corpus).unwrap();
    let corpus_dir = dir.path().join("corpus");
    let loaded = load_corpus(&CorpusPaths::in_dir(&corpus_dir)).unwrap();
    let seeded = cfg.synth.clone().unwrap().with_seed(cfg.seed);
    let (generated, _) = polarscope_core::synth::generate(&seeded).unwrap();
    assert_eq!(loaded, generated);

    let file_cfg = PipelineConfig {
        input: Some(InputPaths::in_dir(&corpus_dir)),
        synth: None,
        output_dir: dir.path().join("from-files"),
        ..cfg.clone()
    };
    let bundle = run_pipeline(&file_cfg).unwrap();
    assert_eq!(
        bundle.manifest.stage(Stage::Corpus).unwrap().outcome,
        Outcome::Completed
    );
    assert!(!dir.path().join("from-files/corpus").exists());
}
