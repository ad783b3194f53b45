use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use super::config::PipelineConfig;
use super::figures::{figures_dir, render_figures, FigureRecord};
use super::manifest::{upsert_stage, Manifest, Outcome, Stage, StageRecord, MANIFEST_FILE};
use super::stages::*;
use crate::{Error, Result};

/// Everything a run leaves behind, as recorded in its manifest.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportBundle {
    pub dir: PathBuf,
    pub manifest: Manifest,
    pub figures: Vec<FigureRecord>,
}

impl ReportBundle {
    /// The stage that stopped the run early, if any.
    pub fn halted(&self) -> Option<&StageRecord> {
        self.manifest.stages.iter().find(|r| r.outcome == Outcome::Halted)
    }
}

fn with_pool<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

struct Recorder<'a> {
    config: &'a PipelineConfig,
    out: &'a Path,
    stages: Vec<StageRecord>,
}

impl Recorder<'_> {
    fn record(&mut self, stage: Stage, outcome: Outcome, started: Instant, note: Option<String>) {
        upsert_stage(
            &mut self.stages,
            StageRecord {
                stage,
                outcome,
                seconds: started.elapsed().as_secs_f64(),
                note,
            },
        );
    }

    /// Runs one stage, recording it as completed or failed.
    fn run<T>(&mut self, stage: Stage, f: impl FnOnce() -> Result<T>) -> Result<T> {
        let started = Instant::now();
        match f() {
            Ok(v) => {
                self.record(stage, Outcome::Completed, started, None);
                Ok(v)
            }
            Err(Error::NoQualifyingPair) => {
                self.record(
                    stage,
                    Outcome::Halted,
                    started,
                    Some(Error::NoQualifyingPair.to_string()),
                );
                Err(Error::NoQualifyingPair)
            }
            Err(e) => {
                self.record(stage, Outcome::Failed, started, Some(e.to_string()));
                Err(self.abort(e.in_stage(stage.name())))
            }
        }
    }

    /// Writes the manifest for what has completed so far and hands back the
    /// error that stopped the run.
    fn abort(&self, e: Error) -> Error {
        match Manifest::build(self.out, self.config, self.stages.clone()).and_then(|m| m.write(self.out)) {
            Ok(()) => e,
            Err(_) => e,
        }
    }

    fn finish(mut self, skipped: &BTreeMap<Stage, String>) -> Result<ReportBundle> {
        let started = Instant::now();
        let figures = match render_figures(self.out, skipped) {
            Ok(f) => f,
            Err(e) => {
                self.record(Stage::Render, Outcome::Failed, started, Some(e.to_string()));
                return Err(self.abort(e.in_stage(Stage::Render.name())));
            }
        };
        self.record(Stage::Render, Outcome::Completed, started, figure_note(&figures));
        let manifest = Manifest::build(self.out, self.config, self.stages)?;
        manifest.write(self.out)?;
        Ok(ReportBundle {
            dir: self.out.to_owned(),
            manifest,
            figures,
        })
    }
}

fn figure_note(figures: &[FigureRecord]) -> Option<String> {
    let skipped: Vec<String> = figures
        .iter()
        .filter_map(|f| {
            f.skipped
                .as_ref()
                .map(|why| format!("{} skipped ({why})", f.name))
        })
        .collect();
    (!skipped.is_empty()).then(|| skipped.join("; "))
}

/// Removes the artifacts a previous run may have left in `out`. Other files
/// in the directory are left alone.
fn clear_outputs(out: &Path) -> Result<()> {
    for dir in [
        corpus_dir(out),
        tables_dir(out),
        figures_dir(out),
        models_dir(out),
    ] {
        if dir.exists() {
            fs::remove_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        }
    }
    let m = out.join(MANIFEST_FILE);
    if m.exists() {
        fs::remove_file(&m).map_err(|e| Error::io(&m, e))?;
    }
    fs::create_dir_all(out).map_err(|e| Error::io(out, e))
}

/// Runs every stage in order on a pool of `config.workers` threads.
///
/// A failing stage aborts the run with an error naming the stage; artifacts
/// of completed stages stay on disk and are listed in the manifest. An
/// unpolarized corpus is not a failure: the run stops after media
/// clustering, renders what it can, and reports the halt in the bundle.
pub fn run_pipeline(config: &PipelineConfig) -> Result<ReportBundle> {
    config.validate()?;
    with_pool(config.workers, || run_all(config))?
}

fn run_all(config: &PipelineConfig) -> Result<ReportBundle> {
    let out = config.output_dir.as_path();
    clear_outputs(out)?;
    let mut rec = Recorder {
        config,
        out,
        stages: Vec::new(),
    };
    let mut skipped = BTreeMap::new();

    let (corpus, truth) = rec.run(Stage::Corpus, || stage_corpus(config, out))?;
    let grouping = match rec.run(Stage::Mediaclust, || {
        stage_mediaclust(config, out, &corpus, truth.as_ref())
    }) {
        Ok(g) => g,
        Err(Error::NoQualifyingPair) => {
            for s in [Stage::Leaning, Stage::Conet, Stage::Affect, Stage::Classify] {
                skipped.insert(s, "not run: no polar media groups".to_owned());
            }
            return rec.finish(&skipped);
        }
        Err(e) => return Err(e),
    };
    let leanings = rec.run(Stage::Leaning, || {
        stage_leaning(config, out, &corpus, &grouping, truth.as_ref())
    })?;
    rec.run(Stage::Conet, || stage_conet(config, out, &corpus, &leanings))?;
    rec.run(Stage::Affect, || {
        stage_affect(config, out, &corpus, &grouping, &leanings)
    })?;

    let started = Instant::now();
    match rec.run(Stage::Classify, || {
        stage_classify(config, out, &corpus, &grouping)
    })? {
        None => {}
        Some(note) => {
            rec.record(Stage::Classify, Outcome::Skipped, started, Some(note.clone()));
            skipped.insert(Stage::Classify, format!("skipped: {note}"));
        }
    }
    rec.finish(&skipped)
}

/// Runs a single stage against the artifacts already in the output
/// directory, then refreshes the manifest. An unpolarized corpus is
/// reported as a stage error after the manifest is written.
pub fn run_stage(config: &PipelineConfig, stage: Stage) -> Result<StageRecord> {
    config.validate()?;
    with_pool(config.workers, || run_one(config, stage))?
}

fn run_one(config: &PipelineConfig, stage: Stage) -> Result<StageRecord> {
    let out = config.output_dir.as_path();
    fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    let stages = Manifest::read(out).map(|m| m.stages).unwrap_or_default();
    let mut rec = Recorder { config, out, stages };
    let started = Instant::now();

    let result: Result<Option<String>> = match stage {
        Stage::Corpus => stage_corpus(config, out).map(|_| None),
        Stage::Mediaclust => load_stage_corpus(config, out)
            .and_then(|(c, t)| stage_mediaclust(config, out, &c, t.as_ref()))
            .map(|_| None),
        Stage::Leaning => load_stage_corpus(config, out).and_then(|(c, t)| {
            let g = load_grouping(out, &c)?;
            stage_leaning(config, out, &c, &g, t.as_ref()).map(|_| None)
        }),
        Stage::Conet => load_stage_corpus(config, out).and_then(|(c, _)| {
            let l = load_leanings(out, &c)?;
            stage_conet(config, out, &c, &l).map(|_| None)
        }),
        Stage::Affect => load_stage_corpus(config, out).and_then(|(c, _)| {
            let g = load_grouping(out, &c)?;
            let l = load_leanings(out, &c)?;
            stage_affect(config, out, &c, &g, &l).map(|_| None)
        }),
        Stage::Classify => load_stage_corpus(config, out).and_then(|(c, _)| {
            let g = load_grouping(out, &c)?;
            stage_classify(config, out, &c, &g)
        }),
        Stage::Render => {
            let skipped = Stage::ALL[1..6]
                .iter()
                .filter_map(|&s| match rec.stages.iter().find(|r| r.stage == s) {
                    Some(r) if r.outcome == Outcome::Completed => None,
                    Some(r) => Some((s, format!("{:?}", r.outcome).to_lowercase())),
                    None => Some((s, "not run".to_owned())),
                })
                .collect();
            render_figures(out, &skipped).map(|f| figure_note(&f))
        }
    };

    let (outcome, note, err) = match result {
        Ok(None) => (Outcome::Completed, None, None),
        Ok(Some(note)) if stage == Stage::Render => (Outcome::Completed, Some(note), None),
        Ok(Some(note)) => (Outcome::Skipped, Some(note), None),
        Err(Error::NoQualifyingPair) => (
            Outcome::Halted,
            Some(Error::NoQualifyingPair.to_string()),
            Some(Error::NoQualifyingPair),
        ),
        Err(e) => (Outcome::Failed, Some(e.to_string()), Some(e)),
    };
    rec.record(stage, outcome, started, note);
    let record = rec
        .stages
        .iter()
        .find(|r| r.stage == stage)
        .cloned()
        .expect("just recorded");
    match err {
        Some(e) => Err(rec.abort(e.in_stage(stage.name()))),
        None => {
            Manifest::build(out, config, rec.stages)?.write(out)?;
            Ok(record)
        }
    }
}
