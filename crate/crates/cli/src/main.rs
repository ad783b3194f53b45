use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use polarscope_core::report::{
    run_pipeline, run_stage, InputPaths, Outcome, PipelineConfig, Stage, StageRecord,
};
use polarscope_core::synth::{Preset, SynthConfig};
use polarscope_core::{Error, ErrorClass};

/// Media polarization and echo-chamber analysis of news comment corpora.
#[derive(Debug, Parser)]
#[command(name = "polarscope", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a synthetic corpus and its ground truth.
    Generate,
    /// Load and validate a corpus, writing its summary statistics.
    Ingest,
    /// Correlate media by user sympathy ratios and extract the polar groups.
    ClusterMedia,
    /// Compute user leanings and their distributions.
    Leanings,
    /// Build the co-commenting network and measure assortativity.
    Conet,
    /// Response curves by commenter leaning and the reply-affect relation.
    Affect,
    /// Cross-validated article classification by media group.
    Classify,
    /// Render figures from the tables in the output directory.
    Report,
    /// Run every stage in order.
    Run,
}

#[derive(Debug, Args)]
struct Opts {
    /// TOML pipeline configuration; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    output_dir: Option<PathBuf>,
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Directory holding media.jsonl, articles.jsonl and comments.jsonl.
    #[arg(long, global = true, conflicts_with_all = ["preset", "synth_config"])]
    input: Option<PathBuf>,
    /// Named synthetic scenario.
    #[arg(long, global = true, conflicts_with = "synth_config")]
    preset: Option<String>,
    /// TOML generator configuration.
    #[arg(long, global = true)]
    synth_config: Option<PathBuf>,

    #[arg(long, global = true)]
    top_media: Option<usize>,
    #[arg(long, global = true)]
    cluster_min_comments: Option<usize>,
    #[arg(long, global = true)]
    min_responses: Option<u64>,
    #[arg(long, global = true)]
    active_min_comments: Option<usize>,
    #[arg(long, global = true)]
    min_overlap: Option<usize>,
    #[arg(long, global = true)]
    min_size: Option<usize>,
    /// Medium id whose group receives leaning +1.
    #[arg(long, global = true)]
    anchor: Option<String>,
    #[arg(long, global = true)]
    leaning_bins: Option<usize>,
    #[arg(long, global = true)]
    joint_bins: Option<usize>,
    #[arg(long, global = true)]
    top_fraction: Option<f64>,
    #[arg(long, global = true)]
    max_commenters: Option<usize>,
    #[arg(long, global = true)]
    shuffles: Option<usize>,
    #[arg(long, global = true)]
    affect_bins: Option<usize>,
    #[arg(long, global = true)]
    max_bucket: Option<u32>,
    #[arg(long, global = true)]
    classify_min_comments: Option<usize>,
    #[arg(long, global = true)]
    top_k: Option<usize>,
    #[arg(long, global = true)]
    k_neighbors: Option<usize>,
    #[arg(long, global = true)]
    max_epochs: Option<usize>,
}

fn set<T>(slot: &mut T, v: Option<T>) {
    if let Some(v) = v {
        *slot = v;
    }
}

impl Opts {
    fn resolve(self) -> Result<PipelineConfig, Error> {
        let mut c = match &self.config {
            Some(p) => PipelineConfig::from_file(p)?,
            None => PipelineConfig::default(),
        };
        if let Some(dir) = self.input {
            c.input = Some(InputPaths::in_dir(dir));
            c.synth = None;
            c.preset = None;
        }
        if let Some(name) = self.preset {
            let p = Preset::from_name(&name).ok_or_else(|| {
                let known: Vec<&str> = Preset::ALL.iter().map(|p| p.name()).collect();
                Error::InvalidConfig(format!("unknown preset {name:?}; known: {}", known.join(", ")))
            })?;
            c.preset = Some(p);
            c.input = None;
            c.synth = None;
        }
        if let Some(path) = self.synth_config {
            c.synth = Some(SynthConfig::from_file(&path)?);
            c.input = None;
            c.preset = None;
        }
        set(&mut c.output_dir, self.output_dir);
        set(&mut c.workers, self.workers);
        set(&mut c.seed, self.seed);
        set(&mut c.corpus.top_media, self.top_media);
        set(&mut c.corpus.cluster_min_comments, self.cluster_min_comments);
        set(&mut c.corpus.min_responses, self.min_responses);
        set(&mut c.corpus.active_min_comments, self.active_min_comments);
        set(&mut c.mediaclust.min_overlap, self.min_overlap);
        set(&mut c.mediaclust.min_size, self.min_size);
        if self.anchor.is_some() {
            c.mediaclust.anchor = self.anchor;
        }
        set(&mut c.leaning.n_bins, self.leaning_bins);
        set(&mut c.conet.joint_bins, self.joint_bins);
        set(&mut c.conet.top_fraction, self.top_fraction);
        if self.max_commenters.is_some() {
            c.conet.max_commenters = self.max_commenters;
        }
        set(&mut c.conet.n_shuffles, self.shuffles);
        set(&mut c.affect.n_bins, self.affect_bins);
        set(&mut c.affect.max_bucket, self.max_bucket);
        set(&mut c.classify.min_comments, self.classify_min_comments);
        set(&mut c.classify.top_k, self.top_k);
        set(&mut c.classify.k_neighbors, self.k_neighbors);
        set(&mut c.classify.mlp.max_epochs, self.max_epochs);
        c.validate()?;
        Ok(c)
    }
}

const EXIT_OTHER: u8 = 1;
const EXIT_CONFIG: u8 = 3;
const EXIT_IO: u8 = 4;
const EXIT_DATA: u8 = 5;
const EXIT_UNPOLARIZED: u8 = 6;
const EXIT_NUMERICAL: u8 = 7;

fn exit_code(e: &Error) -> u8 {
    match e.class() {
        ErrorClass::Config => EXIT_CONFIG,
        ErrorClass::Io => EXIT_IO,
        ErrorClass::Data => EXIT_DATA,
        ErrorClass::Unpolarized => EXIT_UNPOLARIZED,
        ErrorClass::Numerical => EXIT_NUMERICAL,
        ErrorClass::Analysis => EXIT_OTHER,
    }
}

fn describe(r: &StageRecord) -> String {
    let outcome = match r.outcome {
        Outcome::Completed => "completed",
        Outcome::Skipped => "skipped",
        Outcome::Halted => "halted",
        Outcome::Failed => "failed",
    };
    let mut s = format!("{:<10} {outcome:<9} {:>8.2}s", r.stage.name(), r.seconds);
    if let Some(note) = &r.note {
        s.push_str("  ");
        s.push_str(note);
    }
    s
}

fn execute(command: Command, config: &PipelineConfig) -> Result<u8, Error> {
    let stage = match command {
        Command::Run => {
            let bundle = run_pipeline(config)?;
            for r in &bundle.manifest.stages {
                println!("{}", describe(r));
            }
            println!("output   {}", bundle.dir.display());
            println!("digest   {}", bundle.manifest.digest);
            return Ok(if bundle.halted().is_some() {
                EXIT_UNPOLARIZED
            } else {
                0
            });
        }
        Command::Generate => {
            if config.input.is_some() {
                return Err(Error::InvalidConfig(
                    "generate needs --preset, --synth-config or a synth section".into(),
                ));
            }
            Stage::Corpus
        }
        Command::Ingest => {
            if config.input.is_none() {
                return Err(Error::InvalidConfig(
                    "ingest needs --input or an input section".into(),
                ));
            }
            Stage::Corpus
        }
        Command::ClusterMedia => Stage::Mediaclust,
        Command::Leanings => Stage::Leaning,
        Command::Conet => Stage::Conet,
        Command::Affect => Stage::Affect,
        Command::Classify => Stage::Classify,
        Command::Report => Stage::Render,
    };
    let record = run_stage(config, stage)?;
    println!("{}", describe(&record));
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = cli
        .opts
        .resolve()
        .and_then(|config| execute(cli.command, &config));
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            let mut source = std::error::Error::source(&e);
            while let Some(s) = source {
                eprintln!("  caused by: {s}");
                source = s.source();
            }
            ExitCode::from(exit_code(&e))
        }
    }
}
