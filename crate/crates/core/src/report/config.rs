use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::classify::ClassifyConfig;
use crate::corpus::CorpusPaths;
use crate::synth::{Preset, SynthConfig};
use crate::{Error, Result};

/// Paths of the three record files of an existing corpus.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputPaths {
    pub media: PathBuf,
    pub articles: PathBuf,
    pub comments: PathBuf,
}

impl From<&InputPaths> for CorpusPaths {
    fn from(p: &InputPaths) -> Self {
        CorpusPaths {
            media: p.media.clone(),
            articles: p.articles.clone(),
            comments: p.comments.clone(),
        }
    }
}

impl InputPaths {
    pub fn in_dir(dir: impl AsRef<Path>) -> Self {
        let p = CorpusPaths::in_dir(dir);
        InputPaths {
            media: p.media,
            articles: p.articles,
            comments: p.comments,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CorpusParams {
    /// Media kept for clustering, by article volume. Clamped to the number
    /// of media in the corpus.
    pub top_media: usize,
    pub cluster_min_comments: usize,
    pub min_responses: u64,
    /// Comments on group media needed for a leaning.
    pub active_min_comments: usize,
}

impl Default for CorpusParams {
    fn default() -> Self {
        CorpusParams {
            top_media: 50,
            cluster_min_comments: 10,
            min_responses: 10,
            active_min_comments: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MediaclustParams {
    pub min_overlap: usize,
    pub min_size: usize,
    /// Medium id whose group receives leaning +1.
    pub anchor: Option<String>,
}

impl Default for MediaclustParams {
    fn default() -> Self {
        MediaclustParams {
            min_overlap: 20,
            min_size: 3,
            anchor: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LeaningParams {
    pub n_bins: usize,
}

impl Default for LeaningParams {
    fn default() -> Self {
        LeaningParams { n_bins: 40 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConetParams {
    pub joint_bins: usize,
    pub top_fraction: f64,
    pub max_commenters: Option<usize>,
    pub n_shuffles: usize,
}

impl Default for ConetParams {
    fn default() -> Self {
        ConetParams {
            joint_bins: 61,
            top_fraction: 0.02,
            max_commenters: None,
            n_shuffles: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AffectParams {
    pub n_bins: usize,
    pub max_bucket: u32,
}

impl Default for AffectParams {
    fn default() -> Self {
        AffectParams {
            n_bins: 40,
            max_bucket: 20,
        }
    }
}

/// Everything one pipeline run needs.
///
/// The corpus comes from exactly one of `input`, `synth` or `preset`. The
/// top-level `seed` drives every random choice: it replaces the generator
/// seed and the fold and network seeds inside `classify`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub seed: u64,
    pub output_dir: PathBuf,
    pub workers: usize,
    pub input: Option<InputPaths>,
    pub synth: Option<SynthConfig>,
    pub preset: Option<Preset>,
    pub corpus: CorpusParams,
    pub mediaclust: MediaclustParams,
    pub leaning: LeaningParams,
    pub conet: ConetParams,
    pub affect: AffectParams,
    pub classify: ClassifyConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            seed: 0,
            output_dir: PathBuf::from("polarscope-out"),
            workers: 4,
            input: None,
            synth: None,
            preset: None,
            corpus: CorpusParams::default(),
            mediaclust: MediaclustParams::default(),
            leaning: LeaningParams::default(),
            conet: ConetParams::default(),
            affect: AffectParams::default(),
            classify: ClassifyConfig::default(),
        }
    }
}

/// Where the corpus comes from, after validation.
#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    Files(CorpusPaths),
    Synth(SynthConfig),
}

impl PipelineConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("pipeline config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        self.source()?;
        let bad = |msg: &str| Err(Error::InvalidConfig(msg.to_owned()));
        if self.workers == 0 {
            return bad("workers must be at least 1");
        }
        if self.corpus.top_media == 0 {
            return bad("corpus.top_media must be positive");
        }
        if self.mediaclust.min_size == 0 {
            return bad("mediaclust.min_size must be positive");
        }
        if self.leaning.n_bins == 0 || self.affect.n_bins == 0 || self.conet.joint_bins == 0 {
            return bad("bin counts must be positive");
        }
        if !(0.0..=1.0).contains(&self.conet.top_fraction) {
            return bad("conet.top_fraction must lie in [0, 1]");
        }
        if self.conet.max_commenters == Some(0) {
            return bad("conet.max_commenters must be positive when set");
        }
        if self.classify.top_k == 0 || self.classify.k_neighbors == 0 {
            return bad("classify.top_k and classify.k_neighbors must be positive");
        }
        if self.classify.mlp.batch_size == 0 {
            return bad("classify.mlp.batch_size must be positive");
        }
        Ok(())
    }

    /// The validated corpus source, with the generator seeded from `seed`.
    pub fn source(&self) -> Result<Source> {
        match (&self.input, &self.synth, self.preset) {
            (Some(p), None, None) => Ok(Source::Files(p.into())),
            (None, Some(s), None) => {
                let s = s.clone().with_seed(self.seed);
                s.validate()?;
                Ok(Source::Synth(s))
            }
            (None, None, Some(p)) => Ok(Source::Synth(p.config(self.seed))),
            (None, None, None) => Err(Error::InvalidConfig(
                "one of input, synth or preset is required".into(),
            )),
            _ => Err(Error::InvalidConfig(
                "input, synth and preset are mutually exclusive".into(),
            )),
        }
    }

    /// Classification settings with the run seed applied.
    pub fn classify_seeded(&self) -> ClassifyConfig {
        let mut c = self.classify.clone();
        c.fold_seed = self.seed;
        c.mlp.seed = self.seed;
        c
    }

    /// The config as it bears on results: `workers` and `output_dir` are
    /// cleared so they cannot influence the run digest.
    pub fn result_relevant(&self) -> PipelineConfig {
        PipelineConfig {
            workers: 1,
            output_dir: PathBuf::new(),
            ..self.clone()
        }
    }
}
