use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::config::PipelineConfig;
use crate::{Error, Result};

pub const MANIFEST_FILE: &str = "manifest.json";

/// Pipeline stages in execution order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stage {
    Corpus,
    Mediaclust,
    Leaning,
    Conet,
    Affect,
    Classify,
    Render,
}

impl Stage {
    pub const ALL: [Stage; 7] = [
        Stage::Corpus,
        Stage::Mediaclust,
        Stage::Leaning,
        Stage::Conet,
        Stage::Affect,
        Stage::Classify,
        Stage::Render,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Corpus => "corpus",
            Stage::Mediaclust => "mediaclust",
            Stage::Leaning => "leaning",
            Stage::Conet => "conet",
            Stage::Affect => "affect",
            Stage::Classify => "classify",
            Stage::Render => "render",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Completed,
    /// Nothing to do, e.g. too few qualifying articles to classify.
    Skipped,
    /// Stopped the run without failing, e.g. an unpolarized corpus.
    Halted,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageRecord {
    pub stage: Stage,
    pub outcome: Outcome,
    pub seconds: f64,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Artifact {
    /// Relative to the output directory, `/`-separated.
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub config: PipelineConfig,
    pub stages: Vec<StageRecord>,
    pub artifacts: Vec<Artifact>,
    /// Hash over the result-relevant config, the stage outcomes and notes,
    /// and every artifact hash. Timings and worker count are left out.
    pub digest: String,
}

impl Manifest {
    pub fn path(dir: &Path) -> PathBuf {
        dir.join(MANIFEST_FILE)
    }

    /// Hashes every file under `dir` except the manifest itself.
    pub fn build(dir: &Path, config: &PipelineConfig, stages: Vec<StageRecord>) -> Result<Self> {
        let artifacts = hash_tree(dir)?;
        let digest = digest(config, &stages, &artifacts);
        Ok(Manifest {
            config: config.clone(),
            stages,
            artifacts,
            digest,
        })
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        let path = Self::path(dir);
        let mut json = serde_json::to_string_pretty(self).expect("manifest serializes");
        json.push('\n');
        fs::write(&path, json).map_err(|e| Error::io(&path, e))
    }

    pub fn read(dir: &Path) -> Result<Self> {
        let path = Self::path(dir);
        let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::MalformedRecord {
            path,
            line: e.line(),
            message: e.to_string(),
        })
    }

    pub fn stage(&self, stage: Stage) -> Option<&StageRecord> {
        self.stages.iter().find(|r| r.stage == stage)
    }

    pub fn artifact(&self, path: &str) -> Option<&Artifact> {
        self.artifacts.iter().find(|a| a.path == path)
    }
}

/// Replaces the record for `rec.stage`, keeping stages in pipeline order.
pub fn upsert_stage(stages: &mut Vec<StageRecord>, rec: StageRecord) {
    stages.retain(|r| r.stage != rec.stage);
    stages.push(rec);
    stages.sort_by_key(|r| r.stage);
}

fn digest(config: &PipelineConfig, stages: &[StageRecord], artifacts: &[Artifact]) -> String {
    let mut h = Sha256::new();
    h.update(config.result_relevant().to_toml_string().as_bytes());
    for s in stages {
        let outcome = serde_json::to_string(&s.outcome).expect("outcome serializes");
        h.update(format!(
            "stage\t{}\t{outcome}\t{}\n",
            s.stage.name(),
            s.note.as_deref().unwrap_or("")
        ));
    }
    for a in artifacts {
        h.update(format!("file\t{}\t{}\n", a.path, a.sha256));
    }
    hex::encode(h.finalize())
}

pub fn sha256_file(path: &Path) -> Result<(String, u64)> {
    let mut f = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut h = Sha256::new();
    let mut buf = vec![0u8; 1 << 16];
    let mut total = 0u64;
    loop {
        let n = f.read(&mut buf).map_err(|e| Error::io(path, e))?;
        if n == 0 {
            break;
        }
        h.update(&buf[..n]);
        total += n as u64;
    }
    Ok((hex::encode(h.finalize()), total))
}

fn hash_tree(dir: &Path) -> Result<Vec<Artifact>> {
    let mut files = Vec::new();
    collect_files(dir, dir, &mut files)?;
    files.sort();
    files
        .into_iter()
        .filter(|rel| rel != MANIFEST_FILE)
        .map(|rel| {
            let (sha256, bytes) = sha256_file(&dir.join(&rel))?;
            Ok(Artifact {
                path: rel,
                sha256,
                bytes,
            })
        })
        .collect()
}

fn collect_files(root: &Path, dir: &Path, out: &mut Vec<String>) -> Result<()> {
    for entry in fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let entry = entry.map_err(|e| Error::io(dir, e))?;
        let path = entry.path();
        let ty = entry.file_type().map_err(|e| Error::io(&path, e))?;
        if ty.is_dir() {
            collect_files(root, &path, out)?;
        } else if ty.is_file() {
            let rel = path.strip_prefix(root).expect("walk stays under root");
            let parts: Vec<String> = rel
                .components()
                .map(|c| c.as_os_str().to_string_lossy().into_owned())
                .collect();
            out.push(parts.join("/"));
        }
    }
    Ok(())
}
