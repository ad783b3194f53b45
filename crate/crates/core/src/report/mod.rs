//! End-to-end orchestration: runs the stages from one configuration,
//! persists every intermediate table with a schema sidecar, renders static
//! figures from those tables, and records content hashes in a manifest.
//!
//! Output layout:
//!
//! ```text
//! <output_dir>/
//!   manifest.json
//!   corpus/     generated corpus and ground truth (synthetic runs only)
//!   tables/     <name>.csv + <name>.schema.json
//!   figures/    <name>.svg
//!   models/     fold<k>-<model>.bin
//! ```

mod config;
mod figures;
mod manifest;
mod pipeline;
pub mod stages;
mod svg;
mod table;

pub use config::{
    AffectParams, ConetParams, CorpusParams, InputPaths, LeaningParams, MediaclustParams, PipelineConfig,
    Source,
};
pub use figures::{figures_dir, render_figures, FigureRecord};
pub use manifest::{sha256_file, Artifact, Manifest, Outcome, Stage, StageRecord, MANIFEST_FILE};
pub use pipeline::{run_pipeline, run_stage, ReportBundle};
pub use table::{Cell, Column, ColumnType, Schema, Table};
