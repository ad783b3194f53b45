//! Seeded synthetic corpora with planted media groups and user leanings.

mod config;
mod generate;
mod presets;
mod profile;
mod recovery;

pub use config::{SynthConfig, MAX_RATE};
pub use generate::{generate, generate_with_profiles, GroundTruth};
pub use presets::Preset;
pub use profile::{ProfileKind, ResponseShape, Shape, StrategyProfile};
pub use recovery::{evaluate_recovery, RecoveryReport};
