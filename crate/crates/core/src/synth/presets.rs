use serde::{Deserialize, Serialize};

use super::{ProfileKind, SynthConfig};

/// Named generator settings for the standard scenarios.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    /// 6 + 9 polar media among 50, 5,000 users, κ = 1.5.
    Default,
    /// Users pile up at ±1 and rarely leave their side's media.
    Bimodal,
    /// Strong homophily and many more articles than comments per user, so
    /// co-commenting is selective and the graph stays sparse.
    EchoChamber,
    /// LINEAR group A, INVERTED_U group B, moderate homophily.
    Affect,
    /// Few neutral media and crowded articles: thousands of articles with
    /// more than 200 comments.
    Classification,
    /// About 10^6 comments from 10^4 users.
    Throughput,
    /// Five media, no homophily, flat responses.
    Unpolarized,
}

impl Preset {
    pub const ALL: [Preset; 7] = [
        Preset::Default,
        Preset::Bimodal,
        Preset::EchoChamber,
        Preset::Affect,
        Preset::Classification,
        Preset::Throughput,
        Preset::Unpolarized,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Default => "default",
            Preset::Bimodal => "bimodal",
            Preset::EchoChamber => "echo-chamber",
            Preset::Affect => "affect",
            Preset::Classification => "classification",
            Preset::Throughput => "throughput",
            Preset::Unpolarized => "unpolarized",
        }
    }

    pub fn from_name(name: &str) -> Option<Preset> {
        Preset::ALL.into_iter().find(|p| p.name() == name)
    }

    pub fn config(self, seed: u64) -> SynthConfig {
        let base = SynthConfig::default().with_seed(seed);
        match self {
            Preset::Default => base,
            Preset::Bimodal => SynthConfig {
                leaning_center_a: 1.0,
                leaning_width_a: 0.1,
                leaning_center_b: -1.0,
                leaning_width_b: 0.1,
                leaning_weight_a: 0.5,
                homophily: 2.5,
                ..base
            },
            Preset::EchoChamber => SynthConfig {
                n_users: 4000,
                articles_per_medium: 20_000,
                comments_min: 100,
                comments_max: 300,
                homophily: 3.0,
                ..base
            },
            Preset::Affect => SynthConfig {
                homophily: 1.0,
                ..base
            },
            Preset::Classification => SynthConfig {
                n_media_neutral: 5,
                n_users: 12_000,
                articles_per_medium: 150,
                comments_min: 50,
                homophily: 1.0,
                ..base
            },
            Preset::Throughput => SynthConfig {
                n_users: 10_000,
                comments_min: 23,
                ..base
            },
            Preset::Unpolarized => SynthConfig {
                n_media_group_a: 1,
                n_media_group_b: 1,
                n_media_neutral: 3,
                n_users: 500,
                articles_per_medium: 20,
                homophily: 0.0,
                profile_a: ProfileKind::Flat,
                profile_b: ProfileKind::Flat,
                ..base
            },
        }
    }
}
