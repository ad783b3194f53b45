use std::path::Path;

use serde::{Deserialize, Serialize};

use super::profile::ProfileKind;
use crate::{Error, Result};

/// Largest Poisson rate the inverse-CDF sampler accepts.
pub const MAX_RATE: f64 = 500.0;

/// Parameters of the synthetic corpus generator.
///
/// Serialized as a flat key/value TOML table; every key is optional and falls
/// back to [`SynthConfig::default`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthConfig {
    pub n_media_group_a: usize,
    pub n_media_group_b: usize,
    pub n_media_neutral: usize,
    pub n_users: usize,

    /// Mixture component for positively leaning users.
    pub leaning_center_a: f64,
    pub leaning_width_a: f64,
    /// Mixture component for negatively leaning users.
    pub leaning_center_b: f64,
    pub leaning_width_b: f64,
    /// Probability that a user is drawn from component A.
    pub leaning_weight_a: f64,

    pub articles_per_medium: usize,

    /// Truncated power law for comments per user: density ∝ k^-exponent on
    /// `[comments_min, comments_max]`.
    pub comments_exponent: f64,
    pub comments_min: u32,
    pub comments_max: u32,
    /// Comment counts are scaled by `1 + activity_gain * |x|`.
    pub activity_gain: f64,

    /// κ: medium choice ∝ exp(κ · x_user · c_medium).
    pub homophily: f64,

    pub rate_replies: f64,
    pub rate_sympathies: f64,
    pub rate_antipathies: f64,
    /// Extra antipathies per reply received.
    pub reply_antipathy_coupling: f64,

    pub profile_a: ProfileKind,
    pub profile_b: ProfileKind,

    pub seed: u64,
}

impl Default for SynthConfig {
    /// 6 + 9 polar media among 50, 5,000 users, κ = 1.5, LINEAR responses on
    /// the positive group and INVERTED_U on the negative group.
    fn default() -> Self {
        SynthConfig {
            n_media_group_a: 6,
            n_media_group_b: 9,
            n_media_neutral: 35,
            n_users: 5000,
            leaning_center_a: 0.8,
            leaning_width_a: 0.2,
            leaning_center_b: -0.8,
            leaning_width_b: 0.2,
            leaning_weight_a: 0.6,
            articles_per_medium: 200,
            comments_exponent: 2.0,
            comments_min: 20,
            comments_max: 2000,
            activity_gain: 0.0,
            homophily: 1.5,
            rate_replies: 4.0,
            rate_sympathies: 20.0,
            rate_antipathies: 20.0,
            reply_antipathy_coupling: 0.0,
            profile_a: ProfileKind::Linear,
            profile_b: ProfileKind::InvertedU,
            seed: 0,
        }
    }
}

impl SynthConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn n_media(&self) -> usize {
        self.n_media_group_a + self.n_media_group_b + self.n_media_neutral
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidConfig(msg.to_owned()));
        if self.n_media_group_a == 0 || self.n_media_group_b == 0 {
            return bad("both polar groups need at least one medium");
        }
        if self.n_users == 0 || self.articles_per_medium == 0 {
            return bad("n_users and articles_per_medium must be positive");
        }
        if self.comments_min == 0 || self.comments_max < self.comments_min {
            return bad("need 1 <= comments_min <= comments_max");
        }
        if !self.comments_exponent.is_finite() {
            return bad("comments_exponent must be finite");
        }
        if !(self.homophily.is_finite() && self.homophily >= 0.0) {
            return bad("homophily must be a finite non-negative number");
        }
        if !(0.0..=1.0).contains(&self.leaning_weight_a) {
            return bad("leaning_weight_a must lie in [0, 1]");
        }
        for (c, w) in [
            (self.leaning_center_a, self.leaning_width_a),
            (self.leaning_center_b, self.leaning_width_b),
        ] {
            if !(-1.0..=1.0).contains(&c) || !(w.is_finite() && w >= 0.0) {
                return bad("mixture centers must lie in [-1, 1] with non-negative widths");
            }
        }
        if !(self.activity_gain.is_finite() && self.activity_gain >= 0.0) {
            return bad("activity_gain must be non-negative");
        }
        for r in [
            self.rate_replies,
            self.rate_sympathies,
            self.rate_antipathies,
            self.reply_antipathy_coupling,
        ] {
            if !(r.is_finite() && (0.0..=MAX_RATE).contains(&r)) {
                return bad("response rates must lie in [0, 500]");
            }
        }
        if self.profile_a == ProfileKind::Custom || self.profile_b == ProfileKind::Custom {
            return bad("CUSTOM profiles cannot be named in a config file");
        }
        Ok(())
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: SynthConfig = toml::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("synth config serializes")
    }
}
