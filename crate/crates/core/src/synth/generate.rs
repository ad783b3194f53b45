use std::collections::BTreeMap;
use std::path::Path;

use chrono::{DateTime, Duration, TimeZone, Utc};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::config::SynthConfig;
use super::profile::{ResponseShape, StrategyProfile};
use crate::corpus::{read_records, write_records};
use crate::corpus::{ArticleRecord, CommentRecord, Corpus, MediumRecord};
use crate::Result;

/// Planted truth behind a generated corpus.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct GroundTruth {
    /// +1, -1, or 0 for neutral media.
    pub media_group: BTreeMap<String, i8>,
    pub user_leaning: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct TruthMediumRecord {
    medium_id: String,
    group: i8,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct TruthUserRecord {
    user_id: String,
    leaning: f64,
}

impl GroundTruth {
    pub fn media_in_group(&self, group: i8) -> Vec<&str> {
        self.media_group
            .iter()
            .filter(|(_, &g)| g == group)
            .map(|(m, _)| m.as_str())
            .collect()
    }

    /// Writes `truth_media.jsonl` and `truth_users.jsonl` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        let media: Vec<TruthMediumRecord> = self
            .media_group
            .iter()
            .map(|(m, &g)| TruthMediumRecord {
                medium_id: m.clone(),
                group: g,
            })
            .collect();
        let users: Vec<TruthUserRecord> = self
            .user_leaning
            .iter()
            .map(|(u, &x)| TruthUserRecord {
                user_id: u.clone(),
                leaning: x,
            })
            .collect();
        write_records(&dir.join("truth_media.jsonl"), &media)?;
        write_records(&dir.join("truth_users.jsonl"), &users)
    }

    pub fn read(dir: &Path) -> Result<Self> {
        let media: Vec<TruthMediumRecord> = read_records(&dir.join("truth_media.jsonl"))?;
        let users: Vec<TruthUserRecord> = read_records(&dir.join("truth_users.jsonl"))?;
        Ok(GroundTruth {
            media_group: media.into_iter().map(|r| (r.medium_id, r.group)).collect(),
            user_leaning: users.into_iter().map(|r| (r.user_id, r.leaning)).collect(),
        })
    }
}

/// Length of the simulated collection window.
const WINDOW_DAYS: i64 = 189;

fn window_start() -> DateTime<Utc> {
    Utc.with_ymd_and_hms(2021, 9, 1, 0, 0, 0).unwrap()
}

/// Generates a corpus with the profiles named in the config.
pub fn generate(config: &SynthConfig) -> Result<(Corpus, GroundTruth)> {
    config.validate()?;
    let a = StrategyProfile::of_kind(config.profile_a)?;
    let b = StrategyProfile::of_kind(config.profile_b)?;
    generate_with_profiles(config, &a, &b)
}

/// Generates a corpus with explicit response profiles for the two groups.
///
/// All randomness comes from one ChaCha stream consumed in a fixed entity
/// order (media roles, articles, user leanings, then each user's comments),
/// so the output depends only on the config.
pub fn generate_with_profiles(
    config: &SynthConfig,
    profile_a: &StrategyProfile,
    profile_b: &StrategyProfile,
) -> Result<(Corpus, GroundTruth)> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let n_media = config.n_media();

    let mut roles: Vec<i8> = std::iter::repeat_n(1i8, config.n_media_group_a)
        .chain(std::iter::repeat_n(-1i8, config.n_media_group_b))
        .chain(std::iter::repeat_n(0i8, config.n_media_neutral))
        .collect();
    for i in (1..roles.len()).rev() {
        let j = uniform_index(&mut rng, i + 1);
        roles.swap(i, j);
    }
    let media_ids: Vec<String> = (0..n_media).map(|i| format!("med-{i:03}")).collect();
    let media: Vec<MediumRecord> = media_ids
        .iter()
        .enumerate()
        .map(|(i, id)| MediumRecord {
            medium_id: id.clone(),
            name: format!("Medium {i:03}"),
        })
        .collect();

    let start = window_start();
    let window_secs = WINDOW_DAYS * 86_400;
    let mut articles = Vec::with_capacity(n_media * config.articles_per_medium);
    for medium_id in &media_ids {
        for _ in 0..config.articles_per_medium {
            let offset = (unit(&mut rng) * window_secs as f64) as i64;
            articles.push(ArticleRecord {
                article_id: format!("art-{:07}", articles.len()),
                medium_id: medium_id.clone(),
                published_at: start + Duration::seconds(offset),
            });
        }
    }

    let leanings: Vec<f64> = (0..config.n_users)
        .map(|_| draw_leaning(&mut rng, config))
        .collect();
    let user_ids: Vec<String> = (0..config.n_users).map(|i| format!("user-{i:06}")).collect();

    let mut comments = Vec::new();
    let mut weights = vec![0.0; n_media];
    for (u, &x) in leanings.iter().enumerate() {
        let base = power_law(unit(&mut rng), config);
        let count = (base * (1.0 + config.activity_gain * x.abs())).round() as usize;

        let mut total = 0.0;
        for (w, &c) in weights.iter_mut().zip(&roles) {
            total += (config.homophily * x * c as f64).exp();
            *w = total;
        }
        let shapes = [
            profile_a.eval(x, 1.0),
            profile_b.eval(x, -1.0),
            ResponseShape::average(profile_a.eval_aligned(0.0), profile_b.eval_aligned(0.0)),
        ];

        for _ in 0..count {
            let target = unit(&mut rng) * total;
            let m = weights.partition_point(|&w| w <= target).min(n_media - 1);
            let art = m * config.articles_per_medium + uniform_index(&mut rng, config.articles_per_medium);
            let delay = (unit(&mut rng) * 7.0 * 86_400.0) as i64;
            let shape = match roles[m] {
                1 => shapes[0],
                -1 => shapes[1],
                _ => shapes[2],
            };
            let replies = poisson(unit(&mut rng), config.rate_replies * shape.replies);
            let sympathies = poisson(unit(&mut rng), config.rate_sympathies * shape.sympathies);
            let antipathies = poisson(
                unit(&mut rng),
                config.rate_antipathies * shape.antipathies
                    + config.reply_antipathy_coupling * replies as f64,
            );
            comments.push(CommentRecord {
                comment_id: format!("cmt-{:09}", comments.len()),
                article_id: articles[art].article_id.clone(),
                user_id: user_ids[u].clone(),
                created_at: articles[art].published_at + Duration::seconds(delay),
                replies,
                sympathies,
                antipathies,
            });
        }
    }

    let truth = GroundTruth {
        media_group: media_ids.iter().cloned().zip(roles.iter().copied()).collect(),
        user_leaning: user_ids.into_iter().zip(leanings).collect(),
    };
    let corpus = Corpus::from_records(media, articles, comments)?;
    Ok((corpus, truth))
}

#[inline]
fn unit(rng: &mut ChaCha8Rng) -> f64 {
    rng.random::<f64>()
}

fn uniform_index(rng: &mut ChaCha8Rng, n: usize) -> usize {
    ((unit(rng) * n as f64) as usize).min(n - 1)
}

fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    let u1 = 1.0 - unit(rng);
    let u2 = unit(rng);
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

fn draw_leaning(rng: &mut ChaCha8Rng, c: &SynthConfig) -> f64 {
    let pick_a = unit(rng) < c.leaning_weight_a;
    let z = standard_normal(rng);
    let (center, width) = if pick_a {
        (c.leaning_center_a, c.leaning_width_a)
    } else {
        (c.leaning_center_b, c.leaning_width_b)
    };
    (center + width * z).clamp(-1.0, 1.0)
}

/// Inverse CDF of the truncated continuous power law, floored to an integer.
pub(crate) fn power_law(u: f64, c: &SynthConfig) -> f64 {
    let lo = c.comments_min as f64;
    let hi = c.comments_max as f64 + 1.0;
    let a = c.comments_exponent;
    let k = if (a - 1.0).abs() < 1e-12 {
        lo * (hi / lo).powf(u)
    } else {
        let e = 1.0 - a;
        (lo.powf(e) + u * (hi.powf(e) - lo.powf(e))).powf(1.0 / e)
    };
    k.floor().clamp(lo, c.comments_max as f64)
}

/// Poisson draw by sequential inversion of the CDF.
pub(crate) fn poisson(u: f64, rate: f64) -> u32 {
    if rate <= 0.0 {
        return 0;
    }
    let mut p = (-rate).exp();
    let mut cdf = p;
    let mut k = 0u32;
    while u > cdf {
        k += 1;
        p *= rate / k as f64;
        cdf += p;
        if p == 0.0 && k as f64 > rate {
            break;
        }
    }
    k
}
