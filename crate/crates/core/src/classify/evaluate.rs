use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::features::FeatureVector;
use super::folds::FoldPlan;
use super::model::{majority_baseline, train_knn, train_logistic, train_mlp, ModelKind, TrainedModel};
use super::ClassifyConfig;
use crate::corpus::ArticleIx;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub article: ArticleIx,
    pub label: u8,
    pub probability: f64,
    pub predicted: u8,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub accuracy: f64,
    pub true_positive: u64,
    pub false_positive: u64,
    pub true_negative: u64,
    pub false_negative: u64,
    pub predictions: Vec<Prediction>,
}

/// Accuracy and confusion counts with the 0.5 threshold (p > 0.5 → 1).
pub fn evaluate(model: &TrainedModel, test: &[FeatureVector]) -> Result<Evaluation> {
    if test.is_empty() {
        return Err(Error::EmptyInput("test split"));
    }
    let predictions: Vec<Prediction> = test
        .iter()
        .map(|f| {
            let p = model.predict_proba(&f.values);
            Prediction {
                article: f.article,
                label: f.label,
                probability: p,
                predicted: u8::from(p > 0.5),
            }
        })
        .collect();
    Ok(evaluation_from(predictions))
}

pub fn evaluation_from(predictions: Vec<Prediction>) -> Evaluation {
    let count = |label: u8, predicted: u8| {
        predictions
            .iter()
            .filter(|p| p.label == label && p.predicted == predicted)
            .count() as u64
    };
    let (tp, fp, tn, fn_) = (count(1, 1), count(0, 1), count(0, 0), count(1, 0));
    Evaluation {
        accuracy: (tp + tn) as f64 / predictions.len().max(1) as f64,
        true_positive: tp,
        false_positive: fp,
        true_negative: tn,
        false_negative: fn_,
        predictions,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldOutcome {
    pub fold: usize,
    pub model: ModelKind,
    pub evaluation: Evaluation,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub model: ModelKind,
    pub mean_accuracy: f64,
    pub min_accuracy: f64,
    pub max_accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvReport {
    pub outcomes: Vec<FoldOutcome>,
    pub comparison: Vec<ComparisonRow>,
}

impl CvReport {
    pub fn mean_accuracy(&self, model: ModelKind) -> Option<f64> {
        self.comparison
            .iter()
            .find(|r| r.model == model)
            .map(|r| r.mean_accuracy)
    }
}

/// Per-model mean, min and max accuracy over folds, in [`ModelKind::ALL`]
/// order, summing folds in fold order.
pub fn compare(outcomes: &[FoldOutcome]) -> Vec<ComparisonRow> {
    ModelKind::ALL
        .iter()
        .filter_map(|&model| {
            let accs: Vec<f64> = outcomes
                .iter()
                .filter(|o| o.model == model)
                .map(|o| o.evaluation.accuracy)
                .collect();
            (!accs.is_empty()).then(|| ComparisonRow {
                model,
                mean_accuracy: accs.iter().sum::<f64>() / accs.len() as f64,
                min_accuracy: accs.iter().copied().fold(f64::INFINITY, f64::min),
                max_accuracy: accs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            })
        })
        .collect()
}

/// Trains and tests every model on every fold. Folds run concurrently; each
/// fold's MLP seed is `mlp.seed + fold`, so results do not depend on the
/// thread count.
pub fn cross_validate(
    features: &[FeatureVector],
    plan: &FoldPlan,
    config: &ClassifyConfig,
) -> Result<(CvReport, Vec<Vec<TrainedModel>>)> {
    let lookup = |ids: &[ArticleIx]| -> Result<Vec<FeatureVector>> {
        ids.iter()
            .map(|a| {
                features
                    .binary_search_by_key(a, |f| f.article)
                    .map(|k| features[k].clone())
                    .map_err(|_| Error::InvalidArgument(format!("fold article {} has no features", a.0)))
            })
            .collect()
    };
    if features.windows(2).any(|w| w[0].article >= w[1].article) {
        return Err(Error::InvalidArgument(
            "features must be sorted by article".into(),
        ));
    }

    let per_fold: Vec<(Vec<FoldOutcome>, Vec<TrainedModel>)> = plan
        .folds
        .par_iter()
        .enumerate()
        .map(|(f, fold)| {
            let train = lookup(&fold.train)?;
            let val = lookup(&fold.validation)?;
            let test = lookup(&fold.test)?;
            let mut hyper = config.mlp.clone();
            hyper.seed = hyper.seed.wrapping_add(f as u64);
            let models = vec![
                train_mlp(&train, &val, &hyper)?,
                train_logistic(&train, &config.logistic)?,
                train_knn(&train, config.k_neighbors)?,
                majority_baseline(&train)?,
            ];
            let outcomes = models
                .iter()
                .map(|m| {
                    Ok(FoldOutcome {
                        fold: f,
                        model: m.kind(),
                        evaluation: evaluate(m, &test)?,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok((outcomes, models))
        })
        .collect::<Result<_>>()?;

    let mut outcomes = Vec::new();
    let mut models = Vec::new();
    for (o, m) in per_fold {
        outcomes.extend(o);
        models.push(m);
    }
    let comparison = compare(&outcomes);
    Ok((CvReport { outcomes, comparison }, models))
}
