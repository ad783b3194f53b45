//! Article group prediction from comment-response statistics.

mod evaluate;
mod features;
mod folds;
mod knn;
mod logistic;
mod mlp;
mod model;
mod preprocess;

use serde::{Deserialize, Serialize};

pub use evaluate::{
    compare, cross_validate, evaluate, evaluation_from, ComparisonRow, CvReport, Evaluation, FoldOutcome,
    Prediction,
};
pub use features::{article_features, build_features, comment_rank_cmp, select_articles, FeatureVector};
pub use folds::{make_folds, Fold, FoldPlan, N_FOLDS};
pub use knn::Knn;
pub use logistic::{fit_logistic, Logistic, LogisticHyper};
pub use mlp::{bce_with_logit, fit_mlp, sigmoid, Mlp, MlpHyper};
pub use model::{
    majority_baseline, train_knn, train_logistic, train_mlp, ModelKind, ModelState, TrainedModel,
};
pub use preprocess::Normalizer;

/// Settings for the classification stage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassifyConfig {
    /// Articles need strictly more comments than this.
    pub min_comments: usize,
    /// Comments per feature vector; the vector holds three values each.
    pub top_k: usize,
    pub k_neighbors: usize,
    pub fold_seed: u64,
    pub mlp: MlpHyper,
    pub logistic: LogisticHyper,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        ClassifyConfig {
            min_comments: 200,
            top_k: 100,
            k_neighbors: 15,
            fold_seed: 0,
            mlp: MlpHyper::default(),
            logistic: LogisticHyper::default(),
        }
    }
}
