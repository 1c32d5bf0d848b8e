//! Classical classifiers and majority-voting ensembles.
//!
//! Three trainers share one [`TrainedModel`] type: multinomial logistic
//! regression ([`train_logreg`]), one-vs-rest linear SVM ([`train_linear_svm`])
//! and a bagged Gini random forest ([`train_random_forest`]). Ensembles train
//! `k` members on differently seeded train/validation splits and merge their
//! labels with [`majority_vote`].

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::features::FeatureVector;
use crate::label::Label;

mod ensemble;
mod forest;
mod linear;
mod model;

pub use ensemble::{
    load_external_predictions, majority_vote, parse_prediction_file, train_ensemble, vote_rows, Ensemble,
    EnsembleConfig,
};
pub use forest::{train_random_forest, DecisionTree, FeatureFraction, ForestConfig, Node};
pub use linear::{
    logreg_gradient, logreg_loss, svm_objective, svm_subgradient, train_linear_svm, train_logreg,
    train_logreg_with_history, LinearParams, LogRegConfig, SvmConfig,
};
pub use model::{ModelKind, ModelParams, Prediction, TrainedModel, TrainerConfig};

#[derive(Debug, Error)]
pub enum LearnError {
    #[error("need at least 2 training rows, got {0}")]
    TooFewRows(usize),
    #[error("{features} feature rows but {labels} labels")]
    LengthMismatch { features: usize, labels: usize },
    #[error("feature dimension {found} does not match expected {expected}")]
    DimMismatch { expected: usize, found: usize },
    #[error("training data has a single class ({0})")]
    SingleClass(Label),
    #[error("cannot vote over zero predictions")]
    EmptyPredictions,
    #[error("ensemble size must be at least 1")]
    EmptyEnsemble,
    #[error("{path}: expected {expected} rows, found {found}")]
    RowCountMismatch { path: String, expected: usize, found: usize },
    #[error("{path} line {line}: unknown label `{label}`")]
    UnknownLabel { path: String, line: usize, label: String },
    #[error("invalid hyperparameter: {0}")]
    BadConfig(String),
    #[error("model file: {0}")]
    BadModelFile(String),
    #[error(transparent)]
    Split(#[from] crate::corpus::CorpusError),
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// How ties between equally supported labels are resolved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TieBreak {
    /// First tied label in canonical class order.
    ClassOrder,
    /// `NotHope` wins any tie it is part of; other ties fall back to class
    /// order.
    #[default]
    MajorityClassPrior,
}

impl TieBreak {
    /// Picks a winner among tied labels, given in ascending canonical order.
    pub fn resolve(self, tied: &[Label]) -> Label {
        match self {
            TieBreak::MajorityClassPrior if tied.contains(&Label::NotHope) => Label::NotHope,
            _ => tied[0],
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            TieBreak::ClassOrder => "class-order",
            TieBreak::MajorityClassPrior => "majority-prior",
        }
    }
}

impl fmt::Display for TieBreak {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TieBreak {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "class-order" => Ok(TieBreak::ClassOrder),
            "majority-prior" | "majority-class-prior" => Ok(TieBreak::MajorityClassPrior),
            other => Err(format!("unknown tie-break `{other}` (expected class-order or majority-prior)")),
        }
    }
}

/// Sorted distinct labels of `y`.
pub(crate) fn distinct_classes(y: &[Label]) -> Vec<Label> {
    let mut c = y.to_vec();
    c.sort_unstable();
    c.dedup();
    c
}

/// Shared input checks. Returns the feature dimension.
pub(crate) fn check_training_input(
    x: &[FeatureVector],
    y: &[Label],
    allow_single_class: bool,
) -> Result<usize, LearnError> {
    if x.len() != y.len() {
        return Err(LearnError::LengthMismatch { features: x.len(), labels: y.len() });
    }
    if x.len() < 2 {
        return Err(LearnError::TooFewRows(x.len()));
    }
    let dim = x[0].dim();
    if let Some(bad) = x.iter().find(|v| v.dim() != dim) {
        return Err(LearnError::DimMismatch { expected: dim, found: bad.dim() });
    }
    if !allow_single_class && distinct_classes(y).len() < 2 {
        return Err(LearnError::SingleClass(y[0]));
    }
    Ok(dim)
}

/// Index of the winning score: labels whose score equals the maximum are
/// tied and resolved by `tie`.
pub(crate) fn argmax_label(classes: &[Label], scores: &[f64], tie: TieBreak) -> Label {
    let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let tied: Vec<Label> = classes.iter().zip(scores).filter(|(_, &s)| s == max).map(|(&c, _)| c).collect();
    if tied.is_empty() {
        // All NaN scores.
        return tie.resolve(classes);
    }
    tie.resolve(&tied)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tie_break_rules() {
        use Label::*;
        assert_eq!(TieBreak::ClassOrder.resolve(&[Hope, NotHope]), Hope);
        assert_eq!(TieBreak::MajorityClassPrior.resolve(&[Hope, NotHope]), NotHope);
        assert_eq!(TieBreak::MajorityClassPrior.resolve(&[Hope, NotLanguage]), Hope);
        assert_eq!("class-order".parse::<TieBreak>().unwrap(), TieBreak::ClassOrder);
        assert!("coin".parse::<TieBreak>().is_err());
    }

    #[test]
    fn argmax_picks_max_then_ties() {
        use Label::*;
        let c = [Hope, NotHope, NotLanguage];
        assert_eq!(argmax_label(&c, &[0.1, 0.7, 0.2], TieBreak::ClassOrder), NotHope);
        assert_eq!(argmax_label(&c, &[0.5, 0.5, 0.0], TieBreak::ClassOrder), Hope);
        assert_eq!(argmax_label(&c, &[0.5, 0.5, 0.0], TieBreak::MajorityClassPrior), NotHope);
    }
}
