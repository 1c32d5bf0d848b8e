use std::path::Path;

use log::warn;
use rayon::prelude::*;

use super::model::{TrainedModel, TrainerConfig};
use super::{LearnError, TieBreak};
use crate::corpus::{split_indices, DEFAULT_FRACTION_TRAIN};
use crate::features::FeatureVector;
use crate::label::Label;
use crate::metrics::{aggregate, confusion, MetricOptions};

/// Most frequent label; ties resolved by `tie`.
pub fn majority_vote(predictions: &[Label], tie: TieBreak) -> Result<Label, LearnError> {
    if predictions.is_empty() {
        return Err(LearnError::EmptyPredictions);
    }
    let mut counts = [0usize; 3];
    for p in predictions {
        counts[p.index()] += 1;
    }
    let max = *counts.iter().max().unwrap();
    let tied: Vec<Label> = Label::ALL.into_iter().filter(|l| counts[l.index()] == max).collect();
    Ok(tie.resolve(&tied))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnsembleConfig {
    pub k: usize,
    pub base_seed: u64,
    pub fraction_train: f64,
    pub tie_break: TieBreak,
}

impl Default for EnsembleConfig {
    fn default() -> Self {
        Self { k: 1, base_seed: 0, fraction_train: DEFAULT_FRACTION_TRAIN, tie_break: TieBreak::default() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    pub members: Vec<TrainedModel>,
    /// Split seed of each member (`base_seed + i`).
    pub member_seeds: Vec<u64>,
    /// Weighted F1 of each member on its own validation partition.
    pub validation_weighted_f1: Vec<f64>,
    pub tie_break: TieBreak,
}

impl Ensemble {
    pub fn from_members(members: Vec<TrainedModel>, tie_break: TieBreak) -> Result<Self, LearnError> {
        if members.is_empty() {
            return Err(LearnError::EmptyEnsemble);
        }
        let member_seeds = members.iter().map(|m| m.train_seed).collect();
        let n = members.len();
        Ok(Self { members, member_seeds, validation_weighted_f1: vec![f64::NAN; n], tie_break })
    }

    pub fn dim(&self) -> usize {
        self.members[0].dim
    }

    /// Labels of all members for `x`; each member resolves its own score ties
    /// with the ensemble's tie-break.
    pub fn member_votes(&self, x: &FeatureVector) -> Result<Vec<Label>, LearnError> {
        self.members.iter().map(|m| m.predict_with(x, self.tie_break).map(|p| p.label)).collect()
    }

    pub fn predict(&self, x: &FeatureVector) -> Result<Label, LearnError> {
        majority_vote(&self.member_votes(x)?, self.tie_break)
    }
}

/// Trains `cfg.k` members. Member `i` is fit on the train partition of a
/// split seeded with `base_seed + i` and scored on the matching validation
/// partition. Members train in parallel; results do not depend on scheduling.
pub fn train_ensemble(
    x: &[FeatureVector],
    y: &[Label],
    cfg: &EnsembleConfig,
    trainer: &TrainerConfig,
) -> Result<Ensemble, LearnError> {
    if cfg.k == 0 {
        return Err(LearnError::EmptyEnsemble);
    }
    if cfg.k.is_multiple_of(2) {
        warn!("ensemble size {} is even; ties resolved by {}", cfg.k, cfg.tie_break);
    }
    if x.len() != y.len() {
        return Err(LearnError::LengthMismatch { features: x.len(), labels: y.len() });
    }
    let trained: Vec<(TrainedModel, f64)> = (0..cfg.k)
        .into_par_iter()
        .map(|i| {
            let seed = cfg.base_seed.wrapping_add(i as u64);
            let plan = split_indices(x.len(), seed, cfg.fraction_train)?;
            let tr = plan.train_ids();
            let va = plan.validation_ids();
            let xs: Vec<FeatureVector> = tr.iter().map(|&j| x[j].clone()).collect();
            let ys: Vec<Label> = tr.iter().map(|&j| y[j]).collect();
            let model = trainer.train(&xs, &ys, seed)?;
            let gold: Vec<Label> = va.iter().map(|&j| y[j]).collect();
            let pred = va
                .iter()
                .map(|&j| model.predict_with(&x[j], cfg.tie_break).map(|p| p.label))
                .collect::<Result<Vec<_>, _>>()?;
            let cm = confusion(&gold, &pred, &Label::ALL).expect("labels drawn from Label::ALL");
            let f1 = aggregate(&cm, &MetricOptions::default()).weighted.f1;
            Ok((model, f1))
        })
        .collect::<Result<_, LearnError>>()?;
    let (members, validation_weighted_f1): (Vec<_>, Vec<_>) = trained.into_iter().unzip();
    Ok(Ensemble {
        member_seeds: (0..cfg.k).map(|i| cfg.base_seed.wrapping_add(i as u64)).collect(),
        members,
        validation_weighted_f1,
        tie_break: cfg.tie_break,
    })
}

/// Parses a prediction file: one label per line, corpus label aliases.
pub fn parse_prediction_file(content: &str, path: &str) -> Result<Vec<Label>, LearnError> {
    content
        .lines()
        .map(|l| l.trim_end_matches('\r'))
        .filter(|l| !l.trim().is_empty())
        .enumerate()
        .map(|(i, l)| {
            Label::from_alias(l).ok_or_else(|| LearnError::UnknownLabel {
                path: path.to_string(),
                line: i + 1,
                label: l.trim().to_string(),
            })
        })
        .collect()
}

/// Reads `k` prediction files into a `k x n_rows` label matrix.
pub fn load_external_predictions<P: AsRef<Path>>(paths: &[P], n_rows: usize) -> Result<Vec<Vec<Label>>, LearnError> {
    paths
        .iter()
        .map(|p| {
            let p = p.as_ref();
            let name = p.display().to_string();
            let content = std::fs::read_to_string(p).map_err(|source| LearnError::Io { path: name.clone(), source })?;
            let labels = parse_prediction_file(&content, &name)?;
            if labels.len() != n_rows {
                return Err(LearnError::RowCountMismatch { path: name, expected: n_rows, found: labels.len() });
            }
            Ok(labels)
        })
        .collect()
}

/// Column-wise majority vote over a `k x n` label matrix.
pub fn vote_rows(matrix: &[Vec<Label>], tie: TieBreak) -> Result<Vec<Label>, LearnError> {
    let n = matrix.first().ok_or(LearnError::EmptyPredictions)?.len();
    (0..n)
        .map(|row| {
            let votes: Vec<Label> = matrix.iter().map(|m| m[row]).collect();
            majority_vote(&votes, tie)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learn::{ForestConfig, LogRegConfig};
    use crate::rng::SeededRng;
    use Label::*;

    #[test]
    fn eleven_votes_six_five() {
        let mut v = vec![Hope; 6];
        v.extend([NotHope; 5]);
        assert_eq!(majority_vote(&v, TieBreak::MajorityClassPrior).unwrap(), Hope);
    }

    #[test]
    fn singleton_and_empty() {
        assert_eq!(majority_vote(&[Hope], TieBreak::ClassOrder).unwrap(), Hope);
        assert!(matches!(majority_vote(&[], TieBreak::ClassOrder), Err(LearnError::EmptyPredictions)));
    }

    #[test]
    fn even_split_uses_prior() {
        let v = [Hope, NotHope, Hope, NotHope];
        assert_eq!(majority_vote(&v, TieBreak::MajorityClassPrior).unwrap(), NotHope);
        assert_eq!(majority_vote(&v, TieBreak::ClassOrder).unwrap(), Hope);
    }

    fn data(n: usize) -> (Vec<FeatureVector>, Vec<Label>) {
        let mut r = SeededRng::new(8);
        (0..n)
            .map(|i| {
                let l = if i % 3 == 0 { Hope } else { NotHope };
                let s = if l == Hope { 1.0 } else { -1.0 };
                (FeatureVector::Dense(vec![s + r.next_f64() - 0.5, r.next_f64()]), l)
            })
            .unzip()
    }

    #[test]
    fn seven_members_distinct_seeds() {
        let (x, y) = data(60);
        let cfg = EnsembleConfig { k: 7, base_seed: 100, ..Default::default() };
        let e = train_ensemble(&x, &y, &cfg, &TrainerConfig::LogReg(LogRegConfig::default())).unwrap();
        assert_eq!(e.members.len(), 7);
        assert_eq!(e.member_seeds, (100..107).collect::<Vec<_>>());
        assert!(e.validation_weighted_f1.iter().all(|f| (0.0..=1.0).contains(f)));
    }

    #[test]
    fn single_member_matches_member() {
        let (x, y) = data(40);
        let cfg = EnsembleConfig { k: 1, ..Default::default() };
        let e = train_ensemble(
            &x,
            &y,
            &cfg,
            &TrainerConfig::RandomForest(ForestConfig { n_trees: 5, ..Default::default() }),
        )
        .unwrap();
        for xi in &x {
            let single = e.members[0].predict_with(xi, cfg.tie_break).unwrap().label;
            assert_eq!(e.predict(xi).unwrap(), single);
        }
    }

    #[test]
    fn ensemble_training_is_deterministic() {
        let (x, y) = data(50);
        let cfg = EnsembleConfig { k: 3, base_seed: 5, ..Default::default() };
        let t = TrainerConfig::RandomForest(ForestConfig { n_trees: 3, ..Default::default() });
        let a = train_ensemble(&x, &y, &cfg, &t).unwrap();
        let b = train_ensemble(&x, &y, &cfg, &t).unwrap();
        for xi in &x {
            assert_eq!(a.member_votes(xi).unwrap(), b.member_votes(xi).unwrap());
        }
    }

    #[test]
    fn identical_members_vote_like_one() {
        let (x, y) = data(30);
        let m = TrainerConfig::LogReg(LogRegConfig::default()).train(&x, &y, 0).unwrap();
        let e = Ensemble::from_members(vec![m.clone(); 4], TieBreak::MajorityClassPrior).unwrap();
        for xi in &x {
            assert_eq!(e.predict(xi).unwrap(), m.predict_with(xi, TieBreak::MajorityClassPrior).unwrap().label);
        }
    }

    #[test]
    fn prediction_files() {
        let dir = tempfile::tempdir().unwrap();
        let a = dir.path().join("a.txt");
        let b = dir.path().join("b.txt");
        std::fs::write(&a, "Hope_speech\nNon_hope_speech\nnot-Tamil\n").unwrap();
        std::fs::write(&b, "Hope_speech\nNon_hope_speech\n").unwrap();
        let m = load_external_predictions(&[&a, &a, &a], 3).unwrap();
        assert_eq!(vote_rows(&m, TieBreak::ClassOrder).unwrap(), m[0]);
        assert!(matches!(
            load_external_predictions(&[&a, &b], 3),
            Err(LearnError::RowCountMismatch { expected: 3, found: 2, .. })
        ));
        std::fs::write(&b, "Hope_speech\nperhaps\n").unwrap();
        assert!(matches!(load_external_predictions(&[&b], 2), Err(LearnError::UnknownLabel { line: 2, .. })));
    }
}
