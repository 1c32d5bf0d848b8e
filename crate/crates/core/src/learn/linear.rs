//! Linear models: multinomial logistic regression and one-vs-rest linear SVM,
//! both trained by full-batch (sub)gradient descent in the primal.

use super::model::{ModelParams, TrainedModel, TrainerConfig};
use super::{check_training_input, distinct_classes, LearnError};
use crate::features::FeatureVector;
use crate::label::Label;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogRegConfig {
    pub lr: f64,
    pub epochs: usize,
    pub l2: f64,
}

impl Default for LogRegConfig {
    fn default() -> Self {
        Self { lr: 0.1, epochs: 500, l2: 1e-4 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvmConfig {
    pub lr: f64,
    pub epochs: usize,
    /// Weight of the mean hinge loss against the `0.5 * ||w||^2` regularizer.
    pub c: f64,
}

impl Default for SvmConfig {
    fn default() -> Self {
        Self { lr: 0.01, epochs: 500, c: 1.0 }
    }
}

/// One weight row and bias per class.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearParams {
    pub weights: Vec<Vec<f64>>,
    pub bias: Vec<f64>,
}

impl LinearParams {
    pub fn zeros(classes: usize, dim: usize) -> Self {
        Self { weights: vec![vec![0.0; dim]; classes], bias: vec![0.0; classes] }
    }

    pub fn margins(&self, x: &FeatureVector) -> Vec<f64> {
        self.weights.iter().zip(&self.bias).map(|(w, b)| x.dot(w) + b).collect()
    }

    fn axpy(&mut self, scale: f64, other: &LinearParams) {
        for (w, g) in self.weights.iter_mut().zip(&other.weights) {
            for (a, b) in w.iter_mut().zip(g) {
                *a += scale * b;
            }
        }
        for (a, b) in self.bias.iter_mut().zip(&other.bias) {
            *a += scale * b;
        }
    }

    fn sq_norm_weights(&self) -> f64 {
        self.weights.iter().flatten().map(|w| w * w).sum()
    }
}

pub(crate) fn softmax_in_place(s: &mut [f64]) {
    let max = s.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut total = 0.0;
    for v in s.iter_mut() {
        *v = (*v - max).exp();
        total += *v;
    }
    for v in s.iter_mut() {
        *v /= total;
    }
}

fn class_indices(y: &[Label], classes: &[Label]) -> Vec<usize> {
    y.iter().map(|l| classes.iter().position(|c| c == l).expect("label in classes")).collect()
}

/// Mean cross-entropy plus `l2 / 2 * ||W||^2` (bias unregularized).
pub fn logreg_loss(p: &LinearParams, x: &[FeatureVector], y: &[usize], l2: f64) -> f64 {
    let mut ce = 0.0;
    for (xi, &yi) in x.iter().zip(y) {
        let s = p.margins(xi);
        let max = s.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lse = max + s.iter().map(|v| (v - max).exp()).sum::<f64>().ln();
        ce += lse - s[yi];
    }
    ce / x.len() as f64 + 0.5 * l2 * p.sq_norm_weights()
}

pub fn logreg_gradient(p: &LinearParams, x: &[FeatureVector], y: &[usize], l2: f64) -> LinearParams {
    let k = p.bias.len();
    let dim = p.weights.first().map_or(0, Vec::len);
    let mut g = LinearParams::zeros(k, dim);
    let inv_n = 1.0 / x.len() as f64;
    for (xi, &yi) in x.iter().zip(y) {
        let mut prob = p.margins(xi);
        softmax_in_place(&mut prob);
        for (c, pc) in prob.into_iter().enumerate() {
            let err = (pc - if c == yi { 1.0 } else { 0.0 }) * inv_n;
            if err != 0.0 {
                xi.add_scaled_to(&mut g.weights[c], err);
            }
            g.bias[c] += err;
        }
    }
    for (gw, w) in g.weights.iter_mut().zip(&p.weights) {
        for (a, b) in gw.iter_mut().zip(w) {
            *a += l2 * b;
        }
    }
    g
}

/// Softmax regression from zero initial weights. Full-batch descent has no
/// random component; `seed` is recorded in the model only.
pub fn train_logreg(
    x: &[FeatureVector],
    y: &[Label],
    cfg: &LogRegConfig,
    seed: u64,
) -> Result<TrainedModel, LearnError> {
    train_logreg_with_history(x, y, cfg, seed).map(|(m, _)| m)
}

/// As [`train_logreg`], also returning the objective before the first update
/// and after every epoch.
pub fn train_logreg_with_history(
    x: &[FeatureVector],
    y: &[Label],
    cfg: &LogRegConfig,
    seed: u64,
) -> Result<(TrainedModel, Vec<f64>), LearnError> {
    TrainerConfig::LogReg(*cfg).validate()?;
    let dim = check_training_input(x, y, false)?;
    let classes = distinct_classes(y);
    let yi = class_indices(y, &classes);
    let mut p = LinearParams::zeros(classes.len(), dim);
    let mut history = Vec::with_capacity(cfg.epochs + 1);
    history.push(logreg_loss(&p, x, &yi, cfg.l2));
    for _ in 0..cfg.epochs {
        let g = logreg_gradient(&p, x, &yi, cfg.l2);
        p.axpy(-cfg.lr, &g);
        history.push(logreg_loss(&p, x, &yi, cfg.l2));
    }
    let model = TrainedModel {
        classes,
        dim,
        train_seed: seed,
        config: TrainerConfig::LogReg(*cfg),
        params: ModelParams::Linear(p),
    };
    Ok((model, history))
}

/// Sum over one-vs-rest rows of `0.5 * ||w_k||^2 + C * mean hinge`.
pub fn svm_objective(p: &LinearParams, x: &[FeatureVector], y: &[usize], c: f64) -> f64 {
    let n = x.len() as f64;
    let mut hinge = 0.0;
    for (xi, &yi) in x.iter().zip(y) {
        for (k, m) in p.margins(xi).into_iter().enumerate() {
            let t = if k == yi { 1.0 } else { -1.0 };
            hinge += (1.0 - t * m).max(0.0);
        }
    }
    0.5 * p.sq_norm_weights() + c * hinge / n
}

/// Subgradient of [`svm_objective`]; the hinge contributes only where the
/// margin is strictly below 1.
pub fn svm_subgradient(p: &LinearParams, x: &[FeatureVector], y: &[usize], c: f64) -> LinearParams {
    let k = p.bias.len();
    let dim = p.weights.first().map_or(0, Vec::len);
    let mut g = LinearParams { weights: p.weights.clone(), bias: vec![0.0; k] };
    let scale = c / x.len() as f64;
    for (xi, &yi) in x.iter().zip(y) {
        for (cls, m) in p.margins(xi).into_iter().enumerate() {
            let t = if cls == yi { 1.0 } else { -1.0 };
            if t * m < 1.0 {
                xi.add_scaled_to(&mut g.weights[cls], -t * scale);
                g.bias[cls] -= t * scale;
            }
        }
    }
    debug_assert!(g.weights.iter().all(|w| w.len() == dim));
    g
}

/// One-vs-rest linear SVM. With two classes both rows are trained, so the
/// model always carries one row per class.
pub fn train_linear_svm(
    x: &[FeatureVector],
    y: &[Label],
    cfg: &SvmConfig,
    seed: u64,
) -> Result<TrainedModel, LearnError> {
    TrainerConfig::LinearSvm(*cfg).validate()?;
    let dim = check_training_input(x, y, false)?;
    let classes = distinct_classes(y);
    let yi = class_indices(y, &classes);
    let mut p = LinearParams::zeros(classes.len(), dim);
    for _ in 0..cfg.epochs {
        let g = svm_subgradient(&p, x, &yi, cfg.c);
        p.axpy(-cfg.lr, &g);
    }
    Ok(TrainedModel {
        classes,
        dim,
        train_seed: seed,
        config: TrainerConfig::LinearSvm(*cfg),
        params: ModelParams::Linear(p),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learn::TieBreak;
    use crate::rng::SeededRng;

    fn separable() -> (Vec<FeatureVector>, Vec<Label>) {
        let mut x = Vec::new();
        let mut y = Vec::new();
        for _ in 0..10 {
            x.push(FeatureVector::Dense(vec![0.0, 1.0]));
            y.push(Label::Hope);
            x.push(FeatureVector::Dense(vec![1.0, 0.0]));
            y.push(Label::NotHope);
        }
        (x, y)
    }

    fn accuracy(m: &TrainedModel, x: &[FeatureVector], y: &[Label]) -> f64 {
        let ok = x.iter().zip(y).filter(|(xi, yi)| m.predict(xi).unwrap().label == **yi).count();
        ok as f64 / y.len() as f64
    }

    #[test]
    fn logreg_separates_toy_set() {
        let (x, y) = separable();
        let m = train_logreg(&x, &y, &LogRegConfig { lr: 0.1, epochs: 500, l2: 1e-4 }, 0).unwrap();
        assert_eq!(accuracy(&m, &x, &y), 1.0);
    }

    #[test]
    fn svm_separates_toy_set() {
        let (x, y) = separable();
        let m = train_linear_svm(&x, &y, &SvmConfig::default(), 0).unwrap();
        assert_eq!(accuracy(&m, &x, &y), 1.0);
        match &m.params {
            ModelParams::Linear(p) => assert_eq!(p.weights.len(), 2),
            _ => unreachable!(),
        }
    }

    #[test]
    fn zero_features_predict_majority() {
        let x = vec![FeatureVector::Dense(vec![0.0, 0.0]); 7];
        let y = [Label::Hope, Label::NotHope, Label::NotHope, Label::Hope, Label::NotHope, Label::NotHope, Label::Hope];
        let m = train_logreg(&x, &y, &LogRegConfig::default(), 0).unwrap();
        for xi in &x {
            assert_eq!(m.predict(xi).unwrap().label, Label::NotHope);
        }
    }

    #[test]
    fn zero_weight_model_ties_by_class_order() {
        let (x, y) = separable();
        let m = train_logreg(&x, &y, &LogRegConfig { epochs: 0, ..Default::default() }, 0).unwrap();
        let p = m.predict(&x[1]).unwrap();
        assert_eq!(p.label, Label::Hope);
        assert_eq!(p.scores[&Label::Hope], 0.5);
        assert_eq!(p.scores[&Label::NotHope], 0.5);
        assert_eq!(m.predict_with(&x[1], TieBreak::MajorityClassPrior).unwrap().label, Label::NotHope);
    }

    #[test]
    fn svm_without_hinge_weight_shrinks_to_zero() {
        let (x, y) = separable();
        let m = train_linear_svm(&x, &y, &SvmConfig { c: 0.0, epochs: 2000, lr: 0.01 }, 0).unwrap();
        let ModelParams::Linear(p) = &m.params else { unreachable!() };
        assert!(p.weights.iter().flatten().all(|w| w.abs() < 1e-6));
        assert_eq!(m.predict(&x[1]).unwrap().label, Label::Hope);
    }

    #[test]
    fn svm_one_row_per_class_with_three_classes() {
        let mut x = Vec::new();
        let mut y = Vec::new();
        for (i, l) in Label::ALL.iter().enumerate() {
            for _ in 0..4 {
                let mut v = vec![0.0; 3];
                v[i] = 1.0;
                x.push(FeatureVector::Dense(v));
                y.push(*l);
            }
        }
        let m = train_linear_svm(&x, &y, &SvmConfig::default(), 0).unwrap();
        let ModelParams::Linear(p) = &m.params else { unreachable!() };
        assert_eq!(p.weights.len(), 3);
        assert_eq!(p.bias.len(), 3);
        assert_eq!(accuracy(&m, &x, &y), 1.0);
    }

    #[test]
    fn input_errors() {
        let (x, y) = separable();
        assert!(matches!(
            train_logreg(&x[..3], &y[..2], &LogRegConfig::default(), 0),
            Err(LearnError::LengthMismatch { .. })
        ));
        let same = vec![Label::Hope; x.len()];
        assert!(matches!(train_logreg(&x, &same, &LogRegConfig::default(), 0), Err(LearnError::SingleClass(_))));
        let mut bad = x.clone();
        bad[3] = FeatureVector::Dense(vec![1.0]);
        assert!(matches!(train_linear_svm(&bad, &y, &SvmConfig::default(), 0), Err(LearnError::DimMismatch { .. })));
        let m = train_logreg(&x, &y, &LogRegConfig::default(), 0).unwrap();
        assert!(matches!(m.predict(&FeatureVector::Dense(vec![1.0; 3])), Err(LearnError::DimMismatch { .. })));
    }

    #[test]
    fn loss_history_non_increasing_small_lr() {
        let mut r = SeededRng::new(17);
        let x: Vec<FeatureVector> =
            (0..30).map(|_| FeatureVector::Dense((0..4).map(|_| r.next_f64() * 2.0 - 1.0).collect())).collect();
        let y: Vec<Label> = (0..30).map(|i| Label::ALL[i % 3]).collect();
        let (_, h) = train_logreg_with_history(&x, &y, &LogRegConfig { lr: 0.01, epochs: 200, l2: 1e-3 }, 0).unwrap();
        assert!(h.windows(2).all(|w| w[1] <= w[0] + 1e-15));
    }

    #[test]
    fn svm_margins_shift_invariance() {
        let (x, y) = separable();
        let mut m = train_linear_svm(&x, &y, &SvmConfig::default(), 0).unwrap();
        let before: Vec<Label> = x.iter().map(|xi| m.predict(xi).unwrap().label).collect();
        if let ModelParams::Linear(p) = &mut m.params {
            p.bias.iter_mut().for_each(|b| *b += 3.25);
        }
        let after: Vec<Label> = x.iter().map(|xi| m.predict(xi).unwrap().label).collect();
        assert_eq!(before, after);
    }
}
