//! Per-class precision / recall / F1 with macro and support-weighted
//! averages.
//!
//! 0/0 is defined as 0 for precision, recall and F1.

use std::fmt::{Display, Write as _};

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MetricsError {
    #[error("{gold} gold labels but {pred} predictions")]
    LengthMismatch { gold: usize, pred: usize },
    #[error("nothing to evaluate")]
    Empty,
    #[error("row {row}: label `{label}` is not in the class list")]
    UnknownLabel { row: usize, label: String },
    #[error("count matrix must be {n}x{n}")]
    BadShape { n: usize },
}

/// Rows are gold classes, columns predicted classes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfusionMatrix<C> {
    pub classes: Vec<C>,
    pub counts: Vec<Vec<u64>>,
}

impl<C> ConfusionMatrix<C> {
    pub fn from_counts(classes: Vec<C>, counts: Vec<Vec<u64>>) -> Result<Self, MetricsError> {
        let n = classes.len();
        if counts.len() != n || counts.iter().any(|r| r.len() != n) {
            return Err(MetricsError::BadShape { n });
        }
        Ok(Self { classes, counts })
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    /// Gold count of class `i`.
    pub fn support(&self, i: usize) -> u64 {
        self.counts[i].iter().sum()
    }
}

pub fn confusion<C: PartialEq + Clone + Display>(
    gold: &[C],
    pred: &[C],
    classes: &[C],
) -> Result<ConfusionMatrix<C>, MetricsError> {
    if gold.len() != pred.len() {
        return Err(MetricsError::LengthMismatch { gold: gold.len(), pred: pred.len() });
    }
    if gold.is_empty() {
        return Err(MetricsError::Empty);
    }
    let n = classes.len();
    let mut counts = vec![vec![0u64; n]; n];
    let find = |row: usize, c: &C| {
        classes.iter().position(|k| k == c).ok_or_else(|| MetricsError::UnknownLabel { row, label: c.to_string() })
    };
    for (row, (g, p)) in gold.iter().zip(pred).enumerate() {
        counts[find(row, g)?][find(row, p)?] += 1;
    }
    Ok(ConfusionMatrix { classes: classes.to_vec(), counts })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassScores {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: u64,
}

fn ratio(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

/// F1 = 2PR / (P + R), 0 when P + R = 0.
pub fn f1_score(precision: f64, recall: f64) -> f64 {
    ratio(2.0 * precision * recall, precision + recall)
}

pub fn prf_from_counts(tp: u64, fp: u64, fn_: u64) -> ClassScores {
    let precision = ratio(tp as f64, (tp + fp) as f64);
    let recall = ratio(tp as f64, (tp + fn_) as f64);
    ClassScores { precision, recall, f1: f1_score(precision, recall), support: tp + fn_ }
}

/// Scores for the class at position `index` of `cm.classes`.
pub fn class_prf<C>(cm: &ConfusionMatrix<C>, index: usize) -> ClassScores {
    let tp = cm.counts[index][index];
    let predicted: u64 = cm.counts.iter().map(|r| r[index]).sum();
    prf_from_counts(tp, predicted - tp, cm.support(index) - tp)
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Averages {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricOptions {
    /// Count classes with no gold rows in the macro average.
    pub include_zero_support: bool,
}

impl Default for MetricOptions {
    fn default() -> Self {
        Self { include_zero_support: true }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport<C> {
    pub per_class: Vec<(C, ClassScores)>,
    pub macro_avg: Averages,
    pub weighted: Averages,
    pub total: u64,
}

pub fn aggregate<C: Clone>(cm: &ConfusionMatrix<C>, opts: &MetricOptions) -> EvalReport<C> {
    let per_class: Vec<(C, ClassScores)> =
        cm.classes.iter().enumerate().map(|(i, c)| (c.clone(), class_prf(cm, i))).collect();
    let macro_members: Vec<&ClassScores> =
        per_class.iter().map(|(_, s)| s).filter(|s| opts.include_zero_support || s.support > 0).collect();
    let m = macro_members.len() as f64;
    let macro_avg = Averages {
        precision: ratio(macro_members.iter().map(|s| s.precision).sum(), m),
        recall: ratio(macro_members.iter().map(|s| s.recall).sum(), m),
        f1: ratio(macro_members.iter().map(|s| s.f1).sum(), m),
    };
    let total = cm.total();
    let w =
        |f: fn(&ClassScores) -> f64| ratio(per_class.iter().map(|(_, s)| f(s) * s.support as f64).sum(), total as f64);
    let weighted = Averages { precision: w(|s| s.precision), recall: w(|s| s.recall), f1: w(|s| s.f1) };
    EvalReport { per_class, macro_avg, weighted, total }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Text,
    Tsv,
    Json,
}

impl std::str::FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "text" => Ok(ReportFormat::Text),
            "tsv" => Ok(ReportFormat::Tsv),
            "json" => Ok(ReportFormat::Json),
            other => Err(format!("unknown report format `{other}`")),
        }
    }
}

fn r3(x: f64) -> String {
    format!("{x:.3}")
}

const TSV_HEADER: &str = "macro_precision\tweighted_precision\tmacro_recall\tweighted_recall\tmacro_f1\tweighted_f1";

/// Deterministic rendering with every metric rounded to three decimals. A
/// report without classes renders as its header only.
pub fn render_report<C: Display>(report: &EvalReport<C>, format: ReportFormat) -> String {
    let mut out = String::new();
    let (m, w) = (&report.macro_avg, &report.weighted);
    match format {
        ReportFormat::Text => {
            let _ = writeln!(out, "{:<12}{:>10}{:>10}{:>10}{:>10}", "class", "precision", "recall", "f1", "support");
            if report.per_class.is_empty() {
                return out;
            }
            for (c, s) in &report.per_class {
                let _ = writeln!(
                    out,
                    "{:<12}{:>10}{:>10}{:>10}{:>10}",
                    c.to_string(),
                    r3(s.precision),
                    r3(s.recall),
                    r3(s.f1),
                    s.support
                );
            }
            let _ = writeln!(
                out,
                "{:<12}{:>10}{:>10}{:>10}{:>10}",
                "macro",
                r3(m.precision),
                r3(m.recall),
                r3(m.f1),
                report.total
            );
            let _ = writeln!(
                out,
                "{:<12}{:>10}{:>10}{:>10}{:>10}",
                "weighted",
                r3(w.precision),
                r3(w.recall),
                r3(w.f1),
                report.total
            );
        }
        ReportFormat::Tsv => {
            let _ = writeln!(out, "{TSV_HEADER}");
            if report.per_class.is_empty() {
                return out;
            }
            let cols = [m.precision, w.precision, m.recall, w.recall, m.f1, w.f1];
            let _ = writeln!(out, "{}", cols.iter().map(|&x| r3(x)).collect::<Vec<_>>().join("\t"));
        }
        ReportFormat::Json => {
            out.push_str("{\n  \"per_class\": [");
            for (i, (c, s)) in report.per_class.iter().enumerate() {
                let sep = if i == 0 { "" } else { "," };
                let _ = write!(
                    out,
                    "{sep}\n    {{\"class\": \"{c}\", \"precision\": {}, \"recall\": {}, \"f1\": {}, \"support\": {}}}",
                    r3(s.precision),
                    r3(s.recall),
                    r3(s.f1),
                    s.support
                );
            }
            if report.per_class.is_empty() {
                out.push_str("]\n}\n");
                return out;
            }
            out.push_str("\n  ],\n");
            let _ = writeln!(
                out,
                "  \"macro\": {{\"precision\": {}, \"recall\": {}, \"f1\": {}}},",
                r3(m.precision),
                r3(m.recall),
                r3(m.f1)
            );
            let _ = writeln!(
                out,
                "  \"weighted\": {{\"precision\": {}, \"recall\": {}, \"f1\": {}}},",
                r3(w.precision),
                r3(w.recall),
                r3(w.f1)
            );
            let _ = writeln!(out, "  \"total\": {}\n}}", report.total);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::label::Label;
    use crate::rng::SeededRng;
    use Label::*;

    #[test]
    fn diagonal_and_off_diagonal() {
        let cm = confusion(&[Hope, NotHope], &[Hope, NotHope], &[Hope, NotHope]).unwrap();
        assert_eq!(cm.counts, vec![vec![1, 0], vec![0, 1]]);
        let cm = confusion(&[Hope], &[NotHope], &[Hope, NotHope]).unwrap();
        assert_eq!(cm.counts, vec![vec![0, 1], vec![0, 0]]);
    }

    #[test]
    fn confusion_conserves_rows() {
        let mut r = SeededRng::new(4);
        let gold: Vec<Label> = (0..1000).map(|_| Label::ALL[r.below(3)]).collect();
        let pred: Vec<Label> = (0..1000).map(|_| Label::ALL[r.below(3)]).collect();
        assert_eq!(confusion(&gold, &pred, &Label::ALL).unwrap().total(), 1000);
    }

    #[test]
    fn confusion_errors() {
        assert!(matches!(confusion(&[Hope], &[], &Label::ALL), Err(MetricsError::LengthMismatch { .. })));
        assert!(matches!(confusion::<Label>(&[], &[], &Label::ALL), Err(MetricsError::Empty)));
        assert!(matches!(
            confusion(&[NotLanguage], &[Hope], &[Hope, NotHope]),
            Err(MetricsError::UnknownLabel { row: 0, .. })
        ));
    }

    #[test]
    fn prf_cases() {
        let s = prf_from_counts(4, 0, 0);
        assert_eq!((s.precision, s.recall, s.f1), (1.0, 1.0, 1.0));
        let s = prf_from_counts(0, 0, 5);
        assert_eq!((s.precision, s.recall, s.f1, s.support), (0.0, 0.0, 0.0, 5));
        let s = prf_from_counts(3, 1, 2);
        assert!((s.precision - 0.75).abs() < 1e-15);
        assert!((s.recall - 0.6).abs() < 1e-15);
        assert!((s.f1 - 2.0 * 0.45 / 1.35).abs() < 1e-15);
    }

    #[test]
    fn equal_f1_weighted_equals_that_f1() {
        // Class 0: tp 5 fp 5 fn 5 -> F1 0.5, support 10.
        // Class 1: tp 15 fp 15 fn 15 -> F1 0.5, support 30.
        let cm =
            ConfusionMatrix::from_counts(vec!["a", "b", "x"], vec![vec![5, 0, 5], vec![0, 15, 15], vec![5, 15, 0]])
                .unwrap();
        let r = aggregate(&cm, &MetricOptions::default());
        assert!((r.per_class[0].1.f1 - 0.5).abs() < 1e-15);
        assert!((r.per_class[1].1.f1 - 0.5).abs() < 1e-15);
        assert_eq!(r.per_class[2].1.support, 20);
    }

    #[test]
    fn majority_baseline_english_dev() {
        let cm =
            ConfusionMatrix::from_counts(Label::ALL.to_vec(), vec![vec![0, 242, 0], vec![0, 2569, 0], vec![0, 2, 0]])
                .unwrap();
        let r = aggregate(&cm, &MetricOptions::default());
        let p = 2569.0 / 2813.0;
        let f1 = 2.0 * p / (1.0 + p);
        assert!((r.per_class[1].1.f1 - f1).abs() < 1e-12);
        assert!((r.weighted.f1 - 0.872).abs() < 1e-3);
    }

    #[test]
    fn perfect_single_class() {
        let cm = confusion(&[Hope, Hope], &[Hope, Hope], &[Hope]).unwrap();
        let r = aggregate(&cm, &MetricOptions::default());
        assert_eq!(r.macro_avg.f1, 1.0);
        assert_eq!(r.weighted.f1, 1.0);
    }

    #[test]
    fn zero_support_class_flag() {
        let cm = confusion(&[Hope, NotHope], &[Hope, NotHope], &Label::ALL).unwrap();
        let inc = aggregate(&cm, &MetricOptions { include_zero_support: true });
        let exc = aggregate(&cm, &MetricOptions { include_zero_support: false });
        assert!((inc.macro_avg.f1 - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(exc.macro_avg.f1, 1.0);
        assert_eq!(inc.weighted, exc.weighted);
    }

    #[test]
    fn rendering_rounds_and_is_stable() {
        let cm = confusion(&[Hope, NotHope, NotHope], &[Hope, NotHope, Hope], &Label::ALL).unwrap();
        let mut r = aggregate(&cm, &MetricOptions::default());
        r.weighted.f1 = 0.9234;
        for f in [ReportFormat::Text, ReportFormat::Tsv, ReportFormat::Json] {
            let a = render_report(&r, f);
            assert_eq!(a, render_report(&r, f));
            assert!(a.contains("0.923"));
            assert!(!a.contains("0.9234"));
        }
        let tsv = render_report(&r, ReportFormat::Tsv);
        assert_eq!(tsv.lines().next().unwrap(), TSV_HEADER);
    }

    #[test]
    fn empty_report_renders_header_only() {
        let r: EvalReport<Label> =
            EvalReport { per_class: vec![], macro_avg: Averages::default(), weighted: Averages::default(), total: 0 };
        assert_eq!(render_report(&r, ReportFormat::Tsv), format!("{TSV_HEADER}\n"));
        assert_eq!(render_report(&r, ReportFormat::Text).lines().count(), 1);
        assert!(render_report(&r, ReportFormat::Json).contains("\"per_class\": []"));
    }
}
