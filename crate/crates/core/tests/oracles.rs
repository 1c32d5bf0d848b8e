//! Library outputs checked against small independent reimplementations.

use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;

use hopeedi::corpus::{split_indices, Partition, SplitPlan};
use hopeedi::features::{build_vocab, tfidf_vectorize, FeatureVector};
use hopeedi::learn::{
    majority_vote, train_random_forest, FeatureFraction, ForestConfig, LogRegConfig, TieBreak, TrainedModel,
    TrainerConfig,
};
use hopeedi::rng::SeededRng;
use hopeedi::Label;

// Reference decision tree --------------------------------------------------

enum RefNode {
    Leaf(Label),
    Split { feature: usize, threshold: f64, left: Box<RefNode>, right: Box<RefNode> },
}

fn gini_weighted(groups: &[&[Label]]) -> f64 {
    let n: usize = groups.iter().map(|g| g.len()).sum();
    groups
        .iter()
        .filter(|g| !g.is_empty())
        .map(|g| {
            let m = g.len() as f64;
            let sq: f64 = Label::ALL.iter().map(|l| (g.iter().filter(|&&x| x == *l).count() as f64 / m).powi(2)).sum();
            m / n as f64 * (1.0 - sq)
        })
        .sum()
}

fn ref_majority(y: &[Label]) -> Label {
    let count = |l: &Label| y.iter().filter(|&&x| x == *l).count();
    // max_by_key keeps the last maximum, so walk the classes in reverse.
    *Label::ALL.iter().rev().max_by_key(|l| count(l)).unwrap()
}

fn ref_grow(x: &[Vec<f64>], y: &[Label], depth: usize, max_depth: usize) -> RefNode {
    let distinct: BTreeSet<Label> = y.iter().copied().collect();
    if distinct.len() <= 1 || depth >= max_depth || y.len() < 2 {
        return RefNode::Leaf(ref_majority(y));
    }
    let mut best_score = gini_weighted(&[y]);
    let mut best: Option<(usize, f64)> = None;
    for f in 0..x[0].len() {
        let mut values: Vec<f64> = x.iter().map(|r| r[f]).collect();
        values.sort_by(f64::total_cmp);
        values.dedup();
        for w in values.windows(2) {
            let t = (w[0] + w[1]) / 2.0;
            let left: Vec<Label> = x.iter().zip(y).filter(|(r, _)| r[f] <= t).map(|(_, &l)| l).collect();
            let right: Vec<Label> = x.iter().zip(y).filter(|(r, _)| r[f] > t).map(|(_, &l)| l).collect();
            let s = gini_weighted(&[&left, &right]);
            if s < best_score - 1e-12 {
                best_score = s;
                best = Some((f, t));
            }
        }
    }
    match best {
        None => RefNode::Leaf(ref_majority(y)),
        Some((feature, threshold)) => {
            let (mut lx, mut ly, mut rx, mut ry) = (vec![], vec![], vec![], vec![]);
            for (r, &l) in x.iter().zip(y) {
                if r[feature] <= threshold {
                    lx.push(r.clone());
                    ly.push(l);
                } else {
                    rx.push(r.clone());
                    ry.push(l);
                }
            }
            RefNode::Split {
                feature,
                threshold,
                left: Box::new(ref_grow(&lx, &ly, depth + 1, max_depth)),
                right: Box::new(ref_grow(&rx, &ry, depth + 1, max_depth)),
            }
        }
    }
}

fn ref_predict(node: &RefNode, x: &[f64]) -> Label {
    match node {
        RefNode::Leaf(l) => *l,
        RefNode::Split { feature, threshold, left, right } => {
            if x[*feature] <= *threshold {
                ref_predict(left, x)
            } else {
                ref_predict(right, x)
            }
        }
    }
}

#[test]
fn single_tree_matches_brute_force_reference() {
    let mut rng = SeededRng::new(314);
    for trial in 0..200 {
        let classes = 2 + rng.below(2);
        let dim = 1 + rng.below(3);
        let max_depth = 1 + rng.below(6);
        // Coarse integer grid so that equal values and tied splits occur.
        let x: Vec<Vec<f64>> = (0..20).map(|_| (0..dim).map(|_| rng.below(5) as f64).collect()).collect();
        let mut y: Vec<Label> = (0..20).map(|_| Label::ALL[rng.below(classes)]).collect();
        y[0] = Label::Hope;
        y[1] = Label::NotHope;
        let fx: Vec<FeatureVector> = x.iter().map(|r| FeatureVector::Dense(r.clone())).collect();
        let cfg = ForestConfig {
            n_trees: 1,
            max_depth,
            feature_frac: FeatureFraction::Fixed(1.0),
            bootstrap: false,
            same_seed_all_trees: false,
        };
        let model = train_random_forest(&fx, &y, &cfg, trial).unwrap();
        let reference = ref_grow(&x, &y, 0, max_depth);
        for a in 0..5 {
            for b in 0..5 {
                for c in 0..5 {
                    let probe: Vec<f64> = [a, b, c][..dim].iter().map(|&v| v as f64 - 0.5 + (v % 2) as f64).collect();
                    let got = model.predict(&FeatureVector::Dense(probe.clone())).unwrap().label;
                    assert_eq!(got, ref_predict(&reference, &probe), "trial {trial}, probe {probe:?}");
                }
            }
        }
        for r in &x {
            let got = model.predict(&FeatureVector::Dense(r.clone())).unwrap().label;
            assert_eq!(got, ref_predict(&reference, r), "trial {trial}, training row {r:?}");
        }
    }
}

// TF-IDF ---------------------------------------------------------------------

#[test]
fn tfidf_matches_reference_formula() {
    let words = ["anbu", "nanri", "hope", "vaazhga", "semma", "mass", "kaadhal", "amma"];
    let mut rng = SeededRng::new(27);
    for _ in 0..100 {
        let docs: Vec<String> = (0..1 + rng.below(8))
            .map(|_| (0..1 + rng.below(6)).map(|_| words[rng.below(words.len())]).collect::<Vec<_>>().join(" "))
            .collect();
        let vocab = build_vocab(&docs, 1).unwrap();
        let n = docs.len() as f64;
        for doc in &docs {
            let toks: Vec<&str> = doc.split(' ').collect();
            let mut raw: BTreeMap<&str, f64> = BTreeMap::new();
            for t in &toks {
                let df = docs.iter().filter(|d| d.split(' ').any(|w| w == *t)).count() as f64;
                raw.insert(t, toks.iter().filter(|w| *w == t).count() as f64 * ((1.0 + n) / (1.0 + df)).ln());
            }
            let norm = raw.values().map(|v| v * v).sum::<f64>().sqrt();
            let got = tfidf_vectorize(doc, &vocab);
            for (t, v) in &raw {
                let want = if norm > 0.0 { v / norm } else { 0.0 };
                let i = vocab.index(t).unwrap();
                assert!((got.get(i) - want).abs() < 1e-12, "{doc:?} term {t}: {} vs {want}", got.get(i));
            }
            assert!(got.norm() == 0.0 || (got.norm() - 1.0).abs() < 1e-12);
        }
    }
}

// Properties -----------------------------------------------------------------

fn label() -> impl Strategy<Value = Label> {
    prop_oneof![Just(Label::Hope), Just(Label::NotHope), Just(Label::NotLanguage)]
}

proptest! {
    #[test]
    fn split_partitions_are_exhaustive_and_disjoint(n in 2usize..400, seed: u64, frac in 0.01f64..0.99) {
        let plan = split_indices(n, seed, frac).unwrap();
        let train: BTreeSet<usize> = plan.ids(Partition::Train).into_iter().collect();
        let val: BTreeSet<usize> = plan.ids(Partition::Validation).into_iter().collect();
        prop_assert!(train.is_disjoint(&val));
        prop_assert_eq!(train.len() + val.len(), n);
        prop_assert!(train.union(&val).copied().eq(0..n));
        prop_assert!(!train.is_empty() && !val.is_empty());
        let want_train = ((frac * n as f64).ceil() as usize).clamp(1, n - 1);
        prop_assert_eq!(train.len(), want_train);
        let again = split_indices(n, seed, frac).unwrap();
        prop_assert_eq!(plan.to_text(), again.to_text());
        prop_assert_eq!(SplitPlan::from_text(&plan.to_text()).unwrap(), plan);
    }

    #[test]
    fn majority_vote_is_the_mode(votes in prop::collection::vec(label(), 1..16), prior: bool) {
        let tie = if prior { TieBreak::MajorityClassPrior } else { TieBreak::ClassOrder };
        let got = majority_vote(&votes, tie).unwrap();
        let count = |l: Label| votes.iter().filter(|&&v| v == l).count();
        let top = Label::ALL.iter().map(|&l| count(l)).max().unwrap();
        prop_assert_eq!(count(got), top);
        let tied: Vec<Label> = Label::ALL.into_iter().filter(|&l| count(l) == top).collect();
        if tied.len() > 1 {
            let want = if prior && tied.contains(&Label::NotHope) { Label::NotHope } else { tied[0] };
            prop_assert_eq!(got, want);
        }
        // Order of votes never matters.
        let mut rev = votes.clone();
        rev.reverse();
        prop_assert_eq!(majority_vote(&rev, tie).unwrap(), got);
    }

    #[test]
    fn model_files_round_trip(seed in 0u64..1000, kind in 0usize..3) {
        let mut rng = SeededRng::new(seed);
        let x: Vec<FeatureVector> = (0..12)
            .map(|_| {
                let pairs: Vec<(usize, f64)> = (0..6).map(|i| (i, rng.next_f64())).filter(|&(_, v)| v < 0.5).collect();
                FeatureVector::sparse(6, pairs)
            })
            .collect();
        let y: Vec<Label> = (0..12).map(|i| Label::ALL[i % 3]).collect();
        let trainer = match kind {
            0 => TrainerConfig::LogReg(LogRegConfig { epochs: 20, ..Default::default() }),
            1 => TrainerConfig::LinearSvm(Default::default()),
            _ => TrainerConfig::RandomForest(ForestConfig { n_trees: 3, ..Default::default() }),
        };
        let model = trainer.train(&x, &y, seed).unwrap();
        let back = TrainedModel::from_text(&model.to_text()).unwrap();
        prop_assert_eq!(&back, &model);
        for xi in &x {
            prop_assert_eq!(back.predict(xi).unwrap(), model.predict(xi).unwrap());
        }
    }
}
