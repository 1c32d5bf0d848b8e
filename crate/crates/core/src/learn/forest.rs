//! Bagged CART-style decision trees with Gini splits.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use super::model::{ModelParams, TrainedModel, TrainerConfig};
use super::{check_training_input, distinct_classes, LearnError, TieBreak};
use crate::features::FeatureVector;
use crate::label::Label;
use crate::rng::SeededRng;

/// Share of features considered at each node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FeatureFraction {
    /// `sqrt(dim) / dim`, i.e. `ceil(sqrt(dim))` features.
    Sqrt,
    Fixed(f64),
}

impl FeatureFraction {
    pub fn count(self, dim: usize) -> usize {
        let k = match self {
            FeatureFraction::Sqrt => (dim as f64).sqrt().ceil() as usize,
            FeatureFraction::Fixed(f) => (f * dim as f64).ceil() as usize,
        };
        k.clamp(1, dim.max(1))
    }
}

impl fmt::Display for FeatureFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FeatureFraction::Sqrt => f.write_str("sqrt"),
            FeatureFraction::Fixed(x) => write!(f, "{x}"),
        }
    }
}

impl FromStr for FeatureFraction {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "sqrt" => Ok(FeatureFraction::Sqrt),
            other => other.parse().map(FeatureFraction::Fixed).map_err(|_| format!("bad feature fraction `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForestConfig {
    pub n_trees: usize,
    pub max_depth: usize,
    pub feature_frac: FeatureFraction,
    /// Train each tree on a bootstrap resample. Disable to grow every tree on
    /// the full data.
    pub bootstrap: bool,
    /// Seed every tree identically instead of per-tree seeds.
    pub same_seed_all_trees: bool,
}

impl Default for ForestConfig {
    fn default() -> Self {
        Self {
            n_trees: 100,
            max_depth: 16,
            feature_frac: FeatureFraction::Sqrt,
            bootstrap: true,
            same_seed_all_trees: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    /// `x[feature] <= threshold` goes left.
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf {
        label: Label,
    },
}

/// Flat tree; node 0 is the root.
#[derive(Debug, Clone, PartialEq)]
pub struct DecisionTree {
    pub nodes: Vec<Node>,
    pub max_depth: usize,
}

impl DecisionTree {
    pub fn predict(&self, x: &FeatureVector) -> Label {
        let mut i = 0;
        loop {
            match &self.nodes[i] {
                Node::Leaf { label } => return *label,
                Node::Split { feature, threshold, left, right } => {
                    i = if x.get(*feature) <= *threshold { *left } else { *right };
                }
            }
        }
    }

    /// Longest root-to-leaf path, in edges.
    pub fn depth(&self) -> usize {
        fn walk(t: &DecisionTree, i: usize) -> usize {
            match &t.nodes[i] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(t, *left).max(walk(t, *right)),
            }
        }
        walk(self, 0)
    }

    pub fn leaf_count(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, Node::Leaf { .. })).count()
    }

    /// Structural validation for loaded trees.
    pub(crate) fn check(&self, dim: usize, classes: &[Label]) -> Result<(), String> {
        if self.nodes.is_empty() {
            return Err("empty tree".into());
        }
        for (i, n) in self.nodes.iter().enumerate() {
            match n {
                Node::Split { feature, left, right, .. } => {
                    if *feature >= dim
                        || *left <= i
                        || *right <= i
                        || *left >= self.nodes.len()
                        || *right >= self.nodes.len()
                    {
                        return Err(format!("bad split node {i}"));
                    }
                }
                Node::Leaf { label } if !classes.contains(label) => {
                    return Err(format!("leaf label {label} not in classes"))
                }
                Node::Leaf { .. } => {}
            }
        }
        if self.depth() > self.max_depth {
            return Err("tree deeper than max_depth".into());
        }
        Ok(())
    }
}

fn tree_seed(seed: u64, t: usize, cfg: &ForestConfig) -> u64 {
    if cfg.same_seed_all_trees {
        seed
    } else {
        seed ^ (t as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
    }
}

/// Random forest: each tree sees a bootstrap resample of the rows and a fresh
/// random feature subset at every node. A single-class training set yields
/// one-leaf trees.
pub fn train_random_forest(
    x: &[FeatureVector],
    y: &[Label],
    cfg: &ForestConfig,
    seed: u64,
) -> Result<TrainedModel, LearnError> {
    TrainerConfig::RandomForest(*cfg).validate()?;
    let dim = check_training_input(x, y, true)?;
    let classes = distinct_classes(y);
    let yi: Vec<usize> = y.iter().map(|l| classes.iter().position(|c| c == l).unwrap()).collect();
    let trees = (0..cfg.n_trees)
        .into_par_iter()
        .map(|t| {
            let mut rng = SeededRng::new(tree_seed(seed, t, cfg));
            let rows: Vec<usize> =
                if cfg.bootstrap { (0..x.len()).map(|_| rng.below(x.len())).collect() } else { (0..x.len()).collect() };
            let mut b = TreeBuilder {
                x,
                y: &yi,
                classes: &classes,
                max_depth: cfg.max_depth,
                n_features: cfg.feature_frac.count(dim),
                dim,
                rng,
                nodes: Vec::new(),
            };
            b.grow(rows, 0);
            DecisionTree { nodes: b.nodes, max_depth: cfg.max_depth }
        })
        .collect();
    Ok(TrainedModel {
        classes,
        dim,
        train_seed: seed,
        config: TrainerConfig::RandomForest(*cfg),
        params: ModelParams::Forest(trees),
    })
}

struct TreeBuilder<'a> {
    x: &'a [FeatureVector],
    y: &'a [usize],
    classes: &'a [Label],
    max_depth: usize,
    n_features: usize,
    dim: usize,
    rng: SeededRng,
    nodes: Vec<Node>,
}

/// Split quality `sum_c cL^2 / nL + sum_c cR^2 / nR` kept as an exact
/// fraction; larger means lower weighted Gini impurity.
#[derive(Clone, Copy)]
struct Purity {
    num: u128,
    den: u128,
}

impl Purity {
    fn of(left: &[u64], right: &[u64]) -> Self {
        let nl: u64 = left.iter().sum();
        let nr: u64 = right.iter().sum();
        let sl: u128 = left.iter().map(|&c| (c as u128) * (c as u128)).sum();
        let sr: u128 = right.iter().map(|&c| (c as u128) * (c as u128)).sum();
        if nr == 0 {
            return Purity { num: sl, den: nl as u128 };
        }
        Purity { num: sl * nr as u128 + sr * nl as u128, den: nl as u128 * nr as u128 }
    }

    fn better_than(self, other: Purity) -> bool {
        self.num * other.den > other.num * self.den
    }
}

impl TreeBuilder<'_> {
    fn counts(&self, rows: &[usize]) -> Vec<u64> {
        let mut c = vec![0u64; self.classes.len()];
        for &r in rows {
            c[self.y[r]] += 1;
        }
        c
    }

    fn majority(&self, counts: &[u64]) -> Label {
        let max = *counts.iter().max().unwrap();
        let tied: Vec<Label> = counts.iter().zip(self.classes).filter(|(&c, _)| c == max).map(|(_, &l)| l).collect();
        TieBreak::ClassOrder.resolve(&tied)
    }

    fn grow(&mut self, rows: Vec<usize>, depth: usize) -> usize {
        let id = self.nodes.len();
        let counts = self.counts(&rows);
        let leaf = Node::Leaf { label: self.majority(&counts) };
        self.nodes.push(leaf);
        let pure = counts.iter().filter(|&&c| c > 0).count() <= 1;
        if pure || depth >= self.max_depth || rows.len() < 2 {
            return id;
        }
        let features = self.rng.sample_indices(self.dim, self.n_features);
        let Some((feature, threshold)) = self.best_split(&rows, &counts, &features) else {
            return id;
        };
        let (l, r): (Vec<usize>, Vec<usize>) = rows.iter().partition(|&&i| self.x[i].get(feature) <= threshold);
        let left = self.grow(l, depth + 1);
        let right = self.grow(r, depth + 1);
        self.nodes[id] = Node::Split { feature, threshold, left, right };
        id
    }

    /// Best strictly improving split over `features` (ascending), thresholds
    /// at midpoints between consecutive distinct values. Earlier feature and
    /// lower threshold win exact ties.
    fn best_split(&self, rows: &[usize], counts: &[u64], features: &[usize]) -> Option<(usize, f64)> {
        let mut best_purity = Purity::of(counts, &vec![0; counts.len()]);
        let mut best = None;
        let mut vals: Vec<(f64, usize)> = Vec::with_capacity(rows.len());
        for &f in features {
            vals.clear();
            vals.extend(rows.iter().map(|&r| (self.x[r].get(f), self.y[r])));
            vals.sort_by(|a, b| a.0.total_cmp(&b.0));
            let mut left = vec![0u64; counts.len()];
            let mut right = counts.to_vec();
            for i in 0..vals.len() - 1 {
                let (v, c) = vals[i];
                left[c] += 1;
                right[c] -= 1;
                let next = vals[i + 1].0;
                if next == v {
                    continue;
                }
                let p = Purity::of(&left, &right);
                if p.better_than(best_purity) {
                    best_purity = p;
                    best = Some((f, v + (next - v) / 2.0));
                }
            }
        }
        best
    }
}
