use std::collections::BTreeMap;
use std::fmt;
use std::fmt::Write as _;
use std::path::Path;

use super::forest::{DecisionTree, FeatureFraction, ForestConfig, Node};
use super::linear::{softmax_in_place, LinearParams, LogRegConfig, SvmConfig};
use super::{argmax_label, LearnError, TieBreak};
use crate::features::FeatureVector;
use crate::label::Label;
use crate::rng::PRNG_ID;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    LogReg,
    LinearSvm,
    RandomForest,
}

impl ModelKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::LogReg => "logreg",
            ModelKind::LinearSvm => "svm",
            ModelKind::RandomForest => "forest",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for ModelKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "logreg" | "lr" => Ok(ModelKind::LogReg),
            "svm" | "linear-svm" => Ok(ModelKind::LinearSvm),
            "forest" | "rf" | "random-forest" => Ok(ModelKind::RandomForest),
            other => Err(format!("unknown classifier `{other}` (expected logreg, svm or forest)")),
        }
    }
}

/// Classifier choice together with its hyperparameters.
#[derive(Debug, Clone, PartialEq)]
pub enum TrainerConfig {
    LogReg(LogRegConfig),
    LinearSvm(SvmConfig),
    RandomForest(ForestConfig),
}

impl TrainerConfig {
    pub fn default_for(kind: ModelKind) -> Self {
        match kind {
            ModelKind::LogReg => TrainerConfig::LogReg(LogRegConfig::default()),
            ModelKind::LinearSvm => TrainerConfig::LinearSvm(SvmConfig::default()),
            ModelKind::RandomForest => TrainerConfig::RandomForest(ForestConfig::default()),
        }
    }

    pub fn kind(&self) -> ModelKind {
        match self {
            TrainerConfig::LogReg(_) => ModelKind::LogReg,
            TrainerConfig::LinearSvm(_) => ModelKind::LinearSvm,
            TrainerConfig::RandomForest(_) => ModelKind::RandomForest,
        }
    }

    pub fn train(&self, x: &[FeatureVector], y: &[Label], seed: u64) -> Result<TrainedModel, LearnError> {
        match self {
            TrainerConfig::LogReg(c) => super::train_logreg(x, y, c, seed),
            TrainerConfig::LinearSvm(c) => super::train_linear_svm(x, y, c, seed),
            TrainerConfig::RandomForest(c) => super::train_random_forest(x, y, c, seed),
        }
    }

    /// Hyperparameters as ordered `key=value` pairs, keys prefixed by the
    /// model kind.
    pub fn to_pairs(&self) -> Vec<(String, String)> {
        let p = |k: &str, v: String| (k.to_string(), v);
        match self {
            TrainerConfig::LogReg(c) => vec![
                p("logreg.lr", c.lr.to_string()),
                p("logreg.epochs", c.epochs.to_string()),
                p("logreg.l2", c.l2.to_string()),
            ],
            TrainerConfig::LinearSvm(c) => {
                vec![p("svm.lr", c.lr.to_string()), p("svm.epochs", c.epochs.to_string()), p("svm.c", c.c.to_string())]
            }
            TrainerConfig::RandomForest(c) => vec![
                p("forest.trees", c.n_trees.to_string()),
                p("forest.max_depth", c.max_depth.to_string()),
                p("forest.feature_frac", c.feature_frac.to_string()),
                p("forest.bootstrap", c.bootstrap.to_string()),
                p("forest.same_seed_all_trees", c.same_seed_all_trees.to_string()),
            ],
        }
    }

    /// Builds the config for `kind` from `key=value` pairs, starting from the
    /// defaults. Keys for other kinds are ignored.
    pub fn from_pairs(kind: ModelKind, pairs: &BTreeMap<String, String>) -> Result<Self, LearnError> {
        fn get<T: std::str::FromStr>(
            pairs: &BTreeMap<String, String>,
            key: &str,
            into: &mut T,
        ) -> Result<(), LearnError> {
            if let Some(v) = pairs.get(key) {
                *into = v.trim().parse().map_err(|_| LearnError::BadConfig(format!("{key}={v}")))?;
            }
            Ok(())
        }
        let mut cfg = Self::default_for(kind);
        match &mut cfg {
            TrainerConfig::LogReg(c) => {
                get(pairs, "logreg.lr", &mut c.lr)?;
                get(pairs, "logreg.epochs", &mut c.epochs)?;
                get(pairs, "logreg.l2", &mut c.l2)?;
            }
            TrainerConfig::LinearSvm(c) => {
                get(pairs, "svm.lr", &mut c.lr)?;
                get(pairs, "svm.epochs", &mut c.epochs)?;
                get(pairs, "svm.c", &mut c.c)?;
            }
            TrainerConfig::RandomForest(c) => {
                get(pairs, "forest.trees", &mut c.n_trees)?;
                get(pairs, "forest.max_depth", &mut c.max_depth)?;
                get::<FeatureFraction>(pairs, "forest.feature_frac", &mut c.feature_frac)?;
                get(pairs, "forest.bootstrap", &mut c.bootstrap)?;
                get(pairs, "forest.same_seed_all_trees", &mut c.same_seed_all_trees)?;
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), LearnError> {
        let bad = |m: &str| Err(LearnError::BadConfig(m.to_string()));
        match self {
            TrainerConfig::LogReg(c) if c.lr.is_nan() || c.lr <= 0.0 || c.l2.is_nan() || c.l2 < 0.0 => {
                bad("logreg needs lr > 0 and l2 >= 0")
            }
            TrainerConfig::LinearSvm(c) if c.lr.is_nan() || c.lr <= 0.0 || c.c.is_nan() || c.c < 0.0 => {
                bad("svm needs lr > 0 and C >= 0")
            }
            TrainerConfig::RandomForest(c) if c.n_trees == 0 || c.max_depth == 0 => {
                bad("forest needs trees >= 1 and max_depth >= 1")
            }
            TrainerConfig::RandomForest(ForestConfig { feature_frac: FeatureFraction::Fixed(f), .. })
                if !(*f > 0.0 && *f <= 1.0) =>
            {
                bad("forest.feature_frac must lie in (0, 1]")
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModelParams {
    Linear(LinearParams),
    Forest(Vec<DecisionTree>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainedModel {
    /// Labels in canonical order; score vectors follow this order.
    pub classes: Vec<Label>,
    pub dim: usize,
    pub train_seed: u64,
    pub config: TrainerConfig,
    pub params: ModelParams,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub label: Label,
    /// Per-class scores: probabilities (LogReg), margins (SVM) or vote
    /// fractions (forest).
    pub scores: BTreeMap<Label, f64>,
}

impl TrainedModel {
    pub fn kind(&self) -> ModelKind {
        self.config.kind()
    }

    /// Raw class scores in `self.classes` order.
    pub fn scores(&self, x: &FeatureVector) -> Result<Vec<f64>, LearnError> {
        if x.dim() != self.dim {
            return Err(LearnError::DimMismatch { expected: self.dim, found: x.dim() });
        }
        Ok(match &self.params {
            ModelParams::Linear(p) => {
                let mut s = p.margins(x);
                if self.kind() == ModelKind::LogReg {
                    softmax_in_place(&mut s);
                }
                s
            }
            ModelParams::Forest(trees) => {
                let mut votes = vec![0.0; self.classes.len()];
                for t in trees {
                    let label = t.predict(x);
                    let idx = self.classes.iter().position(|&c| c == label).expect("leaf label in classes");
                    votes[idx] += 1.0;
                }
                let n = trees.len() as f64;
                votes.iter_mut().for_each(|v| *v /= n);
                votes
            }
        })
    }

    /// Argmax prediction with ties broken by class order.
    pub fn predict(&self, x: &FeatureVector) -> Result<Prediction, LearnError> {
        self.predict_with(x, TieBreak::ClassOrder)
    }

    pub fn predict_with(&self, x: &FeatureVector, tie: TieBreak) -> Result<Prediction, LearnError> {
        let s = self.scores(x)?;
        let label = argmax_label(&self.classes, &s, tie);
        Ok(Prediction { label, scores: self.classes.iter().copied().zip(s).collect() })
    }

    pub fn to_text(&self) -> String {
        let mut out = String::from("# hopeedi-model v1\n");
        let _ = writeln!(out, "kind={}", self.kind());
        let _ = writeln!(out, "dim={}", self.dim);
        let classes: Vec<&str> = self.classes.iter().map(|c| c.short_name()).collect();
        let _ = writeln!(out, "classes={}", classes.join(","));
        let _ = writeln!(out, "train_seed={}", self.train_seed);
        let _ = writeln!(out, "prng={PRNG_ID}");
        for (k, v) in self.config.to_pairs() {
            let _ = writeln!(out, "{k}={v}");
        }
        out.push_str("--\n");
        match &self.params {
            ModelParams::Linear(p) => {
                let _ = writeln!(out, "bias {}", join_floats(&p.bias));
                for row in &p.weights {
                    let _ = writeln!(out, "w {}", join_floats(row));
                }
            }
            ModelParams::Forest(trees) => {
                for t in trees {
                    let _ = writeln!(out, "tree {} {}", t.max_depth, t.nodes.len());
                    for n in &t.nodes {
                        match n {
                            Node::Split { feature, threshold, left, right } => {
                                let _ = writeln!(out, "split {feature} {threshold} {left} {right}");
                            }
                            Node::Leaf { label } => {
                                let _ = writeln!(out, "leaf {}", label.short_name());
                            }
                        }
                    }
                }
            }
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, LearnError> {
        let bad = |m: String| LearnError::BadModelFile(m);
        let mut lines = text.lines();
        if lines.next() != Some("# hopeedi-model v1") {
            return Err(bad("missing `# hopeedi-model v1` header".into()));
        }
        let mut header = BTreeMap::new();
        for line in lines.by_ref() {
            if line == "--" {
                break;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| bad(format!("bad header line `{line}`")))?;
            header.insert(k.to_string(), v.to_string());
        }
        let field = |k: &str| header.get(k).cloned().ok_or_else(|| bad(format!("missing `{k}`")));
        let kind: ModelKind = field("kind")?.parse().map_err(bad)?;
        let dim: usize = field("dim")?.parse().map_err(|_| bad("bad dim".into()))?;
        let train_seed: u64 = field("train_seed")?.parse().map_err(|_| bad("bad train_seed".into()))?;
        let classes =
            field("classes")?.split(',').map(|c| c.parse::<Label>().map_err(bad)).collect::<Result<Vec<_>, _>>()?;
        let config = TrainerConfig::from_pairs(kind, &header)?;
        let params = match kind {
            ModelKind::LogReg | ModelKind::LinearSvm => {
                let mut bias = None;
                let mut weights = Vec::new();
                for line in lines {
                    let (tag, rest) = line.split_once(' ').unwrap_or((line, ""));
                    let vals = parse_floats(rest).map_err(|e| bad(format!("{e} in `{tag}` row")))?;
                    match tag {
                        "bias" => bias = Some(vals),
                        "w" => weights.push(vals),
                        _ => return Err(bad(format!("unexpected row `{tag}`"))),
                    }
                }
                let bias = bias.ok_or_else(|| bad("missing bias row".into()))?;
                if weights.len() != classes.len()
                    || bias.len() != classes.len()
                    || weights.iter().any(|w| w.len() != dim)
                {
                    return Err(bad("weight matrix shape does not match classes x dim".into()));
                }
                ModelParams::Linear(LinearParams { weights, bias })
            }
            ModelKind::RandomForest => {
                let mut trees: Vec<DecisionTree> = Vec::new();
                for line in lines {
                    let parts: Vec<&str> = line.split(' ').collect();
                    let num = |i: usize| -> Result<usize, LearnError> {
                        parts.get(i).and_then(|s| s.parse().ok()).ok_or_else(|| bad(format!("bad row `{line}`")))
                    };
                    match parts[0] {
                        "tree" => trees.push(DecisionTree { nodes: Vec::with_capacity(num(2)?), max_depth: num(1)? }),
                        "split" => {
                            let threshold: f64 = parts
                                .get(2)
                                .and_then(|s| s.parse().ok())
                                .ok_or_else(|| bad(format!("bad row `{line}`")))?;
                            let node = Node::Split { feature: num(1)?, threshold, left: num(3)?, right: num(4)? };
                            trees.last_mut().ok_or_else(|| bad("node before tree".into()))?.nodes.push(node);
                        }
                        "leaf" => {
                            let label: Label = parts.get(1).copied().unwrap_or("").parse().map_err(bad)?;
                            trees
                                .last_mut()
                                .ok_or_else(|| bad("node before tree".into()))?
                                .nodes
                                .push(Node::Leaf { label });
                        }
                        other => return Err(bad(format!("unexpected row `{other}`"))),
                    }
                }
                for t in &trees {
                    t.check(dim, &classes).map_err(bad)?;
                }
                ModelParams::Forest(trees)
            }
        };
        Ok(Self { classes, dim, train_seed, config, params })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), LearnError> {
        let path = path.as_ref();
        std::fs::write(path, self.to_text())
            .map_err(|source| LearnError::Io { path: path.display().to_string(), source })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, LearnError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|source| LearnError::Io { path: path.display().to_string(), source })?;
        Self::from_text(&text)
    }
}

fn join_floats(v: &[f64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

fn parse_floats(s: &str) -> Result<Vec<f64>, String> {
    s.split_whitespace().map(|t| t.parse::<f64>().map_err(|_| format!("bad number `{t}`"))).collect()
}
