use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::PipelineError;
use crate::features::{DEFAULT_EMBEDDING_DIM, DEFAULT_TOKEN_LIMIT};
use crate::label::DatasetLang;
use crate::langid::{DEFAULT_ALPHA, DEFAULT_ORDER, DEFAULT_SCRIPT_THRESHOLD};
use crate::learn::{EnsembleConfig, ModelKind, TrainerConfig};
use crate::metrics::MetricOptions;
use crate::textprep::NormalizationConfig;

#[derive(Debug, Clone, PartialEq)]
pub enum FeatureMode {
    Tfidf {
        min_df: usize,
    },
    /// Directory holding `train.emb`, `dev.emb` and `test.emb`, each aligned
    /// row-for-row with the matching TSV file.
    Embeddings {
        dir: PathBuf,
        dim: usize,
    },
}

/// Everything that determines a pipeline run.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub dataset_lang: DatasetLang,
    pub normalization: NormalizationConfig,
    pub langid_order: usize,
    pub langid_alpha: f64,
    pub script_threshold: f64,
    /// Directory of `<code>.profile` files; bundled seed profiles when unset.
    pub profile_dir: Option<PathBuf>,
    /// Scheme table path; bundled table when unset.
    pub scheme_path: Option<PathBuf>,
    pub features: FeatureMode,
    pub token_limit: usize,
    pub trainer: TrainerConfig,
    pub ensemble: EnsembleConfig,
    pub metrics: MetricOptions,
    pub test_labeled: bool,
}

impl PipelineConfig {
    pub fn new(dataset_lang: DatasetLang) -> Self {
        Self {
            dataset_lang,
            normalization: NormalizationConfig::default(),
            langid_order: DEFAULT_ORDER,
            langid_alpha: DEFAULT_ALPHA,
            script_threshold: DEFAULT_SCRIPT_THRESHOLD,
            profile_dir: None,
            scheme_path: None,
            features: FeatureMode::Tfidf { min_df: 1 },
            token_limit: DEFAULT_TOKEN_LIMIT,
            trainer: TrainerConfig::default_for(ModelKind::LogReg),
            ensemble: EnsembleConfig::default(),
            metrics: MetricOptions::default(),
            test_labeled: false,
        }
    }

    /// Transliteration runs only for Tamil and Malayalam.
    pub fn transliterates(&self) -> bool {
        self.dataset_lang.is_indic()
    }

    /// Canonical `key=value` form; every key is written.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (k, v) in self.to_pairs() {
            let _ = writeln!(out, "{k}={v}");
        }
        out
    }

    pub fn to_pairs(&self) -> Vec<(String, String)> {
        let mut p: Vec<(String, String)> = Vec::new();
        let mut put = |k: &str, v: String| p.push((k.to_string(), v));
        put("lang", self.dataset_lang.code().into());
        let n = &self.normalization;
        put("normalize.strip_specials", n.strip_specials.to_string());
        put("normalize.strip_emoji", n.strip_emoji.to_string());
        put("normalize.lowercase", n.lowercase.to_string());
        put("normalize.collapse_whitespace", n.collapse_whitespace.to_string());
        put("langid.order", self.langid_order.to_string());
        put("langid.alpha", self.langid_alpha.to_string());
        put("langid.script_threshold", self.script_threshold.to_string());
        put("langid.profiles", path_or_builtin(&self.profile_dir));
        put("translit.scheme", path_or_builtin(&self.scheme_path));
        match &self.features {
            FeatureMode::Tfidf { min_df } => {
                put("features.mode", "tfidf".into());
                put("features.min_df", min_df.to_string());
            }
            FeatureMode::Embeddings { dir, dim } => {
                put("features.mode", "embeddings".into());
                put("features.embeddings", dir.display().to_string());
                put("features.embedding_dim", dim.to_string());
            }
        }
        put("features.token_limit", self.token_limit.to_string());
        put("classifier", self.trainer.kind().to_string());
        for (k, v) in self.trainer.to_pairs() {
            put(&k, v);
        }
        put("ensemble.k", self.ensemble.k.to_string());
        put("ensemble.base_seed", self.ensemble.base_seed.to_string());
        put("ensemble.fraction_train", self.ensemble.fraction_train.to_string());
        put("ensemble.tie_break", self.ensemble.tie_break.to_string());
        put("metrics.include_zero_support", self.metrics.include_zero_support.to_string());
        put("test_labeled", self.test_labeled.to_string());
        p
    }

    /// Parses `key=value` lines (`#` comments, blank lines ignored). `lang`
    /// falls back to `default_lang` when absent.
    pub fn parse(text: &str, default_lang: Option<DatasetLang>) -> Result<Self, PipelineError> {
        let mut pairs = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| PipelineError::Config(format!("line {}: expected key=value, got `{line}`", i + 1)))?;
            pairs.insert(k.trim().to_string(), v.trim().to_string());
        }
        Self::from_pairs(&pairs, default_lang)
    }

    pub fn load(path: impl AsRef<Path>, default_lang: Option<DatasetLang>) -> Result<Self, PipelineError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| PipelineError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text, default_lang)
    }

    pub fn from_pairs(
        pairs: &BTreeMap<String, String>,
        default_lang: Option<DatasetLang>,
    ) -> Result<Self, PipelineError> {
        for k in pairs.keys() {
            if !is_known_key(k) {
                return Err(PipelineError::Config(format!("unknown key `{k}`")));
            }
        }
        let lang = match pairs.get("lang") {
            Some(v) => v.parse().map_err(PipelineError::Config)?,
            None => default_lang.ok_or_else(|| PipelineError::Config("`lang` is required".into()))?,
        };
        let mut cfg = Self::new(lang);
        let n = &mut cfg.normalization;
        set(pairs, "normalize.strip_specials", &mut n.strip_specials)?;
        set(pairs, "normalize.strip_emoji", &mut n.strip_emoji)?;
        set(pairs, "normalize.lowercase", &mut n.lowercase)?;
        set(pairs, "normalize.collapse_whitespace", &mut n.collapse_whitespace)?;
        set(pairs, "langid.order", &mut cfg.langid_order)?;
        set(pairs, "langid.alpha", &mut cfg.langid_alpha)?;
        set(pairs, "langid.script_threshold", &mut cfg.script_threshold)?;
        cfg.profile_dir = optional_path(pairs.get("langid.profiles"));
        cfg.scheme_path = optional_path(pairs.get("translit.scheme"));
        set(pairs, "features.token_limit", &mut cfg.token_limit)?;
        cfg.features = match pairs.get("features.mode").map(String::as_str).unwrap_or("tfidf") {
            "tfidf" => {
                let mut min_df = 1;
                set(pairs, "features.min_df", &mut min_df)?;
                FeatureMode::Tfidf { min_df }
            }
            "embeddings" => {
                let dir = pairs.get("features.embeddings").ok_or_else(|| {
                    PipelineError::Config("features.mode=embeddings needs features.embeddings".into())
                })?;
                let mut dim = DEFAULT_EMBEDDING_DIM;
                set(pairs, "features.embedding_dim", &mut dim)?;
                FeatureMode::Embeddings { dir: PathBuf::from(dir), dim }
            }
            other => return Err(PipelineError::Config(format!("unknown features.mode `{other}`"))),
        };
        let kind: ModelKind = match pairs.get("classifier") {
            Some(v) => v.parse().map_err(PipelineError::Config)?,
            None => ModelKind::LogReg,
        };
        cfg.trainer = TrainerConfig::from_pairs(kind, pairs).map_err(|e| PipelineError::Config(e.to_string()))?;
        set(pairs, "ensemble.k", &mut cfg.ensemble.k)?;
        set(pairs, "ensemble.base_seed", &mut cfg.ensemble.base_seed)?;
        set(pairs, "ensemble.fraction_train", &mut cfg.ensemble.fraction_train)?;
        set(pairs, "ensemble.tie_break", &mut cfg.ensemble.tie_break)?;
        set(pairs, "metrics.include_zero_support", &mut cfg.metrics.include_zero_support)?;
        set(pairs, "test_labeled", &mut cfg.test_labeled)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        let bad = |m: &str| Err(PipelineError::Config(m.to_string()));
        if !(1..=3).contains(&self.langid_order) {
            return bad("langid.order must be 1, 2 or 3");
        }
        if self.langid_alpha.is_nan() || self.langid_alpha <= 0.0 {
            return bad("langid.alpha must be positive");
        }
        if !(0.0..=1.0).contains(&self.script_threshold) {
            return bad("langid.script_threshold must lie in [0, 1]");
        }
        if self.ensemble.k == 0 {
            return bad("ensemble.k must be at least 1");
        }
        if !(self.ensemble.fraction_train > 0.0 && self.ensemble.fraction_train < 1.0) {
            return bad("ensemble.fraction_train must lie in (0, 1)");
        }
        if self.token_limit == 0 {
            return bad("features.token_limit must be positive");
        }
        match &self.features {
            FeatureMode::Tfidf { min_df: 0 } => return bad("features.min_df must be at least 1"),
            FeatureMode::Embeddings { dim: 0, .. } => return bad("features.embedding_dim must be positive"),
            _ => {}
        }
        self.trainer.validate().map_err(|e| PipelineError::Config(e.to_string()))
    }
}

const KNOWN_PREFIXES: &[&str] = &["logreg.", "svm.", "forest."];

const KNOWN_KEYS: &[&str] = &[
    "lang",
    "normalize.strip_specials",
    "normalize.strip_emoji",
    "normalize.lowercase",
    "normalize.collapse_whitespace",
    "langid.order",
    "langid.alpha",
    "langid.script_threshold",
    "langid.profiles",
    "translit.scheme",
    "features.mode",
    "features.min_df",
    "features.embeddings",
    "features.embedding_dim",
    "features.token_limit",
    "classifier",
    "ensemble.k",
    "ensemble.base_seed",
    "ensemble.fraction_train",
    "ensemble.tie_break",
    "metrics.include_zero_support",
    "test_labeled",
];

fn is_known_key(k: &str) -> bool {
    KNOWN_KEYS.contains(&k) || KNOWN_PREFIXES.iter().any(|p| k.starts_with(p))
}

fn path_or_builtin(p: &Option<PathBuf>) -> String {
    p.as_ref().map_or_else(|| "builtin".to_string(), |p| p.display().to_string())
}

fn optional_path(v: Option<&String>) -> Option<PathBuf> {
    v.filter(|v| v.as_str() != "builtin" && !v.is_empty()).map(PathBuf::from)
}

fn set<T: std::str::FromStr>(pairs: &BTreeMap<String, String>, key: &str, into: &mut T) -> Result<(), PipelineError> {
    if let Some(v) = pairs.get(key) {
        *into = v.parse().map_err(|_| PipelineError::Config(format!("bad value for {key}: `{v}`")))?;
    }
    Ok(())
}
