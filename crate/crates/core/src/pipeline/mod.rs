//! End-to-end pipeline: preprocessing, language detection, transliteration
//! and hope / not-hope classification, with evaluation and a run manifest.
//!
//! Each comment is normalized and language-checked first. A comment the
//! dataset rule marks as out of language is labeled
//! [`Label::NotLanguage`] and never reaches feature extraction or the
//! classifier. The rest are transliterated (Tamil and Malayalam only),
//! vectorized and labeled by the ensemble.

use std::error::Error as StdError;
use std::fmt;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::corpus::{load_tsv, LabeledComment};
use crate::features::{
    build_vocab, load_embeddings_for_rows, tfidf_vectorize, validate_token_budget, FeatureVector, Vocabulary,
};
use crate::label::{DatasetLang, Label};
use crate::langid::{
    assign_language_class, builtin_profiles, detect, DetectConfig, Lang, LanguageClass, LanguageProfile,
};
use crate::learn::{train_ensemble, Ensemble, TrainedModel};
use crate::metrics::{aggregate, confusion, render_report, EvalReport, ReportFormat};
use crate::textprep::normalize_text;
use crate::translit::{transliterate, SchemeTable};

mod config;
mod manifest;

pub use config::{FeatureMode, PipelineConfig};
pub use manifest::{Manifest, MANIFEST_HEADER};

/// Pipeline step, used to tag errors and to trace each comment's path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Stage {
    Load,
    Preprocess,
    LanguageDetection,
    Transliteration,
    Features,
    Training,
    Classification,
    Evaluation,
    Output,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Stage::Load => "load",
            Stage::Preprocess => "preprocess",
            Stage::LanguageDetection => "language-detection",
            Stage::Transliteration => "transliteration",
            Stage::Features => "features",
            Stage::Training => "training",
            Stage::Classification => "classification",
            Stage::Evaluation => "evaluation",
            Stage::Output => "output",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("config: {0}")]
    Config(String),
    #[error("{stage}: {source}")]
    Stage {
        stage: Stage,
        #[source]
        source: Box<dyn StdError + Send + Sync>,
    },
    #[error("manifest: {0}")]
    Manifest(String),
}

impl PipelineError {
    pub fn at<E: StdError + Send + Sync + 'static>(stage: Stage) -> impl FnOnce(E) -> PipelineError {
        move |e| PipelineError::Stage { stage, source: Box::new(e) }
    }

    pub fn stage(&self) -> Option<Stage> {
        match self {
            PipelineError::Stage { stage, .. } => Some(*stage),
            _ => None,
        }
    }

    /// Process exit code: 3 for configuration problems, 2 for input problems.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Config(_) => 3,
            _ => 2,
        }
    }
}

fn io_error(stage: Stage, path: &Path, e: std::io::Error) -> PipelineError {
    PipelineError::Stage { stage, source: format!("{}: {e}", path.display()).into() }
}

/// Result of pushing one comment through the pipeline.
#[derive(Debug, Clone, PartialEq)]
pub struct CommentOutcome {
    pub label: Label,
    /// Detector decision; `None` when normalization left no text.
    pub detected: Option<Lang>,
    /// Stages the comment passed through, in order.
    pub trace: Vec<Stage>,
}

/// Language resources derived from the configuration.
#[derive(Debug, Clone)]
pub struct LanguageTools {
    pub profiles: Vec<LanguageProfile>,
    pub scheme: Option<SchemeTable>,
}

impl LanguageTools {
    pub fn from_config(cfg: &PipelineConfig) -> Result<Self, PipelineError> {
        let profiles = match &cfg.profile_dir {
            None => builtin_profiles(cfg.langid_order, cfg.langid_alpha)
                .map_err(PipelineError::at(Stage::LanguageDetection))?,
            Some(dir) => Lang::ALL
                .into_iter()
                .map(|l| LanguageProfile::load(dir.join(format!("{}.profile", l.code()))))
                .collect::<Result<_, _>>()
                .map_err(PipelineError::at(Stage::LanguageDetection))?,
        };
        let scheme = if cfg.transliterates() {
            Some(
                match &cfg.scheme_path {
                    None => SchemeTable::builtin(cfg.dataset_lang),
                    Some(p) => SchemeTable::load(cfg.dataset_lang, p),
                }
                .map_err(PipelineError::at(Stage::Transliteration))?,
            )
        } else {
            None
        };
        Ok(Self { profiles, scheme })
    }

    /// Normalization followed by transliteration where configured; the text a
    /// classifier sees.
    pub fn prepare(&self, raw: &str, cfg: &PipelineConfig) -> String {
        let norm = normalize_text(raw, &cfg.normalization);
        match &self.scheme {
            Some(t) => transliterate(&norm, t),
            None => norm,
        }
    }
}

/// Trained classifier plus everything needed to label new comments.
#[derive(Debug, Clone)]
pub struct Predictor {
    pub config: PipelineConfig,
    pub tools: LanguageTools,
    pub vocab: Option<Vocabulary>,
    pub ensemble: Ensemble,
}

const PREDICTOR_HEADER: &str = "# hopeedi-predictor v1";

impl Predictor {
    /// Trains the hope / not-hope ensemble on the gold Hope and NotHope rows
    /// of `train`. Gold NotLanguage rows are left out: that class comes from
    /// the language gate.
    pub fn train(
        cfg: &PipelineConfig,
        train: &[LabeledComment],
        train_embeddings: Option<&[FeatureVector]>,
    ) -> Result<Self, PipelineError> {
        cfg.validate()?;
        let tools = LanguageTools::from_config(cfg)?;
        let rows: Vec<&LabeledComment> =
            train.iter().filter(|c| matches!(c.label, Some(Label::Hope | Label::NotHope))).collect();
        let y: Vec<Label> = rows.iter().map(|c| c.label.unwrap()).collect();
        let (vocab, x): (Option<Vocabulary>, Vec<FeatureVector>) = match (&cfg.features, train_embeddings) {
            (FeatureMode::Tfidf { min_df }, _) => {
                let texts: Vec<String> = rows.par_iter().map(|c| tools.prepare(&c.text, cfg)).collect();
                let vocab = build_vocab(&texts, *min_df).map_err(PipelineError::at(Stage::Features))?;
                let x = texts.par_iter().map(|t| tfidf_vectorize(t, &vocab)).collect();
                (Some(vocab), x)
            }
            (FeatureMode::Embeddings { .. }, Some(emb)) => (None, rows.iter().map(|c| emb[c.id].clone()).collect()),
            (FeatureMode::Embeddings { .. }, None) => {
                return Err(PipelineError::Config("embedding mode needs training embeddings".into()))
            }
        };
        let ensemble =
            train_ensemble(&x, &y, &cfg.ensemble, &cfg.trainer).map_err(PipelineError::at(Stage::Training))?;
        Ok(Self { config: cfg.clone(), tools, vocab, ensemble })
    }

    fn classify_one(
        &self,
        row: &LabeledComment,
        embeddings: Option<&[FeatureVector]>,
    ) -> Result<CommentOutcome, PipelineError> {
        let cfg = &self.config;
        let mut trace = vec![Stage::Preprocess];
        let norm = normalize_text(&row.text, &cfg.normalization);
        trace.push(Stage::LanguageDetection);
        let detected = if norm.is_empty() {
            None
        } else {
            let d = detect(&norm, &self.tools.profiles, &DetectConfig { script_threshold: cfg.script_threshold })
                .map_err(PipelineError::at(Stage::LanguageDetection))?;
            if assign_language_class(&d, cfg.dataset_lang) == LanguageClass::NotLanguage {
                return Ok(CommentOutcome { label: Label::NotLanguage, detected: Some(d.best), trace });
            }
            Some(d.best)
        };
        let text = match &self.tools.scheme {
            Some(t) => {
                trace.push(Stage::Transliteration);
                transliterate(&norm, t)
            }
            None => norm,
        };
        trace.push(Stage::Features);
        let x = match (&self.vocab, embeddings) {
            (Some(v), _) => tfidf_vectorize(&text, v),
            (None, Some(e)) => e[row.id].clone(),
            (None, None) => {
                return Err(PipelineError::Stage { stage: Stage::Features, source: "embedding rows missing".into() })
            }
        };
        trace.push(Stage::Classification);
        let label = self.ensemble.predict(&x).map_err(PipelineError::at(Stage::Classification))?;
        Ok(CommentOutcome { label, detected, trace })
    }

    /// Labels `rows` in parallel; output order follows `rows`.
    pub fn predict(
        &self,
        rows: &[LabeledComment],
        embeddings: Option<&[FeatureVector]>,
    ) -> Result<Vec<CommentOutcome>, PipelineError> {
        if let Some(e) = embeddings {
            if let Some(bad) = rows.iter().find(|r| r.id >= e.len()) {
                return Err(PipelineError::Stage {
                    stage: Stage::Features,
                    source: format!("no embedding row for comment {}", bad.id).into(),
                });
            }
        }
        rows.par_iter().map(|r| self.classify_one(r, embeddings)).collect()
    }

    /// Writes the predictor as `predictor.txt`, `vocab.txt` (TF-IDF only) and
    /// one `member_NN.model` per ensemble member.
    pub fn save(&self, dir: impl AsRef<Path>) -> Result<(), PipelineError> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir).map_err(|e| io_error(Stage::Output, dir, e))?;
        for (name, content) in self.files() {
            let p = dir.join(&name);
            std::fs::write(&p, content).map_err(|e| io_error(Stage::Output, &p, e))?;
        }
        Ok(())
    }

    /// File name and content of every file [`Predictor::save`] writes.
    pub fn files(&self) -> Vec<(String, String)> {
        let mut files = Vec::new();
        let mut head = format!("{PREDICTOR_HEADER}\nmembers={}\n", self.ensemble.members.len());
        for (i, f1) in self.ensemble.validation_weighted_f1.iter().enumerate() {
            head.push_str(&format!("member.{i}.validation_weighted_f1={f1}\n"));
        }
        head.push_str("--\n");
        head.push_str(&self.config.to_text());
        files.push(("predictor.txt".to_string(), head));
        if let Some(v) = &self.vocab {
            files.push(("vocab.txt".to_string(), v.to_text()));
        }
        for (i, m) in self.ensemble.members.iter().enumerate() {
            files.push((format!("member_{i:02}.model"), m.to_text()));
        }
        files
    }

    pub fn load(dir: impl AsRef<Path>) -> Result<Self, PipelineError> {
        let dir = dir.as_ref();
        let read = |name: &str| {
            let p = dir.join(name);
            std::fs::read_to_string(&p).map_err(|e| io_error(Stage::Load, &p, e))
        };
        let head = read("predictor.txt")?;
        let bad = |m: &str| PipelineError::Stage { stage: Stage::Load, source: format!("predictor.txt: {m}").into() };
        let (meta, cfg_text) = head.split_once("--\n").ok_or_else(|| bad("missing `--` separator"))?;
        let mut meta_lines = meta.lines();
        if meta_lines.next() != Some(PREDICTOR_HEADER) {
            return Err(bad("missing header"));
        }
        let mut members = None;
        let mut f1s = Vec::new();
        for line in meta_lines {
            if let Some(v) = line.strip_prefix("members=") {
                members = v.parse::<usize>().ok();
            } else if let Some((_, v)) = line.split_once("validation_weighted_f1=") {
                f1s.push(v.parse::<f64>().map_err(|_| bad(line))?);
            }
        }
        let members = members.ok_or_else(|| bad("missing members="))?;
        let config = PipelineConfig::parse(cfg_text, None)?;
        let tools = LanguageTools::from_config(&config)?;
        let vocab = match config.features {
            FeatureMode::Tfidf { .. } => {
                Some(Vocabulary::from_text(&read("vocab.txt")?).map_err(PipelineError::at(Stage::Load))?)
            }
            FeatureMode::Embeddings { .. } => None,
        };
        let models = (0..members)
            .map(|i| {
                TrainedModel::from_text(&read(&format!("member_{i:02}.model"))?).map_err(PipelineError::at(Stage::Load))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let mut ensemble =
            Ensemble::from_members(models, config.ensemble.tie_break).map_err(PipelineError::at(Stage::Load))?;
        if f1s.len() == members {
            ensemble.validation_weighted_f1 = f1s;
        }
        Ok(Self { config, tools, vocab, ensemble })
    }
}

/// Input files of a full run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunInputs {
    pub train: PathBuf,
    pub dev: PathBuf,
    pub test: Option<PathBuf>,
}

/// Predictions (and evaluation, when gold labels exist) for one split.
#[derive(Debug, Clone)]
pub struct SplitResult {
    pub name: &'static str,
    pub rows: Vec<LabeledComment>,
    pub outcomes: Vec<CommentOutcome>,
    pub report: Option<EvalReport<Label>>,
    /// Comments whose normalized text exceeds the token limit.
    pub over_token_limit: usize,
}

impl SplitResult {
    pub fn predictions(&self) -> Vec<Label> {
        self.outcomes.iter().map(|o| o.label).collect()
    }

    pub fn prediction_file(&self, lang: DatasetLang) -> String {
        let mut out = String::new();
        for o in &self.outcomes {
            out.push_str(o.label.file_name(lang));
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub predictor: Predictor,
    pub dev: SplitResult,
    pub test: Option<SplitResult>,
    pub manifest: Manifest,
}

impl RunOutput {
    /// Every output file as `(relative path, content)`, manifest last.
    pub fn files(&self) -> Vec<(String, String)> {
        let mut files = Vec::new();
        let lang = self.predictor.config.dataset_lang;
        for split in std::iter::once(&self.dev).chain(self.test.as_ref()) {
            files.push((format!("{}.predictions.txt", split.name), split.prediction_file(lang)));
            if let Some(r) = &split.report {
                files.push((format!("{}.report.txt", split.name), render_report(r, ReportFormat::Text)));
                files.push((format!("{}.report.tsv", split.name), render_report(r, ReportFormat::Tsv)));
            }
        }
        for (name, content) in self.predictor.files() {
            files.push((format!("models/{name}"), content));
        }
        files.push(("manifest.txt".to_string(), self.manifest.to_text()));
        files
    }

    pub fn write(&self, out_dir: impl AsRef<Path>) -> Result<(), PipelineError> {
        let out_dir = out_dir.as_ref();
        for (name, content) in self.files() {
            let p = out_dir.join(&name);
            if let Some(parent) = p.parent() {
                std::fs::create_dir_all(parent).map_err(|e| io_error(Stage::Output, parent, e))?;
            }
            std::fs::write(&p, content).map_err(|e| io_error(Stage::Output, &p, e))?;
        }
        Ok(())
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn file_digest(path: &Path) -> Result<String, PipelineError> {
    let bytes = std::fs::read(path).map_err(|e| io_error(Stage::Load, path, e))?;
    Ok(sha256_hex(&bytes))
}

fn embeddings_for(
    cfg: &PipelineConfig,
    split: &str,
    n_rows: usize,
) -> Result<Option<(PathBuf, Vec<FeatureVector>)>, PipelineError> {
    match &cfg.features {
        FeatureMode::Tfidf { .. } => Ok(None),
        FeatureMode::Embeddings { dir, dim } => {
            let p = dir.join(format!("{split}.emb"));
            let v = load_embeddings_for_rows(&p, *dim, n_rows).map_err(PipelineError::at(Stage::Features))?;
            Ok(Some((p, v)))
        }
    }
}

fn evaluate_split(
    name: &'static str,
    rows: Vec<LabeledComment>,
    predictor: &Predictor,
    embeddings: Option<&[FeatureVector]>,
) -> Result<SplitResult, PipelineError> {
    let cfg = &predictor.config;
    let outcomes = predictor.predict(&rows, embeddings)?;
    let over_token_limit = rows
        .iter()
        .filter(|r| !validate_token_budget(&normalize_text(&r.text, &cfg.normalization), cfg.token_limit))
        .count();
    if over_token_limit > 0 {
        log::warn!("{name}: {over_token_limit} comment(s) exceed {} tokens", cfg.token_limit);
    }
    let report = if rows.iter().all(|r| r.label.is_some()) {
        let gold: Vec<Label> = rows.iter().map(|r| r.label.unwrap()).collect();
        let pred: Vec<Label> = outcomes.iter().map(|o| o.label).collect();
        let cm = confusion(&gold, &pred, &Label::ALL).map_err(PipelineError::at(Stage::Evaluation))?;
        Some(aggregate(&cm, &cfg.metrics))
    } else {
        None
    };
    Ok(SplitResult { name, rows, outcomes, report, over_token_limit })
}

/// Trains on `inputs.train`, labels dev (and test, when given) and builds the
/// manifest. Nothing is written; see [`RunOutput::write`].
pub fn run_pipeline(cfg: &PipelineConfig, inputs: &RunInputs) -> Result<RunOutput, PipelineError> {
    cfg.validate()?;
    let lang = cfg.dataset_lang;
    let train = load_tsv(&inputs.train, lang, true).map_err(PipelineError::at(Stage::Load))?;
    let dev = load_tsv(&inputs.dev, lang, true).map_err(PipelineError::at(Stage::Load))?;
    let test = match &inputs.test {
        Some(p) => Some(load_tsv(p, lang, cfg.test_labeled).map_err(PipelineError::at(Stage::Load))?),
        None => None,
    };

    let mut manifest = Manifest::new(cfg.clone(), inputs.clone());
    manifest.record_input("train", &inputs.train, file_digest(&inputs.train)?);
    manifest.record_input("dev", &inputs.dev, file_digest(&inputs.dev)?);
    if let Some(p) = &inputs.test {
        manifest.record_input("test", p, file_digest(p)?);
    }

    let train_emb = embeddings_for(cfg, "train", train.len())?;
    let dev_emb = embeddings_for(cfg, "dev", dev.len())?;
    let test_emb = match &test {
        Some(t) => embeddings_for(cfg, "test", t.len())?,
        None => None,
    };
    for (name, e) in [("train.emb", &train_emb), ("dev.emb", &dev_emb), ("test.emb", &test_emb)] {
        if let Some((p, _)) = e {
            manifest.record_input(name, p, file_digest(p)?);
        }
    }

    let predictor = Predictor::train(cfg, &train, train_emb.as_ref().map(|(_, v)| v.as_slice()))?;
    let dev = evaluate_split("dev", dev, &predictor, dev_emb.as_ref().map(|(_, v)| v.as_slice()))?;
    let test = match test {
        Some(t) => Some(evaluate_split("test", t, &predictor, test_emb.as_ref().map(|(_, v)| v.as_slice()))?),
        None => None,
    };

    manifest.record("prng", crate::rng::PRNG_ID);
    manifest.record("train.rows", train.len());
    manifest.record(
        "train.rows_used",
        train.iter().filter(|c| matches!(c.label, Some(Label::Hope | Label::NotHope))).count(),
    );
    if let Some(v) = &predictor.vocab {
        manifest.record("vocab.size", v.len());
    }
    for (i, (seed, f1)) in
        predictor.ensemble.member_seeds.iter().zip(&predictor.ensemble.validation_weighted_f1).enumerate()
    {
        manifest.record(&format!("member.{i}.split_seed"), seed);
        manifest.record(&format!("member.{i}.validation_weighted_f1"), f1);
    }
    for split in std::iter::once(&dev).chain(test.as_ref()) {
        let name = split.name;
        manifest.record(&format!("{name}.rows"), split.rows.len());
        manifest.record(&format!("{name}.over_token_limit"), split.over_token_limit);
        manifest.record(&format!("{name}.predictions.sha256"), sha256_hex(split.prediction_file(lang).as_bytes()));
        if let Some(r) = &split.report {
            manifest.record(&format!("{name}.weighted_f1"), r.weighted.f1);
            manifest.record(&format!("{name}.macro_f1"), r.macro_avg.f1);
        }
    }
    Ok(RunOutput { predictor, dev, test, manifest })
}
