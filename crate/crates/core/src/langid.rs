//! Character n-gram language identification and the dataset-specific
//! not-in-language rule.
//!
//! A [`LanguageProfile`] is a smoothed order-`n` character model. [`detect`]
//! scores a normalized comment against every profile by mean log probability
//! per n-gram, after a script shortcut: when enough of the comment's letters
//! sit in one Indic block, that block's language wins without scoring.

use std::collections::BTreeMap;
use std::fmt;
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use thiserror::Error;

use crate::label::DatasetLang;
use crate::textprep::{normalize_text, NormalizationConfig};
use crate::translit::{script_of, Script};

pub const DEFAULT_ORDER: usize = 3;
pub const DEFAULT_ALPHA: f64 = 0.5;
pub const DEFAULT_SCRIPT_THRESHOLD: f64 = 0.5;

#[derive(Debug, Error)]
pub enum LangIdError {
    #[error("cannot train a profile from an empty corpus")]
    EmptyCorpus,
    #[error("n-gram order must be 1..=3, got {0}")]
    BadOrder(usize),
    #[error("smoothing alpha must be positive, got {0}")]
    BadAlpha(f64),
    #[error("no language profiles supplied")]
    NoProfiles,
    #[error("text is empty")]
    EmptyText,
    #[error("unknown language code `{0}`")]
    UnknownLanguage(String),
    #[error("profile file: {0}")]
    BadProfileFile(String),
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Languages the detector distinguishes. Declaration order matches the
/// lexicographic order of the codes, which breaks score ties.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Lang {
    En,
    Hi,
    Ml,
    Ta,
}

impl Lang {
    pub const ALL: [Lang; 4] = [Lang::En, Lang::Hi, Lang::Ml, Lang::Ta];

    pub fn code(self) -> &'static str {
        match self {
            Lang::En => "en",
            Lang::Hi => "hi",
            Lang::Ml => "ml",
            Lang::Ta => "ta",
        }
    }
}

impl fmt::Display for Lang {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for Lang {
    type Err = LangIdError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Lang::ALL.into_iter().find(|l| l.code() == s.trim()).ok_or_else(|| LangIdError::UnknownLanguage(s.to_string()))
    }
}

/// Character n-grams of `text`. For `n > 1` the text is padded with one space
/// on each side so word edges are modeled; a padded text shorter than `n`
/// yields itself as a single gram.
pub fn ngrams(text: &str, n: usize) -> Vec<String> {
    let chars: Vec<char> = if n > 1 {
        std::iter::once(' ').chain(text.chars()).chain(std::iter::once(' ')).collect()
    } else {
        text.chars().collect()
    };
    if chars.is_empty() {
        return Vec::new();
    }
    if chars.len() < n {
        return vec![chars.iter().collect()];
    }
    chars.windows(n).map(|w| w.iter().collect()).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct LanguageProfile {
    pub lang: Lang,
    pub n: usize,
    pub smoothing_alpha: f64,
    /// Log probability of every observed n-gram.
    pub logprob: BTreeMap<String, f64>,
    /// Log probability assigned to an n-gram never seen in training.
    pub unseen_logprob: f64,
}

/// Trains an add-alpha smoothed order-`n` model over the observed n-gram
/// types. Counts are order-free, so any permutation of `corpus` gives the same
/// profile.
pub fn train_profile<S: AsRef<str>>(
    corpus: &[S],
    lang: Lang,
    n: usize,
    alpha: f64,
) -> Result<LanguageProfile, LangIdError> {
    if !(1..=3).contains(&n) {
        return Err(LangIdError::BadOrder(n));
    }
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(LangIdError::BadAlpha(alpha));
    }
    let mut counts: BTreeMap<String, u64> = BTreeMap::new();
    for doc in corpus {
        for g in ngrams(doc.as_ref(), n) {
            *counts.entry(g).or_default() += 1;
        }
    }
    if counts.is_empty() {
        return Err(LangIdError::EmptyCorpus);
    }
    let total: u64 = counts.values().sum();
    let denom = total as f64 + alpha * counts.len() as f64;
    let logprob = counts.into_iter().map(|(g, c)| (g, ((c as f64 + alpha) / denom).ln())).collect();
    Ok(LanguageProfile { lang, n, smoothing_alpha: alpha, logprob, unseen_logprob: (alpha / denom).ln() })
}

impl LanguageProfile {
    fn score(&self, grams: &[String]) -> f64 {
        let sum: f64 = grams.iter().map(|g| self.logprob.get(g).copied().unwrap_or(self.unseen_logprob)).sum();
        sum / grams.len() as f64
    }

    pub fn to_text(&self) -> String {
        let mut out = String::from("# hopeedi-langprofile v1\n");
        let _ = writeln!(out, "lang={}", self.lang);
        let _ = writeln!(out, "n={}", self.n);
        let _ = writeln!(out, "alpha={}", self.smoothing_alpha);
        let _ = writeln!(out, "count={}", self.logprob.len());
        let _ = writeln!(out, "unseen={}", self.unseen_logprob);
        for (g, lp) in &self.logprob {
            let _ = writeln!(out, "{}\t{}", escape(g), lp);
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, LangIdError> {
        let bad = |m: String| LangIdError::BadProfileFile(m);
        let mut lines = text.lines();
        if lines.next() != Some("# hopeedi-langprofile v1") {
            return Err(bad("missing `# hopeedi-langprofile v1` header".into()));
        }
        let mut header = BTreeMap::new();
        for key in ["lang", "n", "alpha", "count", "unseen"] {
            let line = lines.next().ok_or_else(|| bad(format!("missing `{key}=` line")))?;
            let value = line
                .strip_prefix(key)
                .and_then(|r| r.strip_prefix('='))
                .ok_or_else(|| bad(format!("expected `{key}=`, found `{line}`")))?;
            header.insert(key, value);
        }
        let num = |k: &str| -> Result<f64, LangIdError> {
            header[k].parse::<f64>().map_err(|_| bad(format!("bad {k} value `{}`", header[k])))
        };
        let lang: Lang = header["lang"].parse()?;
        let n = header["n"].parse::<usize>().map_err(|_| bad("bad n".into()))?;
        let count = header["count"].parse::<usize>().map_err(|_| bad("bad count".into()))?;
        let mut logprob = BTreeMap::new();
        for line in lines {
            let (g, lp) = line.rsplit_once('\t').ok_or_else(|| bad(format!("bad entry `{line}`")))?;
            let lp = lp.parse::<f64>().map_err(|_| bad(format!("bad log probability `{lp}`")))?;
            logprob.insert(unescape(g), lp);
        }
        if logprob.len() != count {
            return Err(bad(format!("header says {count} entries, found {}", logprob.len())));
        }
        Ok(Self { lang, n, smoothing_alpha: num("alpha")?, logprob, unseen_logprob: num("unseen")? })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), LangIdError> {
        let path = path.as_ref();
        std::fs::write(path, self.to_text())
            .map_err(|source| LangIdError::Io { path: path.display().to_string(), source })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, LangIdError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|source| LangIdError::Io { path: path.display().to_string(), source })?;
        Self::from_text(&text)
    }
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '\t' => out.push_str("\\t"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            _ => out.push(c),
        }
    }
    out
}

fn unescape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut it = s.chars();
    while let Some(c) = it.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match it.next() {
            Some('t') => out.push('\t'),
            Some('n') => out.push('\n'),
            Some('r') => out.push('\r'),
            Some(other) => out.push(other),
            None => out.push('\\'),
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectConfig {
    /// Minimum share of letters in one Indic block for the script shortcut.
    pub script_threshold: f64,
}

impl Default for DetectConfig {
    fn default() -> Self {
        Self { script_threshold: DEFAULT_SCRIPT_THRESHOLD }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectionResult {
    pub best: Lang,
    /// Mean per-n-gram log likelihood under each profile.
    pub scores: BTreeMap<Lang, f64>,
    /// Set when the script shortcut decided `best`; `best` is then not
    /// necessarily the argmax of `scores`.
    pub by_script: Option<Script>,
}

fn script_lang(s: Script) -> Option<Lang> {
    match s {
        Script::Devanagari => Some(Lang::Hi),
        Script::Tamil => Some(Lang::Ta),
        Script::Malayalam => Some(Lang::Ml),
        _ => None,
    }
}

/// Indic script holding at least `threshold` of the letters in `text`, if any.
pub fn dominant_indic_script(text: &str, threshold: f64) -> Option<Script> {
    let mut letters = 0usize;
    let mut per_script = [0usize; 3];
    for c in text.chars() {
        let s = script_of(c);
        match s {
            Script::Devanagari => per_script[0] += 1,
            Script::Tamil => per_script[1] += 1,
            Script::Malayalam => per_script[2] += 1,
            _ if c.is_alphabetic() => {}
            _ => continue,
        }
        letters += 1;
    }
    if letters == 0 {
        return None;
    }
    let scripts = [Script::Devanagari, Script::Tamil, Script::Malayalam];
    let (idx, &top) = per_script.iter().enumerate().max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))?;
    (top > 0 && top as f64 / letters as f64 >= threshold).then_some(scripts[idx])
}

pub fn detect(text: &str, profiles: &[LanguageProfile], cfg: &DetectConfig) -> Result<DetectionResult, LangIdError> {
    if profiles.is_empty() {
        return Err(LangIdError::NoProfiles);
    }
    if text.trim().is_empty() {
        return Err(LangIdError::EmptyText);
    }
    let mut by_order: BTreeMap<usize, Vec<String>> = BTreeMap::new();
    let mut scores = BTreeMap::new();
    for p in profiles {
        let grams = by_order.entry(p.n).or_insert_with(|| ngrams(text, p.n));
        scores.insert(p.lang, p.score(grams));
    }
    // BTreeMap iteration is in code order, so strict `>` keeps the
    // lexicographically first language on ties.
    let mut best = None::<(Lang, f64)>;
    for (&lang, &s) in &scores {
        if best.is_none_or(|(_, b)| s > b) {
            best = Some((lang, s));
        }
    }
    let by_script = dominant_indic_script(text, cfg.script_threshold);
    let best = by_script.and_then(script_lang).unwrap_or_else(|| best.expect("non-empty").0);
    Ok(DetectionResult { best, scores, by_script })
}

/// Outcome of the dataset-specific language rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LanguageClass {
    InLanguage,
    NotLanguage,
}

/// Tamil and Malayalam comments are out of language only when detected as
/// English or Hindi; everything else is assumed to be in the dataset's
/// language. English comments are out of language unless detected as English.
pub fn assign_language_class(result: &DetectionResult, dataset_lang: DatasetLang) -> LanguageClass {
    language_class_for(result.best, dataset_lang)
}

pub fn language_class_for(best: Lang, dataset_lang: DatasetLang) -> LanguageClass {
    let not_lang = match dataset_lang {
        DatasetLang::English => best != Lang::En,
        DatasetLang::Tamil | DatasetLang::Malayalam => matches!(best, Lang::En | Lang::Hi),
    };
    if not_lang {
        LanguageClass::NotLanguage
    } else {
        LanguageClass::InLanguage
    }
}

/// Seed text bundled with the crate, one sentence per line.
pub mod seeds {
    use super::Lang;

    pub fn training(lang: Lang) -> &'static str {
        match lang {
            Lang::En => include_str!("../data/langid/en.train.txt"),
            Lang::Hi => include_str!("../data/langid/hi.train.txt"),
            Lang::Ml => include_str!("../data/langid/ml.train.txt"),
            Lang::Ta => include_str!("../data/langid/ta.train.txt"),
        }
    }

    /// Sentences disjoint from [`training`], for evaluation.
    pub fn held_out(lang: Lang) -> &'static str {
        match lang {
            Lang::En => include_str!("../data/langid/en.heldout.txt"),
            Lang::Hi => include_str!("../data/langid/hi.heldout.txt"),
            Lang::Ml => include_str!("../data/langid/ml.heldout.txt"),
            Lang::Ta => include_str!("../data/langid/ta.heldout.txt"),
        }
    }
}

/// Profiles for all four languages trained on the bundled seed sentences
/// after default normalization.
pub fn builtin_profiles(n: usize, alpha: f64) -> Result<Vec<LanguageProfile>, LangIdError> {
    let cfg = NormalizationConfig::default();
    Lang::ALL
        .into_iter()
        .map(|lang| {
            let docs: Vec<String> =
                seeds::training(lang).lines().map(|l| normalize_text(l, &cfg)).filter(|l| !l.is_empty()).collect();
            train_profile(&docs, lang, n, alpha)
        })
        .collect()
}
