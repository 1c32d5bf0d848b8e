//! Romanized Tamil / Malayalam to native script.
//!
//! Conversion is greedy longest-match over a data-driven [`SchemeTable`].
//! Only Latin-script runs are touched; everything else, and any Latin
//! character no table key starts with, is copied through.

use std::collections::BTreeMap;
use std::path::Path;

use thiserror::Error;

use crate::label::DatasetLang;

const TAMIL_TABLE: &str = include_str!("../data/translit/ta.tsv");
const MALAYALAM_TABLE: &str = include_str!("../data/translit/ml.tsv");

#[derive(Debug, Error)]
pub enum TranslitError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: expected `latin<TAB>native`")]
    MalformedLine { line: usize },
    #[error("line {line}: key `{key}` must be non-empty Latin text")]
    BadKey { line: usize, key: String },
    #[error("line {line}: value `{value}` is not entirely {lang} script")]
    ValueOutsideScript { line: usize, value: String, lang: DatasetLang },
    #[error("scheme table is empty")]
    EmptyTable,
    #[error("no transliteration scheme for {0}")]
    UnsupportedLanguage(DatasetLang),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Script {
    Latin,
    Tamil,
    Malayalam,
    Devanagari,
    Other,
}

/// Block-range script classification. Only letters count as Latin; Latin
/// digits and punctuation are `Other`.
pub fn script_of(c: char) -> Script {
    match c as u32 {
        0x0900..=0x097F => Script::Devanagari,
        0x0B80..=0x0BFF => Script::Tamil,
        0x0D00..=0x0D7F => Script::Malayalam,
        0x0041..=0x005A | 0x0061..=0x007A => Script::Latin,
        0x00C0..=0x024F | 0x1E00..=0x1EFF if c.is_alphabetic() => Script::Latin,
        _ => Script::Other,
    }
}

fn target_script(lang: DatasetLang) -> Result<Script, TranslitError> {
    match lang {
        DatasetLang::Tamil => Ok(Script::Tamil),
        DatasetLang::Malayalam => Ok(Script::Malayalam),
        DatasetLang::English => Err(TranslitError::UnsupportedLanguage(lang)),
    }
}

/// Latin-sequence to native-sequence mapping for one language.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeTable {
    lang: DatasetLang,
    entries: BTreeMap<String, String>,
    max_key_len: usize,
}

impl SchemeTable {
    pub fn new(lang: DatasetLang, entries: BTreeMap<String, String>) -> Result<Self, TranslitError> {
        let script = target_script(lang)?;
        if entries.is_empty() {
            return Err(TranslitError::EmptyTable);
        }
        for (k, v) in &entries {
            if k.is_empty() || !k.chars().all(|c| script_of(c) == Script::Latin) {
                return Err(TranslitError::BadKey { line: 0, key: k.clone() });
            }
            if v.is_empty() || !v.chars().all(|c| script_of(c) == script) {
                return Err(TranslitError::ValueOutsideScript { line: 0, value: v.clone(), lang });
            }
        }
        let max_key_len = entries.keys().map(|k| k.chars().count()).max().unwrap_or(0);
        Ok(Self { lang, entries, max_key_len })
    }

    /// Parses a `latin<TAB>native` table; `#` starts a comment line.
    pub fn parse(lang: DatasetLang, content: &str) -> Result<Self, TranslitError> {
        let script = target_script(lang)?;
        let mut entries = BTreeMap::new();
        for (idx, line) in content.lines().enumerate() {
            let line_no = idx + 1;
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('\t').ok_or(TranslitError::MalformedLine { line: line_no })?;
            let (k, v) = (k.trim(), v.trim());
            if k.is_empty() || !k.chars().all(|c| script_of(c) == Script::Latin) {
                return Err(TranslitError::BadKey { line: line_no, key: k.to_string() });
            }
            if v.is_empty() || !v.chars().all(|c| script_of(c) == script) {
                return Err(TranslitError::ValueOutsideScript { line: line_no, value: v.to_string(), lang });
            }
            entries.insert(k.to_string(), v.to_string());
        }
        Self::new(lang, entries)
    }

    pub fn load(lang: DatasetLang, path: impl AsRef<Path>) -> Result<Self, TranslitError> {
        let path = path.as_ref();
        let content = std::fs::read_to_string(path)
            .map_err(|source| TranslitError::Io { path: path.display().to_string(), source })?;
        Self::parse(lang, &content)
    }

    /// The table shipped with the crate for `lang`.
    pub fn builtin(lang: DatasetLang) -> Result<Self, TranslitError> {
        match lang {
            DatasetLang::Tamil => Self::parse(lang, TAMIL_TABLE),
            DatasetLang::Malayalam => Self::parse(lang, MALAYALAM_TABLE),
            DatasetLang::English => Err(TranslitError::UnsupportedLanguage(lang)),
        }
    }

    pub fn lang(&self) -> DatasetLang {
        self.lang
    }

    pub fn max_key_len(&self) -> usize {
        self.max_key_len
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, &str)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }
}

/// One step of the greedy matcher.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segment {
    /// Char offset into the input.
    pub start: usize,
    /// Number of input chars consumed.
    pub len: usize,
    pub output: String,
    /// True when a table key produced `output`.
    pub matched: bool,
}

/// Greedy longest-match segmentation of `text`.
pub fn segments(text: &str, table: &SchemeTable) -> Vec<Segment> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut key = String::with_capacity(table.max_key_len * 4);
    let mut i = 0;
    while i < chars.len() {
        if script_of(chars[i]) == Script::Latin {
            let run_end = chars[i..].iter().position(|&c| script_of(c) != Script::Latin).map_or(chars.len(), |p| i + p);
            let longest = table.max_key_len.min(run_end - i);
            let hit = (1..=longest).rev().find_map(|len| {
                key.clear();
                key.extend(&chars[i..i + len]);
                table.get(&key).map(|v| (len, v.to_string()))
            });
            if let Some((len, output)) = hit {
                out.push(Segment { start: i, len, output, matched: true });
                i += len;
                continue;
            }
        }
        out.push(Segment { start: i, len: 1, output: chars[i].to_string(), matched: false });
        i += 1;
    }
    out
}

pub fn transliterate(text: &str, table: &SchemeTable) -> String {
    segments(text, table).into_iter().map(|s| s.output).collect()
}
