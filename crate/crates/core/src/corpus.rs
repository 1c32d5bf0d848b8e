//! HopeEDI-format TSV ingestion, label statistics and seeded train/validation
//! splits.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use thiserror::Error;

use crate::label::{DatasetLang, Label};
use crate::rng::{SeededRng, PRNG_ID};

pub const DEFAULT_FRACTION_TRAIN: f64 = 0.9;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: expected {expected} tab-separated field(s), found {found}")]
    MalformedRow { line: usize, expected: usize, found: usize },
    #[error("line {line}: unknown label `{label}`")]
    UnknownLabel { line: usize, label: String },
    #[error("line {line}: empty comment text")]
    EmptyText { line: usize },
    #[error("file has no data rows")]
    EmptyFile,
    #[error("statistics need labeled rows; row {id} is unlabeled")]
    UnlabeledInput { id: usize },
    #[error("a split needs at least 2 rows, got {0}")]
    TooFewRows(usize),
    #[error("train fraction must lie strictly between 0 and 1, got {0}")]
    BadFraction(f64),
    #[error("split file: {0}")]
    BadSplitFile(String),
}

/// One dataset row.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledComment {
    /// 0-based index of the data row in its file.
    pub id: usize,
    pub text: String,
    /// `None` for unlabeled (test) data.
    pub label: Option<Label>,
    pub dataset_lang: DatasetLang,
}

pub fn load_tsv(
    path: impl AsRef<Path>,
    dataset_lang: DatasetLang,
    labeled: bool,
) -> Result<Vec<LabeledComment>, CorpusError> {
    let path = path.as_ref();
    let raw =
        std::fs::read_to_string(path).map_err(|source| CorpusError::Io { path: path.display().to_string(), source })?;
    parse_tsv(&raw, dataset_lang, labeled)
}

/// Parses TSV content. Lines may end in LF or CRLF; blank lines are skipped.
/// A leading header row (`text<TAB>label` or `text<TAB>category`) is skipped
/// in labeled mode.
pub fn parse_tsv(content: &str, dataset_lang: DatasetLang, labeled: bool) -> Result<Vec<LabeledComment>, CorpusError> {
    let expected = if labeled { 2 } else { 1 };
    let mut rows = Vec::new();
    for (idx, line) in content.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.strip_suffix('\r').unwrap_or(line);
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != expected {
            return Err(CorpusError::MalformedRow { line: line_no, expected, found: fields.len() });
        }
        let label = if labeled {
            let raw = fields[1];
            if rows.is_empty() && is_header(fields[0], raw) {
                continue;
            }
            Some(
                Label::from_alias(raw)
                    .ok_or_else(|| CorpusError::UnknownLabel { line: line_no, label: raw.trim().to_string() })?,
            )
        } else {
            None
        };
        let text = fields[0].trim();
        if text.is_empty() {
            return Err(CorpusError::EmptyText { line: line_no });
        }
        rows.push(LabeledComment { id: rows.len(), text: text.to_string(), label, dataset_lang });
    }
    if rows.is_empty() {
        return Err(CorpusError::EmptyFile);
    }
    Ok(rows)
}

/// Loads a file that may or may not carry a label column; the first
/// non-blank line decides.
pub fn load_tsv_any(path: impl AsRef<Path>, dataset_lang: DatasetLang) -> Result<Vec<LabeledComment>, CorpusError> {
    let path = path.as_ref();
    let raw =
        std::fs::read_to_string(path).map_err(|source| CorpusError::Io { path: path.display().to_string(), source })?;
    let labeled = raw.lines().find(|l| !l.trim().is_empty()).is_some_and(|l| l.contains('\t'));
    parse_tsv(&raw, dataset_lang, labeled)
}

fn is_header(text: &str, label: &str) -> bool {
    let l = label.trim().to_ascii_lowercase();
    text.trim().eq_ignore_ascii_case("text") && (l == "label" || l == "category")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatasetStats {
    pub counts: BTreeMap<Label, usize>,
    pub total: usize,
}

impl DatasetStats {
    pub fn count(&self, label: Label) -> usize {
        self.counts.get(&label).copied().unwrap_or(0)
    }

    /// Hope-to-not-hope ratio; absent when there are no not-hope rows.
    pub fn hope_to_nothope_ratio(&self) -> Option<f64> {
        let not_hope = self.count(Label::NotHope);
        (not_hope > 0).then(|| self.count(Label::Hope) as f64 / not_hope as f64)
    }
}

pub fn compute_stats(data: &[LabeledComment]) -> Result<DatasetStats, CorpusError> {
    let mut counts: BTreeMap<Label, usize> = Label::ALL.iter().map(|&l| (l, 0)).collect();
    for row in data {
        let label = row.label.ok_or(CorpusError::UnlabeledInput { id: row.id })?;
        *counts.entry(label).or_default() += 1;
    }
    Ok(DatasetStats { counts, total: data.len() })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Partition {
    Train,
    Validation,
}

impl Partition {
    fn as_str(self) -> &'static str {
        match self {
            Partition::Train => "train",
            Partition::Validation => "validation",
        }
    }
}

/// Seeded assignment of row ids to train and validation partitions.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitPlan {
    pub seed: u64,
    pub fraction_train: f64,
    pub assignments: BTreeMap<usize, Partition>,
}

impl SplitPlan {
    pub fn ids(&self, part: Partition) -> Vec<usize> {
        self.assignments.iter().filter(|(_, &p)| p == part).map(|(&id, _)| id).collect()
    }

    pub fn train_ids(&self) -> Vec<usize> {
        self.ids(Partition::Train)
    }

    pub fn validation_ids(&self) -> Vec<usize> {
        self.ids(Partition::Validation)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::from("# hopeedi-split v1\n");
        let _ = writeln!(
            out,
            "# prng={PRNG_ID} seed={} fraction={} rows={}",
            self.seed,
            self.fraction_train,
            self.assignments.len()
        );
        for (id, part) in &self.assignments {
            let _ = writeln!(out, "{id}\t{}", part.as_str());
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, CorpusError> {
        let bad = |m: &str| CorpusError::BadSplitFile(m.to_string());
        let mut lines = text.lines();
        if lines.next() != Some("# hopeedi-split v1") {
            return Err(bad("missing `# hopeedi-split v1` header"));
        }
        let meta = lines.next().ok_or_else(|| bad("missing metadata line"))?;
        let mut seed = None;
        let mut fraction = None;
        for kv in meta.trim_start_matches('#').split_whitespace() {
            match kv.split_once('=') {
                Some(("seed", v)) => seed = v.parse().ok(),
                Some(("fraction", v)) => fraction = v.parse().ok(),
                _ => {}
            }
        }
        let mut assignments = BTreeMap::new();
        for line in lines.filter(|l| !l.is_empty()) {
            let (id, part) = line.split_once('\t').ok_or_else(|| bad(line))?;
            let id: usize = id.parse().map_err(|_| bad(line))?;
            let part = match part {
                "train" => Partition::Train,
                "validation" => Partition::Validation,
                _ => return Err(bad(line)),
            };
            assignments.insert(id, part);
        }
        Ok(SplitPlan {
            seed: seed.ok_or_else(|| bad("missing seed"))?,
            fraction_train: fraction.ok_or_else(|| bad("missing fraction"))?,
            assignments,
        })
    }
}

/// Splits the rows of `data` by id. See [`split_indices`].
pub fn make_split(data: &[LabeledComment], seed: u64, fraction_train: f64) -> Result<SplitPlan, CorpusError> {
    let ids: Vec<usize> = data.iter().map(|c| c.id).collect();
    split_ids(&ids, seed, fraction_train)
}

/// Splits positions `0..n`.
pub fn split_indices(n: usize, seed: u64, fraction_train: f64) -> Result<SplitPlan, CorpusError> {
    let ids: Vec<usize> = (0..n).collect();
    split_ids(&ids, seed, fraction_train)
}

/// Shuffles `ids` with the seeded generator and sends the first
/// `ceil(fraction * n)` of them to train, clamped so that neither partition is
/// empty.
fn split_ids(ids: &[usize], seed: u64, fraction_train: f64) -> Result<SplitPlan, CorpusError> {
    if !(fraction_train > 0.0 && fraction_train < 1.0) {
        return Err(CorpusError::BadFraction(fraction_train));
    }
    let n = ids.len();
    if n < 2 {
        return Err(CorpusError::TooFewRows(n));
    }
    let mut order = ids.to_vec();
    SeededRng::new(seed).shuffle(&mut order);
    let n_train = ((fraction_train * n as f64).ceil() as usize).clamp(1, n - 1);
    let assignments = order
        .iter()
        .enumerate()
        .map(|(pos, &id)| (id, if pos < n_train { Partition::Train } else { Partition::Validation }))
        .collect();
    Ok(SplitPlan { seed, fraction_train, assignments })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labeled(n: usize) -> Vec<LabeledComment> {
        (0..n)
            .map(|id| LabeledComment {
                id,
                text: format!("row {id}"),
                label: Some(Label::NotHope),
                dataset_lang: DatasetLang::English,
            })
            .collect()
    }

    #[test]
    fn annotation_noise_row_loads_as_not_language() {
        let rows = parse_tsv("Fox News is pure Garbage!\tnot-English\n", DatasetLang::English, true).unwrap();
        assert_eq!(rows[0].label, Some(Label::NotLanguage));
        assert_eq!(rows[0].text, "Fox News is pure Garbage!");
    }

    #[test]
    fn empty_file_is_an_error() {
        assert!(matches!(parse_tsv("", DatasetLang::Tamil, true), Err(CorpusError::EmptyFile)));
        assert!(matches!(parse_tsv("\n\r\n", DatasetLang::Tamil, true), Err(CorpusError::EmptyFile)));
    }

    #[test]
    fn ids_follow_file_order() {
        let rows = parse_tsv("a\tHope_speech\nb\tNon_hope_speech\r\nc\tnot-Tamil\n", DatasetLang::Tamil, true).unwrap();
        let ids: Vec<_> = rows.iter().map(|r| r.id).collect();
        assert_eq!(ids, vec![0, 1, 2]);
        assert_eq!(rows[1].text, "b");
        assert_eq!(rows[2].label, Some(Label::NotLanguage));
    }

    #[test]
    fn malformed_rows_report_line_numbers() {
        let err = parse_tsv("ok\tHope_speech\nno label here\n", DatasetLang::English, true).unwrap_err();
        assert!(matches!(err, CorpusError::MalformedRow { line: 2, found: 1, .. }));
        let err = parse_tsv("embedded\ttab\tHope_speech\n", DatasetLang::English, true).unwrap_err();
        assert!(matches!(err, CorpusError::MalformedRow { line: 1, found: 3, .. }));
        let err = parse_tsv("text only\tHope_speech\n", DatasetLang::English, false).unwrap_err();
        assert!(matches!(err, CorpusError::MalformedRow { expected: 1, found: 2, .. }));
    }

    #[test]
    fn unknown_label_names_offender() {
        match parse_tsv("x\tmaybe_hope\n", DatasetLang::English, true) {
            Err(CorpusError::UnknownLabel { line: 1, label }) => assert_eq!(label, "maybe_hope"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn header_row_is_skipped() {
        let rows = parse_tsv("text\tcategory\nhi\tHope_speech\n", DatasetLang::Tamil, true).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].id, 0);
    }

    #[test]
    fn unlabeled_rows_have_no_label() {
        let rows = parse_tsv("one\ntwo\n", DatasetLang::Malayalam, false).unwrap();
        assert!(rows.iter().all(|r| r.label.is_none()));
        assert!(matches!(compute_stats(&rows), Err(CorpusError::UnlabeledInput { id: 0 })));
    }

    #[test]
    fn empty_text_is_rejected() {
        assert!(matches!(
            parse_tsv("  \tHope_speech\n", DatasetLang::English, true),
            Err(CorpusError::EmptyText { line: 1 })
        ));
    }

    #[test]
    fn stats_single_hope_row_has_no_ratio() {
        let rows = parse_tsv("x\tHope_speech\n", DatasetLang::English, true).unwrap();
        let s = compute_stats(&rows).unwrap();
        assert_eq!(s.count(Label::Hope), 1);
        assert_eq!(s.count(Label::NotHope), 0);
        assert_eq!(s.count(Label::NotLanguage), 0);
        assert_eq!(s.total, 1);
        assert_eq!(s.hope_to_nothope_ratio(), None);
    }

    #[test]
    fn english_train_distribution_ratio() {
        let mut data = String::new();
        for (label, n) in [("Hope_speech", 1962), ("Non_hope_speech", 20778), ("not-English", 22)] {
            for i in 0..n {
                let _ = writeln!(data, "comment {i}\t{label}");
            }
        }
        let s = compute_stats(&parse_tsv(&data, DatasetLang::English, true).unwrap()).unwrap();
        assert_eq!(s.total, 22762);
        assert_eq!(s.count(Label::Hope), 1962);
        assert_eq!(s.count(Label::NotHope), 20778);
        assert_eq!(s.count(Label::NotLanguage), 22);
        let r = s.hope_to_nothope_ratio().unwrap();
        assert_eq!(r, 1962.0 / 20778.0);
        assert!((r - 0.094).abs() < 5e-4);
    }

    #[test]
    fn four_rows_half_split_is_stable() {
        let data = labeled(4);
        let a = make_split(&data, 7, 0.5).unwrap();
        let b = make_split(&data, 7, 0.5).unwrap();
        assert_eq!(a.train_ids().len(), 2);
        assert_eq!(a.validation_ids().len(), 2);
        assert_eq!(a, b);
        assert_eq!(a.to_text(), b.to_text());
    }

    #[test]
    fn different_seeds_differ() {
        let data = labeled(100);
        let a = make_split(&data, 1, 0.5).unwrap();
        let b = make_split(&data, 2, 0.5).unwrap();
        assert_ne!(a.assignments, b.assignments);
    }

    #[test]
    fn bad_fraction_and_too_few_rows() {
        let data = labeled(4);
        assert!(matches!(make_split(&data, 0, 1.0), Err(CorpusError::BadFraction(_))));
        assert!(matches!(make_split(&data, 0, 0.0), Err(CorpusError::BadFraction(_))));
        assert!(matches!(make_split(&data, 0, f64::NAN), Err(CorpusError::BadFraction(_))));
        assert!(matches!(make_split(&labeled(1), 0, 0.5), Err(CorpusError::TooFewRows(1))));
    }

    #[test]
    fn both_partitions_nonempty_at_extreme_fractions() {
        let p = split_indices(2, 3, 0.99).unwrap();
        assert_eq!(p.train_ids().len(), 1);
        let p = split_indices(10, 3, 0.01).unwrap();
        assert_eq!(p.train_ids().len(), 1);
        assert_eq!(p.validation_ids().len(), 9);
    }

    #[test]
    fn split_file_round_trips() {
        let p = split_indices(25, 11, 0.9).unwrap();
        let back = SplitPlan::from_text(&p.to_text()).unwrap();
        assert_eq!(back, p);
        assert!(SplitPlan::from_text("garbage").is_err());
    }

    #[test]
    fn label_column_is_optional_for_load_tsv_any() {
        let dir = tempfile::tempdir().unwrap();
        let labeled = dir.path().join("a.tsv");
        let bare = dir.path().join("b.tsv");
        std::fs::write(&labeled, "\nkeep going\tHope_speech\n").unwrap();
        std::fs::write(&bare, "keep going\nso bad\n").unwrap();
        let a = load_tsv_any(&labeled, DatasetLang::English).unwrap();
        assert_eq!(a[0].label, Some(Label::Hope));
        let b = load_tsv_any(&bare, DatasetLang::English).unwrap();
        assert_eq!((b.len(), b[1].label), (2, None));
    }
}
