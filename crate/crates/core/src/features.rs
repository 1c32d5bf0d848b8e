//! Sparse TF-IDF features and ingestion of externally produced sentence
//! embeddings.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use thiserror::Error;

/// Width of the sentence embeddings the pipeline expects by default.
pub const DEFAULT_EMBEDDING_DIM: usize = 768;
/// Token window of the embedding producer.
pub const DEFAULT_TOKEN_LIMIT: usize = 512;

#[derive(Debug, Error)]
pub enum FeatureError {
    #[error("cannot build a vocabulary from zero documents")]
    EmptyCorpus,
    #[error("no term reaches min_df={0}")]
    EmptyVocabulary(usize),
    #[error("min_df must be at least 1")]
    BadMinDf,
    #[error("line {line}: expected {expected} values, found {found}")]
    DimensionMismatch { line: usize, expected: usize, found: usize },
    #[error("line {line}: `{token}` is not a finite number")]
    NonNumericValue { line: usize, token: String },
    #[error("expected {expected} rows, found {found}")]
    RowCountMismatch { expected: usize, found: usize },
    #[error("vocabulary file: {0}")]
    BadVocabFile(String),
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub enum FeatureVector {
    /// `(index, weight)` pairs sorted by index, no duplicates.
    Sparse {
        dim: usize,
        entries: Vec<(usize, f64)>,
    },
    Dense(Vec<f64>),
}

impl FeatureVector {
    pub fn zeros_sparse(dim: usize) -> Self {
        FeatureVector::Sparse { dim, entries: Vec::new() }
    }

    /// Builds a sparse vector from unsorted pairs; zero weights are dropped.
    pub fn sparse(dim: usize, pairs: impl IntoIterator<Item = (usize, f64)>) -> Self {
        let mut map = BTreeMap::new();
        for (i, w) in pairs {
            assert!(i < dim, "index {i} out of range for dim {dim}");
            *map.entry(i).or_insert(0.0) += w;
        }
        FeatureVector::Sparse { dim, entries: map.into_iter().filter(|&(_, w)| w != 0.0).collect() }
    }

    pub fn dim(&self) -> usize {
        match self {
            FeatureVector::Sparse { dim, .. } => *dim,
            FeatureVector::Dense(v) => v.len(),
        }
    }

    pub fn get(&self, i: usize) -> f64 {
        match self {
            FeatureVector::Sparse { entries, .. } => {
                entries.binary_search_by_key(&i, |&(j, _)| j).map_or(0.0, |p| entries[p].1)
            }
            FeatureVector::Dense(v) => v[i],
        }
    }

    /// Dot product with a dense weight row of the same width.
    pub fn dot(&self, w: &[f64]) -> f64 {
        match self {
            FeatureVector::Sparse { entries, .. } => entries.iter().map(|&(i, x)| x * w[i]).sum(),
            FeatureVector::Dense(v) => v.iter().zip(w).map(|(a, b)| a * b).sum(),
        }
    }

    /// `w += scale * self`.
    pub fn add_scaled_to(&self, w: &mut [f64], scale: f64) {
        match self {
            FeatureVector::Sparse { entries, .. } => {
                for &(i, x) in entries {
                    w[i] += scale * x;
                }
            }
            FeatureVector::Dense(v) => {
                for (wi, x) in w.iter_mut().zip(v) {
                    *wi += scale * x;
                }
            }
        }
    }

    pub fn norm(&self) -> f64 {
        let sq: f64 = match self {
            FeatureVector::Sparse { entries, .. } => entries.iter().map(|&(_, x)| x * x).sum(),
            FeatureVector::Dense(v) => v.iter().map(|x| x * x).sum(),
        };
        sq.sqrt()
    }

    pub fn to_dense(&self) -> Vec<f64> {
        match self {
            FeatureVector::Sparse { dim, entries } => {
                let mut v = vec![0.0; *dim];
                for &(i, x) in entries {
                    v[i] = x;
                }
                v
            }
            FeatureVector::Dense(v) => v.clone(),
        }
    }
}

/// Whitespace tokens.
pub fn tokenize(doc: &str) -> impl Iterator<Item = &str> {
    doc.split_whitespace()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Vocabulary {
    terms: BTreeMap<String, usize>,
    doc_freq: Vec<usize>,
    num_docs: usize,
    min_df: usize,
}

impl Vocabulary {
    pub fn len(&self) -> usize {
        self.doc_freq.len()
    }

    pub fn is_empty(&self) -> bool {
        self.doc_freq.is_empty()
    }

    pub fn index(&self, term: &str) -> Option<usize> {
        self.terms.get(term).copied()
    }

    pub fn doc_freq(&self, index: usize) -> usize {
        self.doc_freq[index]
    }

    pub fn num_docs(&self) -> usize {
        self.num_docs
    }

    pub fn min_df(&self) -> usize {
        self.min_df
    }

    /// Smoothed inverse document frequency `ln((1 + N) / (1 + df))`.
    pub fn idf(&self, index: usize) -> f64 {
        ((1.0 + self.num_docs as f64) / (1.0 + self.doc_freq[index] as f64)).ln()
    }

    /// Terms in index order.
    pub fn terms(&self) -> Vec<&str> {
        let mut out = vec![""; self.len()];
        for (t, &i) in &self.terms {
            out[i] = t.as_str();
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mut out = String::from("# hopeedi-vocab v1\n");
        let _ = writeln!(out, "num_docs={}", self.num_docs);
        let _ = writeln!(out, "min_df={}", self.min_df);
        for (i, t) in self.terms().into_iter().enumerate() {
            let _ = writeln!(out, "{t}\t{}", self.doc_freq[i]);
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, FeatureError> {
        let bad = |m: &str| FeatureError::BadVocabFile(m.to_string());
        let mut lines = text.lines();
        if lines.next() != Some("# hopeedi-vocab v1") {
            return Err(bad("missing `# hopeedi-vocab v1` header"));
        }
        let mut field = |key: &str| -> Result<usize, FeatureError> {
            lines
                .next()
                .and_then(|l| l.strip_prefix(key))
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| bad(&format!("missing or bad `{key}` line")))
        };
        let num_docs = field("num_docs=")?;
        let min_df = field("min_df=")?;
        let mut terms = BTreeMap::new();
        let mut doc_freq = Vec::new();
        for line in lines {
            let (t, df) = line.split_once('\t').ok_or_else(|| bad(line))?;
            let df: usize = df.parse().map_err(|_| bad(line))?;
            terms.insert(t.to_string(), doc_freq.len());
            doc_freq.push(df);
        }
        if terms.len() != doc_freq.len() {
            return Err(bad("duplicate terms"));
        }
        Ok(Self { terms, doc_freq, num_docs, min_df })
    }
}

/// Builds a vocabulary from whitespace-tokenized documents, dropping terms
/// that occur in fewer than `min_df` documents. Indices follow lexicographic
/// term order.
pub fn build_vocab<S: AsRef<str>>(docs: &[S], min_df: usize) -> Result<Vocabulary, FeatureError> {
    if docs.is_empty() {
        return Err(FeatureError::EmptyCorpus);
    }
    if min_df == 0 {
        return Err(FeatureError::BadMinDf);
    }
    let mut df: BTreeMap<&str, usize> = BTreeMap::new();
    for doc in docs {
        let mut seen: Vec<&str> = tokenize(doc.as_ref()).collect();
        seen.sort_unstable();
        seen.dedup();
        for t in seen {
            *df.entry(t).or_default() += 1;
        }
    }
    let kept: Vec<(&str, usize)> = df.into_iter().filter(|&(_, c)| c >= min_df).collect();
    if kept.is_empty() {
        return Err(FeatureError::EmptyVocabulary(min_df));
    }
    let terms = kept.iter().enumerate().map(|(i, &(t, _))| (t.to_string(), i)).collect();
    let doc_freq = kept.iter().map(|&(_, c)| c).collect();
    Ok(Vocabulary { terms, doc_freq, num_docs: docs.len(), min_df })
}

/// Raw term frequency times smoothed IDF, L2-normalized when non-zero.
/// Out-of-vocabulary tokens are ignored.
pub fn tfidf_vectorize(doc: &str, vocab: &Vocabulary) -> FeatureVector {
    let mut tf: BTreeMap<usize, f64> = BTreeMap::new();
    for tok in tokenize(doc) {
        if let Some(i) = vocab.index(tok) {
            *tf.entry(i).or_default() += 1.0;
        }
    }
    let weighted: Vec<(usize, f64)> =
        tf.into_iter().map(|(i, c)| (i, c * vocab.idf(i))).filter(|&(_, w)| w != 0.0).collect();
    let norm = weighted.iter().map(|&(_, w)| w * w).sum::<f64>().sqrt();
    let entries = if norm > 0.0 { weighted.into_iter().map(|(i, w)| (i, w / norm)).collect() } else { Vec::new() };
    FeatureVector::Sparse { dim: vocab.len(), entries }
}

/// Parses an embedding file: one row per comment, space-separated decimals,
/// `#` lines are headers and skipped.
pub fn parse_embeddings(content: &str, expected_dim: usize) -> Result<Vec<FeatureVector>, FeatureError> {
    let mut rows = Vec::new();
    for (idx, line) in content.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.trim();
        if line.starts_with('#') || line.is_empty() {
            continue;
        }
        let mut v = Vec::with_capacity(expected_dim);
        for tok in line.split_whitespace() {
            let x: f64 = tok
                .parse()
                .ok()
                .filter(|x: &f64| x.is_finite())
                .ok_or_else(|| FeatureError::NonNumericValue { line: line_no, token: tok.to_string() })?;
            v.push(x);
        }
        if v.len() != expected_dim {
            return Err(FeatureError::DimensionMismatch { line: line_no, expected: expected_dim, found: v.len() });
        }
        rows.push(FeatureVector::Dense(v));
    }
    Ok(rows)
}

pub fn load_embeddings(path: impl AsRef<Path>, expected_dim: usize) -> Result<Vec<FeatureVector>, FeatureError> {
    let path = path.as_ref();
    let content = std::fs::read_to_string(path)
        .map_err(|source| FeatureError::Io { path: path.display().to_string(), source })?;
    parse_embeddings(&content, expected_dim)
}

/// Loads embeddings that must align one-to-one with `n_rows` dataset rows.
pub fn load_embeddings_for_rows(
    path: impl AsRef<Path>,
    expected_dim: usize,
    n_rows: usize,
) -> Result<Vec<FeatureVector>, FeatureError> {
    let rows = load_embeddings(path, expected_dim)?;
    if rows.len() != n_rows {
        return Err(FeatureError::RowCountMismatch { expected: n_rows, found: rows.len() });
    }
    Ok(rows)
}

/// Writes vectors in the embedding file format. `header` lines are emitted
/// as `# ` comments.
pub fn write_embeddings(vectors: &[FeatureVector], header: &[&str]) -> String {
    let mut out = String::new();
    for h in header {
        let _ = writeln!(out, "# {h}");
    }
    for v in vectors {
        let dense = v.to_dense();
        let row: Vec<String> = dense.iter().map(|x| x.to_string()).collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
    out
}

/// True when `text` fits in `limit` whitespace tokens.
pub fn validate_token_budget(text: &str, limit: usize) -> bool {
    tokenize(text).count() <= limit
}
