//! Hope speech detection for English, Tamil and Malayalam YouTube comments.
//!
//! The crate follows a four stage pipeline: text normalization
//! ([`textprep`]), language identification with a dataset-specific
//! not-in-language rule ([`langid`]), romanized-to-native transliteration for
//! Tamil and Malayalam ([`translit`]), and hope / not-hope classification
//! with classical models and majority-voting ensembles ([`features`],
//! [`learn`]). [`metrics`] computes per-class and macro / weighted
//! precision, recall and F1, and [`pipeline`] wires everything together over
//! HopeEDI-format TSV files.
//!
//! ```
//! use hopeedi::textprep::{normalize_text, NormalizationConfig};
//!
//! let clean = normalize_text("Fox News is pure Garbage!", &NormalizationConfig::default());
//! assert_eq!(clean, "fox news is pure garbage");
//! ```

pub mod corpus;
pub mod features;
pub mod label;
pub mod langid;
pub mod learn;
pub mod metrics;
pub mod pipeline;
pub mod rng;
pub mod textprep;
pub mod translit;

pub use label::{DatasetLang, Label};
