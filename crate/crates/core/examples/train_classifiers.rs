//! Logistic regression, linear SVM and random forest on TF-IDF features of
//! the English fixture, scored on its dev file.
//!
//! ```text
//! cargo run --release --example train_classifiers
//! ```

use std::path::PathBuf;

use hopeedi::corpus::load_tsv;
use hopeedi::features::{build_vocab, tfidf_vectorize};
use hopeedi::learn::{ForestConfig, LogRegConfig, ModelKind, SvmConfig, TrainerConfig};
use hopeedi::metrics::{aggregate, confusion, MetricOptions};
use hopeedi::textprep::{normalize_text, NormalizationConfig};
use hopeedi::{DatasetLang, Label};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/fixtures");
    let lang = DatasetLang::English;
    let norm = NormalizationConfig::default();
    let load = |name: &str| -> Result<(Vec<String>, Vec<Label>), Box<dyn std::error::Error>> {
        let rows = load_tsv(dir.join(name), lang, true)?;
        Ok(rows
            .into_iter()
            .filter(|r| r.label != Some(Label::NotLanguage))
            .map(|r| (normalize_text(&r.text, &norm), r.label.unwrap()))
            .unzip())
    };
    let (train_text, train_y) = load("en_train.tsv")?;
    let (dev_text, dev_y) = load("en_dev.tsv")?;
    let vocab = build_vocab(&train_text, 1)?;
    let x: Vec<_> = train_text.iter().map(|t| tfidf_vectorize(t, &vocab)).collect();
    let dev_x: Vec<_> = dev_text.iter().map(|t| tfidf_vectorize(t, &vocab)).collect();

    let trainers = [
        TrainerConfig::LogReg(LogRegConfig::default()),
        TrainerConfig::LinearSvm(SvmConfig::default()),
        TrainerConfig::LinearSvm(SvmConfig { lr: 0.01, epochs: 500, c: 100.0 }),
        TrainerConfig::RandomForest(ForestConfig { n_trees: 25, ..Default::default() }),
    ];
    for trainer in trainers {
        let model = trainer.train(&x, &train_y, 42)?;
        let pred = dev_x.iter().map(|v| model.predict(v).map(|p| p.label)).collect::<Result<Vec<_>, _>>()?;
        let report = aggregate(&confusion(&dev_y, &pred, &[Label::Hope, Label::NotHope])?, &MetricOptions::default());
        let kind: ModelKind = trainer.kind();
        println!(
            "{:<7} {:<40} dev weighted F1 {:.3}  macro F1 {:.3}",
            kind.as_str(),
            describe(&trainer),
            report.weighted.f1,
            report.macro_avg.f1
        );
    }
    Ok(())
}

fn describe(t: &TrainerConfig) -> String {
    t.to_pairs()
        .into_iter()
        .map(|(k, v)| format!("{}={v}", k.split('.').nth(1).unwrap_or(&k)))
        .collect::<Vec<_>>()
        .join(" ")
}
