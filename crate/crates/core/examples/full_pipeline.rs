//! The whole pipeline on the bundled Tamil fixture: normalization, language
//! gate, transliteration, TF-IDF and a 3-member ensemble. Outputs go to a
//! directory given as the first argument (default: a temp directory).
//!
//! ```text
//! cargo run --release --example full_pipeline [-- out_dir]
//! ```

use std::path::PathBuf;

use hopeedi::metrics::{render_report, ReportFormat};
use hopeedi::pipeline::{run_pipeline, PipelineConfig, RunInputs};
use hopeedi::DatasetLang;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let fixtures = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/fixtures");
    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("hopeedi-full-pipeline"));

    let mut cfg = PipelineConfig::new(DatasetLang::Tamil);
    cfg.ensemble.k = 3;
    cfg.ensemble.base_seed = 2021;
    let inputs = RunInputs {
        train: fixtures.join("ta_train.tsv"),
        dev: fixtures.join("ta_dev.tsv"),
        test: Some(fixtures.join("ta_test.tsv")),
    };
    let run = run_pipeline(&cfg, &inputs)?;

    for (row, o) in run.dev.rows.iter().zip(&run.dev.outcomes).take(5) {
        let stages: Vec<String> = o.trace.iter().map(|s| s.to_string()).collect();
        println!(
            "{:<48} -> {:<12} [{}]",
            row.text.chars().take(48).collect::<String>(),
            o.label.file_name(cfg.dataset_lang),
            stages.join(" > ")
        );
    }
    if let Some(r) = &run.dev.report {
        println!("\n{}", render_report(r, ReportFormat::Text));
    }
    run.write(&out)?;
    println!("outputs written to {}", out.display());
    Ok(())
}
