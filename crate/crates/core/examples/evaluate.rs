//! Precision, recall and F1 per class with macro and weighted averages.
//!
//! The example scores an all-NotHope predictor against the English dev
//! distribution (242 Hope, 2569 NotHope, 2 not-English).
//!
//! ```text
//! cargo run --example evaluate
//! ```

use hopeedi::metrics::{aggregate, render_report, ConfusionMatrix, MetricOptions, ReportFormat};
use hopeedi::Label;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cm = ConfusionMatrix::from_counts(Label::ALL.to_vec(), vec![vec![0, 242, 0], vec![0, 2569, 0], vec![0, 2, 0]])?;
    let report = aggregate(&cm, &MetricOptions::default());
    println!("{}", render_report(&report, ReportFormat::Text));
    println!("{}", render_report(&report, ReportFormat::Tsv));
    println!("{}", render_report(&report, ReportFormat::Json));
    Ok(())
}
