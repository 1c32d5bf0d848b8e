//! Class distribution of the bundled fixture files, plus a reproducible
//! train/validation split.
//!
//! ```text
//! cargo run --example dataset_stats [-- path/to/file.tsv en]
//! ```

use std::path::PathBuf;

use hopeedi::corpus::{compute_stats, load_tsv, make_split, DEFAULT_FRACTION_TRAIN};
use hopeedi::{DatasetLang, Label};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let fixtures = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/fixtures");
    let args: Vec<String> = std::env::args().skip(1).collect();
    let files: Vec<(PathBuf, DatasetLang)> = match args.as_slice() {
        [path, lang] => vec![(PathBuf::from(path), lang.parse()?)],
        _ => DatasetLang::ALL
            .iter()
            .flat_map(|&l| ["train", "dev"].map(|s| (fixtures.join(format!("{}_{s}.tsv", l.code())), l)))
            .collect(),
    };

    println!("{:<16} {:>6} {:>9} {:>9} {:>6} {:>7}", "file", "hope", "not_hope", "not_lang", "total", "ratio");
    for (path, lang) in &files {
        let rows = load_tsv(path, *lang, true)?;
        let s = compute_stats(&rows)?;
        let ratio = s.hope_to_nothope_ratio().map_or("-".into(), |r| format!("{r:.3}"));
        println!(
            "{:<16} {:>6} {:>9} {:>9} {:>6} {:>7}",
            path.file_name().unwrap().to_string_lossy(),
            s.count(Label::Hope),
            s.count(Label::NotHope),
            s.count(Label::NotLanguage),
            s.total,
            ratio
        );
    }

    let (path, lang) = &files[0];
    let rows = load_tsv(path, *lang, true)?;
    let plan = make_split(&rows, 7, DEFAULT_FRACTION_TRAIN)?;
    println!(
        "\nsplit of {} with seed 7: {} train / {} validation",
        path.file_name().unwrap().to_string_lossy(),
        plan.train_ids().len(),
        plan.validation_ids().len()
    );
    print!("{}", plan.to_text().lines().take(4).map(|l| format!("  {l}\n")).collect::<String>());
    Ok(())
}
