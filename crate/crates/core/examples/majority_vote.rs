//! Majority voting over the prediction files of independently trained
//! models, with both tie-break policies.
//!
//! ```text
//! cargo run --example majority_vote
//! ```

use hopeedi::learn::{load_external_predictions, majority_vote, vote_rows, TieBreak};
use hopeedi::Label::{self, *};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for votes in [vec![Hope, Hope, NotHope], vec![Hope, NotHope], vec![Hope, NotLanguage, NotHope, Hope, NotLanguage]] {
        println!(
            "{:<40} class-order={:<8} majority-prior={}",
            format!("{votes:?}"),
            majority_vote(&votes, TieBreak::ClassOrder)?.to_string(),
            majority_vote(&votes, TieBreak::MajorityClassPrior)?
        );
    }

    let dir = tempfile_dir()?;
    let members: [[Label; 4]; 3] =
        [[Hope, NotHope, NotHope, NotLanguage], [Hope, Hope, NotHope, NotLanguage], [NotHope, NotHope, Hope, NotHope]];
    let mut paths = Vec::new();
    for (i, m) in members.iter().enumerate() {
        let p = dir.join(format!("model_{i}.txt"));
        let body: String = m.iter().map(|l| format!("{}\n", l.file_name(hopeedi::DatasetLang::English))).collect();
        std::fs::write(&p, body)?;
        paths.push(p);
    }
    let matrix = load_external_predictions(&paths, 4)?;
    println!("\nrow-wise vote over {} files: {:?}", paths.len(), vote_rows(&matrix, TieBreak::default())?);
    std::fs::remove_dir_all(&dir)?;
    Ok(())
}

fn tempfile_dir() -> std::io::Result<std::path::PathBuf> {
    let dir = std::env::temp_dir().join(format!("hopeedi-vote-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;
    Ok(dir)
}
