//! Romanized Tamil / Malayalam to native script with the bundled scheme
//! tables. Native-script text passes through unchanged.
//!
//! ```text
//! cargo run --example transliterate [-- ta "vanakkam nanba"]
//! ```

use hopeedi::translit::{segments, transliterate, SchemeTable};
use hopeedi::DatasetLang;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let jobs: Vec<(DatasetLang, String)> = match args.as_slice() {
        [lang, text] => vec![(lang.parse()?, text.clone())],
        _ => vec![
            (DatasetLang::Tamil, "amma".into()),
            (DatasetLang::Tamil, "kaadhal vanakkam".into()),
            (DatasetLang::Tamil, "nanri நண்பா 2021".into()),
            (DatasetLang::Malayalam, "sneham".into()),
            (DatasetLang::Malayalam, "kadha nallathu".into()),
        ],
    };
    for (lang, text) in jobs {
        let table = SchemeTable::builtin(lang)?;
        println!("[{}] {text} -> {}", lang.code(), transliterate(&text, &table));
        let steps: Vec<String> = segments(&text, &table)
            .iter()
            .filter(|s| s.matched)
            .map(|s| format!("{}={}", text.chars().skip(s.start).take(s.len).collect::<String>(), s.output))
            .collect();
        println!("     matches: {}", steps.join(" "));
    }
    Ok(())
}
