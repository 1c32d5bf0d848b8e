//! Character n-gram language identification and the not-in-language rule.
//!
//! ```text
//! cargo run --example detect_language [-- "text to classify"]
//! ```

use hopeedi::langid::{assign_language_class, builtin_profiles, detect, DetectConfig, DEFAULT_ALPHA, DEFAULT_ORDER};
use hopeedi::textprep::{normalize_text, NormalizationConfig};
use hopeedi::DatasetLang;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let profiles = builtin_profiles(DEFAULT_ORDER, DEFAULT_ALPHA)?;
    let cfg = DetectConfig::default();
    let samples: Vec<String> = match std::env::args().nth(1) {
        Some(s) => vec![s],
        None => [
            "God bless you, stay strong and keep going",
            "romba nalla irukku thalaiva vaazhthukkal",
            "enikku ishtamayi chetta adipoli aanu",
            "bahut accha laga bhai dil se dhanyavaad",
            "நன்றி நண்பா",
            "Fox News is pure Garbage!",
        ]
        .map(String::from)
        .to_vec(),
    };

    println!("{:<44} {:>4}  {:<8} {:<8} {:<8}", "text", "lang", "en data", "ta data", "ml data");
    for s in &samples {
        let text = normalize_text(s, &NormalizationConfig::default());
        let d = detect(&text, &profiles, &cfg)?;
        let class = |l| format!("{:?}", assign_language_class(&d, l));
        println!(
            "{:<44} {:>4}  {:<8} {:<8} {:<8}",
            s.chars().take(44).collect::<String>(),
            d.best.code(),
            class(DatasetLang::English).replace("Language", "Lang"),
            class(DatasetLang::Tamil).replace("Language", "Lang"),
            class(DatasetLang::Malayalam).replace("Language", "Lang"),
        );
        if d.by_script.is_some() {
            println!("{:<44}       (decided by script)", "");
        }
    }
    Ok(())
}
