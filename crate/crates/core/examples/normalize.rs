//! Comment normalization: special characters, emoji, case and whitespace.
//!
//! ```text
//! cargo run --example normalize [-- "some text"]
//! ```

use hopeedi::textprep::{normalize_text, NormalizationConfig};

fn main() {
    let samples: Vec<String> = match std::env::args().nth(1) {
        Some(s) => vec![s],
        None => [
            "Fox News is pure Garbage!",
            "Hope\t\t@user 🙂  WINS",
            "#Respect 👏👏 Anna neenga   SEMMA!!!",
            "நம்பிக்கை 💪 எப்போதும்",
            "ആശംസകൾ ❤️ chetta",
        ]
        .map(String::from)
        .to_vec(),
    };
    let all = NormalizationConfig::default();
    let emoji_only = NormalizationConfig { strip_specials: false, ..all };
    let no_case = NormalizationConfig { lowercase: false, ..all };
    for s in &samples {
        println!("raw            {s:?}");
        println!("normalized     {:?}", normalize_text(s, &all));
        println!("keep specials  {:?}", normalize_text(s, &emoji_only));
        println!("keep case      {:?}\n", normalize_text(s, &no_case));
    }
}
