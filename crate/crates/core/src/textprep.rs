//! Comment normalization: special-character and emoji removal, lowercasing,
//! whitespace collapsing.
//!
//! Steps always run in the order specials, emoji, lowercase, whitespace.

use crate::translit::{script_of, Script};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NormalizationConfig {
    pub strip_specials: bool,
    pub strip_emoji: bool,
    pub lowercase: bool,
    pub collapse_whitespace: bool,
}

impl Default for NormalizationConfig {
    fn default() -> Self {
        Self { strip_specials: true, strip_emoji: true, lowercase: true, collapse_whitespace: true }
    }
}

/// Emoji ranges: Emoticons, Miscellaneous Symbols and Pictographs, Transport
/// and Map Symbols, Supplemental Symbols and Pictographs, Dingbats, both
/// variation selector blocks, and ZERO WIDTH JOINER.
const EMOJI_RANGES: &[(u32, u32)] = &[
    (0x1F600, 0x1F64F),
    (0x1F300, 0x1F5FF),
    (0x1F680, 0x1F6FF),
    (0x1F900, 0x1F9FF),
    (0x2700, 0x27BF),
    (0xFE00, 0xFE0F),
    (0xE0100, 0xE01EF),
    (0x200D, 0x200D),
];

pub fn is_emoji(c: char) -> bool {
    let cp = c as u32;
    EMOJI_RANGES.iter().any(|&(lo, hi)| (lo..=hi).contains(&cp))
}

/// A code point survives special-character removal when it is a letter of
/// any script, a digit or whitespace. Every code point of the Devanagari,
/// Tamil and Malayalam blocks counts as a letter so that vowel signs and
/// viramas are kept.
fn is_kept(c: char) -> bool {
    c.is_alphabetic()
        || c.is_numeric()
        || c.is_whitespace()
        || matches!(script_of(c), Script::Tamil | Script::Malayalam | Script::Devanagari)
}

/// Simple one-to-one lowercase mapping; characters whose full lowercase
/// expands to several code points keep only the first one.
fn lower(c: char) -> char {
    c.to_lowercase().next().unwrap_or(c)
}

pub fn normalize_text(raw: &str, cfg: &NormalizationConfig) -> String {
    let mut chars: Vec<char> = raw.chars().collect();
    if cfg.strip_specials {
        chars.retain(|&c| is_kept(c));
    }
    if cfg.strip_emoji {
        chars.retain(|&c| !is_emoji(c));
    }
    if cfg.lowercase {
        for c in chars.iter_mut() {
            *c = lower(*c);
        }
    }
    let s: String = chars.into_iter().collect();
    if cfg.collapse_whitespace {
        s.split_whitespace().collect::<Vec<_>>().join(" ")
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn norm(s: &str) -> String {
        normalize_text(s, &NormalizationConfig::default())
    }

    /// Straight-line restatement of the four rules on a hand-picked input.
    #[test]
    fn hand_applied_rules() {
        assert_eq!(norm("Fox News is pure Garbage!"), "fox news is pure garbage");
        assert_eq!(norm(""), "");
        assert_eq!(norm("Hope\t\t@user 🙂  WINS"), "hope user wins");
        assert_eq!(norm("  #Love   wins!!! ❤️ "), "love wins");
        assert_eq!(norm("visit https://t.co/ab"), "visit httpstcoab");
    }

    #[test]
    fn emoji_membership() {
        assert!(is_emoji('\u{1F600}'));
        assert!(is_emoji('\u{2764}'));
        assert!(is_emoji('\u{FE0F}'));
        assert!(is_emoji('\u{200D}'));
        assert!(!is_emoji('A'));
        assert!(!is_emoji('\u{0B95}'));
        assert!(!is_emoji('\u{0D15}'));
    }

    #[test]
    fn native_script_survives() {
        assert_eq!(norm("நம்பிக்கை!! இருக்கு"), "நம்பிக்கை இருக்கு");
        assert_eq!(norm("സ്നേഹം, എല്ലാം"), "സ്നേഹം എല്ലാം");
    }

    #[test]
    fn flags_disable_steps() {
        let cfg = NormalizationConfig { lowercase: false, ..Default::default() };
        assert_eq!(normalize_text("ABC d", &cfg), "ABC d");
        let cfg = NormalizationConfig { strip_specials: false, ..Default::default() };
        assert_eq!(normalize_text("a@b 🙂", &cfg), "a@b");
        let cfg = NormalizationConfig { collapse_whitespace: false, ..Default::default() };
        assert_eq!(normalize_text(" a  b ", &cfg), " a  b ");
    }

    fn indic_multiset(s: &str) -> Vec<char> {
        let mut v: Vec<char> =
            s.chars().filter(|&c| matches!(script_of(c), Script::Tamil | Script::Malayalam)).collect();
        v.sort_unstable();
        v
    }

    fn mixed_text() -> impl Strategy<Value = String> {
        let piece = prop_oneof![
            any::<char>().prop_map(|c| c.to_string()),
            "[a-zA-Z ]{1,6}",
            "[\u{0B80}-\u{0BFF}\u{0D00}-\u{0D7F}]{1,4}",
            "[\u{1F600}-\u{1F64F}@#!\t\n ]{1,3}",
        ];
        prop::collection::vec(piece, 0..12).prop_map(|v| v.concat())
    }

    proptest! {
        #[test]
        fn idempotent(s in mixed_text()) {
            let once = norm(&s);
            prop_assert_eq!(norm(&once), once);
        }

        #[test]
        fn indic_code_points_preserved(s in mixed_text()) {
            prop_assert_eq!(indic_multiset(&norm(&s)), indic_multiset(&s));
        }

        #[test]
        fn no_double_spaces_or_markers(s in mixed_text()) {
            let out = norm(&s);
            prop_assert!(!out.contains("  "));
            prop_assert!(!out.contains('@'));
            prop_assert!(!out.contains('#'));
            prop_assert_eq!(out.trim(), out.as_str());
            prop_assert!(!out.chars().any(is_emoji));
        }
    }
}
