use std::fmt;
use std::str::FromStr;

/// Task label of a comment.
///
/// The declaration order is the canonical class order used for tie-breaking
/// and for report layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Label {
    Hope,
    NotHope,
    NotLanguage,
}

impl Label {
    pub const ALL: [Label; 3] = [Label::Hope, Label::NotHope, Label::NotLanguage];

    /// Maps a HopeEDI label string onto a label. Matching trims surrounding
    /// whitespace and ignores ASCII case. The alias table is closed.
    pub fn from_alias(raw: &str) -> Option<Label> {
        let s = raw.trim().to_ascii_lowercase();
        match s.as_str() {
            "hope_speech" => Some(Label::Hope),
            "non_hope_speech" => Some(Label::NotHope),
            "not-english" | "not-tamil" | "not-malayalam" | "not-in-intended-language" => Some(Label::NotLanguage),
            _ => None,
        }
    }

    /// Label string as written to prediction files for `lang`.
    pub fn file_name(self, lang: DatasetLang) -> &'static str {
        match self {
            Label::Hope => "Hope_speech",
            Label::NotHope => "Non_hope_speech",
            Label::NotLanguage => match lang {
                DatasetLang::English => "not-English",
                DatasetLang::Tamil => "not-Tamil",
                DatasetLang::Malayalam => "not-malayalam",
            },
        }
    }

    /// Short display name used in reports.
    pub fn short_name(self) -> &'static str {
        match self {
            Label::Hope => "hope",
            Label::NotHope => "not_hope",
            Label::NotLanguage => "not_lang",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

impl FromStr for Label {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if let Some(l) = Label::from_alias(s) {
            return Ok(l);
        }
        match s.trim().to_ascii_lowercase().as_str() {
            "hope" => Ok(Label::Hope),
            "not_hope" | "nothope" => Ok(Label::NotHope),
            "not_lang" | "notlanguage" => Ok(Label::NotLanguage),
            other => Err(format!("unknown label `{other}`")),
        }
    }
}

/// Language a dataset was collected for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DatasetLang {
    English,
    Tamil,
    Malayalam,
}

impl DatasetLang {
    pub const ALL: [DatasetLang; 3] = [DatasetLang::English, DatasetLang::Tamil, DatasetLang::Malayalam];

    pub fn code(self) -> &'static str {
        match self {
            DatasetLang::English => "en",
            DatasetLang::Tamil => "ta",
            DatasetLang::Malayalam => "ml",
        }
    }

    /// Whether comments of this dataset go through transliteration.
    pub fn is_indic(self) -> bool {
        !matches!(self, DatasetLang::English)
    }
}

impl fmt::Display for DatasetLang {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for DatasetLang {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "en" | "english" => Ok(DatasetLang::English),
            "ta" | "tamil" => Ok(DatasetLang::Tamil),
            "ml" | "malayalam" => Ok(DatasetLang::Malayalam),
            other => Err(format!("unknown dataset language `{other}` (expected en, ta or ml)")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn aliases_are_case_insensitive_and_trimmed() {
        assert_eq!(Label::from_alias(" HOPE_speech "), Some(Label::Hope));
        assert_eq!(Label::from_alias("non_hope_speech"), Some(Label::NotHope));
        assert_eq!(Label::from_alias("Not-Malayalam"), Some(Label::NotLanguage));
        assert_eq!(Label::from_alias("not-English"), Some(Label::NotLanguage));
        assert_eq!(Label::from_alias("not-in-intended-language"), Some(Label::NotLanguage));
        assert_eq!(Label::from_alias("not-Hindi"), None);
        assert_eq!(Label::from_alias("hope"), None);
    }

    #[test]
    fn file_names_round_trip_through_aliases() {
        for lang in DatasetLang::ALL {
            for l in Label::ALL {
                assert_eq!(Label::from_alias(l.file_name(lang)), Some(l));
            }
        }
    }
}
