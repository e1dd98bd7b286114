//! Rule-based stemmers: Porter (original 1980 rules), Lancaster
//! (Paice/Husk) and Snowball for English, French, German, Italian,
//! Portuguese and Spanish.
//!
//! ```
//! use llmprep_stem::{Language, Stemmer};
//!
//! assert_eq!(Stemmer::Porter.stem("programs"), "program");
//! assert_eq!(Stemmer::Snowball(Language::Italian).stem("parlando"), "parl");
//! ```

pub mod lancaster;
pub mod porter;
mod snowball;

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum RuleError {
    #[error("invalid Lancaster rule {0:?}")]
    Lancaster(String),
    #[error("unknown language {0:?} (expected one of en, fr, de, it, pt, es)")]
    Language(String),
    #[error("unknown stemmer {0:?} (expected porter, lancaster or snowball[:<lang>])")]
    Stemmer(String),
    #[error("{stemmer} is not available for {language}")]
    Unsupported { stemmer: String, language: Language },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Language {
    #[serde(rename = "en")]
    English,
    #[serde(rename = "fr")]
    French,
    #[serde(rename = "de")]
    German,
    #[serde(rename = "it")]
    Italian,
    #[serde(rename = "pt")]
    Portuguese,
    #[serde(rename = "es")]
    Spanish,
}

impl Language {
    pub const ALL: [Language; 6] = [
        Language::English,
        Language::French,
        Language::German,
        Language::Italian,
        Language::Portuguese,
        Language::Spanish,
    ];

    /// ISO 639-1 code.
    pub fn code(self) -> &'static str {
        match self {
            Language::English => "en",
            Language::French => "fr",
            Language::German => "de",
            Language::Italian => "it",
            Language::Portuguese => "pt",
            Language::Spanish => "es",
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Language::English => "english",
            Language::French => "french",
            Language::German => "german",
            Language::Italian => "italian",
            Language::Portuguese => "portuguese",
            Language::Spanish => "spanish",
        }
    }
}

impl fmt::Display for Language {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for Language {
    type Err = RuleError;

    /// Accepts the ISO code or the English name, case-insensitively.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.trim().to_lowercase();
        Language::ALL
            .into_iter()
            .find(|l| l.code() == lower || l.name() == lower)
            .ok_or_else(|| RuleError::Language(s.to_string()))
    }
}

/// A concrete stemming algorithm.
///
/// Text form: `porter`, `lancaster`, `snowball:<code>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Stemmer {
    Porter,
    Lancaster,
    Snowball(Language),
}

fn default_lancaster() -> &'static lancaster::Lancaster {
    static CELL: OnceLock<lancaster::Lancaster> = OnceLock::new();
    CELL.get_or_init(lancaster::Lancaster::default)
}

impl Stemmer {
    /// Stemmers usable for `language`, in reporting order.
    pub fn available_for(language: Language) -> Vec<Stemmer> {
        match language {
            Language::English => vec![Stemmer::Porter, Stemmer::Lancaster, Stemmer::Snowball(Language::English)],
            other => vec![Stemmer::Snowball(other)],
        }
    }

    /// Checks that the algorithm covers `language`.
    pub fn for_language(self, language: Language) -> Result<Stemmer, RuleError> {
        let ok = match self {
            Stemmer::Porter | Stemmer::Lancaster => language == Language::English,
            Stemmer::Snowball(l) => l == language,
        };
        if ok {
            Ok(self)
        } else {
            Err(RuleError::Unsupported {
                stemmer: self.to_string(),
                language,
            })
        }
    }

    /// Short display label: `Porter`, `Lancaster`, `Snowball`.
    pub fn label(self) -> &'static str {
        match self {
            Stemmer::Porter => "Porter",
            Stemmer::Lancaster => "Lancaster",
            Stemmer::Snowball(_) => "Snowball",
        }
    }

    /// Stems one word. Input is lowercased first; strings without any
    /// alphabetic character come back unchanged.
    pub fn stem(self, word: &str) -> String {
        if !word.chars().any(char::is_alphabetic) {
            return word.to_string();
        }
        let lower = word.to_lowercase();
        match self {
            Stemmer::Porter => porter::stem(&lower),
            Stemmer::Lancaster => default_lancaster().stem(&lower),
            Stemmer::Snowball(lang) => snowball::stem(lang, &lower),
        }
    }
}

impl fmt::Display for Stemmer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Stemmer::Porter => f.write_str("porter"),
            Stemmer::Lancaster => f.write_str("lancaster"),
            Stemmer::Snowball(l) => write!(f, "snowball:{}", l.code()),
        }
    }
}

impl FromStr for Stemmer {
    type Err = RuleError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.trim().to_lowercase();
        match lower.as_str() {
            "porter" => Ok(Stemmer::Porter),
            "lancaster" => Ok(Stemmer::Lancaster),
            "snowball" => Ok(Stemmer::Snowball(Language::English)),
            _ => match lower.strip_prefix("snowball:") {
                Some(code) => Ok(Stemmer::Snowball(code.parse()?)),
                None => Err(RuleError::Stemmer(s.to_string())),
            },
        }
    }
}

impl Serialize for Stemmer {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Stemmer {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Stems every word with the same algorithm.
pub fn stem_all<'a, I>(stemmer: Stemmer, words: I) -> Vec<String>
where
    I: IntoIterator<Item = &'a str>,
{
    words.into_iter().map(|w| stemmer.stem(w)).collect()
}
