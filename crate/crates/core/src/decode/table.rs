//! Language mapping tables and their tab-separated file format.
//!
//! One entry per line: `seq<TAB>class<TAB>grapheme`. Lines starting with `#`
//! are comments. Sequences may be written in any digit order and are
//! canonicalized on load.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::seq::{CanonicalSeq, SeqError};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TableError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: {source}")]
    BadSeq { line: usize, source: SeqError },
    #[error("duplicate entry for sequence {seq} with class {class}")]
    Duplicate { seq: CanonicalSeq, class: EntryClass },
    #[error("no shipped table for {language} grade {grade}")]
    NotShipped { language: Language, grade: u8 },
    #[error("unknown language {0:?}")]
    UnknownLanguage(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EntryClass {
    Letter,
    Contraction,
    Punctuation,
    Digit,
    Indicator,
}

impl EntryClass {
    pub fn as_str(self) -> &'static str {
        match self {
            EntryClass::Letter => "letter",
            EntryClass::Contraction => "contraction",
            EntryClass::Punctuation => "punctuation",
            EntryClass::Digit => "digit",
            EntryClass::Indicator => "indicator",
        }
    }
}

impl fmt::Display for EntryClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EntryClass {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "letter" => EntryClass::Letter,
            "contraction" => EntryClass::Contraction,
            "punctuation" => EntryClass::Punctuation,
            "digit" => EntryClass::Digit,
            "indicator" => EntryClass::Indicator,
            other => return Err(format!("unknown class {other:?}")),
        })
    }
}

/// Grapheme of the indicator that switches letters a-j to digits.
pub const NUMBER_SIGN: &str = "number";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Language {
    #[serde(alias = "en")]
    English,
    #[serde(alias = "hi")]
    Hindi,
    #[serde(alias = "ta")]
    Tamil,
}

impl Language {
    pub fn code(self) -> &'static str {
        match self {
            Language::English => "en",
            Language::Hindi => "hi",
            Language::Tamil => "ta",
        }
    }
}

impl fmt::Display for Language {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Language::English => "english",
            Language::Hindi => "hindi",
            Language::Tamil => "tamil",
        })
    }
}

impl FromStr for Language {
    type Err = TableError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "en" | "english" => Ok(Language::English),
            "hi" | "hindi" => Ok(Language::Hindi),
            "ta" | "tamil" => Ok(Language::Tamil),
            _ => Err(TableError::UnknownLanguage(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MappingEntry {
    pub seq: CanonicalSeq,
    pub class: EntryClass,
    /// Output text; a contraction carries the whole word.
    pub grapheme: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MappingTable {
    pub language: Language,
    pub grade: u8,
    pub entries: Vec<MappingEntry>,
}

const ENGLISH_G1: &str = include_str!("../../tables/english_g1.tsv");
const ENGLISH_G2: &str = include_str!("../../tables/english_g2.tsv");
const HINDI: &str = include_str!("../../tables/hindi_bharati.tsv");
const TAMIL: &str = include_str!("../../tables/tamil_bharati.tsv");

impl MappingTable {
    pub fn parse(text: &str, language: Language, grade: u8) -> Result<Self, TableError> {
        let mut entries = Vec::new();
        let mut seen = HashSet::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw.trim_end_matches('\r');
            if trimmed.trim().is_empty() || trimmed.trim_start().starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = trimmed.split('\t').collect();
            if fields.len() != 3 {
                return Err(TableError::Syntax {
                    line,
                    msg: format!("expected 3 tab-separated fields, found {}", fields.len()),
                });
            }
            let seq: CanonicalSeq = fields[0]
                .trim()
                .parse()
                .map_err(|source| TableError::BadSeq { line, source })?;
            let class: EntryClass = fields[1]
                .trim()
                .parse()
                .map_err(|msg| TableError::Syntax { line, msg })?;
            let grapheme = fields[2].to_string();
            if grapheme.is_empty() {
                return Err(TableError::Syntax { line, msg: "empty grapheme".into() });
            }
            if !seen.insert((seq, class)) {
                return Err(TableError::Duplicate { seq, class });
            }
            entries.push(MappingEntry { seq, class, grapheme });
        }
        Ok(Self { language, grade, entries })
    }

    /// One of the tables bundled with the crate.
    pub fn shipped(language: Language, grade: u8) -> Result<Self, TableError> {
        let text = match (language, grade) {
            (Language::English, 1) => ENGLISH_G1,
            (Language::English, 2) => ENGLISH_G2,
            (Language::Hindi, 1) => HINDI,
            (Language::Tamil, 1) => TAMIL,
            _ => return Err(TableError::NotShipped { language, grade }),
        };
        Self::parse(text, language, grade)
    }

    /// Default grade for a language: contracted English, Bharati otherwise.
    pub fn default_grade(language: Language) -> u8 {
        match language {
            Language::English => 2,
            _ => 1,
        }
    }

    /// Entries at `seq`, by linear scan.
    pub fn scan(&self, seq: CanonicalSeq) -> impl Iterator<Item = &MappingEntry> {
        self.entries.iter().filter(move |e| e.seq == seq)
    }

    pub fn to_tsv(&self) -> String {
        let mut out = format!("# {} grade {}\n", self.language, self.grade);
        for e in &self.entries {
            out.push_str(&format!("{}\t{}\t{}\n", e.seq, e.class, e.grapheme));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(text: &str) -> CanonicalSeq {
        text.parse().unwrap()
    }

    #[test]
    fn shipped_tables_load() {
        for (lang, grade) in [
            (Language::English, 1),
            (Language::English, 2),
            (Language::Hindi, 1),
            (Language::Tamil, 1),
        ] {
            let t = MappingTable::shipped(lang, grade).unwrap();
            assert!(!t.entries.is_empty());
            for class in [EntryClass::Letter, EntryClass::Punctuation] {
                let n: HashSet<_> = t.entries.iter().filter(|e| e.class == class).map(|e| e.seq).collect();
                assert!(n.len() <= 64);
            }
        }
        assert_eq!(
            MappingTable::shipped(Language::Tamil, 2),
            Err(TableError::NotShipped { language: Language::Tamil, grade: 2 })
        );
    }

    #[test]
    fn english_letters_match_the_keypad_chart() {
        let t = MappingTable::shipped(Language::English, 1).unwrap();
        let letters: Vec<_> = t.entries.iter().filter(|e| e.class == EntryClass::Letter).collect();
        assert_eq!(letters.len(), 26);
        let find = |g: &str| letters.iter().find(|e| e.grapheme == g).unwrap().seq.to_string();
        assert_eq!(find("a"), "7");
        assert_eq!(find("g"), "7845");
        assert_eq!(find("n"), "7851");
        assert_eq!(find("y"), "78512");
    }

    #[test]
    fn contractions_are_canonicalized_on_load() {
        let t = MappingTable::shipped(Language::English, 2).unwrap();
        let the = t.entries.iter().find(|e| e.grapheme == "the").unwrap();
        assert_eq!(the.seq, s("8412"));
        assert_eq!(the.class, EntryClass::Contraction);
    }

    #[test]
    fn parse_errors() {
        let bad = "7\tletter\n";
        assert!(matches!(
            MappingTable::parse(bad, Language::English, 1),
            Err(TableError::Syntax { line: 1, .. })
        ));
        let bad = "# c\n79\tletter\tx\n";
        assert!(matches!(
            MappingTable::parse(bad, Language::English, 1),
            Err(TableError::BadSeq { line: 2, source: SeqError::InvalidDigit(9) })
        ));
        let bad = "7\tsymbol\tx\n";
        assert!(matches!(
            MappingTable::parse(bad, Language::English, 1),
            Err(TableError::Syntax { .. })
        ));
        let dup = "74\tletter\tb\n47\tletter\tq\n";
        assert_eq!(
            MappingTable::parse(dup, Language::English, 1),
            Err(TableError::Duplicate { seq: s("74"), class: EntryClass::Letter })
        );
        // Same seq, different classes is fine.
        let ok = "74\tletter\tb\n47\tcontraction\tbut\n";
        assert_eq!(MappingTable::parse(ok, Language::English, 2).unwrap().entries.len(), 2);
    }

    #[test]
    fn tsv_round_trip() {
        let t = MappingTable::shipped(Language::Hindi, 1).unwrap();
        assert_eq!(MappingTable::parse(&t.to_tsv(), Language::Hindi, 1).unwrap(), t);
    }

    #[test]
    fn language_codes() {
        assert_eq!("hi".parse::<Language>().unwrap(), Language::Hindi);
        assert_eq!("Tamil".parse::<Language>().unwrap(), Language::Tamil);
        assert!("fr".parse::<Language>().is_err());
    }
}
