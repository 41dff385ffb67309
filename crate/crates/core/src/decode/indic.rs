//! Composition of decoded Bharati Braille tokens into Indic text.
//!
//! Braille writes every vowel as a full cell. In the script a vowel that
//! follows a consonant is written as a dependent sign (matra), and the
//! vowel `a` is inherent in the consonant, so it is dropped.

use super::cells::{Token, TokenKind, REPLACEMENT};
use super::table::{EntryClass, Language};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Script {
    Devanagari,
    Tamil,
}

impl Script {
    pub fn for_language(lang: Language) -> Option<Script> {
        match lang {
            Language::English => None,
            Language::Hindi => Some(Script::Devanagari),
            Language::Tamil => Some(Script::Tamil),
        }
    }

    fn inherent_vowel(self) -> char {
        match self {
            Script::Devanagari => '\u{0905}',
            Script::Tamil => '\u{0B85}',
        }
    }

    pub fn is_consonant(self, c: char) -> bool {
        let c = c as u32;
        match self {
            Script::Devanagari => (0x0915..=0x0939).contains(&c) || (0x0958..=0x095F).contains(&c),
            Script::Tamil => (0x0B95..=0x0BB9).contains(&c),
        }
    }

    pub fn is_independent_vowel(self, c: char) -> bool {
        c == self.inherent_vowel() || self.vowel_sign(c).is_some()
    }

    /// Dependent form of an independent vowel (other than `a`).
    ///
    /// Both blocks place each vowel sign 0x38 code points after its
    /// independent vowel.
    pub fn vowel_sign(self, c: char) -> Option<char> {
        let u = c as u32;
        let ok = match self {
            Script::Devanagari => (0x0906..=0x0914).contains(&u) && u != 0x090C,
            Script::Tamil => matches!(u, 0x0B86..=0x0B8A | 0x0B8E..=0x0B90 | 0x0B92..=0x0B94),
        };
        ok.then(|| char::from_u32(u + 0x38)).flatten()
    }

    /// Independent vowel for a dependent vowel sign.
    pub fn independent_of_sign(self, c: char) -> Option<char> {
        let u = c as u32;
        let base = char::from_u32(u.checked_sub(0x38)?)?;
        (self.vowel_sign(base) == Some(c)).then_some(base)
    }
}

fn ends_in_consonant(s: &str, script: Script) -> bool {
    s.chars().last().is_some_and(|c| script.is_consonant(c))
}

pub fn compose_indic(tokens: &[Token], script: Script) -> String {
    let mut out = String::new();
    let mut after_consonant = false;
    for t in tokens {
        match t.kind {
            TokenKind::Text(EntryClass::Letter) => {
                let mut chars = t.text.chars();
                let single = match (chars.next(), chars.next()) {
                    (Some(c), None) => Some(c),
                    _ => None,
                };
                match single {
                    Some(v) if after_consonant && v == script.inherent_vowel() => {}
                    Some(v) if after_consonant && script.vowel_sign(v).is_some() => {
                        out.push(script.vowel_sign(v).expect("checked"));
                    }
                    _ => out.push_str(&t.text),
                }
                after_consonant = ends_in_consonant(&t.text, script)
                    && !(single.is_some_and(|v| script.is_independent_vowel(v)));
            }
            TokenKind::Text(_) => {
                out.push_str(&t.text);
                after_consonant = false;
            }
            TokenKind::Space => {
                out.push(' ');
                after_consonant = false;
            }
            TokenKind::LineBreak => {
                out.push('\n');
                after_consonant = false;
            }
            TokenKind::Replacement => {
                out.push(REPLACEMENT);
                after_consonant = false;
            }
            TokenKind::Indicator => after_consonant = false,
        }
    }
    out
}

/// Final text for a token stream in `lang`.
pub fn render_text(tokens: &[Token], lang: Language) -> String {
    match Script::for_language(lang) {
        Some(script) => compose_indic(tokens, script),
        None => super::cells::tokens_to_text(tokens),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decode::cells::tokens_to_text;

    fn letter(s: &str) -> Token {
        Token { kind: TokenKind::Text(EntryClass::Letter), text: s.into() }
    }

    fn space() -> Token {
        Token { kind: TokenKind::Space, text: String::new() }
    }

    #[test]
    fn consonant_then_vowel_takes_the_sign() {
        let out = compose_indic(&[letter("क"), letter("आ")], Script::Devanagari);
        assert_eq!(out, "\u{0915}\u{093E}");
        let out = compose_indic(&[letter("க"), letter("ஆ")], Script::Tamil);
        assert_eq!(out, "\u{0B95}\u{0BBE}");
    }

    #[test]
    fn word_initial_vowel_stays_independent() {
        assert_eq!(compose_indic(&[letter("आ")], Script::Devanagari), "आ");
        let out = compose_indic(&[letter("क"), space(), letter("आ")], Script::Devanagari);
        assert_eq!(out, "क आ");
    }

    #[test]
    fn inherent_a_is_dropped() {
        assert_eq!(compose_indic(&[letter("क"), letter("अ")], Script::Devanagari), "क");
        assert_eq!(compose_indic(&[letter("அ"), letter("ம")], Script::Tamil), "அம");
    }

    #[test]
    fn vowel_after_vowel_or_virama_is_independent() {
        let toks = [letter("न"), letter("ई"), letter("ई")];
        assert_eq!(compose_indic(&toks, Script::Devanagari), "नीई");
        let toks = [letter("க"), letter("்"), letter("இ")];
        assert_eq!(compose_indic(&toks, Script::Tamil), "க்இ");
    }

    #[test]
    fn conjunct_counts_as_consonant() {
        let toks = [letter("क्ष"), letter("आ")];
        assert_eq!(compose_indic(&toks, Script::Devanagari), "क्षा");
    }

    #[test]
    fn english_is_untouched() {
        let toks = [letter("a"), space(), letter("b")];
        assert_eq!(render_text(&toks, Language::English), tokens_to_text(&toks));
    }

    #[test]
    fn sign_mapping_round_trips() {
        for (script, range) in [
            (Script::Devanagari, 0x0900u32..0x0980),
            (Script::Tamil, 0x0B80u32..0x0C00),
        ] {
            for u in range {
                let c = char::from_u32(u).unwrap();
                if let Some(sign) = script.vowel_sign(c) {
                    assert_eq!(script.independent_of_sign(sign), Some(c));
                }
            }
        }
        assert_eq!(Script::Tamil.vowel_sign('ஔ'), Some('\u{0BCC}'));
        assert_eq!(Script::Devanagari.vowel_sign('ऋ'), Some('\u{0943}'));
        assert_eq!(Script::Devanagari.vowel_sign('अ'), None);
    }
}
