//! Context-sensitive decoding of cell rows into tokens.
//!
//! A row is split into words at blank cells. Within a word:
//!
//! * trailing cells with a punctuation reading are punctuation, and so are
//!   leading cells whose only reading is punctuation; everywhere else a
//!   shared cell takes its letter-group reading (`,` / `ea`, `;` / `be`);
//! * a word that is a single cell with a contraction reading is that
//!   contraction (wordsigns only stand alone);
//! * otherwise each cell prefers letter, then contraction, then
//!   punctuation, then digit;
//! * after the number sign, cells with a digit reading are digits until the
//!   first cell without one.

use serde::Serialize;

use super::table::{EntryClass, MappingEntry, NUMBER_SIGN};
use super::trie::DecodeTrie;
use super::seq::pattern_to_canonical;
use crate::extract::{DotPattern, PatternRow};

/// Shown for a cell the table does not map.
pub const REPLACEMENT: char = '\u{FFFD}';

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TokenKind {
    Text(EntryClass),
    /// A blank cell.
    Space,
    /// A cell consumed as a mode switch.
    Indicator,
    /// An unmapped cell.
    Replacement,
    /// Boundary between two rows; not a cell.
    LineBreak,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Token {
    pub kind: TokenKind,
    pub text: String,
}

impl Token {
    fn text(class: EntryClass, s: &str) -> Self {
        Self { kind: TokenKind::Text(class), text: s.to_string() }
    }

    fn bare(kind: TokenKind) -> Self {
        Self { kind, text: String::new() }
    }

    pub fn is_cell(&self) -> bool {
        self.kind != TokenKind::LineBreak
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct DecodeStats {
    pub cells: usize,
    pub blank: usize,
    pub unmapped: usize,
    pub words: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decoded {
    pub tokens: Vec<Token>,
    pub stats: DecodeStats,
}

fn has(cell: &[&MappingEntry], class: EntryClass) -> bool {
    cell.iter().any(|e| e.class == class)
}

fn pick<'a>(cell: &[&'a MappingEntry], class: EntryClass) -> Option<&'a MappingEntry> {
    cell.iter().copied().find(|e| e.class == class)
}

fn is_number_sign(cell: &[&MappingEntry]) -> Option<&'static str> {
    cell.iter()
        .any(|e| e.class == EntryClass::Indicator && e.grapheme == NUMBER_SIGN)
        .then_some(NUMBER_SIGN)
}

fn default_reading(cell: &[&MappingEntry]) -> Token {
    for class in [
        EntryClass::Letter,
        EntryClass::Contraction,
        EntryClass::Punctuation,
        EntryClass::Digit,
    ] {
        if let Some(e) = pick(cell, class) {
            return Token::text(class, &e.grapheme);
        }
    }
    if pick(cell, EntryClass::Indicator).is_some() {
        return Token::bare(TokenKind::Indicator);
    }
    Token::bare(TokenKind::Replacement)
}

fn decode_word(cells: &[Vec<&MappingEntry>], out: &mut Vec<Token>) {
    let (mut start, mut end) = (0, cells.len());
    while end - start > 1 && has(&cells[end - 1], EntryClass::Punctuation) {
        end -= 1;
    }
    while end - start > 1
        && has(&cells[start], EntryClass::Punctuation)
        && !has(&cells[start], EntryClass::Letter)
        && !has(&cells[start], EntryClass::Contraction)
        && !has(&cells[start], EntryClass::Indicator)
    {
        start += 1;
    }
    let punct = |cell: &[&MappingEntry]| {
        let e = pick(cell, EntryClass::Punctuation).expect("peeled cells are punctuation");
        Token::text(EntryClass::Punctuation, &e.grapheme)
    };
    for cell in &cells[..start] {
        out.push(punct(cell));
    }

    let core = &cells[start..end];
    if let [only] = core {
        if let Some(e) = pick(only, EntryClass::Contraction) {
            out.push(Token::text(EntryClass::Contraction, &e.grapheme));
            for cell in &cells[end..] {
                out.push(punct(cell));
            }
            return;
        }
    }

    let mut numeric = false;
    for cell in core {
        if numeric {
            if let Some(e) = pick(cell, EntryClass::Digit) {
                out.push(Token::text(EntryClass::Digit, &e.grapheme));
                continue;
            }
        }
        if is_number_sign(cell).is_some() {
            numeric = true;
            out.push(Token::bare(TokenKind::Indicator));
            continue;
        }
        numeric = false;
        out.push(default_reading(cell));
    }

    for cell in &cells[end..] {
        out.push(punct(cell));
    }
}

/// Decodes rows of cells; every cell yields exactly one token and rows are
/// separated by [`TokenKind::LineBreak`].
pub fn decode_cells(rows: &[PatternRow], trie: &DecodeTrie) -> Decoded {
    let mut tokens = Vec::new();
    let mut stats = DecodeStats::default();
    for (r, row) in rows.iter().enumerate() {
        if r > 0 {
            tokens.push(Token::bare(TokenKind::LineBreak));
        }
        stats.cells += row.len();
        let mut i = 0;
        while i < row.len() {
            if row[i].is_blank() {
                tokens.push(Token::bare(TokenKind::Space));
                stats.blank += 1;
                i += 1;
                continue;
            }
            let j = row[i..]
                .iter()
                .position(|p| p.is_blank())
                .map_or(row.len(), |k| i + k);
            let lookups: Vec<Vec<&MappingEntry>> = row[i..j]
                .iter()
                .map(|&p: &DotPattern| trie.lookup(pattern_to_canonical(p)))
                .collect();
            decode_word(&lookups, &mut tokens);
            stats.words += 1;
            i = j;
        }
    }
    stats.unmapped = tokens
        .iter()
        .filter(|t| t.kind == TokenKind::Replacement)
        .count();
    Decoded { tokens, stats }
}

/// Plain concatenation of token text, for scripts without composition.
pub fn tokens_to_text(tokens: &[Token]) -> String {
    let mut out = String::new();
    for t in tokens {
        match t.kind {
            TokenKind::Text(_) => out.push_str(&t.text),
            TokenKind::Space => out.push(' '),
            TokenKind::LineBreak => out.push('\n'),
            TokenKind::Replacement => out.push(REPLACEMENT),
            TokenKind::Indicator => {}
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decode::table::{Language, MappingTable};
    use crate::decode::trie::build_trie;

    fn trie(grade: u8) -> DecodeTrie {
        build_trie(&MappingTable::shipped(Language::English, grade).unwrap()).unwrap()
    }

    fn cell(dots: &[u8]) -> DotPattern {
        DotPattern::from_dots(dots).unwrap()
    }

    const SPACE: &[u8] = &[];
    const NUM: &[u8] = &[3, 4, 5, 6];

    fn decode(rows: &[&[&[u8]]], grade: u8) -> String {
        let rows: Vec<PatternRow> = rows
            .iter()
            .map(|r| r.iter().map(|d| cell(d)).collect())
            .collect();
        tokens_to_text(&decode_cells(&rows, &trie(grade)).tokens)
    }

    #[test]
    fn single_letter() {
        assert_eq!(decode(&[&[&[1]]], 1), "a");
    }

    #[test]
    fn standalone_wordsign() {
        assert_eq!(decode(&[&[SPACE, &[1, 2], SPACE]], 2), " but ");
        assert_eq!(decode(&[&[&[1, 2]]], 2), "but");
        // Grade 1 has no contractions.
        assert_eq!(decode(&[&[&[1, 2]]], 1), "b");
    }

    #[test]
    fn wordsign_cell_inside_a_word_is_a_letter() {
        assert_eq!(decode(&[&[&[1, 2], &[1]]], 2), "ba");
    }

    #[test]
    fn part_word_contractions() {
        // o + the + r
        assert_eq!(decode(&[&[&[1, 3, 5], &[2, 3, 4, 6], &[1, 2, 3, 5]]], 2), "other");
    }

    #[test]
    fn number_mode() {
        assert_eq!(decode(&[&[NUM, &[1]]], 1), "1");
        assert_eq!(decode(&[&[NUM, &[1, 2], &[2, 4, 5], &[1, 4, 5]]], 2), "204");
        // Mode ends at a cell without a digit reading.
        assert_eq!(decode(&[&[NUM, &[1], &[1, 3]]], 1), "1k");
        // ... and at a space.
        assert_eq!(decode(&[&[NUM, &[1], SPACE, &[1]]], 1), "1 a");
    }

    #[test]
    fn blank_cell_is_a_space() {
        assert_eq!(decode(&[&[SPACE]], 1), " ");
    }

    #[test]
    fn punctuation_versus_letter_groups() {
        // "sea," would be s, e, a, comma; the comma cell at the end is punctuation.
        assert_eq!(decode(&[&[&[2, 3, 4], &[1, 5], &[1], &[2]]], 2), "sea,");
        // Inside a word the same cell is the letter group.
        assert_eq!(decode(&[&[&[1, 2, 4, 5], &[1, 2, 3, 5], &[2], &[2, 3, 4, 5]]], 2), "great");
        // be; versus be-
        assert_eq!(decode(&[&[&[2, 3], &[2, 3, 4], &[2, 3, 4, 5]]], 2), "best");
        assert_eq!(decode(&[&[&[1, 3, 5], &[1, 2, 4], &[2, 3]]], 2), "of;");
        assert_eq!(decode(&[&[&[2, 3]]], 2), "be");
        assert_eq!(decode(&[&[&[2, 3], &[2]]], 2), "be,");
        assert_eq!(decode(&[&[&[2, 3], &[2]]], 1), ";,");
    }

    #[test]
    fn contraction_with_trailing_punctuation() {
        assert_eq!(decode(&[&[&[1, 2], &[2, 5, 6]]], 2), "but.");
        assert_eq!(decode(&[&[&[2, 3, 4, 6], &[2]]], 2), "the,");
    }

    #[test]
    fn unmapped_cells_become_replacements() {
        let rows = vec![vec![cell(&[1, 2, 3, 4, 5, 6]), cell(&[1])]];
        let d = decode_cells(&rows, &trie(1));
        assert_eq!(tokens_to_text(&d.tokens), "\u{FFFD}a");
        assert_eq!(d.stats.unmapped, 1);
        assert_eq!(d.stats.cells, 2);
    }

    #[test]
    fn rows_are_separated() {
        let d = decode_cells(
            &[vec![cell(&[1])], vec![cell(&[1, 2]), DotPattern::BLANK, cell(&[1])]],
            &trie(1),
        );
        assert_eq!(tokens_to_text(&d.tokens), "a\nb a");
        assert_eq!(d.stats.words, 3);
        assert_eq!(d.stats.blank, 1);
        assert_eq!(d.tokens.iter().filter(|t| t.is_cell()).count(), 4);
    }

    #[test]
    fn one_token_per_cell_for_every_pair() {
        let t = trie(2);
        for a in DotPattern::all() {
            for b in DotPattern::all() {
                let d = decode_cells(&[vec![a, b, a]], &t);
                assert_eq!(d.tokens.iter().filter(|t| t.is_cell()).count(), 3);
            }
        }
    }
}
