//! Dot patterns to text: keypad sequences, mapping tables, the decode trie,
//! contextual cell decoding and Indic composition.

mod cells;
mod indic;
mod seq;
mod table;
mod trie;

pub use cells::{decode_cells, tokens_to_text, DecodeStats, Decoded, Token, TokenKind, REPLACEMENT};
pub use indic::{compose_indic, render_text, Script};
pub use seq::{
    canonicalize, dot_to_key, key_to_dot, pattern_to_canonical, CanonicalSeq, SeqError,
    CANONICAL_KEYS,
};
pub use table::{EntryClass, Language, MappingEntry, MappingTable, TableError, NUMBER_SIGN};
pub use trie::{build_trie, DecodeTrie};

/// A table together with its trie.
#[derive(Debug, Clone)]
pub struct Decoder {
    pub table: MappingTable,
    pub trie: DecodeTrie,
}

impl Decoder {
    pub fn new(table: MappingTable) -> Result<Self, TableError> {
        let trie = build_trie(&table)?;
        Ok(Self { table, trie })
    }

    pub fn shipped(language: Language, grade: u8) -> Result<Self, TableError> {
        Self::new(MappingTable::shipped(language, grade)?)
    }

    pub fn language(&self) -> Language {
        self.table.language
    }

    /// Decodes rows and renders them as text in the table's language.
    pub fn decode_text(&self, rows: &[crate::extract::PatternRow]) -> (String, Decoded) {
        let decoded = decode_cells(rows, &self.trie);
        (render_text(&decoded.tokens, self.language()), decoded)
    }
}
