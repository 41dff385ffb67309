//! Live Braille entry from a numeric keypad.
//!
//! Keys 7,4,1,8,5,2 raise dots 1-6 of the cell being typed. 0 ends the cell,
//! 3 ends the word and 6 ends the sentence. The session text is always the
//! decoding of the cells typed so far, exactly as if they had been scanned:
//! a word break is a blank cell and a sentence break starts a new row. A
//! later cell can therefore change how earlier ones read (a lone `b` in
//! contracted English is the wordsign "but" until a second letter follows).

use std::sync::Arc;

use serde::Serialize;

use crate::decode::{canonicalize, key_to_dot, Decoder, SeqError};
use crate::extract::{DotPattern, PatternRow};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    Letter,
    WordBoundary,
    SentenceEnd,
    Error,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DecodeEvent {
    pub kind: EventKind,
    /// Text appended by this key, after any earlier text it rewrote.
    pub text: String,
    /// Why an error event was raised.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl DecodeEvent {
    fn error(detail: impl Into<String>) -> Self {
        Self { kind: EventKind::Error, text: String::new(), detail: Some(detail.into()) }
    }
}

pub const LETTER_KEY: u8 = 0;
pub const WORD_KEY: u8 = 3;
pub const SENTENCE_KEY: u8 = 6;

#[derive(Debug, Clone)]
pub struct KeypadSession {
    decoder: Arc<Decoder>,
    pending: Vec<u8>,
    /// Finished rows, decoded once.
    done_text: String,
    row: PatternRow,
    text: String,
}

/// Part of `new` after its longest common prefix with `old`.
fn appended(old: &str, new: &str) -> String {
    let mut cut = 0;
    for ((i, a), b) in old.char_indices().zip(new.chars()) {
        if a != b {
            break;
        }
        cut = i + a.len_utf8();
    }
    new[cut..].to_string()
}

impl KeypadSession {
    pub fn new(decoder: Arc<Decoder>) -> Self {
        Self {
            decoder,
            pending: Vec::new(),
            done_text: String::new(),
            row: Vec::new(),
            text: String::new(),
        }
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    /// Dot keys typed for the current cell, in typing order.
    pub fn pending(&self) -> &[u8] {
        &self.pending
    }

    pub fn decoder(&self) -> &Decoder {
        &self.decoder
    }

    fn refresh(&mut self) -> String {
        let (row_text, _) = self.decoder.decode_text(std::slice::from_ref(&self.row));
        let new = format!("{}{}", self.done_text, row_text);
        let added = appended(&self.text, &new);
        self.text = new;
        added
    }

    /// Ends the pending cell. `Ok(false)` when nothing was pending.
    fn flush(&mut self) -> Result<bool, String> {
        if self.pending.is_empty() {
            return Ok(false);
        }
        let keys = std::mem::take(&mut self.pending);
        let seq = canonicalize(&keys).map_err(|e: SeqError| e.to_string())?;
        if self.decoder.trie.lookup(seq).is_empty() {
            return Err(format!("no entry for {seq}"));
        }
        self.row.push(seq.pattern());
        Ok(true)
    }

    pub fn feed(&mut self, key: u8) -> DecodeEvent {
        match key {
            LETTER_KEY => match self.flush() {
                Ok(true) => DecodeEvent { kind: EventKind::Letter, text: self.refresh(), detail: None },
                Ok(false) => DecodeEvent::error("no dots typed"),
                Err(e) => DecodeEvent::error(e),
            },
            WORD_KEY | SENTENCE_KEY => {
                if let Err(e) = self.flush() {
                    return DecodeEvent::error(e);
                }
                let kind = if key == WORD_KEY {
                    self.row.push(DotPattern::BLANK);
                    EventKind::WordBoundary
                } else {
                    let (row_text, _) = self.decoder.decode_text(std::slice::from_ref(&self.row));
                    self.done_text.push_str(&row_text);
                    self.done_text.push('\n');
                    self.row.clear();
                    EventKind::SentenceEnd
                };
                DecodeEvent { kind, text: self.refresh(), detail: None }
            }
            k => match key_to_dot(k) {
                Some(_) if self.pending.contains(&k) => {
                    self.pending.clear();
                    DecodeEvent::error(format!("dot key {k} pressed twice"))
                }
                Some(_) => {
                    self.pending.push(k);
                    DecodeEvent { kind: EventKind::Letter, text: String::new(), detail: None }
                }
                None => self.reject(k),
            },
        }
    }

    /// Refuses a key outside the keypad, clearing the cell being typed.
    pub fn reject(&mut self, key: impl std::fmt::Display) -> DecodeEvent {
        self.pending.clear();
        DecodeEvent::error(format!("{key} is not a keypad key"))
    }

    /// Session text after feeding every key of `keys` to a fresh session.
    pub fn replay(decoder: Arc<Decoder>, keys: &[u8]) -> String {
        let mut s = Self::new(decoder);
        for &k in keys {
            s.feed(k);
        }
        s.text
    }
}
