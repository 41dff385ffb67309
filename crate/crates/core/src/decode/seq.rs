//! Keypad digit sequences naming Braille cells.
//!
//! The numeric keypad stands in for the six dots: keys 7, 4, 1 are the left
//! column (dots 1-3) and 8, 5, 2 the right column (dots 4-6). A cell's
//! canonical sequence lists its keys in keypad reading order 7,8,4,5,1,2.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::extract::DotPattern;

#[derive(Debug, Error, PartialEq, Eq, Clone)]
pub enum SeqError {
    #[error("digit {0} is not a dot key (expected one of 7,4,1,8,5,2)")]
    InvalidDigit(u8),
    #[error("dot key {0} appears more than once")]
    DuplicateDigit(u8),
    #[error("not a digit: {0:?}")]
    NotADigit(char),
}

/// Keypad digits in canonical order, paired with the dot each one raises.
pub const CANONICAL_KEYS: [(u8, u8); 6] = [(7, 1), (8, 4), (4, 2), (5, 5), (1, 3), (2, 6)];

/// Dot number for a keypad digit.
pub fn key_to_dot(key: u8) -> Option<u8> {
    CANONICAL_KEYS.iter().find(|&&(k, _)| k == key).map(|&(_, d)| d)
}

pub fn dot_to_key(dot: u8) -> Option<u8> {
    CANONICAL_KEYS.iter().find(|&&(_, d)| d == dot).map(|&(k, _)| k)
}

/// A set of dot keys in canonical order; the empty sequence is a blank cell.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct CanonicalSeq(DotPattern);

impl CanonicalSeq {
    pub fn pattern(self) -> DotPattern {
        self.0
    }

    pub fn is_empty(self) -> bool {
        self.0.is_blank()
    }

    /// Keypad digits in canonical order.
    pub fn digits(self) -> impl Iterator<Item = u8> {
        CANONICAL_KEYS
            .into_iter()
            .filter(move |&(_, dot)| self.0.has_dot(dot))
            .map(|(key, _)| key)
    }

    /// Position of each digit in canonical order, the trie's child index.
    pub fn positions(self) -> impl Iterator<Item = usize> {
        CANONICAL_KEYS
            .into_iter()
            .enumerate()
            .filter(move |(_, (_, dot))| self.0.has_dot(*dot))
            .map(|(i, _)| i)
    }

    pub fn all() -> impl Iterator<Item = CanonicalSeq> {
        DotPattern::all().map(CanonicalSeq)
    }
}

impl fmt::Display for CanonicalSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in self.digits() {
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for CanonicalSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CanonicalSeq(\"{self}\")")
    }
}

impl FromStr for CanonicalSeq {
    type Err = SeqError;

    /// Accepts the digits in any order.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let digits = s
            .chars()
            .map(|c| c.to_digit(10).map(|d| d as u8).ok_or(SeqError::NotADigit(c)))
            .collect::<Result<Vec<_>, _>>()?;
        canonicalize(&digits)
    }
}

/// Sorts a typed set of dot keys into canonical order.
pub fn canonicalize(digits: &[u8]) -> Result<CanonicalSeq, SeqError> {
    let mut dots = Vec::with_capacity(digits.len());
    for &key in digits {
        let dot = key_to_dot(key).ok_or(SeqError::InvalidDigit(key))?;
        if dots.contains(&dot) {
            return Err(SeqError::DuplicateDigit(key));
        }
        dots.push(dot);
    }
    Ok(CanonicalSeq(
        DotPattern::from_dots(&dots).expect("dots come from the key map"),
    ))
}

pub fn pattern_to_canonical(p: DotPattern) -> CanonicalSeq {
    CanonicalSeq(p)
}
