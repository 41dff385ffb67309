//! Dot patterns from segmented cells, by counting edge pixels per grid.

use std::fmt;

use thiserror::Error;

use crate::image::{BinaryImage, Rect};
use crate::layout::PageLayout;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ExtractError {
    #[error("degenerate grid rect {0}")]
    DegenerateGrid(Rect),
    #[error("grid rect {0} lies outside the image")]
    OutOfImage(Rect),
    #[error("malformed bit string: {0}")]
    BadBits(String),
}

/// The six dots of one Braille cell. Bit `k - 1` holds dot `k`; dots 1-3 run
/// down the left column and 4-6 down the right.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct DotPattern(u8);

impl DotPattern {
    pub const BLANK: DotPattern = DotPattern(0);

    /// From a 6-bit mask; higher bits are rejected.
    pub fn from_bits(bits: u8) -> Option<Self> {
        (bits < 64).then_some(Self(bits))
    }

    pub fn from_dots(dots: &[u8]) -> Option<Self> {
        let mut bits = 0u8;
        for &d in dots {
            if !(1..=6).contains(&d) {
                return None;
            }
            bits |= 1 << (d - 1);
        }
        Some(Self(bits))
    }

    pub fn bits(self) -> u8 {
        self.0
    }

    pub fn has_dot(self, dot: u8) -> bool {
        (1..=6).contains(&dot) && self.0 & (1 << (dot - 1)) != 0
    }

    pub fn dots(self) -> impl Iterator<Item = u8> {
        (1..=6).filter(move |&d| self.has_dot(d))
    }

    pub fn is_blank(self) -> bool {
        self.0 == 0
    }

    pub fn all() -> impl Iterator<Item = DotPattern> {
        (0..64).map(DotPattern)
    }

    /// Six ASCII digits, dot 1 first.
    pub fn to_bit_string(self) -> String {
        (1..=6).map(|d| if self.has_dot(d) { '1' } else { '0' }).collect()
    }

    pub fn parse_bit_string(s: &str) -> Result<Self, ExtractError> {
        if s.len() != 6 {
            return Err(ExtractError::BadBits(s.to_string()));
        }
        let mut bits = 0;
        for (i, c) in s.chars().enumerate() {
            match c {
                '1' => bits |= 1 << i,
                '0' => {}
                _ => return Err(ExtractError::BadBits(s.to_string())),
            }
        }
        Ok(Self(bits))
    }

    /// Unicode Braille Patterns glyph (U+2800 block), handy in diagnostics.
    pub fn to_unicode(self) -> char {
        char::from_u32(0x2800 + self.0 as u32).expect("within the Braille block")
    }
}

impl fmt::Debug for DotPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DotPattern({})", self.to_bit_string())
    }
}

impl fmt::Display for DotPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_bit_string())
    }
}

/// Patterns of one text line in left-to-right cell order.
pub type PatternRow = Vec<DotPattern>;

/// Thresholding rule for deciding whether a grid holds a dot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FillCriterion {
    /// Fraction of the expected dot area that must be foreground.
    pub fill_threshold: f64,
    /// Expected dot area in pixels.
    pub dot_area_px: f64,
}

impl FillCriterion {
    pub fn min_count(&self) -> f64 {
        self.fill_threshold * self.dot_area_px
    }
}

pub fn extract_pattern(
    bin: &BinaryImage,
    grids: &[Rect; 6],
    criterion: FillCriterion,
) -> Result<DotPattern, ExtractError> {
    let need = criterion.min_count();
    let mut bits = 0u8;
    for (i, r) in grids.iter().enumerate() {
        if r.w == 0 || r.h == 0 {
            return Err(ExtractError::DegenerateGrid(*r));
        }
        if r.right() > bin.width() || r.bottom() > bin.height() {
            return Err(ExtractError::OutOfImage(*r));
        }
        if bin.count_in(*r) as f64 >= need {
            bits |= 1 << i;
        }
    }
    Ok(DotPattern(bits))
}

pub fn extract_page_patterns(
    bin: &BinaryImage,
    layout: &PageLayout,
    criterion: FillCriterion,
) -> Result<Vec<PatternRow>, ExtractError> {
    layout
        .grids
        .iter()
        .map(|line| {
            line.iter()
                .map(|grids| extract_pattern(bin, grids, criterion))
                .collect()
        })
        .collect()
}

/// Diagnostic dump: six '0'/'1' per cell, cells separated by spaces, one
/// text line per row.
pub fn bit_string_dump(rows: &[PatternRow]) -> String {
    let mut out = String::new();
    for row in rows {
        let cells: Vec<String> = row.iter().map(|p| p.to_bit_string()).collect();
        out.push_str(&cells.join(" "));
        out.push('\n');
    }
    out
}

pub fn parse_bit_string_dump(text: &str) -> Result<Vec<PatternRow>, ExtractError> {
    text.lines()
        .map(|line| {
            line.split_whitespace()
                .map(DotPattern::parse_bit_string)
                .collect()
        })
        .collect()
}
