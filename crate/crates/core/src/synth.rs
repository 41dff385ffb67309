//! Synthetic Braille pages with exact ground truth, and noise models for
//! degrading them.
//!
//! Text is encoded word by word. English uses greedy longest-match
//! contractions where the table has them; Indic text is rewritten into
//! Braille order first (vowel signs become full vowel cells). Every encoded
//! word is decoded again and must reproduce itself, so a page that renders
//! is a page the decoder can read back exactly.

use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::decode::{Decoder, EntryClass, Script, NUMBER_SIGN};
use crate::extract::{DotPattern, PatternRow};
use crate::image::{GrayImage, ImageError, Rect};
use crate::layout::{BrailleGeometry, LayoutError};

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("character {ch:?} in {word:?} has no cell in the table")]
    Unencodable { ch: char, word: String },
    #[error("{word:?} cannot be written so that it reads back unchanged")]
    Ambiguous { word: String },
    #[error("invalid render style: {0}")]
    InvalidStyle(String),
    #[error(transparent)]
    Geometry(#[from] LayoutError),
    #[error(transparent)]
    Image(#[from] ImageError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum DotProfile {
    #[default]
    FilledDisk,
    GaussianBump,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RenderStyle {
    pub background: u8,
    /// Darkest dot intensity; must be below `background`.
    pub dot: u8,
    pub profile: DotProfile,
    /// Seeds the dot position jitter.
    pub seed: u64,
    /// Maximum random offset of each dot centre, in pixels.
    pub jitter_px: f64,
    pub cells_per_line: usize,
    pub margin_mm: f64,
}

impl Default for RenderStyle {
    fn default() -> Self {
        Self {
            background: 200,
            dot: 150,
            profile: DotProfile::FilledDisk,
            seed: 0,
            jitter_px: 0.0,
            cells_per_line: 40,
            margin_mm: 10.0,
        }
    }
}

impl RenderStyle {
    fn validate(&self) -> Result<(), SynthError> {
        if self.dot >= self.background {
            return Err(SynthError::InvalidStyle("dots must be darker than the background".into()));
        }
        if self.cells_per_line == 0 {
            return Err(SynthError::InvalidStyle("cells_per_line must be positive".into()));
        }
        if !(self.margin_mm >= 0.0 && self.jitter_px >= 0.0) {
            return Err(SynthError::InvalidStyle("margin and jitter must be non-negative".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct RenderedPage {
    pub image: GrayImage,
    /// Cells actually drawn, one row per text line.
    pub rows: Vec<PatternRow>,
    /// Expected box of every cell: left edge of the dot-1 disk, top of the
    /// line's dot-1 disks, one cell pitch wide and one line pitch tall.
    pub cell_boxes: Vec<Vec<Rect>>,
    pub line_tops: Vec<usize>,
    /// The input words, single-spaced, one text line per row.
    pub text: String,
}

#[derive(Debug, Clone, Copy)]
struct Candidate<'a> {
    grapheme: &'a str,
    pattern: DotPattern,
    /// Contraction that shares its cell with a letter; only valid alone.
    wordsign: bool,
}

/// Text to cells for one table.
pub struct Encoder<'a> {
    decoder: &'a Decoder,
    script: Option<Script>,
    letters: Vec<Candidate<'a>>,
    contractions: Vec<Candidate<'a>>,
    punctuation: Vec<Candidate<'a>>,
    digits: Vec<Candidate<'a>>,
    number_sign: Option<DotPattern>,
}

impl<'a> Encoder<'a> {
    pub fn new(decoder: &'a Decoder) -> Self {
        let entries = &decoder.table.entries;
        let letter_seqs: Vec<_> = entries
            .iter()
            .filter(|e| e.class == EntryClass::Letter)
            .map(|e| e.seq)
            .collect();
        let of = |class: EntryClass| -> Vec<Candidate<'a>> {
            let mut v: Vec<Candidate<'a>> = entries
                .iter()
                .filter(|e| e.class == class)
                .map(|e| Candidate {
                    grapheme: e.grapheme.as_str(),
                    pattern: e.seq.pattern(),
                    wordsign: class == EntryClass::Contraction && letter_seqs.contains(&e.seq),
                })
                .collect();
            // Longest first, so the first prefix hit is the greedy choice.
            v.sort_by_key(|c| std::cmp::Reverse(c.grapheme.len()));
            v
        };
        let number_sign = entries
            .iter()
            .find(|e| e.class == EntryClass::Indicator && e.grapheme == NUMBER_SIGN)
            .map(|e| e.seq.pattern());
        Self {
            decoder,
            script: Script::for_language(decoder.language()),
            letters: of(EntryClass::Letter),
            contractions: of(EntryClass::Contraction),
            punctuation: of(EntryClass::Punctuation),
            digits: of(EntryClass::Digit),
            number_sign,
        }
    }

    fn punct(&self, c: char) -> Option<DotPattern> {
        let mut buf = [0u8; 4];
        let s: &str = c.encode_utf8(&mut buf);
        self.punctuation.iter().find(|p| p.grapheme == s).map(|p| p.pattern)
    }

    /// Rewrites Indic text into the order cells are written: a vowel sign
    /// becomes its independent vowel, and an independent vowel straight
    /// after a consonant is preceded by an explicit `a` so it stays
    /// independent on the way back.
    fn to_cell_order(&self, core: &str) -> String {
        let Some(script) = self.script else {
            return core.to_string();
        };
        let mut out = String::new();
        let mut after_consonant = false;
        for c in core.chars() {
            if let Some(v) = script.independent_of_sign(c) {
                out.push(v);
                after_consonant = false;
                continue;
            }
            if after_consonant && script.is_independent_vowel(c) {
                out.push(match script {
                    Script::Devanagari => '\u{0905}',
                    Script::Tamil => '\u{0B85}',
                });
            }
            out.push(c);
            after_consonant = script.is_consonant(c);
        }
        out
    }

    fn encode_core(&self, word: &str, core: &str, contractions: bool) -> Result<Vec<DotPattern>, SynthError> {
        let text = self.to_cell_order(core);
        let mut cells = Vec::new();
        let mut rest = text.as_str();
        while let Some(c) = rest.chars().next() {
            if c.is_ascii_digit() && !self.digits.is_empty() {
                let sign = self.number_sign.ok_or_else(|| SynthError::Unencodable { ch: c, word: word.into() })?;
                cells.push(sign);
                let run = rest.find(|ch: char| !ch.is_ascii_digit()).unwrap_or(rest.len());
                for d in rest[..run].chars() {
                    let s = d.to_string();
                    let cand = self.digits.iter().find(|x| x.grapheme == s).ok_or_else(|| {
                        SynthError::Unencodable { ch: d, word: word.into() }
                    })?;
                    cells.push(cand.pattern);
                }
                rest = &rest[run..];
                continue;
            }
            let whole = rest.len() == text.len();
            let pick = self
                .contractions
                .iter()
                .filter(|x| contractions || x.wordsign)
                .filter(|x| !x.wordsign || (whole && x.grapheme == rest))
                .chain(self.letters.iter())
                .filter(|x| rest.starts_with(x.grapheme))
                .max_by_key(|x| x.grapheme.len());
            match pick {
                Some(x) => {
                    cells.push(x.pattern);
                    rest = &rest[x.grapheme.len()..];
                }
                None => match self.punct(c) {
                    Some(p) => {
                        cells.push(p);
                        rest = &rest[c.len_utf8()..];
                    }
                    None => return Err(SynthError::Unencodable { ch: c, word: word.into() }),
                },
            }
        }
        Ok(cells)
    }

    fn reads_back(&self, cells: &[DotPattern], word: &str) -> bool {
        let (text, _) = self.decoder.decode_text(&[cells.to_vec()]);
        text == word
    }

    /// Cells for one whitespace-free word.
    pub fn encode_word(&self, word: &str) -> Result<Vec<DotPattern>, SynthError> {
        let chars: Vec<char> = word.chars().collect();
        let lead = chars.iter().take_while(|&&c| self.punct(c).is_some()).count();
        let mut trail = chars[lead..].iter().rev().take_while(|&&c| self.punct(c).is_some()).count();
        // Keep at least one character in the core when the word is all punctuation.
        if lead == chars.len() {
            trail = 0;
        }
        let head: String = chars[..lead].iter().collect();
        let core: String = chars[lead..chars.len() - trail].iter().collect();
        let tail: String = chars[chars.len() - trail..].iter().collect();

        let wrap = |core_cells: Vec<DotPattern>| -> Vec<DotPattern> {
            let mut v: Vec<DotPattern> = head.chars().filter_map(|c| self.punct(c)).collect();
            v.extend(core_cells);
            v.extend(tail.chars().filter_map(|c| self.punct(c)));
            v
        };
        let contracted = wrap(self.encode_core(word, &core, true)?);
        if self.reads_back(&contracted, word) {
            return Ok(contracted);
        }
        let plain = wrap(self.encode_core(word, &core, false)?);
        if self.reads_back(&plain, word) {
            return Ok(plain);
        }
        Err(SynthError::Ambiguous { word: word.into() })
    }

    /// Encodes every word and packs them into lines of at most
    /// `cells_per_line` cells, words separated by one blank cell. A word
    /// longer than a line gets a line of its own.
    pub fn encode_lines(&self, text: &str, cells_per_line: usize) -> Result<(Vec<PatternRow>, String), SynthError> {
        let mut rows: Vec<PatternRow> = Vec::new();
        let mut lines: Vec<Vec<&str>> = Vec::new();
        for word in text.split_whitespace() {
            let cells = self.encode_word(word)?;
            match rows.last_mut() {
                Some(row) if row.len() + 1 + cells.len() <= cells_per_line => {
                    row.push(DotPattern::BLANK);
                    row.extend(cells);
                    lines.last_mut().expect("paired with rows").push(word);
                }
                _ => {
                    rows.push(cells);
                    lines.push(vec![word]);
                }
            }
        }
        let text = lines.iter().map(|l| l.join(" ")).collect::<Vec<_>>().join("\n");
        Ok((rows, text))
    }
}

fn dot_offsets(dot: u8, dp: f64) -> (f64, f64) {
    let col = if dot <= 3 { 0.0 } else { 1.0 };
    let row = ((dot - 1) % 3) as f64;
    (col * dp, row * dp)
}

fn stamp(img: &mut GrayImage, cx: f64, cy: f64, r: f64, style: &RenderStyle) {
    let reach = match style.profile {
        DotProfile::FilledDisk => r,
        DotProfile::GaussianBump => 1.5 * r,
    };
    let x0 = (cx - reach).floor().max(0.0) as usize;
    let y0 = (cy - reach).floor().max(0.0) as usize;
    let x1 = ((cx + reach).ceil() as usize).min(img.width());
    let y1 = ((cy + reach).ceil() as usize).min(img.height());
    let depth = (style.background - style.dot) as f64;
    for y in y0..y1 {
        for x in x0..x1 {
            let dx = x as f64 + 0.5 - cx;
            let dy = y as f64 + 0.5 - cy;
            let d2 = dx * dx + dy * dy;
            let v = match style.profile {
                DotProfile::FilledDisk if d2 <= r * r => style.dot,
                DotProfile::FilledDisk => continue,
                DotProfile::GaussianBump => {
                    if d2 > reach * reach {
                        continue;
                    }
                    let s = r / 1.5;
                    let v = style.background as f64 - depth * (-d2 / (2.0 * s * s)).exp();
                    v.round().clamp(0.0, 255.0) as u8
                }
            };
            if v < img.get(x, y) {
                img.set(x, y, v);
            }
        }
    }
}

/// Draws already-encoded rows of cells.
pub fn render_rows(
    rows: &[PatternRow],
    g: &BrailleGeometry,
    style: &RenderStyle,
) -> Result<(GrayImage, Vec<Vec<Rect>>, Vec<usize>), SynthError> {
    g.validate()?;
    style.validate()?;
    let margin = g.px(style.margin_mm);
    let cp = g.cell_pitch_px();
    let lp = g.line_pitch_px();
    let dp = g.dot_pitch_px();
    let r = g.dot_diameter_px() / 2.0;
    let widest = rows.iter().map(Vec::len).max().unwrap_or(0).max(style.cells_per_line);
    let width = (2.0 * margin + widest as f64 * cp).ceil() as usize;
    let height = (2.0 * margin + rows.len().max(1) as f64 * lp).ceil() as usize;
    let mut img = GrayImage::filled(width, height, style.background)?;
    let mut rng = ChaCha8Rng::seed_from_u64(style.seed);

    let mut boxes = Vec::with_capacity(rows.len());
    let mut tops = Vec::with_capacity(rows.len());
    for (l, row) in rows.iter().enumerate() {
        let top = margin + l as f64 * lp;
        tops.push(top.round() as usize);
        let mut line_boxes = Vec::with_capacity(row.len());
        for (i, &p) in row.iter().enumerate() {
            let left = margin + i as f64 * cp;
            let (bx, by) = (left.round() as usize, top.round() as usize);
            line_boxes.push(Rect::new(
                bx,
                by,
                (left + cp).round() as usize - bx,
                (top + lp).round() as usize - by,
            ));
            for dot in p.dots() {
                let (ox, oy) = dot_offsets(dot, dp);
                let (jx, jy) = if style.jitter_px > 0.0 {
                    (
                        rng.gen_range(-style.jitter_px..=style.jitter_px),
                        rng.gen_range(-style.jitter_px..=style.jitter_px),
                    )
                } else {
                    (0.0, 0.0)
                };
                stamp(&mut img, left + r + ox + jx, top + r + oy + jy, r, style);
            }
        }
        boxes.push(line_boxes);
    }
    Ok((img, boxes, tops))
}

pub fn render_page(
    text: &str,
    decoder: &Decoder,
    g: &BrailleGeometry,
    style: &RenderStyle,
) -> Result<RenderedPage, SynthError> {
    style.validate()?;
    let (rows, text) = Encoder::new(decoder).encode_lines(text, style.cells_per_line)?;
    let (image, cell_boxes, line_tops) = render_rows(&rows, g, style)?;
    Ok(RenderedPage { image, rows, cell_boxes, line_tops, text })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum NoiseKind {
    /// Additive zero-mean gaussian noise, clamped.
    Gaussian { sigma: f64 },
    /// Each pixel independently set to 0 or 255 with probability `density`.
    Salt { density: f64 },
    /// Dark disks at random centres. `density` is the expected fraction of
    /// the page they cover.
    Speck { density: f64, radius: f64, value: u8 },
}

impl FromStr for NoiseKind {
    type Err = String;

    /// `gaussian:SIGMA`, `salt:DENSITY` or `speck:DENSITY[:RADIUS[:VALUE]]`.
    /// Specks default to radius 4 and value 0.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut parts = s.split(':');
        let kind = parts.next().unwrap_or_default().trim().to_ascii_lowercase();
        let nums: Vec<f64> = parts
            .map(|p| p.trim().parse::<f64>().map_err(|_| format!("bad number {p:?} in noise {s:?}")))
            .collect::<Result<_, _>>()?;
        let bad_count = || format!("wrong number of parameters in noise {s:?}");
        let kind = match (kind.as_str(), nums.as_slice()) {
            ("gaussian", &[sigma]) => NoiseKind::Gaussian { sigma },
            ("salt", &[density]) => NoiseKind::Salt { density },
            ("speck", &[density]) => NoiseKind::Speck { density, radius: 4.0, value: 0 },
            ("speck", &[density, radius]) => NoiseKind::Speck { density, radius, value: 0 },
            ("speck", &[density, radius, value]) => {
                if !(0.0..=255.0).contains(&value) {
                    return Err(format!("speck value must lie in 0..=255 in {s:?}"));
                }
                NoiseKind::Speck { density, radius, value: value as u8 }
            }
            ("gaussian" | "salt" | "speck", _) => return Err(bad_count()),
            _ => return Err(format!("unknown noise kind in {s:?}")),
        };
        let params_ok = match kind {
            NoiseKind::Gaussian { sigma } => sigma >= 0.0,
            NoiseKind::Salt { density } => (0.0..=1.0).contains(&density),
            NoiseKind::Speck { density, radius, .. } => density >= 0.0 && radius >= 0.0,
        };
        if !params_ok {
            return Err(format!("noise parameters out of range in {s:?}"));
        }
        Ok(kind)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    #[serde(flatten)]
    pub kind: NoiseKind,
    pub seed: u64,
}

pub fn add_noise(img: &GrayImage, spec: &NoiseSpec) -> GrayImage {
    let mut out = img.clone();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    match spec.kind {
        NoiseKind::Gaussian { sigma } => {
            if !(sigma > 0.0) {
                return out;
            }
            let normal = Normal::new(0.0, sigma).expect("sigma is positive and finite");
            for v in out.data_mut() {
                let n: f64 = normal.sample(&mut rng);
                *v = (*v as f64 + n).round().clamp(0.0, 255.0) as u8;
            }
        }
        NoiseKind::Salt { density } => {
            let p = density.clamp(0.0, 1.0);
            for v in out.data_mut() {
                if rng.gen_bool(p) {
                    *v = if rng.gen_bool(0.5) { 255 } else { 0 };
                }
            }
        }
        NoiseKind::Speck { density, radius, value } => {
            if !(density > 0.0 && radius > 0.0) {
                return out;
            }
            let (w, h) = (img.width(), img.height());
            let area = std::f64::consts::PI * radius * radius;
            let count = (density * (w * h) as f64 / area).round() as usize;
            let style = RenderStyle { background: 255, dot: value, ..RenderStyle::default() };
            for _ in 0..count {
                let cx = rng.gen_range(0.0..w as f64);
                let cy = rng.gen_range(0.0..h as f64);
                stamp(&mut out, cx, cy, radius, &style);
            }
        }
    }
    out
}
