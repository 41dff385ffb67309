//! The page recognition pipeline: enhancement in configured order, Prewitt
//! edges, crop, segmentation, extraction and decoding.

use std::fmt;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use serde::Serialize;
use thiserror::Error;

use super::config::{PipelineConfig, Step};
use crate::decode::{pattern_to_canonical, DecodeStats, Decoder, Token};
use crate::enhance::{
    autocrop_content, contrast_stretch, edge_map, gaussian_smooth, intensity_adjust,
    morph_filter, prewitt_gradients, relative_threshold, PiecewiseParams,
};
use crate::extract::{extract_page_patterns, PatternRow};
use crate::image::{histogram, load_any, BinaryImage, GrayImage, Rect};
use crate::layout::{segment_page_with, PageLayout};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Config,
    Load,
    Enhance,
    Edges,
    Crop,
    Layout,
    Extract,
    Decode,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Stage::Config => "config",
            Stage::Load => "load",
            Stage::Enhance => "enhance",
            Stage::Edges => "edges",
            Stage::Crop => "crop",
            Stage::Layout => "layout",
            Stage::Extract => "extract",
            Stage::Decode => "decode",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("cannot read {}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{stage} stage: {message}")]
    Stage { stage: Stage, message: String },
}

fn at<E: fmt::Display>(stage: Stage) -> impl FnOnce(E) -> PipelineError {
    move |e| PipelineError::Stage { stage, message: e.to_string() }
}

#[derive(Debug, Clone, Serialize)]
pub struct CellDiagnostic {
    pub line: usize,
    pub index: usize,
    /// Dot bits in dot order 1..6.
    pub bits: String,
    /// Canonical keypad sequence.
    pub seq: String,
    pub token: Token,
}

#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct StageTiming {
    pub enhance: Duration,
    pub edges: Duration,
    pub layout: Duration,
    pub extract: Duration,
    pub decode: Duration,
}

impl StageTiming {
    pub fn total(&self) -> Duration {
        self.enhance + self.edges + self.layout + self.extract + self.decode
    }
}

#[derive(Debug, Clone)]
pub struct ConversionReport {
    pub text: String,
    pub rows: Vec<PatternRow>,
    /// Layout in page coordinates.
    pub layout: PageLayout,
    /// Region of the page kept after cropping.
    pub crop: Rect,
    pub cells: Vec<CellDiagnostic>,
    pub stats: DecodeStats,
    pub timing: StageTiming,
}

/// Applies the configured enhancement steps in order.
pub fn enhance_image(img: &GrayImage, cfg: &PipelineConfig) -> Result<GrayImage, PipelineError> {
    let mut cur = img.clone();
    for step in &cfg.order.0 {
        cur = match step {
            Step::ContrastStretch => {
                let p = PiecewiseParams::from_histogram(
                    &histogram(&cur),
                    cfg.cs_low_quantile,
                    cfg.cs_high_quantile,
                    cfg.cs_low_out,
                    cfg.cs_high_out,
                )
                .map_err(at(Stage::Enhance))?;
                contrast_stretch(&cur, p).map_err(at(Stage::Enhance))?
            }
            Step::IntensityAdjust => {
                let (a, b) = adjust_window(&cur, cfg);
                intensity_adjust(&cur, a, b).map_err(at(Stage::Enhance))?
            }
            Step::Morphology => {
                if cfg.sigma > 0.0 {
                    cur = gaussian_smooth(&cur, cfg.sigma).map_err(at(Stage::Enhance))?;
                }
                if cfg.morph_radius > 0 {
                    cur = morph_filter(&cur, cfg.morph_radius, cfg.morph_mode);
                }
                cur
            }
        };
    }
    Ok(cur)
}

/// Intensity window `[a, b]` for the adjustment step. A window that
/// collapses onto one level falls back to the darkest and brightest levels,
/// and a flat image gets a one-level window.
fn adjust_window(img: &GrayImage, cfg: &PipelineConfig) -> (u8, u8) {
    let hist = histogram(img);
    let a = cfg.is_low.unwrap_or_else(|| hist.percentile(cfg.is_low_quantile));
    let b = cfg.is_high.unwrap_or_else(|| hist.percentile(cfg.is_high_quantile));
    if a < b {
        return (a, b);
    }
    match hist.range() {
        Some((lo, hi)) if lo < hi => (lo, hi),
        _ if a < 255 => (a, a + 1),
        _ => (254, 255),
    }
}

/// Enhancement and edge detection: the binary edge map of a page.
pub fn edge_image(img: &GrayImage, cfg: &PipelineConfig) -> Result<BinaryImage, PipelineError> {
    let enhanced = enhance_image(img, cfg)?;
    let g = prewitt_gradients(&enhanced).map_err(at(Stage::Edges))?;
    let t = cfg.edge_threshold.unwrap_or_else(|| relative_threshold(&g, cfg.edge_fraction));
    Ok(edge_map(&g, t))
}

pub fn run_pipeline_image(img: &GrayImage, cfg: &PipelineConfig) -> Result<ConversionReport, PipelineError> {
    cfg.validate().map_err(at(Stage::Config))?;
    let decoder = Decoder::shipped(cfg.language, cfg.grade()).map_err(at(Stage::Config))?;
    run_with_decoder(img, cfg, &decoder)
}

pub fn run_with_decoder(
    img: &GrayImage,
    cfg: &PipelineConfig,
    decoder: &Decoder,
) -> Result<ConversionReport, PipelineError> {
    let mut timing = StageTiming::default();
    let geometry = cfg.geometry();

    let t = Instant::now();
    let enhanced = enhance_image(img, cfg)?;
    timing.enhance = t.elapsed();

    let t = Instant::now();
    let g = prewitt_gradients(&enhanced).map_err(at(Stage::Edges))?;
    let threshold = cfg.edge_threshold.unwrap_or_else(|| relative_threshold(&g, cfg.edge_fraction));
    let edges = edge_map(&g, threshold);
    let crop = autocrop_content(&edges, cfg.crop_margin).map_err(at(Stage::Crop))?;
    // Room around the content for a full pitch on every side: the first
    // cell may open with its right column and the last may end early.
    let (cp, lp) = (geometry.cell_pitch_px().ceil() as usize, geometry.line_pitch_px().ceil() as usize);
    let (x0, y0) = (crop.x.saturating_sub(cp), crop.y.saturating_sub(lp));
    let crop = Rect::new(
        x0,
        y0,
        (crop.right() + cp).min(edges.width()) - x0,
        (crop.bottom() + lp).min(edges.height()) - y0,
    );
    let edges = edges.crop(crop).map_err(at(Stage::Crop))?;
    timing.edges = t.elapsed();

    let t = Instant::now();
    let layout = segment_page_with(&edges, &geometry, &cfg.layout_params()).map_err(at(Stage::Layout))?;
    timing.layout = t.elapsed();

    let t = Instant::now();
    let mut layout = layout;
    let mut rows = extract_page_patterns(&edges, &layout, cfg.fill_criterion()).map_err(at(Stage::Extract))?;
    trim_trailing_blanks(&mut rows, &mut layout);
    timing.extract = t.elapsed();

    let t = Instant::now();
    let (text, decoded) = decoder.decode_text(&rows);
    let mut cells = Vec::with_capacity(decoded.stats.cells);
    let mut tokens = decoded.tokens.iter().filter(|t| t.is_cell());
    for (line, row) in rows.iter().enumerate() {
        for (index, &p) in row.iter().enumerate() {
            let token = tokens.next().expect("one token per cell").clone();
            cells.push(CellDiagnostic {
                line,
                index,
                bits: p.to_bit_string(),
                seq: pattern_to_canonical(p).to_string(),
                token,
            });
        }
    }
    timing.decode = t.elapsed();

    Ok(ConversionReport {
        text,
        rows,
        layout: layout.translated(crop.x, crop.y),
        crop,
        cells,
        stats: decoded.stats,
        timing,
    })
}

/// Drops blank cells at the end of each line, from the rows and the layout
/// alike. A speck past the last word opens a cell that reads as nothing.
fn trim_trailing_blanks(rows: &mut [PatternRow], layout: &mut PageLayout) {
    for (i, row) in rows.iter_mut().enumerate() {
        let keep = row.iter().rposition(|p| !p.is_blank()).map_or(0, |k| k + 1);
        row.truncate(keep);
        layout.cell_boxes[i].truncate(keep);
        layout.grids[i].truncate(keep);
    }
}

pub fn run_pipeline(path: &Path, cfg: &PipelineConfig) -> Result<ConversionReport, PipelineError> {
    let bytes = std::fs::read(path).map_err(|source| PipelineError::Io { path: path.to_path_buf(), source })?;
    let img = load_any(&bytes).map_err(at(Stage::Load))?;
    run_pipeline_image(&img, cfg)
}
