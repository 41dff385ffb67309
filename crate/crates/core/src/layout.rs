//! Line, cell and dot-grid segmentation by projection profiles.
//!
//! Segmentation starts from the first occupied row (column) of a profile and
//! steps through the page by the standard Braille pitch. Each predicted
//! boundary snaps to the nearest empty-to-occupied transition inside a
//! tolerance window, so small scale errors do not accumulate; where there is
//! no transition (blank cell, blank line) the predicted position is kept.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::image::{BinaryImage, Rect};

#[derive(Debug, Error, PartialEq)]
pub enum LayoutError {
    #[error("{0:?} profile has no foreground")]
    EmptyProfile(Axis),
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),
}

/// Physical Braille measurements plus the scan resolution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BrailleGeometry {
    pub dpi: f64,
    /// Centre-to-centre distance between neighbouring dots of one cell.
    pub dot_pitch_mm: f64,
    /// Left-edge to left-edge distance between neighbouring cells.
    pub cell_pitch_mm: f64,
    /// Top-to-top distance between text lines.
    pub line_pitch_mm: f64,
    pub dot_diameter_mm: f64,
}

impl Default for BrailleGeometry {
    fn default() -> Self {
        Self {
            dpi: 300.0,
            dot_pitch_mm: 2.5,
            cell_pitch_mm: 6.2,
            line_pitch_mm: 10.0,
            dot_diameter_mm: 1.5,
        }
    }
}

impl BrailleGeometry {
    pub fn validate(&self) -> Result<(), LayoutError> {
        let all = [
            self.dpi,
            self.dot_pitch_mm,
            self.cell_pitch_mm,
            self.line_pitch_mm,
            self.dot_diameter_mm,
        ];
        if all.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(LayoutError::InvalidGeometry(
                "all measurements must be positive".into(),
            ));
        }
        if self.cell_pitch_mm <= self.dot_pitch_mm {
            return Err(LayoutError::InvalidGeometry(
                "cell pitch must exceed dot pitch".into(),
            ));
        }
        if self.line_pitch_mm <= 2.0 * self.dot_pitch_mm {
            return Err(LayoutError::InvalidGeometry(
                "line pitch must exceed two dot pitches".into(),
            ));
        }
        Ok(())
    }

    pub fn px(&self, mm: f64) -> f64 {
        mm * self.dpi / 25.4
    }

    pub fn dot_pitch_px(&self) -> f64 {
        self.px(self.dot_pitch_mm)
    }

    pub fn cell_pitch_px(&self) -> f64 {
        self.px(self.cell_pitch_mm)
    }

    pub fn line_pitch_px(&self) -> f64 {
        self.px(self.line_pitch_mm)
    }

    pub fn dot_diameter_px(&self) -> f64 {
        self.px(self.dot_diameter_mm)
    }

    /// Area of one dot in pixels.
    pub fn dot_area_px(&self) -> f64 {
        let r = self.dot_diameter_px() / 2.0;
        std::f64::consts::PI * r * r
    }
}

/// Tunables of the profile walk.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LayoutParams {
    /// Half-width of the snap window, as a fraction of the pitch.
    pub snap_tolerance: f64,
    /// Rows/columns at or below `baseline + floor_fraction * (max - baseline)`
    /// count as empty, where `baseline` is the profile's 10th percentile.
    /// Zero reproduces the strict "non-zero means occupied" rule.
    pub floor_fraction: f64,
    /// The same rule for the row profile that finds lines. Kept low so a
    /// short closing line of a few cells still counts.
    pub line_floor_fraction: f64,
}

impl Default for LayoutParams {
    fn default() -> Self {
        Self {
            snap_tolerance: 0.2,
            floor_fraction: 0.05,
            line_floor_fraction: 0.03,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Axis {
    /// One count per row.
    Horizontal,
    /// One count per column.
    Vertical,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Profile {
    pub counts: Vec<u32>,
    pub axis: Axis,
}

impl Profile {
    pub fn total(&self) -> u64 {
        self.counts.iter().map(|&c| c as u64).sum()
    }

    /// Indices standing above the noise floor, in runs of at least
    /// `min_run`. Shorter runs are border artefacts or noise; a dot spans
    /// far more rows and columns.
    fn occupancy(&self, floor_fraction: f64, min_run: usize) -> Vec<bool> {
        let max = self.counts.iter().copied().max().unwrap_or(0);
        let floor = if floor_fraction > 0.0 && !self.counts.is_empty() {
            let mut sorted = self.counts.clone();
            sorted.sort_unstable();
            let baseline = sorted[sorted.len() / 10] as f64;
            baseline + floor_fraction * (max as f64 - baseline)
        } else {
            0.0
        };
        let mut occ: Vec<bool> = self.counts.iter().map(|&c| c as f64 > floor).collect();
        let mut i = 0;
        while i < occ.len() {
            if !occ[i] {
                i += 1;
                continue;
            }
            let run = occ[i..].iter().take_while(|&&o| o).count();
            if run < min_run {
                occ[i..i + run].fill(false);
            }
            i += run;
        }
        occ
    }
}

/// Shortest profile run that can belong to a dot: half its diameter.
fn min_run(g: &BrailleGeometry) -> usize {
    ((g.dot_diameter_px() / 2.0).floor() as usize).max(1)
}

/// Half-open index interval `[start, end)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end <= self.start
    }
}

pub fn projection_profile(bin: &BinaryImage, axis: Axis) -> Profile {
    profile_within(bin, Rect::new(0, 0, bin.width(), bin.height()), axis)
}

fn profile_within(bin: &BinaryImage, r: Rect, axis: Axis) -> Profile {
    let mut counts = vec![
        0u32;
        match axis {
            Axis::Horizontal => r.h,
            Axis::Vertical => r.w,
        }
    ];
    for y in r.y..r.bottom() {
        for x in r.x..r.right() {
            if bin.get(x, y) {
                match axis {
                    Axis::Horizontal => counts[y - r.y] += 1,
                    Axis::Vertical => counts[x - r.x] += 1,
                }
            }
        }
    }
    Profile { counts, axis }
}

/// Leading edge of the dot whose occupied run rises at `rise`, taken from
/// the run's midpoint. Blur and edge detection widen a run evenly on both
/// sides, so the midpoint stays put where the rise does not. Runs too long
/// to be one dot keep the rise.
fn dot_edge(occ: &[bool], rise: usize, dot_px: f64) -> usize {
    let len = occ[rise..].iter().take_while(|&&o| o).count() as f64;
    if len < 0.5 * dot_px || len > 2.0 * dot_px {
        return rise;
    }
    (rise as f64 + (len - dot_px) / 2.0).round().max(0.0) as usize
}

/// Walks `occ` from `start` in steps of `pitch`, returning the leading
/// boundary of every interval up to the last occupied index. Boundaries
/// that land on a rise move to that dot's leading edge.
fn walk_boundaries(occ: &[bool], start: usize, pitch: f64, tolerance: f64, dot_px: f64) -> Vec<usize> {
    let last = match occ.iter().rposition(|&o| o) {
        Some(l) => l,
        None => return Vec::new(),
    };
    let tol = tolerance * pitch;
    let is_rise = |i: usize| occ[i] && (i == 0 || !occ[i - 1]);

    let start = if occ[start] { dot_edge(occ, start, dot_px) } else { start };
    let mut bounds = vec![start];
    let mut anchor = start as f64;
    loop {
        let expected = anchor + pitch;
        let lo = (expected - tol).ceil().max(0.0) as usize;
        if lo > last {
            break;
        }
        let hi = ((expected + tol).floor() as usize).min(occ.len() - 1);
        let nearest = (lo..=hi)
            .filter(|&i| is_rise(i))
            .min_by(|&a, &b| {
                let da = (a as f64 - expected).abs();
                let db = (b as f64 - expected).abs();
                da.total_cmp(&db)
            });
        match nearest {
            Some(i) => {
                let at = dot_edge(occ, i, dot_px);
                if at <= *bounds.last().expect("start is pushed") {
                    bounds.push(i);
                    anchor = i as f64;
                } else {
                    bounds.push(at);
                    anchor = at as f64;
                }
            }
            None => {
                let at = expected.round() as usize;
                if at > last {
                    break;
                }
                bounds.push(at);
                anchor = expected;
            }
        }
    }
    bounds
}

fn bounds_to_spans(bounds: &[usize], pitch: f64, len: usize) -> Vec<Span> {
    let mut spans: Vec<Span> = bounds
        .windows(2)
        .map(|w| Span { start: w[0], end: w[1] })
        .collect();
    if let Some(&last) = bounds.last() {
        let end = ((last as f64 + pitch).round() as usize).min(len);
        spans.push(Span { start: last, end: end.max(last + 1).min(len) });
    }
    spans
}

pub fn find_line_bands(p: &Profile, g: &BrailleGeometry) -> Result<Vec<Span>, LayoutError> {
    find_line_bands_with(p, g, &LayoutParams::default())
}

pub fn find_line_bands_with(
    p: &Profile,
    g: &BrailleGeometry,
    params: &LayoutParams,
) -> Result<Vec<Span>, LayoutError> {
    g.validate()?;
    let occ = p.occupancy(params.line_floor_fraction, min_run(g));
    let first = occ
        .iter()
        .position(|&o| o)
        .ok_or(LayoutError::EmptyProfile(p.axis))?;
    let pitch = g.line_pitch_px();
    let bounds = walk_boundaries(&occ, first, pitch, params.snap_tolerance, g.dot_diameter_px());
    Ok(bounds_to_spans(&bounds, pitch, occ.len()))
}

pub fn find_cell_columns(p: &Profile, g: &BrailleGeometry) -> Result<Vec<Span>, LayoutError> {
    find_cell_columns_with(p, g, &LayoutParams::default(), None)
}

/// Cell columns of one line band.
///
/// Without `grid` the walk starts at the band's first occupied column. With
/// `grid`, the page-wide column boundaries, the band starts at the grid's
/// first column and every cell sits on that grid and only snaps to the band's own rises within the tolerance.
/// A lone speck can then shift at most the one cell it falls in, and a line
/// that opens with a right-column-only cell stays aligned with the others.
pub fn find_cell_columns_with(
    p: &Profile,
    g: &BrailleGeometry,
    params: &LayoutParams,
    grid: Option<&[usize]>,
) -> Result<Vec<Span>, LayoutError> {
    g.validate()?;
    let occ = p.occupancy(params.floor_fraction, min_run(g));
    let first = occ
        .iter()
        .position(|&o| o)
        .ok_or(LayoutError::EmptyProfile(p.axis))?;
    let pitch = g.cell_pitch_px();
    let grid = match grid {
        Some(grid) if !grid.is_empty() => grid,
        _ => {
            let bounds = walk_boundaries(&occ, first, pitch, params.snap_tolerance, g.dot_diameter_px());
            return Ok(bounds_to_spans(&bounds, pitch, occ.len()));
        }
    };
    let last = occ.iter().rposition(|&o| o).expect("first exists");
    let tol = params.snap_tolerance * pitch;

    // The page grid, extended by whole pitches to cover this band.
    let mut expected: Vec<f64> = grid.iter().map(|&b| b as f64).collect();
    let mut page_left = 0;
    while expected[0] - tol > first as f64 {
        expected.insert(0, expected[0] - pitch);
        page_left += 1;
    }
    while expected[expected.len() - 1] + pitch - tol <= last as f64 {
        expected.push(expected[expected.len() - 1] + pitch);
    }
    // Lines start at the page's left edge, so indented lines keep their
    // leading blank cells.
    let start = expected
        .iter()
        .rposition(|&b| b - tol <= first as f64)
        .unwrap_or(0)
        .min(page_left);
    let is_rise = |i: usize| occ[i] && (i == 0 || !occ[i - 1]);
    let mut bounds = Vec::new();
    for &e in &expected[start..] {
        if e - tol > last as f64 {
            break;
        }
        let lo = (e - tol).ceil().max(0.0) as usize;
        let hi = ((e + tol).floor().max(0.0) as usize).min(occ.len() - 1);
        let snapped = (lo..=hi)
            .filter(|&i| is_rise(i))
            .min_by(|&a, &b| (a as f64 - e).abs().total_cmp(&(b as f64 - e).abs()));
        let at = snapped.map_or_else(|| e.round().max(0.0) as usize, |i| dot_edge(&occ, i, g.dot_diameter_px()));
        if bounds.last().is_some_and(|&prev| at <= prev) || at >= occ.len() {
            continue;
        }
        bounds.push(at);
    }
    Ok(bounds_to_spans(&bounds, pitch, occ.len()))
}

/// Page-wide cell column boundaries from the vertical profile of the whole
/// page. Dots of every line add up here, so isolated specks stay below the
/// noise floor.
///
/// The leftmost dot column may be the right column of its cell. The grid
/// origin is whichever of the two readings puts more dot columns at a left
/// or right column offset.
pub fn page_column_grid(
    bin: &BinaryImage,
    g: &BrailleGeometry,
    params: &LayoutParams,
) -> Result<Vec<usize>, LayoutError> {
    let p = projection_profile(bin, Axis::Vertical);
    let occ = p.occupancy(params.floor_fraction, min_run(g));
    let first = occ
        .iter()
        .position(|&o| o)
        .ok_or(LayoutError::EmptyProfile(Axis::Vertical))?;
    let (dot, pitch, dp) = (g.dot_diameter_px(), g.cell_pitch_px(), g.dot_pitch_px());
    let edges: Vec<f64> = (0..occ.len())
        .filter(|&i| occ[i] && (i == 0 || !occ[i - 1]))
        .map(|i| dot_edge(&occ, i, dot) as f64)
        .collect();
    let tol = params.snap_tolerance * dp;
    let fits = |origin: f64| {
        edges
            .iter()
            .filter(|&&x| {
                let d = (x - origin).rem_euclid(pitch);
                d.min(pitch - d) <= tol || (d - dp).abs() <= tol
            })
            .count()
    };
    let own = edges[0];
    let shifted = own - dp;
    let start = if shifted >= 0.0 && fits(shifted) > fits(own) {
        shifted.round() as usize
    } else {
        first
    };
    Ok(walk_boundaries(&occ, start, pitch, params.snap_tolerance, dot))
}

/// Bands, cell boxes and dot grids of one page.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PageLayout {
    pub line_bands: Vec<Span>,
    /// Per band, cell boxes left to right. Blank cells keep their box.
    pub cell_boxes: Vec<Vec<Rect>>,
    /// Per band and cell, the six dot regions in dot order 1..6.
    pub grids: Vec<Vec<[Rect; 6]>>,
}

impl PageLayout {
    pub fn cell_count(&self) -> usize {
        self.cell_boxes.iter().map(Vec::len).sum()
    }

    /// The same layout shifted by `(dx, dy)`, e.g. back from a crop into
    /// page coordinates.
    pub fn translated(&self, dx: usize, dy: usize) -> PageLayout {
        let shift = |r: &Rect| Rect::new(r.x + dx, r.y + dy, r.w, r.h);
        PageLayout {
            line_bands: self
                .line_bands
                .iter()
                .map(|b| Span { start: b.start + dy, end: b.end + dy })
                .collect(),
            cell_boxes: self.cell_boxes.iter().map(|l| l.iter().map(shift).collect()).collect(),
            grids: self
                .grids
                .iter()
                .map(|l| l.iter().map(|g| g.map(|r| shift(&r))).collect())
                .collect(),
        }
    }

    /// Plain-text dump of bands and cell boxes, one record per line.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (i, band) in self.line_bands.iter().enumerate() {
            let _ = writeln!(out, "band {i} {} {}", band.start, band.end);
            for (j, b) in self.cell_boxes[i].iter().enumerate() {
                let _ = writeln!(out, "cell {i} {j} {} {} {} {}", b.x, b.y, b.w, b.h);
            }
        }
        out
    }
}

/// Splits a cell box into its six dot regions. Internal boundaries sit
/// halfway between neighbouring dot centres; the outer regions absorb the
/// remaining space so the six rects tile the box exactly.
pub fn cell_grid(cell: Rect, g: &BrailleGeometry) -> [Rect; 6] {
    let r = g.dot_diameter_px() / 2.0;
    let dp = g.dot_pitch_px();
    let split = |offset: f64, len: usize| -> usize {
        let hi = len.saturating_sub(1);
        (offset.round() as usize).clamp(1.min(hi), hi)
    };
    let cx = split(r + dp / 2.0, cell.w);
    let ry1 = split(r + dp / 2.0, cell.h);
    let ry2 = split(r + 1.5 * dp, cell.h).max(ry1);
    let cols = [(cell.x, cx), (cell.x + cx, cell.w - cx)];
    let rows = [
        (cell.y, ry1),
        (cell.y + ry1, ry2 - ry1),
        (cell.y + ry2, cell.h - ry2),
    ];
    let mut out = [Rect::new(0, 0, 0, 0); 6];
    for (c, &(x, w)) in cols.iter().enumerate() {
        for (rr, &(y, h)) in rows.iter().enumerate() {
            out[c * 3 + rr] = Rect::new(x, y, w, h);
        }
    }
    out
}

pub fn segment_page(bin: &BinaryImage, g: &BrailleGeometry) -> Result<PageLayout, LayoutError> {
    segment_page_with(bin, g, &LayoutParams::default())
}

pub fn segment_page_with(
    bin: &BinaryImage,
    g: &BrailleGeometry,
    params: &LayoutParams,
) -> Result<PageLayout, LayoutError> {
    let rows = projection_profile(bin, Axis::Horizontal);
    let mut bands = find_line_bands_with(&rows, g, params)?;
    // Only the last span can be clipped by the image edge; a sliver thinner
    // than a dot cannot hold one.
    let min_len = g.dot_diameter_px().ceil() as usize;
    if bands.len() > 1 && bands.last().is_some_and(|b| b.len() < min_len) {
        bands.pop();
    }
    let grid = page_column_grid(bin, g, params)?;

    let mut cell_boxes = Vec::with_capacity(bands.len());
    let mut grids = Vec::with_capacity(bands.len());
    for band in &bands {
        let band_rect = Rect::new(0, band.start, bin.width(), band.len());
        let profile = profile_within(bin, band_rect, Axis::Vertical);
        let columns = match find_cell_columns_with(&profile, g, params, Some(&grid)) {
            Ok(mut c) => {
                if c.len() > 1 && c.last().is_some_and(|s| s.len() < min_len) {
                    c.pop();
                }
                c
            }
            // A band without foreground is a blank line.
            Err(LayoutError::EmptyProfile(_)) => Vec::new(),
            Err(e) => return Err(e),
        };
        let boxes: Vec<Rect> = columns
            .iter()
            .map(|c| Rect::new(c.start, band.start, c.len(), band.len()))
            .collect();
        grids.push(boxes.iter().map(|&b| cell_grid(b, g)).collect());
        cell_boxes.push(boxes);
    }
    Ok(PageLayout { line_bands: bands, cell_boxes, grids })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn profile(counts: &[u32], axis: Axis) -> Profile {
        Profile { counts: counts.to_vec(), axis }
    }

    /// Geometry with a 10 px line pitch and 5 px cell pitch at 25.4 dpi.
    fn toy_geometry() -> BrailleGeometry {
        BrailleGeometry {
            dpi: 25.4,
            dot_pitch_mm: 2.0,
            cell_pitch_mm: 5.0,
            line_pitch_mm: 10.0,
            dot_diameter_mm: 1.0,
        }
    }

    #[test]
    fn default_geometry_is_valid() {
        let g = BrailleGeometry::default();
        g.validate().unwrap();
        assert!((g.line_pitch_px() - 118.11).abs() < 0.01);
        assert!((g.cell_pitch_px() - 73.23).abs() < 0.01);
    }

    #[test]
    fn geometry_rejects_inconsistent_pitches() {
        let mut g = BrailleGeometry::default();
        g.cell_pitch_mm = 2.0;
        assert!(g.validate().is_err());
        let mut g = BrailleGeometry::default();
        g.line_pitch_mm = 4.0;
        assert!(g.validate().is_err());
        let mut g = BrailleGeometry::default();
        g.dpi = 0.0;
        assert!(g.validate().is_err());
    }

    #[test]
    fn empty_and_single_pixel_profiles() {
        let mut b = BinaryImage::empty(6, 8).unwrap();
        assert!(projection_profile(&b, Axis::Horizontal)
            .counts
            .iter()
            .all(|&c| c == 0));
        b.set(2, 4, true);
        let h = projection_profile(&b, Axis::Horizontal);
        assert_eq!(h.counts, vec![0, 0, 0, 0, 1, 0, 0, 0]);
        let v = projection_profile(&b, Axis::Vertical);
        assert_eq!(v.counts, vec![0, 0, 1, 0, 0, 0]);
        assert_eq!(h.total(), v.total());
    }

    #[test]
    fn zero_profile_is_an_error() {
        let g = toy_geometry();
        let p = profile(&[0; 30], Axis::Horizontal);
        assert_eq!(
            find_line_bands(&p, &g),
            Err(LayoutError::EmptyProfile(Axis::Horizontal))
        );
        let p = profile(&[0; 30], Axis::Vertical);
        assert_eq!(
            find_cell_columns(&p, &g),
            Err(LayoutError::EmptyProfile(Axis::Vertical))
        );
    }

    #[test]
    fn single_line_single_band() {
        let g = toy_geometry();
        let mut counts = vec![0u32; 40];
        for c in &mut counts[3..9] {
            *c = 4;
        }
        let bands = find_line_bands(&profile(&counts, Axis::Horizontal), &g).unwrap();
        assert_eq!(bands, vec![Span { start: 3, end: 13 }]);
    }

    #[test]
    fn bands_snap_to_rises() {
        let g = toy_geometry();
        let mut counts = vec![0u32; 45];
        // Lines start at 2, 13 (one row late) and 22 (one row early).
        for start in [2usize, 13, 22] {
            for c in &mut counts[start..start + 5] {
                *c = 3;
            }
        }
        let bands = find_line_bands(&profile(&counts, Axis::Horizontal), &g).unwrap();
        let tops: Vec<usize> = bands.iter().map(|b| b.start).collect();
        assert_eq!(tops, vec![2, 13, 22]);
        assert_eq!(bands[2].end, 32);
    }

    #[test]
    fn blank_cells_keep_predicted_columns() {
        let g = toy_geometry();
        let mut counts = vec![0u32; 40];
        // Cells at 0, 5, (blank 10), 15.
        for start in [0usize, 5, 15] {
            counts[start] = 2;
            counts[start + 2] = 2;
        }
        let cols = find_cell_columns(&profile(&counts, Axis::Vertical), &g).unwrap();
        let starts: Vec<usize> = cols.iter().map(|c| c.start).collect();
        assert_eq!(starts, vec![0, 5, 10, 15]);
    }

    #[test]
    fn page_grid_realigns_a_band_starting_in_the_right_column() {
        let g = toy_geometry();
        let mut counts = vec![0u32; 30];
        // First cell only has its right column (2 px in), second cell starts at 5.
        counts[2] = 3;
        counts[5] = 3;
        let p = profile(&counts, Axis::Vertical);
        let own = find_cell_columns(&p, &g).unwrap();
        assert_eq!(own[0].start, 2);
        let aligned = find_cell_columns_with(&p, &g, &LayoutParams::default(), Some(&[0, 5, 10])).unwrap();
        let starts: Vec<usize> = aligned.iter().map(|c| c.start).collect();
        assert_eq!(starts, vec![0, 5]);
    }

    #[test]
    fn page_grid_confines_a_speck_to_its_cell() {
        let g = toy_geometry();
        let mut counts = vec![0u32; 30];
        // Cells at 0 and 15; a speck at 11 inside the blank cell at 10.
        for c in [0usize, 2, 15, 17] {
            counts[c] = 4;
        }
        counts[11] = 4;
        let p = profile(&counts, Axis::Vertical);
        let cols = find_cell_columns_with(&p, &g, &LayoutParams::default(), Some(&[0, 5, 10, 15])).unwrap();
        let starts: Vec<usize> = cols.iter().map(|c| c.start).collect();
        assert_eq!(starts, vec![0, 5, 11, 15]);
    }

    #[test]
    fn page_grid_finds_the_left_column_of_a_right_only_first_cell() {
        let g = BrailleGeometry::default();
        let (r, dp, cp) = (g.dot_diameter_px() / 2.0, g.dot_pitch_px(), g.cell_pitch_px());
        let mut bin = BinaryImage::empty(800, 60).unwrap();
        // Cell 0 has only its right column; cells 1-5 have both.
        let mut centres = vec![100.0 + dp];
        for k in 1..6 {
            centres.push(100.0 + k as f64 * cp);
            centres.push(100.0 + k as f64 * cp + dp);
        }
        for c in centres {
            for x in (c - r).round() as usize..(c + r).round() as usize {
                for y in 10..20 {
                    bin.set(x, y, true);
                }
            }
        }
        let grid = page_column_grid(&bin, &g, &LayoutParams::default()).unwrap();
        let left = (100.0 - r).round() as usize;
        assert!(grid[0].abs_diff(left) <= 1, "{grid:?}");
        assert_eq!(grid.len(), 6);
    }

    #[test]
    fn indented_band_starts_at_the_page_edge() {
        let g = toy_geometry();
        let mut counts = vec![0u32; 20];
        counts[10] = 4;
        let p = profile(&counts, Axis::Vertical);
        let cols = find_cell_columns_with(&p, &g, &LayoutParams::default(), Some(&[0, 5, 10])).unwrap();
        let starts: Vec<usize> = cols.iter().map(|c| c.start).collect();
        assert_eq!(starts, vec![0, 5, 10]);
    }

    #[test]
    fn page_grid_extends_past_its_ends() {
        let g = toy_geometry();
        let mut counts = vec![0u32; 40];
        for c in [5usize, 25] {
            counts[c] = 4;
        }
        let p = profile(&counts, Axis::Vertical);
        let cols = find_cell_columns_with(&p, &g, &LayoutParams::default(), Some(&[10, 15])).unwrap();
        let starts: Vec<usize> = cols.iter().map(|c| c.start).collect();
        assert_eq!(starts, vec![5, 10, 15, 20, 25]);
    }

    #[test]
    fn noise_floor_ignores_weak_rows() {
        let g = toy_geometry();
        let mut counts = vec![1u32; 30];
        for c in &mut counts[6..11] {
            *c = 40;
        }
        let strict = LayoutParams { line_floor_fraction: 0.0, ..Default::default() };
        let strict_bands = find_line_bands_with(&profile(&counts, Axis::Horizontal), &g, &strict).unwrap();
        assert_eq!(strict_bands[0].start, 0);
        let bands = find_line_bands(&profile(&counts, Axis::Horizontal), &g).unwrap();
        assert_eq!(bands, vec![Span { start: 6, end: 16 }]);
    }

    #[test]
    fn grid_tiles_cell_in_dot_order() {
        let g = BrailleGeometry::default();
        let cell = Rect::new(100, 50, 73, 118);
        let grid = cell_grid(cell, &g);
        let area: usize = grid.iter().map(Rect::area).sum();
        assert_eq!(area, cell.area());
        for (i, a) in grid.iter().enumerate() {
            assert!(cell.contains_rect(a));
            for b in &grid[i + 1..] {
                assert!(!a.intersects(b));
            }
        }
        // Dots 1-3 share the left column, 4-6 the right.
        assert_eq!(grid[0].x, grid[2].x);
        assert!(grid[3].x > grid[0].x);
        assert!(grid[0].y < grid[1].y && grid[1].y < grid[2].y);
        assert_eq!(grid[0].y, grid[3].y);
    }

    #[test]
    fn empty_page_fails() {
        let b = BinaryImage::empty(50, 50).unwrap();
        assert!(segment_page(&b, &BrailleGeometry::default()).is_err());
    }

    #[test]
    fn dump_lists_every_cell() {
        let layout = PageLayout {
            line_bands: vec![Span { start: 0, end: 10 }],
            cell_boxes: vec![vec![Rect::new(1, 0, 5, 10)]],
            grids: vec![vec![[Rect::new(0, 0, 1, 1); 6]]],
        };
        assert_eq!(layout.dump(), "band 0 0 10\ncell 0 0 1 0 5 10\n");
    }

    #[test]
    fn tiny_boxes_do_not_panic() {
        let g = BrailleGeometry::default();
        for w in 0..3 {
            for h in 0..3 {
                let grid = cell_grid(Rect::new(5, 5, w, h), &g);
                assert!(grid.iter().all(|r| r.x >= 5 && r.right() <= 5 + w.max(1)));
            }
        }
    }

    #[test]
    fn translated_shifts_every_rect() {
        let layout = PageLayout {
            line_bands: vec![Span { start: 0, end: 10 }],
            cell_boxes: vec![vec![Rect::new(1, 0, 5, 10)]],
            grids: vec![vec![[Rect::new(0, 0, 1, 1); 6]]],
        };
        let t = layout.translated(3, 4);
        assert_eq!(t.line_bands[0], Span { start: 4, end: 14 });
        assert_eq!(t.cell_boxes[0][0], Rect::new(4, 4, 5, 10));
        assert_eq!(t.grids[0][0][5], Rect::new(3, 4, 1, 1));
    }
}
