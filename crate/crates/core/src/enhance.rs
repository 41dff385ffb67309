//! Dot enhancement, noise suppression and edge detection.
//!
//! Every operation is a pure function over an immutable input. Intensities
//! produced here are rounded half-up, and every neighbourhood operation uses
//! edge replication at the image border.

use rayon::prelude::*;
use thiserror::Error;

use crate::image::{BinaryImage, GrayImage, Histogram, ImageError, Rect};

#[derive(Debug, Error, PartialEq)]
pub enum EnhanceError {
    #[error("invalid piecewise parameters: {0}")]
    InvalidParams(String),
    #[error("invalid intensity window [{a}, {b}]: lower bound must be below upper bound")]
    InvalidWindow { a: u8, b: u8 },
    #[error("gaussian sigma must be positive, got {0}")]
    InvalidSigma(f64),
    #[error("image {width}x{height} is smaller than the 3x3 kernel")]
    TooSmall { width: usize, height: usize },
    #[error("no foreground remains after discarding border-connected components")]
    NoInteriorForeground,
    #[error(transparent)]
    Image(#[from] ImageError),
}

/// Control points of a piecewise-linear intensity transform through
/// `(0,0)`, `(r1,s1)`, `(r2,s2)` and `(255,255)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct PiecewiseParams {
    pub r1: u8,
    pub s1: u8,
    pub r2: u8,
    pub s2: u8,
}

impl PiecewiseParams {
    pub fn new(r1: u8, s1: u8, r2: u8, s2: u8) -> Result<Self, EnhanceError> {
        let p = Self { r1, s1, r2, s2 };
        p.validate()?;
        Ok(p)
    }

    pub fn identity() -> Self {
        Self { r1: 0, s1: 0, r2: 255, s2: 255 }
    }

    pub fn validate(&self) -> Result<(), EnhanceError> {
        if self.r1 >= self.r2 {
            return Err(EnhanceError::InvalidParams(format!(
                "r1 ({}) must be below r2 ({})",
                self.r1, self.r2
            )));
        }
        if self.s1 > self.s2 {
            return Err(EnhanceError::InvalidParams(format!(
                "s1 ({}) must not exceed s2 ({})",
                self.s1, self.s2
            )));
        }
        Ok(())
    }

    /// Places the control points at two histogram percentiles, mapping them
    /// to `s1` and `s2`. When both percentiles land on one level, as on a
    /// page with very few dots, the darkest and brightest levels are used.
    pub fn from_histogram(
        hist: &Histogram,
        low_q: f64,
        high_q: f64,
        s1: u8,
        s2: u8,
    ) -> Result<Self, EnhanceError> {
        let mut r1 = hist.percentile(low_q);
        let mut r2 = hist.percentile(high_q);
        if r2 <= r1 {
            match hist.range() {
                Some((lo, hi)) if lo < hi => (r1, r2) = (lo, hi),
                _ => r2 = r1.saturating_add(1),
            }
        }
        Self::new(r1.min(254), s1, r2, s2)
    }

    pub fn lut(&self) -> [u8; 256] {
        let (r1, s1, r2, s2) = (
            self.r1 as u32,
            self.s1 as u32,
            self.r2 as u32,
            self.s2 as u32,
        );
        let mut lut = [0u8; 256];
        for (v, out) in lut.iter_mut().enumerate() {
            let v = v as u32;
            let y = if v <= r1 {
                if r1 == 0 {
                    s1
                } else {
                    round_div(v * s1, r1)
                }
            } else if v <= r2 {
                s1 + round_div((v - r1) * (s2 - s1), r2 - r1)
            } else {
                s2 + round_div((v - r2) * (255 - s2), 255 - r2)
            };
            *out = y.min(255) as u8;
        }
        lut
    }
}

/// `round(num / den)` with halves rounded up, for non-negative operands.
#[inline]
fn round_div(num: u32, den: u32) -> u32 {
    (2 * num + den) / (2 * den)
}

#[inline]
fn round_half_up(v: f64) -> u8 {
    (v + 0.5).floor().clamp(0.0, 255.0) as u8
}

pub fn contrast_stretch(img: &GrayImage, p: PiecewiseParams) -> Result<GrayImage, EnhanceError> {
    p.validate()?;
    Ok(img.map_lut(&p.lut()))
}

/// Maps `[a, b]` linearly onto `[0, 255]`, saturating outside the window.
pub fn intensity_adjust(img: &GrayImage, a: u8, b: u8) -> Result<GrayImage, EnhanceError> {
    Ok(img.map_lut(&intensity_lut(a, b)?))
}

pub fn intensity_lut(a: u8, b: u8) -> Result<[u8; 256], EnhanceError> {
    if a >= b {
        return Err(EnhanceError::InvalidWindow { a, b });
    }
    let (a, b) = (a as u32, b as u32);
    let mut lut = [0u8; 256];
    for (v, out) in lut.iter_mut().enumerate() {
        let v = v as u32;
        *out = if v <= a {
            0
        } else if v >= b {
            255
        } else {
            round_div(255 * (v - a), b - a) as u8
        };
    }
    Ok(lut)
}

/// Normalized 1-D gaussian taps of radius `ceil(3 sigma)`.
pub fn gaussian_kernel(sigma: f64) -> Result<Vec<f64>, EnhanceError> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(EnhanceError::InvalidSigma(sigma));
    }
    let radius = (3.0 * sigma).ceil() as i64;
    let mut k: Vec<f64> = (-radius..=radius)
        .map(|i| (-((i * i) as f64) / (2.0 * sigma * sigma)).exp())
        .collect();
    let sum: f64 = k.iter().sum();
    k.iter_mut().for_each(|w| *w /= sum);
    Ok(k)
}

/// Separable gaussian blur.
pub fn gaussian_smooth(img: &GrayImage, sigma: f64) -> Result<GrayImage, EnhanceError> {
    let kernel = gaussian_kernel(sigma)?;
    let radius = (kernel.len() / 2) as isize;
    let (w, h) = (img.width(), img.height());
    let src = img.data();

    let mut horiz = vec![0f64; w * h];
    horiz.par_chunks_mut(w).enumerate().for_each(|(y, row)| {
        let line = &src[y * w..(y + 1) * w];
        for (x, out) in row.iter_mut().enumerate() {
            let mut acc = 0.0;
            for (k, &weight) in kernel.iter().enumerate() {
                let sx = clamp_index(x as isize + k as isize - radius, w);
                acc += weight * line[sx] as f64;
            }
            *out = acc;
        }
    });

    let mut out = vec![0u8; w * h];
    out.par_chunks_mut(w).enumerate().for_each(|(y, row)| {
        for (x, px) in row.iter_mut().enumerate() {
            let mut acc = 0.0;
            for (k, &weight) in kernel.iter().enumerate() {
                let sy = clamp_index(y as isize + k as isize - radius, h);
                acc += weight * horiz[sy * w + x];
            }
            *px = round_half_up(acc);
        }
    });
    Ok(GrayImage::new(w, h, out)?)
}

#[inline]
fn clamp_index(i: isize, len: usize) -> usize {
    i.clamp(0, len as isize - 1) as usize
}

/// Which grayscale morphological filter the noise-removal stage applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MorphMode {
    /// Erosion then dilation: removes bright specks smaller than the disk.
    #[default]
    Open,
    /// Dilation then erosion: removes dark specks smaller than the disk.
    Close,
}

/// Half-width of each disk row, for `dy` in `-radius..=radius`.
fn disk_rows(radius: usize) -> Vec<usize> {
    let r = radius as i64;
    (-r..=r)
        .map(|dy| {
            let mut hw = 0i64;
            while (hw + 1) * (hw + 1) + dy * dy <= r * r {
                hw += 1;
            }
            hw as usize
        })
        .collect()
}

/// Grayscale min (erosion) or max (dilation) filter over a Euclidean disk.
fn rank_filter(img: &GrayImage, radius: usize, take_min: bool) -> GrayImage {
    let (w, h) = (img.width(), img.height());
    let rows = disk_rows(radius);
    let src = img.data();
    let pick = |a: u8, b: u8| if take_min { a.min(b) } else { a.max(b) };

    // Horizontal extrema for each half-width the disk uses.
    let mut widths: Vec<usize> = rows.clone();
    widths.sort_unstable();
    widths.dedup();
    let horiz: Vec<Vec<u8>> = widths
        .iter()
        .map(|&hw| {
            let mut buf = vec![0u8; w * h];
            buf.par_chunks_mut(w).enumerate().for_each(|(y, row)| {
                let line = &src[y * w..(y + 1) * w];
                for (x, out) in row.iter_mut().enumerate() {
                    let lo = x.saturating_sub(hw);
                    let hi = (x + hw).min(w - 1);
                    let mut acc = line[lo];
                    for &v in &line[lo + 1..=hi] {
                        acc = pick(acc, v);
                    }
                    *out = acc;
                }
            });
            buf
        })
        .collect();
    let lookup: Vec<&Vec<u8>> = rows
        .iter()
        .map(|hw| &horiz[widths.binary_search(hw).unwrap()])
        .collect();

    let r = radius as isize;
    let mut out = vec![0u8; w * h];
    out.par_chunks_mut(w).enumerate().for_each(|(y, row)| {
        for (x, px) in row.iter_mut().enumerate() {
            let mut acc = if take_min { 255 } else { 0 };
            for (i, buf) in lookup.iter().enumerate() {
                let sy = clamp_index(y as isize + i as isize - r, h);
                acc = pick(acc, buf[sy * w + x]);
            }
            *px = acc;
        }
    });
    GrayImage::new(w, h, out).expect("dimensions preserved")
}

pub fn erode(img: &GrayImage, radius: usize) -> GrayImage {
    rank_filter(img, radius, true)
}

pub fn dilate(img: &GrayImage, radius: usize) -> GrayImage {
    rank_filter(img, radius, false)
}

/// Grayscale opening with a disk: erosion followed by dilation.
pub fn morph_open(img: &GrayImage, radius: usize) -> GrayImage {
    dilate(&erode(img, radius), radius)
}

/// Grayscale closing with a disk: dilation followed by erosion.
pub fn morph_close(img: &GrayImage, radius: usize) -> GrayImage {
    erode(&dilate(img, radius), radius)
}

pub fn morph_filter(img: &GrayImage, radius: usize, mode: MorphMode) -> GrayImage {
    match mode {
        MorphMode::Open => morph_open(img, radius),
        MorphMode::Close => morph_close(img, radius),
    }
}

/// Horizontal and vertical Prewitt responses.
///
/// `gx` is the right column minus the left column, so a dark-to-bright step
/// read left to right is positive. `gy` is the bottom row minus the top row,
/// which keeps `gy(img) == transpose(gx(transpose(img)))`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradientPair {
    pub width: usize,
    pub height: usize,
    pub gx: Vec<i32>,
    pub gy: Vec<i32>,
}

impl GradientPair {
    pub fn magnitude(&self, i: usize) -> f64 {
        let (x, y) = (self.gx[i] as f64, self.gy[i] as f64);
        (x * x + y * y).sqrt()
    }

    pub fn max_magnitude(&self) -> f64 {
        self.gx
            .iter()
            .zip(&self.gy)
            .map(|(&x, &y)| x as i64 * x as i64 + y as i64 * y as i64)
            .max()
            .map_or(0.0, |m| (m as f64).sqrt())
    }
}

pub fn prewitt_gradients(img: &GrayImage) -> Result<GradientPair, EnhanceError> {
    let (w, h) = (img.width(), img.height());
    if w < 3 || h < 3 {
        return Err(EnhanceError::TooSmall { width: w, height: h });
    }
    let src = img.data();
    let px = |x: usize, y: usize| src[y * w + x] as i32;
    let mut gx = vec![0i32; w * h];
    let mut gy = vec![0i32; w * h];
    gx.par_chunks_mut(w)
        .zip(gy.par_chunks_mut(w))
        .enumerate()
        .for_each(|(y, (rx, ry))| {
            let up = y.saturating_sub(1);
            let down = (y + 1).min(h - 1);
            for x in 0..w {
                let left = x.saturating_sub(1);
                let right = (x + 1).min(w - 1);
                rx[x] = (px(right, up) + px(right, y) + px(right, down))
                    - (px(left, up) + px(left, y) + px(left, down));
                ry[x] = (px(left, down) + px(x, down) + px(right, down))
                    - (px(left, up) + px(x, up) + px(right, up));
            }
        });
    Ok(GradientPair { width: w, height: h, gx, gy })
}

/// Foreground wherever the gradient magnitude strictly exceeds `t`.
pub fn edge_map(g: &GradientPair, t: f64) -> BinaryImage {
    let data = g
        .gx
        .par_iter()
        .zip(g.gy.par_iter())
        .map(|(&x, &y)| {
            let (x, y) = (x as f64, y as f64);
            (x * x + y * y).sqrt() > t
        })
        .collect();
    BinaryImage::new(g.width, g.height, data).expect("gradient dimensions are valid")
}

/// Edge threshold as a fraction of the strongest gradient on the page.
pub fn relative_threshold(g: &GradientPair, fraction: f64) -> f64 {
    fraction * g.max_magnitude()
}

/// Bounding box of the foreground that is not 8-connected to the image
/// border, grown by `margin` pixels and clamped to the image.
pub fn autocrop_content(bin: &BinaryImage, margin: usize) -> Result<Rect, EnhanceError> {
    let (w, h) = (bin.width(), bin.height());
    let mut touches_border = vec![false; w * h];
    let mut stack = Vec::new();
    for y in 0..h {
        for x in 0..w {
            let on_border = x == 0 || y == 0 || x == w - 1 || y == h - 1;
            if on_border && bin.get(x, y) && !touches_border[y * w + x] {
                touches_border[y * w + x] = true;
                stack.push((x, y));
            }
        }
    }
    while let Some((x, y)) = stack.pop() {
        for ny in y.saturating_sub(1)..=(y + 1).min(h - 1) {
            for nx in x.saturating_sub(1)..=(x + 1).min(w - 1) {
                let i = ny * w + nx;
                if bin.get(nx, ny) && !touches_border[i] {
                    touches_border[i] = true;
                    stack.push((nx, ny));
                }
            }
        }
    }

    let (mut x0, mut y0, mut x1, mut y1) = (usize::MAX, usize::MAX, 0, 0);
    for y in 0..h {
        for x in 0..w {
            if bin.get(x, y) && !touches_border[y * w + x] {
                x0 = x0.min(x);
                y0 = y0.min(y);
                x1 = x1.max(x);
                y1 = y1.max(y);
            }
        }
    }
    if x0 == usize::MAX {
        return Err(EnhanceError::NoInteriorForeground);
    }
    let left = x0.saturating_sub(margin);
    let top = y0.saturating_sub(margin);
    let right = (x1 + margin).min(w - 1);
    let bottom = (y1 + margin).min(h - 1);
    Ok(Rect::new(left, top, right - left + 1, bottom - top + 1))
}
