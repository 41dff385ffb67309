//! Pipeline configuration, read from a flat TOML file of `key = value`
//! lines. Every key is optional; missing keys take the defaults below.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::decode::{Language, MappingTable};
use crate::enhance::MorphMode;
use crate::extract::FillCriterion;
use crate::layout::{BrailleGeometry, LayoutParams};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("config: {0}")]
    Invalid(String),
}

/// One enhancement step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Step {
    /// Piecewise-linear contrast stretch between two histogram percentiles.
    #[serde(rename = "CS")]
    ContrastStretch,
    /// Intensity adjustment mapping a window `[a, b]` onto the full range.
    #[serde(rename = "IS")]
    IntensityAdjust,
    /// Gaussian smoothing followed by the morphological filter.
    #[serde(rename = "MO")]
    Morphology,
}

impl Step {
    pub fn code(self) -> &'static str {
        match self {
            Step::ContrastStretch => "CS",
            Step::IntensityAdjust => "IS",
            Step::Morphology => "MO",
        }
    }
}

impl FromStr for Step {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "CS" => Ok(Step::ContrastStretch),
            "IS" => Ok(Step::IntensityAdjust),
            "MO" => Ok(Step::Morphology),
            other => Err(ConfigError::Invalid(format!("unknown enhancement step {other:?}"))),
        }
    }
}

/// An enhancement order such as `CS,IS,MO`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Order(pub Vec<Step>);

impl Order {
    pub fn validate(&self) -> Result<(), ConfigError> {
        for (i, s) in self.0.iter().enumerate() {
            if self.0[..i].contains(s) {
                return Err(ConfigError::Invalid(format!("step {} repeated in order", s.code())));
            }
        }
        Ok(())
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("none");
        }
        let codes: Vec<&str> = self.0.iter().map(|s| s.code()).collect();
        f.write_str(&codes.join(","))
    }
}

impl FromStr for Order {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() || s.eq_ignore_ascii_case("none") {
            return Ok(Order(Vec::new()));
        }
        let order = Order(s.split(',').map(str::parse).collect::<Result<_, _>>()?);
        order.validate()?;
        Ok(order)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    /// `en`, `hi` or `ta`.
    pub language: Language,
    /// Defaults to 2 for English and 1 otherwise.
    pub grade: Option<u8>,
    pub order: Order,

    /// Contrast stretch: input percentiles and the outputs they map to.
    pub cs_low_quantile: f64,
    pub cs_high_quantile: f64,
    pub cs_low_out: u8,
    pub cs_high_out: u8,

    /// Intensity adjustment window. Fixed bounds win over the percentiles.
    pub is_low: Option<u8>,
    pub is_high: Option<u8>,
    pub is_low_quantile: f64,
    pub is_high_quantile: f64,

    /// Gaussian sigma in pixels; 0 skips smoothing.
    pub sigma: f64,
    /// Disk radius in pixels; 0 skips the morphological filter.
    pub morph_radius: usize,
    /// Dots are dark, so opening the dot foreground is a gray closing.
    pub morph_mode: MorphMode,

    /// Edge threshold as a fraction of the page's strongest gradient.
    pub edge_fraction: f64,
    /// Absolute edge threshold; overrides `edge_fraction`.
    pub edge_threshold: Option<f64>,
    pub crop_margin: usize,

    /// Fraction of the expected dot area that must be edge pixels.
    pub fill_threshold: f64,
    pub snap_tolerance: f64,
    pub floor_fraction: f64,
    pub line_floor_fraction: f64,

    pub dpi: f64,
    pub dot_pitch_mm: f64,
    pub cell_pitch_mm: f64,
    pub line_pitch_mm: f64,
    pub dot_diameter_mm: f64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        let g = BrailleGeometry::default();
        let l = LayoutParams::default();
        Self {
            language: Language::English,
            grade: None,
            order: Order(vec![Step::ContrastStretch, Step::IntensityAdjust, Step::Morphology]),
            cs_low_quantile: 0.01,
            cs_high_quantile: 0.99,
            cs_low_out: 0,
            cs_high_out: 255,
            is_low: None,
            is_high: None,
            is_low_quantile: 0.02,
            is_high_quantile: 0.5,
            sigma: 1.0,
            morph_radius: 6,
            morph_mode: MorphMode::Close,
            edge_fraction: 0.25,
            edge_threshold: None,
            crop_margin: 2,
            fill_threshold: 0.4,
            snap_tolerance: l.snap_tolerance,
            floor_fraction: l.floor_fraction,
            line_floor_fraction: l.line_floor_fraction,
            dpi: g.dpi,
            dot_pitch_mm: g.dot_pitch_mm,
            cell_pitch_mm: g.cell_pitch_mm,
            line_pitch_mm: g.line_pitch_mm,
            dot_diameter_mm: g.dot_diameter_mm,
        }
    }
}

impl PipelineConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let cfg: PipelineConfig = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config fields are all representable")
    }

    pub fn grade(&self) -> u8 {
        self.grade.unwrap_or_else(|| MappingTable::default_grade(self.language))
    }

    pub fn geometry(&self) -> BrailleGeometry {
        BrailleGeometry {
            dpi: self.dpi,
            dot_pitch_mm: self.dot_pitch_mm,
            cell_pitch_mm: self.cell_pitch_mm,
            line_pitch_mm: self.line_pitch_mm,
            dot_diameter_mm: self.dot_diameter_mm,
        }
    }

    pub fn layout_params(&self) -> LayoutParams {
        LayoutParams {
            snap_tolerance: self.snap_tolerance,
            floor_fraction: self.floor_fraction,
            line_floor_fraction: self.line_floor_fraction,
        }
    }

    pub fn fill_criterion(&self) -> FillCriterion {
        FillCriterion {
            fill_threshold: self.fill_threshold,
            dot_area_px: self.geometry().dot_area_px(),
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |m: &str| Err(ConfigError::Invalid(m.to_string()));
        self.order.validate()?;
        MappingTable::shipped(self.language, self.grade())
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        self.geometry().validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        let unit = |q: f64| (0.0..=1.0).contains(&q);
        if !(unit(self.cs_low_quantile) && unit(self.cs_high_quantile))
            || self.cs_low_quantile >= self.cs_high_quantile
        {
            return bad("cs quantiles must satisfy 0 <= low < high <= 1");
        }
        if self.cs_low_out > self.cs_high_out {
            return bad("cs_low_out must not exceed cs_high_out");
        }
        if !(unit(self.is_low_quantile) && unit(self.is_high_quantile))
            || self.is_low_quantile >= self.is_high_quantile
        {
            return bad("is quantiles must satisfy 0 <= low < high <= 1");
        }
        if let (Some(a), Some(b)) = (self.is_low, self.is_high) {
            if a >= b {
                return bad("is_low must be below is_high");
            }
        }
        if !(self.sigma >= 0.0 && self.sigma.is_finite()) {
            return bad("sigma must be non-negative");
        }
        if !(self.edge_fraction >= 0.0 && self.edge_fraction <= 1.0) {
            return bad("edge_fraction must lie in [0, 1]");
        }
        if self.edge_threshold.is_some_and(|t| !(t >= 0.0)) {
            return bad("edge_threshold must be non-negative");
        }
        if !(self.fill_threshold > 0.0 && self.fill_threshold < 1.0) {
            return bad("fill_threshold must lie strictly between 0 and 1");
        }
        if !(self.snap_tolerance > 0.0 && self.snap_tolerance < 0.5) {
            return bad("snap_tolerance must lie strictly between 0 and 0.5");
        }
        if !((0.0..1.0).contains(&self.floor_fraction) && (0.0..1.0).contains(&self.line_floor_fraction)) {
            return bad("floor fractions must lie in [0, 1)");
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_is_the_default() {
        assert_eq!(PipelineConfig::from_toml("").unwrap(), PipelineConfig::default());
    }

    #[test]
    fn flat_keys_parse() {
        let cfg = PipelineConfig::from_toml(
            "language = \"ta\"\norder = [\"MO\", \"CS\"]\nsigma = 1.0\nmorph_mode = \"close\"\nis_low = 40\n",
        )
        .unwrap();
        assert_eq!(cfg.language, Language::Tamil);
        assert_eq!(cfg.grade(), 1);
        assert_eq!(cfg.order.to_string(), "MO,CS");
        assert_eq!(cfg.morph_mode, MorphMode::Close);
        assert_eq!(cfg.is_low, Some(40));
        let cfg = PipelineConfig::from_toml("morph_mode = \"open\"").unwrap();
        assert_eq!(cfg.morph_mode, MorphMode::Open);
    }

    #[test]
    fn round_trips_through_toml() {
        let cfg = PipelineConfig { grade: Some(1), edge_threshold: Some(30.0), ..Default::default() };
        assert_eq!(PipelineConfig::from_toml(&cfg.to_toml()).unwrap(), cfg);
    }

    #[test]
    fn rejects_bad_values() {
        assert!(PipelineConfig::from_toml("unknown_key = 1").is_err());
        assert!(PipelineConfig::from_toml("order = [\"CS\", \"CS\"]").is_err());
        assert!(PipelineConfig::from_toml("language = \"hi\"\ngrade = 2").is_err());
        assert!(PipelineConfig::from_toml("fill_threshold = 1.5").is_err());
        assert!(PipelineConfig::from_toml("cell_pitch_mm = 1.0").is_err());
    }

    #[test]
    fn order_strings() {
        assert_eq!("cs,is,mo".parse::<Order>().unwrap().to_string(), "CS,IS,MO");
        assert_eq!("none".parse::<Order>().unwrap(), Order(vec![]));
        assert!("CS,XX".parse::<Order>().is_err());
    }
}
