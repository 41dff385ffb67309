//! Orchestration: configuration, the page pipeline, keypad entry, scoring
//! and the enhancement-order ablation.

pub mod ablation;
pub mod config;
pub mod corpus;
pub mod keypad;
pub mod pipeline;
pub mod score;

pub use ablation::{run_ablation, AblationPage, AblationTable};
pub use config::{Order, PipelineConfig, Step};
pub use keypad::{DecodeEvent, EventKind, KeypadSession};
pub use pipeline::{run_pipeline, run_pipeline_image, ConversionReport, PipelineError, Stage};
pub use score::{score_accuracy, word_score, WordScore};
