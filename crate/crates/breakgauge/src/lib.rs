//! File formats, configuration and the table pipeline around
//! `breakgauge-core`.

pub mod config;
pub mod csvio;
pub mod error;
pub mod pipeline;
pub mod report;
pub mod tables;

pub use config::{OutputFormat, Overrides, PipelineConfig, RegimeSpec};
pub use error::{Error, Result, Stage};
pub use pipeline::{analyze, run_pipeline, run_scoped, Analysis, PipelineReport, Scope};
