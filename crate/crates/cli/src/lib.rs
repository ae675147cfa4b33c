//! Batch front end for the outlier screening pipeline: table rendering, scatter
//! exports, the JSON report and atomic output publishing.

pub mod document;
pub mod format;
pub mod pipeline;
pub mod scatter;
pub mod tables;

pub use pipeline::{
    publish, render_artifacts, run_pipeline, OutputFormat, PipelineError, RunConfig, RunSummary,
};
