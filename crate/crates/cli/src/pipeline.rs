//! End-to-end run: ingest, ratios, screening, rendering, atomic output.
//!
//! Every artifact is rendered in memory first. Files are then written into a staging
//! directory next to the output directory and moved into place with a single
//! rename, so a failed run leaves nothing behind.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use log::{info, warn};
use outlier_perf_core::{
    cross_sections, detect_outliers, direction_cohorts, efficiency_matrix, near_misses,
    parse_dataset, systematic_outliers, validate_dataset, DatasetConfig, IndicatorError,
    IngestError, MomentConventions, OutlierError, StatsError,
};
use thiserror::Error;

use crate::document::{build_document, to_json};
use crate::scatter::{scatter_series, stacked_tta_csv};
use crate::tables::{
    base_summaries, ratio_summaries, render_interval_table, render_outlier_notes,
    render_outlier_table, render_summary_table, TableFormat,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum OutputFormat {
    Markdown,
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub input: PathBuf,
    pub dataset: DatasetConfig,
    pub k: f64,
    pub conventions: MomentConventions,
    pub systematic_threshold: usize,
    pub near_miss_margin: f64,
    pub out: PathBuf,
    pub formats: BTreeSet<OutputFormat>,
    pub scatter: bool,
    pub svg: bool,
    pub stacked_tta: bool,
    /// Replace a non-empty output directory.
    pub force: bool,
}

impl RunConfig {
    pub fn new(input: impl Into<PathBuf>, out: impl Into<PathBuf>) -> Self {
        Self {
            input: input.into(),
            dataset: DatasetConfig::default(),
            k: 2.0,
            conventions: MomentConventions::default(),
            systematic_threshold: 6,
            near_miss_margin: 0.5,
            out: out.into(),
            formats: BTreeSet::from([OutputFormat::Markdown, OutputFormat::Json]),
            scatter: false,
            svg: false,
            stacked_tta: false,
            force: false,
        }
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        let bad = |m: String| Err(PipelineError::Config(m));
        if !(self.k > 0.0 && self.k.is_finite()) {
            return bad(format!("k must be a positive number, got {}", self.k));
        }
        if !(1..=12).contains(&self.systematic_threshold) {
            return bad(format!(
                "systematic threshold must be in 1..=12, got {}",
                self.systematic_threshold
            ));
        }
        if !(self.near_miss_margin > 0.0 && self.near_miss_margin < 1.0) {
            return bad(format!(
                "near-miss margin must be in (0, 1), got {}",
                self.near_miss_margin
            ));
        }
        if self.formats.is_empty() && !self.scatter && !self.stacked_tta {
            return bad("nothing to write: no formats selected".into());
        }
        if self.svg && !self.scatter {
            return bad("--svg requires --scatter".into());
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("{0}")]
    Config(String),
    #[error("{path}: {source}")]
    Ingest {
        path: PathBuf,
        #[source]
        source: IngestError,
    },
    #[error("{path}: {violations} invariant violation(s): {first}")]
    Invalid {
        path: PathBuf,
        violations: usize,
        first: String,
    },
    #[error(transparent)]
    Indicator(#[from] IndicatorError),
    #[error(transparent)]
    Outlier(#[from] OutlierError),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error("output directory {0} exists and is not empty (use --force to replace it)")]
    OutputExists(PathBuf),
    #[error("writing {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl PipelineError {
    /// 2 for usage problems, 1 for everything data- or I/O-related.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) | Self::OutputExists(_) => 2,
            _ => 1,
        }
    }
}

/// Relative path -> file contents.
pub type Artifacts = BTreeMap<PathBuf, String>;

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub firms: usize,
    pub files: Vec<PathBuf>,
    pub outlier_firms: usize,
    pub systematic: usize,
}

/// Runs the analysis and returns the rendered artifacts without touching the disk.
pub fn render_artifacts(config: &RunConfig) -> Result<(Artifacts, RunSummary), PipelineError> {
    config.validate()?;
    let records =
        parse_dataset(&config.input, &config.dataset).map_err(|source| PipelineError::Ingest {
            path: config.input.clone(),
            source,
        })?;
    let violations = validate_dataset(&records, &config.dataset);
    if let Some(first) = violations.first() {
        return Err(PipelineError::Invalid {
            path: config.input.clone(),
            violations: violations.len(),
            first: first.to_string(),
        });
    }
    info!(
        "{} firms read from {}",
        records.len(),
        config.input.display()
    );

    let matrices = records
        .iter()
        .map(efficiency_matrix)
        .collect::<Result<Vec<_>, _>>()?;
    let sections = cross_sections(&matrices)?;
    let report = detect_outliers(&sections, config.k, config.conventions)?;
    for d in &report.degenerate {
        warn!("{} excluded from screening ({:?})", d.indicator, d.reason);
    }
    let systematic = systematic_outliers(&report, config.systematic_threshold)?;
    let near = near_misses(&report, config.near_miss_margin)?;
    let cohorts = direction_cohorts(&records, &report, config.systematic_threshold)?;
    let names: BTreeMap<String, String> = records
        .iter()
        .map(|r| (r.firm_id.clone(), r.name.clone()))
        .collect();

    let base = base_summaries(&sections, config.conventions)?;
    let ratios = ratio_summaries(&sections, config.conventions)?;

    let mut files = Artifacts::new();
    for (format, table) in [
        (OutputFormat::Markdown, TableFormat::Markdown),
        (OutputFormat::Csv, TableFormat::Csv),
    ] {
        if !config.formats.contains(&format) {
            continue;
        }
        let ext = table.extension();
        files.insert(
            format!("summary.{ext}").into(),
            render_summary_table("Investment levels and performance averages", &base, table),
        );
        files.insert(
            format!("indicators.{ext}").into(),
            render_summary_table("Efficiency ratios", &ratios, table),
        );
        files.insert(
            format!("intervals.{ext}").into(),
            render_interval_table(&report, table),
        );
        let mut outliers = render_outlier_table(&report, table, &names);
        if table == TableFormat::Markdown {
            outliers.push_str(&render_outlier_notes(
                &systematic,
                config.systematic_threshold,
                &near,
                config.near_miss_margin,
                &names,
            ));
        }
        files.insert(format!("outliers.{ext}").into(), outliers);
    }
    if config.formats.contains(&OutputFormat::Json) {
        let doc = build_document(
            &report,
            &systematic,
            config.systematic_threshold,
            &near,
            config.near_miss_margin,
            Some(&cohorts),
        );
        files.insert("report.json".into(), to_json(&doc));
    }
    if config.scatter {
        for series in scatter_series(&records, &matrices, &config.dataset) {
            files.insert(
                Path::new("scatter").join(format!("{}.csv", series.name)),
                series.to_csv(),
            );
            if config.svg {
                files.insert(
                    Path::new("scatter").join(format!("{}.svg", series.name)),
                    series.to_svg(),
                );
            }
        }
    }
    if config.stacked_tta {
        files.insert(
            Path::new("scatter").join("stacked_tta.csv"),
            stacked_tta_csv(&records, &config.dataset),
        );
    }

    let summary = RunSummary {
        firms: records.len(),
        files: files.keys().cloned().collect(),
        outlier_firms: report.outlier_firms().len(),
        systematic: systematic.len(),
    };
    Ok((files, summary))
}

/// Renders everything, then publishes the output directory atomically.
pub fn run_pipeline(config: &RunConfig) -> Result<RunSummary, PipelineError> {
    let (files, summary) = render_artifacts(config)?;
    publish(&config.out, &files, config.force)?;
    Ok(summary)
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> PipelineError + '_ {
    move |source| PipelineError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Writes `files` under `out`. Either the whole tree appears or nothing changes.
pub fn publish(out: &Path, files: &Artifacts, force: bool) -> Result<(), PipelineError> {
    let existing = match std::fs::read_dir(out) {
        Ok(mut entries) => Some(entries.next().is_some()),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => None,
        Err(e) => return Err(io_err(out)(e)),
    };
    if existing == Some(true) && !force {
        return Err(PipelineError::OutputExists(out.to_path_buf()));
    }

    let parent = match out.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    std::fs::create_dir_all(&parent).map_err(io_err(&parent))?;
    let staging = tempfile::Builder::new()
        .prefix(".outlier-perf-staging-")
        .tempdir_in(&parent)
        .map_err(io_err(&parent))?;
    for (rel, contents) in files {
        let path = staging.path().join(rel);
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir).map_err(io_err(dir))?;
        }
        std::fs::write(&path, contents).map_err(io_err(&path))?;
    }

    match existing {
        None => {}
        Some(false) => std::fs::remove_dir(out).map_err(io_err(out))?,
        Some(true) => {
            let trash = tempfile::Builder::new()
                .prefix(".outlier-perf-old-")
                .tempdir_in(&parent)
                .map_err(io_err(&parent))?;
            let old = trash.path().join("previous");
            std::fs::rename(out, &old).map_err(io_err(out))?;
            // `trash` drops at end of scope and removes the previous tree
            let staged = staging.keep();
            return std::fs::rename(&staged, out).map_err(|e| {
                let _ = std::fs::rename(&old, out);
                let _ = std::fs::remove_dir_all(&staged);
                io_err(out)(e)
            });
        }
    }
    let staged = staging.keep();
    std::fs::rename(&staged, out).map_err(|e| {
        let _ = std::fs::remove_dir_all(&staged);
        io_err(out)(e)
    })
}
