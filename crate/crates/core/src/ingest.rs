//! Wide-format CSV panel ingestion.
//!
//! One row per firm. The header is fixed by the [`DatasetConfig`] year labels:
//!
//! ```text
//! firm_id,name,sector,tta_2006,tta_2007,ds_2008,ds_2009,ds_2010,da_2008,...,ros_2010
//! ```
//!
//! Investment (`tta_*`) cells must be strictly positive. Performance cells are
//! dimensionless fractions (`0.0795` is 7.95%) and may be negative. Missing cells are
//! errors; nothing is imputed.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// The four post-window performance indicators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IndicatorKind {
    /// Sales variation.
    Ds,
    /// Total-assets variation.
    Da,
    /// Return on investments.
    Roi,
    /// Return on sales.
    Ros,
}

impl IndicatorKind {
    pub const ALL: [IndicatorKind; 4] = [Self::Ds, Self::Da, Self::Roi, Self::Ros];

    /// Lowercase column prefix, also used in indicator names.
    pub fn code(self) -> &'static str {
        match self {
            Self::Ds => "ds",
            Self::Da => "da",
            Self::Roi => "roi",
            Self::Ros => "ros",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Self::Ds => "DS",
            Self::Da => "DA",
            Self::Roi => "ROI",
            Self::Ros => "ROS",
        }
    }
}

impl fmt::Display for IndicatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Year labels of the two observation windows. Window lengths are the label counts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetConfig {
    pre_years: Vec<String>,
    post_years: Vec<String>,
}

impl Default for DatasetConfig {
    fn default() -> Self {
        Self {
            pre_years: vec!["2006".into(), "2007".into()],
            post_years: vec!["2008".into(), "2009".into(), "2010".into()],
        }
    }
}

impl DatasetConfig {
    /// Requires at least two pre-window years (min and max must be able to differ)
    /// and at least one post-window year, with no repeated labels.
    pub fn new<S: Into<String>>(
        pre_years: impl IntoIterator<Item = S>,
        post_years: impl IntoIterator<Item = S>,
    ) -> Result<Self, IngestError> {
        let pre_years: Vec<String> = pre_years.into_iter().map(Into::into).collect();
        let post_years: Vec<String> = post_years.into_iter().map(Into::into).collect();
        if pre_years.len() < 2 {
            return Err(IngestError::InvalidConfig(format!(
                "pre-window needs at least 2 years, got {}",
                pre_years.len()
            )));
        }
        if post_years.is_empty() {
            return Err(IngestError::InvalidConfig(
                "post-window needs at least 1 year".into(),
            ));
        }
        for years in [&pre_years, &post_years] {
            let unique: HashSet<&String> = years.iter().collect();
            if unique.len() != years.len() {
                return Err(IngestError::InvalidConfig(format!(
                    "repeated year label in {years:?}"
                )));
            }
        }
        Ok(Self {
            pre_years,
            post_years,
        })
    }

    pub fn pre_window(&self) -> usize {
        self.pre_years.len()
    }

    pub fn post_window(&self) -> usize {
        self.post_years.len()
    }

    pub fn pre_years(&self) -> &[String] {
        &self.pre_years
    }

    pub fn post_years(&self) -> &[String] {
        &self.post_years
    }

    /// The exact header row, in order.
    pub fn columns(&self) -> Vec<String> {
        let mut cols = vec!["firm_id".to_string(), "name".into(), "sector".into()];
        cols.extend(self.pre_years.iter().map(|y| format!("tta_{y}")));
        for kind in IndicatorKind::ALL {
            cols.extend(
                self.post_years
                    .iter()
                    .map(|y| format!("{}_{y}", kind.code())),
            );
        }
        cols
    }
}

/// One firm's raw panel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompanyRecord {
    pub firm_id: String,
    pub name: String,
    /// Free text, carried as metadata only.
    pub sector: String,
    /// Investment level per pre-window year, chronological.
    pub tta_pre: Vec<f64>,
    /// Indicator values per post-window year, chronological.
    pub perf_post: BTreeMap<IndicatorKind, Vec<f64>>,
}

impl CompanyRecord {
    /// Values of one indicator; empty if the kind is absent (which validation reports).
    pub fn perf(&self, kind: IndicatorKind) -> &[f64] {
        self.perf_post.get(&kind).map(Vec::as_slice).unwrap_or(&[])
    }
}

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("invalid dataset config: {0}")]
    InvalidConfig(String),
    #[error("missing column `{0}`")]
    MissingColumn(String),
    #[error("unexpected column `{0}`")]
    UnexpectedColumn(String),
    #[error("line {line}, column `{column}`: not a finite number: {value:?}")]
    NonNumericCell {
        line: u64,
        column: String,
        value: String,
    },
    #[error("line {line}: empty firm_id")]
    EmptyFirmId { line: u64 },
    #[error("line {line}: firm `{firm_id}` has non-positive TTA {value} for year {year}")]
    NonPositiveTta {
        line: u64,
        firm_id: String,
        year: String,
        value: f64,
    },
    #[error("line {line}: duplicate firm_id `{firm_id}`")]
    DuplicateFirmId { line: u64, firm_id: String },
    #[error("dataset has no firms")]
    EmptyDataset,
}

/// Reads a panel file. See [`parse_reader`].
pub fn parse_dataset(
    path: impl AsRef<Path>,
    config: &DatasetConfig,
) -> Result<Vec<CompanyRecord>, IngestError> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|source| IngestError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_reader(file, config)
}

/// Parses a panel from any reader. Records come back in row order; the first
/// offending cell aborts the parse.
pub fn parse_reader<R: Read>(
    reader: R,
    config: &DatasetConfig,
) -> Result<Vec<CompanyRecord>, IngestError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(reader);
    let header = rdr.headers()?.clone();

    let expected = config.columns();
    let mut index = BTreeMap::new();
    for (i, name) in header.iter().enumerate() {
        if !expected.iter().any(|c| c == name) {
            return Err(IngestError::UnexpectedColumn(name.to_string()));
        }
        index.insert(name.to_string(), i);
    }
    let col = |name: &str| -> Result<usize, IngestError> {
        index
            .get(name)
            .copied()
            .ok_or_else(|| IngestError::MissingColumn(name.to_string()))
    };
    let firm_col = col("firm_id")?;
    let name_col = col("name")?;
    let sector_col = col("sector")?;
    let tta_cols = config
        .pre_years
        .iter()
        .map(|y| col(&format!("tta_{y}")))
        .collect::<Result<Vec<_>, _>>()?;
    let mut perf_cols = Vec::with_capacity(4);
    for kind in IndicatorKind::ALL {
        let cols = config
            .post_years
            .iter()
            .map(|y| col(&format!("{}_{y}", kind.code())))
            .collect::<Result<Vec<_>, _>>()?;
        perf_cols.push((kind, cols));
    }

    let mut seen = HashSet::new();
    let mut records = Vec::new();
    for row in rdr.records() {
        let row = row?;
        let line = row.position().map_or(0, |p| p.line());
        let cell = |i: usize| row.get(i).unwrap_or("");
        let number = |i: usize| -> Result<f64, IngestError> {
            let raw = cell(i);
            match raw.trim().parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                _ => Err(IngestError::NonNumericCell {
                    line,
                    column: header.get(i).unwrap_or("").to_string(),
                    value: raw.to_string(),
                }),
            }
        };

        let firm_id = cell(firm_col).trim().to_string();
        if firm_id.is_empty() {
            return Err(IngestError::EmptyFirmId { line });
        }

        let mut tta_pre = Vec::with_capacity(tta_cols.len());
        for (&i, year) in tta_cols.iter().zip(&config.pre_years) {
            let value = number(i)?;
            if value <= 0.0 {
                return Err(IngestError::NonPositiveTta {
                    line,
                    firm_id,
                    year: year.clone(),
                    value,
                });
            }
            tta_pre.push(value);
        }

        let mut perf_post = BTreeMap::new();
        for (kind, cols) in &perf_cols {
            let values = cols
                .iter()
                .map(|&i| number(i))
                .collect::<Result<Vec<_>, _>>()?;
            perf_post.insert(*kind, values);
        }

        if !seen.insert(firm_id.clone()) {
            return Err(IngestError::DuplicateFirmId { line, firm_id });
        }
        records.push(CompanyRecord {
            firm_id,
            name: cell(name_col).to_string(),
            sector: cell(sector_col).to_string(),
            tta_pre,
            perf_post,
        });
    }

    if records.is_empty() {
        return Err(IngestError::EmptyDataset);
    }
    Ok(records)
}

/// Writes records to a file in the canonical column order.
pub fn write_dataset(
    path: impl AsRef<Path>,
    records: &[CompanyRecord],
    config: &DatasetConfig,
) -> Result<(), IngestError> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|source| IngestError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    write_writer(file, records, config)
}

/// Numbers are written in shortest round-trip form so `parse(write(x)) == x`.
pub fn write_writer<W: Write>(
    writer: W,
    records: &[CompanyRecord],
    config: &DatasetConfig,
) -> Result<(), IngestError> {
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(config.columns())?;
    for r in records {
        let mut row = vec![r.firm_id.clone(), r.name.clone(), r.sector.clone()];
        row.extend(r.tta_pre.iter().map(|v| v.to_string()));
        for kind in IndicatorKind::ALL {
            row.extend(r.perf(kind).iter().map(|v| v.to_string()));
        }
        wtr.write_record(&row)?;
    }
    wtr.flush().map_err(|e| IngestError::Csv(e.into()))?;
    Ok(())
}

/// A broken record invariant. Violations are data, not failures.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Violation {
    EmptyDataset,
    DuplicateFirmId(String),
    EmptyFirmId {
        index: usize,
    },
    WrongPreWindow {
        firm_id: String,
        expected: usize,
        found: usize,
    },
    NonPositiveTta {
        firm_id: String,
        position: usize,
        value: f64,
    },
    MissingIndicator {
        firm_id: String,
        kind: IndicatorKind,
    },
    WrongPostWindow {
        firm_id: String,
        kind: IndicatorKind,
        expected: usize,
        found: usize,
    },
    NonFiniteValue {
        firm_id: String,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::EmptyDataset => write!(f, "dataset has no firms"),
            Self::DuplicateFirmId(id) => write!(f, "duplicate firm_id `{id}`"),
            Self::EmptyFirmId { index } => write!(f, "record #{index} has an empty firm_id"),
            Self::WrongPreWindow {
                firm_id,
                expected,
                found,
            } => write!(f, "`{firm_id}`: {found} TTA values, expected {expected}"),
            Self::NonPositiveTta {
                firm_id,
                position,
                value,
            } => write!(f, "`{firm_id}`: TTA #{position} is {value}, must be > 0"),
            Self::MissingIndicator { firm_id, kind } => {
                write!(f, "`{firm_id}`: missing indicator {kind}")
            }
            Self::WrongPostWindow {
                firm_id,
                kind,
                expected,
                found,
            } => write!(f, "`{firm_id}`: {found} {kind} values, expected {expected}"),
            Self::NonFiniteValue { firm_id } => write!(f, "`{firm_id}`: non-finite value"),
        }
    }
}

/// Checks every record invariant against `config`'s window lengths.
/// Returns an empty list iff the dataset is usable.
pub fn validate_dataset(records: &[CompanyRecord], config: &DatasetConfig) -> Vec<Violation> {
    let mut out = Vec::new();
    if records.is_empty() {
        out.push(Violation::EmptyDataset);
        return out;
    }
    let mut seen = HashSet::new();
    let mut reported = HashSet::new();
    for (index, r) in records.iter().enumerate() {
        if r.firm_id.trim().is_empty() {
            out.push(Violation::EmptyFirmId { index });
        } else if !seen.insert(r.firm_id.as_str()) && reported.insert(r.firm_id.as_str()) {
            out.push(Violation::DuplicateFirmId(r.firm_id.clone()));
        }
        if r.tta_pre.len() != config.pre_window() {
            out.push(Violation::WrongPreWindow {
                firm_id: r.firm_id.clone(),
                expected: config.pre_window(),
                found: r.tta_pre.len(),
            });
        }
        for (position, &value) in r.tta_pre.iter().enumerate() {
            // NaN fails `> 0` too
            if !(value > 0.0) || !value.is_finite() {
                out.push(Violation::NonPositiveTta {
                    firm_id: r.firm_id.clone(),
                    position,
                    value,
                });
            }
        }
        for kind in IndicatorKind::ALL {
            match r.perf_post.get(&kind) {
                None => out.push(Violation::MissingIndicator {
                    firm_id: r.firm_id.clone(),
                    kind,
                }),
                Some(v) if v.len() != config.post_window() => {
                    out.push(Violation::WrongPostWindow {
                        firm_id: r.firm_id.clone(),
                        kind,
                        expected: config.post_window(),
                        found: v.len(),
                    })
                }
                Some(_) => {}
            }
        }
        if r.perf_post.values().flatten().any(|v| !v.is_finite()) {
            out.push(Violation::NonFiniteValue {
                firm_id: r.firm_id.clone(),
            });
        }
    }
    out
}
