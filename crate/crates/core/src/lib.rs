//! Performance-efficiency screening for small cross-sections of firms.
//!
//! The pipeline is:
//!
//! 1. [`ingest`] reads a wide CSV panel (pre-window investment levels, post-window
//!    performance indicators) into [`CompanyRecord`]s.
//! 2. [`indicators`] derives the investment profile of each firm and the twelve
//!    efficiency ratios (four performance averages over three investment denominators).
//! 3. [`stats`] summarizes each cross-section with moment statistics and builds
//!    `]mean - k*sd, mean + k*sd[` intervals.
//! 4. [`outliers`] classifies every firm against every interval and rolls the
//!    classifications up into systematic outliers, near-misses and direction cohorts.

pub mod indicators;
pub mod ingest;
pub mod outliers;
pub mod stats;

pub use indicators::{
    cross_sections, derive_tta_profile, efficiency_matrix, time_average, CrossSections,
    Denominator, Direction, EfficiencyMatrix, Indicator, IndicatorError, PerformancePanel,
    TtaProfile,
};
pub use ingest::{
    parse_dataset, parse_reader, validate_dataset, write_dataset, write_writer, CompanyRecord,
    DatasetConfig, IndicatorKind, IngestError, Violation,
};
pub use outliers::{
    classify, detect_outliers, direction_cohorts, near_misses, systematic_outliers, Bound, Class,
    Classification, CohortSummary, DegenerateIndicator, DegenerateReason, FirmTally,
    IndicatorScreen, NearMiss, OutlierError, OutlierReport, Polarity, SystematicOutlier,
};
pub use stats::{
    coefficient_of_variation, interval, summarize, zscore, DistributionSummary, KurtosisBasis,
    MomentConventions, OutlierInterval, ShapeMode, StatsError, StdevMode,
};
