//! Test support for `outlier-perf`: seeded synthetic panels, the published
//! limits and outlier cells used as reference vectors, and a reference
//! implementation of the moment statistics written from the textbook formulas.

mod generate;
mod oracle;
mod published;

pub use generate::{generate, FixtureError, FixtureSpec, PlantedOutlier, ValueRange};
pub use oracle::oracle_summarize;
pub use published::{
    table1_rows, table4_fixture, PublishedCell, PublishedFirm, PublishedInterval, SummaryRow,
    Table4Fixture,
};
