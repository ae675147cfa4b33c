//! JSON serialization of an [`OutlierReport`], schema `outlier-report/1`.
//!
//! Maps are `BTreeMap`s so key order, and therefore the bytes, are stable.

use std::collections::BTreeMap;

use outlier_perf_core::{
    Class, CohortSummary, DegenerateReason, DistributionSummary, MomentConventions, NearMiss,
    OutlierInterval, OutlierReport, Polarity, SystematicOutlier,
};
use serde::Serialize;

pub const SCHEMA: &str = "outlier-report/1";

#[derive(Debug, Serialize)]
pub struct ReportDocument {
    pub schema: &'static str,
    pub k: f64,
    pub conventions: Option<MomentConventions>,
    pub systematic_threshold: usize,
    pub near_miss_margin: f64,
    pub indicators: BTreeMap<String, IndicatorEntry>,
    pub degenerate: BTreeMap<String, DegenerateEntry>,
    pub firms: BTreeMap<String, FirmEntry>,
    pub near_misses: Vec<NearMiss>,
    pub cohorts: Option<CohortCounts>,
}

#[derive(Debug, Serialize)]
pub struct IndicatorEntry {
    pub summary: Option<DistributionSummary>,
    pub interval: OutlierInterval,
    pub classifications: BTreeMap<String, CellEntry>,
}

#[derive(Debug, Serialize)]
pub struct CellEntry {
    pub value: f64,
    pub class: Class,
}

#[derive(Debug, Serialize)]
pub struct DegenerateEntry {
    pub reason: DegenerateReason,
    pub summary: DistributionSummary,
}

#[derive(Debug, Serialize)]
pub struct FirmEntry {
    pub positive_count: usize,
    pub negative_count: usize,
    pub systematic: Option<Polarity>,
    pub direction: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct CohortCounts {
    pub increase: usize,
    pub decrease: usize,
    pub flat: usize,
}

pub fn build_document(
    report: &OutlierReport,
    systematic: &[SystematicOutlier],
    threshold: usize,
    near: &[NearMiss],
    margin: f64,
    cohorts: Option<&CohortSummary>,
) -> ReportDocument {
    let indicators = report
        .screens
        .iter()
        .map(|s| {
            let classifications = report
                .firm_ids
                .iter()
                .zip(&s.cells)
                .map(|(f, c)| {
                    (
                        f.clone(),
                        CellEntry {
                            value: c.value,
                            class: c.class,
                        },
                    )
                })
                .collect();
            (
                s.indicator.name(),
                IndicatorEntry {
                    summary: s.summary,
                    interval: s.interval,
                    classifications,
                },
            )
        })
        .collect();
    let degenerate = report
        .degenerate
        .iter()
        .map(|d| {
            (
                d.indicator.name(),
                DegenerateEntry {
                    reason: d.reason,
                    summary: d.summary,
                },
            )
        })
        .collect();
    let firms = report
        .tallies()
        .into_iter()
        .map(|t| {
            let entry = FirmEntry {
                positive_count: t.positive,
                negative_count: t.negative,
                systematic: systematic
                    .iter()
                    .find(|s| s.firm_id == t.firm_id)
                    .map(|s| s.polarity),
                direction: cohorts
                    .and_then(|c| c.direction_of(&t.firm_id))
                    .map(|d| d.to_string()),
            };
            (t.firm_id, entry)
        })
        .collect();
    ReportDocument {
        schema: SCHEMA,
        k: report.k,
        conventions: report.conventions,
        systematic_threshold: threshold,
        near_miss_margin: margin,
        indicators,
        degenerate,
        firms,
        near_misses: near.to_vec(),
        cohorts: cohorts.map(|c| CohortCounts {
            increase: c.increase,
            decrease: c.decrease,
            flat: c.flat,
        }),
    }
}

pub fn to_json(doc: &ReportDocument) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("report is serializable");
    s.push('\n');
    s
}
