//! `k`-sigma screening of every firm on every efficiency ratio.
//!
//! A value is an outlier when it falls outside the open interval
//! `]mean - k*sd, mean + k*sd[` of its cross-section. Values sitting exactly on a
//! bound are outliers.

use std::collections::BTreeMap;
use std::fmt;

use log::warn;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::indicators::{derive_tta_profile, CrossSections, Direction, Indicator, IndicatorError};
use crate::ingest::CompanyRecord;
use crate::stats::{
    interval, summarize, DistributionSummary, MomentConventions, OutlierInterval, StatsError,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OutlierError {
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error(transparent)]
    Indicator(#[from] IndicatorError),
    #[error("systematic threshold must be in 1..=12, got {0}")]
    InvalidThreshold(usize),
    #[error("near-miss margin must be in (0, 1), got {0}")]
    InvalidMargin(f64),
    #[error("indicator {indicator}: {found} values for {expected} firms")]
    LengthMismatch {
        indicator: Indicator,
        expected: usize,
        found: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Class {
    NegativeOutlier,
    Inlier,
    PositiveOutlier,
}

impl Class {
    pub fn is_outlier(self) -> bool {
        self != Class::Inlier
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::NegativeOutlier => "negative_outlier",
            Self::Inlier => "inlier",
            Self::PositiveOutlier => "positive_outlier",
        }
    }
}

impl fmt::Display for Class {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Classification {
    pub class: Class,
    pub value: f64,
    pub interval: OutlierInterval,
}

pub fn classify(value: f64, interval: &OutlierInterval) -> Classification {
    let class = if value <= interval.lower {
        Class::NegativeOutlier
    } else if value >= interval.upper {
        Class::PositiveOutlier
    } else {
        Class::Inlier
    };
    Classification {
        class,
        value,
        interval: *interval,
    }
}

/// Screening result for one indicator. `cells` is aligned with the report's firms.
#[derive(Debug, Clone, PartialEq)]
pub struct IndicatorScreen {
    pub indicator: Indicator,
    /// `None` when the interval was supplied rather than estimated.
    pub summary: Option<DistributionSummary>,
    pub interval: OutlierInterval,
    pub cells: Vec<Classification>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DegenerateReason {
    TooFewFirms,
    ZeroVariance,
}

/// An indicator left out of the screen because it carries no spread.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DegenerateIndicator {
    pub indicator: Indicator,
    pub reason: DegenerateReason,
    pub summary: DistributionSummary,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutlierReport {
    pub k: f64,
    pub conventions: Option<MomentConventions>,
    pub firm_ids: Vec<String>,
    pub screens: Vec<IndicatorScreen>,
    pub degenerate: Vec<DegenerateIndicator>,
}

/// Per-firm outlier counts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FirmTally {
    pub firm_id: String,
    pub positive: usize,
    pub negative: usize,
}

impl OutlierReport {
    /// Builds a report from externally supplied intervals, e.g. published limits.
    pub fn from_intervals(
        firm_ids: Vec<String>,
        k: f64,
        rows: Vec<(Indicator, OutlierInterval, Vec<f64>)>,
    ) -> Result<Self, OutlierError> {
        let mut screens = Vec::with_capacity(rows.len());
        for (indicator, interval, values) in rows {
            if values.len() != firm_ids.len() {
                return Err(OutlierError::LengthMismatch {
                    indicator,
                    expected: firm_ids.len(),
                    found: values.len(),
                });
            }
            screens.push(IndicatorScreen {
                indicator,
                summary: None,
                cells: values.iter().map(|&v| classify(v, &interval)).collect(),
                interval,
            });
        }
        Ok(Self {
            k,
            conventions: None,
            firm_ids,
            screens,
            degenerate: Vec::new(),
        })
    }

    pub fn screen(&self, indicator: Indicator) -> Option<&IndicatorScreen> {
        self.screens.iter().find(|s| s.indicator == indicator)
    }

    fn firm_index(&self, firm_id: &str) -> Option<usize> {
        self.firm_ids.iter().position(|f| f == firm_id)
    }

    pub fn cell(&self, firm_id: &str, indicator: Indicator) -> Option<&Classification> {
        let i = self.firm_index(firm_id)?;
        self.screen(indicator).map(|s| &s.cells[i])
    }

    /// Counts per firm, in firm order.
    pub fn tallies(&self) -> Vec<FirmTally> {
        self.firm_ids
            .iter()
            .enumerate()
            .map(|(i, firm_id)| {
                let count = |c: Class| {
                    self.screens
                        .iter()
                        .filter(|s| s.cells[i].class == c)
                        .count()
                };
                FirmTally {
                    firm_id: firm_id.clone(),
                    positive: count(Class::PositiveOutlier),
                    negative: count(Class::NegativeOutlier),
                }
            })
            .collect()
    }

    /// Firms with at least one outlier cell, in firm order.
    pub fn outlier_firms(&self) -> Vec<&str> {
        self.tallies()
            .into_iter()
            .zip(&self.firm_ids)
            .filter(|(t, _)| t.positive + t.negative > 0)
            .map(|(_, f)| f.as_str())
            .collect()
    }
}

/// Screens all twelve ratio cross-sections. Indicators with fewer than two firms or
/// zero spread are listed in `degenerate` and logged, never screened.
pub fn detect_outliers(
    sections: &CrossSections,
    k: f64,
    conventions: MomentConventions,
) -> Result<OutlierReport, OutlierError> {
    if !(k > 0.0) {
        return Err(StatsError::NonPositiveK.into());
    }
    let mut screens = Vec::new();
    let mut degenerate = Vec::new();
    for indicator in Indicator::ALL {
        let sample = sections.ratio(indicator);
        let summary = summarize(sample, conventions)?;
        let reason = if summary.n < 2 {
            Some(DegenerateReason::TooFewFirms)
        } else if summary.stdev == 0.0 {
            Some(DegenerateReason::ZeroVariance)
        } else {
            None
        };
        if let Some(reason) = reason {
            warn!("indicator {indicator} skipped: {reason:?}");
            degenerate.push(DegenerateIndicator {
                indicator,
                reason,
                summary,
            });
            continue;
        }
        let interval = interval(summary.mean, summary.stdev, k)?;
        screens.push(IndicatorScreen {
            indicator,
            summary: Some(summary),
            cells: sample.iter().map(|&v| classify(v, &interval)).collect(),
            interval,
        });
    }
    Ok(OutlierReport {
        k,
        conventions: Some(conventions),
        firm_ids: sections.firm_ids().to_vec(),
        screens,
        degenerate,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    Positive,
    Negative,
    /// Outlier on both sides, with at least one side reaching the threshold.
    Mixed,
}

impl Polarity {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Positive => "positive",
            Self::Negative => "negative",
            Self::Mixed => "mixed",
        }
    }
}

impl fmt::Display for Polarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SystematicOutlier {
    pub firm_id: String,
    pub polarity: Polarity,
    pub positive: usize,
    pub negative: usize,
}

/// Firms that are outliers on at least `threshold` indicators.
///
/// A firm is `Positive` when its positive count reaches the threshold and it has no
/// negative cells (symmetrically for `Negative`). A firm with cells of both signs is
/// `Mixed` when either count reaches the threshold; mixed firms are listed after the
/// single-polarity ones.
pub fn systematic_outliers(
    report: &OutlierReport,
    threshold: usize,
) -> Result<Vec<SystematicOutlier>, OutlierError> {
    if !(1..=Indicator::ALL.len()).contains(&threshold) {
        return Err(OutlierError::InvalidThreshold(threshold));
    }
    let mut single = Vec::new();
    let mut mixed = Vec::new();
    for t in report.tallies() {
        let polarity = match (t.positive, t.negative) {
            (p, 0) if p >= threshold => Polarity::Positive,
            (0, n) if n >= threshold => Polarity::Negative,
            (p, n) if p > 0 && n > 0 && p.max(n) >= threshold => Polarity::Mixed,
            _ => continue,
        };
        let entry = SystematicOutlier {
            firm_id: t.firm_id,
            polarity,
            positive: t.positive,
            negative: t.negative,
        };
        if polarity == Polarity::Mixed {
            mixed.push(entry);
        } else {
            single.push(entry);
        }
    }
    single.extend(mixed);
    Ok(single)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Bound {
    Lower,
    Upper,
}

/// An inlier cell of an already-flagged firm that sits close to a bound.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NearMiss {
    pub firm_id: String,
    pub indicator: Indicator,
    pub value: f64,
    /// Distance to the nearer bound.
    pub distance: f64,
    pub bound: Bound,
}

/// Inlier cells, of firms flagged on at least one indicator, whose distance to the
/// nearer bound is at most `margin * k * sd`.
pub fn near_misses(report: &OutlierReport, margin: f64) -> Result<Vec<NearMiss>, OutlierError> {
    if !(margin > 0.0 && margin < 1.0) {
        return Err(OutlierError::InvalidMargin(margin));
    }
    let flagged = report.outlier_firms();
    let mut out = Vec::new();
    for (i, firm_id) in report.firm_ids.iter().enumerate() {
        if !flagged.contains(&firm_id.as_str()) {
            continue;
        }
        for screen in &report.screens {
            let cell = &screen.cells[i];
            if cell.class != Class::Inlier {
                continue;
            }
            let iv = &screen.interval;
            let (distance, bound) = {
                let to_lower = cell.value - iv.lower;
                let to_upper = iv.upper - cell.value;
                if to_lower <= to_upper {
                    (to_lower, Bound::Lower)
                } else {
                    (to_upper, Bound::Upper)
                }
            };
            if distance <= margin * iv.half_width() {
                out.push(NearMiss {
                    firm_id: firm_id.clone(),
                    indicator: screen.indicator,
                    value: cell.value,
                    distance,
                    bound,
                });
            }
        }
    }
    Ok(out)
}

/// Direction counts plus where the systematic outliers fall.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CohortSummary {
    pub increase: usize,
    pub decrease: usize,
    pub flat: usize,
    /// Direction of each firm, in record order.
    pub directions: Vec<(String, Direction)>,
    /// Systematic outliers with their direction; firms absent from `records` are skipped.
    pub systematic: Vec<(String, Polarity, Direction)>,
}

impl CohortSummary {
    pub fn count(&self, direction: Direction) -> usize {
        match direction {
            Direction::Increase => self.increase,
            Direction::Decrease => self.decrease,
            Direction::Flat => self.flat,
        }
    }

    /// Systematic outliers of `polarity` in cohort `direction`.
    pub fn crosstab(&self, polarity: Polarity, direction: Direction) -> usize {
        self.systematic
            .iter()
            .filter(|(_, p, d)| *p == polarity && *d == direction)
            .count()
    }

    pub fn direction_of(&self, firm_id: &str) -> Option<Direction> {
        self.directions
            .iter()
            .find(|(f, _)| f == firm_id)
            .map(|(_, d)| *d)
    }
}

pub fn direction_cohorts(
    records: &[CompanyRecord],
    report: &OutlierReport,
    threshold: usize,
) -> Result<CohortSummary, OutlierError> {
    let mut directions = Vec::with_capacity(records.len());
    for r in records {
        let profile = derive_tta_profile(&r.tta_pre).map_err(|e| match e {
            IndicatorError::NonPositiveTta { value, .. } => IndicatorError::NonPositiveTta {
                firm_id: r.firm_id.clone(),
                value,
            },
            other => other,
        })?;
        directions.push((r.firm_id.clone(), profile.direction));
    }
    let lookup: BTreeMap<&str, Direction> =
        directions.iter().map(|(f, d)| (f.as_str(), *d)).collect();
    let systematic = systematic_outliers(report, threshold)?
        .into_iter()
        .filter_map(|s| {
            let d = *lookup.get(s.firm_id.as_str())?;
            Some((s.firm_id, s.polarity, d))
        })
        .collect();
    let count = |d: Direction| directions.iter().filter(|(_, x)| *x == d).count();
    Ok(CohortSummary {
        increase: count(Direction::Increase),
        decrease: count(Direction::Decrease),
        flat: count(Direction::Flat),
        systematic,
        directions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::indicators::{cross_sections, efficiency_matrix, Denominator};
    use crate::ingest::IndicatorKind;

    fn iv(lower: f64, upper: f64) -> OutlierInterval {
        OutlierInterval::from_bounds(lower, upper, 2.0).unwrap()
    }

    fn record(id: &str, tta: [f64; 2], perf: f64) -> CompanyRecord {
        CompanyRecord {
            firm_id: id.into(),
            name: id.into(),
            sector: String::new(),
            tta_pre: tta.to_vec(),
            perf_post: IndicatorKind::ALL
                .iter()
                .map(|&k| (k, vec![perf; 3]))
                .collect(),
        }
    }

    fn report_for(records: &[CompanyRecord], k: f64) -> OutlierReport {
        let ms: Vec<_> = records
            .iter()
            .map(|r| efficiency_matrix(r).unwrap())
            .collect();
        detect_outliers(
            &cross_sections(&ms).unwrap(),
            k,
            MomentConventions::default(),
        )
        .unwrap()
    }

    #[test]
    fn classify_published_cells() {
        assert_eq!(
            classify(0.4795, &iv(-0.14684, 0.18427)).class,
            Class::PositiveOutlier
        );
        assert_eq!(
            classify(-0.2466, &iv(-0.080291, 0.085235)).class,
            Class::NegativeOutlier
        );
        assert_eq!(
            classify(0.0186, &iv(-0.14684, 0.18427)).class,
            Class::Inlier
        );
    }

    #[test]
    fn bounds_are_outliers() {
        let i = interval(0.0, 1.0, 2.0).unwrap();
        assert_eq!(classify(2.0, &i).class, Class::PositiveOutlier);
        assert_eq!(classify(-2.0, &i).class, Class::NegativeOutlier);
        assert_eq!(classify(1.9999999, &i).class, Class::Inlier);
        // degenerate interval: everything is an outlier, the mean itself negative
        let d = interval(1.0, 0.0, 2.0).unwrap();
        assert_eq!(classify(1.0, &d).class, Class::NegativeOutlier);
    }

    #[test]
    fn identical_firms_are_all_degenerate() {
        let records: Vec<_> = (0..5)
            .map(|i| record(&i.to_string(), [10.0, 20.0], 0.1))
            .collect();
        let report = report_for(&records, 2.0);
        assert!(report.screens.is_empty());
        assert_eq!(report.degenerate.len(), 12);
        assert!(report
            .degenerate
            .iter()
            .all(|d| d.reason == DegenerateReason::ZeroVariance));
        assert!(report.outlier_firms().is_empty());
        assert!(systematic_outliers(&report, 1).unwrap().is_empty());
    }

    #[test]
    fn single_firm_is_too_few() {
        let report = report_for(&[record("A", [1.0, 2.0], 0.3)], 2.0);
        assert_eq!(report.degenerate.len(), 12);
        assert!(report
            .degenerate
            .iter()
            .all(|d| d.reason == DegenerateReason::TooFewFirms));
    }

    #[test]
    fn far_firm_is_flagged() {
        let mut records: Vec<_> = (0..20)
            .map(|i| record(&format!("f{i}"), [100.0, 100.0], 0.01 * (i % 5) as f64))
            .collect();
        records.push(record("star", [100.0, 100.0], 5.0));
        let report = report_for(&records, 2.0);
        let ind = Indicator::new(IndicatorKind::Ds, Denominator::TtaMin);
        assert_eq!(
            report.cell("star", ind).unwrap().class,
            Class::PositiveOutlier
        );
        assert_eq!(report.outlier_firms(), vec!["star"]);
        let sys = systematic_outliers(&report, 6).unwrap();
        assert_eq!(
            sys,
            vec![SystematicOutlier {
                firm_id: "star".into(),
                polarity: Polarity::Positive,
                positive: 12,
                negative: 0
            }]
        );
    }

    #[test]
    fn non_positive_k_is_rejected() {
        let records = [record("A", [1.0, 2.0], 0.3), record("B", [1.0, 2.0], 0.1)];
        let ms: Vec<_> = records
            .iter()
            .map(|r| efficiency_matrix(r).unwrap())
            .collect();
        let cs = cross_sections(&ms).unwrap();
        assert!(detect_outliers(&cs, 0.0, MomentConventions::default()).is_err());
    }

    fn synthetic(counts: &[(usize, usize)]) -> OutlierReport {
        // one row per indicator, firm i gets +10 on the first `p` rows and -10 on the next `n`
        let firm_ids: Vec<String> = (0..counts.len()).map(|i| format!("F{i}")).collect();
        let rows = Indicator::ALL
            .iter()
            .enumerate()
            .map(|(row, &ind)| {
                let values = counts
                    .iter()
                    .map(|&(p, n)| {
                        if row < p {
                            10.0
                        } else if row < p + n {
                            -10.0
                        } else {
                            0.0
                        }
                    })
                    .collect();
                (ind, iv(-1.0, 1.0), values)
            })
            .collect();
        OutlierReport::from_intervals(firm_ids, 2.0, rows).unwrap()
    }

    #[test]
    fn systematic_polarities() {
        let report = synthetic(&[(0, 0), (12, 0), (0, 7), (6, 2), (3, 0), (1, 1)]);
        let sys = systematic_outliers(&report, 6).unwrap();
        let got: Vec<_> = sys
            .iter()
            .map(|s| (s.firm_id.as_str(), s.polarity))
            .collect();
        assert_eq!(
            got,
            vec![
                ("F1", Polarity::Positive),
                ("F2", Polarity::Negative),
                ("F3", Polarity::Mixed)
            ]
        );
        let mixed = &sys[2];
        assert_eq!((mixed.positive, mixed.negative), (6, 2));

        let all: Vec<_> = systematic_outliers(&report, 1)
            .unwrap()
            .into_iter()
            .map(|s| s.firm_id)
            .collect::<std::collections::BTreeSet<_>>()
            .into_iter()
            .collect();
        let any: Vec<_> = report
            .outlier_firms()
            .into_iter()
            .map(String::from)
            .collect();
        assert_eq!(all, any);

        assert!(matches!(
            systematic_outliers(&report, 0),
            Err(OutlierError::InvalidThreshold(0))
        ));
        assert!(systematic_outliers(&report, 13).is_err());
    }

    #[test]
    fn tallies_match_cells() {
        let report = synthetic(&[(2, 3), (0, 0)]);
        let t = report.tallies();
        assert_eq!((t[0].positive, t[0].negative), (2, 3));
        assert_eq!((t[1].positive, t[1].negative), (0, 0));
    }

    #[test]
    fn near_miss_definition() {
        // interval (-1, 1): k*sd = 1
        let ind = Indicator::ALL[0];
        let rows = vec![
            (ind, iv(-1.0, 1.0), vec![5.0, 0.0]),
            (Indicator::ALL[1], iv(-1.0, 1.0), vec![-1.0 + 0.05, -0.95]),
            (Indicator::ALL[2], iv(-1.0, 1.0), vec![0.0, 0.0]),
        ];
        let report =
            OutlierReport::from_intervals(vec!["flagged".into(), "clean".into()], 2.0, rows)
                .unwrap();
        let nm = near_misses(&report, 0.1).unwrap();
        // the mean is never a near miss; the clean firm is never considered
        assert_eq!(nm.len(), 1);
        assert_eq!(nm[0].firm_id, "flagged");
        assert_eq!(nm[0].indicator, Indicator::ALL[1]);
        assert_eq!(nm[0].bound, Bound::Lower);
        assert!((nm[0].distance - 0.05).abs() < 1e-12);

        assert!(near_misses(&report, 0.0).is_err());
        assert!(near_misses(&report, 1.0).is_err());
    }

    #[test]
    fn cohorts() {
        let records = vec![
            record("up", [1.0, 2.0], 0.0),
            record("down", [2.0, 1.0], 0.0),
            record("flat", [2.0, 2.0], 0.0),
            record("up2", [3.0, 4.0], 0.0),
        ];
        let report = synthetic(&[]);
        let c = direction_cohorts(&records, &report, 6).unwrap();
        assert_eq!((c.increase, c.decrease, c.flat), (2, 1, 1));
        assert_eq!(c.direction_of("down"), Some(Direction::Decrease));

        let flat: Vec<_> = (0..4)
            .map(|i| record(&i.to_string(), [5.0, 5.0], 0.0))
            .collect();
        let c = direction_cohorts(&flat, &report, 6).unwrap();
        assert_eq!((c.increase, c.decrease, c.flat), (0, 0, 4));
    }

    #[test]
    fn cohort_crosstab() {
        let records = vec![record("F0", [1.0, 2.0], 0.0), record("F1", [2.0, 1.0], 0.0)];
        let report = synthetic(&[(8, 0), (0, 9)]);
        let c = direction_cohorts(&records, &report, 6).unwrap();
        assert_eq!(c.crosstab(Polarity::Positive, Direction::Increase), 1);
        assert_eq!(c.crosstab(Polarity::Negative, Direction::Decrease), 1);
        assert_eq!(c.crosstab(Polarity::Negative, Direction::Increase), 0);
    }
}
