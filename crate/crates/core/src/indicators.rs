//! Investment profiles, post-window averages and the twelve efficiency ratios.
//!
//! Each firm gets three investment denominators from its pre-window TTA values
//! (minimum, maximum, mean) and four post-window performance averages. Every
//! average divided by every denominator gives one efficiency ratio.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::{CompanyRecord, IndicatorKind};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IndicatorError {
    #[error("firm `{firm_id}`: TTA value {value} is not strictly positive")]
    NonPositiveTta { firm_id: String, value: f64 },
    #[error("firm `{firm_id}`: {what} window has {found} values, need {need}")]
    WrongWindowLength {
        firm_id: String,
        what: &'static str,
        found: usize,
        need: String,
    },
    #[error("no firms to cross-section")]
    EmptyDataset,
    #[error("unknown indicator name `{0}`")]
    UnknownIndicator(String),
}

/// Sign of the pre-window investment change, first year vs last year.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Increase,
    Decrease,
    Flat,
}

impl Direction {
    pub const ALL: [Direction; 3] = [Self::Increase, Self::Decrease, Self::Flat];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Increase => "increase",
            Self::Decrease => "decrease",
            Self::Flat => "flat",
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Investment summary of one firm over the pre-window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TtaProfile {
    pub tta_min: f64,
    pub tta_max: f64,
    pub tta_mean: f64,
    pub direction: Direction,
}

impl TtaProfile {
    pub fn denominator(&self, d: Denominator) -> f64 {
        match d {
            Denominator::TtaMin => self.tta_min,
            Denominator::TtaMax => self.tta_max,
            Denominator::TtaMean => self.tta_mean,
        }
    }
}

pub fn derive_tta_profile(tta_pre: &[f64]) -> Result<TtaProfile, IndicatorError> {
    profile_for("", tta_pre)
}

fn profile_for(firm_id: &str, tta_pre: &[f64]) -> Result<TtaProfile, IndicatorError> {
    if tta_pre.len() < 2 {
        return Err(IndicatorError::WrongWindowLength {
            firm_id: firm_id.into(),
            what: "pre",
            found: tta_pre.len(),
            need: "at least 2".into(),
        });
    }
    if let Some(&value) = tta_pre.iter().find(|v| !(**v > 0.0) || !v.is_finite()) {
        return Err(IndicatorError::NonPositiveTta {
            firm_id: firm_id.into(),
            value,
        });
    }
    let tta_min = tta_pre.iter().copied().fold(f64::INFINITY, f64::min);
    let tta_max = tta_pre.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let tta_mean = (tta_pre.iter().sum::<f64>() / tta_pre.len() as f64).clamp(tta_min, tta_max);
    let (first, last) = (tta_pre[0], tta_pre[tta_pre.len() - 1]);
    let direction = if first < last {
        Direction::Increase
    } else if first > last {
        Direction::Decrease
    } else {
        Direction::Flat
    };
    Ok(TtaProfile {
        tta_min,
        tta_max,
        tta_mean,
        direction,
    })
}

/// Arithmetic mean over a post-window.
pub fn time_average(values: &[f64]) -> Result<f64, IndicatorError> {
    if values.is_empty() {
        return Err(IndicatorError::WrongWindowLength {
            firm_id: String::new(),
            what: "post",
            found: 0,
            need: "at least 1".into(),
        });
    }
    Ok(values.iter().sum::<f64>() / values.len() as f64)
}

/// Post-window averages of the four indicators for one firm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerformancePanel {
    averages: [f64; 4],
}

impl PerformancePanel {
    pub fn new(ds: f64, da: f64, roi: f64, ros: f64) -> Self {
        Self {
            averages: [ds, da, roi, ros],
        }
    }

    pub fn get(&self, kind: IndicatorKind) -> f64 {
        self.averages[kind_index(kind)]
    }
}

fn kind_index(kind: IndicatorKind) -> usize {
    match kind {
        IndicatorKind::Ds => 0,
        IndicatorKind::Da => 1,
        IndicatorKind::Roi => 2,
        IndicatorKind::Ros => 3,
    }
}

/// Which pre-window statistic divides the performance average.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Denominator {
    TtaMin,
    TtaMax,
    TtaMean,
}

impl Denominator {
    pub const ALL: [Denominator; 3] = [Self::TtaMin, Self::TtaMax, Self::TtaMean];

    /// Name used in file outputs; `ttam` and `ttaM` differ only by case.
    pub fn code(self) -> &'static str {
        match self {
            Self::TtaMin => "ttam",
            Self::TtaMax => "ttaM",
            Self::TtaMean => "tta2",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Self::TtaMin => "TTAm",
            Self::TtaMax => "TTAM",
            Self::TtaMean => "⟨TTA⟩₂",
        }
    }
}

/// One of the twelve efficiency ratios.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Indicator {
    pub kind: IndicatorKind,
    pub denominator: Denominator,
}

impl Indicator {
    /// Denominator-major, the row order of the published tables.
    pub const ALL: [Indicator; 12] = {
        let mut out = [Indicator {
            kind: IndicatorKind::Ds,
            denominator: Denominator::TtaMin,
        }; 12];
        let mut i = 0;
        while i < 12 {
            out[i] = Indicator {
                kind: IndicatorKind::ALL[i % 4],
                denominator: Denominator::ALL[i / 4],
            };
            i += 1;
        }
        out
    };

    pub fn new(kind: IndicatorKind, denominator: Denominator) -> Self {
        Self { kind, denominator }
    }

    /// Position in [`Indicator::ALL`].
    pub fn index(self) -> usize {
        let d = match self.denominator {
            Denominator::TtaMin => 0,
            Denominator::TtaMax => 1,
            Denominator::TtaMean => 2,
        };
        d * 4 + kind_index(self.kind)
    }

    /// e.g. `ds_over_ttam`.
    pub fn name(self) -> String {
        format!("{}_over_{}", self.kind.code(), self.denominator.code())
    }

    /// e.g. `⟨DS⟩₃/TTAm`.
    pub fn label(self) -> String {
        format!("⟨{}⟩₃/{}", self.kind.label(), self.denominator.label())
    }
}

impl fmt::Display for Indicator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for Indicator {
    type Err = IndicatorError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Indicator::ALL
            .into_iter()
            .find(|i| i.name() == s)
            .ok_or_else(|| IndicatorError::UnknownIndicator(s.to_string()))
    }
}

impl Serialize for Indicator {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.name())
    }
}

impl<'de> Deserialize<'de> for Indicator {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// The twelve efficiency ratios of one firm, with the inputs they came from.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EfficiencyMatrix {
    pub firm_id: String,
    pub profile: TtaProfile,
    pub panel: PerformancePanel,
    ratios: [f64; 12],
}

impl EfficiencyMatrix {
    pub fn get(&self, indicator: Indicator) -> f64 {
        self.ratios[indicator.index()]
    }

    /// Ratios in [`Indicator::ALL`] order.
    pub fn ratios(&self) -> &[f64; 12] {
        &self.ratios
    }
}

pub fn efficiency_matrix(record: &CompanyRecord) -> Result<EfficiencyMatrix, IndicatorError> {
    let profile = profile_for(&record.firm_id, &record.tta_pre)?;

    let window = record.perf(IndicatorKind::Ds).len();
    let mut averages = [0.0; 4];
    for kind in IndicatorKind::ALL {
        let values = record.perf(kind);
        if values.is_empty() || values.len() != window {
            return Err(IndicatorError::WrongWindowLength {
                firm_id: record.firm_id.clone(),
                what: "post",
                found: values.len(),
                need: format!("{} for {kind}", window.max(1)),
            });
        }
        averages[kind_index(kind)] = time_average(values)?;
    }
    let panel = PerformancePanel { averages };

    let ratios =
        Indicator::ALL.map(|ind| panel.get(ind.kind) / profile.denominator(ind.denominator));
    Ok(EfficiencyMatrix {
        firm_id: record.firm_id.clone(),
        profile,
        panel,
        ratios,
    })
}

/// Per-indicator samples across firms, firm order preserved.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossSections {
    firm_ids: Vec<String>,
    ratios: Vec<Vec<f64>>,
    tta: Vec<Vec<f64>>,
    averages: Vec<Vec<f64>>,
}

impl CrossSections {
    pub fn firm_ids(&self) -> &[String] {
        &self.firm_ids
    }

    pub fn len(&self) -> usize {
        self.firm_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.firm_ids.is_empty()
    }

    pub fn ratio(&self, indicator: Indicator) -> &[f64] {
        &self.ratios[indicator.index()]
    }

    pub fn ratio_mut(&mut self, indicator: Indicator) -> &mut [f64] {
        &mut self.ratios[indicator.index()]
    }

    pub fn tta(&self, denominator: Denominator) -> &[f64] {
        let i = Denominator::ALL
            .iter()
            .position(|d| *d == denominator)
            .unwrap();
        &self.tta[i]
    }

    pub fn average(&self, kind: IndicatorKind) -> &[f64] {
        &self.averages[kind_index(kind)]
    }

    /// The seven investment and performance-average samples: `ttam, ttaM, tta2,
    /// ds_avg, da_avg, roi_avg, ros_avg`.
    pub fn base_samples(&self) -> Vec<(String, &[f64])> {
        let mut out: Vec<(String, &[f64])> = Denominator::ALL
            .iter()
            .map(|&d| (d.code().to_string(), self.tta(d)))
            .collect();
        out.extend(
            IndicatorKind::ALL
                .iter()
                .map(|&k| (format!("{}_avg", k.code()), self.average(k))),
        );
        out
    }

    /// The twelve ratio samples by name, in [`Indicator::ALL`] order.
    pub fn ratio_samples(&self) -> Vec<(String, &[f64])> {
        Indicator::ALL
            .iter()
            .map(|&i| (i.name(), self.ratio(i)))
            .collect()
    }

    /// Looks up any sample by its public name.
    pub fn get(&self, name: &str) -> Option<&[f64]> {
        self.base_samples()
            .into_iter()
            .chain(self.ratio_samples())
            .find(|(n, _)| n == name)
            .map(|(_, s)| s)
    }
}

pub fn cross_sections(matrices: &[EfficiencyMatrix]) -> Result<CrossSections, IndicatorError> {
    if matrices.is_empty() {
        return Err(IndicatorError::EmptyDataset);
    }
    let n = matrices.len();
    let mut ratios = (0..12).map(|_| Vec::with_capacity(n)).collect::<Vec<_>>();
    let mut tta = (0..3).map(|_| Vec::with_capacity(n)).collect::<Vec<_>>();
    let mut averages = (0..4).map(|_| Vec::with_capacity(n)).collect::<Vec<_>>();
    for m in matrices {
        for (sample, value) in ratios.iter_mut().zip(m.ratios) {
            sample.push(value);
        }
        for (sample, d) in tta.iter_mut().zip(Denominator::ALL) {
            sample.push(m.profile.denominator(d));
        }
        for (sample, kind) in averages.iter_mut().zip(IndicatorKind::ALL) {
            sample.push(m.panel.get(kind));
        }
    }
    Ok(CrossSections {
        firm_ids: matrices.iter().map(|m| m.firm_id.clone()).collect(),
        ratios,
        tta,
        averages,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::collections::BTreeMap;

    fn record(id: &str, tta: &[f64], ds: [f64; 3]) -> CompanyRecord {
        let mut perf_post = BTreeMap::new();
        for kind in IndicatorKind::ALL {
            perf_post.insert(kind, vec![0.0; 3]);
        }
        perf_post.insert(IndicatorKind::Ds, ds.to_vec());
        CompanyRecord {
            firm_id: id.into(),
            name: id.into(),
            sector: String::new(),
            tta_pre: tta.to_vec(),
            perf_post,
        }
    }

    #[test]
    fn profiles() {
        let p = derive_tta_profile(&[100.0, 200.0]).unwrap();
        assert_eq!(
            (p.tta_min, p.tta_max, p.tta_mean, p.direction),
            (100.0, 200.0, 150.0, Direction::Increase)
        );
        let p = derive_tta_profile(&[200.0, 100.0]).unwrap();
        assert_eq!(
            (p.tta_min, p.tta_max, p.tta_mean, p.direction),
            (100.0, 200.0, 150.0, Direction::Decrease)
        );
        let p = derive_tta_profile(&[100.0, 100.0]).unwrap();
        assert_eq!(
            (p.tta_min, p.tta_max, p.tta_mean, p.direction),
            (100.0, 100.0, 100.0, Direction::Flat)
        );
        // first-vs-last on longer windows
        let p = derive_tta_profile(&[5.0, 1.0, 9.0, 5.0]).unwrap();
        assert_eq!(
            (p.tta_min, p.tta_max, p.tta_mean, p.direction),
            (1.0, 9.0, 5.0, Direction::Flat)
        );
    }

    #[test]
    fn profile_errors() {
        assert!(matches!(
            derive_tta_profile(&[1.0]),
            Err(IndicatorError::WrongWindowLength { .. })
        ));
        assert!(matches!(
            derive_tta_profile(&[1.0, 0.0]),
            Err(IndicatorError::NonPositiveTta { .. })
        ));
        assert!(matches!(
            derive_tta_profile(&[-3.0, 1.0]),
            Err(IndicatorError::NonPositiveTta { value, .. }) if value == -3.0
        ));
    }

    #[test]
    fn time_averages() {
        assert_eq!(time_average(&[1.0, 1.0, 1.0]).unwrap(), 1.0);
        assert_eq!(time_average(&[-0.1, 0.0, 0.1]).unwrap(), 0.0);
        assert!(time_average(&[]).is_err());
    }

    #[test]
    fn direct_quotients() {
        let m = efficiency_matrix(&record("A", &[2.0, 4.0], [0.5; 3])).unwrap();
        let ds = |d| m.get(Indicator::new(IndicatorKind::Ds, d));
        assert_eq!(ds(Denominator::TtaMin), 0.25);
        assert_eq!(ds(Denominator::TtaMax), 0.125);
        assert_abs_diff_eq!(ds(Denominator::TtaMean), 1.0 / 6.0, epsilon = 1e-15);
        // the other numerators are zero
        assert_eq!(
            m.get(Indicator::new(IndicatorKind::Ros, Denominator::TtaMin)),
            0.0
        );
    }

    #[test]
    fn zero_averages_give_zero_ratios() {
        let m = efficiency_matrix(&record("A", &[3.0, 7.0], [0.0; 3])).unwrap();
        assert!(m.ratios().iter().all(|&r| r == 0.0));
    }

    #[test]
    fn mismatched_post_windows_are_rejected() {
        let mut r = record("A", &[1.0, 2.0], [0.0; 3]);
        r.perf_post.insert(IndicatorKind::Roi, vec![0.1, 0.2]);
        assert!(matches!(
            efficiency_matrix(&r),
            Err(IndicatorError::WrongWindowLength { .. })
        ));
    }

    #[test]
    fn names_and_order() {
        let names: Vec<String> = Indicator::ALL.iter().map(|i| i.name()).collect();
        assert_eq!(names[0], "ds_over_ttam");
        assert_eq!(names[3], "ros_over_ttam");
        assert_eq!(names[4], "ds_over_ttaM");
        assert_eq!(names[11], "ros_over_tta2");
        let unique: std::collections::HashSet<_> = names.iter().collect();
        assert_eq!(unique.len(), 12);
        for (i, ind) in Indicator::ALL.iter().enumerate() {
            assert_eq!(ind.index(), i);
            assert_eq!(ind.name().parse::<Indicator>().unwrap(), *ind);
        }
        assert!("ds_over_tta3".parse::<Indicator>().is_err());
        assert_eq!(Indicator::ALL[6].label(), "⟨ROI⟩₃/TTAM");
    }

    #[test]
    fn cross_sections_preserve_order() {
        let ms: Vec<_> = [("B", 1.0), ("A", 2.0), ("C", 3.0)]
            .iter()
            .map(|&(id, v)| efficiency_matrix(&record(id, &[1.0, 1.0], [v; 3])).unwrap())
            .collect();
        let cs = cross_sections(&ms).unwrap();
        assert_eq!(cs.firm_ids(), ["B", "A", "C"]);
        assert_eq!(cs.get("ds_over_ttam").unwrap(), &[1.0, 2.0, 3.0]);
        assert_eq!(cs.get("ds_avg").unwrap(), &[1.0, 2.0, 3.0]);
        assert_eq!(cs.get("ttaM").unwrap(), &[1.0, 1.0, 1.0]);
        assert_eq!(cs.base_samples().len(), 7);
        assert_eq!(cs.ratio_samples().len(), 12);
        assert!(cs.get("nope").is_none());
        assert!(matches!(
            cross_sections(&[]),
            Err(IndicatorError::EmptyDataset)
        ));

        let one = cross_sections(&ms[..1]).unwrap();
        assert!(one.ratio_samples().iter().all(|(_, s)| s.len() == 1));
    }
}
