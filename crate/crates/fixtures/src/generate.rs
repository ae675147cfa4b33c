//! Seeded synthetic firm panels.
//!
//! Every firm draws from its own ChaCha8 stream (`stream = firm index`), so a panel
//! is a pure function of the spec and does not depend on generation order.
//! Constraints are enforced by construction where possible and checked afterwards
//! otherwise; a panel that misses a checked constraint is regenerated from a
//! derived seed, up to [`MAX_ATTEMPTS`] times.

use std::collections::BTreeMap;

use outlier_perf_core::{
    cross_sections, detect_outliers, efficiency_matrix, CompanyRecord, DatasetConfig, Direction,
    Indicator, IndicatorKind, MomentConventions,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

pub const MAX_ATTEMPTS: u64 = 64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FixtureError {
    #[error("infeasible constraints: {0}")]
    InfeasibleConstraints(String),
}

/// Half-open range `[low, high)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValueRange {
    pub low: f64,
    pub high: f64,
}

impl ValueRange {
    pub const fn new(low: f64, high: f64) -> Self {
        Self { low, high }
    }

    fn valid(&self) -> bool {
        self.low.is_finite() && self.high.is_finite() && self.low < self.high
    }
}

/// A firm forced to sit `z` (others') standard deviations from the others' mean
/// on one indicator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlantedOutlier {
    pub firm: usize,
    pub indicator: Indicator,
    pub z: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FixtureSpec {
    pub firms: usize,
    pub seed: u64,
    pub config: DatasetConfig,
    /// First pre-window investment level.
    pub tta: ValueRange,
    /// Relative pre-window change for increasing/decreasing firms.
    pub tta_change: ValueRange,
    pub perf: [ValueRange; 4],
    /// Exact `(increase, decrease, flat)` counts; random increase/decrease otherwise.
    pub directions: Option<(usize, usize, usize)>,
    pub planted: Vec<PlantedOutlier>,
    /// Interval multiplier used to check planted outliers.
    pub check_k: f64,
}

impl FixtureSpec {
    pub fn new(firms: usize, seed: u64) -> Self {
        Self {
            firms,
            seed,
            config: DatasetConfig::default(),
            tta: ValueRange::new(1_000.0, 2_000.0),
            tta_change: ValueRange::new(0.05, 0.5),
            perf: [
                ValueRange::new(-0.1, 0.2),
                ValueRange::new(-0.1, 0.3),
                ValueRange::new(-0.05, 0.1),
                ValueRange::new(-0.1, 0.1),
            ],
            directions: None,
            planted: Vec::new(),
            check_k: 2.0,
        }
    }

    pub fn with_directions(mut self, increase: usize, decrease: usize, flat: usize) -> Self {
        self.directions = Some((increase, decrease, flat));
        self
    }

    pub fn with_planted(mut self, firm: usize, indicator: Indicator, z: f64) -> Self {
        self.planted.push(PlantedOutlier { firm, indicator, z });
        self
    }

    fn check(&self) -> Result<(), FixtureError> {
        let fail = |m: String| Err(FixtureError::InfeasibleConstraints(m));
        if self.firms == 0 {
            return fail("need at least one firm".into());
        }
        if !self.tta.valid() || self.tta.low <= 0.0 {
            return fail(format!("TTA range {:?} must be positive", self.tta));
        }
        if !self.tta_change.valid() || self.tta_change.low <= 0.0 {
            return fail(format!(
                "TTA change range {:?} must be positive",
                self.tta_change
            ));
        }
        if let Some(r) = self.perf.iter().find(|r| !r.valid()) {
            return fail(format!("bad performance range {r:?}"));
        }
        if let Some((i, d, f)) = self.directions {
            if i + d + f != self.firms {
                return fail(format!(
                    "direction counts {i}+{d}+{f} != {} firms",
                    self.firms
                ));
            }
        }
        if !(self.check_k > 0.0) {
            return fail("check_k must be > 0".into());
        }
        for p in &self.planted {
            if p.firm >= self.firms {
                return fail(format!("planted firm {} out of range", p.firm));
            }
            if self.firms < 3 {
                return fail("planting needs at least 3 firms".into());
            }
            if !p.z.is_finite() || p.z == 0.0 {
                return fail(format!("planted z {} must be finite and non-zero", p.z));
            }
        }
        let mut seen = BTreeMap::new();
        for p in &self.planted {
            if seen.insert((p.firm, p.indicator.kind), ()).is_some() {
                return fail(format!(
                    "firm {} planted twice on {}",
                    p.firm, p.indicator.kind
                ));
            }
        }
        Ok(())
    }
}

/// Generates a panel satisfying every constraint of `spec`, deterministically.
pub fn generate(spec: &FixtureSpec) -> Result<Vec<CompanyRecord>, FixtureError> {
    spec.check()?;
    for attempt in 0..MAX_ATTEMPTS {
        let seed = spec.seed ^ attempt.wrapping_mul(0x9E37_79B9_7F4A_7C15);
        let mut records = draw(spec, seed);
        plant(spec, &mut records);
        if planted_hold(spec, &records) {
            return Ok(records);
        }
    }
    Err(FixtureError::InfeasibleConstraints(format!(
        "planted outliers not isolated after {MAX_ATTEMPTS} attempts"
    )))
}

fn draw(spec: &FixtureSpec, seed: u64) -> Vec<CompanyRecord> {
    let directions: Vec<Option<Direction>> = match spec.directions {
        Some((i, d, f)) => {
            let mut v: Vec<Option<Direction>> = std::iter::repeat_n(Some(Direction::Increase), i)
                .chain(std::iter::repeat_n(Some(Direction::Decrease), d))
                .chain(std::iter::repeat_n(Some(Direction::Flat), f))
                .collect();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(u64::MAX);
            v.shuffle(&mut rng);
            v
        }
        None => vec![None; spec.firms],
    };

    const SECTORS: [&str; 5] = [
        "Media",
        "Technology",
        "Industrial goods",
        "Retail",
        "Utilities",
    ];
    directions
        .into_iter()
        .enumerate()
        .map(|(i, direction)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let direction = direction.unwrap_or_else(|| {
                if rng.random_bool(0.5) {
                    Direction::Increase
                } else {
                    Direction::Decrease
                }
            });
            let tta_pre = draw_tta(spec, direction, &mut rng);
            let perf_post = IndicatorKind::ALL
                .iter()
                .zip(&spec.perf)
                .map(|(&kind, range)| {
                    let values = (0..spec.config.post_window())
                        .map(|_| rng.random_range(range.low..range.high))
                        .collect();
                    (kind, values)
                })
                .collect();
            CompanyRecord {
                firm_id: format!("F{:03}", i + 1),
                name: format!("Synthetic firm {}", i + 1),
                sector: SECTORS[i % SECTORS.len()].to_string(),
                tta_pre,
                perf_post,
            }
        })
        .collect()
}

fn draw_tta(spec: &FixtureSpec, direction: Direction, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let window = spec.config.pre_window();
    let first = rng.random_range(spec.tta.low..spec.tta.high);
    let change = 1.0 + rng.random_range(spec.tta_change.low..spec.tta_change.high);
    let last = match direction {
        Direction::Increase => first * change,
        Direction::Decrease => first / change,
        Direction::Flat => first,
    };
    let (lo, hi) = (first.min(last), first.max(last));
    let mut out = Vec::with_capacity(window);
    out.push(first);
    for _ in 1..window - 1 {
        out.push(if lo < hi {
            rng.random_range(lo..hi)
        } else {
            lo
        });
    }
    out.push(last);
    out
}

/// Band, in the other firms' standard deviations, that the other firms on a planted
/// indicator are pulled into before the plant is placed.
const TAME_Z: f64 = 1.5;

fn ratios_on(records: &[CompanyRecord], indicator: Indicator) -> Vec<f64> {
    records
        .iter()
        .map(|r| {
            efficiency_matrix(r)
                .expect("drawn records are valid")
                .get(indicator)
        })
        .collect()
}

fn mean_sd(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let sd = (values.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
    (mean, sd)
}

/// Sets `firm`'s values of `indicator.kind` so its ratio on `indicator` is `target`,
/// scaling the drawn values when possible to keep their year-to-year shape.
fn set_ratio(firm: &mut CompanyRecord, indicator: Indicator, target: f64) {
    let m = efficiency_matrix(firm).expect("drawn records are valid");
    let current = m.get(indicator);
    let values = firm
        .perf_post
        .get_mut(&indicator.kind)
        .expect("all kinds drawn");
    if current != 0.0 {
        let factor = target / current;
        values.iter_mut().for_each(|v| *v *= factor);
    } else {
        let level = target * m.profile.denominator(indicator.denominator);
        values.iter_mut().for_each(|v| *v = level);
    }
}

/// Pulls the non-planted firms on each planted indicator within `TAME_Z` of their own
/// mean, then rewrites each planted firm so its ratio is `mean + z * sd` of the others.
fn plant(spec: &FixtureSpec, records: &mut [CompanyRecord]) {
    for p in &spec.planted {
        let others: Vec<usize> = (0..records.len())
            .filter(|i| {
                !spec
                    .planted
                    .iter()
                    .any(|q| q.firm == *i && q.indicator == p.indicator)
            })
            .collect();
        for _ in 0..100 {
            let all = ratios_on(records, p.indicator);
            let sample: Vec<f64> = others.iter().map(|&i| all[i]).collect();
            let (mean, sd) = mean_sd(&sample);
            let (lo, hi) = (mean - TAME_Z * sd, mean + TAME_Z * sd);
            let mut changed = false;
            for (&i, &r) in others.iter().zip(&sample) {
                if r < lo || r > hi {
                    set_ratio(&mut records[i], p.indicator, r.clamp(lo, hi));
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        let all = ratios_on(records, p.indicator);
        let sample: Vec<f64> = others.iter().map(|&i| all[i]).collect();
        let (mean, sd) = mean_sd(&sample);
        set_ratio(&mut records[p.firm], p.indicator, mean + p.z * sd);
    }
}

/// Each planted indicator must flag exactly its planted firms at `check_k`.
fn planted_hold(spec: &FixtureSpec, records: &[CompanyRecord]) -> bool {
    if spec.planted.is_empty() {
        return true;
    }
    let matrices: Vec<_> = records
        .iter()
        .map(|r| efficiency_matrix(r).expect("drawn records are valid"))
        .collect();
    let sections = cross_sections(&matrices).expect("non-empty");
    let Ok(report) = detect_outliers(&sections, spec.check_k, MomentConventions::default()) else {
        return false;
    };
    spec.planted.iter().all(|p| {
        let Some(screen) = report.screen(p.indicator) else {
            return false;
        };
        let want_positive = p.z > 0.0;
        screen.cells.iter().enumerate().all(|(i, cell)| {
            let planted_here = spec
                .planted
                .iter()
                .any(|q| q.firm == i && q.indicator == p.indicator);
            if planted_here && i == p.firm {
                cell.class.is_outlier() && (cell.value > screen.interval.mean) == want_positive
            } else if planted_here {
                cell.class.is_outlier()
            } else {
                !cell.class.is_outlier()
            }
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use outlier_perf_core::{validate_dataset, Denominator};

    #[test]
    fn deterministic() {
        let spec = FixtureSpec::new(62, 7);
        assert_eq!(generate(&spec).unwrap(), generate(&spec).unwrap());
        assert_ne!(
            generate(&spec).unwrap(),
            generate(&FixtureSpec::new(62, 8)).unwrap()
        );
    }

    #[test]
    fn records_are_valid() {
        let spec = FixtureSpec::new(30, 1);
        let records = generate(&spec).unwrap();
        assert_eq!(records.len(), 30);
        assert!(validate_dataset(&records, &spec.config).is_empty());
    }

    #[test]
    fn firm_streams_are_independent_of_count() {
        // firm i's draw does not depend on how many firms follow it
        let a = generate(&FixtureSpec::new(10, 3)).unwrap();
        let b = generate(&FixtureSpec::new(20, 3)).unwrap();
        assert_eq!(a[..], b[..10]);
    }

    #[test]
    fn longer_windows() {
        let mut spec = FixtureSpec::new(5, 2).with_directions(2, 2, 1);
        spec.config = DatasetConfig::new(["a", "b", "c"], ["x", "y"]).unwrap();
        let records = generate(&spec).unwrap();
        assert!(validate_dataset(&records, &spec.config).is_empty());
        assert!(records.iter().all(|r| r.tta_pre.len() == 3));
    }

    #[test]
    fn infeasible_specs() {
        let bad = FixtureSpec::new(10, 0).with_directions(5, 4, 0);
        assert!(matches!(
            generate(&bad),
            Err(FixtureError::InfeasibleConstraints(_))
        ));
        let mut bad = FixtureSpec::new(10, 0);
        bad.tta = ValueRange::new(-5.0, 5.0);
        assert!(generate(&bad).is_err());
        let ind = Indicator::new(IndicatorKind::Ds, Denominator::TtaMin);
        assert!(generate(&FixtureSpec::new(10, 0).with_planted(10, ind, 3.0)).is_err());
        // a planted z of 0.5 can never clear a 2-sigma interval
        assert!(generate(&FixtureSpec::new(40, 0).with_planted(0, ind, 0.5)).is_err());
        assert!(generate(&FixtureSpec::new(0, 0)).is_err());
    }
}
