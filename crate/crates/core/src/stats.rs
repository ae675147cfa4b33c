//! Moment statistics of a single cross-sectional sample and `k`-sigma intervals.
//!
//! The estimator conventions are explicit because published tables rarely say
//! which ones they used. Defaults are the spreadsheet conventions: `n - 1` standard
//! deviation, bias-adjusted skewness and kurtosis, excess kurtosis.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StdevMode {
    /// `n - 1` divisor.
    #[default]
    Sample,
    /// `n` divisor.
    Population,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShapeMode {
    /// Bias-adjusted standardized moments (`G1`, `G2`).
    #[default]
    Adjusted,
    /// Plain standardized central moments (`g1`, `g2`).
    Population,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KurtosisBasis {
    /// Normal distribution reads 0.
    #[default]
    Excess,
    /// Normal distribution reads 3.
    Raw,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct MomentConventions {
    pub stdev_mode: StdevMode,
    pub shape_mode: ShapeMode,
    pub kurtosis_basis: KurtosisBasis,
}

impl MomentConventions {
    /// All eight combinations, in a fixed order.
    pub fn all() -> impl Iterator<Item = MomentConventions> {
        [StdevMode::Sample, StdevMode::Population]
            .into_iter()
            .flat_map(|stdev_mode| {
                [ShapeMode::Adjusted, ShapeMode::Population]
                    .into_iter()
                    .flat_map(move |shape_mode| {
                        [KurtosisBasis::Excess, KurtosisBasis::Raw].into_iter().map(
                            move |kurtosis_basis| MomentConventions {
                                stdev_mode,
                                shape_mode,
                                kurtosis_basis,
                            },
                        )
                    })
            })
    }

    /// Smallest sample size with a defined skewness.
    pub fn min_n_skewness(&self) -> usize {
        match self.shape_mode {
            ShapeMode::Adjusted => 3,
            ShapeMode::Population => 2,
        }
    }

    /// Smallest sample size with a defined kurtosis.
    pub fn min_n_kurtosis(&self) -> usize {
        match self.shape_mode {
            ShapeMode::Adjusted => 4,
            ShapeMode::Population => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum StatsError {
    #[error("sample is empty")]
    EmptySample,
    #[error("sample contains a non-finite value")]
    NonFiniteSample,
    #[error("mean is zero, coefficient of variation undefined")]
    ZeroMean,
    #[error("standard deviation is zero, z-score undefined")]
    ZeroStdev,
    #[error("standard deviation must be >= 0")]
    NegativeStdev,
    #[error("interval multiplier k must be > 0")]
    NonPositiveK,
}

/// Moment summary of one sample. `skewness`/`kurtosis` are `None` when undefined:
/// zero spread, or fewer observations than the convention needs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistributionSummary {
    pub n: usize,
    pub min: f64,
    pub max: f64,
    pub sum: f64,
    pub mean: f64,
    pub stdev: f64,
    pub skewness: Option<f64>,
    pub kurtosis: Option<f64>,
    pub conventions: MomentConventions,
}

impl DistributionSummary {
    /// `true` when skewness or kurtosis is undefined.
    pub fn shape_undefined(&self) -> bool {
        self.skewness.is_none() || self.kurtosis.is_none()
    }
}

/// Summarizes a non-empty sample of finite values.
///
/// A single observation has `stdev = 0` under both conventions.
pub fn summarize(
    sample: &[f64],
    conventions: MomentConventions,
) -> Result<DistributionSummary, StatsError> {
    if sample.is_empty() {
        return Err(StatsError::EmptySample);
    }
    if sample.iter().any(|v| !v.is_finite()) {
        return Err(StatsError::NonFiniteSample);
    }
    let n = sample.len();
    let nf = n as f64;

    let (mut min, mut max, mut sum) = (f64::INFINITY, f64::NEG_INFINITY, 0.0);
    for &x in sample {
        min = min.min(x);
        max = max.max(x);
        sum += x;
    }
    // rounding in sum/n can push a constant sample's mean one ulp outside [min, max]
    let mean = (sum / nf).clamp(min, max);

    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for &x in sample {
        let d = x - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= nf;
    m3 /= nf;
    m4 /= nf;

    let variance = match conventions.stdev_mode {
        StdevMode::Sample if n > 1 => m2 * nf / (nf - 1.0),
        StdevMode::Sample => 0.0,
        StdevMode::Population => m2,
    };
    let stdev = variance.sqrt();

    let spread = m2 > 0.0;
    let g1 = m3 / m2.powf(1.5);
    let g2 = m4 / (m2 * m2) - 3.0;

    let skewness =
        (spread && n >= conventions.min_n_skewness()).then(|| match conventions.shape_mode {
            ShapeMode::Population => g1,
            ShapeMode::Adjusted => g1 * (nf * (nf - 1.0)).sqrt() / (nf - 2.0),
        });
    let kurtosis = (spread && n >= conventions.min_n_kurtosis()).then(|| {
        let excess = match conventions.shape_mode {
            ShapeMode::Population => g2,
            ShapeMode::Adjusted => ((nf + 1.0) * g2 + 6.0) * (nf - 1.0) / ((nf - 2.0) * (nf - 3.0)),
        };
        match conventions.kurtosis_basis {
            KurtosisBasis::Excess => excess,
            KurtosisBasis::Raw => excess + 3.0,
        }
    });

    Ok(DistributionSummary {
        n,
        min,
        max,
        sum,
        mean,
        stdev,
        skewness,
        kurtosis,
        conventions,
    })
}

/// Signed `stdev / mean`.
pub fn coefficient_of_variation(summary: &DistributionSummary) -> Result<f64, StatsError> {
    if summary.mean == 0.0 {
        return Err(StatsError::ZeroMean);
    }
    Ok(summary.stdev / summary.mean)
}

/// Open interval `]mean - k*stdev, mean + k*stdev[`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OutlierInterval {
    pub mean: f64,
    pub stdev: f64,
    pub k: f64,
    pub lower: f64,
    pub upper: f64,
}

impl OutlierInterval {
    /// Rebuilds an interval from published bounds; centre and spread are derived
    /// from the bounds, which are kept verbatim.
    pub fn from_bounds(lower: f64, upper: f64, k: f64) -> Result<Self, StatsError> {
        if !(k > 0.0) {
            return Err(StatsError::NonPositiveK);
        }
        if !(upper >= lower) {
            return Err(StatsError::NegativeStdev);
        }
        Ok(Self {
            mean: 0.5 * (lower + upper),
            stdev: (upper - lower) / (2.0 * k),
            k,
            lower,
            upper,
        })
    }

    /// `k * stdev`, measured from the bounds.
    pub fn half_width(&self) -> f64 {
        0.5 * (self.upper - self.lower)
    }

    pub fn is_degenerate(&self) -> bool {
        self.lower == self.upper
    }
}

pub fn interval(mean: f64, stdev: f64, k: f64) -> Result<OutlierInterval, StatsError> {
    if !(stdev >= 0.0) {
        return Err(StatsError::NegativeStdev);
    }
    if !(k > 0.0) {
        return Err(StatsError::NonPositiveK);
    }
    let half = k * stdev;
    Ok(OutlierInterval {
        mean,
        stdev,
        k,
        lower: mean - half,
        upper: mean + half,
    })
}

/// `(value - mean) / stdev`. A value lies outside `]mean - k*sd, mean + k*sd[`
/// iff `|zscore| >= k`.
pub fn zscore(value: f64, summary: &DistributionSummary) -> Result<f64, StatsError> {
    if summary.stdev == 0.0 {
        return Err(StatsError::ZeroStdev);
    }
    Ok((value - summary.mean) / summary.stdev)
}
