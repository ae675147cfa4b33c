//! Reference moment statistics, spelled out term by term.
//!
//! Shares nothing with `outlier_perf_core::stats` except the result type. The
//! adjusted shape statistics use the spreadsheet `SKEW`/`KURT` forms (sums of
//! standardized deviations), not the central-moment correction factors used in
//! the production path.

use outlier_perf_core::{
    DistributionSummary, KurtosisBasis, MomentConventions, ShapeMode, StatsError, StdevMode,
};

pub fn oracle_summarize(
    sample: &[f64],
    conventions: MomentConventions,
) -> Result<DistributionSummary, StatsError> {
    if sample.is_empty() {
        return Err(StatsError::EmptySample);
    }
    let n = sample.len() as f64;

    let mut min = sample[0];
    let mut max = sample[0];
    let mut sum = 0.0;
    for &x in sample {
        if x < min {
            min = x;
        }
        if x > max {
            max = x;
        }
        sum += x;
    }
    let mean = if min == max { min } else { sum / n };

    let ss: f64 = sample.iter().map(|x| (x - mean).powi(2)).sum();
    let sd_sample = if sample.len() > 1 {
        (ss / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    let sd_pop = (ss / n).sqrt();
    let stdev = match conventions.stdev_mode {
        StdevMode::Sample => sd_sample,
        StdevMode::Population => sd_pop,
    };

    let constant = min == max;
    let (skewness, kurtosis) = match conventions.shape_mode {
        ShapeMode::Adjusted => {
            let z3: f64 = sample
                .iter()
                .map(|x| ((x - mean) / sd_sample).powi(3))
                .sum();
            let z4: f64 = sample
                .iter()
                .map(|x| ((x - mean) / sd_sample).powi(4))
                .sum();
            let skew = (!constant && sample.len() >= 3).then(|| n / ((n - 1.0) * (n - 2.0)) * z3);
            let kurt = (!constant && sample.len() >= 4).then(|| {
                n * (n + 1.0) / ((n - 1.0) * (n - 2.0) * (n - 3.0)) * z4
                    - 3.0 * (n - 1.0).powi(2) / ((n - 2.0) * (n - 3.0))
            });
            // KURT is excess by construction
            (skew, kurt.map(|k| raw_or_excess(k, conventions, true)))
        }
        ShapeMode::Population => {
            let z3: f64 = sample
                .iter()
                .map(|x| ((x - mean) / sd_pop).powi(3))
                .sum::<f64>()
                / n;
            let z4: f64 = sample
                .iter()
                .map(|x| ((x - mean) / sd_pop).powi(4))
                .sum::<f64>()
                / n;
            let defined = !constant && sample.len() >= 2;
            // plain fourth standardized moment is raw by construction
            (
                defined.then_some(z3),
                defined.then(|| raw_or_excess(z4, conventions, false)),
            )
        }
    };

    Ok(DistributionSummary {
        n: sample.len(),
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

fn raw_or_excess(k: f64, conventions: MomentConventions, is_excess: bool) -> f64 {
    match (conventions.kurtosis_basis, is_excess) {
        (KurtosisBasis::Excess, true) | (KurtosisBasis::Raw, false) => k,
        (KurtosisBasis::Excess, false) => k - 3.0,
        (KurtosisBasis::Raw, true) => k + 3.0,
    }
}
