//! Where the printed tables disagree with their own arithmetic, these tests pin
//! what the arithmetic actually gives.

use std::collections::BTreeSet;

use outlier_perf_core::{
    classify, interval, systematic_outliers, Class, Denominator, Indicator, IndicatorKind,
    OutlierInterval, Polarity,
};
use outlier_perf_fixtures::table4_fixture;

/// Half a unit in the last place of a printed number, e.g. `-0.14684` -> 5e-6.
fn half_unit(text: &str) -> f64 {
    let (mantissa, exp) = match text.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i32>().unwrap()),
        None => (text, 0),
    };
    let decimals = mantissa.split_once('.').map_or(0, |(_, d)| d.len()) as i32;
    0.5 * 10f64.powi(exp - decimals)
}

/// Half a unit in the fifth significant digit, the precision of the printed mean and sd.
fn half_unit_5sig(value: f64) -> f64 {
    0.5 * 10f64.powi(value.abs().log10().floor() as i32 - 4)
}

#[test]
fn interval_misses_are_within_input_rounding() {
    let t = table4_fixture();
    let mut misses = BTreeSet::new();
    for iv in &t.intervals {
        let got = interval(iv.mean, iv.stdev, 2.0).unwrap();
        let propagated = half_unit_5sig(iv.mean) + 2.0 * half_unit_5sig(iv.stdev);
        for (side, value, printed, text) in [
            ("lower", got.lower, iv.lower, iv.lower_text),
            ("upper", got.upper, iv.upper, iv.upper_text),
        ] {
            let err = (value - printed).abs();
            assert!(
                err <= propagated + half_unit(text),
                "{} {side}",
                iv.indicator
            );
            if err > half_unit(text) * (1.0 + 1e-9) {
                misses.insert(format!("{} {side}", iv.indicator.name()));
            }
        }
    }
    let expected: BTreeSet<String> = [
        "ros_over_ttam lower",
        "ros_over_ttam upper",
        "ds_over_ttaM lower",
        "roi_over_ttaM lower",
        "ros_over_ttaM lower",
    ]
    .into_iter()
    .map(String::from)
    .collect();
    assert_eq!(misses, expected);
}

#[test]
fn three_parenthesized_cells_contradict_the_limits() {
    let t = table4_fixture();
    let mut disagree = BTreeSet::new();
    for c in &t.cells {
        let iv = t.interval(c.indicator);
        let interval = OutlierInterval::from_bounds(iv.lower, iv.upper, 2.0).unwrap();
        if (classify(c.value, &interval).class == Class::Inlier) != c.parenthesized {
            disagree.insert((c.firm_id, c.indicator));
        }
    }
    let mondo = |kind, d| ("45", Indicator::new(kind, d));
    let expected: BTreeSet<_> = [
        mondo(IndicatorKind::Roi, Denominator::TtaMean),
        mondo(IndicatorKind::Ros, Denominator::TtaMax),
        mondo(IndicatorKind::Ros, Denominator::TtaMean),
    ]
    .into_iter()
    .collect();
    assert_eq!(disagree, expected);
    assert_eq!(t.cells.len() - disagree.len(), 45);

    // -0.1638 lies outside ]-0.050486, 0.053390[ yet is printed in parentheses.
    let ros2 = Indicator::new(IndicatorKind::Ros, Denominator::TtaMean);
    let cell = t.cell("45", ros2).unwrap();
    assert!(cell.parenthesized);
    assert!(cell.value < t.interval(ros2).lower);
}

#[test]
fn roll_up_reproduces_the_finding_only_at_low_thresholds() {
    let t = table4_fixture();
    let report = t.report().unwrap();
    let tallies: Vec<_> = report
        .tallies()
        .into_iter()
        .map(|t| (t.firm_id, t.positive, t.negative))
        .collect();
    assert_eq!(
        tallies,
        vec![
            ("11".to_string(), 9, 0),
            ("13".to_string(), 6, 0),
            ("58".to_string(), 7, 0),
            ("45".to_string(), 0, 4),
        ]
    );
    let finding: BTreeSet<_> = [
        ("11", Polarity::Positive),
        ("13", Polarity::Positive),
        ("58", Polarity::Positive),
        ("45", Polarity::Negative),
    ]
    .into_iter()
    .map(|(f, p)| (f.to_string(), p))
    .collect();
    for threshold in 1..=12 {
        let got: BTreeSet<_> = systematic_outliers(&report, threshold)
            .unwrap()
            .into_iter()
            .map(|s| (s.firm_id, s.polarity))
            .collect();
        assert_eq!(got == finding, threshold <= 4, "threshold {threshold}");
    }
}
