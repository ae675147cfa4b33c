//! Reference vectors transcribed from published summary tables of a 62-firm study.
//!
//! Only the printed numbers are carried: the per-indicator mean, standard deviation
//! and `mean -/+ 2 sd` limits, the efficiency ratios of the four firms shown in the
//! outlier table (with their parenthesization), and the summary rows of the raw
//! averages. No firm-level raw data exists behind them.

use outlier_perf_core::{
    Denominator, Indicator, IndicatorKind, OutlierInterval, OutlierReport, StatsError,
};

#[derive(Debug, Clone, PartialEq)]
pub struct PublishedFirm {
    /// Alphabetical index in the published sample.
    pub firm_id: &'static str,
    pub name: &'static str,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PublishedInterval {
    pub indicator: Indicator,
    pub mean: f64,
    pub stdev: f64,
    pub lower: f64,
    pub upper: f64,
    /// Printed text of the bounds; their last digit sets the comparison tolerance.
    pub lower_text: &'static str,
    pub upper_text: &'static str,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PublishedCell {
    pub indicator: Indicator,
    pub firm_id: &'static str,
    pub value: f64,
    /// Printed in parentheses, i.e. presented as "not truly an outlier".
    pub parenthesized: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table4Fixture {
    /// Column order of the outlier table.
    pub firms: Vec<PublishedFirm>,
    /// The twelve interval rows, in [`Indicator::ALL`] order.
    pub intervals: Vec<PublishedInterval>,
    /// 48 cells, row-major over `intervals` then `firms`.
    pub cells: Vec<PublishedCell>,
}

impl Table4Fixture {
    pub fn interval(&self, indicator: Indicator) -> &PublishedInterval {
        &self.intervals[indicator.index()]
    }

    pub fn cell(&self, firm_id: &str, indicator: Indicator) -> Option<&PublishedCell> {
        self.cells
            .iter()
            .find(|c| c.firm_id == firm_id && c.indicator == indicator)
    }

    pub fn firm_name(&self, firm_id: &str) -> Option<&'static str> {
        self.firms
            .iter()
            .find(|f| f.firm_id == firm_id)
            .map(|f| f.name)
    }

    /// Classifies the published cells against the published bounds (`k = 2`).
    pub fn report(&self) -> Result<OutlierReport, StatsError> {
        let firm_ids: Vec<String> = self.firms.iter().map(|f| f.firm_id.to_string()).collect();
        let mut rows = Vec::with_capacity(12);
        for iv in &self.intervals {
            let interval = OutlierInterval::from_bounds(iv.lower, iv.upper, 2.0)?;
            let values = self
                .firms
                .iter()
                .map(|f| {
                    self.cell(f.firm_id, iv.indicator)
                        .map(|c| c.value)
                        .unwrap_or(f64::NAN)
                })
                .collect();
            rows.push((iv.indicator, interval, values));
        }
        Ok(OutlierReport::from_intervals(firm_ids, 2.0, rows).expect("fixture rows are complete"))
    }
}

const FIRMS: [(&str, &str); 4] = [
    ("11", "Buongiorno"),
    ("13", "Cairo Communication"),
    ("58", "Ternienergia"),
    ("45", "Mondo TV"),
];

// (mean, stdev, lower, upper) per row, denominator-major: TTAm, TTAM, <TTA>2;
// within each block DS, DA, ROI, ROS.
const INTERVALS: [(f64, f64, &str, &str); 12] = [
    (1.8713e-2, 0.082777, "-0.14684", "0.18427"),
    (7.2064e-3, 0.067471, "-0.12774", "0.14215"),
    (6.4631e-3, 0.026115, "-0.045767", "0.058693"),
    (2.4721e-3, 0.041382, "-0.080291", "0.085235"),
    (1.0849e-2, 0.053792, "-0.096734", "0.11843"),
    (7.7854e-3, 0.058099, "-0.10841", "0.12398"),
    (3.0546e-3, 0.011271, "-0.019488", "0.025597"),
    (1.2058e-3, 0.019334, "-0.037463", "0.039874"),
    (1.3055e-2, 0.060710, "-0.10836", "0.13447"),
    (7.8741e-3, 0.061904, "-0.11593", "0.13168"),
    (3.9985e-3, 0.015403, "-0.026808", "0.034805"),
    (1.4520e-3, 0.025969, "-0.050486", "0.053390"),
];

// Row order as INTERVALS; columns as FIRMS. `true` = printed in parentheses.
const CELLS: [[(f64, bool); 4]; 12] = [
    [
        (0.4795, false),
        (0.0186, true),
        (0.4457, false),
        (0.0769, true),
    ],
    [
        (-0.1155, true),
        (-0.0217, true),
        (0.5089, false),
        (-0.0536, true),
    ],
    [
        (0.1277, false),
        (0.1573, false),
        (0.0345, true),
        (-0.0130, true),
    ],
    [
        (0.1623, false),
        (0.1228, false),
        (0.0436, true),
        (-0.2466, false),
    ],
    [
        (0.1537, false),
        (0.0087, true),
        (0.3962, false),
        (0.0382, true),
    ],
    [
        (-0.0370, true),
        (-0.0101, true),
        (0.4524, false),
        (-0.0266, true),
    ],
    [
        (0.0409, false),
        (0.0733, false),
        (0.0306, false),
        (-0.0065, true),
    ],
    [
        (0.0520, false),
        (0.0573, false),
        (0.0388, true),
        (-0.1226, true),
    ],
    [
        (0.2328, false),
        (0.0118, true),
        (0.4195, false),
        (0.0511, true),
    ],
    [
        (-0.0561, true),
        (-0.0138, true),
        (0.4790, false),
        (-0.0356, true),
    ],
    [
        (0.0620, false),
        (0.1000, false),
        (0.0324, true),
        (-0.0872, true),
    ],
    [
        (0.0788, false),
        (0.0781, false),
        (0.0410, true),
        (-0.1638, true),
    ],
];

pub fn table4_fixture() -> Table4Fixture {
    let firms = FIRMS
        .iter()
        .map(|&(firm_id, name)| PublishedFirm { firm_id, name })
        .collect();
    let intervals = Indicator::ALL
        .iter()
        .zip(INTERVALS)
        .map(
            |(&indicator, (mean, stdev, lower_text, upper_text))| PublishedInterval {
                indicator,
                mean,
                stdev,
                lower: lower_text.parse().unwrap(),
                upper: upper_text.parse().unwrap(),
                lower_text,
                upper_text,
            },
        )
        .collect();
    let cells = Indicator::ALL
        .iter()
        .zip(CELLS)
        .flat_map(|(&indicator, row)| {
            FIRMS
                .iter()
                .zip(row)
                .map(
                    move |(&(firm_id, _), (value, parenthesized))| PublishedCell {
                        indicator,
                        firm_id,
                        value,
                        parenthesized,
                    },
                )
        })
        .collect();
    Table4Fixture {
        firms,
        intervals,
        cells,
    }
}

/// One printed row of the raw-average summary table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SummaryRow {
    /// Public sample name (`ttam`, `ds_avg`, ...).
    pub sample: &'static str,
    pub min: f64,
    pub max: f64,
    pub sum: f64,
    pub mean: f64,
    pub stdev: f64,
    pub skewness: f64,
    pub kurtosis: f64,
}

/// The seven summary rows: three TTA statistics, four performance averages.
pub fn table1_rows() -> Vec<SummaryRow> {
    let row = |sample, min, max, sum, mean, stdev, skewness, kurtosis| SummaryRow {
        sample,
        min,
        max,
        sum,
        mean,
        stdev,
        skewness,
        kurtosis,
    };
    vec![
        row(
            Denominator::TtaMin.code(),
            42.0,
            4.829e5,
            2.600e6,
            41931.0,
            89262.0,
            3.4022,
            11.948,
        ),
        row(
            Denominator::TtaMax.code(),
            131.0,
            5.321e5,
            2.893e6,
            46662.0,
            96049.0,
            3.3905,
            12.156,
        ),
        row(
            Denominator::TtaMean.code(),
            86.5,
            5.075e5,
            2.746e6,
            44297.0,
            92600.0,
            3.3967,
            12.062,
        ),
        row(
            avg(IndicatorKind::Ds),
            -0.1924,
            1.1767,
            4.9303,
            0.0795,
            0.198,
            3.1414,
            14.013,
        ),
        row(
            avg(IndicatorKind::Da),
            -0.1436,
            1.9818,
            7.8786,
            0.1271,
            0.330,
            3.8060,
            16.885,
        ),
        row(
            avg(IndicatorKind::Roi),
            -0.0768,
            0.3457,
            3.0115,
            0.0486,
            0.067,
            1.5342,
            5.1206,
        ),
        row(
            avg(IndicatorKind::Ros),
            -0.6609,
            0.2445,
            2.5316,
            0.0408,
            0.116,
            -3.505,
            20.046,
        ),
    ]
}

fn avg(kind: IndicatorKind) -> &'static str {
    match kind {
        IndicatorKind::Ds => "ds_avg",
        IndicatorKind::Da => "da_avg",
        IndicatorKind::Roi => "roi_avg",
        IndicatorKind::Ros => "ros_avg",
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complete() {
        let f = table4_fixture();
        assert_eq!(f.firms.len(), 4);
        assert_eq!(f.intervals.len(), 12);
        assert_eq!(f.cells.len(), 48);
        assert!(f.cells.iter().all(|c| c.value.is_finite()));
        for ind in Indicator::ALL {
            assert_eq!(f.interval(ind).indicator, ind);
            for firm in &f.firms {
                assert!(f.cell(firm.firm_id, ind).is_some());
            }
        }
    }

    #[test]
    fn spot_values() {
        let f = table4_fixture();
        let ds_m = Indicator::new(IndicatorKind::Ds, Denominator::TtaMin);
        assert_eq!(f.cell("58", ds_m).unwrap().value, 0.4457);
        assert_eq!(f.firm_name("58"), Some("Ternienergia"));
        let ros_m = f.interval(Indicator::new(IndicatorKind::Ros, Denominator::TtaMin));
        assert_eq!((ros_m.lower, ros_m.upper), (-0.080291, 0.085235));
        assert_eq!(table1_rows()[3].sample, "ds_avg");
    }
}
