//! Table renderers: raw-average summary, ratio summary, interval limits and the
//! outlier table, each as Markdown or CSV.
//!
//! Markdown uses 5 significant digits (4 decimals in the outlier table); CSV always
//! carries full `f64` precision so it can be parsed back exactly.

use std::collections::BTreeMap;

use outlier_perf_core::{
    coefficient_of_variation, summarize, Class, CrossSections, Denominator, DistributionSummary,
    Indicator, IndicatorKind, MomentConventions, NearMiss, OutlierReport, StatsError,
    SystematicOutlier,
};

use crate::format::{compact, full, opt_full, opt_sig, sig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TableFormat {
    Markdown,
    Csv,
}

impl TableFormat {
    pub fn extension(self) -> &'static str {
        match self {
            Self::Markdown => "md",
            Self::Csv => "csv",
        }
    }
}

const SIG: usize = 5;
const OUTLIER_DECIMALS: usize = 4;

/// One named sample with its summary.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryLine {
    pub name: String,
    pub label: String,
    pub summary: DistributionSummary,
}

fn base_label(name: &str) -> String {
    for d in Denominator::ALL {
        if d.code() == name {
            return d.label().to_string();
        }
    }
    for k in IndicatorKind::ALL {
        if format!("{}_avg", k.code()) == name {
            return format!("⟨{}⟩₃", k.label());
        }
    }
    name.to_string()
}

/// Summaries of `ttam, ttaM, tta2` and the four performance averages.
pub fn base_summaries(
    sections: &CrossSections,
    conventions: MomentConventions,
) -> Result<Vec<SummaryLine>, StatsError> {
    sections
        .base_samples()
        .into_iter()
        .map(|(name, sample)| {
            Ok(SummaryLine {
                label: base_label(&name),
                summary: summarize(sample, conventions)?,
                name,
            })
        })
        .collect()
}

/// Summaries of the twelve ratio samples.
pub fn ratio_summaries(
    sections: &CrossSections,
    conventions: MomentConventions,
) -> Result<Vec<SummaryLine>, StatsError> {
    Indicator::ALL
        .iter()
        .map(|&ind| {
            Ok(SummaryLine {
                name: ind.name(),
                label: ind.label(),
                summary: summarize(sections.ratio(ind), conventions)?,
            })
        })
        .collect()
}

fn markdown(header: &[String], rows: &[Vec<String>]) -> String {
    let mut out = String::new();
    out.push_str(&format!("| {} |\n", header.join(" | ")));
    out.push_str(&format!("|{}\n", "---|".repeat(header.len())));
    for row in rows {
        out.push_str(&format!("| {} |\n", row.join(" | ")));
    }
    out
}

fn csv_text(header: &[String], rows: &[Vec<String>]) -> String {
    let mut wtr = csv::Writer::from_writer(Vec::new());
    wtr.write_record(header).expect("in-memory write");
    for row in rows {
        wtr.write_record(row).expect("in-memory write");
    }
    String::from_utf8(wtr.into_inner().expect("in-memory flush")).expect("utf-8 input")
}

fn strings(items: &[&str]) -> Vec<String> {
    items.iter().map(|s| s.to_string()).collect()
}

/// Min/max/sum/mean/sd/skewness/kurtosis/CV, one row per sample.
pub fn render_summary_table(title: &str, lines: &[SummaryLine], format: TableFormat) -> String {
    match format {
        TableFormat::Markdown => {
            let header = strings(&[
                "Variable",
                "Min.",
                "Max.",
                "Sum",
                "Mean (μ)",
                "StDev (σ)",
                "Skewness",
                "Kurtosis",
                "CV (σ/μ)",
            ]);
            let rows: Vec<Vec<String>> = lines
                .iter()
                .map(|l| {
                    let s = &l.summary;
                    vec![
                        l.label.clone(),
                        sig(s.min, SIG),
                        sig(s.max, SIG),
                        sig(s.sum, SIG),
                        sig(s.mean, SIG),
                        sig(s.stdev, SIG),
                        opt_sig(s.skewness, SIG),
                        opt_sig(s.kurtosis, SIG),
                        opt_sig(coefficient_of_variation(s).ok(), SIG),
                    ]
                })
                .collect();
            format!("## {title}\n\n{}", markdown(&header, &rows))
        }
        TableFormat::Csv => {
            let header = strings(&[
                "variable", "n", "min", "max", "sum", "mean", "stdev", "skewness", "kurtosis", "cv",
            ]);
            let rows: Vec<Vec<String>> = lines
                .iter()
                .map(|l| {
                    let s = &l.summary;
                    vec![
                        l.name.clone(),
                        s.n.to_string(),
                        full(s.min),
                        full(s.max),
                        full(s.sum),
                        full(s.mean),
                        full(s.stdev),
                        opt_full(s.skewness),
                        opt_full(s.kurtosis),
                        opt_full(coefficient_of_variation(s).ok()),
                    ]
                })
                .collect();
            csv_text(&header, &rows)
        }
    }
}

fn k_label(k: f64) -> String {
    sig(k, 3)
        .trim_end_matches('0')
        .trim_end_matches('.')
        .to_string()
}

/// Mean, sd and interval bounds for each of the twelve indicators. Degenerate
/// indicators are listed without bounds.
pub fn render_interval_table(report: &OutlierReport, format: TableFormat) -> String {
    let k = k_label(report.k);
    let mut rows = Vec::new();
    for ind in Indicator::ALL {
        if let Some(screen) = report.screen(ind) {
            let iv = &screen.interval;
            rows.push((ind, iv.mean, iv.stdev, Some((iv.lower, iv.upper))));
        } else if let Some(d) = report.degenerate.iter().find(|d| d.indicator == ind) {
            rows.push((ind, d.summary.mean, d.summary.stdev, None));
        }
    }
    match format {
        TableFormat::Markdown => {
            let header = vec![
                "Indicator".to_string(),
                "Mean (μ)".into(),
                "StDev (σ)".into(),
                format!("μ−{k}σ"),
                format!("μ+{k}σ"),
            ];
            let body: Vec<Vec<String>> = rows
                .iter()
                .map(|&(ind, mean, sd, bounds)| {
                    let (lo, hi) = match bounds {
                        Some((lo, hi)) => (sig(lo, SIG), sig(hi, SIG)),
                        None => ("excluded".into(), "excluded".into()),
                    };
                    vec![ind.label(), sig(mean, SIG), sig(sd, SIG), lo, hi]
                })
                .collect();
            format!(
                "## Interval limits (k = {k})\n\n{}",
                markdown(&header, &body)
            )
        }
        TableFormat::Csv => {
            let header = strings(&[
                "indicator",
                "mean",
                "stdev",
                "k",
                "lower",
                "upper",
                "status",
            ]);
            let body: Vec<Vec<String>> = rows
                .iter()
                .map(|&(ind, mean, sd, bounds)| {
                    let (lo, hi, status) = match bounds {
                        Some((lo, hi)) => (full(lo), full(hi), "screened"),
                        None => (String::new(), String::new(), "degenerate"),
                    };
                    vec![
                        ind.name(),
                        full(mean),
                        full(sd),
                        full(report.k),
                        lo,
                        hi,
                        status.to_string(),
                    ]
                })
                .collect();
            csv_text(&header, &body)
        }
    }
}

/// Rows are the screened indicators, columns the firms with at least one outlier
/// cell. Outlier cells are bare, inlier cells of those firms are in parentheses.
pub fn render_outlier_table(
    report: &OutlierReport,
    format: TableFormat,
    names: &BTreeMap<String, String>,
) -> String {
    let firms = report.outlier_firms();
    let columns: Vec<usize> = firms
        .iter()
        .map(|f| {
            report
                .firm_ids
                .iter()
                .position(|x| x == f)
                .expect("known firm")
        })
        .collect();
    let k = k_label(report.k);

    let cell_text = |class: Class, value: f64| {
        let v = match format {
            TableFormat::Markdown => compact(value, OUTLIER_DECIMALS),
            TableFormat::Csv => full(value),
        };
        if class.is_outlier() {
            v
        } else {
            format!("({v})")
        }
    };

    let rows: Vec<Vec<String>> = if firms.is_empty() {
        Vec::new()
    } else {
        report
            .screens
            .iter()
            .map(|s| {
                let first = match format {
                    TableFormat::Markdown => s.indicator.label(),
                    TableFormat::Csv => s.indicator.name(),
                };
                std::iter::once(first)
                    .chain(
                        columns
                            .iter()
                            .map(|&i| cell_text(s.cells[i].class, s.cells[i].value)),
                    )
                    .collect()
            })
            .collect()
    };

    match format {
        TableFormat::Markdown => {
            let header: Vec<String> = std::iter::once("Indicator".to_string())
                .chain(firms.iter().map(|f| match names.get(*f) {
                    Some(name) if name != f => format!("({f}) {name}"),
                    _ => f.to_string(),
                }))
                .collect();
            let mut out = format!("## Outliers outside ]μ−{k}σ, μ+{k}σ[\n\n");
            out.push_str(&markdown(&header, &rows));
            if firms.is_empty() {
                out.push_str(&format!("\n_no outliers at k={k}_\n"));
            } else {
                out.push_str("\nValues in parentheses lie inside the interval.\n");
            }
            out
        }
        TableFormat::Csv => {
            let header: Vec<String> = std::iter::once("indicator".to_string())
                .chain(firms.iter().map(|f| f.to_string()))
                .collect();
            csv_text(&header, &rows)
        }
    }
}

/// Systematic outliers and near-misses, appended to the Markdown outlier table.
pub fn render_outlier_notes(
    systematic: &[SystematicOutlier],
    threshold: usize,
    near: &[NearMiss],
    margin: f64,
    names: &BTreeMap<String, String>,
) -> String {
    let name = |f: &str| names.get(f).cloned().unwrap_or_else(|| f.to_string());
    let mut out = format!("\n### Systematic outliers (at least {threshold} of 12 indicators)\n\n");
    if systematic.is_empty() {
        out.push_str("none\n");
    }
    for s in systematic {
        out.push_str(&format!(
            "- {} ({}): {} ({} positive, {} negative)\n",
            name(&s.firm_id),
            s.firm_id,
            s.polarity,
            s.positive,
            s.negative
        ));
    }
    out.push_str(&format!(
        "\n### Near misses (within {} of the half-width from a bound)\n\n",
        sig(margin, 3)
    ));
    if near.is_empty() {
        out.push_str("none\n");
    }
    for m in near {
        out.push_str(&format!(
            "- {} ({}), {}: {} is {} from the {} bound\n",
            name(&m.firm_id),
            m.firm_id,
            m.indicator.label(),
            compact(m.value, OUTLIER_DECIMALS),
            sig(m.distance, 3),
            match m.bound {
                outlier_perf_core::Bound::Lower => "lower",
                outlier_perf_core::Bound::Upper => "upper",
            }
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use outlier_perf_core::OutlierInterval;

    fn report(values: Vec<Vec<f64>>) -> OutlierReport {
        let firm_ids = vec!["A".to_string(), "B".to_string()];
        let rows = values
            .into_iter()
            .zip(Indicator::ALL)
            .map(|(v, ind)| {
                (
                    ind,
                    OutlierInterval::from_bounds(-1.0, 1.0, 2.0).unwrap(),
                    v,
                )
            })
            .collect();
        OutlierReport::from_intervals(firm_ids, 2.0, rows).unwrap()
    }

    #[test]
    fn no_outliers_note() {
        let r = report(vec![vec![0.0, 0.5]]);
        let md = render_outlier_table(&r, TableFormat::Markdown, &BTreeMap::new());
        assert!(md.contains("| Indicator |\n|---|\n"));
        assert!(md.contains("no outliers at k=2"));
        let csv = render_outlier_table(&r, TableFormat::Csv, &BTreeMap::new());
        assert_eq!(csv, "indicator\n");
    }

    #[test]
    fn parentheses_for_inliers() {
        let r = report(vec![vec![1.5, 0.0], vec![-0.25, 0.0]]);
        let names = BTreeMap::from([("A".to_string(), "Alpha".to_string())]);
        let md = render_outlier_table(&r, TableFormat::Markdown, &names);
        assert!(md.contains("| (A) Alpha |"));
        assert!(md.contains("| ⟨DS⟩₃/TTAm | 1.5000 |"));
        assert!(md.contains("| ⟨DA⟩₃/TTAm | (-0.2500) |"));
        let csv = render_outlier_table(&r, TableFormat::Csv, &names);
        assert_eq!(csv, "indicator,A\nds_over_ttam,1.5\nda_over_ttam,(-0.25)\n");
    }

    #[test]
    fn k_labels() {
        assert_eq!(k_label(2.0), "2");
        assert_eq!(k_label(2.5), "2.5");
    }
}
