//! Scatter-plot data: pre-window TTA last vs first year, and each performance
//! average against mean TTA. CSV with header `firm_id,x,y,tag`, plus an optional
//! static SVG rendering.

use std::fmt::Write as _;
use std::io;
use std::path::{Path, PathBuf};

use outlier_perf_core::{CompanyRecord, DatasetConfig, EfficiencyMatrix, IndicatorKind};

use crate::format::{full, sig};

#[derive(Debug, Clone, PartialEq)]
pub struct ScatterPoint {
    pub firm_id: String,
    pub x: f64,
    pub y: f64,
    pub tag: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScatterSeries {
    /// File stem, e.g. `da_avg_vs_tta2`.
    pub name: String,
    pub x_label: String,
    pub y_label: String,
    pub points: Vec<ScatterPoint>,
}

fn short_year(label: &str) -> &str {
    let n = label.chars().count();
    if n > 2 {
        let start = label.char_indices().nth(n - 2).map_or(0, |(i, _)| i);
        &label[start..]
    } else {
        label
    }
}

/// The five series: `ttaLL_vs_ttaFF` (tagged by direction) and
/// `{ds,da,roi,ros}_avg_vs_tta2`. `records` and `matrices` are aligned.
pub fn scatter_series(
    records: &[CompanyRecord],
    matrices: &[EfficiencyMatrix],
    config: &DatasetConfig,
) -> Vec<ScatterSeries> {
    let first_year = &config.pre_years()[0];
    let last_year = config
        .pre_years()
        .last()
        .expect("pre-window has >= 2 years");
    let tta = ScatterSeries {
        name: format!(
            "tta{}_vs_tta{}",
            short_year(last_year),
            short_year(first_year)
        ),
        x_label: format!("TTA {first_year}"),
        y_label: format!("TTA {last_year}"),
        points: records
            .iter()
            .zip(matrices)
            .map(|(r, m)| ScatterPoint {
                firm_id: r.firm_id.clone(),
                x: r.tta_pre[0],
                y: *r.tta_pre.last().expect("validated window"),
                tag: m.profile.direction.to_string(),
            })
            .collect(),
    };
    let mut out = vec![tta];
    for kind in IndicatorKind::ALL {
        out.push(ScatterSeries {
            name: format!("{}_avg_vs_tta2", kind.code()),
            x_label: "⟨TTA⟩₂".into(),
            y_label: format!("⟨{}⟩₃", kind.label()),
            points: matrices
                .iter()
                .map(|m| ScatterPoint {
                    firm_id: m.firm_id.clone(),
                    x: m.profile.tta_mean,
                    y: m.panel.get(kind),
                    tag: m.profile.direction.to_string(),
                })
                .collect(),
        });
    }
    out
}

/// Stacked pre-window TTA per firm: `firm_id,tta_<year>...`.
pub fn stacked_tta_csv(records: &[CompanyRecord], config: &DatasetConfig) -> String {
    let mut wtr = csv::Writer::from_writer(Vec::new());
    let header: Vec<String> = std::iter::once("firm_id".to_string())
        .chain(config.pre_years().iter().map(|y| format!("tta_{y}")))
        .collect();
    wtr.write_record(&header).expect("in-memory write");
    for r in records {
        let row: Vec<String> = std::iter::once(r.firm_id.clone())
            .chain(r.tta_pre.iter().map(|v| full(*v)))
            .collect();
        wtr.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(wtr.into_inner().expect("in-memory flush")).expect("utf-8")
}

impl ScatterSeries {
    pub fn to_csv(&self) -> String {
        let mut wtr = csv::Writer::from_writer(Vec::new());
        wtr.write_record(["firm_id", "x", "y", "tag"])
            .expect("in-memory write");
        for p in &self.points {
            wtr.write_record([p.firm_id.as_str(), &full(p.x), &full(p.y), p.tag.as_str()])
                .expect("in-memory write");
        }
        String::from_utf8(wtr.into_inner().expect("in-memory flush")).expect("utf-8")
    }

    /// Fixed 640x480 canvas, linear axes padded 5% around the data range.
    pub fn to_svg(&self) -> String {
        const W: f64 = 640.0;
        const H: f64 = 480.0;
        const MARGIN: f64 = 60.0;

        let range = |vals: &mut dyn Iterator<Item = f64>| {
            let (lo, hi) = vals.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                (lo.min(v), hi.max(v))
            });
            if !lo.is_finite() {
                return (0.0, 1.0);
            }
            let pad = if hi > lo {
                0.05 * (hi - lo)
            } else {
                lo.abs().max(1.0) * 0.05
            };
            (lo - pad, hi + pad)
        };
        let (x0, x1) = range(&mut self.points.iter().map(|p| p.x));
        let (y0, y1) = range(&mut self.points.iter().map(|p| p.y));
        let px = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (W - 2.0 * MARGIN);
        let py = |y: f64| H - MARGIN - (y - y0) / (y1 - y0) * (H - 2.0 * MARGIN);

        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
        );
        let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
        let _ = writeln!(
            s,
            r#"<rect x="{MARGIN}" y="{MARGIN}" width="{}" height="{}" fill="none" stroke="black"/>"#,
            W - 2.0 * MARGIN,
            H - 2.0 * MARGIN
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="middle" font-size="14">{}</text>"#,
            W / 2.0,
            H - 15.0,
            escape(&self.x_label)
        );
        let _ = writeln!(
            s,
            r#"<text x="15" y="{}" text-anchor="middle" font-size="14" transform="rotate(-90 15 {})">{}</text>"#,
            H / 2.0,
            H / 2.0,
            escape(&self.y_label)
        );
        for (v, anchor_x, anchor_y, a) in [
            (x0, MARGIN, H - MARGIN + 18.0, "start"),
            (x1, W - MARGIN, H - MARGIN + 18.0, "end"),
        ] {
            let _ = writeln!(
                s,
                r#"<text x="{anchor_x}" y="{anchor_y}" text-anchor="{a}" font-size="11">{}</text>"#,
                sig(v, 4)
            );
        }
        for (v, y) in [(y0, H - MARGIN), (y1, MARGIN + 10.0)] {
            let _ = writeln!(
                s,
                r#"<text x="{}" y="{y}" text-anchor="end" font-size="11">{}</text>"#,
                MARGIN - 4.0,
                sig(v, 4)
            );
        }
        for p in &self.points {
            let (cx, cy) = (px(p.x), py(p.y));
            let fill = match p.tag.as_str() {
                "increase" => "none",
                "decrease" => "black",
                _ => "gray",
            };
            let _ = writeln!(
                s,
                r#"<rect x="{:.2}" y="{:.2}" width="6" height="6" fill="{fill}" stroke="black"><title>{}</title></rect>"#,
                cx - 3.0,
                cy - 3.0,
                escape(&p.firm_id)
            );
        }
        s.push_str("</svg>\n");
        s
    }
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Writes one CSV per series into `outdir`, returning the paths written.
pub fn export_scatter(
    records: &[CompanyRecord],
    matrices: &[EfficiencyMatrix],
    config: &DatasetConfig,
    outdir: &Path,
) -> io::Result<Vec<PathBuf>> {
    std::fs::create_dir_all(outdir)?;
    scatter_series(records, matrices, config)
        .into_iter()
        .map(|series| {
            let path = outdir.join(format!("{}.csv", series.name));
            std::fs::write(&path, series.to_csv())?;
            Ok(path)
        })
        .collect()
}
