#![allow(dead_code)]

use std::collections::BTreeMap;

use outlier_perf_core::{CompanyRecord, IndicatorKind};
use proptest::prelude::*;
use rand::Rng;

pub fn record(id: &str, tta: Vec<f64>, perf: [[f64; 3]; 4]) -> CompanyRecord {
    CompanyRecord {
        firm_id: id.to_string(),
        name: format!("Firm {id}"),
        sector: "Media".to_string(),
        tta_pre: tta,
        perf_post: IndicatorKind::ALL
            .iter()
            .zip(perf)
            .map(|(k, v)| (*k, v.to_vec()))
            .collect::<BTreeMap<_, _>>(),
    }
}

pub fn random_record<R: Rng>(rng: &mut R, id: &str) -> CompanyRecord {
    let tta = vec![rng.random_range(1.0..5e5), rng.random_range(1.0..5e5)];
    let mut perf = [[0.0; 3]; 4];
    for row in &mut perf {
        for v in row.iter_mut() {
            *v = rng.random_range(-1.0..2.0);
        }
    }
    record(id, tta, perf)
}

pub fn random_panel<R: Rng>(rng: &mut R, firms: usize) -> Vec<CompanyRecord> {
    (0..firms)
        .map(|i| random_record(rng, &format!("F{i:03}")))
        .collect()
}

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![
        -1e6..1e6f64,
        -1.0..1.0f64,
        any::<f64>().prop_filter("finite", |v| v.is_finite()),
    ]
}

fn positive() -> impl Strategy<Value = f64> {
    prop_oneof![1e-6..1e9f64, (1u32..100000).prop_map(f64::from)]
}

fn text() -> impl Strategy<Value = String> {
    prop_oneof![
        "[A-Za-z0-9 .&'-]{0,20}".prop_map(String::from),
        "[a-z]{1,5}(, [a-z]{1,5})?".prop_map(String::from),
        Just("Quote \"inside\"".to_string()),
    ]
}

/// Lists of valid records with unique ids under the default year layout.
pub fn records() -> impl Strategy<Value = Vec<CompanyRecord>> {
    prop::collection::vec(
        (
            text(),
            text(),
            prop::collection::vec(positive(), 2),
            prop::array::uniform4(prop::array::uniform3(finite())),
        ),
        1..12,
    )
    .prop_map(|rows| {
        rows.into_iter()
            .enumerate()
            .map(|(i, (name, sector, tta, perf))| {
                let mut r = record(&format!("id{i}"), tta, perf);
                r.name = name;
                r.sector = sector;
                r
            })
            .collect()
    })
}
