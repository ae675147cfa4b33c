mod common;

use outlier_perf_core::{parse_reader, validate_dataset, write_writer, DatasetConfig, IngestError};
use proptest::prelude::*;

proptest! {
    #[test]
    fn write_then_parse_is_identity(records in common::records()) {
        let config = DatasetConfig::default();
        let mut buf = Vec::new();
        write_writer(&mut buf, &records, &config).unwrap();
        let back = parse_reader(buf.as_slice(), &config).unwrap();
        prop_assert_eq!(&back, &records);
        let ids: Vec<_> = back.iter().map(|r| r.firm_id.as_str()).collect();
        let expected: Vec<_> = records.iter().map(|r| r.firm_id.as_str()).collect();
        prop_assert_eq!(ids, expected);
    }

    #[test]
    fn parsed_records_always_validate(
        records in common::records(),
        corrupt in prop::option::of((0usize..12, -10.0..0.0f64)),
    ) {
        let config = DatasetConfig::default();
        let mut records = records;
        if let Some((i, v)) = corrupt {
            let i = i % records.len();
            records[i].tta_pre[1] = v;
        }
        let mut buf = Vec::new();
        write_writer(&mut buf, &records, &config).unwrap();
        match parse_reader(buf.as_slice(), &config) {
            Ok(parsed) => {
                prop_assert!(corrupt.is_none());
                prop_assert!(validate_dataset(&parsed, &config).is_empty());
            }
            Err(e) => {
                prop_assert!(corrupt.is_some());
                let is_tta_error = matches!(e, IngestError::NonPositiveTta { .. });
                prop_assert!(is_tta_error);
            }
        }
    }
}

#[test]
fn non_numeric_cell_is_located() {
    let config = DatasetConfig::default();
    let mut text = config.columns().join(",");
    text.push('\n');
    text.push_str("1,A,Media,10,20,0.1,0.2,0.3,0.1,0.2,0.3,0.1,0.2,0.3,0.1,n/a,0.3\n");
    match parse_reader(text.as_bytes(), &config) {
        Err(IngestError::NonNumericCell {
            line,
            column,
            value,
        }) => {
            assert_eq!(line, 2);
            assert_eq!(column, "ros_2009");
            assert_eq!(value, "n/a");
        }
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn file_round_trip_and_missing_file() {
    use outlier_perf_core::{parse_dataset, write_dataset};
    use rand::SeedableRng;

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("panel.csv");
    let config = DatasetConfig::default();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
    let records = common::random_panel(&mut rng, 25);
    write_dataset(&path, &records, &config).unwrap();
    assert_eq!(parse_dataset(&path, &config).unwrap(), records);

    let missing = dir.path().join("nope.csv");
    assert!(matches!(
        parse_dataset(&missing, &config),
        Err(IngestError::Io { .. })
    ));
}
