use cardioseq::data::{
    apply_scaler, fit_scaler, impute_missing, parse_record_line, parse_str, to_feature_matrix,
    Dataset, Dialect, ImputationPolicy, Label, Preprocessor, SampleRecord,
    DEFAULT_CATEGORICAL_MASK, N_FEATURES,
};
use cardioseq::Error;
use proptest::prelude::*;

fn value() -> impl Strategy<Value = Option<f64>> {
    prop_oneof![
        4 => (-100i32..100).prop_map(|v| Some(f64::from(v) / 4.0)),
        1 => Just(None),
    ]
}

fn record() -> impl Strategy<Value = SampleRecord> {
    (prop::array::uniform13(value()), any::<bool>()).prop_map(|(features, present)| SampleRecord {
        features,
        label: if present {
            Label::Present
        } else {
            Label::Absent
        },
    })
}

fn dataset(min: usize) -> impl Strategy<Value = Dataset> {
    prop::collection::vec(record(), min..40).prop_map(|records| {
        let mut d = Dataset::new(records);
        // make sure every column has at least one observed value
        for c in 0..N_FEATURES {
            if d.column(c).all(|v| v.is_none()) {
                d.records[0].features[c] = Some(1.0);
            }
        }
        d
    })
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let m = values.iter().sum::<f64>() / n;
    (
        m,
        (values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / n).sqrt(),
    )
}

proptest! {
    #[test]
    fn imputation_fills_everything_and_is_idempotent(d in dataset(1)) {
        let once = impute_missing(&d, ImputationPolicy::default(), &d).unwrap();
        prop_assert!(once.records.iter().all(SampleRecord::is_complete));
        let twice = impute_missing(&once, ImputationPolicy::default(), &once).unwrap();
        prop_assert_eq!(&twice, &once);
        for (a, b) in d.records.iter().zip(&once.records) {
            if a.is_complete() {
                prop_assert_eq!(a, b);
            }
        }
    }

    #[test]
    fn imputed_numeric_values_are_the_observed_mean(d in dataset(1)) {
        let once = impute_missing(&d, ImputationPolicy::default(), &d).unwrap();
        for c in (0..N_FEATURES).filter(|&c| !d.categorical_mask[c]) {
            let observed: Vec<f64> = d.column(c).flatten().collect();
            let mean = observed.iter().sum::<f64>() / observed.len() as f64;
            for (a, b) in d.records.iter().zip(&once.records) {
                if a.features[c].is_none() {
                    prop_assert!((b.features[c].unwrap() - mean).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn standardized_columns_have_zero_mean_unit_std(d in dataset(2)) {
        let full = impute_missing(&d, ImputationPolicy::default(), &d).unwrap();
        let stats = fit_scaler(&full).unwrap();
        let scaled = apply_scaler(&full, &stats).unwrap();
        for c in 0..N_FEATURES {
            let col: Vec<f64> = scaled.column(c).map(Option::unwrap).collect();
            let (m, s) = mean_std(&col);
            if stats.is_constant(c) {
                prop_assert!(col.iter().all(|v| *v == 0.0));
            } else {
                prop_assert!(m.abs() < 1e-9, "column {c} mean {m}");
                prop_assert!((s - 1.0).abs() < 1e-9, "column {c} std {s}");
            }
        }
    }

    #[test]
    fn test_rows_never_change_train_statistics(train in dataset(2), test in dataset(1), other in dataset(1)) {
        let a = Preprocessor::fit(&train, ImputationPolicy::default()).unwrap();
        let b = Preprocessor::fit(&train, ImputationPolicy::default()).unwrap();
        prop_assert_eq!(&a, &b);
        // filling a test set only ever reads training statistics
        let t1 = impute_missing(&test, ImputationPolicy::default(), &train).unwrap();
        let mut mixed = test.clone();
        mixed.records.extend(other.records.iter().cloned());
        let t2 = impute_missing(&mixed, ImputationPolicy::default(), &train).unwrap();
        prop_assert_eq!(&t1.records[..], &t2.records[..test.len()]);
    }

    #[test]
    fn feature_matrix_round_trips(values in prop::array::uniform13(-1e6f64..1e6)) {
        let m = to_feature_matrix(&SampleRecord::complete(values, Label::Absent)).unwrap();
        prop_assert_eq!((m.rows(), m.cols()), (13, 1));
        prop_assert_eq!(m.as_slice(), &values[..]);
    }

    #[test]
    fn cleveland_lines_round_trip(r in record(), label in 0u8..5) {
        let fields: Vec<String> = r.features.iter().map(|v| v.map_or("?".into(), |v| v.to_string())).collect();
        let line = format!("{},{label}", fields.join(","));
        let parsed = parse_record_line(&line, Dialect::Cleveland, 1).unwrap();
        prop_assert_eq!(parsed.features, r.features);
        prop_assert_eq!(parsed.label, if label == 0 { Label::Absent } else { Label::Present });
    }

    #[test]
    fn parsing_never_panics(text in "[0-9 ,.?\\-e\\n]{0,200}", statlog in any::<bool>()) {
        let dialect = if statlog { Dialect::Statlog } else { Dialect::Cleveland };
        match parse_str(&text, dialect) {
            Ok(d) => prop_assert!(!d.is_empty()),
            Err(Error::EmptyDataset | Error::MalformedRow { .. } | Error::UnknownLabel { .. }) => {}
            Err(e) => prop_assert!(false, "unexpected error {e}"),
        }
    }
}

#[test]
fn worked_imputation_examples() {
    let mut mask = [false; N_FEATURES];
    mask[2] = true;
    let col0 = [Some(1.0), Some(2.0), None, Some(3.0)];
    let col2 = [Some(3.0), Some(3.0), None, Some(7.0)];
    let d = Dataset::new(
        (0..4)
            .map(|i| {
                let mut f = [Some(0.0); N_FEATURES];
                f[0] = col0[i];
                f[2] = col2[i];
                SampleRecord {
                    features: f,
                    label: Label::Absent,
                }
            })
            .collect(),
    )
    .with_categorical_mask(mask);
    let out = impute_missing(&d, ImputationPolicy::default(), &d).unwrap();
    assert_eq!(out.records[2].features[0], Some(2.0));
    assert_eq!(out.records[2].features[2], Some(3.0));
}

#[test]
fn all_missing_column_is_an_error() {
    let mut f = [Some(1.0); N_FEATURES];
    f[11] = None;
    let d = Dataset::new(vec![SampleRecord {
        features: f,
        label: Label::Present,
    }]);
    assert!(matches!(
        impute_missing(&d, ImputationPolicy::default(), &d),
        Err(Error::AllMissingColumn { column: 11 })
    ));
}

#[test]
fn default_mask_marks_the_conventional_categoricals() {
    let categorical: Vec<usize> = (0..N_FEATURES)
        .filter(|&i| DEFAULT_CATEGORICAL_MASK[i])
        .collect();
    assert_eq!(categorical, vec![1, 2, 5, 6, 8, 10, 11, 12]);
}

#[test]
fn single_record_statistics() {
    let d = Dataset::new(vec![SampleRecord::complete(
        [4.0; N_FEATURES],
        Label::Absent,
    )]);
    let s = fit_scaler(&d).unwrap();
    assert_eq!(s.mean, vec![4.0; N_FEATURES]);
    assert_eq!(s.std, vec![0.0; N_FEATURES]);
}
