use dgpfit::data::{describe, parse_frequency_csv, FrequencyRow, FrequencyTable};
use dgpfit::{CountSample, Error};
use proptest::prelude::*;

fn table() -> impl Strategy<Value = FrequencyTable> {
    (1usize..6, proptest::collection::btree_set(0u64..20_000, 1..30)).prop_flat_map(|(groups, counts)| {
        let rows = counts.len();
        proptest::collection::vec(proptest::collection::vec(0u64..12, groups), rows).prop_map(
            move |freqs| {
                let labels = (0..groups).map(|g| format!("{}", 2012 + g)).collect();
                let rows = counts
                    .iter()
                    .zip(freqs)
                    .map(|(&count, frequencies)| FrequencyRow { count, frequencies })
                    .collect();
                FrequencyTable::new(labels, rows).unwrap()
            },
        )
    })
}

fn moments_by_definition(values: &[u64]) -> (f64, f64, f64, f64) {
    let n = values.len() as f64;
    let xs: Vec<f64> = values.iter().map(|&v| v as f64).collect();
    let mean = xs.iter().sum::<f64>() / n;
    let central = |j: i32| xs.iter().map(|x| (x - mean).powi(j)).sum::<f64>() / n;
    let sd = (central(2) * n / (n - 1.0)).sqrt();
    (mean, sd, central(3) / central(2).powf(1.5), central(4) / central(2).powi(2) - 3.0)
}

proptest! {
    #[test]
    fn csv_round_trip(t in table()) {
        let text = t.to_csv();
        let back = parse_frequency_csv(text.as_bytes()).unwrap();
        prop_assert_eq!(&back, &t);
        let crlf = text.replace('\n', "\r\n");
        prop_assert_eq!(parse_frequency_csv(crlf.as_bytes()).unwrap(), t);
    }

    #[test]
    fn expand_then_tabulate_restores_columns(t in table()) {
        for (g, label) in t.group_labels().iter().enumerate() {
            match t.expand(label) {
                Ok(sample) => {
                    prop_assert!(sample.values().windows(2).all(|w| w[0] <= w[1]));
                    let tally = sample.tally();
                    let nonzero: Vec<(u64, u64)> = t
                        .rows()
                        .iter()
                        .filter(|r| r.frequencies[g] > 0)
                        .map(|r| (r.count, r.frequencies[g]))
                        .collect();
                    prop_assert_eq!(tally.entries(), nonzero.as_slice());
                    prop_assert_eq!(sample.len() as u64, t.totals()[g]);
                }
                Err(Error::EmptySample) => prop_assert_eq!(t.totals()[g], 0),
                Err(e) => return Err(TestCaseError::fail(e.to_string())),
            }
        }
    }

    #[test]
    fn rebuilding_from_samples_is_identity(t in table()) {
        let samples: Vec<CountSample> = t
            .group_labels()
            .iter()
            .filter_map(|g| t.expand(g).ok())
            .collect();
        prop_assume!(samples.len() == t.group_labels().len());
        let rebuilt = FrequencyTable::from_samples(t.group_labels().to_vec(), &samples).unwrap();
        let dense: Vec<&FrequencyRow> = t.rows().iter().filter(|r| r.frequencies.iter().any(|&f| f > 0)).collect();
        prop_assert_eq!(rebuilt.rows().len(), dense.len());
        for (a, b) in rebuilt.rows().iter().zip(dense) {
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn aggregate_is_permutation_invariant(t in table(), shift in 0usize..6) {
        let all = match t.aggregate() {
            Ok(s) => s,
            Err(_) => return Ok(()),
        };
        prop_assert_eq!(all.len() as u64, t.totals().iter().sum::<u64>());
        let k = t.group_labels().len();
        let order: Vec<usize> = (0..k).map(|i| (i + shift) % k).collect();
        let labels = order.iter().map(|&i| t.group_labels()[i].clone()).collect();
        let rows = t
            .rows()
            .iter()
            .map(|r| FrequencyRow {
                count: r.count,
                frequencies: order.iter().map(|&i| r.frequencies[i]).collect(),
            })
            .collect();
        let permuted = FrequencyTable::new(labels, rows).unwrap().aggregate().unwrap();
        let mut a = all.values().to_vec();
        let mut b = permuted.values().to_vec();
        a.sort_unstable();
        b.sort_unstable();
        prop_assert_eq!(a, b);
        if all.len() >= 2 {
            prop_assert_eq!(describe(&all).unwrap().max, describe(&permuted).unwrap().max);
        }
    }

    #[test]
    fn describe_matches_moment_definitions(values in proptest::collection::vec(0u64..500, 2..200)) {
        let s = CountSample::new(values.clone()).unwrap();
        let d = describe(&s).unwrap();
        let (mean, sd, g1, g2) = moments_by_definition(&values);
        prop_assert!((d.mean - mean).abs() <= 1e-12 * mean.max(1.0));
        prop_assert!((d.std_dev - sd).abs() <= 1e-10 * sd.max(1.0));
        prop_assert!(d.min as f64 <= d.mean && d.mean <= d.max as f64);
        if let (Some(skew), Some(kurt)) = (d.skewness, d.excess_kurtosis) {
            prop_assert!((skew - g1).abs() <= 1e-9 * g1.abs().max(1.0));
            prop_assert!((kurt - g2).abs() <= 1e-9 * g2.abs().max(1.0));
        } else {
            prop_assert_eq!(sd, 0.0);
        }
    }

    #[test]
    fn malformed_cells_are_rejected(t in table(), row_pick in any::<prop::sample::Index>(), col_pick in any::<prop::sample::Index>(), kind in 0usize..4) {
        let text = t.to_csv();
        let mut lines: Vec<Vec<String>> = text
            .lines()
            .map(|l| l.split(',').map(str::to_string).collect())
            .collect();
        let body = lines.len() - 1;
        let row = 1 + row_pick.index(body);
        let col = col_pick.index(lines[row].len());
        lines[row][col] = match kind {
            0 => "-3".into(),
            1 => "2.5".into(),
            2 => "x".into(),
            _ => String::new(),
        };
        let broken = lines.iter().map(|l| l.join(",")).collect::<Vec<_>>().join("\n");
        match parse_frequency_csv(broken.as_bytes()) {
            Err(Error::Parse { line, column, .. }) => {
                prop_assert_eq!(line, row as u64 + 1);
                prop_assert_eq!(column, col + 1);
            }
            other => return Err(TestCaseError::fail(format!("{other:?}"))),
        }
    }

    #[test]
    fn out_of_order_rows_are_rejected(t in table()) {
        prop_assume!(t.rows().len() >= 2);
        let mut rows = t.rows().to_vec();
        rows.swap(0, 1);
        let mut text = String::from("count");
        for label in t.group_labels() {
            text.push(',');
            text.push_str(label);
        }
        for r in &rows {
            text.push_str(&format!("\n{}", r.count));
            for f in &r.frequencies {
                text.push_str(&format!(",{f}"));
            }
        }
        let err = parse_frequency_csv(text.as_bytes()).unwrap_err();
        prop_assert!(matches!(err, Error::Parse { line: 3, column: 1, .. }), "{:?}", err);
    }
}
