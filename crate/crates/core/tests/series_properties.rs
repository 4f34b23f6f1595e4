use proptest::prelude::*;
use saruma::model::ExpandedModel;
use saruma::pacf::levinson_forward;
use saruma::poly::FilterPoly;
use saruma::series::{
    format_csv, parse_csv, residuals, simulate, simulate_with_innovations, TimeSeries,
};

fn airline() -> FilterPoly {
    FilterPoly::difference(1)
        .unwrap()
        .mul(&FilterPoly::difference(12).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn innovations_recovered(ar in prop::collection::vec(-0.9f64..0.9, 0..4), ma in prop::collection::vec(-0.6f64..0.6, 0..3), seed in any::<u64>()) {
        let model = ExpandedModel::new(levinson_forward(&ar), levinson_forward(&ma));
        let sim = simulate_with_innovations(&model, 600, 1.0, seed, 100).unwrap();
        let res = residuals(&model, &sim.series).unwrap();
        let k = model.ar_full.degree();
        // MA presample transients decay at least as fast as 0.6^t per PACF layer.
        let settle = 300;
        for t in settle..sim.series.len() {
            prop_assert!((res.residuals[t - k] - sim.innovations[t]).abs() <= 1e-6);
        }
    }

    #[test]
    fn airline_residuals_are_seasonal_differences(seed in any::<u64>()) {
        let y = simulate(&ExpandedModel::white_noise(), 80, 2.0, seed, 0).unwrap();
        let r = residuals(&ExpandedModel::new(airline(), FilterPoly::identity()), &y).unwrap();
        let v = y.values();
        for t in 13..v.len() {
            prop_assert_eq!(r.residuals[t - 13], v[t] - v[t - 1] - v[t - 12] + v[t - 13]);
        }
        prop_assert_eq!(r.effective_n, v.len() - 13);
    }

    #[test]
    fn sum_sq_matches_residuals(seed in any::<u64>()) {
        let model = ExpandedModel::new(levinson_forward(&[0.5, -0.2]), levinson_forward(&[0.3]));
        let y = simulate(&model, 100, 1.0, seed, 10).unwrap();
        let r = residuals(&model, &y).unwrap();
        let direct: f64 = r.residuals.iter().map(|e| e * e).sum();
        prop_assert_eq!(r.sum_sq, direct);
        let labelled = y.clone().with_labels((0..y.len()).map(|i| format!("2020-{i}")).collect());
        prop_assert_eq!(residuals(&model, &labelled).unwrap().sum_sq, r.sum_sq);
    }

    #[test]
    fn csv_round_trip(values in prop::collection::vec(-1e6f64..1e6, 1..50)) {
        let ts = TimeSeries::new(values).unwrap();
        prop_assert_eq!(parse_csv(&format_csv(&ts)).unwrap(), ts);
    }
}
