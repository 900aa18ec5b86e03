//! Property tests across modules.

use proptest::prelude::*;
use wisolab::format::sig;
use wisolab::geometry::{ratio, TrialDomain};
use wisolab::params::{classify, RegionTag, WeightParams};
use wisolab::spectral::{stability_margin, DEFAULT_TOL};
use wisolab::stereographic::{from_disk, to_disk, DiskPoint};
use wisolab::sweeps::{log_spaced, predicted_exponent, Family};

fn valid_params() -> impl Strategy<Value = WeightParams> {
    (2usize..=5, -0.5f64..2.0, -0.5f64..2.0, -0.95f64..1.5)
        .prop_map(|(n, k, l, a)| WeightParams::new(n, k, l, a))
        .prop_filter("admissible", |p| p.validate().is_ok())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn half_ball_ratio_is_scale_invariant(p in valid_params(), r in 0.1f64..20.0) {
        let base = ratio(&p, &TrialDomain::HalfBall { radius: 1.0 }).unwrap();
        let scaled = ratio(&p, &TrialDomain::HalfBall { radius: r }).unwrap();
        prop_assert!((scaled - base).abs() <= 1e-9 * base);
    }

    #[test]
    fn stereographic_round_trip(v in prop::collection::vec(-1.0f64..1.0, 1..5), r in 0.0f64..0.999) {
        let len = v.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-12);
        let y: Vec<f64> = v.iter().map(|x| x / len * r).collect();
        let p = DiskPoint::new(y.clone()).unwrap();
        let back = to_disk(&from_disk(&p));
        for (a, b) in y.iter().zip(&back.y) {
            prop_assert!((a - b).abs() <= 1e-12);
        }
        let z = from_disk(&p);
        let norm: f64 = z.zeta.iter().map(|v| v * v).sum();
        prop_assert!((norm - 1.0).abs() <= 1e-12);
        prop_assert!(*z.zeta.last().unwrap() >= 0.0);
    }

    #[test]
    fn emitted_numbers_keep_twelve_digits(x in -1e6f64..1e6) {
        let back: f64 = sig(x).parse().unwrap();
        prop_assert!((back - x).abs() <= 1e-11 * x.abs().max(1e-300));
    }

    #[test]
    fn log_grid_is_increasing(a in 0.1f64..10.0, span in 1.5f64..1e4, n in 2usize..40) {
        let g = log_spaced(a, a * span, n);
        prop_assert_eq!(g.len(), n);
        prop_assert!(g.windows(2).all(|w| w[1] > w[0]));
        prop_assert_eq!(g[n - 1], a * span);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// Both halves of the nonexistence-with-stable-half-balls statement, each
    /// through its own module.
    #[test]
    fn stable_region_has_decaying_up_axis_ratio(p in valid_params()) {
        if classify(&p).tag == RegionTag::NoSolutionStableHalfBalls {
            prop_assert!(predicted_exponent(&p, Family::UpAxis).unwrap() < 0.0);
            prop_assert!(stability_margin(&p, DEFAULT_TOL).unwrap() >= -1e-9);
        }
    }
}

#[test]
fn model_case_lies_in_stable_region() {
    for n in [2, 3, 4] {
        for a in [-0.9, -0.5, -0.1] {
            let p = WeightParams::new(n, 0.0, 0.0, a);
            assert_eq!(classify(&p).tag, RegionTag::NoSolutionStableHalfBalls);
            assert!(predicted_exponent(&p, Family::UpAxis).unwrap() < 0.0);
        }
    }
}
