use std::path::Path;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use nse::estimator::{estimate, kept_set_quantile, weights, WeightMode};
use nse::grid::geodesic_distance;
use nse::io::{format_map, parse_map};
use nse::model::synthesize_field;
use nse::{CutoffFunction, Direction, Pixelization, ShtPlan, WindowFamily, WindowMode};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cutoff_is_monotone_and_bounded(b in 1.1f64..4.0, m in 3usize..12, x in 0.0f64..1.2, dx in 0.0f64..0.2) {
        let a = CutoffFunction::new(b, m).unwrap();
        let (lo, hi) = (a.eval(x), a.eval(x + dx));
        prop_assert!((0.0..=1.0).contains(&lo));
        prop_assert!(hi <= lo + 1e-14);
    }

    #[test]
    fn tight_windows_partition_unity(b in 1.2f64..3.0, m in 3usize..10, l in 1usize..200) {
        let j_max = (200f64.ln() / b.ln()).ceil() as i32 + 1;
        let fam = WindowFamily::new(CutoffFunction::new(b, m).unwrap(), WindowMode::Tight, 0, j_max).unwrap();
        prop_assert!((fam.partition_sum(l) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn windows_vanish_outside_the_band(b in 1.2f64..3.0, j in 1i32..6, l in 0usize..400) {
        let fam = WindowFamily::new(CutoffFunction::new(b, 5).unwrap(), WindowMode::Literal, 0, 6).unwrap();
        let x = l as f64 / b.powi(j);
        if x <= 1.0 / b || x >= b {
            prop_assert_eq!(fam.eval(j, l), 0.0);
        }
    }

    #[test]
    fn geodesic_distance_is_a_symmetric_angle(t1 in 0.0f64..3.2, p1 in 0.0f64..6.3, t2 in 0.0f64..3.2, p2 in 0.0f64..6.3) {
        let (a, b) = (Direction::from_angles(t1, p1), Direction::from_angles(t2, p2));
        let d = geodesic_distance(&a, &b).unwrap();
        prop_assert!((0.0..=std::f64::consts::PI).contains(&d));
        prop_assert_eq!(d, geodesic_distance(&b, &a).unwrap());
    }

    #[test]
    fn transforms_invert_on_band_limited_fields(lmax in 0usize..14, seed in any::<u64>()) {
        let alm = synthesize_field(&vec![1.0; lmax + 1], lmax, &mut ChaCha20Rng::seed_from_u64(seed)).unwrap();
        let pix = Pixelization::new(2 * lmax);
        let plan = ShtPlan::new(&pix, lmax).unwrap();
        let back = plan.forward(&plan.inverse(&alm).unwrap()).unwrap();
        let err: f64 = alm.as_slice().iter().zip(back.as_slice()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        prop_assert!(err < 1e-12);
    }

    #[test]
    fn weights_sum_to_one(n2 in prop::collection::vec(0.0f64..10.0, 1..60), pilot in 1e-6f64..5.0, q in 0.05f64..1.0) {
        let kept = kept_set_quantile(&n2, q);
        prop_assert_eq!(kept.len(), ((q * n2.len() as f64).ceil() as usize).min(n2.len()));
        for mode in [WeightMode::Uniform, WeightMode::Mle] {
            let w = weights(mode, &kept, &n2, pilot, 0).unwrap();
            prop_assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            prop_assert!(w.iter().enumerate().all(|(k, v)| *v >= 0.0 && (kept.contains(&k) || *v == 0.0)));
        }
    }

    #[test]
    fn estimate_of_pure_noise_level_is_zero(n in prop::collection::vec(0.0f64..3.0, 1..40)) {
        let n2: Vec<f64> = n.iter().map(|v| v * v).collect();
        let kept: Vec<usize> = (0..n.len()).collect();
        let w = weights(WeightMode::Uniform, &kept, &n2, 0.0, 0).unwrap();
        prop_assert!(estimate(&n, &n2, &w).abs() < 1e-12);
    }

    #[test]
    fn map_files_round_trip_exactly(order in 0usize..12, seed in any::<u64>()) {
        let pix = Pixelization::new(order);
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let values: Vec<f64> = (0..pix.len()).map(|_| rand::Rng::random_range(&mut rng, -1e3..1e3)).collect();
        let parsed = parse_map(&format_map(&pix, &values).unwrap(), Path::new("mem")).unwrap();
        prop_assert_eq!(parsed.values, values);
        prop_assert_eq!(parsed.order, order);
    }
}
