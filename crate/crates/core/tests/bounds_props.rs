mod common;

use discbound::bounds::{
    blind_bound, blind_interval, delta1, florian_angles, florian_bound, florian_interval, lipschitz_envelope,
    BoundSample,
};
use discbound::numerics::Interval;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn envelope_never_undercuts_a_slope_bounded_function(seed in any::<u64>()) {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let f = common::SlopeBounded::random(&mut rng, 60);
        let n = f.grid.len();
        let picks: Vec<usize> = (0..rng.gen_range(1..8)).map(|_| rng.gen_range(0..n)).collect();
        let samples: Vec<BoundSample> =
            picks.iter().map(|&i| BoundSample::new(f.grid[i], f.values[i]).unwrap()).collect();
        for (x, v) in f.grid.iter().zip(&f.values) {
            prop_assert!(lipschitz_envelope(&samples, *x) >= *v, "r = {x}");
        }
    }

    #[test]
    fn envelope_is_at_most_each_sample(vals in prop::collection::vec((0.05f64..1.0, 0.0f64..0.09), 1..10)) {
        let samples: Vec<BoundSample> =
            vals.iter().map(|&(r, v)| BoundSample::new(r, delta1() + v).unwrap()).collect();
        let best = samples.iter().map(|s| s.value).fold(f64::INFINITY, f64::min);
        for s in &samples {
            let e = lipschitz_envelope(&samples, s.r);
            prop_assert!(e <= s.value);
        }
        let argmin = samples.iter().find(|s| s.value == best).unwrap();
        prop_assert_eq!(lipschitz_envelope(&samples, argmin.r), best);
    }

    #[test]
    fn florian_enclosure_covers_subinterval_points(lo in 0.01f64..0.99, w in 0.0f64..0.01, t in 0.0f64..1.0) {
        let hi = (lo + w).min(1.0);
        let enc = florian_interval(Interval::new(lo, hi).unwrap()).unwrap();
        let r = lo + t * (hi - lo);
        let v = florian_bound(r).unwrap();
        prop_assert!(v >= enc.lo() - 1e-12 && v <= enc.hi() + 1e-12);
    }

    #[test]
    fn blind_enclosure_covers_subinterval_points(lo in 0.6735f64..0.99, w in 0.0f64..0.01, t in 0.0f64..1.0) {
        let hi = (lo + w).min(1.0);
        let enc = blind_interval(Interval::new(lo, hi).unwrap()).unwrap();
        let v = blind_bound(lo + t * (hi - lo)).unwrap();
        prop_assert!(v >= enc.lo() - 1e-15 && v <= enc.hi() + 1e-15);
    }

    #[test]
    fn florian_angle_identity(r in 1e-6f64..=1.0) {
        let (a, b) = florian_angles(r);
        prop_assert!((a + 2.0 * b - std::f64::consts::PI).abs() < 1e-12);
    }
}

#[test]
fn blind_below_florian_on_its_range() {
    // the two bounds meet at r = 0.673521008... (mpmath), just above the
    // validity threshold
    assert!(blind_bound(0.6735).unwrap() > florian_bound(0.6735).unwrap());
    assert!(blind_bound(0.67353).unwrap() < florian_bound(0.67353).unwrap());
    for k in 0..=326 {
        let r = (0.67353 + k as f64 * 1e-3).min(1.0);
        assert!(blind_bound(r).unwrap() < florian_bound(r).unwrap(), "r = {r}");
    }
}
