mod common;

use common::*;
use proptest::prelude::*;

fn angles() -> impl Strategy<Value = (f64, f64, f64)> {
    (0.0..std::f64::consts::TAU, 0.0..std::f64::consts::PI, 0.0..std::f64::consts::TAU)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 12, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn forces_match_finite_differences(n in 2usize..7, seed in any::<u64>(), pot in potential(), digits in prop::sample::select(vec![24u32, 40, 60])) {
        check_gradient(n, seed, pot, digits)?;
    }

    #[test]
    fn energy_and_signature_are_isometry_invariant(
        (n, perm) in (2usize..10).prop_flat_map(|n| (Just(n), Just((0..n).collect::<Vec<_>>()).prop_shuffle())),
        seed in any::<u64>(),
        pot in potential(),
        rot in angles(),
    ) {
        check_invariance(n, seed, pot, rot, perm)?;
    }

    #[test]
    fn symmetry_report_is_isometry_invariant(which in 0usize..4, rot in angles(), perm_seed in any::<u64>()) {
        check_symmetry_invariance(which, rot, perm_seed)?;
    }

    #[test]
    fn regular_rings_are_detected(k in 3usize..=12, z in -0.8f64..0.8, phase in 0.0f64..1.0, rot in angles()) {
        check_ring_detection(k, z, phase, rot)?;
    }

    #[test]
    fn file_formats_round_trip(
        n in 1usize..8,
        seed in any::<u64>(),
        digits in 16u32..70,
        coeffs in (prop::collection::vec(-1000i64..1000, 0..6), 1i64..500).prop_map(|(mut c, lead)| { c.push(lead); c }),
    ) {
        check_round_trips(n, seed, digits, coeffs)?;
    }

    #[test]
    fn lattice_reduction_is_reduced(rows in prop::collection::vec(prop::collection::vec(-50i64..50, 4), 1..=4)) {
        check_lll(rows)?;
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 6, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn anneal_history_is_monotone(n in 3usize..7, seed in any::<u64>(), pot in potential()) {
        check_anneal_monotone(n, seed, pot)?;
    }

    #[test]
    fn newton_doubles_digits(offset in -0.003f64..0.003) {
        check_newton_doubling(offset)?;
    }

    #[test]
    fn algdep_canonical_and_stable(num in 1i64..60, den in 1i64..60, surd in any::<bool>()) {
        prop_assume!(!surd || !is_square_ratio(num, den));
        check_algdep(num, den, surd)?;
    }
}

fn is_square_ratio(num: i64, den: i64) -> bool {
    let g = gcd(num, den);
    let (a, b) = (num / g, den / g);
    let sq = |v: i64| (v as f64).sqrt().round() as i64;
    sq(a) * sq(a) == a && sq(b) * sq(b) == b
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[test]
fn parameter_energy_stable_across_precision() {
    check_param_energy_stable().unwrap();
}
