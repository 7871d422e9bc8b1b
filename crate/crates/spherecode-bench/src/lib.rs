//! Shared inputs for the criterion benchmarks.

use spherecode::optimize::random_start;
use spherecode::paramconfig::{builtin_spec_with_digits, ConfigSpec, ParamVector};
use spherecode::{BigReal, PointSet, Potential};

/// Random configuration used by the energy and descent benches.
pub fn random_points(n: usize, digits: u32) -> PointSet {
    random_start(n, 7, 0, digits)
}

/// Eight-point antiprism with a seed a few digits from the root.
pub fn antiprism_problem(digits: u32) -> (ConfigSpec, ParamVector) {
    builtin_spec_with_digits(8, Potential::Log, digits).expect("registered")
}

/// Value of the antiprism height accurate to `digits`.
pub fn antiprism_root(digits: u32) -> BigReal {
    let (spec, seed) = antiprism_problem(digits + 10);
    let refined = spherecode::paramconfig::newton_refine(&spec, &seed, Potential::Log, digits).expect("converges");
    refined.values[0].with_precision(digits)
}
