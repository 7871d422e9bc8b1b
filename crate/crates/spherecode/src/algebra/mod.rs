//! Lattice reduction and minimal-polynomial recovery.

mod lll;
mod poly;

pub use lll::lattice_reduce;
pub use poly::{
    minimal_polynomial, verify_root, IntPolynomial, RecoveryResult, LATTICE_GUARD_DIGITS, MAX_RECOVERY_DEGREE,
    MIN_RECOVERY_DIGITS,
};
