//! Minimal-energy configurations of points on the unit sphere.
//!
//! The crate searches for configurations under logarithmic and Riesz
//! potentials, refines symmetric parameterizations with Newton's method at
//! arbitrary precision, certifies minima through the tangent-space Hessian,
//! and recovers integer minimal polynomials of the resulting numbers.

pub mod algebra;
pub mod error;
pub mod fixtures;
pub mod geometry;
pub mod io;
pub mod linalg;
pub mod numerics;
pub mod optimize;
pub mod paramconfig;
pub mod potentials;
pub mod symmetry;
pub mod verify;

pub use algebra::{IntPolynomial, RecoveryResult};
pub use error::{Error, Result};
pub use geometry::{GramMatrix, GramSignature, Isometry, Point3, PointSet};
pub use numerics::{BigReal, Rng};
pub use optimize::{AnnealConfig, DescentConfig, MultiStartReport, RunReport};
pub use paramconfig::{ConfigSpec, ParamVector};
pub use potentials::{EnergyValue, Potential};
pub use rug::Integer;
pub use symmetry::SymmetryReport;
pub use verify::{HessianReport, Verdict};
