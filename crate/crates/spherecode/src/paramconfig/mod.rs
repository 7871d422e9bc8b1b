//! Symbolic parameterizations, their energy derivatives and Newton
//! refinement.

mod jet;
mod newton;
mod registry;
mod spec;

pub use newton::{newton_refine, newton_refine_traced, NewtonStep};
pub use registry::{builtin_spec, builtin_spec_with_digits, REGISTERED, REGISTRY_DIGITS};
pub use spec::{
    build_points, param_energy, param_gradient, param_jacobian, ConfigSpec, Generator, ParamRef, ParamVector, Sign,
};
