use thiserror::Error;

/// Every failure the library can report.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("vector too close to zero to normalize")]
    ZeroVector,

    #[error("points {i} and {j} coincide")]
    CoincidentPoints { i: usize, j: usize },

    #[error("point sets differ in size ({left} vs {right})")]
    SizeMismatch { left: usize, right: usize },

    #[error("point {index} is off the unit sphere (|x|^2 - 1 = {deviation})")]
    OffSphere { index: usize, deviation: String },

    #[error("energy increased at the smallest step size (iteration {iteration})")]
    NoProgress { iteration: usize },

    #[error("iteration limit {iterations} reached with residual {residual}")]
    IterationLimit { iterations: usize, residual: String },

    #[error("annealing stalled for {rounds} consecutive rounds")]
    StagnationLimit { rounds: usize },

    #[error("generator {generator} has negative radicand {radicand}")]
    DomainViolation { generator: usize, radicand: String },

    #[error("singular Jacobian (pivot {pivot})")]
    SingularJacobian { pivot: String },

    #[error("Newton iteration diverged after {steps} steps")]
    Diverged { steps: usize },

    #[error("no built-in parameterization for n={n} ({potential})")]
    Unregistered { n: usize, potential: String },

    #[error("not a critical point (residual {residual})")]
    NotCritical { residual: String },

    #[error("matrix is not symmetric (asymmetry {asymmetry})")]
    NonSymmetric { asymmetry: String },

    #[error("no planes or polygons detected")]
    NoStructure,

    #[error("lattice basis is linearly dependent")]
    DependentBasis,

    #[error("input carries {digits} digits, at least {required} required")]
    InsufficientPrecision { digits: u32, required: u32 },

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
