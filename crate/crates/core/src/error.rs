use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unsupported dimension n = {0}")]
    UnsupportedDimension(usize),

    #[error("invalid representation label: {0}")]
    InvalidLabel(String),

    #[error("rotation vector length {0} exceeds 2*pi")]
    RotationTooLarge(f64),

    #[error("generator matrices rejected: {0}")]
    InvalidGenerators(String),

    #[error("coefficient block for twice_j = {twice_j} has shape {rows}x{cols}, expected {expected}x{expected}")]
    CoefficientShape {
        twice_j: u32,
        rows: usize,
        cols: usize,
        expected: usize,
    },

    #[error("inertia must be strictly positive, got {0}")]
    NonPositiveInertia(f64),

    #[error("matrix determinant must be positive, got {0}")]
    NonPositiveDeterminant(f64),

    #[error("matrix is singular")]
    Singular,

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("coupling requires distinct axes, got a = b = {0}")]
    SameAxis(usize),

    #[error("(s, j) = ({s}, {j}) violates the superselection rule: j - s must be an integer")]
    Superselection { s: String, j: String },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid potential: {0}")]
    InvalidPotential(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("eigensolver did not converge: {0}")]
    NoConvergence(String),

    #[error("matrix is not positive definite (pivot {pivot} = {value})")]
    NotPositiveDefinite { pivot: usize, value: f64 },

    #[error("integration unstable: {0}")]
    Unstable(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
