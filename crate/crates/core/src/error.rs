use thiserror::Error;

/// Errors raised by the numerics and the experiment runner.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian: |a[{row}][{col}] - conj(a[{col}][{row}])| = {deviation:e}")]
    NotHermitian {
        row: usize,
        col: usize,
        deviation: f64,
    },

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("empty matrix")]
    Empty,

    #[error("not a density matrix: {0}")]
    NotDensity(String),

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("required dimension {required} exceeds the size cap {cap}")]
    SizeCap { required: u128, cap: usize },

    #[error("function undefined at eigenvalue {eigenvalue:e}")]
    FunctionUndefined { eigenvalue: f64 },

    #[error("support condition violated: {0}")]
    Support(String),

    #[error("argument out of range: {0}")]
    Domain(String),

    #[error("enumeration infeasible: {0}")]
    Infeasible(String),

    #[error("eigendecomposition failed to converge")]
    NoConvergence,

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("i/o failure: {0}")]
    Io(String),
}

impl Error {
    /// Process exit status used by the command-line runner.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::SizeCap { .. } | Error::Infeasible(_) => 3,
            Error::Invariant(_) => 4,
            Error::Io(_) => 1,
            _ => 2,
        }
    }

    /// Short machine-readable tag for error records.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NotHermitian { .. } => "not_hermitian",
            Error::NotSquare { .. } => "not_square",
            Error::Empty => "empty",
            Error::NotDensity(_) => "not_density",
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::SizeCap { .. } => "size_cap",
            Error::FunctionUndefined { .. } => "function_undefined",
            Error::Support(_) => "support",
            Error::Domain(_) => "domain",
            Error::Infeasible(_) => "infeasible",
            Error::NoConvergence => "no_convergence",
            Error::Config(_) => "config",
            Error::Invariant(_) => "invariant",
            Error::Io(_) => "io",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
