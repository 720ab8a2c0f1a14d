use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("operator is not Hermitian (max |H - H^dagger| = {asymmetry:e}, scale {scale:e})")]
    NonHermitian { asymmetry: f64, scale: f64 },

    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {residual:e})")]
    NoConvergence { sweeps: usize, residual: f64 },

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid Fock truncation n = {0} (must be at least 1)")]
    InvalidTruncation(usize),

    #[error("trace has non-negligible imaginary part {imag:e}")]
    ComplexTrace { imag: f64 },

    #[error("function undefined at eigenvalue {eigenvalue:e}")]
    FunctionUndefined { eigenvalue: f64 },

    #[error("state is not positive semidefinite (eigenvalue {eigenvalue:e})")]
    NotPositive { eigenvalue: f64 },

    #[error("degenerate two-level splitting (mu = 0)")]
    DegenerateSplitting,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{}", match .line { Some(l) => format!("config line {l}: {msg}"), None => format!("config: {msg}") })]
    Config { line: Option<usize>, msg: String },

    #[error("i/o error: {0}")]
    Io(String),

    #[error("ledger check failed: {0}")]
    Ledger(String),
}

impl Error {
    pub(crate) fn config(line: Option<usize>, msg: impl Into<String>) -> Self {
        Error::Config {
            line,
            msg: msg.into(),
        }
    }

    /// True for errors caused by user input rather than numerics.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::Config { .. } | Error::InvalidParameter(_) | Error::InvalidTruncation(_) | Error::DegenerateSplitting
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
