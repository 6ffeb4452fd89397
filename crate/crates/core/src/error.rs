use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("non-finite input sample {value} at index {index}")]
    NonFiniteInput { index: usize, value: f64 },

    #[error("Hermitian symmetry violated at k = {k:?}: relative defect {defect:.3e} exceeds {tolerance:.1e}")]
    HermitianViolation {
        k: [i64; 3],
        defect: f64,
        tolerance: f64,
    },

    #[error("multiplier symbol is NaN at |ξ| = {magnitude}")]
    NanSymbol { magnitude: f64 },

    #[error("negative-order derivative D^{sigma} applied to a field with nonzero mean {mean:.3e}; supply a zero-mode rule")]
    NonzeroMean { sigma: f64, mean: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unknown recipe '{name}'; valid recipes are: {valid}")]
    UnknownRecipe { name: String, valid: String },

    #[error("cubic nonlinearity overflowed: max |u| = {max_abs:.6e}")]
    Overflow { max_abs: f64 },

    #[error("time step {dt} exceeds the stability bound {bound}")]
    UnstableStep { dt: f64, bound: f64 },

    #[error("non-finite field after step {step}; last good snapshot index {last_good}")]
    BlowUp { step: usize, last_good: usize },

    #[error("time {t} lies outside the subinterval [{a}, {b}]")]
    OutsideInterval { t: f64, a: f64, b: f64 },

    #[error("{0}")]
    Trajectory(String),

    #[error("exponent pair rejected: {0}")]
    Admissibility(String),

    #[error("{0}")]
    Search(String),

    #[error("shell quadruple enumeration would visit {count} quadruples (limit {limit}); use a coarser dyadic base or lower the shell cap")]
    TooManyQuadruples { count: usize, limit: usize },

    #[error("snapshot format: {0}")]
    Format(String),

    #[error("configuration: {0}")]
    Config(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
