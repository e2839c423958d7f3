use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty domain: cannot sample a permutation of 0 elements")]
    EmptyDomain,

    #[error("invalid dimension {n}: {reason}")]
    InvalidDimension { n: usize, reason: &'static str },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// A seed does not satisfy the zero-sum / unit-energy constraints.
    #[error(
        "seed violates constraints: sum residual = {sum_residual:e}, \
         square-sum residual = {square_residual:e} (tolerance {tolerance:e})"
    )]
    SeedConstraint {
        sum_residual: f64,
        square_residual: f64,
        tolerance: f64,
    },

    #[error("degenerate matrix: all entries equal, normalization undefined")]
    DegenerateMatrix,

    #[error("enumeration refused: {what} would need {count} permutations")]
    EnumerationTooLarge { what: &'static str, count: String },

    #[error("eigenvalue iteration did not converge for the block ending at row {row} after {iterations} iterations")]
    NoConvergence { row: usize, iterations: usize },

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("domain error: {0}")]
    Domain(String),

    /// A shifted matrix is numerically singular.
    #[error("singular shift: singular value s_{index} = {value:e} underflowed")]
    SingularShift { index: usize, value: f64 },

    #[error("zero variance: {0}")]
    ZeroVariance(String),

    #[error("rank deficient input: s_min = {s_min:e}, s_max = {s_max:e}")]
    RankDeficient { s_min: f64, s_max: f64 },

    #[error("empty sample")]
    EmptySample,

    #[error("too few samples: got {got}, need at least {need}")]
    TooFewSamples { got: usize, need: usize },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    #[error("invalid config: {field}: {message}")]
    Config { field: String, message: String },

    #[error("kernel failure budget exceeded: {failures} of {trials} trials failed")]
    KernelBudget { failures: usize, trials: usize },

    /// A shifted matrix came out numerically singular in a run that must not see one.
    #[error(
        "positivity violated: sqrt(n)*s_n = {scaled_sn:e} at n = {n}, trial {trial} \
         (master seed {master_seed}, substream {trial})"
    )]
    PositivityViolation {
        n: usize,
        trial: u64,
        master_seed: u64,
        scaled_sn: f64,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Process exit code for the command-line runner.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. } | Error::Parse { .. } => 2,
            Error::KernelBudget { .. } => 3,
            _ => 1,
        }
    }

    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
