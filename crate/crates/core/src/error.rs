use thiserror::Error;

/// Errors raised by state construction and the numerical routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("trace is not 1 (got {0})")]
    InvalidTrace(f64),

    #[error("not positive semidefinite (min eigenvalue {0:e})")]
    NotPositive(f64),

    #[error("not unitary (max deviation of U^dag U from I is {0:e})")]
    NotUnitary(f64),

    #[error("{name} = {value} outside [{min}, {max}]")]
    OutOfRange {
        name: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },

    #[error("reduced state is singular: min eigenvalue {min_eigenvalue:e} <= floor {floor:e}")]
    SingularReducedState { min_eigenvalue: f64, floor: f64 },

    #[error("post-selection impossible: success probability {0:e}")]
    PostSelectionImpossible(f64),

    #[error("protocol step {step}: {source}")]
    AtStep {
        step: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("inequality {which} violated: {lhs} vs {rhs}")]
    InequalityViolated {
        which: &'static str,
        lhs: f64,
        rhs: f64,
    },

    #[error("observables span rank {rank}, need exactly {required}")]
    RankDeficient { rank: usize, required: usize },

    #[error("counterexample search exhausted: {0}")]
    SearchExhausted(String),

    #[error("certificate failed: {0}")]
    CertificateFailure(String),

    #[error("optimizer stagnated in every restart (best residual {best_residual:e})")]
    Stagnation { best_residual: f64 },

    #[error("transcript has {steps} filter steps, need at least {required}")]
    TranscriptTooShort { steps: usize, required: usize },

    #[error("invalid serialized data: {0}")]
    Format(String),

    #[error("observables are informationally complete (rank {rank}); no normal direction exists")]
    InformationallyComplete { rank: usize },

    #[error("coupling {0} is zero")]
    ZeroCoupling(&'static str),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn at_step(step: usize, err: Error) -> Self {
        Error::AtStep {
            step,
            source: Box::new(err),
        }
    }

    pub(crate) fn out_of_range(name: &'static str, value: f64, min: f64, max: f64) -> Self {
        Error::OutOfRange {
            name,
            value,
            min,
            max,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
