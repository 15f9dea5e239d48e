use thiserror::Error;

/// Errors produced by the sampling and smoothness toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unknown corpus function `{0}`")]
    UnknownCorpus(String),

    #[error("parameter out of range: {0}")]
    ParameterOutOfRange(String),

    #[error("invalid node set: {0}")]
    InvalidNodes(String),

    #[error("quadrature did not converge: best estimate {estimate:e} with error bound {error_bound:e}")]
    QuadratureNonConvergence { estimate: f64, error_bound: f64 },

    #[error("tau undefined for unbounded f (`{0}`)")]
    TauUndefined(String),

    #[error("numerically singular system: {0}")]
    Singular(String),

    #[error("empty input: {0}")]
    Empty(String),

    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },

    #[error("nonpositive value {value} at n = {n}")]
    NonPositive { n: f64, value: f64 },

    #[error("misaligned inputs: {0}")]
    Misaligned(String),

    #[error("unknown suite `{0}`")]
    UnknownSuite(String),

    #[error("overflow: {0}")]
    Overflow(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("experiment failed at (fn={function}, op={operator}, n={n}): {source}")]
    Experiment {
        function: String,
        operator: String,
        n: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
