use thiserror::Error;

/// Errors raised by the distribution, fitting and data routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parameter out of domain: {0}")]
    ParamDomain(String),

    #[error("observation {value} lies below the support start {mu}")]
    SupportViolation { value: u64, mu: f64 },

    #[error("empty sample")]
    EmptySample,

    #[error("degenerate sample: {0}")]
    DegenerateSample(String),

    #[error("insufficient data: need at least {required} observations, got {actual}")]
    InsufficientData { required: usize, actual: usize },

    #[error("no root: frequency ratio {ratio} lies outside the attainable range (1, 2)")]
    NoRoot { ratio: f64 },

    #[error("root finding did not converge: {0}")]
    NoConvergence(String),

    #[error(
        "underdispersed sample (mean {mean}, variance {variance}): the negative binomial \
         likelihood is maximised at the Poisson boundary r -> infinity"
    )]
    Underdispersed { mean: f64, variance: f64 },

    #[error("log-likelihood is -infinity at every visited parameter value")]
    Infeasible,

    #[error("quantile exceeds the representable count range (u = {u})")]
    QuantileOverflow { u: f64 },

    #[error("bootstrap needs at least 2 successful replicates, got {successful} of {total}")]
    InsufficientReplicates { successful: usize, total: usize },

    #[error("bootstrap replicate {replicate} failed: {source}")]
    ReplicateFailed {
        replicate: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("models are not comparable: {0}")]
    IncomparableModels(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: u64,
        column: usize,
        message: String,
    },

    #[error("unknown group {0:?}")]
    UnknownGroup(String),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
