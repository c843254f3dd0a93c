use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("empty sample")]
    EmptySample,

    #[error("non-finite value at index {0}")]
    NonFinite(usize),

    #[error("censoring interval at index {index} is empty: lo = {lo}, hi = {hi}")]
    EmptyCensorInterval { index: usize, lo: f64, hi: f64 },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid band: {0}")]
    InvalidBand(String),

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("need at least two finite lower-boundary values, got {0}")]
    TooFewFinite(usize),

    #[error("concave interior is empty")]
    Infeasible,

    #[error("band lacks exponential tail on the {0} side")]
    NoExponentialTail(&'static str),

    #[error("t = {t} outside convergence region: requires {rate_name} = {rate} > |t|")]
    MgfDivergent {
        t: f64,
        rate_name: &'static str,
        rate: f64,
    },

    #[error("no grid pair available on the {0} side of the probe point")]
    NoSecantPair(&'static str),

    #[error("distribution function is degenerate at x = {0}")]
    DegenerateCdf(f64),

    #[error("internal consistency violation: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
