use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid piecewise function: {0}")]
    InvalidFunction(String),

    #[error("integral diverges: {0}")]
    NonIntegrable(String),

    #[error("function is not nondecreasing: {0}")]
    NotMonotone(String),

    #[error("weight must be nonnegative, found {value} on ({start}, {end})")]
    NegativeWeight { value: f64, start: f64, end: f64 },

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("invalid initial datum: {0}")]
    InvalidDatum(String),

    #[error("the flow map needs an absolutely continuous datum, found {0} atom(s)")]
    AtomsPresent(usize),

    #[error("time {0} is singular: the energy measure carries atoms there")]
    SingularTime(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("internal consistency violation: {0}")]
    Internal(String),
}
