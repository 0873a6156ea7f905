use thiserror::Error;

use crate::capacity::EnclosingBall;

/// Errors for Bloch-ball geometry, channel and solver computations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("point lies outside the closed unit ball (radius {radius})")]
    OutOfBall { radius: f64 },

    #[error("matrix is not Hermitian (deviation {deviation})")]
    NotHermitian { deviation: f64 },

    #[error("matrix trace is not 1 (got {trace})")]
    TraceNotOne { trace: f64 },

    #[error("matrix is not positive semi-definite (min eigenvalue {min_eigenvalue})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("singular logarithm: state is pure or nearly pure (radius {radius})")]
    SingularLogarithm { radius: f64 },

    #[error("pure states required (radius {radius})")]
    PureStateRequired { radius: f64 },

    #[error("divergence undefined at pure second argument (radius {radius})")]
    DivergenceUndefined { radius: f64 },

    #[error("dual coordinates diverge on sphere (radius {radius})")]
    DualDiverges { radius: f64 },

    #[error("dual coordinates must be finite")]
    NonFiniteDual,

    #[error("parameter {name} out of range (got {value})")]
    ParameterOutOfRange { name: &'static str, value: f64 },

    #[error("channel image leaves the Bloch ball (max overflow {overflow:e})")]
    InvalidChannel { overflow: f64 },

    #[error("site set is empty")]
    EmptySites,

    #[error("sites {first} and {second} coincide")]
    DuplicateSites { first: usize, second: usize },

    #[error("bisector of coincident sites is undefined")]
    CoincidentSites,

    #[error("at least two sites required (got {count})")]
    TooFewSites { count: usize },

    #[error("mode misuse: {reason}")]
    ModeMisuse { reason: String },

    #[error("epsilon out of range (got {epsilon}, need 0 < epsilon <= 0.5)")]
    EpsilonOutOfRange { epsilon: f64 },

    #[error("site file line {line}: {reason}")]
    InvalidSiteFile { line: usize, reason: String },

    #[error("assignments have different query lists")]
    QueryListMismatch,

    #[error("point list is empty")]
    EmptyInput,

    #[error("solver exhausted {iterations} iterations without converging")]
    SolverStalled {
        iterations: usize,
        partial: Box<EnclosingBall>,
    },

    #[error("unsupported export format: {format}")]
    UnsupportedFormat { format: String },
}

pub type Result<T> = std::result::Result<T, Error>;
