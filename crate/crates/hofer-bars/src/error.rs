use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid manifold parameters: {0}")]
    InvalidParams(String),
    #[error("slope condition violated on segment {segment}: {detail}")]
    SlopeConditionViolation { segment: usize, detail: String },
    #[error("domain error: {0}")]
    DomainError(String),
    #[error("profiles do not share a domain: {0}")]
    DomainMismatch(String),
    #[error("no integer solution: {0}")]
    NoSolution(String),
    #[error("barcodes have different degrees ({0} vs {1})")]
    DegreeMismatch(i64, i64),
    #[error("boundary does not square to zero: {0}")]
    NotAComplex(String),
    #[error("filtration violated: {0}")]
    FiltrationViolation(String),
    #[error("case mismatch: {0}")]
    CaseMismatch(String),
    #[error("no rule applies at t = {time}: {detail}")]
    RuleConflict { time: String, detail: String },
    #[error("all coefficients are zero")]
    AllZero,
    #[error("parameter error: {0}")]
    ParameterError(String),
    #[error("coefficient support exceeds the generator family: {0}")]
    SupportError(String),
    #[error("cannot perturb: {0}")]
    CannotPerturb(String),
    #[error("volume error: {0}")]
    VolumeError(String),
}
