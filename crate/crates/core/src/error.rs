use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("zero denominator")]
    ZeroDenominator,

    #[error("valuation of zero is undefined")]
    ZeroValuation,

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("singular curve: discriminant is zero")]
    SingularCurve,

    #[error("point {0} is not on the curve")]
    NotOnCurve(String),

    #[error("point {0} is not on the quartic")]
    NotOnQuartic(String),

    #[error("leading coefficient of a quartic must be nonzero")]
    DegenerateQuartic,

    #[error("constant term {0} is not a nonzero rational square; shift by a known point first")]
    NotSquare(String),

    #[error("exceptional point: {0}")]
    ExceptionalPoint(String),

    #[error("pipeline expects k = {expected}, problem has k = {found}")]
    WrongPipeline { expected: u32, found: u32 },

    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("point at infinity yields no solution")]
    NoSolution,

    #[error("degenerate substitution: {0}")]
    Degenerate(String),

    #[error("internal error: identity failed to verify ({0})")]
    IdentityFailed(String),

    #[error("input solution does not verify")]
    Unverified,

    #[error("fixture {id}: {message}")]
    Fixture { id: String, message: String },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
