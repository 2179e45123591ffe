use thiserror::Error;

/// Errors surfaced by the exact engine.
///
/// Every operation that cannot keep its result inside the closed
/// representation (rational breakpoints, polynomial pieces, affine
/// staircase components) reports why instead of silently approximating.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("point {0} is not in the support of the measure")]
    NotInSupport(String),

    #[error("sign change at an irrational point; exact splitting unsupported ({0})")]
    IrrationalRoot(String),

    #[error("degree unsupported: {0}")]
    DegreeUnsupported(String),

    #[error("function is not summable against the divergence measure: {0}")]
    NotSummable(String),

    #[error("mollifier support overflow: {0}")]
    SupportOverflow(String),

    #[error("Cantor-jump interaction unsupported: {0}")]
    CantorJumpInteraction(String),

    #[error("not representable in the closed function algebra: {0}")]
    Unrepresentable(String),

    #[error("undefined density: {0}")]
    UndefinedDensity(String),

    #[error("sequence is not strictly convergent: {0}")]
    NotStrict(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
