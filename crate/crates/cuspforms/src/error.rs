//! One error type for the whole crate. Every variant name is stable and is
//! what the CLI reports in its machine-readable error objects.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("input must be nonzero")]
    ZeroInput,
    #[error("denominator must be nonzero")]
    ZeroDenominator,
    #[error("cannot parse rational from {0:?}")]
    ParseRational(String),
    #[error("{0} is not squarefree")]
    NotSquarefree(String),
    #[error("{0} is not prime")]
    NotPrime(String),
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("form is degenerate")]
    Degenerate,
    #[error("diagonal form entries must be nonzero")]
    ZeroEntry,
    #[error("scalar must be positive")]
    NonPositiveScalar,
    #[error("forms have different ranks ({0} vs {1})")]
    RankMismatch(usize, usize),
    #[error("wrong signature: {0}")]
    WrongSignature(String),
    #[error("basis is not isotropic: {0}")]
    NotIsotropic(String),
    #[error("wrong dimension: {0}")]
    WrongDimension(String),
    #[error("matrix does not preserve the form")]
    NotIsometry,
    #[error("invalid target: {0}")]
    InvalidTarget(String),
    #[error("group closure exceeded {0} elements")]
    ClosureBudgetExceeded(usize),
    #[error("{0} is not an odd prime")]
    NotOddPrime(String),
    #[error("generator lists have different lengths ({0} vs {1})")]
    GeneratorCountMismatch(usize, usize),
    #[error("matrix is singular")]
    Singular,
    #[error("unknown manifold record {0:?}")]
    UnknownRecord(String),
    #[error("bad parameters: {0}")]
    BadParameters(String),
    #[error("unsupported family: {0}")]
    UnsupportedFamily(String),
    #[error("list must be nonempty")]
    EmptyList,
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
}

impl Error {
    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::ZeroInput => "ZeroInput",
            Error::ZeroDenominator => "ZeroDenominator",
            Error::ParseRational(_) => "ParseRational",
            Error::NotSquarefree(_) => "NotSquarefree",
            Error::NotPrime(_) => "NotPrime",
            Error::BudgetExceeded(_) => "BudgetExceeded",
            Error::NotSymmetric => "NotSymmetric",
            Error::Degenerate => "Degenerate",
            Error::ZeroEntry => "ZeroEntry",
            Error::NonPositiveScalar => "NonPositiveScalar",
            Error::RankMismatch(_, _) => "RankMismatch",
            Error::WrongSignature(_) => "WrongSignature",
            Error::NotIsotropic(_) => "NotIsotropic",
            Error::WrongDimension(_) => "WrongDimension",
            Error::NotIsometry => "NotIsometry",
            Error::InvalidTarget(_) => "InvalidTarget",
            Error::ClosureBudgetExceeded(_) => "ClosureBudgetExceeded",
            Error::NotOddPrime(_) => "NotOddPrime",
            Error::GeneratorCountMismatch(_, _) => "GeneratorCountMismatch",
            Error::Singular => "Singular",
            Error::UnknownRecord(_) => "UnknownRecord",
            Error::BadParameters(_) => "BadParameters",
            Error::UnsupportedFamily(_) => "UnsupportedFamily",
            Error::EmptyList => "EmptyList",
            Error::IndexOutOfRange(_) => "IndexOutOfRange",
        }
    }
}
