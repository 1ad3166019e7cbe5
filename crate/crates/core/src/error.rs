use std::fmt;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("unsupported dimension n = {0}")]
    UnsupportedDimension(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("budget exceeded: {0}")]
    Budget(String),

    #[error("linear program is infeasible")]
    Infeasible,

    #[error("linear program is unbounded")]
    Unbounded,

    #[error("cutting-plane loop did not converge within {0} cuts")]
    CutCap(usize),

    #[error("pair values {0:e} and {1:e} are closer than the grouping tolerance but not equal; supply coordinates with more precision")]
    AmbiguousGrouping(f64, f64),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("certificate format: {0}")]
    Format(String),

    #[error("certificate rejected: {0}")]
    Rejected(Rejection),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}

/// Named precondition failures of the certificate verifier.
#[derive(Clone, Debug, PartialEq)]
pub enum Rejection {
    PositiveMultiplier { index: usize, value: f64 },
    PositiveZ3(f64),
    TailRhsNotNegative { parity: usize, value: f64 },
    TailInequalityFails { lhs: f64, rhs: f64 },
    NoBesselZero { upper: f64 },
    Irreparable,
    WrongSpace,
    SupportOutOfRange(f64),
}

impl fmt::Display for Rejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rejection::PositiveMultiplier { index, value } => {
                write!(f, "y must be nonpositive (profile {index} has y = {value:e})")
            }
            Rejection::PositiveZ3(z3) => {
                write!(f, "z3 must be nonpositive for the 2x2 block to be PSD (z3 = {z3:e})")
            }
            Rejection::TailRhsNotNegative { parity, value } => write!(
                f,
                "tail right-hand side not negative (parity {parity}: {value:e})"
            ),
            Rejection::TailInequalityFails { lhs, rhs } => write!(
                f,
                "tail inequality fails ({lhs:e} < {rhs:e}); increase L"
            ),
            Rejection::NoBesselZero { upper } => {
                write!(f, "no Bessel zero in [0, {upper}]; increase L")
            }
            Rejection::Irreparable => {
                write!(f, "irreparable: z3 = 0 forces z2 = 0 but a z2 increase is needed")
            }
            Rejection::WrongSpace => write!(f, "certificate space does not match the verifier"),
            Rejection::SupportOutOfRange(v) => {
                write!(f, "profile support value {v:e} out of range")
            }
        }
    }
}
