use std::fmt;

use crate::expr::{EvalError, ParseError};
use crate::rules::Family;

/// Errors raised by the measure, rule, and composite routines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("alpha must lie strictly inside (0, 1), got {0}")]
    InvalidAlpha(f64),

    #[error("dyadic interval X_{j}^{k} is invalid: need k <= {max_order} and j < 2^k")]
    InvalidInterval { j: u64, k: u32, max_order: u32 },

    #[error("order {requested} exceeds the supported maximum {max}")]
    OrderTooLarge { requested: u32, max: u32 },

    #[error("point {0} lies outside [0, 1]")]
    OutsideUnitInterval(f64),

    #[error("moment of order {0} overflowed double precision")]
    MomentOverflow(u32),

    #[error("rule {family} is only defined for alpha in [{lo}, {hi}], got {alpha}")]
    RuleDomain {
        family: Family,
        alpha: f64,
        lo: f64,
        hi: f64,
    },

    #[error("unknown rule family `{0}`")]
    UnknownFamily(String),

    #[error(
        "interpolatory system is singular or ill-conditioned (condition estimate {condition:e})"
    )]
    IllConditioned { condition: f64 },

    #[error("too many nodes: {count} given, at most {max} supported")]
    TooManyNodes { count: usize, max: usize },

    #[error("invalid rule: {0}")]
    InvalidRule(String),

    #[error("integrand is not finite at x = {x}: got {value}")]
    NonFinite { x: f64, value: f64 },

    #[error("evaluation failed at x = {x}: {source}")]
    Eval { x: f64, source: EvalError },

    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("invalid dyadic partition: {0}")]
    InvalidPartition(String),

    #[error("invalid stop configuration: {0}")]
    InvalidConfig(String),

    #[error("insufficient points to fit a convergence order: {usable} usable, need {needed}")]
    InsufficientPoints { usable: usize, needed: usize },

    #[error("unknown builtin `{0}` (expected f1 or f2)")]
    UnknownBuiltin(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Coarse classification used by front ends to pick exit statuses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Usage,
    Domain,
    Parse,
    Evaluation,
    Numerical,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::InvalidAlpha(_)
            | Error::InvalidInterval { .. }
            | Error::OrderTooLarge { .. }
            | Error::OutsideUnitInterval(_)
            | Error::UnknownFamily(_)
            | Error::UnknownBuiltin(_)
            | Error::InvalidConfig(_)
            | Error::InvalidPartition(_)
            | Error::TooManyNodes { .. }
            | Error::InvalidRule(_) => ErrorKind::Usage,
            Error::RuleDomain { .. } => ErrorKind::Domain,
            Error::Parse(_) => ErrorKind::Parse,
            Error::NonFinite { .. } | Error::Eval { .. } => ErrorKind::Evaluation,
            Error::MomentOverflow(_)
            | Error::IllConditioned { .. }
            | Error::InsufficientPoints { .. } => ErrorKind::Numerical,
        }
    }
}

impl fmt::Display for ErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ErrorKind::Usage => "usage",
            ErrorKind::Domain => "domain",
            ErrorKind::Parse => "parse",
            ErrorKind::Evaluation => "evaluation",
            ErrorKind::Numerical => "numerical",
        };
        f.write_str(s)
    }
}
