//! Crate-wide error type.

use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("zero form")]
    ZeroForm,
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("unsupported degree {n}: supported range is {lo}..={hi}")]
    UnsupportedDegree { n: usize, lo: usize, hi: usize },
    #[error("vanishing reduction mod {0}")]
    VanishingReduction(u64),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("form is reducible over the rationals")]
    Reducible,
    #[error("form is not primitive; take primitive_part first")]
    NotPrimitive,
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("incomplete factorization: {0}")]
    IncompleteFactorization(String),
    #[error("paper theorem violated: {0}")]
    TheoremViolated(String),
    #[error("enumeration budget exceeded: {needed} points > budget {budget}")]
    Budget { needed: String, budget: u64 },
    #[error("factorization budget exceeded for {0}")]
    FactorBudget(String),
    #[error("precision failure: {0}; increase working precision")]
    Precision(String),
    #[error("internal consistency error: {0}")]
    Internal(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
