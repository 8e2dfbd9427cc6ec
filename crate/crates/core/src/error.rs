use thiserror::Error;

use crate::group::GroupSpec;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid group: {0}")]
    InvalidGroup(String),

    #[error("element {element} does not belong to {group}")]
    NotInGroup { element: String, group: GroupSpec },

    #[error("group mismatch: {left} vs {right}")]
    GroupMismatch { left: GroupSpec, right: GroupSpec },

    #[error("integer overflow in window arithmetic")]
    Overflow,

    #[error("operation requires a nonempty set")]
    EmptySet,

    #[error("{value} is not invertible modulo {modulus}")]
    NotInvertible { value: i64, modulus: u64 },

    #[error("{op} is not supported on {group}")]
    Unsupported { op: &'static str, group: GroupSpec },

    #[error("modulus {0} is not prime")]
    NotPrime(u64),

    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("hypothesis not satisfied: {0}")]
    Hypothesis(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("map is not a bijection: {0}")]
    NotBijective(String),

    /// A checked statement failed on a concrete instance. Every statement the
    /// library checks is a theorem, so this indicates a bug.
    #[error("counterexample: {0}")]
    Counterexample(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
