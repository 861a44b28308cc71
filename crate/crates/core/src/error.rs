use thiserror::Error;

use crate::field::FieldSpec;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("modulus {0} is not a prime in 2..=2^31")]
    NotPrime(u64),

    #[error("field mismatch: {left} vs {right}")]
    FieldMismatch { left: FieldSpec, right: FieldSpec },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not invertible")]
    NotInvertible,

    #[error("permutation ({perm}) is not admissible for shape {shape}")]
    InadmissiblePermutation { perm: String, shape: String },

    #[error("rank-one term has a zero factor")]
    ZeroFactor,

    #[error("map does not preserve rank one: {0}")]
    NotRankOnePreserving(String),

    #[error("maps do not satisfy the multiplicativity hypothesis")]
    NotMultiplicative,

    #[error("a factor map has transpose form where a sandwich form is required")]
    NotSandwichForm,

    #[error("decomposition does not sum to the matrix multiplication tensor")]
    NotADecompositionOfT,

    #[error("enumeration needs {needed} raw triples, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u64 },

    #[error("exhaustive enumeration requires a finite field, got {0}")]
    InfiniteField(FieldSpec),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

impl Error {
    pub(crate) fn dims(msg: impl Into<String>) -> Self {
        Error::DimensionMismatch(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}
