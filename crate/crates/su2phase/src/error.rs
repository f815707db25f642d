use crate::halfint::HalfInt;

/// Errors reported by the library.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// `(j, m)` is not a valid angular-momentum pair: requires `j >= 0`,
    /// `|m| <= j` and `j - m` integer.
    #[error("invalid quantum numbers: j = {j}, m = {m}")]
    InvalidQuantumPair { j: HalfInt, m: HalfInt },

    /// The requested representation exceeds the supported size.
    #[error("2j = {twice_j} exceeds the supported limit 2j <= {limit}")]
    UnsupportedJ { twice_j: i32, limit: i32 },

    /// A scalar argument is outside its documented domain.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// An internal consistency check failed; results would be meaningless.
    #[error("numerical integrity violation: {0}")]
    NumericalIntegrity(String),

    /// The likelihood carries no phase information over the given bracket.
    #[error("likelihood is flat over the bracket ({0}, {1})")]
    DegenerateLikelihood(f64, f64),
}

pub type Result<T> = std::result::Result<T, Error>;
