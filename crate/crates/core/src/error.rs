use thiserror::Error;

/// Errors raised by the counting library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("modulus must lie in [2, 2^32), got {0}")]
    InvalidModulus(u64),

    #[error("{value} is not a unit modulo {modulus}")]
    NotUnit { value: u64, modulus: u64 },

    #[error("operation needs a prime-power modulus, got {0}")]
    NotPrimePower(u64),

    #[error("residues modulo {0} and {1} cannot be mixed")]
    ModulusMismatch(u64, u64),

    #[error("CRT components do not match the factorization of {0}")]
    CrtMismatch(u64),

    #[error("{0}")]
    OutOfRange(String),

    #[error("unsupported parameters: {0}")]
    Unsupported(String),

    #[error("odd-length theorem does not apply (n = {n}, epsilon equals (-1)^(n/2)); use the even-length theorem")]
    UseEvenLengthTheorem { n: usize },

    #[error("division {numerator} / {denominator} is not exact")]
    InexactDivision { numerator: String, denominator: String },

    #[error("excluded input: {0}")]
    ExcludedValue(String),

    #[error("oracle budget exceeded: estimated work {work} > ceiling {ceiling}")]
    BudgetExceeded { work: u128, ceiling: u128 },
}

pub type Result<T> = std::result::Result<T, Error>;
