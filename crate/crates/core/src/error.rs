use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("alphabet sizes differ: {left} vs {right}")]
    AlphabetMismatch { left: usize, right: usize },

    /// Mass of the first distribution sits where the second has none.
    #[error("support mismatch at symbol {symbol}")]
    SupportMismatch { symbol: usize },

    #[error("{0} outside its domain")]
    Domain(String),

    /// The constraint level lies outside `(0, D(Q||P))`.
    #[error("delta = {delta} outside (0, {max})")]
    DeltaOutOfRange { delta: f64, max: f64 },

    /// P and Q coincide on their common support, so there is nothing to test.
    #[error("degenerate family: P and Q coincide on their support")]
    DegenerateFamily,

    #[error("problem too large: {atoms} atoms (limit {limit})")]
    TooLarge { atoms: u128, limit: u128 },
}

impl Error {
    /// Errors that stem from the mathematical domain of a query rather than
    /// from malformed input.
    pub fn is_domain(&self) -> bool {
        matches!(
            self,
            Error::Domain(_) | Error::DeltaOutOfRange { .. } | Error::DegenerateFamily | Error::TooLarge { .. }
        )
    }
}
