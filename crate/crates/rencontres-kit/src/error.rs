use thiserror::Error;

/// Errors surfaced by the library.
///
/// `Consistency` is reserved for conditions that are mathematically
/// impossible on correct data (a divisibility that provably holds failing,
/// an always-integral term coming out fractional). Hitting one means the
/// arithmetic or the cached sequence is broken, not that the caller asked
/// for something unreasonable.
#[derive(Debug, Error)]
pub enum Error {
    /// Enumeration was asked for an `n` beyond the configured horizon.
    #[error("n = {n} exceeds the enumeration horizon {horizon}; raise --horizon (or RENCONTRES_HORIZON) to allow it")]
    HorizonExceeded { n: usize, horizon: usize },

    /// An operation was asked for an index below its admissible minimum.
    #[error("{op} is defined for n >= {min}, got n = {n}")]
    IndexBelowMinimum {
        op: &'static str,
        min: usize,
        n: usize,
    },

    /// An invariant that provably holds on valid data failed.
    #[error("internal consistency violation: {0}")]
    Consistency(String),

    /// A cache file could not be parsed.
    #[error("cache parse error at line {line}: {message}")]
    CacheParse { line: usize, message: String },

    /// A cache file parsed but its entries violate the defining recurrence.
    #[error("cache validation failed at index {index}: {message}")]
    CacheValidation { index: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
