//! Exact computation of derangement and rencontres numbers.
//!
//! A derangement of `[n] = {1, …, n}` is a permutation without fixed points;
//! `D_n` counts them. The rencontres number `D_n(r)` counts permutations of
//! `[n]` with exactly `r` fixed points. This crate computes both with exact
//! big-integer arithmetic, by several independent methods, and mechanically
//! verifies the identities that relate them:
//!
//! * [`exact`] — big-integer and exact-rational primitives (factorials,
//!   binomials, normalized ratios).
//! * [`sequences`] — the derangement sequence by four methods, rencontres
//!   numbers, the `D_n/(n-1)` quotients, and a persistent memo cache.
//! * [`oracle`] — brute-force enumeration of permutations grouped by fixed
//!   points, plus uniform derangement sampling.
//! * [`identities`] — one checker per identity, evaluating both sides
//!   exactly over a parameter range and reporting equality.
//!
//! With the default `parallel` feature the census enumeration and the
//! identity sweeps fan out over rayon; disabling it yields the same results
//! single-threaded.

pub mod exact;
pub mod identities;
pub mod oracle;
pub mod sequences;

mod error;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Runs `op` on each item, preserving input order in the output. Parallel
/// when the `parallel` feature is enabled.
pub(crate) fn ordered_map<P, T, F>(items: Vec<P>, op: F) -> Vec<T>
where
    P: Send,
    T: Send,
    F: Fn(P) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.into_par_iter().map(op).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.into_iter().map(op).collect()
    }
}
