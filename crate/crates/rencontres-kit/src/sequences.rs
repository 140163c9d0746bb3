//! The derangement sequence by four independent methods, rencontres
//! numbers, and the `D_n/(n-1)` quotient, with a persistent memo cache.
//!
//! The memoization backbone is the two-term recurrence
//! `D_n = (n-1)(D_{n-1} + D_{n-2})`, seeded `D_0 = 1, D_1 = 0` — two adds
//! and one small multiply per step. The other methods recompute from
//! scratch on purpose: sharing the cache would mask exactly the bugs the
//! cross-checks exist to find.

use std::fmt::Write as _;
use std::path::Path;
use std::sync::RwLock;

use num_traits::{One, Zero};

use crate::exact::{exact_div, BigNat};
use crate::{Error, Result};

/// Cache file header, first line of the on-disk format.
pub const CACHE_HEADER: &str = "rencontres-kit-cache v1";

/// How a cache entry was produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EntrySource {
    /// One of the two defining seeds `D_0 = 1`, `D_1 = 0`.
    Seed,
    /// Extended in-process by the two-term recurrence.
    Recurrence,
    /// Read from a cache file or injected externally.
    Loaded,
}

/// Where the recurrence validation of a derangement prefix first fails.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecurrenceViolation {
    pub index: usize,
    pub actual: BigNat,
    pub expected: BigNat,
}

/// Checks that `values` is a valid derangement prefix: the two seeds are
/// present and correct and every later entry satisfies the two-term
/// recurrence.
pub fn validate_derangement_prefix(
    values: &[BigNat],
) -> std::result::Result<(), RecurrenceViolation> {
    let seeds = [BigNat::one(), BigNat::zero()];
    for (index, expected) in seeds.iter().enumerate() {
        match values.get(index) {
            Some(actual) if actual == expected => {}
            Some(actual) => {
                return Err(RecurrenceViolation {
                    index,
                    actual: actual.clone(),
                    expected: expected.clone(),
                })
            }
            None => {
                return Err(RecurrenceViolation {
                    index,
                    actual: BigNat::zero(),
                    expected: expected.clone(),
                })
            }
        }
    }
    for n in 2..values.len() {
        let expected = BigNat::from(n - 1) * (&values[n - 1] + &values[n - 2]);
        if values[n] != expected {
            return Err(RecurrenceViolation {
                index: n,
                actual: values[n].clone(),
                expected,
            });
        }
    }
    Ok(())
}

struct CacheInner {
    derangements: Vec<BigNat>,
    sources: Vec<EntrySource>,
    factorials: Vec<BigNat>,
}

impl CacheInner {
    fn extend_derangements(&mut self, n: usize) {
        while self.derangements.len() <= n {
            let len = self.derangements.len();
            let next =
                BigNat::from(len - 1) * (&self.derangements[len - 1] + &self.derangements[len - 2]);
            self.derangements.push(next);
            self.sources.push(EntrySource::Recurrence);
        }
    }

    fn extend_factorials(&mut self, n: usize) {
        while self.factorials.len() <= n {
            let len = self.factorials.len();
            let next = &self.factorials[len - 1] * BigNat::from(len);
            self.factorials.push(next);
        }
    }
}

/// Memoized prefix of the derangement sequence and of the factorials.
///
/// All methods take `&self`; extension happens behind a write lock, so any
/// number of threads may read concurrently and never observe a hole in the
/// prefix.
pub struct SequenceCache {
    inner: RwLock<CacheInner>,
}

impl SequenceCache {
    /// Fresh cache holding only the seeds `D_0 = 1`, `D_1 = 0`.
    pub fn new() -> Self {
        SequenceCache {
            inner: RwLock::new(CacheInner {
                derangements: vec![BigNat::one(), BigNat::zero()],
                sources: vec![EntrySource::Seed, EntrySource::Seed],
                factorials: vec![BigNat::one()],
            }),
        }
    }

    /// Wraps an externally supplied prefix without validating it.
    ///
    /// This deliberately admits sequences that violate the recurrence; the
    /// identity checkers' mutation-sensitivity tests depend on being able
    /// to inject a tampered entry. Use [`SequenceCache::load`] for data
    /// that should be trusted.
    pub fn from_derangements_unchecked(values: Vec<BigNat>) -> Self {
        let sources = values.iter().map(|_| EntrySource::Loaded).collect();
        SequenceCache {
            inner: RwLock::new(CacheInner {
                derangements: values,
                sources,
                factorials: vec![BigNat::one()],
            }),
        }
    }

    /// `D_n` via the memoized two-term recurrence.
    pub fn derangement(&self, n: usize) -> BigNat {
        {
            let inner = self.inner.read().unwrap();
            if let Some(value) = inner.derangements.get(n) {
                return value.clone();
            }
        }
        let mut inner = self.inner.write().unwrap();
        inner.extend_derangements(n);
        inner.derangements[n].clone()
    }

    /// `n!` from the memoized factorial prefix.
    pub fn factorial(&self, n: usize) -> BigNat {
        {
            let inner = self.inner.read().unwrap();
            if let Some(value) = inner.factorials.get(n) {
                return value.clone();
            }
        }
        let mut inner = self.inner.write().unwrap();
        inner.extend_factorials(n);
        inner.factorials[n].clone()
    }

    /// Pre-extends both memo tables so later concurrent reads are lock-light.
    pub fn ensure(&self, derangements_up_to: usize, factorials_up_to: usize) {
        let mut inner = self.inner.write().unwrap();
        inner.extend_derangements(derangements_up_to);
        inner.extend_factorials(factorials_up_to);
    }

    /// Rencontres number `D_n(r) = C(n, r) · D_{n-r}`; 0 when `r > n`.
    pub fn rencontres(&self, n: usize, r: usize) -> BigNat {
        if r > n {
            return BigNat::zero();
        }
        crate::exact::binomial(n, r) * self.derangement(n - r)
    }

    /// The full rencontres row `(D_n(0), …, D_n(n))`.
    ///
    /// Panics if the freshly computed row does not sum to `n!` — that sum
    /// is a defining property of the row, so a mismatch is an arithmetic
    /// bug, not a recoverable condition.
    pub fn rencontres_row(&self, n: usize) -> RencontresRow {
        let values: Vec<BigNat> = (0..=n).map(|r| self.rencontres(n, r)).collect();
        let sum: BigNat = values.iter().sum();
        assert_eq!(
            sum,
            self.factorial(n),
            "rencontres row {n} does not sum to n!"
        );
        RencontresRow { n, values }
    }

    /// `|A_n| = D_n / (n-1)`: the number of derangements mapping one fixed
    /// element to one fixed other element.
    ///
    /// The division is provably exact for every valid sequence, so a
    /// remainder is reported as a consistency violation.
    pub fn a_number(&self, n: usize) -> Result<BigNat> {
        if n < 2 {
            return Err(Error::IndexBelowMinimum {
                op: "a_number",
                min: 2,
                n,
            });
        }
        let d = self.derangement(n);
        exact_div(&d, &BigNat::from(n - 1)).ok_or_else(|| {
            Error::Consistency(format!("(n-1) = {} does not divide D_{n} = {d}", n - 1))
        })
    }

    /// `|A_n|` via the recurrence `|A_n| = D_{n-2} + (n-2)·|A_{n-1}|`,
    /// iterated from the base `|A_2| = 1`. Always equals [`Self::a_number`].
    pub fn a_number_recurrence(&self, n: usize) -> Result<BigNat> {
        if n < 2 {
            return Err(Error::IndexBelowMinimum {
                op: "a_number_recurrence",
                min: 2,
                n,
            });
        }
        let mut a = BigNat::one();
        for m in 3..=n {
            a = self.derangement(m - 2) + BigNat::from(m - 2) * a;
        }
        Ok(a)
    }

    /// Number of cached derangement entries (the prefix length).
    pub fn derangement_count(&self) -> usize {
        self.inner.read().unwrap().derangements.len()
    }

    /// How entry `n` was produced, if cached.
    pub fn source(&self, n: usize) -> Option<EntrySource> {
        self.inner.read().unwrap().sources.get(n).copied()
    }

    /// Copy of the cached derangement prefix.
    pub fn snapshot(&self) -> Vec<BigNat> {
        self.inner.read().unwrap().derangements.clone()
    }

    /// Serializes the derangement prefix to the versioned text format.
    pub fn save(&self, path: &Path) -> Result<()> {
        let inner = self.inner.read().unwrap();
        let mut out = String::new();
        writeln!(out, "{CACHE_HEADER}").unwrap();
        writeln!(out, "derangements {}", inner.derangements.len()).unwrap();
        for value in &inner.derangements {
            writeln!(out, "{value}").unwrap();
        }
        std::fs::write(path, out)?;
        Ok(())
    }

    /// Loads a cache file, re-validating the two-term recurrence on every
    /// entry before accepting it.
    pub fn load(path: &Path) -> Result<Self> {
        let values = parse_cache_file(path)?;
        validate_derangement_prefix(&values).map_err(|v| Error::CacheValidation {
            index: v.index,
            message: format!("expected {}, found {}", v.expected, v.actual),
        })?;
        let mut sources = vec![EntrySource::Loaded; values.len()];
        sources[0] = EntrySource::Seed;
        sources[1] = EntrySource::Seed;
        Ok(SequenceCache {
            inner: RwLock::new(CacheInner {
                derangements: values,
                sources,
                factorials: vec![BigNat::one()],
            }),
        })
    }
}

impl Default for SequenceCache {
    fn default() -> Self {
        SequenceCache::new()
    }
}

/// Parses the cache file format without validating the recurrence.
pub fn parse_cache_file(path: &Path) -> Result<Vec<BigNat>> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines();
    match lines.next() {
        Some(line) if line == CACHE_HEADER => {}
        other => {
            return Err(Error::CacheParse {
                line: 1,
                message: format!(
                    "expected header {CACHE_HEADER:?}, found {:?}",
                    other.unwrap_or("")
                ),
            })
        }
    }
    let count: usize = match lines.next() {
        Some(line) => match line.strip_prefix("derangements ") {
            Some(count) => count.parse().map_err(|_| Error::CacheParse {
                line: 2,
                message: format!("invalid entry count {count:?}"),
            })?,
            None => {
                return Err(Error::CacheParse {
                    line: 2,
                    message: format!("expected \"derangements <count>\", found {line:?}"),
                })
            }
        },
        None => {
            return Err(Error::CacheParse {
                line: 2,
                message: "missing \"derangements <count>\" line".to_owned(),
            })
        }
    };
    let mut values = Vec::with_capacity(count);
    for index in 0..count {
        let line_no = index + 3;
        let line = lines.next().ok_or_else(|| Error::CacheParse {
            line: line_no,
            message: format!("expected {count} entries, file ends after {index}"),
        })?;
        let value = line.parse::<BigNat>().map_err(|_| Error::CacheParse {
            line: line_no,
            message: format!("invalid decimal value {line:?}"),
        })?;
        values.push(value);
    }
    if let Some(extra) = lines.next() {
        return Err(Error::CacheParse {
            line: count + 3,
            message: format!("unexpected trailing content {extra:?}"),
        });
    }
    Ok(values)
}

/// One row of the rencontres triangle: `values[r] = D_n(r)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RencontresRow {
    pub n: usize,
    pub values: Vec<BigNat>,
}

/// `D_n` by the alternating recurrence `D_n = n·D_{n-1} + (-1)^n`, iterated
/// from `D_0 = 1`. Recomputes from scratch; does not touch any cache.
pub fn derangement_alternating(n: usize) -> BigNat {
    let mut d = BigNat::one();
    for i in 1..=n {
        d *= BigNat::from(i);
        if i % 2 == 0 {
            d += BigNat::one();
        } else {
            d -= BigNat::one();
        }
    }
    d
}

/// `D_n` by the subfactorial sum `Σ_{k=0}^{n} (-1)^k · n!/k!`, with every
/// `n!/k!` evaluated as an integer falling factorial.
pub fn derangement_subfactorial(n: usize) -> BigNat {
    // Walk k downward so the falling factorial grows one factor at a time.
    let mut positive = BigNat::zero();
    let mut negative = BigNat::zero();
    let mut magnitude = BigNat::one();
    for k in (0..=n).rev() {
        if k % 2 == 0 {
            positive += &magnitude;
        } else {
            negative += &magnitude;
        }
        if k > 0 {
            magnitude *= BigNat::from(k);
        }
    }
    positive - negative
}

/// `D_n` by the telescoped expansion of the alternating recurrence:
/// `n(n-1)…3·(-1)^2 + n(n-1)…4·(-1)^3 + … + (-1)^n`, i.e.
/// `Σ_{j=2}^{n} (-1)^j · n!/j!` with the leading term `n!/2!`.
///
/// The expansion starts at two factors short of `n!`, so it is only defined
/// for `n >= 2`; the seeds answer `n = 0, 1`.
pub fn derangement_telescoped(n: usize) -> Result<BigNat> {
    if n < 2 {
        return Err(Error::IndexBelowMinimum {
            op: "derangement_telescoped",
            min: 2,
            n,
        });
    }
    let mut positive = BigNat::zero();
    let mut negative = BigNat::zero();
    let mut magnitude = BigNat::one();
    for j in (2..=n).rev() {
        if j % 2 == 0 {
            positive += &magnitude;
        } else {
            negative += &magnitude;
        }
        if j > 2 {
            magnitude *= BigNat::from(j);
        }
    }
    Ok(positive - negative)
}
