//! Exact integer and rational arithmetic primitives.
//!
//! Sequence magnitudes live in [`BigNat`] (nonnegative) and signed partial
//! sums in [`BigInt`]; both are the arbitrary-precision integers from
//! `num-bigint`, which already guarantee the canonical-form invariants this
//! crate relies on (no negative `BigNat`, sign zero iff magnitude zero,
//! decimal round-trip). [`ExactRatio`] adds a normalized rational on top for
//! the identities whose sides are genuine fractions.
//!
//! No floating point is used anywhere: every value is exact.

use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Signed, Zero};

/// Arbitrary-precision nonnegative integer.
pub type BigNat = num_bigint::BigUint;

/// Arbitrary-precision signed integer.
pub type BigInt = num_bigint::BigInt;

/// `n!` as an exact integer; `factorial(0) = 1`.
pub fn factorial(n: usize) -> BigNat {
    let mut product = BigNat::one();
    for i in 2..=n {
        product *= BigNat::from(i);
    }
    product
}

/// The falling factorial `n!/k!`, i.e. the product `n·(n-1)·…·(k+1)`.
///
/// Empty when `k >= n`. This is how the alternating subfactorial sum is
/// evaluated without ever leaving the integers.
pub fn falling_factorial(n: usize, k: usize) -> BigNat {
    let mut product = BigNat::one();
    for i in (k + 1)..=n {
        product *= BigNat::from(i);
    }
    product
}

/// Binomial coefficient `C(n, k)`, exactly; 0 when `k > n`.
///
/// Uses the multiplicative formula with a running exact division (each
/// prefix product of a row entry is divisible by the step index).
pub fn binomial(n: usize, k: usize) -> BigNat {
    if k > n {
        return BigNat::zero();
    }
    let k = k.min(n - k);
    let mut result = BigNat::one();
    for i in 1..=k {
        result = result * BigNat::from(n - k + i) / BigNat::from(i);
    }
    result
}

/// An exact rational number, always kept in lowest terms with a positive
/// denominator; zero is `0/1`. Equality is structural.
///
/// Serializes as `"<numerator>/<denominator>"` — the `/1` is kept for
/// integers so the wire form is uniform.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExactRatio(Ratio<BigInt>);

impl ExactRatio {
    /// Builds `numerator/denominator` and normalizes. Panics on a zero
    /// denominator, which no call site can produce from valid indices.
    pub fn new(numerator: BigInt, denominator: BigInt) -> Self {
        assert!(!denominator.is_zero(), "zero denominator");
        ExactRatio(Ratio::new(numerator, denominator))
    }

    pub fn from_integer(value: BigInt) -> Self {
        ExactRatio(Ratio::from_integer(value))
    }

    pub fn zero() -> Self {
        Self::from_integer(BigInt::zero())
    }

    pub fn one() -> Self {
        Self::from_integer(BigInt::one())
    }

    /// Numerator in lowest terms; carries the sign.
    pub fn numerator(&self) -> &BigInt {
        self.0.numer()
    }

    /// Denominator in lowest terms; always positive.
    pub fn denominator(&self) -> &BigInt {
        self.0.denom()
    }

    /// The integer value when the denominator is 1, `None` otherwise.
    pub fn as_integer(&self) -> Option<BigInt> {
        self.0.is_integer().then(|| self.0.to_integer())
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn abs(&self) -> Self {
        ExactRatio(self.0.abs())
    }
}

impl Add for ExactRatio {
    type Output = ExactRatio;

    fn add(self, rhs: ExactRatio) -> ExactRatio {
        ExactRatio(self.0 + rhs.0)
    }
}

impl Sub for ExactRatio {
    type Output = ExactRatio;

    fn sub(self, rhs: ExactRatio) -> ExactRatio {
        ExactRatio(self.0 - rhs.0)
    }
}

impl Neg for ExactRatio {
    type Output = ExactRatio;

    fn neg(self) -> ExactRatio {
        ExactRatio(-self.0)
    }
}

impl fmt::Display for ExactRatio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl fmt::Debug for ExactRatio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Parse error for [`ExactRatio`].
#[derive(Debug, PartialEq, Eq)]
pub struct ParseRatioError(String);

impl fmt::Display for ParseRatioError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid ratio literal: {}", self.0)
    }
}

impl std::error::Error for ParseRatioError {}

impl FromStr for ExactRatio {
    type Err = ParseRatioError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (num, den) = s
            .split_once('/')
            .ok_or_else(|| ParseRatioError(s.to_owned()))?;
        let numerator = BigInt::from_str(num).map_err(|_| ParseRatioError(s.to_owned()))?;
        let denominator = BigInt::from_str(den).map_err(|_| ParseRatioError(s.to_owned()))?;
        if denominator <= BigInt::zero() {
            return Err(ParseRatioError(s.to_owned()));
        }
        Ok(ExactRatio::new(numerator, denominator))
    }
}

/// Exact sum of two normalized ratios.
pub fn ratio_add(a: &ExactRatio, b: &ExactRatio) -> ExactRatio {
    a.clone() + b.clone()
}

/// `Some(v)` when `a` is the integer `v` (denominator 1 in lowest terms).
pub fn ratio_is_integer(a: &ExactRatio) -> Option<BigInt> {
    a.as_integer()
}

/// Exact integer quotient of `numerator / divisor`, or `None` when the
/// division leaves a remainder.
pub fn exact_div(numerator: &BigNat, divisor: &BigNat) -> Option<BigNat> {
    let (quot, rem) = numerator.div_rem(divisor);
    rem.is_zero().then_some(quot)
}
