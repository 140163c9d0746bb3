//! One checker per derangement identity.
//!
//! Each checker evaluates both sides of its identity with exact arithmetic
//! at every requested parameter point and reports whether they are equal.
//! Both sides are always materialized as [`ExactRatio`], even when they are
//! integers, so every report compares the same way and serializes the same
//! way.
//!
//! Checkers clamp the requested `n_min` up to their own admissible minimum
//! instead of erroring, so one range can drive the whole suite; `run_all`
//! records a notice whenever that happens. Distinct parameter points are
//! independent and evaluate in parallel under the `parallel` feature, with
//! reports always returned in ascending parameter order.

use num_traits::One;

use crate::exact::{binomial, exact_div, falling_factorial, BigInt, BigNat, ExactRatio};
use crate::sequences::SequenceCache;
use crate::{ordered_map, Error, Result};

/// Which identity a report belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum IdentityId {
    /// `n! = Σ_{k=0}^{n} D_n(k)` — the rencontres row sums to `n!`.
    RowSum,
    /// `D_n = Σ_{k=2}^{n} (k-1)·C(n,k)·D_{n-k}` (Deutsch-Elizalde).
    DeutschElizalde,
    /// `D_n = Σ_{k=2}^{n} (k-1)·D_n(k)` — the same sum read off the row.
    WeightedRencontres,
    /// `n! + Σ_{k=2}^{n} (n!/k!)·D_k = D_{n+2}/(n+1)`.
    Prototype,
    /// `1 + Σ_{k=1}^{n} D_k/k! = D_{n+2}/(n+1)!`.
    Thm1,
    /// `1 + Σ_{k=1}^{n} (-1)^k·D_{k+3}/(k+2) = (-1)^n·D_{n+2}`.
    Thm2,
    /// The rencontres generalization of `Thm1`, parameterized by `r`.
    Thm1General,
    /// The rencontres generalization of `Thm2`, parameterized by `r`.
    Thm2General,
    /// `D_n - n·D_{n-1} = (-1)^n` — the difference with `D_n(1)` alternates.
    D1Difference,
}

impl IdentityId {
    /// All checkers, in the order `run_all` executes them.
    pub const ALL: [IdentityId; 9] = [
        IdentityId::RowSum,
        IdentityId::DeutschElizalde,
        IdentityId::WeightedRencontres,
        IdentityId::Prototype,
        IdentityId::Thm1,
        IdentityId::Thm2,
        IdentityId::Thm1General,
        IdentityId::Thm2General,
        IdentityId::D1Difference,
    ];

    /// Stable tag used in reports and on the command line.
    pub fn tag(self) -> &'static str {
        match self {
            IdentityId::RowSum => "row_sum",
            IdentityId::DeutschElizalde => "deutsch_elizalde",
            IdentityId::WeightedRencontres => "weighted_rencontres",
            IdentityId::Prototype => "prototype",
            IdentityId::Thm1 => "thm1",
            IdentityId::Thm2 => "thm2",
            IdentityId::Thm1General => "thm1_general",
            IdentityId::Thm2General => "thm2_general",
            IdentityId::D1Difference => "d1_difference",
        }
    }

    pub fn from_tag(tag: &str) -> Option<IdentityId> {
        IdentityId::ALL.into_iter().find(|id| id.tag() == tag)
    }

    /// Smallest `n` the identity is stated for; checkers clamp up to this.
    pub fn min_n(self) -> usize {
        match self {
            IdentityId::RowSum => 0,
            IdentityId::DeutschElizalde
            | IdentityId::WeightedRencontres
            | IdentityId::Prototype => 2,
            IdentityId::Thm1
            | IdentityId::Thm2
            | IdentityId::Thm1General
            | IdentityId::Thm2General
            | IdentityId::D1Difference => 1,
        }
    }

    /// Whether the identity carries the rencontres parameter `r`.
    pub fn is_generalized(self) -> bool {
        matches!(self, IdentityId::Thm1General | IdentityId::Thm2General)
    }
}

impl std::fmt::Display for IdentityId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.tag())
    }
}

/// Parameter range a checker sweeps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RangeSpec {
    pub n_min: usize,
    pub n_max: usize,
    /// `r` values for the generalized identities; ignored by the others.
    pub r_values: Vec<usize>,
}

impl RangeSpec {
    pub fn new(n_min: usize, n_max: usize, r_values: Vec<usize>) -> Result<Self> {
        if n_min > n_max {
            return Err(Error::Consistency(format!(
                "invalid range: n_min = {n_min} > n_max = {n_max}"
            )));
        }
        Ok(RangeSpec {
            n_min,
            n_max,
            r_values,
        })
    }

    pub fn up_to(n_max: usize) -> Self {
        RangeSpec {
            n_max,
            ..RangeSpec::default()
        }
    }
}

impl Default for RangeSpec {
    /// The default verification horizon: `n` up to 200, `r` in `{0,1,2,3}`.
    fn default() -> Self {
        RangeSpec {
            n_min: 0,
            n_max: 200,
            r_values: vec![0, 1, 2, 3],
        }
    }
}

/// Outcome of evaluating one identity at one parameter point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdentityReport {
    pub identity_id: IdentityId,
    pub n: usize,
    /// Present only for the generalized identities.
    pub r: Option<usize>,
    pub lhs: ExactRatio,
    pub rhs: ExactRatio,
    pub holds: bool,
}

impl IdentityReport {
    fn new(identity_id: IdentityId, n: usize, r: Option<usize>, lhs: ExactRatio, rhs: ExactRatio) -> Self {
        let holds = lhs == rhs;
        IdentityReport {
            identity_id,
            n,
            r,
            lhs,
            rhs,
            holds,
        }
    }

    /// One JSON object per report, the machine-readable output format.
    pub fn to_json_line(&self) -> String {
        serde_json::json!({
            "identity_id": self.identity_id.tag(),
            "n": self.n,
            "r": self.r,
            "lhs": self.lhs.to_string(),
            "rhs": self.rhs.to_string(),
            "holds": self.holds,
        })
        .to_string()
    }
}

fn int_ratio(value: BigNat) -> ExactRatio {
    ExactRatio::from_integer(BigInt::from(value))
}

fn signed(negative: bool, magnitude: BigNat) -> BigInt {
    let v = BigInt::from(magnitude);
    if negative {
        -v
    } else {
        v
    }
}

/// `(-1)^n` as a ratio.
fn unit_sign(n: usize) -> ExactRatio {
    ExactRatio::from_integer(signed(n % 2 == 1, BigNat::one()))
}

fn row_sum_point(cache: &SequenceCache, n: usize) -> IdentityReport {
    let lhs = int_ratio(cache.factorial(n));
    let rhs = int_ratio((0..=n).map(|k| cache.rencontres(n, k)).sum());
    IdentityReport::new(IdentityId::RowSum, n, None, lhs, rhs)
}

fn deutsch_elizalde_point(cache: &SequenceCache, n: usize) -> IdentityReport {
    let lhs = int_ratio(cache.derangement(n));
    let rhs = int_ratio(
        (2..=n)
            .map(|k| BigNat::from(k - 1) * binomial(n, k) * cache.derangement(n - k))
            .sum(),
    );
    IdentityReport::new(IdentityId::DeutschElizalde, n, None, lhs, rhs)
}

fn weighted_rencontres_point(cache: &SequenceCache, n: usize) -> IdentityReport {
    let lhs = int_ratio(cache.derangement(n));
    let rhs = int_ratio(
        (2..=n)
            .map(|k| BigNat::from(k - 1) * cache.rencontres(n, k))
            .sum(),
    );
    IdentityReport::new(IdentityId::WeightedRencontres, n, None, lhs, rhs)
}

fn prototype_point(cache: &SequenceCache, n: usize) -> Result<IdentityReport> {
    let sum: BigNat = (2..=n)
        .map(|k| falling_factorial(n, k) * cache.derangement(k))
        .sum();
    let lhs = int_ratio(cache.factorial(n) + sum);
    let rhs = int_ratio(cache.a_number(n + 2)?);
    Ok(IdentityReport::new(IdentityId::Prototype, n, None, lhs, rhs))
}

fn thm1_point(cache: &SequenceCache, n: usize) -> IdentityReport {
    let mut lhs = ExactRatio::one();
    for k in 1..=n {
        lhs = lhs
            + ExactRatio::new(
                BigInt::from(cache.derangement(k)),
                BigInt::from(cache.factorial(k)),
            );
    }
    let rhs = ExactRatio::new(
        BigInt::from(cache.derangement(n + 2)),
        BigInt::from(cache.factorial(n + 1)),
    );
    IdentityReport::new(IdentityId::Thm1, n, None, lhs, rhs)
}

fn thm2_point(cache: &SequenceCache, n: usize) -> Result<IdentityReport> {
    let mut lhs = ExactRatio::one();
    for k in 1..=n {
        let numerator = cache.derangement(k + 3);
        let quotient = exact_div(&numerator, &BigNat::from(k + 2)).ok_or_else(|| {
            Error::Consistency(format!(
                "(k+2) = {} does not divide D_{} = {numerator}",
                k + 2,
                k + 3
            ))
        })?;
        lhs = lhs + ExactRatio::from_integer(signed(k % 2 == 1, quotient));
    }
    let rhs = ExactRatio::from_integer(signed(n % 2 == 1, cache.derangement(n + 2)));
    Ok(IdentityReport::new(IdentityId::Thm2, n, None, lhs, rhs))
}

fn thm1_general_point(cache: &SequenceCache, n: usize, r: usize) -> IdentityReport {
    let mut lhs = ExactRatio::one();
    for k in 1..=n {
        lhs = lhs
            + ExactRatio::new(
                BigInt::from(cache.rencontres(k + r, r)),
                BigInt::from(cache.factorial(k) * binomial(k + r, r)),
            );
    }
    let rhs = ExactRatio::new(
        BigInt::from(cache.rencontres(n + r + 2, r)),
        BigInt::from(cache.factorial(n + 1) * binomial(n + r + 2, r)),
    );
    IdentityReport::new(IdentityId::Thm1General, n, Some(r), lhs, rhs)
}

fn thm2_general_point(cache: &SequenceCache, n: usize, r: usize) -> Result<IdentityReport> {
    let mut lhs = ExactRatio::one();
    for k in 1..=n {
        let term = ExactRatio::new(
            signed(k % 2 == 1, cache.rencontres(k + r + 3, r)),
            BigInt::from(BigNat::from(k + 2) * binomial(k + r + 3, r)),
        );
        if !term.is_integer() {
            return Err(Error::Consistency(format!(
                "term k = {k} of thm2_general at n = {n}, r = {r} is not an integer: {term}"
            )));
        }
        lhs = lhs + term;
    }
    let rhs = ExactRatio::new(
        signed(n % 2 == 1, cache.rencontres(n + r + 2, r)),
        BigInt::from(binomial(n + r + 2, r)),
    );
    if !rhs.is_integer() {
        return Err(Error::Consistency(format!(
            "rhs of thm2_general at n = {n}, r = {r} is not an integer: {rhs}"
        )));
    }
    Ok(IdentityReport::new(IdentityId::Thm2General, n, Some(r), lhs, rhs))
}

fn d1_difference_point(cache: &SequenceCache, n: usize) -> IdentityReport {
    let d_n = BigInt::from(cache.derangement(n));
    let n_d_prev = BigInt::from(BigNat::from(n) * cache.derangement(n - 1));
    let lhs = ExactRatio::from_integer(d_n - n_d_prev);
    IdentityReport::new(IdentityId::D1Difference, n, None, lhs, unit_sign(n))
}

/// Evaluates one identity over a range, clamping `n_min` up to the
/// identity's admissible minimum. Reports come back in ascending `(n, r)`
/// order, one per parameter point.
pub fn check(id: IdentityId, cache: &SequenceCache, range: &RangeSpec) -> Result<Vec<IdentityReport>> {
    let lo = range.n_min.max(id.min_n());
    let ns: Vec<usize> = (lo..=range.n_max).collect();

    // Pre-extend the memo tables so the parallel sweep only takes read locks.
    let r_max = range.r_values.iter().copied().max().unwrap_or(0);
    cache.ensure(range.n_max + 3, range.n_max + r_max + 2);

    match id {
        IdentityId::RowSum => Ok(ordered_map(ns, |n| row_sum_point(cache, n))),
        IdentityId::DeutschElizalde => Ok(ordered_map(ns, |n| deutsch_elizalde_point(cache, n))),
        IdentityId::WeightedRencontres => {
            Ok(ordered_map(ns, |n| weighted_rencontres_point(cache, n)))
        }
        IdentityId::Prototype => ordered_map(ns, |n| prototype_point(cache, n))
            .into_iter()
            .collect(),
        IdentityId::Thm1 => Ok(ordered_map(ns, |n| thm1_point(cache, n))),
        IdentityId::Thm2 => ordered_map(ns, |n| thm2_point(cache, n))
            .into_iter()
            .collect(),
        IdentityId::Thm1General => {
            let points = points_with_r(&ns, &range.r_values);
            Ok(ordered_map(points, |(n, r)| thm1_general_point(cache, n, r)))
        }
        IdentityId::Thm2General => {
            let points = points_with_r(&ns, &range.r_values);
            ordered_map(points, |(n, r)| thm2_general_point(cache, n, r))
                .into_iter()
                .collect()
        }
        IdentityId::D1Difference => Ok(ordered_map(ns, |n| d1_difference_point(cache, n))),
    }
}

fn points_with_r(ns: &[usize], r_values: &[usize]) -> Vec<(usize, usize)> {
    let mut rs: Vec<usize> = r_values.to_vec();
    rs.sort_unstable();
    rs.dedup();
    ns.iter()
        .flat_map(|&n| rs.iter().map(move |&r| (n, r)))
        .collect()
}

/// Aggregate of a full verification run.
#[derive(Debug)]
pub struct RunSummary {
    /// Every report, grouped by checker in [`IdentityId::ALL`] order.
    pub reports: Vec<IdentityReport>,
    /// One notice per checker whose minimum clipped the requested range.
    pub notices: Vec<String>,
    pub checked: usize,
    pub failed: usize,
}

/// Runs every checker over `range` and aggregates the reports.
///
/// Internal-consistency errors (an always-integral term coming out
/// fractional) propagate; a plain `holds = false` does not.
pub fn run_all(cache: &SequenceCache, range: &RangeSpec) -> Result<RunSummary> {
    let mut reports = Vec::new();
    let mut notices = Vec::new();
    for id in IdentityId::ALL {
        if range.n_min < id.min_n() {
            notices.push(format!(
                "identity {}: n_min clamped up to {}",
                id.tag(),
                id.min_n()
            ));
        }
        reports.extend(check(id, cache, range)?);
    }
    let checked = reports.len();
    let failed = reports.iter().filter(|report| !report.holds).count();
    Ok(RunSummary {
        reports,
        notices,
        checked,
        failed,
    })
}
