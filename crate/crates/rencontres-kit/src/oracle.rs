//! Ground truth by brute force: enumerate all of `S_n`, count permutations
//! by number of fixed points, and sample derangements uniformly.
//!
//! Everything here is deliberately naive. The enumeration exists to check
//! the formulas, so it shares no code with them; the sampler is rejection
//! from a uniform shuffle because that is trivially uniform. Randomness
//! comes from `ChaCha8Rng` seeded with a caller-supplied `u64`, so every
//! sampling run is reproducible.
//!
//! With the `parallel` feature the census fans the permutation space out
//! over rayon by first image; the merged counts are bit-identical to the
//! sequential path because they are exact `u64` sums.

use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::exact::BigNat;
use crate::{Error, Result};

/// Default cap on census enumeration; `10!` permutations enumerate in
/// seconds, each further step is another factor of `n`.
pub const DEFAULT_HORIZON: usize = 10;

/// Hard structural cap: census counts are `u64` and `21!` overflows.
pub const MAX_ENUMERABLE: usize = 20;

/// A permutation of `[n] = {1, …, n}`, stored as its image list:
/// `images[i]` is where `i + 1` is sent.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    /// Validates that `images` is a bijection on `[n]`.
    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &image in &images {
            if image == 0 || image > n {
                return Err(Error::Consistency(format!(
                    "image {image} outside [1, {n}]"
                )));
            }
            if seen[image - 1] {
                return Err(Error::Consistency(format!("image {image} repeated")));
            }
            seen[image - 1] = true;
        }
        Ok(Permutation { images })
    }

    pub fn identity(n: usize) -> Self {
        Permutation {
            images: (1..=n).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    /// Number of `k` with `σ(k) = k`.
    pub fn count_fixed_points(&self) -> usize {
        self.images
            .iter()
            .enumerate()
            .filter(|&(i, &image)| image == i + 1)
            .count()
    }

    pub fn is_derangement(&self) -> bool {
        self.count_fixed_points() == 0
    }
}

impl fmt::Display for Permutation {
    /// One-line image form: `"σ(1) σ(2) … σ(n)"`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for image in &self.images {
            if !first {
                write!(f, " ")?;
            }
            write!(f, "{image}")?;
            first = false;
        }
        Ok(())
    }
}

/// Exhaustive census of `S_n` by fixed-point count: `counts[r]` is the
/// number of permutations with exactly `r` fixed points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FixedPointCensus {
    pub n: usize,
    pub counts: Vec<u64>,
}

impl FixedPointCensus {
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn derangements(&self) -> u64 {
        self.counts[0]
    }

    /// CSV form with the `r,count` header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("r,count\n");
        for (r, count) in self.counts.iter().enumerate() {
            out.push_str(&format!("{r},{count}\n"));
        }
        out
    }
}

fn check_horizon(n: usize, horizon: usize) -> Result<()> {
    let effective = horizon.min(MAX_ENUMERABLE);
    if n > effective {
        return Err(Error::HorizonExceeded {
            n,
            horizon: effective,
        });
    }
    Ok(())
}

/// Counts fixed points over the subtree of permutations that share a fixed
/// image for position 1, descending positions left to right.
fn census_for_first_image(n: usize, first_image: usize) -> Vec<u64> {
    let mut counts = vec![0u64; n + 1];
    let used = 1u32 << (first_image - 1);
    let fixed = usize::from(first_image == 1);
    descend(n, 2, used, fixed, &mut counts);
    counts
}

fn descend(n: usize, position: usize, used: u32, fixed: usize, counts: &mut [u64]) {
    if position > n {
        counts[fixed] += 1;
        return;
    }
    let mut available = !used & ((1u32 << n) - 1);
    while available != 0 {
        let bit = available & available.wrapping_neg();
        let value = bit.trailing_zeros() as usize + 1;
        descend(
            n,
            position + 1,
            used | bit,
            fixed + usize::from(value == position),
            counts,
        );
        available ^= bit;
    }
}

fn merge(mut acc: Vec<u64>, counts: Vec<u64>) -> Vec<u64> {
    for (a, c) in acc.iter_mut().zip(counts) {
        *a += c;
    }
    acc
}

/// Single-threaded census; the reference path the parallel merge must
/// reproduce bit for bit.
pub fn enumerate_census_seq(n: usize, horizon: usize) -> Result<FixedPointCensus> {
    check_horizon(n, horizon)?;
    if n == 0 {
        // The empty permutation exists and has zero fixed points.
        return Ok(FixedPointCensus {
            n,
            counts: vec![1],
        });
    }
    let counts = (1..=n)
        .map(|j| census_for_first_image(n, j))
        .fold(vec![0u64; n + 1], merge);
    Ok(FixedPointCensus { n, counts })
}

/// Census with the permutation space partitioned over rayon by first image.
#[cfg(feature = "parallel")]
pub fn enumerate_census_par(n: usize, horizon: usize) -> Result<FixedPointCensus> {
    use rayon::prelude::*;
    check_horizon(n, horizon)?;
    if n == 0 {
        return Ok(FixedPointCensus {
            n,
            counts: vec![1],
        });
    }
    let counts = (1..=n)
        .into_par_iter()
        .map(|j| census_for_first_image(n, j))
        .reduce(|| vec![0u64; n + 1], merge);
    Ok(FixedPointCensus { n, counts })
}

/// Exact census of `S_n`, refusing any `n` past the horizon.
pub fn enumerate_census(n: usize, horizon: usize) -> Result<FixedPointCensus> {
    #[cfg(feature = "parallel")]
    {
        enumerate_census_par(n, horizon)
    }
    #[cfg(not(feature = "parallel"))]
    {
        enumerate_census_seq(n, horizon)
    }
}

/// `D_n` by exhaustive enumeration: the zero-fixed-point census bucket.
pub fn brute_derangement_count(n: usize, horizon: usize) -> Result<BigNat> {
    Ok(BigNat::from(enumerate_census(n, horizon)?.derangements()))
}

const SAMPLE_RETRY_CAP: usize = 1000;

/// Uniform random derangement of `[n]` drawn from `rng` by rejection:
/// Fisher-Yates shuffle, resample while any fixed point remains. The
/// expected number of attempts approaches `e`; the cap only guards a
/// broken generator.
pub fn sample_derangement_with<R: Rng>(n: usize, rng: &mut R) -> Result<Permutation> {
    if n < 2 {
        return Err(Error::IndexBelowMinimum {
            op: "sample_derangement",
            min: 2,
            n,
        });
    }
    let mut images: Vec<usize> = (1..=n).collect();
    for _ in 0..SAMPLE_RETRY_CAP {
        images.shuffle(rng);
        if images.iter().enumerate().all(|(i, &image)| image != i + 1) {
            return Ok(Permutation { images });
        }
    }
    Err(Error::Consistency(format!(
        "rejection sampler exceeded {SAMPLE_RETRY_CAP} attempts for n = {n}"
    )))
}

/// Deterministic single draw: seeds a fresh `ChaCha8Rng` with `seed`.
pub fn sample_derangement(n: usize, seed: u64) -> Result<Permutation> {
    sample_derangement_with(n, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// The documented reproducible generator for all sampling entry points.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
