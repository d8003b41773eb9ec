//! Exact distribution of the number of ones.
//!
//! A sequence with `m` ones at iteration `i` turns into one with `X ~ Bin(k m, p)`
//! ones at iteration `i + 1`, since zeros only ever produce zeros. The
//! distribution at iteration `i + 1` is therefore the product of the
//! `(k^(i+1) + 1) × (k^i + 1)` matrix `M[x][m] = C(k m, x) p^x q^(k m - x)` with
//! the distribution at iteration `i`. Only the matrix–vector products are
//! formed; the matrices themselves are never stored.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::numeric::{powu, CompensatedSum};
use crate::params::{RuleParams, SupportCap};

/// Probability vector over the number of ones `0..=k^i` at iteration `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct CountDistribution {
    iteration: u32,
    k: u32,
    probs: Vec<f64>,
}

impl CountDistribution {
    /// The seed sequence `(1)`: iteration 0, all mass on one 1.
    pub fn seed(k: u32) -> Self {
        CountDistribution {
            iteration: 0,
            k,
            probs: vec![0.0, 1.0],
        }
    }

    /// Wraps a probability vector, checking its length against `k^iteration + 1`.
    pub fn from_probs(iteration: u32, k: u32, probs: Vec<f64>) -> Result<Self> {
        let expected = (k as u128).checked_pow(iteration).map(|n| n + 1);
        if expected != Some(probs.len() as u128) {
            return Err(Error::invalid("probability vector length must be k^i + 1"));
        }
        if probs.iter().any(|&x| !(x >= 0.0)) {
            return Err(Error::invalid("probabilities must be non-negative"));
        }
        Ok(CountDistribution {
            iteration,
            k,
            probs,
        })
    }

    pub fn iteration(&self) -> u32 {
        self.iteration
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn into_probs(self) -> Vec<f64> {
        self.probs
    }

    /// `k^i + 1`.
    pub fn support_len(&self) -> usize {
        self.probs.len()
    }

    /// Sequence length `k^i`.
    pub fn sequence_len(&self) -> usize {
        self.probs.len() - 1
    }

    pub fn total_mass(&self) -> f64 {
        crate::numeric::sum(self.probs.iter().copied())
    }

    /// Interior and boundary local maxima: `x` with `P(x) > P(x-1)` (or
    /// `x = 0`) and `P(x) >= P(x+1)` (or `x` last).
    pub fn local_maxima(&self) -> Vec<usize> {
        let p = &self.probs;
        (0..p.len())
            .filter(|&x| {
                let left = x == 0 || p[x] > p[x - 1];
                let right = x + 1 == p.len() || p[x] >= p[x + 1];
                left && right && p[x] > 0.0
            })
            .collect()
    }

    /// Total-variation distance to another probability vector over the same
    /// support (missing entries count as zero).
    pub fn tv_distance(&self, other: &[f64]) -> f64 {
        let n = self.probs.len().max(other.len());
        let at = |v: &[f64], x: usize| v.get(x).copied().unwrap_or(0.0);
        0.5 * crate::numeric::sum((0..n).map(|x| libm::fabs(at(&self.probs, x) - at(other, x))))
    }
}

/// Binomial probabilities `C(n, x) p^x (1-p)^(n-x)` for `x = 0..=n`.
///
/// Built outward from the mode with the ratio recurrence and normalised with
/// a compensated sum, so the result sums to one to rounding and tails that
/// underflow are exactly zero.
pub fn binomial_pmf(n: usize, p: f64) -> Vec<f64> {
    let mut out = vec![0.0; n + 1];
    binomial_pmf_into(n, p, 0.0, &mut out);
    out
}

/// Writes the binomial pmf into `out[..=n]` and returns the index range
/// `[lo, hi]` that holds non-zero entries.
///
/// Entries smaller than `floor` times the mode are left at zero. They change
/// the normalising total by less than `n · floor` relative.
fn binomial_pmf_into(n: usize, p: f64, floor: f64, out: &mut [f64]) -> (usize, usize) {
    debug_assert!(out.len() > n);
    if p <= 0.0 || n == 0 {
        out[0] = 1.0;
        return (0, 0);
    }
    if p >= 1.0 {
        out[n] = 1.0;
        return (n, n);
    }
    let q = 1.0 - p;
    let up = p / q;
    let down = q / p;
    let mode = (libm::floor((n as f64 + 1.0) * p) as usize).min(n);

    out[mode] = 1.0;
    let mut total = CompensatedSum::new();
    total.add(1.0);

    let mut hi = mode;
    let mut v = 1.0;
    for x in mode..n {
        v *= (n - x) as f64 / (x + 1) as f64 * up;
        if v <= floor {
            break;
        }
        out[x + 1] = v;
        total.add(v);
        hi = x + 1;
    }
    let mut lo = mode;
    v = 1.0;
    for x in (1..=mode).rev() {
        v *= x as f64 / (n - x + 1) as f64 * down;
        if v <= floor {
            break;
        }
        out[x - 1] = v;
        total.add(v);
        lo = x - 1;
    }
    let norm = 1.0 / total.value();
    for e in &mut out[lo..=hi] {
        *e *= norm;
    }
    (lo, hi)
}

/// One substitution step: `new[x] = Σ_m prev[m] C(k m, x) p^x q^(k m - x)`.
pub fn step_distribution(
    prev: &CountDistribution,
    params: RuleParams,
    cap: SupportCap,
) -> Result<CountDistribution> {
    if prev.k != params.k() {
        return Err(Error::invalid("distribution and rule have different k"));
    }
    let len = cap.support_len(params.k(), prev.iteration + 1)?;
    let k = params.k() as usize;
    let p = params.p();

    let mut acc = vec![CompensatedSum::new(); len];
    let mut column = vec![0.0; len];
    for (m, &w) in prev.probs.iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        let n = k * m;
        // Below this the product `w · column[x]` is not a normal double.
        let floor = f64::MIN_POSITIVE / w;
        let (lo, hi) = binomial_pmf_into(n, p, floor, &mut column);
        for x in lo..=hi {
            acc[x].add(w * column[x]);
            column[x] = 0.0;
        }
    }
    Ok(CountDistribution {
        iteration: prev.iteration + 1,
        k: prev.k,
        probs: acc.iter().map(CompensatedSum::value).collect(),
    })
}

/// Distribution after `i` substitutions of the seed `(1)`.
pub fn distribution(i: u32, params: RuleParams) -> Result<CountDistribution> {
    distribution_with_cap(i, params, SupportCap::DEFAULT)
}

pub fn distribution_with_cap(
    i: u32,
    params: RuleParams,
    cap: SupportCap,
) -> Result<CountDistribution> {
    cap.support_len(params.k(), i)?;
    let mut d = CountDistribution::seed(params.k());
    for _ in 0..i {
        d = step_distribution(&d, params, cap)?;
    }
    Ok(d)
}

/// Every distribution from iteration 1 through `max_i`, sharing one chain.
pub fn distribution_chain(
    max_i: u32,
    params: RuleParams,
    cap: SupportCap,
) -> Result<Vec<CountDistribution>> {
    cap.support_len(params.k(), max_i)?;
    let mut out = Vec::with_capacity(max_i as usize);
    let mut d = CountDistribution::seed(params.k());
    for _ in 0..max_i {
        d = step_distribution(&d, params, cap)?;
        out.push(d.clone());
    }
    Ok(out)
}

/// Probability that the sequence is all zeros after `i` iterations, from
/// `P_(i+1)(0) = (P_i(0) p + q)^k` with `P_0(0) = 0`.
pub fn null_sequence_prob(i: u32, params: RuleParams) -> f64 {
    let (p, q, k) = (params.p(), params.q(), params.k());
    let mut x = 0.0;
    for _ in 0..i {
        x = powu(x * p + q, k);
    }
    x
}

const LIMIT_TOL: f64 = 1e-14;
const LIMIT_MAX_STEPS: usize = 1_000_000;

/// Extinction probability `φ(p, k)`, the smallest fixed point in `[0, 1]` of
/// `φ = (φ p + q)^k`.
///
/// Exactly 1 for `p <= 1/k`. Above the threshold the map `f(x) = (x p + q)^k - x`
/// is convex with `f(0) > 0`, so Newton's method started at 0 climbs
/// monotonically to the lowest root without overshooting it.
pub fn null_sequence_limit(params: RuleParams) -> Result<f64> {
    let (p, q, k) = (params.p(), params.q(), params.k());
    if params.kp() <= 1.0 {
        return Ok(1.0);
    }
    if q == 0.0 {
        return Ok(0.0);
    }
    let kf = k as f64;
    let mut x = 0.0_f64;
    for _ in 0..LIMIT_MAX_STEPS {
        let base = x * p + q;
        let g = powu(base, k - 1);
        let f = g * base - x;
        let df = kf * p * g - 1.0;
        if df >= 0.0 {
            // Only reachable through rounding when the root is (nearly) double.
            return Ok(x.min(1.0));
        }
        let next = (x - f / df).min(1.0);
        if !(next > x) || next - x < LIMIT_TOL {
            return Ok(next.max(x));
        }
        x = next;
    }
    Err(Error::NonConvergence {
        what: "null_sequence_limit",
        steps: LIMIT_MAX_STEPS,
    })
}

/// Percolation threshold `p_c(k) = 1/k`.
pub fn critical_probability(k: u32) -> Result<f64> {
    if k < 2 {
        return Err(Error::invalid("k must be at least 2"));
    }
    Ok(1.0 / k as f64)
}
