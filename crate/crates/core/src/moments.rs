//! Closed-form moments of the count of ones.
//!
//! With `r = k p` and `G_i(r) = 1 + r + … + r^(i-1)` every quantity here is a
//! product of powers of `r` and `G_i`:
//!
//! * mean `r^i`
//! * variance `(1 - p) r^i G_i(r)`
//! * second moment `r^i (1 + (k - 1) p G_i(r))`
//! * dispersion `(1 - p) G_i(r)`
//!
//! Writing them through `G_i` removes the `0/0` at `p = 1/k` and keeps the
//! `k p > 1` branch sign-safe. Values too large for `f64` come back as `+inf`.

use crate::dist::CountDistribution;
use crate::error::{Error, Result};
use crate::numeric::{self, geometric_sum, ln_geometric_sum, powu, CompensatedSum};
use crate::params::RuleParams;

/// Mean, second moment and derived spread measures of a count distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentSummary {
    /// Number of symbols in the sequence.
    pub sequence_len: f64,
    pub mean: f64,
    pub second_moment: f64,
    pub variance: f64,
    pub std_dev: f64,
    /// Variance over mean; `None` when the mean is zero and no closed form
    /// applies.
    pub dispersion: Option<f64>,
    pub zeros_mean: f64,
    /// Expected ones over expected zeros; `+inf` when no zeros are expected.
    pub ones_zeros_ratio: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SecondMomentMethod {
    ClosedForm,
    Recurrence,
}

/// The variance grows like `(kp)^(2i)`; past this exponent it is evaluated in
/// the log domain.
const LOG_DOMAIN_EXPONENT: f64 = 700.0;

/// `E_i(X) = (k p)^i`, accumulated one factor at a time so that
/// `mean(i + 1) == k p * mean(i)` holds bit for bit.
pub fn mean(i: u32, params: RuleParams) -> f64 {
    let r = params.kp();
    let mut m = 1.0;
    for _ in 0..i {
        m *= r;
        if m == 0.0 || m.is_infinite() {
            break;
        }
    }
    m
}

pub fn second_moment(i: u32, params: RuleParams, method: SecondMomentMethod) -> f64 {
    match method {
        SecondMomentMethod::ClosedForm => {
            let r = params.kp();
            let g = geometric_sum(r, i);
            let k1p = (params.k() - 1) as f64 * params.p();
            mean(i, params) * (1.0 + k1p * g)
        }
        SecondMomentMethod::Recurrence => {
            // E_i(X²) = kp q E_(i-1)(X) + (kp)² E_(i-1)(X²), from E_0 = (1, 1).
            let r = params.kp();
            let a = r * params.q();
            let b = r * r;
            let (mut m1, mut m2) = (1.0, 1.0);
            for _ in 0..i {
                m2 = a * m1 + b * m2;
                m1 *= r;
            }
            m2
        }
    }
}

/// `VAR_i(p, k) = (1 - p) (kp)^i (1 - (kp)^i) / (1 - kp)`, continuously
/// extended to `p = 1/k` where it equals `(1 - 1/k) i`.
pub fn variance(i: u32, params: RuleParams) -> f64 {
    let (p, r) = (params.p(), params.kp());
    if i == 0 || p == 0.0 || p == 1.0 {
        return 0.0;
    }
    if r > 1.0 && 2.0 * i as f64 * libm::log(r) > LOG_DOMAIN_EXPONENT {
        let ln = libm::log1p(-p) + i as f64 * libm::log(r) + ln_geometric_sum(r, i);
        return libm::exp(ln);
    }
    (1.0 - p) * powu(r, i) * geometric_sum(r, i)
}

/// Index of dispersion `D_i = (1 - p)(1 - (kp)^i)/(1 - kp)`.
///
/// Defined by the closed form everywhere, so `D_i(0, k) = 1` even though the
/// mean vanishes there.
pub fn dispersion_index(i: u32, params: RuleParams) -> f64 {
    params.q() * geometric_sum(params.kp(), i)
}

/// Largest `p ∈ (0, 1)` at which `D_i(p, k)` falls through 1.
///
/// `D_i(0) = 1` and `D_i(1) = 0`; for `i >= 2` the index rises above 1 first and
/// comes back down close to `p = 1`, ever closer as `i` grows. The crossing is
/// bracketed on the points `1 - 2^-m`, then on a grid below 1/2, and bisected.
pub fn dispersion_unity_crossing(i: u32, k: u32) -> Result<f64> {
    if i < 2 {
        return Err(Error::invalid("dispersion crosses 1 only for i >= 2"));
    }
    let excess = |p: f64| dispersion_index(i, RuleParams::new(k, p).unwrap()) - 1.0;
    let dyadic = (1..=52).rev().map(|m| 1.0 - libm::ldexp(1.0, -m));
    let below_half = (1..500).map(|j| 0.5 - j as f64 * 1e-3);
    let mut upper = 1.0;
    for p in dyadic.chain(below_half) {
        if excess(p) > 0.0 {
            return numeric::bisect(excess, p, upper, 1e-15);
        }
        upper = p;
    }
    Err(Error::NoBracket("dispersion_unity_crossing"))
}

/// Expected number of zeros, `k^i (1 - p^i)`.
pub fn zeros_mean(i: u32, params: RuleParams) -> f64 {
    powu(params.k() as f64, i) * one_minus_pow(params.p(), i)
}

/// Ratio of expected ones to expected zeros, `p^i / (1 - p^i)`.
pub fn ones_zeros_ratio(i: u32, params: RuleParams) -> f64 {
    let denom = one_minus_pow(params.p(), i);
    if denom == 0.0 {
        return f64::INFINITY;
    }
    powu(params.p(), i) / denom
}

/// `p` at which the ones/zeros ratio equals one, `2^(-1/i)`.
pub fn ratio_unity_probability(i: u32) -> f64 {
    libm::pow(2.0, -1.0 / i as f64)
}

fn one_minus_pow(p: f64, i: u32) -> f64 {
    if p == 0.0 {
        1.0
    } else {
        -libm::expm1(i as f64 * libm::log(p))
    }
}

/// All closed-form moments at `(i, k, p)`.
pub fn summary(i: u32, params: RuleParams) -> MomentSummary {
    let var = variance(i, params);
    MomentSummary {
        sequence_len: powu(params.k() as f64, i),
        mean: mean(i, params),
        second_moment: second_moment(i, params, SecondMomentMethod::ClosedForm),
        variance: var,
        std_dev: libm::sqrt(var),
        dispersion: Some(dispersion_index(i, params)),
        zeros_mean: zeros_mean(i, params),
        ones_zeros_ratio: ones_zeros_ratio(i, params),
    }
}

/// Moments computed directly from a probability vector.
pub fn moments_from_distribution(dist: &CountDistribution) -> MomentSummary {
    let mut m1 = CompensatedSum::new();
    let mut m2 = CompensatedSum::new();
    for (x, &w) in dist.probs().iter().enumerate() {
        let x = x as f64;
        m1.add(x * w);
        m2.add(x * x * w);
    }
    let mean = m1.value();
    let second = m2.value();
    // Central form is better conditioned than second - mean².
    let var = numeric::sum(
        dist.probs()
            .iter()
            .enumerate()
            .map(|(x, &w)| (x as f64 - mean) * (x as f64 - mean) * w),
    );
    let len = dist.sequence_len() as f64;
    from_parts(len, mean, second, var)
}

/// Moments of a length-`len` Bernoulli(p) sequence, i.e. of `Bin(len, p)`.
pub fn bernoulli_moments(len: u64, p: f64) -> Result<MomentSummary> {
    if len == 0 {
        return Err(Error::invalid("sequence length must be at least 1"));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::invalid("p must lie in [0, 1]"));
    }
    let n = len as f64;
    let mean = n * p;
    let second = n * p * (1.0 + (n - 1.0) * p);
    let var = n * p * (1.0 - p);
    Ok(from_parts(n, mean, second, var))
}

fn from_parts(len: f64, mean: f64, second: f64, var: f64) -> MomentSummary {
    let zeros = len - mean;
    MomentSummary {
        sequence_len: len,
        mean,
        second_moment: second,
        variance: var,
        std_dev: libm::sqrt(var),
        dispersion: (mean > 0.0).then(|| var / mean),
        zeros_mean: zeros,
        ones_zeros_ratio: if zeros > 0.0 {
            mean / zeros
        } else {
            f64::INFINITY
        },
    }
}
