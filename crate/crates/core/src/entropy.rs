//! Ensemble entropy of the generated sequences.
//!
//! A length-`n` sequence with `j` ones is scored by the binary entropy of its
//! frequency of ones, `H(j) = -(j/n) log2(j/n) - (1 - j/n) log2(1 - j/n)`. The
//! mean entropy at iteration `i` weights these scores by the exact count
//! distribution.

use alloc::vec::Vec;

use crate::dist::{self, binomial_pmf, CountDistribution};
use crate::error::{Error, Result};
use crate::extrema;
use crate::moments;
use crate::numeric::{self, CompensatedSum};
use crate::params::{RuleParams, SupportCap};

/// Frequency entropy of a length-`n` binary sequence with `j` ones, in bits.
pub fn sequence_entropy(j: u64, n: u64) -> Result<f64> {
    if n == 0 || j > n {
        return Err(Error::invalid(alloc::format!(
            "need 0 <= j <= n and n >= 1, got j = {j}, n = {n}"
        )));
    }
    Ok(frequency_entropy(j, n))
}

fn frequency_entropy(j: u64, n: u64) -> f64 {
    if j == 0 || j == n {
        return 0.0;
    }
    let n = n as f64;
    let ones = j as f64 / n;
    let zeros = (n - j as f64) / n;
    // Written symmetrically in (ones, zeros) so H(j) == H(n - j) exactly.
    -(ones * libm::log2(ones)) - zeros * libm::log2(zeros)
}

/// Entropies `H(j)` for every possible number of ones `j = 0..=k^i`.
#[derive(Debug, Clone, PartialEq)]
pub struct EntropyVector {
    iteration: u32,
    k: u32,
    values: Vec<f64>,
}

impl EntropyVector {
    pub fn new(i: u32, k: u32, cap: SupportCap) -> Result<Self> {
        let len = cap.support_len(k, i)?;
        let n = (len - 1) as u64;
        Ok(EntropyVector {
            iteration: i,
            k,
            values: (0..=n).map(|j| frequency_entropy(j, n)).collect(),
        })
    }

    pub fn iteration(&self) -> u32 {
        self.iteration
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Expected entropy under `dist`.
    pub fn dot(&self, dist: &CountDistribution) -> Result<f64> {
        if dist.support_len() != self.values.len() {
            return Err(Error::invalid(
                "entropy vector and distribution differ in length",
            ));
        }
        Ok(numeric::sum(
            self.values.iter().zip(dist.probs()).map(|(h, w)| h * w),
        ))
    }
}

/// Mean entropy of a distribution over `0..=n` ones, `n = dist.sequence_len()`.
pub fn mean_entropy_of(dist: &CountDistribution) -> f64 {
    let n = dist.sequence_len() as u64;
    let mut acc = CompensatedSum::new();
    for (j, &w) in dist.probs().iter().enumerate() {
        if w != 0.0 {
            acc.add(w * frequency_entropy(j as u64, n));
        }
    }
    acc.value()
}

/// `H_i(p)`: entropy vector times the exact distribution at iteration `i`.
pub fn mean_entropy(i: u32, params: RuleParams) -> Result<f64> {
    mean_entropy_with_cap(i, params, SupportCap::DEFAULT)
}

pub fn mean_entropy_with_cap(i: u32, params: RuleParams, cap: SupportCap) -> Result<f64> {
    let d = dist::distribution_with_cap(i, params, cap)?;
    Ok(mean_entropy_of(&d))
}

/// `[H_1(p), …, H_max_i(p)]` from a single distribution chain.
pub fn mean_entropy_series(max_i: u32, params: RuleParams, cap: SupportCap) -> Result<Vec<f64>> {
    Ok(dist::distribution_chain(max_i, params, cap)?
        .iter()
        .map(mean_entropy_of)
        .collect())
}

/// Mean entropy of Bernoulli(p) sequences of length `len`.
pub fn bernoulli_mean_entropy(len: u64, p: f64) -> Result<f64> {
    if len == 0 {
        return Err(Error::invalid("sequence length must be at least 1"));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::invalid("p must lie in [0, 1]"));
    }
    let pmf = binomial_pmf(len as usize, p);
    Ok(numeric::sum(
        pmf.iter()
            .enumerate()
            .map(|(j, &w)| w * frequency_entropy(j as u64, len)),
    ))
}

/// `h_i(p) = H_(i+1)(p) - H_i(p)`.
pub fn differential_entropy(i: u32, params: RuleParams) -> Result<f64> {
    differential_entropy_with_cap(i, params, SupportCap::DEFAULT)
}

pub fn differential_entropy_with_cap(i: u32, params: RuleParams, cap: SupportCap) -> Result<f64> {
    cap.support_len(params.k(), i + 1)?;
    let d = dist::distribution_with_cap(i, params, cap)?;
    let next = dist::step_distribution(&d, params, cap)?;
    Ok(mean_entropy_of(&next) - mean_entropy_of(&d))
}

/// Entropy per symbol, `H_i(p) / k^i`.
pub fn entropy_per_digit(i: u32, params: RuleParams) -> Result<f64> {
    let h = mean_entropy(i, params)?;
    Ok(h / numeric::powu(params.k() as f64, i))
}

/// Grid resolution and size cap for the scan-and-refine searches.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchConfig {
    pub grid_step: f64,
    pub cap: SupportCap,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            grid_step: 1e-3,
            cap: SupportCap::DEFAULT,
        }
    }
}

impl SearchConfig {
    fn grid(&self) -> impl Iterator<Item = f64> + '_ {
        let n = libm::round(1.0 / self.grid_step) as usize;
        (1..n).map(move |m| m as f64 / n as f64)
    }
}

/// Location where `h_i` turns from negative to positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignChange {
    /// The largest crossing found.
    pub p: f64,
    /// Number of negative-to-positive crossings seen at grid resolution.
    pub crossings: usize,
}

/// `p_ch(i)`: grid scan of `h_i` over `(0, 1)` then bisection to `1e-9`.
pub fn differential_sign_change(i: u32, k: u32) -> Result<SignChange> {
    differential_sign_change_with(i, k, &SearchConfig::default())
}

pub fn differential_sign_change_with(i: u32, k: u32, config: &SearchConfig) -> Result<SignChange> {
    if i < 1 {
        return Err(Error::invalid("differential entropy needs i >= 1"));
    }
    let base = RuleParams::new(k, 0.5)?;
    let h =
        |p: f64| -> Result<f64> { differential_entropy_with_cap(i, base.with_p(p)?, config.cap) };

    let mut crossings = 0;
    let mut last: Option<(f64, f64)> = None;
    let mut bracket = None;
    for p in config.grid() {
        let v = h(p)?;
        if let Some((p0, v0)) = last {
            if v0 < 0.0 && v >= 0.0 {
                crossings += 1;
                bracket = Some((p0, p));
            }
        }
        last = Some((p, v));
    }
    let (lo, hi) = bracket.ok_or(Error::NoBracket("differential_sign_change"))?;
    let p = numeric::bisect(|p| h(p).unwrap_or(f64::NAN), lo, hi, 1e-12)?;
    Ok(SignChange { p, crossings })
}

/// One sample of an entropy–variance curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HVarPoint {
    pub p: f64,
    pub variance: f64,
    pub entropy: f64,
}

/// The parametric curve `p -> (VAR_i(p), H_i(p))` sampled on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct HVarCurve {
    pub iteration: u32,
    pub k: u32,
    pub points: Vec<HVarPoint>,
    /// Parameter of the point farthest from the origin (raw axes).
    pub p_r: f64,
}

/// How distances on the (VAR, H) plane are measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Axes {
    /// Raw units; the variance dominates.
    #[default]
    Raw,
    /// Each coordinate divided by its maximum over the sampled grid.
    Normalized,
}

pub fn hvar_curve(i: u32, k: u32, p_grid: &[f64]) -> Result<HVarCurve> {
    hvar_curve_with_cap(i, k, p_grid, SupportCap::DEFAULT)
}

pub fn hvar_curve_with_cap(i: u32, k: u32, p_grid: &[f64], cap: SupportCap) -> Result<HVarCurve> {
    if p_grid.is_empty() {
        return Err(Error::invalid("p grid is empty"));
    }
    if p_grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::invalid("p grid must be strictly increasing"));
    }
    cap.support_len(k, i)?;
    let mut points = Vec::with_capacity(p_grid.len());
    for &p in p_grid {
        let params = RuleParams::new(k, p)?;
        points.push(HVarPoint {
            p,
            variance: moments::variance(i, params),
            entropy: mean_entropy_with_cap(i, params, cap)?,
        });
    }
    let mut curve = HVarCurve {
        iteration: i,
        k,
        points,
        p_r: 0.0,
    };
    curve.p_r = farthest_point(&curve, Axes::Raw);
    Ok(curve)
}

/// `p_r`: the parameter maximising `VAR² + H²` over the sampled curve, refined
/// by golden-section search between the neighbours of the best grid point.
pub fn farthest_point(curve: &HVarCurve, axes: Axes) -> f64 {
    let pts = &curve.points;
    if pts.len() == 1 {
        return pts[0].p;
    }
    let (sv, sh) = match axes {
        Axes::Raw => (1.0, 1.0),
        Axes::Normalized => {
            let mv = pts.iter().map(|x| x.variance).fold(0.0, f64::max);
            let mh = pts.iter().map(|x| x.entropy).fold(0.0, f64::max);
            (
                if mv > 0.0 { 1.0 / mv } else { 1.0 },
                if mh > 0.0 { 1.0 / mh } else { 1.0 },
            )
        }
    };
    let dist2 = |v: f64, h: f64| (v * sv) * (v * sv) + (h * sh) * (h * sh);

    let mut best = 0;
    for (idx, pt) in pts.iter().enumerate() {
        if dist2(pt.variance, pt.entropy) > dist2(pts[best].variance, pts[best].entropy) {
            best = idx;
        }
    }
    let best_val = dist2(pts[best].variance, pts[best].entropy);
    let lo = pts[best.saturating_sub(1)].p;
    let hi = pts[(best + 1).min(pts.len() - 1)].p;
    let eval = |p: f64| -> f64 {
        let Ok(params) = RuleParams::new(curve.k, p) else {
            return f64::NEG_INFINITY;
        };
        match mean_entropy(curve.iteration, params) {
            Ok(h) => dist2(moments::variance(curve.iteration, params), h),
            Err(_) => f64::NEG_INFINITY,
        }
    };
    let refined = numeric::golden_max(eval, lo, hi, 1e-10);
    if eval(refined) > best_val {
        refined
    } else {
        pts[best].p
    }
}

/// Distance from an extremum below which a reference point has no partner.
const DEGENERATE_GAP: f64 = 1e-6;

/// `p` other than `p_ref` with the same variance, on the other side of the
/// variance maximum.
pub fn match_variance(i: u32, k: u32, p_ref: f64) -> Result<f64> {
    let base = RuleParams::new(k, p_ref)?;
    if i == 0 {
        return Err(Error::invalid("variance is identically zero at i = 0"));
    }
    let peak = if i == 1 {
        0.5
    } else {
        extrema::variance_argmax(i, k)?
    };
    let target = moments::variance(i, base);
    let f = |p: f64| moments::variance(i, base.with_p(p).unwrap()) - target;
    partner(p_ref, peak, f)
}

/// `p` other than `p_ref` with the same mean entropy, on the other side of the
/// entropy maximum.
pub fn match_entropy(i: u32, k: u32, p_ref: f64) -> Result<f64> {
    let base = RuleParams::new(k, p_ref)?;
    let peak = entropy_argmax(i, k)?;
    let target = mean_entropy(i, base)?;
    let f = |p: f64| mean_entropy(i, base.with_p(p).unwrap()).unwrap_or(f64::NAN) - target;
    partner(p_ref, peak, f)
}

fn partner<F: FnMut(f64) -> f64>(p_ref: f64, peak: f64, mut f: F) -> Result<f64> {
    if libm::fabs(p_ref - peak) < DEGENERATE_GAP {
        return Err(Error::NoDistinctPartner {
            p_ref,
            extremum: peak,
        });
    }
    let (lo, hi) = if p_ref < peak {
        (peak, 1.0)
    } else {
        (0.0, peak)
    };
    // Both ends are evaluated explicitly so an endpoint that is itself the
    // partner (p_ref = 0 <-> 1) is returned rather than rejected.
    let (f_lo, f_hi) = (f(lo), f(hi));
    if f_lo == 0.0 && lo != peak {
        return Ok(lo);
    }
    if f_hi == 0.0 && hi != peak {
        return Ok(hi);
    }
    numeric::bisect(f, lo, hi, 0.0)
}

/// Maximiser of `H_i(p)` over `[0, 1]`.
pub fn entropy_argmax(i: u32, k: u32) -> Result<f64> {
    let base = RuleParams::new(k, 0.5)?;
    SupportCap::DEFAULT.support_len(k, i)?;
    let h = |p: f64| mean_entropy(i, base.with_p(p).unwrap()).unwrap_or(f64::NEG_INFINITY);
    Ok(numeric::grid_golden_max(h, 0.0, 1.0, 1e-2))
}
