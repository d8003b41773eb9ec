//! Location of the variance maximum and its dependence on the iteration.
//!
//! Writing the variance as `VAR_i = (1 - p) Σ_{j=i}^{2i-1} (kp)^j` gives
//!
//! ```text
//! p · dVAR_i/dp = (kp)^i · r_{k,i}(p),
//! r_{k,i}(p) = Σ_{m=0}^{i-1} (kp)^m ((i + m) - (i + m + 1) p)
//!            = i + Σ_{j=1}^{i-1} (i + j)(k - 1) k^(j-1) p^j - 2 i k^(i-1) p^i,
//! ```
//!
//! so the maximiser `p_m` is the unique root of `r_{k,i}` in `(0, 1)`. For
//! `k = 2` the coefficients reduce to `(i + j) 2^(j-1)` and `-i 2^i`.
//!
//! Across iterations `p_m(i)` follows `1 / (1 + α / (α + (i - 1)^β))` closely;
//! [`fit_root_curve`] estimates `(α, β)` for a given `k`.

use alloc::vec::Vec;
use core::ops::RangeInclusive;

use crate::error::{Error, Result};
use crate::moments;
use crate::numeric::{self, CompensatedSum};
use crate::optimize::{nelder_mead, NelderMeadOptions};
use crate::params::RuleParams;

/// `r_{k,i}(p)` by Horner's rule on its monomial coefficients.
///
/// Exact for small `i`; for large `i` and `kp > 1` the value leaves `f64`
/// range, use [`derivative_residual`] there.
pub fn variance_derivative_poly(i: u32, k: u32, p: f64) -> f64 {
    let kf = k as f64;
    let ii = i as f64;
    // Coefficients c_0..c_i, highest first for Horner.
    let mut acc = -2.0 * ii * numeric::powu(kf, i - 1);
    for j in (1..i).rev() {
        let c = (ii + j as f64) * (kf - 1.0) * numeric::powu(kf, j - 1);
        acc = acc * p + c;
    }
    acc * p + ii
}

/// Terms of `r_{k,i}(p)` in its `Σ (kp)^m (...)` form, each divided by
/// `max(1, kp)^(i-1)` so none overflows. Returns `(Σ terms, Σ |terms|)`.
fn scaled_derivative(i: u32, k: u32, p: f64) -> (f64, f64) {
    let r = k as f64 * p;
    let top = i - 1;
    let mut sum = CompensatedSum::new();
    let mut abs = CompensatedSum::new();
    for m in 0..i {
        let weight = if r > 1.0 {
            libm::exp((m as f64 - top as f64) * libm::log(r))
        } else {
            numeric::powu(r, m)
        };
        let t = weight * ((i + m) as f64 - (i + m + 1) as f64 * p);
        sum.add(t);
        abs.add(libm::fabs(t));
    }
    (sum.value(), abs.value())
}

/// `|r_{k,i}(p)| / Σ|terms|`: the root residual relative to the size of the
/// terms being cancelled.
pub fn derivative_residual(i: u32, k: u32, p: f64) -> f64 {
    let (s, a) = scaled_derivative(i, k, p);
    if a == 0.0 {
        0.0
    } else {
        libm::fabs(s) / a
    }
}

/// `d ln VAR_i / dp = -1/(1-p) + i/p + k G_i'(kp) / G_i(kp)` where
/// `G_i(r) = Σ_{j<i} r^j`.
pub fn log_variance_slope(i: u32, k: u32, p: f64) -> f64 {
    if p <= 0.0 {
        return f64::INFINITY;
    }
    if p >= 1.0 {
        return f64::NEG_INFINITY;
    }
    let r = k as f64 * p;
    let top = (i - 1) as f64;
    let mut num = CompensatedSum::new();
    let mut den = CompensatedSum::new();
    for j in 0..i {
        // r^j scaled by r^-(i-1) when r > 1.
        let w = if r > 1.0 {
            libm::exp((j as f64 - top) * libm::log(r))
        } else {
            numeric::powu(r, j)
        };
        den.add(w);
        if j > 0 {
            num.add(j as f64 * w / r);
        }
    }
    -1.0 / (1.0 - p) + i as f64 / p + k as f64 * num.value() / den.value()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArgmaxMethod {
    /// Bisection on the sign of `r_{k,i}`.
    Polynomial,
    /// Bisection on the sign of `d ln VAR / dp`.
    LogVariance,
}

/// Iterations above which [`variance_argmax`] switches to the log-variance slope.
pub const LOG_VARIANCE_THRESHOLD: u32 = 60;

/// `p_m(i, k)`: where the variance of the count of ones peaks.
pub fn variance_argmax(i: u32, k: u32) -> Result<f64> {
    let method = if i > LOG_VARIANCE_THRESHOLD {
        ArgmaxMethod::LogVariance
    } else {
        ArgmaxMethod::Polynomial
    };
    variance_argmax_with(i, k, method)
}

pub fn variance_argmax_with(i: u32, k: u32, method: ArgmaxMethod) -> Result<f64> {
    if i < 2 {
        return Err(Error::invalid("variance_argmax needs i >= 2"));
    }
    RuleParams::new(k, 0.5)?;
    let root = match method {
        ArgmaxMethod::Polynomial => {
            numeric::bisect(|p| scaled_derivative(i, k, p).0, 0.0, 1.0, 0.0)
        }
        ArgmaxMethod::LogVariance => {
            numeric::bisect(|p| log_variance_slope(i, k, p), 0.0, 1.0, 0.0)
        }
    };
    root.map_err(|_| Error::NoBracket("variance_argmax"))
}

/// `r_k(i) = 1 / (1 + α / (α + (i - 1)^β))`.
pub fn root_curve_model(i: f64, alpha: f64, beta: f64) -> f64 {
    1.0 / (1.0 + alpha / (alpha + libm::pow(i - 1.0, beta)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub k: u32,
    pub i_range: (u32, u32),
    pub alpha: f64,
    pub beta: f64,
    /// Residual sum of squares at the optimum.
    pub rss: f64,
    /// The fitted data: `(i, p_m(i))`.
    pub roots: Vec<(u32, f64)>,
    pub evaluations: usize,
}

/// Default iteration range for [`fit_root_curve`].
pub const DEFAULT_FIT_RANGE: RangeInclusive<u32> = 2..=40;

/// Least-squares fit of [`root_curve_model`] to `p_m(i)` over `i_range`.
///
/// Nelder–Mead from `(α, β) = (0.5, 1)` plus a coarse grid of starts, each
/// within the default evaluation budget; the best converged run wins.
pub fn fit_root_curve(k: u32, i_range: RangeInclusive<u32>) -> Result<FitResult> {
    let (lo, hi) = (*i_range.start(), *i_range.end());
    if lo < 2 || hi < lo || hi - lo + 1 < 4 {
        return Err(Error::invalid(
            "fit range needs at least 4 iterations, all >= 2",
        ));
    }
    let roots = i_range
        .map(|i| Ok((i, variance_argmax(i, k)?)))
        .collect::<Result<Vec<_>>>()?;

    let rss = |x: &[f64]| -> f64 {
        let (a, b) = (x[0], x[1]);
        if !(a > 0.0 && b > 0.0) {
            return f64::INFINITY;
        }
        numeric::sum(roots.iter().map(|&(i, pm)| {
            let e = pm - root_curve_model(i as f64, a, b);
            e * e
        }))
    };

    let mut starts: Vec<[f64; 2]> = Vec::new();
    starts.push([0.5, 1.0]);
    for &a in &[0.25, 1.0, 2.0] {
        for &b in &[0.5, 1.0, 1.5, 2.0] {
            starts.push([a, b]);
        }
    }

    let opts = NelderMeadOptions {
        initial_step: 0.05,
        ..Default::default()
    };
    let mut evaluations = 0;
    let mut best: Option<(f64, [f64; 2])> = None;
    for start in &starts {
        // Restarting from the first optimum guards against simplex collapse.
        let first = nelder_mead(rss, start, &opts);
        let second = nelder_mead(rss, &first.x, &opts);
        evaluations += first.evaluations + second.evaluations;
        if !second.converged || !second.value.is_finite() {
            continue;
        }
        if best.is_none_or(|(v, _)| second.value < v) {
            best = Some((second.value, [second.x[0], second.x[1]]));
        }
    }
    let (value, x) = best.ok_or(Error::NonConvergence {
        what: "fit_root_curve",
        steps: evaluations,
    })?;
    Ok(FitResult {
        k,
        i_range: (lo, hi),
        alpha: x[0],
        beta: x[1],
        rss: value,
        roots,
        evaluations,
    })
}

/// The closed geometric form of `Σ_{j=1}^{i-1} (i + j) k^(j-1) p^j`.
pub fn summed_form(i: u32, k: u32, p: f64) -> f64 {
    let (ii, kf) = (i as f64, k as f64);
    let kp = kf * p;
    let ki = numeric::powu(kp, i);
    ((1.0 + ii) * kp - ii * kp * kp - 2.0 * ii * ki + (2.0 * ii - 1.0) * ki * kp)
        / (kf * (kp - 1.0) * (kp - 1.0))
}

/// Term-by-term evaluation of the same sum.
pub fn summed_terms(i: u32, k: u32, p: f64) -> f64 {
    numeric::sum(
        (1..i).map(|j| (i + j) as f64 * numeric::powu(k as f64, j - 1) * numeric::powu(p, j)),
    )
}

/// Variance at the maximiser, for reporting.
pub fn max_variance(i: u32, k: u32) -> Result<f64> {
    let pm = variance_argmax(i, k)?;
    Ok(moments::variance(i, RuleParams::new(k, pm)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn poly_examples() {
        for &p in &[0.0, 0.1, 0.5, 0.9, 1.0] {
            let expect = 2.0 + 3.0 * p - 8.0 * p * p;
            assert!((variance_derivative_poly(2, 2, p) - expect).abs() < 1e-14);
        }
        assert_eq!(variance_derivative_poly(2, 2, 0.0), 2.0);
        let root = (3.0 + 73f64.sqrt()) / 16.0;
        assert!(variance_derivative_poly(2, 2, root).abs() < 1e-12);
    }

    #[test]
    fn poly_k2_matches_monomial_form() {
        // r_{2,i}(p) = i + Σ (i+j) 2^(j-1) p^j - i 2^i p^i
        for i in 2..12u32 {
            for &p in &[0.2f64, 0.6, 0.95] {
                let mut s = i as f64;
                for j in 1..i {
                    s += (i + j) as f64 * 2f64.powi(j as i32 - 1) * p.powi(j as i32);
                }
                s -= i as f64 * 2f64.powi(i as i32) * p.powi(i as i32);
                let r = variance_derivative_poly(i, 2, p);
                assert!((r - s).abs() <= 1e-12 * s.abs().max(1.0), "i={i} p={p}");
            }
        }
    }

    #[test]
    fn scaled_form_agrees_with_horner() {
        for &k in &[2u32, 3, 5] {
            for i in 2..10u32 {
                for &p in &[0.1, 0.4, 0.8] {
                    let r = k as f64 * p;
                    let scale = if r > 1.0 { r.powi(i as i32 - 1) } else { 1.0 };
                    let (s, _) = scaled_derivative(i, k, p);
                    let h = variance_derivative_poly(i, k, p);
                    assert!((s * scale - h).abs() <= 1e-9 * h.abs().max(1.0));
                }
            }
        }
    }

    #[test]
    fn derivative_sign_matches_numeric_slope() {
        for &k in &[2u32, 3, 5, 10] {
            for i in 2..8u32 {
                for m in 1..20 {
                    let p = m as f64 / 20.0;
                    let h = 1e-6;
                    let v = |p| moments::variance(i, RuleParams::new(k, p).unwrap());
                    let fd = (v(p + h) - v(p - h)) / (2.0 * h);
                    if fd.abs() > 1e-6 * v(p).max(1e-12) {
                        let r = variance_derivative_poly(i, k, p);
                        assert_eq!(r > 0.0, fd > 0.0, "k={k} i={i} p={p}");
                    }
                }
            }
        }
    }

    #[test]
    fn argmax_i2() {
        let pm = variance_argmax(2, 2).unwrap();
        assert!((pm - (3.0 + 73f64.sqrt()) / 16.0).abs() < 1e-12);
        assert!((pm - (3.0 + 73f64.sqrt()) / 16.0).abs() < 1e-12);
        let v = |p| moments::variance(2, RuleParams::new(2, p).unwrap());
        assert!(v(pm - 1e-4) < v(pm) && v(pm + 1e-4) < v(pm));
        assert!(variance_argmax(1, 2).is_err());
    }

    #[test]
    fn argmax_methods_agree() {
        for &k in &[2u32, 3, 5, 100] {
            for i in 2..=40u32 {
                let a = variance_argmax_with(i, k, ArgmaxMethod::Polynomial).unwrap();
                let b = variance_argmax_with(i, k, ArgmaxMethod::LogVariance).unwrap();
                assert!((a - b).abs() < 1e-9, "k={k} i={i}: {a} {b}");
            }
        }
    }

    #[test]
    fn argmax_large_i_approaches_limit() {
        for &k in &[2u32, 3, 10] {
            for &i in &[200u32, 1000, 5000] {
                let pm = variance_argmax(i, k).unwrap();
                let limit = 1.0 - 1.0 / (2.0 * i as f64);
                assert!((pm - limit).abs() < 0.5 / i as f64, "k={k} i={i} pm={pm}");
            }
        }
    }

    #[test]
    fn model_examples() {
        assert_eq!(root_curve_model(1.0, 0.7, 1.3), 0.5);
        assert!((root_curve_model(1e12, 0.6, 1.0) - 1.0).abs() < 1e-11);
        let v = root_curve_model(11.0, 0.5, 1.0);
        assert!((v - 1.0 / (1.0 + 0.5 / 10.5)).abs() < 1e-15);
    }

    #[test]
    fn fit_rejects_short_ranges() {
        assert!(fit_root_curve(2, 2..=4).is_err());
        assert!(fit_root_curve(2, 1..=10).is_err());
        #[allow(clippy::reversed_empty_ranges)]
        let empty = 10..=2;
        assert!(fit_root_curve(2, empty).is_err());
    }

    #[test]
    fn summed_form_identity() {
        for &k in &[2u32, 3, 5] {
            for i in 2..=15u32 {
                for &p in &[0.05, 0.3, 0.45, 0.7, 0.95] {
                    if (p - 1.0 / k as f64).abs() < 1e-3 {
                        continue;
                    }
                    let a = summed_form(i, k, p);
                    let b = summed_terms(i, k, p);
                    assert!(
                        (a - b).abs() <= 1e-10 * b.abs().max(1e-300),
                        "k={k} i={i} p={p}"
                    );
                }
            }
        }
    }
}
