//! Small numerical kernels shared by the analytic modules: compensated
//! summation, overflow-aware geometric sums, bracketing root finders and a
//! golden-section maximiser.

use crate::error::{Error, Result};

/// Compensated summation with Knuth's two-sum error term.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub const fn new() -> Self {
        CompensatedSum {
            sum: 0.0,
            compensation: 0.0,
        }
    }

    /// Knuth's branch-free two-sum: the rounding error of `sum + x` is
    /// recovered exactly whatever the magnitudes.
    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        let back = t - self.sum;
        self.compensation += (self.sum - (t - back)) + (x - back);
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl core::iter::FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Compensated sum of an iterator.
pub fn sum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    iter.into_iter().collect::<CompensatedSum>().value()
}

/// `x^n` for a non-negative integer exponent, by repeated squaring.
pub fn powu(mut x: f64, mut n: u32) -> f64 {
    let mut acc = 1.0;
    while n > 0 {
        if n & 1 == 1 {
            acc *= x;
        }
        x *= x;
        n >>= 1;
    }
    acc
}

/// Geometric sum `1 + r + … + r^(n-1)`.
///
/// Uses the `expm1` form away from `r = 1` and direct accumulation within
/// `1e-8` of it, where the quotient is `0/0`. Returns `+inf` if the value is
/// not representable.
pub fn geometric_sum(r: f64, n: u32) -> f64 {
    if n == 0 {
        return 0.0;
    }
    if r == 0.0 {
        return 1.0;
    }
    if libm::fabs(r - 1.0) < 1e-8 {
        let mut term = 1.0;
        let mut acc = CompensatedSum::new();
        for _ in 0..n {
            acc.add(term);
            term *= r;
        }
        return acc.value();
    }
    if r > 0.0 {
        libm::expm1(n as f64 * libm::log(r)) / (r - 1.0)
    } else {
        (powu(r, n) - 1.0) / (r - 1.0)
    }
}

/// Natural log of the geometric sum for `r > 1`, safe when the sum overflows.
pub fn ln_geometric_sum(r: f64, n: u32) -> f64 {
    debug_assert!(r > 1.0 && n > 0);
    let lr = libm::log(r);
    let t = n as f64 * lr;
    // (r^n - 1)/(r - 1) = r^n (1 - r^-n) / (r - 1)
    t + libm::log(-libm::expm1(-t)) - libm::log(r - 1.0)
}

/// Bisection on `[lo, hi]` for a sign change of `f`.
///
/// Runs until the bracket stops shrinking in floating point or its width drops
/// below `tol`. Returns the midpoint of the final bracket.
pub fn bisect<F: FnMut(f64) -> f64>(mut f: F, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64> {
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.is_nan() || f_hi.is_nan() || (f_lo > 0.0) == (f_hi > 0.0) {
        return Err(Error::NoBracket("bisection"));
    }
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || hi - lo <= tol {
            return Ok(mid.clamp(lo, hi));
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if (f_mid > 0.0) == (f_lo > 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section search for the maximiser of a unimodal `f` on `[a, b]`.
pub fn golden_max<F: FnMut(f64) -> f64>(mut f: F, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while b - a > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
        if c >= d {
            break;
        }
    }
    0.5 * (a + b)
}

/// Grid scan on `[lo, hi]` followed by golden-section refinement around the
/// best grid point. Ties on the grid go to the smaller abscissa.
pub fn grid_golden_max<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, step: f64) -> f64 {
    let n = libm::ceil((hi - lo) / step) as usize;
    let at = |m: usize| if m >= n { hi } else { lo + m as f64 * step };
    let mut best = 0;
    let mut best_val = f64::NEG_INFINITY;
    for m in 0..=n {
        let v = f(at(m));
        if v > best_val {
            best_val = v;
            best = m;
        }
    }
    let a = at(best.saturating_sub(1));
    let b = at((best + 1).min(n));
    let x = golden_max(&mut f, a, b, 1e-12);
    if f(x) >= best_val {
        x
    } else {
        at(best)
    }
}
