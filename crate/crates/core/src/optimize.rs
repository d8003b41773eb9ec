//! Derivative-free minimisation with the Nelder–Mead simplex.

use alloc::vec;
use alloc::vec::Vec;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelderMeadOptions {
    /// Edge length of the initial simplex along each axis.
    pub initial_step: f64,
    /// Stop once every vertex lies within this distance of the best one…
    pub x_tol: f64,
    /// …and the objective spread across the simplex is below this fraction of
    /// the best value.
    pub f_tol: f64,
    pub max_evals: usize,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        NelderMeadOptions {
            initial_step: 0.1,
            x_tol: 1e-10,
            f_tol: 1e-12,
            max_evals: 20_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    pub converged: bool,
}

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

/// Minimises `f` from `start`. Non-finite objective values are treated as
/// `+inf`, which lets callers encode box constraints.
pub fn nelder_mead<F>(mut f: F, start: &[f64], opts: &NelderMeadOptions) -> Minimum
where
    F: FnMut(&[f64]) -> f64,
{
    let n = start.len();
    let mut evals = 0usize;
    let mut eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    simplex.push(start.to_vec());
    for axis in 0..n {
        let mut v = start.to_vec();
        v[axis] += opts.initial_step;
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|x| eval(x, &mut evals)).collect();
    let mut centroid = vec![0.0; n];
    let mut trial = vec![0.0; n];
    let mut trial2 = vec![0.0; n];

    loop {
        // Order vertices by objective value.
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        simplex = order.iter().map(|&j| simplex[j].clone()).collect();
        values = order.iter().map(|&j| values[j]).collect();

        let spread = values[n] - values[0];
        let size = simplex[1..]
            .iter()
            .flat_map(|v| v.iter().zip(&simplex[0]).map(|(a, b)| libm::fabs(a - b)))
            .fold(0.0, f64::max);
        let f_scale = libm::fabs(values[0]).max(f64::MIN_POSITIVE);
        if size <= opts.x_tol
            && (spread <= opts.f_tol * f_scale || !spread.is_finite() && size == 0.0)
        {
            return Minimum {
                x: simplex[0].clone(),
                value: values[0],
                evaluations: evals,
                converged: true,
            };
        }
        if evals >= opts.max_evals {
            return Minimum {
                x: simplex[0].clone(),
                value: values[0],
                evaluations: evals,
                converged: false,
            };
        }

        for (d, c) in centroid.iter_mut().enumerate() {
            *c = simplex[..n].iter().map(|v| v[d]).sum::<f64>() / n as f64;
        }
        let worst = simplex[n].clone();
        let along = |coef: f64, out: &mut Vec<f64>| {
            for d in 0..n {
                out[d] = centroid[d] + coef * (worst[d] - centroid[d]);
            }
        };

        along(-REFLECT, &mut trial);
        let f_r = eval(&trial, &mut evals);
        if f_r < values[0] {
            along(-EXPAND, &mut trial2);
            let f_e = eval(&trial2, &mut evals);
            if f_e < f_r {
                simplex[n].clone_from(&trial2);
                values[n] = f_e;
            } else {
                simplex[n].clone_from(&trial);
                values[n] = f_r;
            }
            continue;
        }
        if f_r < values[n - 1] {
            simplex[n].clone_from(&trial);
            values[n] = f_r;
            continue;
        }
        // Contraction: outside if the reflection improved on the worst point.
        let (coef, bound) = if f_r < values[n] {
            (-CONTRACT, f_r)
        } else {
            (CONTRACT, values[n])
        };
        along(coef, &mut trial2);
        let f_c = eval(&trial2, &mut evals);
        if f_c < bound {
            simplex[n].clone_from(&trial2);
            values[n] = f_c;
            continue;
        }
        let best = simplex[0].clone();
        for j in 1..=n {
            for d in 0..n {
                simplex[j][d] = best[d] + SHRINK * (simplex[j][d] - best[d]);
            }
            values[j] = eval(&simplex[j], &mut evals);
        }
    }
}
