//! Bounded local refinement: projected gradient descent with central
//! finite differences and Armijo backtracking. Derivative-free at the
//! interface, so any black-box cost works.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::grid::Domain;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RefineOptions {
    pub max_iters: usize,
    /// Stop when the infinity norm of the projected gradient step drops
    /// below this.
    pub grad_tol: f64,
    /// Stop when the accepted step is shorter than this.
    pub step_tol: f64,
    /// Armijo sufficient-decrease constant.
    pub armijo_c: f64,
    /// Backtracking shrink factor.
    pub shrink: f64,
    /// Finite-difference step as a fraction of each dimension's width.
    pub fd_rel_step: f64,
}

impl Default for RefineOptions {
    fn default() -> Self {
        Self {
            max_iters: 200,
            grad_tol: 1e-8,
            step_tol: 1e-12,
            armijo_c: 1e-4,
            shrink: 0.5,
            fd_rel_step: 1e-6,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RefineOutcome<T> {
    pub point: Vec<T>,
    pub cost: T,
    pub iterations: usize,
}

/// Minimizes `cost` inside `bounds` starting from `x0`. The returned
/// cost never exceeds `cost(x0)`: only decreasing steps are accepted,
/// and a non-finite evaluation aborts with the best point so far.
pub fn refine<T: Scalar, F: Fn(&[T]) -> T>(
    cost: F,
    x0: &[T],
    bounds: &Domain<T>,
    opts: &RefineOptions,
) -> Result<RefineOutcome<T>> {
    let mut x = bounds.clamp(x0);
    let d = x.len();
    let mut f = cost(&x);
    if !f.is_finite() {
        return Ok(RefineOutcome {
            point: x,
            cost: f,
            iterations: 0,
        });
    }
    let widths: Vec<T> = bounds
        .lower()
        .iter()
        .zip(bounds.upper().iter())
        .map(|(&lo, &hi)| hi - lo)
        .collect();
    let fd: Vec<T> = widths
        .iter()
        .map(|&w| w * T::from_f64_c(opts.fd_rel_step))
        .collect();
    let armijo_c = T::from_f64_c(opts.armijo_c);
    let shrink = T::from_f64_c(opts.shrink);
    let grad_tol = T::from_f64_c(opts.grad_tol);
    let step_tol = T::from_f64_c(opts.step_tol);

    let mut step_scale = T::one();
    let mut iterations = 0usize;
    for _ in 0..opts.max_iters {
        // Central differences with probe points clamped into the box;
        // the true displacement is the divisor.
        let mut grad = vec![T::zero(); d];
        let mut poisoned = false;
        for k in 0..d {
            let mut fwd = x.clone();
            fwd[k] = (x[k] + fd[k]).min(bounds.upper()[k]);
            let mut bwd = x.clone();
            bwd[k] = (x[k] - fd[k]).max(bounds.lower()[k]);
            let denom = fwd[k] - bwd[k];
            if denom <= T::zero() {
                grad[k] = T::zero();
                continue;
            }
            let f_fwd = cost(&fwd);
            let f_bwd = cost(&bwd);
            if !(f_fwd.is_finite() && f_bwd.is_finite()) {
                poisoned = true;
                break;
            }
            grad[k] = (f_fwd - f_bwd) / denom;
        }
        if poisoned {
            break;
        }

        // Projected-gradient stationarity measure.
        let mut pg_norm = T::zero();
        for k in 0..d {
            let moved = (x[k] - grad[k]).max(bounds.lower()[k]).min(bounds.upper()[k]);
            pg_norm = pg_norm.max((x[k] - moved).abs());
        }
        if pg_norm < grad_tol {
            break;
        }

        // Armijo backtracking along the projected step.
        let mut t = step_scale;
        let mut accepted = false;
        for _ in 0..60 {
            let trial: Vec<T> = (0..d)
                .map(|k| (x[k] - t * grad[k]).max(bounds.lower()[k]).min(bounds.upper()[k]))
                .collect();
            let decrease: T = (0..d).map(|k| grad[k] * (x[k] - trial[k])).sum();
            let f_trial = cost(&trial);
            if !f_trial.is_finite() {
                t *= shrink;
                continue;
            }
            if f_trial <= f - armijo_c * decrease && f_trial < f {
                let step_len: T = (0..d)
                    .map(|k| (trial[k] - x[k]).abs())
                    .fold(T::zero(), |a, b| a.max(b));
                x = trial;
                f = f_trial;
                iterations += 1;
                accepted = true;
                // Warm-start the next line search.
                step_scale = (t + t).min(T::from_f64_c(1e3));
                if step_len < step_tol {
                    return Ok(RefineOutcome {
                        point: x,
                        cost: f,
                        iterations,
                    });
                }
                break;
            }
            t *= shrink;
        }
        if !accepted {
            break;
        }
    }
    Ok(RefineOutcome {
        point: x,
        cost: f,
        iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn convex_quadratic_reaches_center() {
        let center = [0.3, -0.7, 0.1];
        let cost = |x: &[f64]| -> f64 {
            x.iter()
                .zip(center.iter())
                .map(|(a, c)| (a - c) * (a - c))
                .sum()
        };
        let bounds = Domain::cube(-2.0, 2.0, 3).unwrap();
        let out = refine(cost, &[1.5, 1.5, -1.5], &bounds, &RefineOptions::default()).unwrap();
        for (a, c) in out.point.iter().zip(center.iter()) {
            assert!((a - c).abs() < 1e-6, "point {:?}", out.point);
        }
    }

    #[test]
    fn rosenbrock_local_basin() {
        let cost =
            |x: &[f64]| -> f64 { (x[0] - 1.0).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2) };
        let bounds = Domain::cube(-2.0, 2.0, 2).unwrap();
        let opts = RefineOptions {
            max_iters: 20_000,
            ..RefineOptions::default()
        };
        let out = refine(cost, &[1.01, 1.01], &bounds, &opts).unwrap();
        assert!((out.point[0] - 1.0).abs() < 1e-4, "{:?}", out.point);
        assert!((out.point[1] - 1.0).abs() < 1e-4, "{:?}", out.point);
    }

    #[test]
    fn stays_on_active_bound() {
        // Unconstrained minimum at x = 3, outside the box: the iterate
        // must sit on the boundary.
        let cost = |x: &[f64]| (x[0] - 3.0).powi(2);
        let bounds = Domain::cube(-1.0, 1.0, 1).unwrap();
        let out = refine(cost, &[0.5], &bounds, &RefineOptions::default()).unwrap();
        assert!((out.point[0] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn cost_never_increases() {
        let cost = |x: &[f64]| (3.0 * x[0]).sin() + 0.5 * x[0] * x[0];
        let bounds = Domain::cube(-4.0, 4.0, 1).unwrap();
        for start in [-3.9, -1.0, 0.0, 2.5, 3.7] {
            let out = refine(cost, &[start], &bounds, &RefineOptions::default()).unwrap();
            assert!(out.cost <= cost(&[start]) + 1e-15);
        }
    }

    #[test]
    fn non_finite_cost_aborts_with_best() {
        let cost = |x: &[f64]| {
            if x[0] < 0.25 {
                f64::NAN
            } else {
                (x[0] - 1.0).powi(2)
            }
        };
        let bounds = Domain::cube(0.0, 2.0, 1).unwrap();
        let out = refine(cost, &[0.5], &bounds, &RefineOptions::default()).unwrap();
        assert!(out.cost.is_finite());
        assert!(out.cost <= cost(&[0.5]));
    }
}
