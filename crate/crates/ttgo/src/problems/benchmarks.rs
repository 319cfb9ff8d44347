//! Benchmark cost functions with task parameters, and ready-made
//! problem definitions over their standard domains.

use crate::error::{Result, TtgoError};
use crate::grid::{Domain, TaskSplit};
use crate::pipeline::Problem;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BenchmarkKind {
    Sinusoid,
    Rosenbrock,
    Himmelblau,
    Gmm,
}

/// Unnormalized Gaussian-mixture parameters: `P(x) = sum_j w_j *
/// exp(-sharpness_j * ||x - center_j||^2)`.
#[derive(Debug, Clone)]
pub struct GmmParams<T> {
    pub centers: Vec<Vec<T>>,
    pub sharpness: Vec<T>,
    pub weights: Vec<T>,
}

impl<T: Scalar> GmmParams<T> {
    pub fn validate(&self, dim: usize) -> Result<()> {
        let j = self.centers.len();
        if j == 0 || self.sharpness.len() != j || self.weights.len() != j {
            return Err(TtgoError::InvalidArgument(
                "mixture needs matching centers/sharpness/weights".into(),
            ));
        }
        if self.centers.iter().any(|c| c.len() != dim) {
            return Err(TtgoError::InvalidArgument(format!(
                "mixture centers must have dimension {dim}"
            )));
        }
        if self.sharpness.iter().any(|&b| !(b > T::zero()))
            || self.weights.iter().any(|&w| !(w > T::zero()))
        {
            return Err(TtgoError::InvalidArgument(
                "mixture weights and sharpness must be positive".into(),
            ));
        }
        Ok(())
    }

    pub fn density(&self, x: &[T]) -> T {
        let mut p = T::zero();
        for ((c, &b), &w) in self
            .centers
            .iter()
            .zip(self.sharpness.iter())
            .zip(self.weights.iter())
        {
            let sq: T = x
                .iter()
                .zip(c.iter())
                .map(|(&a, &m)| (a - m) * (a - m))
                .sum();
            p += w * (-b * sq).exp();
        }
        p
    }

    pub fn max_weight(&self) -> T {
        self.weights
            .iter()
            .fold(T::zero(), |acc, &w| acc.max(w))
    }
}

/// Benchmark description: the kind, the task/decision split, and the
/// mixture parameters for the mixture kind.
#[derive(Debug, Clone)]
pub struct BenchmarkSpec<T> {
    pub kind: BenchmarkKind,
    pub dims: (usize, usize),
    pub gmm: Option<GmmParams<T>>,
}

/// Cost at a full point `x = (task, decision)`.
///
/// The mixture kind is a density; its cost for ranking purposes is the
/// shortfall from the largest mixture weight, floored at zero.
pub fn benchmark_cost<T: Scalar>(spec: &BenchmarkSpec<T>, x: &[T]) -> Result<T> {
    let (d1, d2) = spec.dims;
    if x.len() != d1 + d2 {
        return Err(TtgoError::InvalidArgument(format!(
            "point has {} components, benchmark expects {}",
            x.len(),
            d1 + d2
        )));
    }
    match spec.kind {
        BenchmarkKind::Sinusoid => {
            if d1 != 0 {
                return Err(TtgoError::InvalidArgument(
                    "the sinusoid benchmark has no task parameters".into(),
                ));
            }
            Ok(sinusoid_cost(x))
        }
        BenchmarkKind::Rosenbrock => {
            if d1 != 2 || d2 % 2 != 0 || d2 == 0 {
                return Err(TtgoError::InvalidArgument(
                    "rosenbrock expects 2 task parameters and an even number of decision variables"
                        .into(),
                ));
            }
            Ok(rosenbrock_cost(x[0], x[1], &x[2..]))
        }
        BenchmarkKind::Himmelblau => {
            if d1 != 2 || d2 != 2 {
                return Err(TtgoError::InvalidArgument(
                    "himmelblau expects 2 task parameters and 2 decision variables".into(),
                ));
            }
            Ok(himmelblau_cost(x[0], x[1], x[2], x[3]))
        }
        BenchmarkKind::Gmm => {
            let gmm = spec
                .gmm
                .as_ref()
                .ok_or_else(|| TtgoError::InvalidArgument("mixture parameters missing".into()))?;
            Ok((gmm.max_weight() - gmm.density(x)).max(T::zero()))
        }
    }
}

/// `C(x) = 1 - 0.5 (1 + sin(4 pi ||x|| / sqrt(d)))`; zero on the rings
/// `||x|| = sqrt(d) (1/8 + k/2)`.
pub fn sinusoid_cost<T: Scalar>(x: &[T]) -> T {
    let d = T::from_usize(x.len()).unwrap();
    let norm = x.iter().map(|&v| v * v).sum::<T>().sqrt();
    let four_pi = T::from_f64_c(4.0 * std::f64::consts::PI);
    let half = T::from_f64_c(0.5);
    T::one() - half * (T::one() + (four_pi * norm / d.sqrt()).sin())
}

/// Pairwise-coupled banana valley with a unique minimum at
/// `(a, a^2, a, a^2, ...)`.
pub fn rosenbrock_cost<T: Scalar>(a: T, b: T, y: &[T]) -> T {
    let mut c = T::zero();
    for pair in y.chunks_exact(2) {
        let (u, v) = (pair[0], pair[1]);
        c += (u - a) * (u - a) + b * (v - u * u) * (v - u * u);
    }
    c
}

/// `(y1^2 + y2 - a)^2 + (y1 + y2^2 - b)^2`; four global minima at the
/// classic parameters `(a, b) = (11, 7)`.
pub fn himmelblau_cost<T: Scalar>(a: T, b: T, y1: T, y2: T) -> T {
    let p = y1 * y1 + y2 - a;
    let q = y1 + y2 * y2 - b;
    p * p + q * q
}

/// Sinusoid problem on `[-2, 2]^d2`, no task parameters.
pub fn sinusoid_problem<T: Scalar>(d2: usize, beta: T) -> Result<Problem<T>> {
    let domain = Domain::cube(T::from_f64_c(-2.0), T::from_f64_c(2.0), d2)?;
    let split = TaskSplit::new(0, d2)?;
    Problem::new("sinusoid", domain, split, beta, move |x: &[T]| {
        sinusoid_cost(x)
    })
}

/// Rosenbrock with task parameters `(a, b)` on
/// `[-1.5, 1.5] x [50, 150]` and decision variables on `[-2, 2]^d2`.
pub fn rosenbrock_problem<T: Scalar>(d2: usize, beta: T) -> Result<Problem<T>> {
    if d2 == 0 || d2 % 2 != 0 {
        return Err(TtgoError::InvalidArgument(
            "rosenbrock needs an even, positive number of decision variables".into(),
        ));
    }
    let task = Domain::new(
        vec![T::from_f64_c(-1.5), T::from_f64_c(50.0)],
        vec![T::from_f64_c(1.5), T::from_f64_c(150.0)],
    )?;
    let decision = Domain::cube(T::from_f64_c(-2.0), T::from_f64_c(2.0), d2)?;
    let domain = task.concat(&decision);
    let split = TaskSplit::new(2, d2)?;
    Problem::new("rosenbrock", domain, split, beta, move |x: &[T]| {
        rosenbrock_cost(x[0], x[1], &x[2..])
    })
}

/// Rosenbrock with the task parameters frozen; a single-task model over
/// the decision variables only.
pub fn rosenbrock_fixed_problem<T: Scalar>(a: T, b: T, d2: usize, beta: T) -> Result<Problem<T>> {
    if d2 == 0 || d2 % 2 != 0 {
        return Err(TtgoError::InvalidArgument(
            "rosenbrock needs an even, positive number of decision variables".into(),
        ));
    }
    let domain = Domain::cube(T::from_f64_c(-2.0), T::from_f64_c(2.0), d2)?;
    let split = TaskSplit::new(0, d2)?;
    Problem::new("rosenbrock-fixed", domain, split, beta, move |y: &[T]| {
        rosenbrock_cost(a, b, y)
    })
}

/// Himmelblau with task parameters `(a, b)` on `[0, 15]^2` and decision
/// variables on `[-5, 5]^2`.
pub fn himmelblau_problem<T: Scalar>(beta: T) -> Result<Problem<T>> {
    let task = Domain::cube(T::zero(), T::from_f64_c(15.0), 2)?;
    let decision = Domain::cube(T::from_f64_c(-5.0), T::from_f64_c(5.0), 2)?;
    let domain = task.concat(&decision);
    let split = TaskSplit::new(2, 2)?;
    Problem::new("himmelblau", domain, split, beta, move |x: &[T]| {
        himmelblau_cost(x[0], x[1], x[2], x[3])
    })
}

/// Mixture problem on `[lo, hi]^(d1 + d2)`; the density is used
/// directly (no exponential transform).
pub fn gmm_problem<T: Scalar>(
    params: GmmParams<T>,
    split: TaskSplit,
    lo: T,
    hi: T,
) -> Result<Problem<T>> {
    let d = split.total();
    params.validate(d)?;
    let domain = Domain::cube(lo, hi, d)?;
    let cost_params = params.clone();
    let pdf_params = params;
    Problem::with_direct_pdf(
        "gmm",
        domain,
        split,
        move |x: &[T]| (cost_params.max_weight() - cost_params.density(x)).max(T::zero()),
        move |x: &[T]| pdf_params.density(x),
    )
}
