//! End-to-end driver: cost-to-density transform, offline training by
//! cross approximation, online condition / sample / select / refine,
//! and the batched evaluation protocol with a uniform-initialization
//! baseline.

pub mod refine;

use std::sync::Arc;
use std::time::Instant;

use serde::{Deserialize, Serialize};

pub use refine::{refine, RefineOptions, RefineOutcome};

use crate::cross::{tt_cross, CrossOptions, CrossReport};
use crate::error::{Result, TtgoError};
use crate::grid::{Domain, Grid, TaskSplit};
use crate::sampler::{SampleBatch, TtSampler};
use crate::scalar::Scalar;
use crate::tt::TensorTrain;

/// How a cost maps to the unnormalized density the model approximates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Transform {
    /// `P(x) = exp(-beta * C(x)^2)`; file-format id 0.
    ExpNegSquaredCost,
    /// The problem supplies the density directly; file-format id 1.
    DirectPdf,
}

impl Transform {
    pub fn id(self) -> u8 {
        match self {
            Transform::ExpNegSquaredCost => 0,
            Transform::DirectPdf => 1,
        }
    }

    pub fn from_id(id: u8) -> Option<Self> {
        match id {
            0 => Some(Transform::ExpNegSquaredCost),
            1 => Some(Transform::DirectPdf),
            _ => None,
        }
    }
}

type CostFn<T> = Arc<dyn Fn(&[T]) -> T + Send + Sync>;

/// A task-parameterized optimization problem: a nonnegative cost over a
/// box, the task/decision split, and the density transform.
#[derive(Clone)]
pub struct Problem<T> {
    pub name: String,
    pub domain: Domain<T>,
    pub split: TaskSplit,
    pub beta: T,
    pub transform: Transform,
    cost: CostFn<T>,
    direct_pdf: Option<CostFn<T>>,
}

impl<T: Scalar> Problem<T> {
    pub fn new(
        name: impl Into<String>,
        domain: Domain<T>,
        split: TaskSplit,
        beta: T,
        cost: impl Fn(&[T]) -> T + Send + Sync + 'static,
    ) -> Result<Self> {
        if split.total() != domain.dim() {
            return Err(TtgoError::InvalidArgument(format!(
                "split covers {} dimensions, domain has {}",
                split.total(),
                domain.dim()
            )));
        }
        if !(beta > T::zero()) {
            return Err(TtgoError::InvalidArgument("beta must be positive".into()));
        }
        Ok(Self {
            name: name.into(),
            domain,
            split,
            beta,
            transform: Transform::ExpNegSquaredCost,
            cost: Arc::new(cost),
            direct_pdf: None,
        })
    }

    /// Problem whose density is given directly; the cost oracle is still
    /// used for candidate ranking and refinement.
    pub fn with_direct_pdf(
        name: impl Into<String>,
        domain: Domain<T>,
        split: TaskSplit,
        cost: impl Fn(&[T]) -> T + Send + Sync + 'static,
        pdf: impl Fn(&[T]) -> T + Send + Sync + 'static,
    ) -> Result<Self> {
        let mut p = Self::new(name, domain, split, T::one(), cost)?;
        p.transform = Transform::DirectPdf;
        p.direct_pdf = Some(Arc::new(pdf));
        Ok(p)
    }

    pub fn cost(&self, x: &[T]) -> T {
        (self.cost)(x)
    }

    /// Cost restricted to the decision variables for a fixed task.
    pub fn cost_for_task(&self, task: &[T]) -> impl Fn(&[T]) -> T + Send + Sync + '_ {
        let cost = Arc::clone(&self.cost);
        let task = task.to_vec();
        move |x2: &[T]| {
            let mut full = task.clone();
            full.extend_from_slice(x2);
            cost(&full)
        }
    }

    pub fn decision_domain(&self) -> Domain<T> {
        if self.split.d1 == 0 {
            self.domain.clone()
        } else {
            self.domain.tail(self.split.d1).expect("d2 >= 1")
        }
    }

    pub fn task_domain(&self) -> Option<Domain<T>> {
        if self.split.d1 == 0 {
            None
        } else {
            Some(self.domain.head(self.split.d1).expect("d1 >= 1"))
        }
    }
}

impl<T> std::fmt::Debug for Problem<T>
where
    T: std::fmt::Debug,
{
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Problem")
            .field("name", &self.name)
            .field("split", &self.split)
            .field("beta", &self.beta)
            .field("transform", &self.transform)
            .finish_non_exhaustive()
    }
}

/// The monotone cost-to-density map: strictly decreasing in the cost,
/// with `P in (0, 1]` for the exponential transform.
pub fn cost_to_pdf<T: Scalar>(problem: &Problem<T>) -> impl Fn(&[T]) -> T + Send + Sync {
    let transform = problem.transform;
    let beta = problem.beta;
    let cost = Arc::clone(&problem.cost);
    let direct = problem.direct_pdf.clone();
    move |x: &[T]| match transform {
        Transform::ExpNegSquaredCost => {
            let c = cost(x);
            (-beta * c * c).exp()
        }
        Transform::DirectPdf => (direct.as_ref().expect("direct pdf set"))(x),
    }
}

/// A trained model: the grid, the tensor train of the transformed
/// density, the task split, and the training report.
#[derive(Debug, Clone)]
pub struct TtgoModel<T> {
    pub grid: Grid<T>,
    pub tt: TensorTrain<T>,
    pub split: TaskSplit,
    pub beta: T,
    pub transform: Transform,
    pub report: Option<CrossReport>,
    pub offline_ms: f64,
}

impl<T: Scalar> TtgoModel<T> {
    /// Conditions the density on a task point and returns the sampler
    /// over the decision grid.
    pub fn conditional_sampler(&self, task: &[T], alpha: T, seed: u64) -> Result<(TtSampler<T>, Grid<T>)> {
        let (tt2, grid2) = if self.split.d1 == 0 {
            (self.tt.clone(), self.grid.clone())
        } else {
            (
                self.tt.condition(&self.grid, &self.split, task)?,
                self.grid.tail(self.split.d1)?,
            )
        };
        Ok((TtSampler::build(tt2, alpha, seed)?, grid2))
    }
}

/// Offline phase: discretize the domain, transform the cost, and build
/// the tensor train of the density by cross approximation.
pub fn train<T: Scalar>(
    problem: &Problem<T>,
    grid_counts: &[usize],
    cross_opts: &CrossOptions,
) -> Result<TtgoModel<T>> {
    let grid = Grid::uniform(&problem.domain, grid_counts)?;
    let pdf = cost_to_pdf(problem);
    let oracle = {
        let grid = grid.clone();
        move |idx: &[usize]| -> T {
            let point = grid.point(idx).expect("cross queries in range");
            pdf(&point)
        }
    };
    let started = Instant::now();
    let (tt, report) = tt_cross(&oracle, &grid, cross_opts)?;
    let offline_ms = started.elapsed().as_secs_f64() * 1e3;
    Ok(TtgoModel {
        grid,
        tt,
        split: problem.split,
        beta: problem.beta,
        transform: problem.transform,
        report: Some(report),
        offline_ms,
    })
}

/// Online-phase knobs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolveOptions {
    pub alpha: f64,
    pub n_samples: usize,
    pub k_best: usize,
    /// `None` skips refinement (candidates only).
    pub refine: Option<RefineOptions>,
    pub seed: u64,
    /// Refined entries count as successes when `c_f` is at or below this.
    pub success_threshold: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            alpha: 0.75,
            n_samples: 100,
            k_best: 10,
            refine: Some(RefineOptions::default()),
            seed: 0,
            success_threshold: 0.25,
        }
    }
}

/// One evaluated candidate (decision point and its initial cost).
#[derive(Debug, Clone, Serialize)]
pub struct Candidate<T> {
    pub index: Vec<usize>,
    pub point: Vec<T>,
    pub cost_initial: T,
}

/// One refined candidate.
#[derive(Debug, Clone, Serialize)]
pub struct Refined<T> {
    pub point: Vec<T>,
    pub cost_initial: T,
    pub cost_final: T,
    pub iterations: usize,
    pub success: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveResult<T> {
    /// Deduplicated candidates sorted by initial cost ascending.
    pub candidates: Vec<Candidate<T>>,
    /// The `k_best` refined entries sorted by final cost ascending.
    pub refined: Vec<Refined<T>>,
    pub online_ms: f64,
}

/// Online phase: condition on the task, draw prioritized samples,
/// evaluate the cost on the deduplicated candidates, keep the best few,
/// and refine each inside the decision box.
pub fn solve<T: Scalar>(
    model: &TtgoModel<T>,
    problem: &Problem<T>,
    task: &[T],
    opts: &SolveOptions,
) -> Result<SolveResult<T>> {
    if task.len() != model.split.d1 {
        return Err(TtgoError::InvalidArgument(format!(
            "task has {} components, model expects {}",
            task.len(),
            model.split.d1
        )));
    }
    if opts.k_best == 0 || opts.n_samples < opts.k_best {
        return Err(TtgoError::InvalidArgument(
            "need n_samples >= k_best >= 1".into(),
        ));
    }
    let task = match problem.task_domain() {
        Some(box1) => box1.clamp(task),
        None => Vec::new(),
    };
    let started = Instant::now();
    let alpha = T::from_f64_c(opts.alpha);
    let (sampler, decision_grid) = model.conditional_sampler(&task, alpha, opts.seed)?;
    let batch = sampler.sample(opts.n_samples, &decision_grid)?;
    let candidates = rank_candidates(problem, &task, &batch);
    let refined = match &opts.refine {
        Some(refine_opts) => {
            let bounds = problem.decision_domain();
            let threshold = T::from_f64_c(opts.success_threshold);
            let cost2 = problem.cost_for_task(&task);
            use rayon::prelude::*;
            let mut refined: Vec<Refined<T>> = candidates
                .par_iter()
                .take(opts.k_best)
                .map(|cand| {
                    let out = refine(&cost2, &cand.point, &bounds, refine_opts)?;
                    Ok(Refined {
                        point: out.point,
                        cost_initial: cand.cost_initial,
                        cost_final: out.cost,
                        iterations: out.iterations,
                        success: out.cost <= threshold,
                    })
                })
                .collect::<Result<_>>()?;
            refined.sort_by(|a, b| {
                a.cost_final
                    .partial_cmp(&b.cost_final)
                    .unwrap_or(std::cmp::Ordering::Equal)
            });
            refined
        }
        None => Vec::new(),
    };
    Ok(SolveResult {
        candidates,
        refined,
        online_ms: started.elapsed().as_secs_f64() * 1e3,
    })
}

/// Evaluates, deduplicates (same multi-index), and sorts samples by
/// initial cost ascending.
fn rank_candidates<T: Scalar>(
    problem: &Problem<T>,
    task: &[T],
    batch: &SampleBatch<T>,
) -> Vec<Candidate<T>> {
    let mut seen = std::collections::HashSet::new();
    let cost2 = problem.cost_for_task(task);
    let mut out: Vec<Candidate<T>> = Vec::with_capacity(batch.len());
    for l in 0..batch.len() {
        if !seen.insert(batch.indices[l].clone()) {
            continue;
        }
        out.push(Candidate {
            index: batch.indices[l].clone(),
            point: batch.points[l].clone(),
            cost_initial: cost2(&batch.points[l]),
        });
    }
    out.sort_by(|a, b| {
        a.cost_initial
            .partial_cmp(&b.cost_initial)
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    out
}

/// One row of the evaluation table.
#[derive(Debug, Clone, Serialize)]
pub struct MetricsRow {
    pub arm: String,
    /// `None` for the uniform baseline.
    pub alpha: Option<f64>,
    pub n_samples: usize,
    pub mean_ci: f64,
    pub mean_cf: f64,
    pub success_pct: f64,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct MetricsTable {
    pub rows: Vec<MetricsRow>,
}

impl MetricsTable {
    /// CSV with columns (alpha, n_samples, mean_ci, mean_cf,
    /// success_pct, arm); floats carry 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("alpha,n_samples,mean_ci,mean_cf,success_pct,arm\n");
        for row in &self.rows {
            let alpha = row
                .alpha
                .map(|a| format!("{a}"))
                .unwrap_or_else(|| "-".into());
            out.push_str(&format!(
                "{},{},{:.16e},{:.16e},{:.16e},{}\n",
                alpha, row.n_samples, row.mean_ci, row.mean_cf, row.success_pct, row.arm
            ));
        }
        out
    }
}

/// Evaluation protocol: for each `(alpha, N)` cell, draw the largest
/// requested batch once per task and reuse its prefixes as the smaller
/// batches (common random numbers), pick the best initial cost, refine
/// it, and average over tasks. The uniform arm draws decision points
/// uniformly over the decision box with the same refinement budget.
#[allow(clippy::too_many_arguments)]
pub fn evaluate_run<T: Scalar>(
    model: &TtgoModel<T>,
    problem: &Problem<T>,
    tasks: &[Vec<T>],
    alphas: &[f64],
    sample_counts: &[usize],
    include_uniform_baseline: bool,
    refine_opts: &RefineOptions,
    success_threshold: f64,
    seed: u64,
) -> Result<MetricsTable> {
    if tasks.is_empty() {
        return Err(TtgoError::InvalidArgument("no tasks given".into()));
    }
    if sample_counts.is_empty() || sample_counts.iter().any(|&n| n == 0) {
        return Err(TtgoError::InvalidArgument(
            "sample counts must be positive".into(),
        ));
    }
    let max_n = *sample_counts.iter().max().unwrap();
    let threshold = T::from_f64_c(success_threshold);
    let mut table = MetricsTable::default();

    use rayon::prelude::*;
    for (ai, &alpha) in alphas.iter().enumerate() {
        let per_task: Vec<Vec<(T, T)>> = tasks
            .par_iter()
            .enumerate()
            .map(|(ti, task)| {
                let stream_seed = seed
                    .wrapping_add(0x9e37_79b9_7f4a_7c15u64.wrapping_mul(ti as u64 + 1))
                    .wrapping_add(ai as u64);
                let (sampler, grid2) =
                    model.conditional_sampler(task, T::from_f64_c(alpha), stream_seed)?;
                let batch = sampler.sample(max_n, &grid2)?;
                let cost2 = problem.cost_for_task(task);
                let costs: Vec<T> = batch.points.iter().map(|p| cost2(p)).collect();
                let bounds = problem.decision_domain();
                sample_counts
                    .iter()
                    .map(|&n| {
                        let best = (0..n)
                            .min_by(|&a, &b| {
                                costs[a]
                                    .partial_cmp(&costs[b])
                                    .unwrap_or(std::cmp::Ordering::Equal)
                            })
                            .expect("n >= 1");
                        let out = refine(&cost2, &batch.points[best], &bounds, refine_opts)?;
                        Ok((costs[best], out.cost))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        for (ni, &n) in sample_counts.iter().enumerate() {
            table.rows.push(aggregate_row(
                "ttgo",
                Some(alpha),
                n,
                per_task.iter().map(|cells| cells[ni]),
                threshold,
            ));
        }
    }

    if include_uniform_baseline {
        let decision = problem.decision_domain();
        let per_task: Vec<Vec<(T, T)>> = tasks
            .par_iter()
            .enumerate()
            .map(|(ti, task)| {
                use rand::Rng;
                use rand::SeedableRng;
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(
                    seed.wrapping_add(0xdead_beefu64).wrapping_add(ti as u64),
                );
                let cost2 = problem.cost_for_task(task);
                let bounds = problem.decision_domain();
                let pool: Vec<Vec<T>> = (0..max_n)
                    .map(|_| {
                        decision
                            .lower()
                            .iter()
                            .zip(decision.upper().iter())
                            .map(|(&lo, &hi)| lo + (hi - lo) * T::from_f64_c(rng.gen::<f64>()))
                            .collect()
                    })
                    .collect();
                let costs: Vec<T> = pool.iter().map(|p| cost2(p)).collect();
                sample_counts
                    .iter()
                    .map(|&n| {
                        let best = (0..n)
                            .min_by(|&a, &b| {
                                costs[a]
                                    .partial_cmp(&costs[b])
                                    .unwrap_or(std::cmp::Ordering::Equal)
                            })
                            .expect("n >= 1");
                        let out = refine(&cost2, &pool[best], &bounds, refine_opts)?;
                        Ok((costs[best], out.cost))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        for (ni, &n) in sample_counts.iter().enumerate() {
            table.rows.push(aggregate_row(
                "uniform",
                None,
                n,
                per_task.iter().map(|cells| cells[ni]),
                threshold,
            ));
        }
    }
    Ok(table)
}

fn aggregate_row<T: Scalar>(
    arm: &str,
    alpha: Option<f64>,
    n: usize,
    cells: impl Iterator<Item = (T, T)>,
    threshold: T,
) -> MetricsRow {
    let mut count = 0usize;
    let mut sum_ci = 0.0;
    let mut sum_cf = 0.0;
    let mut successes = 0usize;
    for (ci, cf) in cells {
        count += 1;
        sum_ci += ci.to_f64_c();
        sum_cf += cf.to_f64_c();
        if cf <= threshold {
            successes += 1;
        }
    }
    MetricsRow {
        arm: arm.into(),
        alpha,
        n_samples: n,
        mean_ci: sum_ci / count as f64,
        mean_cf: sum_cf / count as f64,
        success_pct: 100.0 * successes as f64 / count as f64,
    }
}

#[cfg(test)]
mod tests;
