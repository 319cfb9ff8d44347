use super::*;
use crate::problems::{himmelblau_problem, rosenbrock_fixed_problem, rosenbrock_problem};

fn quick_cross_opts(max_rank: usize, seed: u64) -> CrossOptions {
    CrossOptions {
        max_rank,
        n_sweeps: 6,
        tol: 1e-4,
        seed,
        ..CrossOptions::default()
    }
}

#[test]
fn transform_basics() {
    let problem = rosenbrock_fixed_problem(1.0f64, 100.0, 2, 1.0).unwrap();
    let pdf = cost_to_pdf(&problem);
    // Zero cost maps to density one.
    assert!((pdf(&[1.0, 1.0]) - 1.0).abs() < 1e-15);
    // Unit cost maps to e^-1 at beta = 1.
    let y = [1.1, 1.21 - (0.01f64 / 100.0).sqrt()];
    let c = problem.cost(&y);
    assert!((pdf(&y) - (-c * c).exp()).abs() < 1e-15);
}

#[test]
fn transform_reverses_cost_ordering() {
    let problem = himmelblau_problem(1.0f64).unwrap();
    let pdf = cost_to_pdf(&problem);
    let a = [3.0, 3.0, 1.0, 1.0];
    let b = [3.0, 3.0, 2.0, -1.0];
    let (ca, cb) = (problem.cost(&a), problem.cost(&b));
    let (pa, pb) = (pdf(&a), pdf(&b));
    assert_eq!(ca < cb, pa > pb);
}

#[test]
fn constant_cost_trains_to_uniform_rank_one() {
    let problem = Problem::new(
        "flat",
        Domain::cube(0.0f64, 1.0, 3).unwrap(),
        TaskSplit::new(0, 3).unwrap(),
        1.0,
        |_: &[f64]| 0.7,
    )
    .unwrap();
    let model = train(&problem, &[20, 20, 20], &quick_cross_opts(5, 1)).unwrap();
    assert_eq!(model.tt.max_rank(), 1);
    let (sampler, grid) = model.conditional_sampler(&[], 0.0, 3).unwrap();
    let batch = sampler.sample(2000, &grid).unwrap();
    // Uniform sampler: every dimension covers its full range.
    for k in 0..3 {
        let mut seen = vec![false; 20];
        for idx in &batch.indices {
            seen[idx[k]] = true;
        }
        let covered = seen.iter().filter(|&&s| s).count();
        assert!(covered > 12, "dimension {k} covered only {covered}/20");
    }
}

#[test]
fn single_task_rosenbrock_small_rank() {
    // Single-task mode: a rank-5 model trains in (milli)seconds yet
    // concentrates its samples along the valley.
    let problem = rosenbrock_fixed_problem(1.0f64, 100.0, 2, 1.0).unwrap();
    let model = train(&problem, &[200, 200], &quick_cross_opts(5, 2)).unwrap();
    assert!(model.tt.max_rank() <= 5);
    assert!(model.offline_ms < 10_000.0, "offline {} ms", model.offline_ms);
    let (sampler, grid) = model.conditional_sampler(&[], 0.8, 11).unwrap();
    let batch = sampler.sample(200, &grid).unwrap();
    let near_valley = batch
        .points
        .iter()
        .filter(|p| problem.cost(p) < 2.0)
        .count();
    assert!(near_valley >= 160, "only {near_valley}/200 near the valley");
    // Greedy single sample refines to the optimum.
    let opts = SolveOptions {
        alpha: 1.0,
        n_samples: 1,
        k_best: 1,
        refine: Some(RefineOptions {
            max_iters: 20_000,
            ..RefineOptions::default()
        }),
        seed: 5,
        ..SolveOptions::default()
    };
    let result = solve(&model, &problem, &[], &opts).unwrap();
    assert_eq!(result.candidates.len(), 1);
    let best = &result.refined[0];
    assert!(best.cost_final <= best.cost_initial);
    assert!(
        (best.point[0] - 1.0).abs() < 1e-3 && (best.point[1] - 1.0).abs() < 1e-3,
        "refined {:?}",
        best.point
    );
}

#[test]
fn solve_refines_toward_conditioned_optimum() {
    let problem = rosenbrock_problem(2, 1.0f64).unwrap();
    let opts = CrossOptions {
        max_rank: 24,
        n_sweeps: 8,
        tol: 5e-3,
        kick: 4,
        seed: 7,
        ..CrossOptions::default()
    };
    let model = train(&problem, &[60, 60, 300, 300], &opts).unwrap();
    let solve_opts = SolveOptions {
        alpha: 0.75,
        n_samples: 100,
        k_best: 5,
        refine: Some(RefineOptions {
            max_iters: 20_000,
            grad_tol: 1e-11,
            ..RefineOptions::default()
        }),
        seed: 11,
        ..SolveOptions::default()
    };
    let task = [1.0, 100.0];
    let result = solve(&model, &problem, &task, &solve_opts).unwrap();
    let best = &result.refined[0];
    assert!(
        (best.point[0] - 1.0).abs() < 1e-3 && (best.point[1] - 1.0).abs() < 1e-3,
        "refined best {:?} (c_f = {})",
        best.point,
        best.cost_final
    );
    // Candidates come out sorted by initial cost.
    for pair in result.candidates.windows(2) {
        assert!(pair[0].cost_initial <= pair[1].cost_initial);
    }
    // Refinement never increases the cost.
    for r in &result.refined {
        assert!(r.cost_final <= r.cost_initial + 1e-12);
    }
}

#[test]
fn degenerate_single_sample_solve() {
    let problem = rosenbrock_fixed_problem(0.5f64, 80.0, 2, 1.0).unwrap();
    let model = train(&problem, &[100, 100], &quick_cross_opts(5, 3)).unwrap();
    let opts = SolveOptions {
        alpha: 1.0,
        n_samples: 1,
        k_best: 1,
        refine: None,
        seed: 1,
        ..SolveOptions::default()
    };
    let a = solve(&model, &problem, &[], &opts).unwrap();
    let b = solve(&model, &problem, &[], &opts).unwrap();
    // alpha = 1 is deterministic: the greedy mode of the conditional.
    assert_eq!(a.candidates[0].index, b.candidates[0].index);
    assert!(a.refined.is_empty());
}

#[test]
fn solve_argument_validation() {
    let problem = rosenbrock_fixed_problem(1.0f64, 100.0, 2, 1.0).unwrap();
    let model = train(&problem, &[50, 50], &quick_cross_opts(3, 4)).unwrap();
    let bad = SolveOptions {
        n_samples: 2,
        k_best: 5,
        ..SolveOptions::default()
    };
    assert!(matches!(
        solve(&model, &problem, &[], &bad),
        Err(TtgoError::InvalidArgument(_))
    ));
    let opts = SolveOptions::default();
    assert!(matches!(
        solve(&model, &problem, &[0.3], &opts),
        Err(TtgoError::InvalidArgument(_))
    ));
}

#[test]
fn evaluate_run_best_of_n_monotone_and_csv_shape() {
    let problem = rosenbrock_problem(2, 1.0f64).unwrap();
    let model = train(&problem, &[40, 40, 200, 200], &quick_cross_opts(16, 9)).unwrap();
    let tasks: Vec<Vec<f64>> = vec![
        vec![0.8, 90.0],
        vec![-0.5, 120.0],
        vec![0.2, 70.0],
        vec![1.2, 140.0],
    ];
    let table = evaluate_run(
        &model,
        &problem,
        &tasks,
        &[0.0, 0.75],
        &[1, 10, 100],
        true,
        &RefineOptions::default(),
        0.25,
        17,
    )
    .unwrap();
    // 2 alphas x 3 counts + 3 uniform rows.
    assert_eq!(table.rows.len(), 9);
    // Common random numbers: the best-of-N initial cost is
    // non-increasing in N within each arm.
    for arm_rows in table.rows.chunks(3) {
        assert!(arm_rows[0].mean_ci >= arm_rows[1].mean_ci - 1e-12);
        assert!(arm_rows[1].mean_ci >= arm_rows[2].mean_ci - 1e-12);
    }
    let csv = table.to_csv();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "alpha,n_samples,mean_ci,mean_cf,success_pct,arm"
    );
    assert_eq!(csv.lines().count(), 10);
    let uniform_row = csv.lines().last().unwrap();
    assert!(uniform_row.starts_with("-,"));
    assert!(uniform_row.ends_with(",uniform"));
}
