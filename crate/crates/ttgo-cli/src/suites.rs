//! Built-in benchmark suites: train a default model per problem, run
//! the evaluation protocol over sampled test tasks against the uniform
//! baseline, and emit the metrics tables as CSV.

use std::path::{Path, PathBuf};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ttgo::cross::CrossOptions;
use ttgo::error::TtgoError;
use ttgo::grid::{Domain, TaskSplit};
use ttgo::pipeline::{evaluate_run, train, Problem, RefineOptions};
use ttgo::problems::{
    gmm_problem, himmelblau_problem, planar_ik_problem, rosenbrock_fixed_problem,
    rosenbrock_problem, sinusoid_problem, Circle, GmmParams, IkCostParams, PlanarRobot, Scene,
};

pub struct SuiteOutcome {
    pub csv_path: PathBuf,
    pub summary: String,
    pub budget_exhausted: bool,
}

struct SuiteSpec {
    problem: Problem<f64>,
    grid_counts: Vec<usize>,
    cross: CrossOptions,
    tasks: Vec<Vec<f64>>,
    alphas: Vec<f64>,
    sample_counts: Vec<usize>,
    refine: RefineOptions,
}

pub fn run_suite(name: &str, out_dir: &Path, seed: u64) -> Result<SuiteOutcome, TtgoError> {
    let spec = build_spec(name, seed)?;
    let model = train(&spec.problem, &spec.grid_counts, &spec.cross)?;
    let report = model.report.clone().expect("train attaches a report");
    let table = evaluate_run(
        &model,
        &spec.problem,
        &spec.tasks,
        &spec.alphas,
        &spec.sample_counts,
        true,
        &spec.refine,
        0.25,
        seed.wrapping_add(1),
    )?;
    let csv_path = out_dir.join(format!("{name}.csv"));
    std::fs::write(&csv_path, table.to_csv()).map_err(|e| TtgoError::io(&csv_path, e))?;
    let report_path = out_dir.join(format!("{name}_report.json"));
    std::fs::write(
        &report_path,
        serde_json::to_string_pretty(&report).expect("report serializes"),
    )
    .map_err(|e| TtgoError::io(&report_path, e))?;

    let best_ttgo = table
        .rows
        .iter()
        .filter(|r| r.arm == "ttgo")
        .map(|r| r.success_pct)
        .fold(0.0f64, f64::max);
    let best_uniform = table
        .rows
        .iter()
        .filter(|r| r.arm == "uniform")
        .map(|r| r.success_pct)
        .fold(0.0f64, f64::max);
    Ok(SuiteOutcome {
        csv_path,
        summary: format!(
            "{} rows; best success {:.1}% (model) vs {:.1}% (uniform); {} oracle calls",
            table.rows.len(),
            best_ttgo,
            best_uniform,
            report.oracle_calls
        ),
        budget_exhausted: report.budget_exhausted,
    })
}

fn build_spec(name: &str, seed: u64) -> Result<SuiteSpec, TtgoError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(7));
    match name {
        // Minutes-scale suites for the four benchmark functions.
        "sinusoid" => Ok(SuiteSpec {
            problem: sinusoid_problem(2, 1.0)?,
            grid_counts: vec![500, 500],
            cross: CrossOptions {
                max_rank: 20,
                n_sweeps: 8,
                tol: 1e-3,
                seed,
                ..CrossOptions::default()
            },
            tasks: vec![vec![]],
            alphas: vec![0.0, 0.5, 0.75, 0.9],
            sample_counts: vec![1, 10, 100],
            refine: RefineOptions::default(),
        }),
        "rosenbrock" => {
            let problem = rosenbrock_problem(2, 1.0)?;
            let tasks = sample_tasks(&problem, 20, &mut rng);
            Ok(SuiteSpec {
                problem,
                grid_counts: vec![50, 50, 400, 400],
                cross: CrossOptions {
                    max_rank: 40,
                    n_sweeps: 10,
                    tol: 1e-3,
                    kick: 6,
                    seed,
                    ..CrossOptions::default()
                },
                tasks,
                alphas: vec![0.9, 0.75, 0.5, 0.0],
                sample_counts: vec![1, 10, 100],
                refine: RefineOptions {
                    max_iters: 2000,
                    ..RefineOptions::default()
                },
            })
        }
        "himmelblau" => {
            let problem = himmelblau_problem(1.0)?;
            let tasks = sample_tasks(&problem, 20, &mut rng);
            Ok(SuiteSpec {
                problem,
                grid_counts: vec![60, 60, 400, 400],
                cross: CrossOptions {
                    max_rank: 40,
                    n_sweeps: 10,
                    tol: 1e-3,
                    kick: 6,
                    seed,
                    ..CrossOptions::default()
                },
                tasks,
                alphas: vec![0.9, 0.75, 0.5, 0.0],
                sample_counts: vec![1, 10, 100],
                refine: RefineOptions::default(),
            })
        }
        "gmm" => {
            let d = 4;
            let params = random_mixture(d, 4, &mut rng);
            let problem = gmm_problem(params, TaskSplit::new(2, 2)?, -2.0, 2.0)?;
            let tasks = sample_tasks(&problem, 20, &mut rng);
            Ok(SuiteSpec {
                problem,
                grid_counts: vec![80; d],
                cross: CrossOptions {
                    max_rank: 12,
                    n_sweeps: 8,
                    tol: 1e-3,
                    seed,
                    ..CrossOptions::default()
                },
                tasks,
                alphas: vec![0.9, 0.75, 0.5, 0.0],
                sample_counts: vec![1, 10, 100],
                refine: RefineOptions::default(),
            })
        }
        "planar-ik" => {
            let robot = PlanarRobot::new(
                vec![1.0, 1.0, 1.0],
                vec![(-std::f64::consts::PI, std::f64::consts::PI); 3],
            )?;
            let scene = Scene::with_circles(
                vec![
                    Circle {
                        center: [1.3, 1.3],
                        radius: 0.35,
                    },
                    Circle {
                        center: [-1.4, 1.1],
                        radius: 0.3,
                    },
                    Circle {
                        center: [0.2, -1.7],
                        radius: 0.4,
                    },
                ],
                0.05,
            )?;
            let tasks = reachable_targets(&robot, &scene, 20, &mut rng);
            let task_domain = Domain::cube(-3.0, 3.0, 2)?;
            let problem = planar_ik_problem(
                robot,
                scene,
                task_domain,
                IkCostParams::default(),
                1.0,
            )?;
            Ok(SuiteSpec {
                problem,
                grid_counts: vec![100, 100, 60, 60, 60],
                cross: CrossOptions {
                    max_rank: 50,
                    n_sweeps: 10,
                    tol: 1e-3,
                    kick: 6,
                    seed,
                    ..CrossOptions::default()
                },
                tasks,
                alphas: vec![0.9, 0.0],
                sample_counts: vec![1, 10, 100],
                refine: RefineOptions::default(),
            })
        }
        // Seconds-scale smoke suite.
        "smoke" => Ok(SuiteSpec {
            problem: rosenbrock_fixed_problem(1.0, 100.0, 2, 1.0)?,
            grid_counts: vec![100, 100],
            cross: CrossOptions {
                max_rank: 5,
                n_sweeps: 4,
                tol: 1e-3,
                seed,
                ..CrossOptions::default()
            },
            tasks: vec![vec![]],
            alphas: vec![0.0, 0.9],
            sample_counts: vec![1, 10],
            refine: RefineOptions::default(),
        }),
        other => Err(TtgoError::InvalidArgument(format!(
            "unknown suite '{other}' (expected smoke, sinusoid, rosenbrock, himmelblau, gmm, planar-ik, or benchmarks)"
        ))),
    }
}

fn sample_tasks(problem: &Problem<f64>, count: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    match problem.task_domain() {
        Some(domain) => (0..count)
            .map(|_| {
                domain
                    .lower()
                    .iter()
                    .zip(domain.upper().iter())
                    .map(|(&lo, &hi)| rng.gen_range(lo..hi))
                    .collect()
            })
            .collect(),
        None => vec![vec![]],
    }
}

fn random_mixture(d: usize, components: usize, rng: &mut ChaCha8Rng) -> GmmParams<f64> {
    let mut centers = Vec::with_capacity(components);
    for _ in 0..components {
        centers.push((0..d).map(|_| rng.gen_range(-1.5..1.5)).collect());
    }
    let mut weights: Vec<f64> = (0..components).map(|_| rng.gen_range(0.4..0.9)).collect();
    weights[0] = 1.0; // a distinguished dominant component
    GmmParams {
        centers,
        sharpness: vec![8.0; components],
        weights,
    }
}

/// Reachable, collision-free end-effector targets: forward kinematics
/// of random collision-free configurations with surface clearance.
fn reachable_targets(
    robot: &PlanarRobot<f64>,
    scene: &Scene<f64>,
    count: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<Vec<f64>> {
    let mut tasks = Vec::with_capacity(count);
    while tasks.len() < count {
        let theta: Vec<f64> = robot
            .joint_limits
            .iter()
            .map(|&(lo, hi)| rng.gen_range(lo..hi))
            .collect();
        let clear = robot
            .body_points(&theta)
            .iter()
            .all(|&p| ttgo::problems::sdf(scene, p) > scene.margin + 0.02);
        if !clear {
            continue;
        }
        let ee = robot.end_effector(&theta);
        if ttgo::problems::sdf(scene, ee) < 0.2 {
            continue;
        }
        tasks.push(vec![ee[0], ee[1]]);
    }
    tasks
}
