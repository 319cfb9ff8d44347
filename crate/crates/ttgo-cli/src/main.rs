//! Command-line driver: train a model from a problem configuration,
//! solve tasks against a trained model, draw raw samples, run the
//! benchmark suites, and inspect model files.
//!
//! Exit codes: 0 success, 2 invalid arguments, 3 model-format error,
//! 4 training stopped on the sweep budget (warning state).

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ttgo::cross::CrossOptions;
use ttgo::error::TtgoError;
use ttgo::persist::{load_model, save_model};
use ttgo::pipeline::{solve, train, Problem, RefineOptions, SolveOptions, TtgoModel};
use ttgo::problems::ProblemConfig;

mod suites;

const EXIT_INVALID_ARGS: u8 = 2;
const EXIT_MODEL_FORMAT: u8 = 3;
const EXIT_BUDGET_WARNING: u8 = 4;

#[derive(Parser)]
#[command(
    name = "ttgo",
    about = "Tensor-train surrogate models for global optimization",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train a model from a problem configuration and save it.
    Train(TrainArgs),
    /// Condition a model on a task, sample candidates, and refine the
    /// best ones.
    Solve(SolveArgs),
    /// Draw a raw sample batch from a (possibly conditioned) model.
    Sample(SampleArgs),
    /// Run a benchmark suite and emit its metrics tables.
    Benchmark(BenchmarkArgs),
    /// Print ranks, parameter count, and grid summary of a model file.
    Info(InfoArgs),
}

#[derive(Args)]
struct TrainArgs {
    /// Problem configuration (JSON).
    #[arg(long)]
    problem: PathBuf,
    /// Output model file.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 20)]
    max_rank: usize,
    #[arg(long, default_value_t = 8)]
    sweeps: usize,
    #[arg(long, default_value_t = 1e-3)]
    tol: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Rank enrichment per sweep.
    #[arg(long, default_value_t = 4)]
    kick: usize,
    /// Comma-separated node counts per dimension (defaults per problem
    /// kind otherwise).
    #[arg(long, value_delimiter = ',')]
    grid_counts: Option<Vec<usize>>,
}

#[derive(Args)]
struct SolveArgs {
    /// Trained model file.
    #[arg(long)]
    model: PathBuf,
    /// Comma-separated task-parameter values.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    task: Vec<f64>,
    #[arg(long, default_value_t = 0.75)]
    alpha: f64,
    #[arg(long, default_value_t = 100)]
    samples: usize,
    /// Number of candidates kept and refined.
    #[arg(long, default_value_t = 10)]
    top: usize,
    /// Skip local refinement.
    #[arg(long)]
    no_refine: bool,
    /// Output path; `.json` gets JSON, anything else CSV.
    #[arg(long)]
    out: PathBuf,
    /// Problem configuration; required to evaluate costs and refine.
    /// Without it only model-density ranking is available.
    #[arg(long)]
    problem: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0.25)]
    success_threshold: f64,
}

#[derive(Args)]
struct SampleArgs {
    #[arg(long)]
    model: PathBuf,
    /// Optional comma-separated task values to condition on.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    task: Option<Vec<f64>>,
    #[arg(long, default_value_t = 0.0)]
    alpha: f64,
    #[arg(long, default_value_t = 100)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output CSV path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct BenchmarkArgs {
    /// Suite name: smoke, sinusoid, rosenbrock, himmelblau, gmm,
    /// planar-ik, or benchmarks (the four function suites).
    #[arg(long)]
    suite: String,
    /// Output directory for the metrics tables.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct InfoArgs {
    #[arg(long)]
    model: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}

fn exit_code_for(err: &TtgoError) -> u8 {
    match err {
        TtgoError::Format(_) => EXIT_MODEL_FORMAT,
        TtgoError::Io { .. } => EXIT_MODEL_FORMAT,
        TtgoError::InvalidArgument(_)
        | TtgoError::InvalidGrid(_)
        | TtgoError::InvalidValue(_)
        | TtgoError::IndexOutOfRange(_) => EXIT_INVALID_ARGS,
        _ => 1,
    }
}

fn run(cli: Cli) -> Result<ExitCode, TtgoError> {
    match cli.command {
        Command::Train(args) => cmd_train(args),
        Command::Solve(args) => cmd_solve(args),
        Command::Sample(args) => cmd_sample(args),
        Command::Benchmark(args) => cmd_benchmark(args),
        Command::Info(args) => cmd_info(args),
    }
}

fn write_text(path: &Path, text: &str) -> Result<(), TtgoError> {
    std::fs::write(path, text).map_err(|e| TtgoError::io(path, e))
}

fn cmd_train(args: TrainArgs) -> Result<ExitCode, TtgoError> {
    let config = ProblemConfig::load(&args.problem)?;
    let (problem, default_counts) = config.build()?;
    let counts = args.grid_counts.unwrap_or(default_counts);
    let opts = CrossOptions {
        max_rank: args.max_rank,
        n_sweeps: args.sweeps,
        tol: args.tol,
        seed: args.seed,
        kick: args.kick,
        ..CrossOptions::default()
    };
    let model = train(&problem, &counts, &opts)?;
    save_model(&model, &args.out)?;
    let report = model.report.as_ref().expect("train attaches a report");
    let last_err = report
        .checkpoints
        .last()
        .map(|c| c.rel_rms)
        .unwrap_or(f64::NAN);
    println!(
        "trained '{}': d = {}, ranks {:?}, {} oracle calls, validation rel RMS {:.3e}, {:.0} ms",
        problem.name,
        model.grid.dim(),
        model.tt.ranks(),
        report.oracle_calls,
        last_err,
        model.offline_ms
    );
    println!("model written to {}", args.out.display());
    if report.budget_exhausted {
        eprintln!(
            "warning: sweep budget exhausted before reaching tol = {:.1e}; best model kept",
            args.tol
        );
        return Ok(ExitCode::from(EXIT_BUDGET_WARNING));
    }
    Ok(ExitCode::SUCCESS)
}

fn load_problem_for(
    model: &TtgoModel<f64>,
    path: &Option<PathBuf>,
) -> Result<Option<Problem<f64>>, TtgoError> {
    let Some(path) = path else {
        return Ok(None);
    };
    let (problem, _) = ProblemConfig::load(path)?.build()?;
    if problem.domain.dim() != model.grid.dim() || problem.split != model.split {
        return Err(TtgoError::InvalidArgument(format!(
            "problem '{}' does not match the model (dims {} vs {}, split {:?} vs {:?})",
            problem.name,
            problem.domain.dim(),
            model.grid.dim(),
            problem.split,
            model.split
        )));
    }
    Ok(Some(problem))
}

fn cmd_solve(args: SolveArgs) -> Result<ExitCode, TtgoError> {
    let model = load_model(&args.model)?;
    let problem = load_problem_for(&model, &args.problem)?;
    if args.task.len() != model.split.d1 {
        return Err(TtgoError::InvalidArgument(format!(
            "task has {} components, model expects {}",
            args.task.len(),
            model.split.d1
        )));
    }
    let json_out = args.out.extension().is_some_and(|e| e == "json");

    match problem {
        Some(problem) => {
            let opts = SolveOptions {
                alpha: args.alpha,
                n_samples: args.samples,
                k_best: args.top,
                refine: (!args.no_refine).then(RefineOptions::default),
                seed: args.seed,
                success_threshold: args.success_threshold,
            };
            let result = solve(&model, &problem, &args.task, &opts)?;
            if json_out {
                let value = serde_json::json!({
                    "task": args.task,
                    "candidates": result.candidates,
                    "refined": result.refined,
                    "online_ms": result.online_ms,
                });
                write_text(&args.out, &serde_json::to_string_pretty(&value).unwrap())?;
            } else {
                let mut csv =
                    String::from("kind,point,cost_initial,cost_final,iterations,success\n");
                for c in result.candidates.iter().take(args.top) {
                    csv.push_str(&format!(
                        "candidate,\"{}\",{:.16e},,,\n",
                        join_floats(&c.point),
                        c.cost_initial
                    ));
                }
                for r in &result.refined {
                    csv.push_str(&format!(
                        "refined,\"{}\",{:.16e},{:.16e},{},{}\n",
                        join_floats(&r.point),
                        r.cost_initial,
                        r.cost_final,
                        r.iterations,
                        r.success
                    ));
                }
                write_text(&args.out, &csv)?;
            }
            let shown = result
                .refined
                .first()
                .map(|r| format!("best c_f = {:.4e}", r.cost_final))
                .or_else(|| {
                    result
                        .candidates
                        .first()
                        .map(|c| format!("best c_i = {:.4e}", c.cost_initial))
                })
                .unwrap_or_default();
            println!(
                "solved in {:.1} ms ({} candidates); {}",
                result.online_ms,
                result.candidates.len(),
                shown
            );
        }
        None => {
            if !args.no_refine {
                return Err(TtgoError::InvalidArgument(
                    "refinement needs --problem <cfg>; pass --no-refine for density-ranked candidates only"
                        .into(),
                ));
            }
            // Without a cost oracle: rank candidates by model density.
            let (sampler, grid) = model.conditional_sampler(&args.task, args.alpha, args.seed)?;
            let batch = sampler.sample(args.samples, &grid)?;
            let mut scored: Vec<(f64, Vec<f64>)> = batch
                .indices
                .iter()
                .zip(batch.points.iter())
                .map(|(idx, p)| {
                    let density = sampler.model().eval_index(idx).unwrap_or(f64::NAN).abs();
                    (density, p.clone())
                })
                .collect();
            scored.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(std::cmp::Ordering::Equal));
            scored.dedup_by(|a, b| a.1 == b.1);
            scored.truncate(args.top);
            if json_out {
                let value = serde_json::json!({
                    "task": args.task,
                    "candidates": scored
                        .iter()
                        .map(|(d, p)| serde_json::json!({"density": d, "point": p}))
                        .collect::<Vec<_>>(),
                });
                write_text(&args.out, &serde_json::to_string_pretty(&value).unwrap())?;
            } else {
                let mut csv = String::from("kind,point,density\n");
                for (d, p) in &scored {
                    csv.push_str(&format!("candidate,\"{}\",{:.16e}\n", join_floats(p), d));
                }
                write_text(&args.out, &csv)?;
            }
            println!("sampled {} density-ranked candidates", scored.len());
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn join_floats(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| format!("{v:.16e}"))
        .collect::<Vec<_>>()
        .join(",")
}

fn cmd_sample(args: SampleArgs) -> Result<ExitCode, TtgoError> {
    let model = load_model(&args.model)?;
    let task = args.task.unwrap_or_default();
    if !task.is_empty() && task.len() != model.split.d1 {
        return Err(TtgoError::InvalidArgument(format!(
            "task has {} components, model expects {}",
            task.len(),
            model.split.d1
        )));
    }
    let (sampler, grid) = if task.is_empty() && model.split.d1 > 0 {
        // No conditioning requested: sample the joint model.
        (
            ttgo::sampler::TtSampler::build(model.tt.clone(), args.alpha, args.seed)?,
            model.grid.clone(),
        )
    } else {
        model.conditional_sampler(&task, args.alpha, args.seed)?
    };
    let batch = sampler.sample(args.n, &grid)?;
    write_text(&args.out, &batch.to_csv())?;
    println!(
        "wrote {} samples ({} dimensions) to {}",
        batch.len(),
        grid.dim(),
        args.out.display()
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_info(args: InfoArgs) -> Result<ExitCode, TtgoError> {
    let model = load_model(&args.model)?;
    println!("model: {}", args.model.display());
    println!(
        "  dimensions: {} (task {}, decision {})",
        model.grid.dim(),
        model.split.d1,
        model.split.d2
    );
    println!("  rank chain: {:?}", model.tt.ranks());
    println!("  parameters: {}", model.tt.num_params());
    println!("  beta: {}", model.beta);
    println!("  transform id: {}", model.transform.id());
    println!("  grid:");
    for k in 0..model.grid.dim() {
        let nodes = model.grid.nodes(k);
        println!(
            "    dim {k}: {} nodes on [{}, {}]",
            nodes.len(),
            nodes[0],
            nodes[nodes.len() - 1]
        );
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_benchmark(args: BenchmarkArgs) -> Result<ExitCode, TtgoError> {
    std::fs::create_dir_all(&args.out).map_err(|e| TtgoError::io(&args.out, e))?;
    let names: Vec<&str> = match args.suite.as_str() {
        "benchmarks" => vec!["sinusoid", "rosenbrock", "himmelblau", "gmm"],
        other => vec![other],
    };
    let mut any_budget_warning = false;
    for name in names {
        let outcome = suites::run_suite(name, &args.out, args.seed)?;
        any_budget_warning |= outcome.budget_exhausted;
        println!(
            "suite '{name}': {} -> {}",
            outcome.summary,
            outcome.csv_path.display()
        );
    }
    if any_budget_warning {
        return Ok(ExitCode::from(EXIT_BUDGET_WARNING));
    }
    Ok(ExitCode::SUCCESS)
}
