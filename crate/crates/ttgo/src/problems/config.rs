//! JSON problem configurations: benchmark kinds with their parameters,
//! planar robots, scenes, grid counts, and the task split.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Result, TtgoError};
use crate::grid::Domain;
use crate::pipeline::Problem;
use crate::problems::benchmarks::{
    gmm_problem, himmelblau_problem, rosenbrock_fixed_problem, rosenbrock_problem,
    sinusoid_problem, GmmParams,
};
use crate::problems::planar::{
    planar_ik_problem, planar_motion_problem, BoxObstacle, Circle, IkCostParams, MotionCostParams,
    PlanarRobot, Scene,
};
use crate::problems::primitives::MotionPrimitive;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RobotConfig {
    pub link_lengths: Vec<f64>,
    pub joint_limits: Vec<(f64, f64)>,
    #[serde(default = "default_collision_points")]
    pub collision_points_per_link: usize,
}

fn default_collision_points() -> usize {
    4
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CircleConfig {
    pub center: [f64; 2],
    pub radius: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoxConfig {
    pub min: [f64; 2],
    pub max: [f64; 2],
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct SceneConfig {
    #[serde(default)]
    pub circles: Vec<CircleConfig>,
    #[serde(default)]
    pub boxes: Vec<BoxConfig>,
    #[serde(default = "default_margin")]
    pub margin: f64,
}

fn default_margin() -> f64 {
    0.05
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ProblemKindConfig {
    Sinusoid {
        #[serde(default = "default_two")]
        d2: usize,
    },
    Rosenbrock {
        #[serde(default = "default_two")]
        d2: usize,
        /// Freezes `(a, b)` and drops the task dimensions.
        #[serde(default)]
        fixed_task: Option<(f64, f64)>,
    },
    Himmelblau {},
    Gmm {
        d1: usize,
        d2: usize,
        centers: Vec<Vec<f64>>,
        sharpness: Vec<f64>,
        weights: Vec<f64>,
        #[serde(default = "default_gmm_bounds")]
        bounds: (f64, f64),
    },
    PlanarIk {
        robot: RobotConfig,
        #[serde(default)]
        scene: SceneConfig,
        task_lower: [f64; 2],
        task_upper: [f64; 2],
    },
    PlanarMotion {
        robot: RobotConfig,
        #[serde(default)]
        scene: SceneConfig,
        theta_start: Vec<f64>,
        task_lower: [f64; 2],
        task_upper: [f64; 2],
        #[serde(default = "default_two")]
        basis_count: usize,
        #[serde(default = "default_motion_steps")]
        n_steps: usize,
    },
}

fn default_two() -> usize {
    2
}

fn default_motion_steps() -> usize {
    100
}

fn default_gmm_bounds() -> (f64, f64) {
    (-2.0, 2.0)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProblemConfig {
    pub name: Option<String>,
    pub kind: ProblemKindConfig,
    #[serde(default = "default_beta")]
    pub beta: f64,
    /// Node counts per dimension; per-kind defaults apply when absent.
    #[serde(default)]
    pub grid_counts: Option<Vec<usize>>,
}

fn default_beta() -> f64 {
    1.0
}

impl ProblemConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text)
            .map_err(|e| TtgoError::InvalidArgument(format!("problem config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| TtgoError::io(path, e))?;
        Self::from_json(&text)
    }

    fn scene(cfg: &SceneConfig) -> Result<Scene<f64>> {
        if cfg.margin < 0.0 {
            return Err(TtgoError::InvalidArgument(
                "scene margin must be nonnegative".into(),
            ));
        }
        let mut scene = Scene::with_circles(
            cfg.circles
                .iter()
                .map(|c| Circle {
                    center: c.center,
                    radius: c.radius,
                })
                .collect(),
            cfg.margin,
        )?;
        scene.boxes = cfg
            .boxes
            .iter()
            .map(|b| BoxObstacle {
                min: b.min,
                max: b.max,
            })
            .collect();
        Ok(scene)
    }

    fn robot(cfg: &RobotConfig) -> Result<PlanarRobot<f64>> {
        let mut robot = PlanarRobot::new(cfg.link_lengths.clone(), cfg.joint_limits.clone())?;
        robot.collision_points_per_link = cfg.collision_points_per_link.max(1);
        Ok(robot)
    }

    /// Builds the problem plus the grid counts (defaults match the
    /// discretizations used throughout: 500 nodes for benchmark
    /// variables, 100 per task dimension and 50 per joint for the
    /// robot problems, 30 per basis weight).
    pub fn build(&self) -> Result<(Problem<f64>, Vec<usize>)> {
        let (problem, default_counts): (Problem<f64>, Vec<usize>) = match &self.kind {
            ProblemKindConfig::Sinusoid { d2 } => {
                (sinusoid_problem(*d2, self.beta)?, vec![500; *d2])
            }
            ProblemKindConfig::Rosenbrock { d2, fixed_task } => match fixed_task {
                Some((a, b)) => (
                    rosenbrock_fixed_problem(*a, *b, *d2, self.beta)?,
                    vec![500; *d2],
                ),
                None => {
                    let mut counts = vec![100, 100];
                    counts.extend(vec![500; *d2]);
                    (rosenbrock_problem(*d2, self.beta)?, counts)
                }
            },
            ProblemKindConfig::Himmelblau {} => {
                (himmelblau_problem(self.beta)?, vec![100, 100, 500, 500])
            }
            ProblemKindConfig::Gmm {
                d1,
                d2,
                centers,
                sharpness,
                weights,
                bounds,
            } => {
                let params = GmmParams {
                    centers: centers.clone(),
                    sharpness: sharpness.clone(),
                    weights: weights.clone(),
                };
                let split = crate::grid::TaskSplit::new(*d1, *d2)?;
                (
                    gmm_problem(params, split, bounds.0, bounds.1)?,
                    vec![100; d1 + d2],
                )
            }
            ProblemKindConfig::PlanarIk {
                robot,
                scene,
                task_lower,
                task_upper,
            } => {
                let robot = Self::robot(robot)?;
                let m = robot.dof();
                let task = Domain::new(task_lower.to_vec(), task_upper.to_vec())?;
                let mut counts = vec![100, 100];
                counts.extend(vec![50; m]);
                (
                    planar_ik_problem(
                        robot,
                        Self::scene(scene)?,
                        task,
                        IkCostParams::default(),
                        self.beta,
                    )?,
                    counts,
                )
            }
            ProblemKindConfig::PlanarMotion {
                robot,
                scene,
                theta_start,
                task_lower,
                task_upper,
                basis_count,
                n_steps,
            } => {
                let robot = Self::robot(robot)?;
                let m = robot.dof();
                let task = Domain::new(task_lower.to_vec(), task_upper.to_vec())?;
                let primitive = MotionPrimitive::new(*basis_count, *n_steps)?;
                let mut counts = vec![100, 100];
                counts.extend(vec![50; m]);
                counts.extend(vec![30; basis_count * m]);
                (
                    planar_motion_problem(
                        robot,
                        Self::scene(scene)?,
                        primitive,
                        theta_start.clone(),
                        task,
                        MotionCostParams::default(),
                        self.beta,
                    )?,
                    counts,
                )
            }
        };
        let counts = match &self.grid_counts {
            Some(counts) => {
                if counts.len() != problem.domain.dim() {
                    return Err(TtgoError::InvalidArgument(format!(
                        "grid_counts has {} entries, problem has {} dimensions",
                        counts.len(),
                        problem.domain.dim()
                    )));
                }
                counts.clone()
            }
            None => default_counts,
        };
        let mut problem = problem;
        if let Some(name) = &self.name {
            problem.name = name.clone();
        }
        Ok((problem, counts))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_benchmark_config() {
        let cfg = ProblemConfig::from_json(
            r#"{"name": "rb", "kind": {"type": "rosenbrock", "d2": 2}, "beta": 1.0}"#,
        )
        .unwrap();
        let (problem, counts) = cfg.build().unwrap();
        assert_eq!(problem.name, "rb");
        assert_eq!(problem.split.d1, 2);
        assert_eq!(counts, vec![100, 100, 500, 500]);
    }

    #[test]
    fn parses_planar_ik_config() {
        let cfg = ProblemConfig::from_json(
            r#"{
                "kind": {
                    "type": "planar_ik",
                    "robot": {"link_lengths": [1.0, 1.0], "joint_limits": [[-3.1, 3.1], [-3.1, 3.1]]},
                    "scene": {"circles": [{"center": [1.0, 1.0], "radius": 0.3}]},
                    "task_lower": [-2.0, -2.0],
                    "task_upper": [2.0, 2.0]
                }
            }"#,
        )
        .unwrap();
        let (problem, counts) = cfg.build().unwrap();
        assert_eq!(problem.domain.dim(), 4);
        assert_eq!(counts, vec![100, 100, 50, 50]);
        // Cost is evaluable at the domain center.
        let mid: Vec<f64> = problem
            .domain
            .lower()
            .iter()
            .zip(problem.domain.upper().iter())
            .map(|(lo, hi)| 0.5 * (lo + hi))
            .collect();
        assert!(problem.cost(&mid).is_finite());
    }

    #[test]
    fn grid_count_mismatch_rejected() {
        let cfg = ProblemConfig::from_json(
            r#"{"kind": {"type": "himmelblau"}, "grid_counts": [10, 10]}"#,
        )
        .unwrap();
        assert!(cfg.build().is_err());
    }

    #[test]
    fn bad_json_is_an_invalid_argument() {
        assert!(matches!(
            ProblemConfig::from_json("{"),
            Err(TtgoError::InvalidArgument(_))
        ));
    }
}
