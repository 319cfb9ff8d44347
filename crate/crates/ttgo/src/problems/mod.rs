//! Problem library: benchmark functions, planar-manipulator costs, and
//! motion primitives, plus JSON configuration loading.

pub mod benchmarks;
pub mod config;
pub mod planar;
pub mod primitives;

pub use benchmarks::{
    benchmark_cost, gmm_problem, himmelblau_cost, himmelblau_problem, rosenbrock_cost,
    rosenbrock_fixed_problem, rosenbrock_problem, sinusoid_cost, sinusoid_problem, BenchmarkKind,
    BenchmarkSpec, GmmParams,
};
pub use config::{ProblemConfig, ProblemKindConfig};
pub use planar::{
    ik_cost, motion_cost, planar_ik_problem, planar_motion_problem, sdf, BoxObstacle, Circle,
    IkCostParams, MotionCostParams, PlanarRobot, Scene,
};
pub use primitives::{shape_trajectory, MotionPrimitive};
