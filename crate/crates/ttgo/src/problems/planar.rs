//! Planar-manipulator kinematics, analytic signed distance to circle
//! and box obstacles, and the reaching / motion-planning cost
//! structures built from them.

use crate::error::{Result, TtgoError};
use crate::grid::{Domain, TaskSplit};
use crate::pipeline::Problem;
use crate::problems::primitives::{shape_trajectory, MotionPrimitive};
use crate::scalar::Scalar;

/// Serial planar arm with revolute joints.
#[derive(Debug, Clone)]
pub struct PlanarRobot<T> {
    pub link_lengths: Vec<T>,
    pub joint_limits: Vec<(T, T)>,
    /// Equispaced collision proxy points per link.
    pub collision_points_per_link: usize,
}

impl<T: Scalar> PlanarRobot<T> {
    pub fn new(link_lengths: Vec<T>, joint_limits: Vec<(T, T)>) -> Result<Self> {
        if link_lengths.is_empty() || link_lengths.len() != joint_limits.len() {
            return Err(TtgoError::InvalidArgument(
                "robot needs matching link lengths and joint limits".into(),
            ));
        }
        if link_lengths.iter().any(|&l| !(l > T::zero())) {
            return Err(TtgoError::InvalidArgument(
                "link lengths must be positive".into(),
            ));
        }
        if joint_limits.iter().any(|&(lo, hi)| !(lo < hi)) {
            return Err(TtgoError::InvalidArgument(
                "joint limits must be ordered".into(),
            ));
        }
        Ok(Self {
            link_lengths,
            joint_limits,
            collision_points_per_link: 4,
        })
    }

    pub fn dof(&self) -> usize {
        self.link_lengths.len()
    }

    pub fn reach(&self) -> T {
        self.link_lengths.iter().copied().sum()
    }

    /// Cumulative-angle forward kinematics: base at the origin, returns
    /// the joint positions followed by the end effector (m + 1 points).
    pub fn fk(&self, theta: &[T]) -> Vec<[T; 2]> {
        let mut points = Vec::with_capacity(self.dof() + 1);
        let mut pos = [T::zero(), T::zero()];
        points.push(pos);
        let mut angle = T::zero();
        for (&l, &t) in self.link_lengths.iter().zip(theta.iter()) {
            angle += t;
            pos = [pos[0] + l * angle.cos(), pos[1] + l * angle.sin()];
            points.push(pos);
        }
        points
    }

    pub fn end_effector(&self, theta: &[T]) -> [T; 2] {
        *self.fk(theta).last().unwrap()
    }

    /// Collision proxy: equispaced points along each link (the link end
    /// included).
    pub fn body_points(&self, theta: &[T]) -> Vec<[T; 2]> {
        let joints = self.fk(theta);
        let c = self.collision_points_per_link;
        let mut pts = Vec::with_capacity(self.dof() * c);
        for seg in joints.windows(2) {
            let (a, b) = (seg[0], seg[1]);
            for i in 0..c {
                let s = T::from_usize(i + 1).unwrap() / T::from_usize(c).unwrap();
                pts.push([a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])]);
            }
        }
        pts
    }

    /// Decision box spanned by the joint limits.
    pub fn joint_domain(&self) -> Domain<T> {
        Domain::new(
            self.joint_limits.iter().map(|&(lo, _)| lo).collect(),
            self.joint_limits.iter().map(|&(_, hi)| hi).collect(),
        )
        .expect("ordered limits")
    }
}

#[derive(Debug, Clone)]
pub struct Circle<T> {
    pub center: [T; 2],
    pub radius: T,
}

#[derive(Debug, Clone)]
pub struct BoxObstacle<T> {
    pub min: [T; 2],
    pub max: [T; 2],
}

/// Obstacles plus the safety margin used by the hinge cost.
#[derive(Debug, Clone)]
pub struct Scene<T> {
    pub circles: Vec<Circle<T>>,
    pub boxes: Vec<BoxObstacle<T>>,
    pub margin: T,
}

impl<T: Scalar> Scene<T> {
    pub fn empty() -> Self {
        Self {
            circles: Vec::new(),
            boxes: Vec::new(),
            margin: T::from_f64_c(0.05),
        }
    }

    pub fn with_circles(circles: Vec<Circle<T>>, margin: T) -> Result<Self> {
        if circles.iter().any(|c| !(c.radius > T::zero())) {
            return Err(TtgoError::InvalidArgument(
                "circle radii must be positive".into(),
            ));
        }
        if margin < T::zero() {
            return Err(TtgoError::InvalidArgument(
                "safety margin must be nonnegative".into(),
            ));
        }
        Ok(Self {
            circles,
            boxes: Vec::new(),
            margin,
        })
    }

    pub fn is_empty(&self) -> bool {
        self.circles.is_empty() && self.boxes.is_empty()
    }
}

/// Signed distance to the nearest obstacle surface: negative inside,
/// the minimum over all obstacles, `+inf` for an empty scene.
pub fn sdf<T: Scalar>(scene: &Scene<T>, p: [T; 2]) -> T {
    let mut best = T::infinity();
    for c in &scene.circles {
        let dx = p[0] - c.center[0];
        let dy = p[1] - c.center[1];
        let dist = (dx * dx + dy * dy).sqrt() - c.radius;
        best = best.min(dist);
    }
    for b in &scene.boxes {
        let half = [
            (b.max[0] - b.min[0]) * T::from_f64_c(0.5),
            (b.max[1] - b.min[1]) * T::from_f64_c(0.5),
        ];
        let center = [
            (b.max[0] + b.min[0]) * T::from_f64_c(0.5),
            (b.max[1] + b.min[1]) * T::from_f64_c(0.5),
        ];
        let q = [
            (p[0] - center[0]).abs() - half[0],
            (p[1] - center[1]).abs() - half[1],
        ];
        let outside = (q[0].max(T::zero()) * q[0].max(T::zero())
            + q[1].max(T::zero()) * q[1].max(T::zero()))
        .sqrt();
        let inside = q[0].max(q[1]).min(T::zero());
        best = best.min(outside + inside);
    }
    best
}

/// Scaling factors of the reaching cost; each is the acceptable value
/// of its term.
#[derive(Debug, Clone)]
pub struct IkCostParams<T> {
    pub beta_position: T,
    pub beta_obstacle: T,
    pub d_safe: T,
}

impl<T: Scalar> Default for IkCostParams<T> {
    fn default() -> Self {
        Self {
            beta_position: T::from_f64_c(0.05),
            beta_obstacle: T::from_f64_c(0.01),
            d_safe: T::from_f64_c(0.05),
        }
    }
}

/// Hinge obstacle penalty summed over the collision proxy points.
fn obstacle_cost<T: Scalar>(scene: &Scene<T>, points: &[[T; 2]], d_safe: T) -> T {
    if scene.is_empty() {
        return T::zero();
    }
    let mut acc = T::zero();
    for &p in points {
        let gap = d_safe - sdf(scene, p);
        if gap > T::zero() {
            acc += gap * gap;
        }
    }
    acc
}

/// Reaching cost: position error plus the obstacle hinge, each scaled
/// by its acceptable value and averaged. The planar end-effector
/// orientation term is intentionally absent (position targets only), so
/// the average is over two terms.
pub fn ik_cost<T: Scalar>(
    robot: &PlanarRobot<T>,
    scene: &Scene<T>,
    target: [T; 2],
    theta: &[T],
    params: &IkCostParams<T>,
) -> T {
    let ee = robot.end_effector(theta);
    let dx = target[0] - ee[0];
    let dy = target[1] - ee[1];
    let c_p = (dx * dx + dy * dy).sqrt();
    let c_obst = obstacle_cost(scene, &robot.body_points(theta), params.d_safe);
    let half = T::from_f64_c(0.5);
    half * (c_p / params.beta_position + c_obst / params.beta_obstacle)
}

/// Reaching problem: task = target position in `task_domain`, decision
/// = joint angles within limits.
pub fn planar_ik_problem<T: Scalar>(
    robot: PlanarRobot<T>,
    scene: Scene<T>,
    task_domain: Domain<T>,
    params: IkCostParams<T>,
    beta: T,
) -> Result<Problem<T>> {
    if task_domain.dim() != 2 {
        return Err(TtgoError::InvalidArgument(
            "the reaching task domain is two-dimensional".into(),
        ));
    }
    let m = robot.dof();
    let domain = task_domain.concat(&robot.joint_domain());
    let split = TaskSplit::new(2, m)?;
    Problem::new("planar-ik", domain, split, beta, move |x: &[T]| {
        ik_cost(&robot, &scene, [x[0], x[1]], &x[2..], &params)
    })
}

/// Scaling factors of the motion cost.
#[derive(Debug, Clone)]
pub struct MotionCostParams<T> {
    pub beta_position: T,
    pub beta_obstacle: T,
    pub beta_control: T,
    pub d_safe: T,
}

impl<T: Scalar> Default for MotionCostParams<T> {
    fn default() -> Self {
        Self {
            beta_position: T::from_f64_c(0.05),
            beta_obstacle: T::from_f64_c(0.1),
            beta_control: T::from_f64_c(2.0),
            d_safe: T::from_f64_c(0.05),
        }
    }
}

/// Motion-planning cost for one reaching segment. The decision vector
/// is the final configuration (m values) followed by the basis weights
/// (J per joint, joint-major). Position error is taken at the segment
/// endpoint; the obstacle hinge accumulates over all time steps; the
/// control term is the joint path length plus the end-effector path
/// length, equally weighted. Three terms, averaged.
pub fn motion_cost<T: Scalar>(
    robot: &PlanarRobot<T>,
    scene: &Scene<T>,
    primitive: &MotionPrimitive<T>,
    theta_start: &[T],
    target: [T; 2],
    decision: &[T],
    params: &MotionCostParams<T>,
) -> T {
    let m = robot.dof();
    let j = primitive.basis_count;
    debug_assert_eq!(decision.len(), m + j * m);
    let theta_final = &decision[..m];
    let weights = &decision[m..];

    // Per-joint shaped trajectories on the shared phase grid.
    let n = primitive.n_steps;
    let mut joint_curves: Vec<Vec<T>> = Vec::with_capacity(m);
    for joint in 0..m {
        let w = &weights[joint * j..(joint + 1) * j];
        let raw = primitive.trajectory(w);
        let (lo, hi) = robot.joint_limits[joint];
        let shaped = shape_trajectory(
            &raw,
            theta_start[joint],
            theta_final[joint],
            (lo, hi),
            primitive.window,
        )
        .expect("boundary values within joint limits");
        joint_curves.push(shaped);
    }

    let theta_at = |i: usize| -> Vec<T> { joint_curves.iter().map(|c| c[i]).collect() };

    let mut c_obst = T::zero();
    let mut c_joint_len = T::zero();
    let mut c_ee_len = T::zero();
    let mut prev_theta = theta_at(0);
    let mut prev_ee = robot.end_effector(&prev_theta);
    c_obst += obstacle_cost(scene, &robot.body_points(&prev_theta), params.d_safe);
    for i in 1..=n {
        let theta = theta_at(i);
        let ee = robot.end_effector(&theta);
        c_obst += obstacle_cost(scene, &robot.body_points(&theta), params.d_safe);
        c_joint_len += theta
            .iter()
            .zip(prev_theta.iter())
            .map(|(&a, &b)| (a - b) * (a - b))
            .sum::<T>()
            .sqrt();
        let dx = ee[0] - prev_ee[0];
        let dy = ee[1] - prev_ee[1];
        c_ee_len += (dx * dx + dy * dy).sqrt();
        prev_theta = theta;
        prev_ee = ee;
    }
    let ee_final = prev_ee;
    let dx = target[0] - ee_final[0];
    let dy = target[1] - ee_final[1];
    let c_p = (dx * dx + dy * dy).sqrt();
    let c_control = c_joint_len + c_ee_len;

    let third = T::one() / T::from_f64_c(3.0);
    third
        * (c_p / params.beta_position
            + c_obst / params.beta_obstacle
            + c_control / params.beta_control)
}

/// Motion-planning problem: task = target position, decision = final
/// configuration plus basis weights (weight bounds equal joint limits).
pub fn planar_motion_problem<T: Scalar>(
    robot: PlanarRobot<T>,
    scene: Scene<T>,
    primitive: MotionPrimitive<T>,
    theta_start: Vec<T>,
    task_domain: Domain<T>,
    params: MotionCostParams<T>,
    beta: T,
) -> Result<Problem<T>> {
    if task_domain.dim() != 2 {
        return Err(TtgoError::InvalidArgument(
            "the reaching task domain is two-dimensional".into(),
        ));
    }
    let m = robot.dof();
    if theta_start.len() != m {
        return Err(TtgoError::InvalidArgument(
            "start configuration length must match the arm".into(),
        ));
    }
    let j = primitive.basis_count;
    // Decision box: joint limits for the final configuration, repeated
    // per basis function for the weights.
    let joint_box = robot.joint_domain();
    let mut lower: Vec<T> = joint_box.lower().to_vec();
    let mut upper: Vec<T> = joint_box.upper().to_vec();
    for joint in 0..m {
        let (lo, hi) = robot.joint_limits[joint];
        for _ in 0..j {
            lower.push(lo);
            upper.push(hi);
        }
    }
    let decision = Domain::new(lower, upper)?;
    let domain = task_domain.concat(&decision);
    let split = TaskSplit::new(2, m + j * m)?;
    Problem::new("planar-motion", domain, split, beta, move |x: &[T]| {
        motion_cost(
            &robot,
            &scene,
            &primitive,
            &theta_start,
            [x[0], x[1]],
            &x[2..],
            &params,
        )
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn three_link() -> PlanarRobot<f64> {
        PlanarRobot::new(
            vec![1.0, 1.0, 1.0],
            vec![(-std::f64::consts::PI, std::f64::consts::PI); 3],
        )
        .unwrap()
    }

    #[test]
    fn fk_straight_and_bent() {
        let robot = three_link();
        let ee = robot.end_effector(&[0.0, 0.0, 0.0]);
        assert!((ee[0] - 3.0).abs() < 1e-12 && ee[1].abs() < 1e-12);
        let ee = robot.end_effector(&[FRAC_PI_2, 0.0, 0.0]);
        assert!(ee[0].abs() < 1e-12 && (ee[1] - 3.0).abs() < 1e-12);
        let ee = robot.end_effector(&[FRAC_PI_2, -FRAC_PI_2, 0.0]);
        assert!((ee[0] - 2.0).abs() < 1e-12 && (ee[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sdf_circle_inside_outside() {
        let scene = Scene::with_circles(
            vec![Circle {
                center: [0.0f64, 0.0],
                radius: 1.0,
            }],
            0.05,
        )
        .unwrap();
        assert!((sdf(&scene, [2.0, 0.0]) - 1.0).abs() < 1e-12);
        assert!((sdf(&scene, [0.0, 0.0]) + 1.0).abs() < 1e-12);
    }

    #[test]
    fn sdf_takes_min_over_obstacles() {
        let scene = Scene::with_circles(
            vec![
                Circle {
                    center: [-2.0f64, 0.0],
                    radius: 1.0,
                },
                Circle {
                    center: [2.0, 0.0],
                    radius: 1.0,
                },
            ],
            0.05,
        )
        .unwrap();
        // Equidistant point: distance 1 to both surfaces.
        assert!((sdf(&scene, [0.0, 0.0]) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sdf_box_obstacle() {
        let scene = Scene::<f64> {
            circles: vec![],
            boxes: vec![BoxObstacle {
                min: [0.0, 0.0],
                max: [2.0, 2.0],
            }],
            margin: 0.05,
        };
        assert!((sdf(&scene, [3.0, 1.0]) - 1.0).abs() < 1e-12);
        assert!((sdf(&scene, [1.0, 1.0]) + 1.0).abs() < 1e-12);
        assert!((sdf(&scene, [3.0, 3.0]) - std::f64::consts::SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn empty_scene_has_infinite_clearance() {
        let scene = Scene::<f64>::empty();
        assert!(sdf(&scene, [0.0, 0.0]).is_infinite());
        let robot = three_link();
        let c = ik_cost(
            &robot,
            &scene,
            robot.end_effector(&[0.3, -0.2, 0.5]),
            &[0.3, -0.2, 0.5],
            &IkCostParams::default(),
        );
        assert!(c.abs() < 1e-12);
    }

    #[test]
    fn obstacle_hinge_zero_at_margin() {
        let robot = PlanarRobot::new(vec![1.0], vec![(-3.2, 3.2)]).unwrap();
        // Obstacle placed so the link tip sits exactly at margin
        // distance from the surface.
        let d_safe = 0.05f64;
        let scene = Scene::with_circles(
            vec![Circle {
                center: [1.0 + 0.5 + d_safe, 0.0],
                radius: 0.5,
            }],
            d_safe,
        )
        .unwrap();
        let params = IkCostParams {
            d_safe,
            ..IkCostParams::default()
        };
        let c = ik_cost(&robot, &scene, [1.0, 0.0], &[0.0], &params);
        assert!(c.abs() < 1e-12, "hinge boundary should contribute zero");
    }

    #[test]
    fn stationary_motion_costs_nothing() {
        let robot = three_link();
        let scene = Scene::empty();
        let primitive = MotionPrimitive::new(2, 50).unwrap();
        let theta0 = vec![0.4, -0.3, 0.2];
        let target = robot.end_effector(&theta0);
        let mut decision = theta0.clone();
        decision.extend(vec![0.0; 6]);
        // Zero weights with tau0 = tau1 give a constant trajectory.
        let c = motion_cost(
            &robot,
            &scene,
            &primitive,
            &theta0,
            target,
            &decision,
            &MotionCostParams::default(),
        );
        assert!(c.abs() < 1e-10, "stationary cost {c}");
    }

    #[test]
    fn control_cost_stable_under_time_refinement() {
        let robot = three_link();
        let scene = Scene::empty();
        let theta0 = vec![0.0, 0.0, 0.0];
        let theta1 = vec![0.9, -0.7, 0.4];
        let weights = vec![0.3, -0.2, 0.1, 0.25, -0.15, 0.05];
        let control_len = |n: usize| -> f64 {
            let primitive = MotionPrimitive::new(2, n).unwrap();
            let mut decision = theta1.clone();
            decision.extend(weights.iter().copied());
            // beta_control = 1 and huge betas elsewhere isolate the
            // control term (times 1/3).
            let params = MotionCostParams {
                beta_position: 1e30,
                beta_obstacle: 1e30,
                beta_control: 1.0,
                d_safe: 0.05,
            };
            3.0 * motion_cost(
                &robot,
                &scene,
                &primitive,
                &theta0,
                [0.0, 0.0],
                &decision,
                &params,
            )
        };
        let c100 = control_len(100);
        let c200 = control_len(200);
        assert!(
            (c100 - c200).abs() / c100 < 0.02,
            "path length drifted: {c100} vs {c200}"
        );
    }
}
