use ttgo::cross::CrossOptions;
use ttgo::grid::Domain;
use ttgo::pipeline::{train, evaluate_run, RefineOptions};
use ttgo::problems::{planar_ik_problem, Circle, IkCostParams, PlanarRobot, Scene};
use rand::rngs::StdRng; use rand::{Rng, SeedableRng};

fn main() {
    // Unit-reach arm: paper-equivalent relative tolerances.
    let robot = PlanarRobot::new(vec![0.4,0.3,0.3], vec![(-std::f64::consts::PI, std::f64::consts::PI);3]).unwrap();
    let scene = Scene::with_circles(vec![
        Circle{center:[0.45,0.45],radius:0.13},
        Circle{center:[-0.5,0.35],radius:0.11},
        Circle{center:[0.05,-0.55],radius:0.14}], 0.05).unwrap();
    let mut rng = StdRng::seed_from_u64(33);
    let mut tasks = vec![];
    while tasks.len() < 100 {
        let theta: Vec<f64> = robot.joint_limits.iter().map(|&(lo,hi)| rng.gen_range(lo..hi)).collect();
        if !robot.body_points(&theta).iter().all(|&p| ttgo::problems::sdf(&scene,p) > 0.07) { continue; }
        let ee = robot.end_effector(&theta);
        if ttgo::problems::sdf(&scene,[ee[0],ee[1]]) < 0.1 { continue; }
        tasks.push(vec![ee[0], ee[1]]);
    }
    let problem = planar_ik_problem(robot, scene, Domain::cube(-1.0,1.0,2).unwrap(), IkCostParams::default(), 1.0).unwrap();
    for (n1, n2, rank, kick, seed) in [
        (400usize, 90usize, 70usize, 8usize, 12u64),
        (400, 90, 70, 8, 13),
        (400, 90, 70, 8, 14),
    ] {
        let cross = CrossOptions { max_rank: rank, n_sweeps: 16, tol: 1e-12, kick, seed, column_floor: 1e-20, ..Default::default() };
        let t0 = std::time::Instant::now();
        let model = train(&problem, &[n1, n1, n2, n2, n2], &cross).unwrap();
        let table = evaluate_run(&model, &problem, &tasks, &[0.9, 0.0], &[1,10,100], true, &RefineOptions{max_iters: 3000, ..Default::default()}, 0.25, 91).unwrap();
        let s = |arm: &str, alpha: Option<f64>, n: usize| table.rows.iter().find(|r| r.arm==arm && r.alpha==alpha && r.n_samples==n).unwrap().success_pct;
        println!("--- n1={n1} r={rank} seed={seed} ({:.0}s, ranks {:?}): a0.9 {}/{}/{}  a0 {}/{}/{}  unif {}/{}/{}",
            t0.elapsed().as_secs_f64(), model.tt.ranks(),
            s("ttgo",Some(0.9),1), s("ttgo",Some(0.9),10), s("ttgo",Some(0.9),100),
            s("ttgo",Some(0.0),1), s("ttgo",Some(0.0),10), s("ttgo",Some(0.0),100),
            s("uniform",None,1), s("uniform",None,10), s("uniform",None,100));
    }
}
