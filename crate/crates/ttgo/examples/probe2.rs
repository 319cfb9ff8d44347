use rand::rngs::StdRng; use rand::{Rng, SeedableRng};
use ttgo::cross::CrossOptions;
use ttgo::grid::TaskSplit;
use ttgo::pipeline::train;
use ttgo::problems::{gmm_problem, GmmParams};

fn main() {
    let d = 10usize; let n = 20usize; let spacing = 4.0/(n as f64-1.0);
    for seed in 0..20u64 {
        let mut rng = StdRng::seed_from_u64(500+seed);
        let mut centers: Vec<Vec<f64>> = vec![];
        while centers.len() < 5 {
            let c: Vec<f64> = (0..d).map(|_| -2.0 + spacing * rng.gen_range(2..n-2) as f64).collect();
            if centers.iter().all(|o| c.iter().zip(o.iter()).map(|(a,b)|(a-b).abs()).fold(0.0f64,f64::max) > 0.8) { centers.push(c); }
        }
        let top = centers[0].clone();
        let mut weights = vec![0.6;5]; weights[0] = 1.0;
        let params = GmmParams { centers: centers.clone(), sharpness: vec![8.0;5], weights };
        let problem = gmm_problem(params, TaskSplit::new(0,d).unwrap(), -2.0, 2.0).unwrap();
        let cross = CrossOptions { max_rank: 10, n_sweeps: 14, tol: 1e-12, kick: 8, seed: 40+seed, ..Default::default() };
        let model = train(&problem, &vec![n;d], &cross).unwrap();
        // model value at each center node
        let vals: Vec<f64> = centers.iter().map(|c| {
            let idx: Vec<usize> = c.iter().map(|&x| ((x + 2.0)/spacing).round() as usize).collect();
            model.tt.eval_index(&idx).unwrap()
        }).collect();
        let (sampler, grid) = model.conditional_sampler(&[], 0.75, 70+seed).unwrap();
        let batch = sampler.sample(100, &grid).unwrap();
        let best = batch.points.iter().min_by(|p,q| problem.cost(p).partial_cmp(&problem.cost(q)).unwrap()).unwrap();
        let dist = best.iter().zip(top.iter()).map(|(x,c)|(x-c).abs()).fold(0.0f64,f64::max);
        let hit = dist <= spacing + 1e-12;
        println!("seed {seed} hit {hit}: model@centers {:?} ranks {:?}", vals.iter().map(|v| format!("{v:.2}")).collect::<Vec<_>>(), model.tt.ranks());
    }
}
