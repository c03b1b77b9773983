use gsdo::problem::Scenario;
use gsdo::stages::{solve, SolverConfig};
use gsdo::testbed::get_problem;
use std::time::Instant;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let name = args.get(1).map(String::as_str).unwrap_or("G24");
    let trials: u64 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(5);
    let set = args.get(3).and_then(|s| s.parse().ok()).unwrap_or(1u8);
    let scenario = Scenario::from_index(set).unwrap();
    let problem = get_problem(name, scenario).unwrap();
    let d = problem.dimension();
    let mut bests = Vec::new();
    let t0 = Instant::now();
    for seed in 1..=trials {
        let config = SolverConfig::defaults(d, scenario).with_seed(seed);
        let t1 = Instant::now();
        let record = solve(&problem, &config).unwrap();
        println!(
            "seed {seed:2}: {} [{:.2}s]",
            record.summary(),
            t1.elapsed().as_secs_f64()
        );
        if let Some(f) = record.best_objective() {
            bests.push(f);
        }
    }
    bests.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median = if bests.is_empty() {
        f64::NAN
    } else if bests.len() % 2 == 1 {
        bests[bests.len() / 2]
    } else {
        0.5 * (bests[bests.len() / 2 - 1] + bests[bests.len() / 2])
    };
    println!(
        "N_s = {}/{trials}, median best = {median:.6e}, total {:.2}s",
        bests.len(),
        t0.elapsed().as_secs_f64()
    );
}
