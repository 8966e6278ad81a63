//! Scratch check of the figure-protocol acceptance conditions. Not committed.

use std::time::Instant;

use sparse_consensus::datagen::{generate, partition};
use sparse_consensus::sim::{RunConfig, Simulation, StepSchedule};
use sparse_consensus::topology::{Topology, TopologyKind};

fn main() {
    let schedule = StepSchedule::Adaptive { alpha0: 0.05, kappa: 0.8 };
    let combos = [(5usize, 1usize), (10, 2), (20, 3)];
    let n_agents = 50;
    let t_max = 100;
    let mut all_final_below_first = true;
    let mut window_pairs = 0usize;
    let mut window_monotone = 0usize;

    let start = Instant::now();
    for (p, k) in combos {
        let n_i = 10 * p * k;
        let mut curves: Vec<Vec<f64>> = Vec::new();
        for seed in 1..=5u64 {
            let t0 = Instant::now();
            let (data, _) = generate(p, k, n_agents * n_i, 0.1, 0.1, seed).unwrap();
            let shards = partition(&data, n_agents, seed).unwrap();
            let topo = Topology::build(
                TopologyKind::WattsStrogatz { k: 12, beta: 0.25 },
                n_agents,
                seed,
            )
            .unwrap();
            let mut cfg = RunConfig::new(k, 0.005, t_max, schedule);
            cfg.tol = 1e-12;
            let mut sim = Simulation::new(&shards, topo, cfg).unwrap();
            let trace = sim.run().unwrap();
            let errs: Vec<f64> = trace.iter().map(|r| r.consensus_error).collect();
            println!(
                "p={p} k={k} seed={seed}: e1={:.3e} e100={:.3e}  ({:.1}s)",
                errs[0],
                errs[errs.len() - 1],
                t0.elapsed().as_secs_f64()
            );
            if errs[errs.len() - 1] >= errs[0] {
                all_final_below_first = false;
            }
            curves.push(errs);
        }
        // Mean curve across seeds, then 10-iteration window means.
        let t_len = curves.iter().map(Vec::len).min().unwrap();
        let mean: Vec<f64> = (0..t_len)
            .map(|t| curves.iter().map(|c| c[t]).sum::<f64>() / curves.len() as f64)
            .collect();
        let windows: Vec<f64> = mean
            .chunks(10)
            .map(|w| w.iter().sum::<f64>() / w.len() as f64)
            .collect();
        for pair in windows.windows(2) {
            window_pairs += 1;
            if pair[1] <= pair[0] {
                window_monotone += 1;
            }
        }
        let shown: Vec<String> = windows.iter().map(|w| format!("{w:.3e}")).collect();
        println!("p={p} windows: [{}]", shown.join(", "));
    }
    println!(
        "final<first everywhere: {all_final_below_first}; monotone windows {window_monotone}/{window_pairs} = {:.1}%",
        100.0 * window_monotone as f64 / window_pairs as f64
    );
    println!("total {:.1}s", start.elapsed().as_secs_f64());
}
