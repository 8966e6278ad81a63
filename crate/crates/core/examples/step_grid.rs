//! Grid search over step-size parameters on small path-graph instances.
//!
//! Prints, for every candidate schedule, the worst final duality gap,
//! consensus error, and support-recovery rate across seeds. The defaults in
//! `sim` (harmonic a0 for the gap experiments, adaptive a0/kappa for the
//! protocol runs) were chosen from this table.
//!
//! Run with: cargo run --release -p sparse-consensus --example step_grid

use sparse_consensus::datagen::{generate, partition};
use sparse_consensus::oracle::solve_centralized;
use sparse_consensus::sim::{RunConfig, Simulation, StepSchedule};
use sparse_consensus::topology::{Topology, TopologyKind};

fn main() {
    let n_agents = 3;
    let p = 4;
    let k = 2;
    let n_rows = n_agents * 40;
    let gamma = 1.0;
    let rounds = 5000;
    let seeds: Vec<u64> = (1..=10).collect();

    let mut candidates: Vec<StepSchedule> = Vec::new();
    for a0 in [0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0] {
        candidates.push(StepSchedule::Harmonic { alpha0: a0 });
    }
    for a0 in [0.02, 0.05, 0.1, 0.2] {
        for kappa in [0.5, 0.8, 0.9] {
            candidates.push(StepSchedule::Adaptive { alpha0: a0, kappa });
        }
    }

    println!(
        "{:<28} {:>12} {:>12} {:>10}",
        "schedule", "worst_gap", "worst_cons", "supports"
    );
    for schedule in candidates {
        let mut worst_gap = 0.0f64;
        let mut worst_consensus = 0.0f64;
        let mut supports_ok = 0usize;
        for &seed in &seeds {
            let (data, _) = generate(p, k, n_rows, 0.1, 0.1, seed).unwrap();
            let shards = partition(&data, n_agents, seed).unwrap();
            let topo = Topology::build(TopologyKind::Path, n_agents, seed).unwrap();
            let (_, z, s_hat) = solve_centralized(&data, gamma, k).unwrap();

            let mut cfg = RunConfig::new(k, gamma, rounds, schedule);
            cfg.tol = 1e-12; // keep iterating; we want the final gap
            let mut sim = Simulation::new(&shards, topo, cfg).unwrap();
            let trace = sim.run().unwrap();
            let last = trace.last().unwrap();

            let gap = (z - last.dual_value) / (1.0 + z.abs());
            worst_gap = worst_gap.max(gap);
            worst_consensus = worst_consensus.max(last.consensus_error);
            if sim.states().iter().all(|st| st.s == s_hat) {
                supports_ok += 1;
            }
        }
        println!(
            "{:<28} {:>12.3e} {:>12.3e} {:>7}/{}",
            schedule.to_string(),
            worst_gap,
            worst_consensus,
            supports_ok,
            seeds.len()
        );
    }
}
