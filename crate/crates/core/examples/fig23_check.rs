//! Scratch check of the topology/size protocol conditions. Not committed.

use std::time::Instant;

use sparse_consensus::datagen::{generate, partition};
use sparse_consensus::sim::{RunConfig, Simulation, StepSchedule};
use sparse_consensus::topology::{Topology, TopologyKind};

fn main() {
    let p = 18;
    let k = 3;
    let gamma = 0.005;
    let schedule = StepSchedule::Adaptive { alpha0: 0.05, kappa: 0.8 };
    let (data, _) = generate(p, k, 2000, 0.1, 0.1, 11).unwrap();

    let run = |kind: TopologyKind, n_agents: usize| -> (usize, f64, f64) {
        let t0 = Instant::now();
        let shards = partition(&data, n_agents, 11).unwrap();
        let topo = Topology::build(kind, n_agents, 11).unwrap();
        let mut cfg = RunConfig::new(k, gamma, 100, schedule);
        cfg.tol = 1e-5;
        cfg.max_cuts = 2000;
        let mut sim = Simulation::new(&shards, topo, cfg).unwrap();
        let trace = sim.run().unwrap();
        let last = trace.last().unwrap();
        println!(
            "{kind} N={n_agents}: rounds={} final={:.4e}  ({:.1}s)",
            trace.len(),
            last.consensus_error,
            t0.elapsed().as_secs_f64()
        );
        (trace.len(), last.consensus_error, t0.elapsed().as_secs_f64())
    };

    for kind in [
        TopologyKind::Clique,
        TopologyKind::Star,
        TopologyKind::Cycle,
        TopologyKind::WattsStrogatz { k: 12, beta: 0.25 },
    ] {
        run(kind, 50);
    }
    let mut path_errs = Vec::new();
    for n_agents in [5usize, 10, 25, 50] {
        let (_, err, _) = run(TopologyKind::Path, n_agents);
        path_errs.push((n_agents, err));
    }
    let e5 = path_errs[0].1;
    let e50 = path_errs[3].1;
    println!("path N=50 err {e50:.4e} >= path N=5 err {e5:.4e}: {}", e50 >= e5);
}
