//! Scratch: cut counts and wall time of single local solves at figure scale.

use std::time::Instant;

use sparse_consensus::datagen::{generate, partition};
use sparse_consensus::local_qip::{outer_approx, LocalProblem};

fn main() {
    for (p, k) in [(10usize, 2usize), (18, 3), (20, 3)] {
        for gamma in [1.0, 0.1, 0.02, 0.004] {
            let n_agents = 50;
            let n_i = 10 * p * k;
            let (data, _) = generate(p, k, n_agents * n_i, 0.1, 0.1, 1).unwrap();
            let shards = partition(&data, n_agents, 1).unwrap();
            let gamma_local = gamma * n_agents as f64;
            let mut worst_cuts = 0usize;
            let mut total_ms = 0.0;
            for shard in shards.shards().iter().take(5) {
                let lp = LocalProblem::new(shard, gamma_local).unwrap();
                let d = vec![0.0; p];
                let warm = lp.warm_start(&d, k).unwrap();
                let t0 = Instant::now();
                match outer_approx(&lp, &d, k, &warm, 5000) {
                    Ok(sol) => {
                        worst_cuts = worst_cuts.max(sol.cuts_used);
                        total_ms += t0.elapsed().as_secs_f64() * 1e3;
                    }
                    Err(e) => {
                        println!("p={p} k={k} gamma={gamma}: solve failed: {e}");
                        return;
                    }
                }
            }
            println!(
                "p={p} k={k} n_i={n_i} gamma={gamma} (local {gamma_local}): worst cuts {worst_cuts}, mean wall {:.2} ms",
                total_ms / 5.0
            );
        }
    }
}
