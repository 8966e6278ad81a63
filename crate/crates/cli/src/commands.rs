use std::fs;
use std::path::Path;

use rand::prelude::*;
use rand_chacha::ChaCha12Rng;

use sparse_consensus::datagen::{self, Dataset};
use sparse_consensus::linalg::Matrix;
use sparse_consensus::local_qip::{outer_approx, transform};
use sparse_consensus::oracle::{enumerate_local, solve_centralized};
use sparse_consensus::sim::{IterationRecord, RunConfig, Simulation, StepSchedule};
use sparse_consensus::topology::{Topology, TopologyKind};
use sparse_consensus::{f64_17, SupportVector};

use crate::svg::{line_chart, Series};
use crate::{CmdResult, Failure, GenArgs, OracleArgs, PlotArgs, RunArgs, SolveLocalArgs};

fn write_atomic(path: &Path, contents: &str) -> CmdResult {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, contents).map_err(|e| Failure::Internal(format!("{}: {e}", tmp.display())))?;
    fs::rename(&tmp, path).map_err(|e| Failure::Internal(format!("{}: {e}", path.display())))?;
    Ok(())
}

fn load_dataset(dir: &Path) -> Result<(Dataset, datagen::GroundTruth), Failure> {
    datagen::load_dataset(dir)
        .map_err(|e| Failure::Usage(format!("cannot load dataset {}: {e}", dir.display())))
}

pub fn gen(args: &GenArgs) -> CmdResult {
    let (data, truth) = datagen::generate(args.p, args.k, args.n, args.sigma, args.rho, args.seed)?;
    datagen::save_dataset(&args.out, &data, &truth)?;
    println!(
        "wrote dataset p={} k={} n={} sigma={} rho={} seed={} to {}",
        args.p,
        args.k,
        args.n,
        args.sigma,
        args.rho,
        args.seed,
        args.out.display()
    );
    Ok(())
}

pub fn run(args: &RunArgs) -> CmdResult {
    let (data, truth) = load_dataset(&args.data)?;
    let k = args.k.unwrap_or(truth.support.len());
    let kind: TopologyKind = args
        .topology
        .parse()
        .map_err(|e: sparse_consensus::Error| Failure::Usage(e.to_string()))?;
    let schedule: StepSchedule = args
        .schedule
        .parse()
        .map_err(|e: sparse_consensus::Error| Failure::Usage(e.to_string()))?;

    let shards = datagen::partition(&data, args.agents, args.seed)?;
    let topo = if args.agents == 1 {
        Topology::singleton()
    } else {
        Topology::build(kind, args.agents, args.seed)?
    };
    let cfg = RunConfig {
        k,
        gamma: args.gamma,
        max_rounds: args.rounds,
        tol: args.tol,
        schedule,
        max_cuts: args.max_cuts,
    };
    let mut sim = Simulation::new(&shards, topo, cfg)?;
    let trace = sim.run()?;

    let mut csv = String::new();
    let argv: Vec<String> = std::env::args().collect();
    csv.push_str(&format!("# cmd: {}\n", argv.join(" ")));
    csv.push_str(&format!("# version: {}\n", env!("CARGO_PKG_VERSION")));
    csv.push_str(IterationRecord::CSV_HEADER);
    csv.push('\n');
    for record in &trace {
        csv.push_str(&record.to_csv_row());
        csv.push('\n');
    }
    write_atomic(&args.out_csv, &csv)?;

    if let Some(svg_path) = &args.out_svg {
        let series = vec![Series {
            label: "consensus_error".to_string(),
            points: trace
                .iter()
                .map(|r| (r.t as f64, r.consensus_error))
                .collect(),
        }];
        let chart = line_chart(&series, "t", "consensus_error", true)
            .map_err(Failure::Internal)?;
        write_atomic(svg_path, &chart)?;
    }

    let last = trace.last().expect("at least one round");
    println!(
        "{} rounds, final consensus error {:.3e}, dual value {:.6}, trace {}",
        trace.len(),
        last.consensus_error,
        last.dual_value,
        args.out_csv.display()
    );
    Ok(())
}

fn parse_dual(spec: &str, p: usize) -> Result<Vec<f64>, Failure> {
    if spec == "zero" {
        return Ok(vec![0.0; p]);
    }
    let text = fs::read_to_string(spec)
        .map_err(|e| Failure::Usage(format!("cannot read dual vector {spec}: {e}")))?;
    let values: Result<Vec<f64>, Failure> = text
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            l.trim()
                .parse::<f64>()
                .map_err(|_| Failure::Usage(format!("bad dual entry {l:?} in {spec}")))
        })
        .collect();
    let values = values?;
    if values.len() != p {
        return Err(Failure::Usage(format!(
            "dual vector has {} entries, dataset has p={p}",
            values.len()
        )));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Failure::Usage("dual vector has non-finite entries".into()));
    }
    Ok(values)
}

pub fn solve_local(args: &SolveLocalArgs) -> CmdResult {
    let (data, truth) = load_dataset(&args.data)?;
    let k = args.k.unwrap_or(truth.support.len());
    let d_dual = parse_dual(&args.d, data.p())?;
    let (lp, d) = transform(&data, args.gamma, &d_dual)?;
    let warm = lp.warm_start(&d, k)?;
    let sol = outer_approx(&lp, &d, k, &warm, args.max_cuts)?;

    let support: Vec<String> = sol.s.indices().iter().map(usize::to_string).collect();
    let weights: Vec<String> = sol.w.iter().map(|v| f64_17(*v)).collect();
    println!("support: {}", support.join(","));
    println!("w: {}", weights.join(","));
    println!("objective: {}", f64_17(sol.objective));
    println!("cuts_used: {}", sol.cuts_used);
    println!("master_nodes: {}", sol.master_nodes);
    Ok(())
}

pub fn oracle(args: &OracleArgs) -> CmdResult {
    if args.cases == 0 {
        return Err(Failure::Usage("--cases must be positive".into()));
    }
    if !(args.gamma_scale > 0.0) || !args.gamma_scale.is_finite() {
        return Err(Failure::Usage("--gamma-scale must be positive".into()));
    }

    let mut rng = ChaCha12Rng::seed_from_u64(args.seed);
    let mut failed = 0usize;
    let mut passed = 0usize;
    let mut report = |name: String, ok: bool| {
        println!("{}  {name}", if ok { "PASS" } else { "FAIL" });
        if ok {
            passed += 1;
        } else {
            failed += 1;
        }
    };

    // Battery A: exact local solver against support enumeration.
    for case in 0..args.cases {
        let p = rng.random_range(4..=10);
        let n = rng.random_range(p..=3 * p);
        let gamma = [0.1, 1.0, 10.0][case % 3];
        let k = rng.random_range(1..=p);
        let mut x = Matrix::zeros(n, p);
        for i in 0..n {
            for j in 0..p {
                x.set(i, j, rng.random_range(-1.0..1.0));
            }
        }
        let y: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let d_dual: Vec<f64> = (0..p).map(|_| rng.random_range(-1.0..1.0)).collect();
        let data = Dataset::new(x, y)?;
        let (lp, d) = transform(&data, gamma, &d_dual)?;
        let reference = enumerate_local(&lp, &d, k)?;
        let warm = lp.warm_start(&d, k)?;
        let fast = outer_approx(&lp, &d, k, &warm, 500)?;
        let ok = fast.s == reference.s
            && (fast.objective - reference.objective).abs()
                <= 1e-8 * (1.0 + reference.objective.abs());
        report(
            format!("local case {case}: p={p} k={k} gamma={gamma} (outer approximation vs enumeration)"),
            ok,
        );
    }

    // Battery B: the distributed run against the centralized solver.
    for (idx, seed) in [11u64, 12].into_iter().enumerate() {
        let gamma = 1.0;
        let n_agents = 3;
        let (data, _) = datagen::generate(3, 1, 60, 0.1, 0.1, seed)?;
        let shards = datagen::partition(&data, n_agents, seed)?;
        let topo = Topology::build(TopologyKind::Path, n_agents, seed)?;
        let (_, z, s_hat) = solve_centralized(&data, gamma, 1)?;

        let cfg = RunConfig {
            k: 1,
            gamma: gamma * args.gamma_scale,
            max_rounds: 1500,
            tol: 1e-12,
            schedule: StepSchedule::Harmonic { alpha0: 50.0 },
            max_cuts: 500,
        };
        let mut sim = Simulation::new(&shards, topo, cfg)?;
        let trace = sim.run()?;
        let bound_ok = trace
            .iter()
            .all(|r| r.dual_value <= z + 1e-8 * (1.0 + z.abs()));
        let last = trace.last().expect("non-empty trace");
        let gap_ok = z - last.dual_value <= 1e-3 * (1.0 + z.abs());
        let supports_ok = sim.states().iter().all(|st| st.s == s_hat);
        report(
            format!("consensus instance {idx}: dual lower-bounds the centralized optimum"),
            bound_ok,
        );
        report(
            format!("consensus instance {idx}: final duality gap below 1e-3"),
            gap_ok,
        );
        report(
            format!("consensus instance {idx}: all agents recover the centralized support"),
            supports_ok,
        );
    }

    println!("oracle checks: {passed} passed, {failed} failed");
    if failed > 0 {
        Err(Failure::Internal(format!("{failed} oracle checks failed")))
    } else {
        Ok(())
    }
}

pub fn plot(args: &PlotArgs) -> CmdResult {
    let mut series = Vec::new();
    for path in &args.csv {
        let text = fs::read_to_string(path)
            .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
        let mut lines = text.lines().filter(|l| !l.starts_with('#') && !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Failure::Usage(format!("{}: empty CSV", path.display())))?;
        let columns: Vec<&str> = header.split(',').collect();
        let t_col = columns
            .iter()
            .position(|c| *c == "t")
            .ok_or_else(|| Failure::Usage(format!("{}: no t column", path.display())))?;
        let y_col = columns.iter().position(|c| *c == args.y).ok_or_else(|| {
            Failure::Usage(format!(
                "{}: no column {:?} (have: {})",
                path.display(),
                args.y,
                header
            ))
        })?;
        let mut points = Vec::new();
        for (i, line) in lines.enumerate() {
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != columns.len() {
                return Err(Failure::Usage(format!(
                    "{} line {}: expected {} fields, found {}",
                    path.display(),
                    i + 2,
                    columns.len(),
                    fields.len()
                )));
            }
            let parse = |s: &str| -> Result<f64, Failure> {
                s.parse::<f64>()
                    .map_err(|_| Failure::Usage(format!("{}: bad float {s:?}", path.display())))
            };
            points.push((parse(fields[t_col])?, parse(fields[y_col])?));
        }
        if points.is_empty() {
            return Err(Failure::Usage(format!(
                "{}: no data rows",
                path.display()
            )));
        }
        let label = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string());
        series.push(Series { label, points });
    }

    let chart = line_chart(&series, "t", &args.y, args.logy).map_err(Failure::Usage)?;
    write_atomic(&args.out, &chart)?;
    println!("wrote {}", args.out.display());
    Ok(())
}
