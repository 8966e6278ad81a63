//! Synchronous multi-agent dual gradient ascent.
//!
//! Every round has the same barrier structure: each agent aggregates its
//! neighbors' multipliers through its Laplacian row into a dual vector `D`,
//! solves its local sparse regression subproblem exactly, exchanges the new
//! regressor with its neighbors, and moves its multiplier along the
//! Laplacian row of the regressors, scaled by the round's step size. The
//! per-round solves are independent and run in parallel; state only changes
//! at the barrier, so a run is deterministic regardless of thread order.
//!
//! The per-agent ridge weight is `gamma * n_agents`, which makes the sum of
//! local objectives (the dual value) a lower bound on the centralized
//! optimum with penalty `||w||^2 / gamma`.

use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::datagen::ShardedDataset;
use crate::error::{Error, Result};
use crate::fmt::f64_17;
use crate::linalg::axpy;
use crate::local_qip::{outer_approx, LocalProblem, DEFAULT_MAX_CUTS};
use crate::support::SupportVector;
use crate::topology::Topology;

/// Step-size rule for the multiplier update.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepSchedule {
    /// `alpha0 / t`: square summable but not summable, hence convergent.
    Harmonic { alpha0: f64 },
    /// Constant step damped by `kappa` whenever every agent's local error
    /// grew compared to the previous round.
    Adaptive { alpha0: f64, kappa: f64 },
}

impl StepSchedule {
    pub fn alpha0(&self) -> f64 {
        match self {
            StepSchedule::Harmonic { alpha0 } | StepSchedule::Adaptive { alpha0, .. } => *alpha0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match self {
            StepSchedule::Harmonic { alpha0 } => alpha0.is_finite() && *alpha0 > 0.0,
            StepSchedule::Adaptive { alpha0, kappa } => {
                alpha0.is_finite() && *alpha0 > 0.0 && (0.0..1.0).contains(kappa) && *kappa > 0.0
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParams(format!("bad step schedule {self:?}")))
        }
    }

    /// Step size for round `t`. `current` carries the damped state of the
    /// adaptive rule; the harmonic rule ignores it. Damping triggers when
    /// every agent's local error is at least its previous value.
    pub fn step_size(
        &self,
        current: &mut f64,
        t: usize,
        eps_now: &[f64],
        eps_prev: Option<&[f64]>,
    ) -> f64 {
        match self {
            StepSchedule::Harmonic { alpha0 } => alpha0 / t as f64,
            StepSchedule::Adaptive { kappa, .. } => {
                if let Some(prev) = eps_prev {
                    if !eps_now.is_empty() && eps_now.iter().zip(prev).all(|(n, p)| n >= p) {
                        *current *= kappa;
                    }
                }
                *current
            }
        }
    }
}

impl std::fmt::Display for StepSchedule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            StepSchedule::Harmonic { alpha0 } => write!(f, "harmonic:a0={alpha0}"),
            StepSchedule::Adaptive { alpha0, kappa } => {
                write!(f, "adaptive:a0={alpha0},kappa={kappa}")
            }
        }
    }
}

impl std::str::FromStr for StepSchedule {
    type Err = Error;

    /// Parses `harmonic:a0=<float>` or `adaptive:a0=<float>,kappa=<float>`.
    /// Omitted fields fall back to the tuned defaults.
    fn from_str(s: &str) -> Result<Self> {
        let (kind, rest) = match s.split_once(':') {
            Some((kind, rest)) => (kind, rest),
            None => (s, ""),
        };
        let mut fields = std::collections::BTreeMap::new();
        if !rest.is_empty() {
            for part in rest.split(',') {
                let (key, val) = part
                    .split_once('=')
                    .ok_or_else(|| Error::Parse(format!("bad schedule field {part:?}")))?;
                let val: f64 = val
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad schedule value {val:?}")))?;
                fields.insert(key.to_string(), val);
            }
        }
        let sched = match kind {
            "harmonic" => StepSchedule::Harmonic {
                alpha0: fields.remove("a0").unwrap_or(DEFAULT_ALPHA0),
            },
            "adaptive" => StepSchedule::Adaptive {
                alpha0: fields.remove("a0").unwrap_or(DEFAULT_ALPHA0),
                kappa: fields.remove("kappa").unwrap_or(DEFAULT_KAPPA),
            },
            _ => return Err(Error::Parse(format!("unknown schedule kind {kind:?}"))),
        };
        if let Some(key) = fields.keys().next() {
            return Err(Error::Parse(format!("unknown schedule field {key:?}")));
        }
        sched.validate()?;
        Ok(sched)
    }
}

/// Tuned defaults for the adaptive rule (see scripts/step_size_grid.sh).
pub const DEFAULT_ALPHA0: f64 = 0.05;
pub const DEFAULT_KAPPA: f64 = 0.8;

/// Consensus error threshold used by the experiments.
pub const DEFAULT_TOL: f64 = 1e-5;

/// Run-level configuration of the dual-ascent loop.
#[derive(Debug, Clone)]
pub struct RunConfig {
    /// Cardinality bound on every regressor.
    pub k: usize,
    /// Centralized ridge weight; the penalty is `||w||^2 / gamma`. Each
    /// agent uses `gamma * n_agents`.
    pub gamma: f64,
    /// Maximum number of rounds.
    pub max_rounds: usize,
    /// Early-stop threshold on the consensus error.
    pub tol: f64,
    pub schedule: StepSchedule,
    /// Cut budget per local solve.
    pub max_cuts: usize,
}

impl RunConfig {
    pub fn new(k: usize, gamma: f64, max_rounds: usize, schedule: StepSchedule) -> Self {
        RunConfig {
            k,
            gamma,
            max_rounds,
            tol: DEFAULT_TOL,
            schedule,
            max_cuts: DEFAULT_MAX_CUTS,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::InvalidParams("k must be positive".into()));
        }
        if !(self.gamma > 0.0) || !self.gamma.is_finite() {
            return Err(Error::InvalidParams(format!(
                "gamma must be positive, got {}",
                self.gamma
            )));
        }
        if self.max_rounds == 0 {
            return Err(Error::InvalidParams("need at least one round".into()));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidParams("tolerance must be positive".into()));
        }
        if self.max_cuts == 0 {
            return Err(Error::InvalidParams("cut budget must be positive".into()));
        }
        self.schedule.validate()
    }
}

/// One agent's view of the computation.
#[derive(Debug, Clone)]
pub struct AgentState {
    /// Local multiplier row; one entry per feature.
    pub psi: Vec<f64>,
    /// Current regressor.
    pub w: Vec<f64>,
    pub s: SupportVector,
    /// Mean squared distance to the neighbors' regressors.
    pub local_error: f64,
    /// Optimal local objective of the last round, constant included.
    pub local_objective: f64,
}

/// Per-round trace entry.
#[derive(Debug, Clone)]
pub struct IterationRecord {
    pub t: usize,
    /// Step size applied in this round's multiplier update.
    pub alpha: f64,
    /// Mean regressor disagreement across edges.
    pub consensus_error: f64,
    /// Sum of the agents' optimal local objectives; never exceeds the
    /// centralized optimum.
    pub dual_value: f64,
    pub mean_local_error: f64,
    pub wall: Duration,
}

impl IterationRecord {
    pub const CSV_HEADER: &'static str = "t,alpha,consensus_error,dual_value,mean_local_error,wall_ms";

    pub fn to_csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.t,
            f64_17(self.alpha),
            f64_17(self.consensus_error),
            f64_17(self.dual_value),
            f64_17(self.mean_local_error),
            f64_17(self.wall.as_secs_f64() * 1e3),
        )
    }
}

/// Mean Euclidean disagreement over edges; zero iff all adjacent regressors
/// agree, which by connectivity means all regressors agree.
pub fn consensus_error(states: &[AgentState], topo: &Topology) -> f64 {
    if topo.n_edges() == 0 {
        return 0.0;
    }
    let mut total = 0.0;
    for &(i, j) in topo.edges() {
        let mut sq = 0.0;
        for (a, b) in states[i].w.iter().zip(&states[j].w) {
            sq += (a - b) * (a - b);
        }
        total += sq.sqrt();
    }
    total / topo.n_edges() as f64
}

/// Per-agent mean squared distance to neighboring regressors.
pub fn local_errors(states: &[AgentState], topo: &Topology) -> Vec<f64> {
    (0..states.len())
        .map(|i| {
            let neighbors = topo.neighbors(i);
            if neighbors.is_empty() {
                return 0.0;
            }
            let mut total = 0.0;
            for &j in neighbors {
                let mut sq = 0.0;
                for (a, b) in states[i].w.iter().zip(&states[j].w) {
                    sq += (a - b) * (a - b);
                }
                total += sq;
            }
            total / neighbors.len() as f64
        })
        .collect()
}

/// The synchronous dual-ascent loop over one topology and one sharding.
#[derive(Debug)]
pub struct Simulation {
    topo: Topology,
    cfg: RunConfig,
    problems: Vec<LocalProblem>,
    states: Vec<AgentState>,
    rounds_done: usize,
    alpha_state: f64,
    prev_errors: Option<Vec<f64>>,
}

impl Simulation {
    /// Builds the per-agent problems and zero-initialized multipliers.
    pub fn new(shards: &ShardedDataset, topo: Topology, cfg: RunConfig) -> Result<Self> {
        cfg.validate()?;
        if shards.n_shards() != topo.n_agents() {
            return Err(Error::ShapeMismatch(format!(
                "{} shards for {} agents",
                shards.n_shards(),
                topo.n_agents()
            )));
        }
        let p = shards.p();
        if cfg.k > p {
            return Err(Error::InvalidParams(format!(
                "k={} exceeds the feature count {p}",
                cfg.k
            )));
        }
        let gamma_local = cfg.gamma * topo.n_agents() as f64;
        let problems: Result<Vec<LocalProblem>> = shards
            .shards()
            .iter()
            .map(|shard| LocalProblem::new(shard, gamma_local))
            .collect();
        let states = (0..topo.n_agents())
            .map(|_| AgentState {
                psi: vec![0.0; p],
                w: vec![0.0; p],
                s: SupportVector::zeros(p),
                local_error: 0.0,
                local_objective: 0.0,
            })
            .collect();
        let alpha_state = cfg.schedule.alpha0();
        Ok(Simulation {
            topo,
            cfg,
            problems: problems?,
            states,
            rounds_done: 0,
            alpha_state,
            prev_errors: None,
        })
    }

    pub fn states(&self) -> &[AgentState] {
        &self.states
    }

    pub fn topology(&self) -> &Topology {
        &self.topo
    }

    pub fn config(&self) -> &RunConfig {
        &self.cfg
    }

    pub fn rounds_done(&self) -> usize {
        self.rounds_done
    }

    /// Executes one synchronous round and returns its trace entry.
    pub fn round(&mut self) -> Result<IterationRecord> {
        let start = Instant::now();
        let t = self.rounds_done + 1;
        let n = self.topo.n_agents();

        // Dual vectors from the multipliers of round t.
        let duals: Result<Vec<Vec<f64>>> = (0..n)
            .map(|i| {
                self.topo
                    .apply_laplacian_row(i, |j| self.states.get(j).map(|s| s.psi.as_slice()))
            })
            .collect();
        let duals = duals?;

        // Exact local solves; independent, hence parallel.
        let solutions: Result<Vec<_>> = self
            .problems
            .par_iter()
            .zip(duals.par_iter())
            .map(|(problem, dual)| {
                let d = problem.reduce_dual(dual)?;
                let warm = problem.warm_start(&d, self.cfg.k)?;
                outer_approx(problem, &d, self.cfg.k, &warm, self.cfg.max_cuts)
            })
            .collect();
        let solutions = solutions?;

        for (state, sol) in self.states.iter_mut().zip(solutions) {
            state.w = sol.w;
            state.s = sol.s;
            state.local_objective = sol.objective;
        }

        let errors = local_errors(&self.states, &self.topo);
        for (state, err) in self.states.iter_mut().zip(&errors) {
            state.local_error = *err;
        }
        let consensus = consensus_error(&self.states, &self.topo);
        let dual_value: f64 = self.states.iter().map(|s| s.local_objective).sum();

        let alpha =
            self.cfg
                .schedule
                .step_size(&mut self.alpha_state, t, &errors, self.prev_errors.as_deref());

        // Multiplier ascent along the Laplacian rows of the new regressors.
        // All directions are computed before any state changes.
        let directions: Result<Vec<Vec<f64>>> = (0..n)
            .map(|i| {
                self.topo
                    .apply_laplacian_row(i, |j| self.states.get(j).map(|s| s.w.as_slice()))
            })
            .collect();
        for (state, dir) in self.states.iter_mut().zip(directions?) {
            axpy(alpha, &dir, &mut state.psi);
        }

        self.prev_errors = Some(errors.clone());
        self.rounds_done = t;

        Ok(IterationRecord {
            t,
            alpha,
            consensus_error: consensus,
            dual_value,
            mean_local_error: errors.iter().sum::<f64>() / errors.len() as f64,
            wall: start.elapsed(),
        })
    }

    /// Runs rounds until the consensus error drops to the configured
    /// tolerance or the round budget is exhausted.
    pub fn run(&mut self) -> Result<Vec<IterationRecord>> {
        let mut trace = Vec::new();
        for _ in 0..self.cfg.max_rounds {
            let record = self.round()?;
            let stop = record.consensus_error <= self.cfg.tol;
            trace.push(record);
            if stop {
                break;
            }
        }
        Ok(trace)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datagen::{generate, partition, Dataset, ShardedDataset};
    use crate::linalg::Matrix;
    use crate::oracle::solve_centralized;
    use crate::topology::TopologyKind;
    use rand::prelude::*;
    use rand_chacha::ChaCha12Rng;

    fn harmonic(alpha0: f64) -> StepSchedule {
        StepSchedule::Harmonic { alpha0 }
    }

    fn tiny_setup(
        n_agents: usize,
        p: usize,
        k: usize,
        n_rows: usize,
        seed: u64,
    ) -> (ShardedDataset, Topology, Dataset) {
        let (data, _) = generate(p, k, n_rows, 0.1, 0.1, seed).unwrap();
        let shards = partition(&data, n_agents, seed ^ 0xabcd).unwrap();
        let topo = if n_agents == 1 {
            Topology::singleton()
        } else {
            Topology::build(TopologyKind::Path, n_agents, seed).unwrap()
        };
        (shards, topo, data)
    }

    #[test]
    fn init_zeroes_multipliers() {
        let (shards, topo, _) = tiny_setup(3, 4, 2, 30, 1);
        let sim = Simulation::new(&shards, topo, RunConfig::new(2, 1.0, 10, harmonic(1.0))).unwrap();
        assert_eq!(sim.states().len(), 3);
        for state in sim.states() {
            assert_eq!(state.psi, vec![0.0; 4]);
            assert_eq!(state.w, vec![0.0; 4]);
        }
    }

    #[test]
    fn shard_count_must_match_agents() {
        let (shards, _, _) = tiny_setup(3, 4, 2, 30, 1);
        let topo = Topology::build(TopologyKind::Path, 4, 0).unwrap();
        let err = Simulation::new(&shards, topo, RunConfig::new(2, 1.0, 10, harmonic(1.0)))
            .unwrap_err();
        assert!(matches!(err, Error::ShapeMismatch(_)));
    }

    #[test]
    fn single_agent_solves_centralized_in_one_round() {
        let (shards, topo, data) = tiny_setup(1, 4, 2, 25, 3);
        let cfg = RunConfig::new(2, 1.5, 50, harmonic(1.0));
        let mut sim = Simulation::new(&shards, topo, cfg).unwrap();
        let trace = sim.run().unwrap();
        assert_eq!(trace.len(), 1);
        assert_eq!(trace[0].consensus_error, 0.0);
        // With one agent the local weight equals gamma, so one round is the
        // centralized solve.
        let (w, z, s) = solve_centralized(&data, 1.5, 2).unwrap();
        let state = &sim.states()[0];
        assert_eq!(state.s, s);
        for (a, b) in state.w.iter().zip(&w) {
            assert!((a - b).abs() <= 1e-9 * (1.0 + b.abs()));
        }
        assert!((trace[0].dual_value - z).abs() <= 1e-9 * (1.0 + z.abs()));
        assert_eq!(state.psi, vec![0.0; 4]);
    }

    #[test]
    fn identical_shards_reach_consensus_immediately() {
        let (data, _) = generate(4, 2, 20, 0.1, 0.1, 7).unwrap();
        let shards = ShardedDataset::new(vec![data.clone(), data.clone(), data]).unwrap();
        let topo = Topology::build(TopologyKind::Cycle, 3, 0).unwrap();
        let mut sim =
            Simulation::new(&shards, topo, RunConfig::new(2, 1.0, 100, harmonic(1.0))).unwrap();
        let trace = sim.run().unwrap();
        assert_eq!(trace.len(), 1);
        assert_eq!(trace[0].consensus_error, 0.0);
        let w0 = sim.states()[0].w.clone();
        for state in sim.states() {
            assert_eq!(state.w, w0);
        }
    }

    #[test]
    fn consensus_error_single_edge() {
        let topo = Topology::build(TopologyKind::Path, 2, 0).unwrap();
        let mk = |w: Vec<f64>| AgentState {
            psi: vec![0.0; 2],
            w,
            s: SupportVector::zeros(2),
            local_error: 0.0,
            local_objective: 0.0,
        };
        let states = vec![mk(vec![1.0, 0.0]), mk(vec![0.0, 1.0])];
        let err = consensus_error(&states, &topo);
        assert!((err - 2.0f64.sqrt()).abs() < 1e-15);
        let equal = vec![mk(vec![0.3, -0.4]), mk(vec![0.3, -0.4])];
        assert_eq!(consensus_error(&equal, &topo), 0.0);
    }

    #[test]
    fn consensus_error_matches_naive_recomputation() {
        let mut rng = ChaCha12Rng::seed_from_u64(11);
        let topo = Topology::build(TopologyKind::WattsStrogatz { k: 4, beta: 0.4 }, 8, 2).unwrap();
        let states: Vec<AgentState> = (0..8)
            .map(|_| AgentState {
                psi: vec![],
                w: (0..5).map(|_| rng.random_range(-1.0..1.0)).collect(),
                s: SupportVector::zeros(5),
                local_error: 0.0,
                local_objective: 0.0,
            })
            .collect();
        let fast = consensus_error(&states, &topo);
        let mut naive = 0.0;
        let mut edges = 0;
        for i in 0..8 {
            for j in (i + 1)..8 {
                if topo.neighbors(i).contains(&j) {
                    let mut sq = 0.0;
                    for (a, b) in states[i].w.iter().zip(&states[j].w) {
                        sq += (a - b) * (a - b);
                    }
                    naive += sq.sqrt();
                    edges += 1;
                }
            }
        }
        naive /= edges as f64;
        assert!((fast - naive).abs() <= 1e-12);
    }

    #[test]
    fn local_errors_middle_of_path() {
        let topo = Topology::build(TopologyKind::Path, 3, 0).unwrap();
        let mk = |w: Vec<f64>| AgentState {
            psi: vec![],
            w,
            s: SupportVector::zeros(3),
            local_error: 0.0,
            local_objective: 0.0,
        };
        let states = vec![
            mk(vec![0.0, 0.0, 0.0]),
            mk(vec![0.0, 0.0, 0.0]),
            mk(vec![2.0, 0.0, 0.0]),
        ];
        let eps = local_errors(&states, &topo);
        assert_eq!(eps[1], 2.0);
        assert_eq!(eps[0], 0.0);
        assert_eq!(eps[2], 4.0);

        let equal = vec![mk(vec![1.0; 3]), mk(vec![1.0; 3]), mk(vec![1.0; 3])];
        assert_eq!(local_errors(&equal, &topo), vec![0.0; 3]);
    }

    #[test]
    fn step_size_rules() {
        let harmonic = StepSchedule::Harmonic { alpha0: 1.0 };
        let mut state = 1.0;
        assert_eq!(harmonic.step_size(&mut state, 1, &[], None), 1.0);
        assert_eq!(harmonic.step_size(&mut state, 4, &[], None), 0.25);

        let adaptive = StepSchedule::Adaptive { alpha0: 1.0, kappa: 0.5 };
        let mut state = 1.0;
        // No previous errors: no damping.
        assert_eq!(adaptive.step_size(&mut state, 1, &[0.5, 0.5], None), 1.0);
        // One agent improved: no damping.
        assert_eq!(
            adaptive.step_size(&mut state, 2, &[0.6, 0.4], Some(&[0.5, 0.5])),
            1.0
        );
        // Everyone got worse, twice: two dampings.
        assert_eq!(
            adaptive.step_size(&mut state, 3, &[0.6, 0.6], Some(&[0.5, 0.5])),
            0.5
        );
        assert_eq!(
            adaptive.step_size(&mut state, 4, &[0.7, 0.7], Some(&[0.6, 0.6])),
            0.25
        );
    }

    #[test]
    fn schedule_parsing() {
        assert_eq!(
            "harmonic:a0=2.5".parse::<StepSchedule>().unwrap(),
            StepSchedule::Harmonic { alpha0: 2.5 }
        );
        assert_eq!(
            "adaptive:a0=0.1,kappa=0.9".parse::<StepSchedule>().unwrap(),
            StepSchedule::Adaptive { alpha0: 0.1, kappa: 0.9 }
        );
        assert_eq!(
            "adaptive".parse::<StepSchedule>().unwrap(),
            StepSchedule::Adaptive { alpha0: DEFAULT_ALPHA0, kappa: DEFAULT_KAPPA }
        );
        assert!("harmonic:a0=-1".parse::<StepSchedule>().is_err());
        assert!("geometric:a0=1".parse::<StepSchedule>().is_err());
        assert!("adaptive:a0=1,kappa=1.5".parse::<StepSchedule>().is_err());
    }

    #[test]
    fn multiplier_sum_is_conserved() {
        let (shards, topo, _) = tiny_setup(4, 3, 1, 28, 13);
        let mut sim =
            Simulation::new(&shards, topo, RunConfig::new(1, 1.0, 8, harmonic(0.5))).unwrap();
        for _ in 0..8 {
            sim.round().unwrap();
            let mut sums = vec![0.0; 3];
            for state in sim.states() {
                for (acc, v) in sums.iter_mut().zip(&state.psi) {
                    *acc += v;
                }
            }
            for v in sums {
                assert!(v.abs() <= 1e-10, "multiplier sum drifted: {v}");
            }
        }
    }

    #[test]
    fn dual_value_never_exceeds_centralized_optimum() {
        let (shards, topo, data) = tiny_setup(3, 4, 2, 36, 17);
        let gamma = 1.0;
        let (_, z, _) = solve_centralized(&data, gamma, 2).unwrap();
        let mut sim =
            Simulation::new(&shards, topo, RunConfig::new(2, gamma, 60, harmonic(1.0))).unwrap();
        for _ in 0..60 {
            let record = sim.round().unwrap();
            assert!(
                record.dual_value <= z + 1e-8 * (1.0 + z.abs()),
                "round {}: dual {} exceeds optimum {}",
                record.t,
                record.dual_value,
                z
            );
        }
    }

    #[test]
    fn runs_are_deterministic() {
        let (shards, topo, _) = tiny_setup(3, 4, 2, 30, 19);
        let cfg = RunConfig::new(2, 1.0, 12, harmonic(0.7));
        let mut sim1 = Simulation::new(&shards, topo.clone(), cfg.clone()).unwrap();
        let mut sim2 = Simulation::new(&shards, topo, cfg).unwrap();
        let t1 = sim1.run().unwrap();
        let t2 = sim2.run().unwrap();
        assert_eq!(t1.len(), t2.len());
        for (a, b) in t1.iter().zip(&t2) {
            assert_eq!(a.consensus_error.to_bits(), b.consensus_error.to_bits());
            assert_eq!(a.dual_value.to_bits(), b.dual_value.to_bits());
            assert_eq!(a.alpha.to_bits(), b.alpha.to_bits());
        }
        for (s1, s2) in sim1.states().iter().zip(sim2.states()) {
            assert_eq!(s1.w, s2.w);
            assert_eq!(s1.psi, s2.psi);
        }
    }

    #[test]
    fn csv_row_has_expected_shape() {
        let record = IterationRecord {
            t: 3,
            alpha: 0.25,
            consensus_error: 1e-4,
            dual_value: -2.5,
            mean_local_error: 1e-6,
            wall: Duration::from_millis(12),
        };
        let row = record.to_csv_row();
        assert_eq!(row.split(',').count(), 6);
        assert!(row.starts_with("3,"));
        assert_eq!(
            IterationRecord::CSV_HEADER.split(',').count(),
            row.split(',').count()
        );
    }

    #[test]
    fn empty_matrix_shard_guard() {
        // A sharded dataset with mismatched feature counts must be rejected
        // before the simulation starts.
        let a = Dataset::new(Matrix::zeros(2, 3), vec![0.0, 0.0]).unwrap();
        let b = Dataset::new(Matrix::zeros(2, 4), vec![0.0, 0.0]).unwrap();
        assert!(ShardedDataset::new(vec![a, b]).is_err());
    }
}
