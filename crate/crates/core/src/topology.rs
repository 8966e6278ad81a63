//! Communication graphs and their Laplacians.
//!
//! Agents exchange data only along graph edges; every neighbor access in
//! the simulator goes through [`Topology::apply_laplacian_row`], which is
//! the single place where the locality contract (an agent touches only its
//! own and its neighbors' values) is enforced.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::prelude::*;
use rand_chacha::ChaCha12Rng;

use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// Graph families used by the experiments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TopologyKind {
    Clique,
    Star,
    Cycle,
    Path,
    /// Ring lattice with `k` nearest neighbors (even), each edge rewired
    /// with probability `beta`.
    WattsStrogatz { k: usize, beta: f64 },
}

impl fmt::Display for TopologyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TopologyKind::Clique => write!(f, "clique"),
            TopologyKind::Star => write!(f, "star"),
            TopologyKind::Cycle => write!(f, "cycle"),
            TopologyKind::Path => write!(f, "path"),
            TopologyKind::WattsStrogatz { k, beta } => write!(f, "ws:K={k},beta={beta}"),
        }
    }
}

impl FromStr for TopologyKind {
    type Err = Error;

    /// Parses `clique`, `star`, `cycle`, `path`, or `ws:K=<int>,beta=<float>`.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "clique" => return Ok(TopologyKind::Clique),
            "star" => return Ok(TopologyKind::Star),
            "cycle" => return Ok(TopologyKind::Cycle),
            "path" => return Ok(TopologyKind::Path),
            _ => {}
        }
        let body = s
            .strip_prefix("ws:")
            .ok_or_else(|| Error::Parse(format!("unknown topology {s:?}")))?;
        let mut k = None;
        let mut beta = None;
        for part in body.split(',') {
            let (key, val) = part
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("bad topology field {part:?}")))?;
            match key {
                "K" => {
                    k = Some(val.parse::<usize>().map_err(|_| {
                        Error::Parse(format!("bad K value {val:?}"))
                    })?)
                }
                "beta" => {
                    beta = Some(val.parse::<f64>().map_err(|_| {
                        Error::Parse(format!("bad beta value {val:?}"))
                    })?)
                }
                _ => return Err(Error::Parse(format!("unknown topology field {key:?}"))),
            }
        }
        match (k, beta) {
            (Some(k), Some(beta)) => Ok(TopologyKind::WattsStrogatz { k, beta }),
            _ => Err(Error::Parse("ws topology needs both K and beta".into())),
        }
    }
}

/// An undirected connected communication graph.
#[derive(Debug, Clone, PartialEq)]
pub struct Topology {
    n_agents: usize,
    edges: BTreeSet<(usize, usize)>,
    neighbors: Vec<Vec<usize>>,
    laplacian: Matrix,
}

impl Topology {
    /// Builds a connected graph of the requested family.
    ///
    /// Watts-Strogatz rewiring can disconnect the graph; in that case the
    /// construction retries with `seed + 1`, up to 100 attempts.
    pub fn build(kind: TopologyKind, n_agents: usize, seed: u64) -> Result<Topology> {
        if n_agents < 2 {
            return Err(Error::InvalidParams(format!(
                "topology needs at least 2 agents, got {n_agents}"
            )));
        }
        let n = n_agents;
        let edges: BTreeSet<(usize, usize)> = match kind {
            TopologyKind::Clique => (0..n)
                .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
                .collect(),
            TopologyKind::Star => (1..n).map(|j| (0, j)).collect(),
            TopologyKind::Path => (0..n - 1).map(|i| (i, i + 1)).collect(),
            TopologyKind::Cycle => (0..n)
                .map(|i| {
                    let j = (i + 1) % n;
                    (i.min(j), i.max(j))
                })
                .collect(),
            TopologyKind::WattsStrogatz { k, beta } => {
                if k % 2 != 0 || k < 2 || k >= n {
                    return Err(Error::InvalidParams(format!(
                        "watts-strogatz needs an even mean degree with 2 <= K < N, got K={k}, N={n}"
                    )));
                }
                if !(0.0..=1.0).contains(&beta) {
                    return Err(Error::InvalidParams(format!(
                        "watts-strogatz beta must lie in [0, 1], got {beta}"
                    )));
                }
                let mut attempt = 0;
                loop {
                    let candidate = watts_strogatz_edges(n, k, beta, seed.wrapping_add(attempt));
                    if connected(n, &candidate) {
                        break candidate;
                    }
                    attempt += 1;
                    if attempt >= 100 {
                        return Err(Error::InvalidParams(
                            "watts-strogatz rewiring stayed disconnected after 100 attempts".into(),
                        ));
                    }
                }
            }
        };
        let topo = Topology::from_edges(n, edges);
        debug_assert!(connected(n, &topo.edges));
        Ok(topo)
    }

    /// The one-agent graph: no edges, a 1x1 zero Laplacian. Used by
    /// single-agent simulations, where the dual term vanishes.
    pub fn singleton() -> Topology {
        Topology::from_edges(1, BTreeSet::new())
    }

    fn from_edges(n: usize, edges: BTreeSet<(usize, usize)>) -> Topology {
        let mut neighbors = vec![Vec::new(); n];
        for &(i, j) in &edges {
            neighbors[i].push(j);
            neighbors[j].push(i);
        }
        for list in &mut neighbors {
            list.sort_unstable();
        }
        let mut laplacian = Matrix::zeros(n, n);
        for (i, list) in neighbors.iter().enumerate() {
            laplacian.set(i, i, list.len() as f64);
            for &j in list {
                laplacian.set(i, j, -1.0);
            }
        }
        Topology { n_agents: n, edges, neighbors, laplacian }
    }

    pub fn n_agents(&self) -> usize {
        self.n_agents
    }

    pub fn edges(&self) -> &BTreeSet<(usize, usize)> {
        &self.edges
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.neighbors[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.neighbors[i].len()
    }

    pub fn laplacian(&self) -> &Matrix {
        &self.laplacian
    }

    /// Applies row `i` of the Laplacian to a family of per-agent vectors:
    /// `degree(i) * v_i - sum of v_j over neighbors j`.
    ///
    /// Values are fetched through `value_of`, which is queried only for `i`
    /// and its neighbors; this is the locality contract of the whole
    /// simulator and is what tests instrument.
    pub fn apply_laplacian_row<'a, F>(&self, i: usize, mut value_of: F) -> Result<Vec<f64>>
    where
        F: FnMut(usize) -> Option<&'a [f64]>,
    {
        let own = value_of(i).ok_or(Error::MissingNeighborValue(i))?;
        let deg = self.degree(i) as f64;
        let mut out: Vec<f64> = own.iter().map(|v| deg * v).collect();
        for &j in self.neighbors(i) {
            let vj = value_of(j).ok_or(Error::MissingNeighborValue(j))?;
            if vj.len() != out.len() {
                return Err(Error::DimensionMismatch(format!(
                    "agent {j} vector has length {}, expected {}",
                    vj.len(),
                    out.len()
                )));
            }
            for (o, v) in out.iter_mut().zip(vj) {
                *o -= v;
            }
        }
        Ok(out)
    }

    /// Convenience wrapper over [`Topology::apply_laplacian_row`] for a full
    /// slice of per-agent vectors.
    pub fn apply_laplacian_row_slice(&self, i: usize, values: &[Vec<f64>]) -> Result<Vec<f64>> {
        self.apply_laplacian_row(i, |j| values.get(j).map(Vec::as_slice))
    }
}

fn watts_strogatz_edges(n: usize, k: usize, beta: f64, seed: u64) -> BTreeSet<(usize, usize)> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let key = |a: usize, b: usize| (a.min(b), a.max(b));
    let mut edges = BTreeSet::new();
    for i in 0..n {
        for j in 1..=k / 2 {
            edges.insert(key(i, (i + j) % n));
        }
    }
    // Rewire ring by ring, as in the standard construction.
    for j in 1..=k / 2 {
        for i in 0..n {
            let old = key(i, (i + j) % n);
            if !edges.contains(&old) {
                continue;
            }
            if rng.random::<f64>() >= beta {
                continue;
            }
            // Skip if i is already adjacent to everyone else.
            let degree_i = edges.iter().filter(|&&(a, b)| a == i || b == i).count();
            if degree_i >= n - 1 {
                continue;
            }
            let target = loop {
                let t = rng.random_range(0..n);
                if t != i && !edges.contains(&key(i, t)) {
                    break t;
                }
            };
            edges.remove(&old);
            edges.insert(key(i, target));
        }
    }
    edges
}

fn connected(n: usize, edges: &BTreeSet<(usize, usize)>) -> bool {
    if n == 0 {
        return false;
    }
    let mut adj = vec![Vec::new(); n];
    for &(i, j) in edges {
        adj[i].push(j);
        adj[j].push(i);
    }
    let mut seen = vec![false; n];
    let mut queue = std::collections::VecDeque::from([0usize]);
    seen[0] = true;
    let mut count = 1;
    while let Some(i) = queue.pop_front() {
        for &j in &adj[i] {
            if !seen[j] {
                seen[j] = true;
                count += 1;
                queue.push_back(j);
            }
        }
    }
    count == n
}
