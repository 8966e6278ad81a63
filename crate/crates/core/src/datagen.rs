//! Synthetic regression data and its distribution across agents.
//!
//! Observations follow `Y = X w* + W`: the true regressor `w*` has exactly
//! `k` nonzero entries drawn uniformly from [-1, 1], rows of `X` are
//! zero-mean Gaussian with Toeplitz covariance `rho^|i-j|`, and the noise is
//! i.i.d. normal with standard deviation `sigma`. Everything is driven by a
//! seeded ChaCha12 stream so that a `(parameters, seed)` pair reproduces the
//! same dataset bit for bit on any platform.

use std::fs;
use std::path::Path;

use rand::prelude::*;
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fmt::f64_17;
use crate::linalg::{cholesky, Matrix};

/// Name of the random generator recorded in dataset metadata.
pub const RNG_NAME: &str = "chacha12";

/// The planted model behind a synthetic dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    /// True regressor, zero off `support`.
    pub w_star: Vec<f64>,
    /// Sorted indices of the nonzero entries; length is the sparsity k.
    pub support: Vec<usize>,
    pub sigma: f64,
    pub rho: f64,
    pub seed: u64,
}

/// A design matrix with its observations.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    x: Matrix,
    y: Vec<f64>,
}

impl Dataset {
    pub fn new(x: Matrix, y: Vec<f64>) -> Result<Self> {
        if x.rows() == 0 {
            return Err(Error::InvalidParams("dataset must have at least one row".into()));
        }
        if y.len() != x.rows() {
            return Err(Error::DimensionMismatch(format!(
                "{} design rows but {} observations",
                x.rows(),
                y.len()
            )));
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParams("non-finite observation".into()));
        }
        Ok(Dataset { x, y })
    }

    pub fn x(&self) -> &Matrix {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    /// Number of rows.
    pub fn n(&self) -> usize {
        self.x.rows()
    }

    /// Number of features.
    pub fn p(&self) -> usize {
        self.x.cols()
    }
}

/// One dataset split into per-agent shards that share the feature space.
#[derive(Debug, Clone, PartialEq)]
pub struct ShardedDataset {
    shards: Vec<Dataset>,
}

impl ShardedDataset {
    pub fn new(shards: Vec<Dataset>) -> Result<Self> {
        let p = match shards.first() {
            Some(d) => d.p(),
            None => return Err(Error::InvalidParams("no shards".into())),
        };
        if shards.iter().any(|d| d.p() != p) {
            return Err(Error::ShapeMismatch("shards disagree on feature count".into()));
        }
        Ok(ShardedDataset { shards })
    }

    pub fn shards(&self) -> &[Dataset] {
        &self.shards
    }

    pub fn n_shards(&self) -> usize {
        self.shards.len()
    }

    pub fn p(&self) -> usize {
        self.shards[0].p()
    }

    /// Rebuilds the pooled dataset by concatenating shard rows.
    pub fn concat(&self) -> Dataset {
        let p = self.p();
        let n: usize = self.shards.iter().map(Dataset::n).sum();
        let mut x = Matrix::zeros(n, p);
        let mut y = Vec::with_capacity(n);
        let mut r = 0;
        for shard in &self.shards {
            for i in 0..shard.n() {
                for j in 0..p {
                    x.set(r, j, shard.x().get(i, j));
                }
                y.push(shard.y()[i]);
                r += 1;
            }
        }
        Dataset::new(x, y).expect("shards are valid datasets")
    }
}

/// Generates a synthetic dataset together with its planted ground truth.
///
/// Rows of `X` are sampled as `L z` with `L` the Cholesky factor of the
/// Toeplitz covariance and `z` standard normal, so `rho = 0` yields exactly
/// independent features.
pub fn generate(
    p: usize,
    k: usize,
    n: usize,
    sigma: f64,
    rho: f64,
    seed: u64,
) -> Result<(Dataset, GroundTruth)> {
    if p == 0 || k == 0 || k > p {
        return Err(Error::InvalidParams(format!(
            "sparsity k must satisfy 1 <= k <= p, got k={k}, p={p}"
        )));
    }
    if n == 0 {
        return Err(Error::InvalidParams("need at least one row".into()));
    }
    if !(0.0..1.0).contains(&rho) {
        return Err(Error::InvalidParams(format!("rho must lie in [0, 1), got {rho}")));
    }
    if sigma < 0.0 || !sigma.is_finite() {
        return Err(Error::InvalidParams(format!("sigma must be >= 0, got {sigma}")));
    }

    let mut rng = ChaCha12Rng::seed_from_u64(seed);

    let mut support: Vec<usize> = rand::seq::index::sample(&mut rng, p, k).into_vec();
    support.sort_unstable();

    let mut w_star = vec![0.0; p];
    for &idx in &support {
        let v = loop {
            let v: f64 = rng.random_range(-1.0..=1.0);
            if v != 0.0 {
                break v;
            }
        };
        w_star[idx] = v;
    }

    // Toeplitz feature covariance rho^|i-j|, sampled through its Cholesky factor.
    let mut cov = Matrix::zeros(p, p);
    for i in 0..p {
        for j in 0..p {
            cov.set(i, j, rho.powi((i as i32 - j as i32).abs()));
        }
    }
    let cov_factor = cholesky(&cov)?;
    let l = cov_factor.lower();

    let mut x = Matrix::zeros(n, p);
    let mut z = vec![0.0; p];
    for r in 0..n {
        for zj in z.iter_mut() {
            *zj = rng.sample(StandardNormal);
        }
        for j in 0..p {
            let mut v = 0.0;
            for m in 0..=j {
                v += l.get(j, m) * z[m];
            }
            x.set(r, j, v);
        }
    }

    let mut y = x.matvec(&w_star)?;
    for yi in y.iter_mut() {
        let noise: f64 = rng.sample(StandardNormal);
        *yi += sigma * noise;
    }

    let data = Dataset::new(x, y)?;
    let truth = GroundTruth { w_star, support, sigma, rho, seed };
    Ok((data, truth))
}

/// Splits a dataset into `n_agents` shards whose sizes differ by at most one.
///
/// Rows are assigned by shuffling the row indices and dealing contiguous
/// blocks; within a shard, rows keep their original order so that a single
/// shard reproduces the input exactly.
pub fn partition(data: &Dataset, n_agents: usize, seed: u64) -> Result<ShardedDataset> {
    if n_agents == 0 {
        return Err(Error::InvalidParams("need at least one agent".into()));
    }
    if data.n() < n_agents {
        return Err(Error::TooFewRows { have: data.n(), need: n_agents });
    }

    let n = data.n();
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);

    let base = n / n_agents;
    let extra = n % n_agents;
    let mut shards = Vec::with_capacity(n_agents);
    let mut offset = 0;
    for a in 0..n_agents {
        let size = base + usize::from(a < extra);
        let mut idx: Vec<usize> = order[offset..offset + size].to_vec();
        idx.sort_unstable();
        offset += size;

        let p = data.p();
        let mut x = Matrix::zeros(size, p);
        let mut y = Vec::with_capacity(size);
        for (r, &src) in idx.iter().enumerate() {
            for j in 0..p {
                x.set(r, j, data.x().get(src, j));
            }
            y.push(data.y()[src]);
        }
        shards.push(Dataset::new(x, y)?);
    }
    ShardedDataset::new(shards)
}

#[derive(Serialize, Deserialize)]
struct MetaJson {
    p: usize,
    n: usize,
    k: usize,
    sigma: f64,
    rho: f64,
    seed: u64,
    rng_name: String,
    w_star: Vec<f64>,
    support: Vec<usize>,
}

fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Writes `X.csv`, `y.csv`, and `meta.json` into `dir`, creating it if
/// needed. Floats are printed with 17 significant digits so a reload is
/// value-exact.
pub fn save_dataset(dir: &Path, data: &Dataset, truth: &GroundTruth) -> Result<()> {
    fs::create_dir_all(dir)?;

    let mut xs = String::new();
    for i in 0..data.n() {
        let row: Vec<String> = data.x().row(i).iter().map(|&v| f64_17(v)).collect();
        xs.push_str(&row.join(","));
        xs.push('\n');
    }
    write_atomic(&dir.join("X.csv"), &xs)?;

    let mut ys = String::new();
    for &v in data.y() {
        ys.push_str(&f64_17(v));
        ys.push('\n');
    }
    write_atomic(&dir.join("y.csv"), &ys)?;

    let meta = MetaJson {
        p: data.p(),
        n: data.n(),
        k: truth.support.len(),
        sigma: truth.sigma,
        rho: truth.rho,
        seed: truth.seed,
        rng_name: RNG_NAME.to_string(),
        w_star: truth.w_star.clone(),
        support: truth.support.clone(),
    };
    write_atomic(&dir.join("meta.json"), &serde_json::to_string_pretty(&meta)?)?;
    Ok(())
}

/// Reads a dataset directory written by [`save_dataset`].
pub fn load_dataset(dir: &Path) -> Result<(Dataset, GroundTruth)> {
    let parse = |s: &str, what: &str, line: usize| -> Result<f64> {
        s.trim().parse::<f64>().map_err(|_| {
            Error::Parse(format!("{what} line {}: bad float {s:?}", line + 1))
        })
    };

    let meta: MetaJson = serde_json::from_str(&fs::read_to_string(dir.join("meta.json"))?)?;

    let x_text = fs::read_to_string(dir.join("X.csv"))?;
    let mut rows = Vec::new();
    for (i, line) in x_text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let row: Result<Vec<f64>> = line.split(',').map(|tok| parse(tok, "X.csv", i)).collect();
        let row = row?;
        if row.len() != meta.p {
            return Err(Error::Parse(format!(
                "X.csv line {}: expected {} columns, found {}",
                i + 1,
                meta.p,
                row.len()
            )));
        }
        rows.push(row);
    }
    let x = Matrix::from_rows(&rows)?;

    let y_text = fs::read_to_string(dir.join("y.csv"))?;
    let y: Result<Vec<f64>> = y_text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| parse(l, "y.csv", i))
        .collect();
    let y = y?;

    if x.rows() != meta.n || y.len() != meta.n {
        return Err(Error::Parse(format!(
            "meta.json says n={}, but X.csv has {} rows and y.csv has {}",
            meta.n,
            x.rows(),
            y.len()
        )));
    }

    let data = Dataset::new(x, y)?;
    let truth = GroundTruth {
        w_star: meta.w_star,
        support: meta.support,
        sigma: meta.sigma,
        rho: meta.rho,
        seed: meta.seed,
    };
    Ok((data, truth))
}
