//! One agent's per-round subproblem and its exact solver.
//!
//! The subproblem is sparse ridge regression tilted by a dual vector `D`:
//!
//! ```text
//! minimize   0.5*||Y - X w||^2 + ||w||^2/gamma + <D, w>
//! subject to at most k nonzero entries of w
//! ```
//!
//! Completing the square with the upper-triangular factor `U` of
//! `X^T X + I/gamma` rewrites the objective, up to a constant, as
//! `0.5*||yb - U w||^2 + ||w||^2/(2*gamma) + d^T U w` with `U^T yb = X^T Y`
//! and `U^T d = D`. In these coordinates the optimal value `c(s)` of every
//! fixed support `s` has a closed form built from a single SPD solve against
//! `I + gamma * U diag(s) U^T`, and `c` extends to a convex differentiable
//! function on the relaxed cube. [`outer_approx`] minimizes `c` exactly over
//! the cardinality-bounded binary cube by cutting planes: each candidate
//! support contributes the affine under-estimator
//! `c(s_i) + grad c(s_i)^T (s - s_i)`, and the master problem
//! (see [`crate::master`]) picks the next candidate.

use crate::datagen::Dataset;
use crate::error::{Error, Result};
use crate::linalg::{cholesky, dot, Matrix};
use crate::master::{solve_master, Cut};
use crate::support::SupportVector;

/// Default cut budget; desk-scale problems close the gap in a handful of
/// cuts, so hitting this indicates a solver bug rather than a hard instance.
pub const DEFAULT_MAX_CUTS: usize = 500;

/// Relative gap at which the outer-approximation loop declares the bound
/// tight. Exact equality is fragile in floating point; finite termination
/// survives a tiny tolerance.
pub const GAP_TOL: f64 = 1e-9;

/// One agent's subproblem in transformed coordinates.
///
/// `gamma` is the local ridge weight: the penalty in the raw objective is
/// `||w||^2 / gamma`. The simulator sets it to `gamma_run * n_agents` so
/// that the agents' objectives sum to the centralized one.
#[derive(Debug, Clone)]
pub struct LocalProblem {
    /// Upper-triangular transform with `xbar^T xbar = X^T X + I/gamma`.
    xbar: Matrix,
    /// Transformed observations: `xbar^T ybar = X^T Y`.
    ybar: Vec<f64>,
    gamma: f64,
    /// `0.5*(Y^T Y - ybar^T ybar)`, carried so objective values are
    /// comparable to the raw objective.
    const_term: f64,
    p: usize,
}

/// Result of an exact local solve.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalSolution {
    pub s: SupportVector,
    pub w: Vec<f64>,
    /// Raw objective value at `w`, constant term included.
    pub objective: f64,
    pub cuts_used: usize,
    pub master_nodes: usize,
}

/// Per-iteration bounds recorded by [`outer_approx_traced`].
#[derive(Debug, Clone, Default)]
pub struct OaTrace {
    /// Master optimum after each cut; a non-decreasing lower bound on the
    /// optimal `c`.
    pub lower_bounds: Vec<f64>,
    /// Best evaluated `c` after each cut; non-increasing.
    pub upper_bounds: Vec<f64>,
}

/// Rewrites an agent's data and dual vector into transformed coordinates.
///
/// Returns the reusable [`LocalProblem`] together with the reduced dual
/// `d` satisfying `d^T xbar w = <D, w>` for every `w`.
pub fn transform(data: &Dataset, gamma: f64, d_dual: &[f64]) -> Result<(LocalProblem, Vec<f64>)> {
    let lp = LocalProblem::new(data, gamma)?;
    let d = lp.reduce_dual(d_dual)?;
    Ok((lp, d))
}

impl LocalProblem {
    pub fn new(data: &Dataset, gamma: f64) -> Result<Self> {
        if !(gamma > 0.0) || !gamma.is_finite() {
            return Err(Error::InvalidParams(format!(
                "local ridge weight must be positive, got {gamma}"
            )));
        }
        let p = data.p();
        let mut a = data.x().gram();
        for i in 0..p {
            a.set(i, i, a.get(i, i) + 1.0 / gamma);
        }
        let factor = cholesky(&a)?;
        let xbar = factor.upper();
        let xty = data.x().matvec_t(data.y())?;
        let ybar = factor.forward_substitute(&xty)?;
        let yty = dot(data.y(), data.y());
        let const_term = 0.5 * (yty - dot(&ybar, &ybar));
        Ok(LocalProblem { xbar, ybar, gamma, const_term, p })
    }

    /// Assembles a problem directly from transformed quantities. `xbar` must
    /// be square upper-triangular with a positive diagonal.
    pub fn from_parts(
        xbar: Matrix,
        ybar: Vec<f64>,
        gamma: f64,
        const_term: f64,
    ) -> Result<Self> {
        let p = xbar.rows();
        if xbar.cols() != p || ybar.len() != p {
            return Err(Error::DimensionMismatch(format!(
                "xbar is {}x{}, ybar has length {}",
                xbar.rows(),
                xbar.cols(),
                ybar.len()
            )));
        }
        if !(gamma > 0.0) || !gamma.is_finite() || !const_term.is_finite() {
            return Err(Error::InvalidParams("bad gamma or constant term".into()));
        }
        for i in 0..p {
            if xbar.get(i, i) <= 0.0 {
                return Err(Error::InvalidParams(format!(
                    "xbar diagonal entry {i} is not positive"
                )));
            }
            for j in 0..i {
                if xbar.get(i, j) != 0.0 {
                    return Err(Error::InvalidParams(
                        "xbar must be upper-triangular".into(),
                    ));
                }
            }
        }
        Ok(LocalProblem { xbar, ybar, gamma, const_term, p })
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn const_term(&self) -> f64 {
        self.const_term
    }

    pub fn xbar(&self) -> &Matrix {
        &self.xbar
    }

    pub fn ybar(&self) -> &[f64] {
        &self.ybar
    }

    /// Maps a raw dual vector `D` to the reduced `d` with `xbar^T d = D`.
    pub fn reduce_dual(&self, d_dual: &[f64]) -> Result<Vec<f64>> {
        if d_dual.len() != self.p {
            return Err(Error::DimensionMismatch(format!(
                "dual vector has length {}, expected {}",
                d_dual.len(),
                self.p
            )));
        }
        // xbar^T is lower triangular; forward substitution against it.
        let mut d = vec![0.0; self.p];
        for i in 0..self.p {
            let mut v = d_dual[i];
            for m in 0..i {
                v -= self.xbar.get(m, i) * d[m];
            }
            d[i] = v / self.xbar.get(i, i);
        }
        Ok(d)
    }

    /// Transformed objective at `w`, constant term included. Equals the raw
    /// objective `0.5*||Y - X w||^2 + ||w||^2/gamma + <D, w>` exactly.
    pub fn objective(&self, d: &[f64], w: &[f64]) -> Result<f64> {
        self.check_len(d)?;
        self.check_len(w)?;
        let xw = self.xbar.matvec(w)?;
        let mut quad = 0.0;
        for (yi, xi) in self.ybar.iter().zip(&xw) {
            let r = yi - xi;
            quad += r * r;
        }
        Ok(0.5 * quad + dot(w, w) / (2.0 * self.gamma) + dot(d, &xw) + self.const_term)
    }

    /// Optimal value of the fixed-support problem and the associated dual
    /// residual `alpha(s) = (I + gamma * xbar diag(s) xbar^T)^{-1} (ybar - d)`.
    ///
    /// `s` may lie anywhere in the relaxed cube `[0, 1]^p`; on binary points
    /// the value is the exact support cost, and on fractional points it is
    /// the convex extension whose gradient [`Self::c_gradient`] returns. The
    /// constant term is not included.
    pub fn c_value(&self, d: &[f64], s: &[f64]) -> Result<(f64, Vec<f64>)> {
        self.check_len(d)?;
        self.check_len(s)?;
        if s.iter().any(|v| !(-1e-12..=1.0 + 1e-12).contains(v)) {
            return Err(Error::InvalidParams(
                "support weights must lie in [0, 1]".into(),
            ));
        }
        let p = self.p;
        let mut m = Matrix::identity(p);
        // I + gamma * sum_j s_j * col_j col_j^T; column j of xbar has rows 0..=j.
        for j in 0..p {
            let sj = s[j];
            if sj == 0.0 {
                continue;
            }
            let w = self.gamma * sj;
            for a in 0..=j {
                let xa = self.xbar.get(a, j);
                if xa == 0.0 {
                    continue;
                }
                for b in a..=j {
                    m.set(a, b, m.get(a, b) + w * xa * self.xbar.get(b, j));
                }
            }
        }
        for a in 0..p {
            for b in 0..a {
                m.set(a, b, m.get(b, a));
            }
        }
        let resid: Vec<f64> = self.ybar.iter().zip(d).map(|(y, di)| y - di).collect();
        let alpha = cholesky(&m)?.solve(&resid)?;
        let value = 0.5 * dot(&resid, &alpha) - 0.5 * dot(d, d) + dot(&self.ybar, d);
        Ok((value, alpha))
    }

    /// Gradient of the relaxed support cost: component `i` equals
    /// `-(gamma/2) * (xbar_i^T alpha)^2`, hence is never positive.
    pub fn c_gradient(&self, d: &[f64], s: &[f64]) -> Result<Vec<f64>> {
        let (_, alpha) = self.c_value(d, s)?;
        Ok(self.gradient_from_alpha(&alpha))
    }

    fn gradient_from_alpha(&self, alpha: &[f64]) -> Vec<f64> {
        let t = self
            .xbar
            .matvec_t(alpha)
            .expect("alpha has the problem dimension");
        t.iter().map(|ti| -0.5 * self.gamma * ti * ti).collect()
    }

    /// Minimizer of the objective restricted to the given support: zero off
    /// the support, and on it the solution of the restricted ridge system
    /// with Gram `(I/gamma + xbar_s^T xbar_s)` and right-hand side
    /// `xbar_s^T (ybar - d)`.
    pub fn solve_support(&self, d: &[f64], s: &SupportVector) -> Result<Vec<f64>> {
        self.check_len(d)?;
        if s.len() != self.p {
            return Err(Error::DimensionMismatch(format!(
                "support has length {}, expected {}",
                s.len(),
                self.p
            )));
        }
        let idx = s.indices();
        let mut w = vec![0.0; self.p];
        if idx.is_empty() {
            return Ok(w);
        }
        let resid: Vec<f64> = self.ybar.iter().zip(d).map(|(y, di)| y - di).collect();
        let m = idx.len();
        let mut gram = Matrix::zeros(m, m);
        let mut rhs = vec![0.0; m];
        for (a, &ja) in idx.iter().enumerate() {
            for (b, &jb) in idx.iter().enumerate().skip(a) {
                let mut v = self.col_dot(ja, jb);
                if ja == jb {
                    v += 1.0 / self.gamma;
                }
                gram.set(a, b, v);
                gram.set(b, a, v);
            }
            rhs[a] = self.col_dot_vec(ja, &resid);
        }
        let sol = cholesky(&gram)?.solve(&rhs)?;
        for (a, &ja) in idx.iter().enumerate() {
            w[ja] = sol[a];
        }
        Ok(w)
    }

    /// Indicator of the `k` largest-magnitude entries of the dense
    /// (full-support) solution; ties go to the lower index.
    pub fn warm_start(&self, d: &[f64], k: usize) -> Result<SupportVector> {
        if k == 0 || k > self.p {
            return Err(Error::InvalidParams(format!(
                "warm start needs 1 <= k <= p, got k={k}, p={}",
                self.p
            )));
        }
        let dense = self.solve_support(d, &SupportVector::ones(self.p))?;
        let mut order: Vec<usize> = (0..self.p).collect();
        order.sort_by(|&a, &b| {
            dense[b]
                .abs()
                .partial_cmp(&dense[a].abs())
                .expect("finite weights")
                .then(a.cmp(&b))
        });
        SupportVector::from_indices(self.p, &order[..k])
    }

    /// Dot product of columns `a` and `b` of the upper-triangular transform.
    fn col_dot(&self, a: usize, b: usize) -> f64 {
        let top = a.min(b);
        (0..=top).map(|r| self.xbar.get(r, a) * self.xbar.get(r, b)).sum()
    }

    fn col_dot_vec(&self, a: usize, v: &[f64]) -> f64 {
        (0..=a).map(|r| self.xbar.get(r, a) * v[r]).sum()
    }

    fn check_len(&self, v: &[f64]) -> Result<()> {
        if v.len() != self.p {
            return Err(Error::DimensionMismatch(format!(
                "vector has length {}, expected {}",
                v.len(),
                self.p
            )));
        }
        Ok(())
    }
}

/// Minimizes the local objective exactly over supports of size at most `k`
/// by outer approximation, starting from `warm`.
pub fn outer_approx(
    lp: &LocalProblem,
    d: &[f64],
    k: usize,
    warm: &SupportVector,
    max_cuts: usize,
) -> Result<LocalSolution> {
    outer_approx_traced(lp, d, k, warm, max_cuts).map(|(sol, _)| sol)
}

/// Same as [`outer_approx`], also returning the bound trace.
pub fn outer_approx_traced(
    lp: &LocalProblem,
    d: &[f64],
    k: usize,
    warm: &SupportVector,
    max_cuts: usize,
) -> Result<(LocalSolution, OaTrace)> {
    let p = lp.p();
    if k == 0 || k > p {
        return Err(Error::InvalidParams(format!(
            "cardinality bound must satisfy 1 <= k <= p, got k={k}, p={p}"
        )));
    }
    if warm.len() != p || warm.count() > k {
        return Err(Error::InvalidParams(format!(
            "warm start {warm} is not a feasible support for k={k}"
        )));
    }
    if max_cuts == 0 {
        return Err(Error::InvalidParams("cut budget must be positive".into()));
    }

    let mut cuts: Vec<Cut> = Vec::new();
    let mut seen: std::collections::BTreeSet<SupportVector> = std::collections::BTreeSet::new();
    let mut trace = OaTrace::default();
    let mut nodes = 0usize;
    let mut best_c = f64::INFINITY;
    let mut best_s = warm.clone();
    let mut current = warm.clone();

    loop {
        let (c_t, alpha) = lp.c_value(d, &current.to_relaxed())?;
        let grad = lp.gradient_from_alpha(&alpha);
        if c_t < best_c || (c_t == best_c && current < best_s) {
            best_c = c_t;
            best_s = current.clone();
        }
        trace.upper_bounds.push(best_c);
        seen.insert(current.clone());
        cuts.push(Cut { value: c_t, grad, anchor: current.clone() });

        let master = solve_master(&cuts, p, k)?;
        nodes += master.nodes_explored;
        trace.lower_bounds.push(master.eta);

        let gap_closed = best_c - master.eta <= GAP_TOL * (1.0 + best_c.abs());
        // A repeated support means the bound is already tight there.
        if gap_closed || seen.contains(&master.s) {
            break;
        }
        if cuts.len() >= max_cuts {
            return Err(Error::CutBudgetExceeded(max_cuts));
        }
        current = master.s;
    }

    let w = lp.solve_support(d, &best_s)?;
    let sol = LocalSolution {
        s: best_s,
        w,
        objective: best_c + lp.const_term(),
        cuts_used: cuts.len(),
        master_nodes: nodes,
    };
    Ok((sol, trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datagen::Dataset;
    use rand::prelude::*;
    use rand_chacha::ChaCha12Rng;

    pub(crate) fn random_instance(
        p: usize,
        n: usize,
        gamma: f64,
        dual_scale: f64,
        rng: &mut ChaCha12Rng,
    ) -> (LocalProblem, Vec<f64>, Dataset, Vec<f64>) {
        let mut x = Matrix::zeros(n, p);
        for i in 0..n {
            for j in 0..p {
                x.set(i, j, rng.random_range(-1.0..1.0));
            }
        }
        let y: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let d_dual: Vec<f64> = (0..p).map(|_| rng.random_range(-dual_scale..=dual_scale)).collect();
        let data = Dataset::new(x, y).unwrap();
        let (lp, d) = transform(&data, gamma, &d_dual).unwrap();
        (lp, d, data, d_dual)
    }

    #[test]
    fn transform_invariants_hold() {
        let mut rng = ChaCha12Rng::seed_from_u64(2);
        let (lp, _, data, _) = random_instance(5, 12, 2.5, 1.0, &mut rng);
        let p = lp.p();
        // xbar^T xbar == X^T X + I/gamma
        let gram = lp.xbar().transpose().matmul(lp.xbar()).unwrap();
        let mut target = data.x().gram();
        for i in 0..p {
            target.set(i, i, target.get(i, i) + 1.0 / lp.gamma());
        }
        for i in 0..p {
            for j in 0..p {
                let t = target.get(i, j);
                assert!((gram.get(i, j) - t).abs() <= 1e-8 * (1.0 + t.abs()));
            }
        }
        // ybar^T xbar == Y^T X
        let lhs = lp.xbar().matvec_t(lp.ybar()).unwrap();
        let rhs = data.x().matvec_t(data.y()).unwrap();
        for (l, r) in lhs.iter().zip(&rhs) {
            assert!((l - r).abs() <= 1e-8 * (1.0 + r.abs()));
        }
        // const_term == 0.5*(Y^T Y - ybar^T ybar)
        let expect = 0.5 * (dot(data.y(), data.y()) - dot(lp.ybar(), lp.ybar()));
        assert!((lp.const_term() - expect).abs() <= 1e-12 * (1.0 + expect.abs()));
    }

    #[test]
    fn transform_zero_dual_gives_zero_d() {
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        let (lp, _, _, _) = random_instance(4, 9, 1.0, 0.0, &mut rng);
        let d = lp.reduce_dual(&vec![0.0; 4]).unwrap();
        assert_eq!(d, vec![0.0; 4]);
    }

    #[test]
    fn transform_of_zero_design_is_identity() {
        let p = 3;
        let data = Dataset::new(Matrix::zeros(6, p), vec![0.0; 6]).unwrap();
        let d_dual = vec![0.5, -1.0, 2.0];
        let (lp, d) = transform(&data, 1.0, &d_dual).unwrap();
        assert_eq!(lp.xbar(), &Matrix::identity(p));
        assert_eq!(lp.ybar(), &[0.0, 0.0, 0.0]);
        assert_eq!(d, d_dual);
        assert_eq!(lp.const_term(), 0.0);
    }

    #[test]
    fn reduced_dual_reproduces_inner_products() {
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        let (lp, d, _, d_dual) = random_instance(5, 11, 0.7, 2.0, &mut rng);
        for _ in 0..10 {
            let w: Vec<f64> = (0..5).map(|_| rng.random_range(-2.0..2.0)).collect();
            let xw = lp.xbar().matvec(&w).unwrap();
            let lhs = dot(&d, &xw);
            let rhs = dot(&d_dual, &w);
            assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + rhs.abs()));
        }
    }

    #[test]
    fn transformed_objective_equals_raw_objective() {
        let mut rng = ChaCha12Rng::seed_from_u64(8);
        let (lp, d, data, d_dual) = random_instance(6, 15, 1.8, 1.5, &mut rng);
        for _ in 0..10 {
            let w: Vec<f64> = (0..6).map(|_| rng.random_range(-1.0..1.0)).collect();
            let fit = data.x().matvec(&w).unwrap();
            let mut raw = 0.0;
            for (yi, fi) in data.y().iter().zip(&fit) {
                raw += (yi - fi) * (yi - fi);
            }
            raw = 0.5 * raw + dot(&w, &w) / lp.gamma() + dot(&d_dual, &w);
            let transformed = lp.objective(&d, &w).unwrap();
            assert!((raw - transformed).abs() <= 1e-10 * (1.0 + raw.abs()));
        }
    }

    #[test]
    fn c_value_empty_support() {
        let mut rng = ChaCha12Rng::seed_from_u64(13);
        let (lp, d, _, _) = random_instance(5, 10, 1.0, 1.0, &mut rng);
        let (value, alpha) = lp.c_value(&d, &vec![0.0; 5]).unwrap();
        let expect = 0.5 * dot(lp.ybar(), lp.ybar());
        assert!((value - expect).abs() <= 1e-12 * (1.0 + expect.abs()));
        for (a, (y, di)) in alpha.iter().zip(lp.ybar().iter().zip(&d)) {
            assert_eq!(*a, y - di);
        }
    }

    /// Direct closed form for the fixed-support cost: the full-space system
    /// with Gram `I/gamma + xbar_s^T xbar_s`. Independent of the
    /// low-dimensional route used by `c_value`.
    fn closed_form_c(lp: &LocalProblem, d: &[f64], s: &SupportVector) -> f64 {
        let p = lp.p();
        let xtx = lp.xbar().transpose().matmul(lp.xbar()).unwrap();
        let mut a = Matrix::zeros(p, p);
        for i in 0..p {
            for j in 0..p {
                let mask = f64::from(u8::from(s.get(i))) * f64::from(u8::from(s.get(j)));
                a.set(i, j, mask * xtx.get(i, j));
            }
            a.set(i, i, a.get(i, i) + 1.0 / lp.gamma());
        }
        let resid: Vec<f64> = lp.ybar().iter().zip(d).map(|(y, di)| y - di).collect();
        let mut b = lp.xbar().matvec_t(&resid).unwrap();
        for (i, bi) in b.iter_mut().enumerate() {
            *bi *= f64::from(u8::from(s.get(i)));
        }
        let sol = cholesky(&a).unwrap().solve(&b).unwrap();
        0.5 * (-dot(&b, &sol) + dot(lp.ybar(), lp.ybar()))
    }

    fn random_support(p: usize, k: usize, rng: &mut ChaCha12Rng) -> SupportVector {
        let take = rng.random_range(0..=k);
        let idx: Vec<usize> = rand::seq::index::sample(rng, p, take).into_vec();
        SupportVector::from_indices(p, &idx).unwrap()
    }

    #[test]
    fn c_value_matches_direct_closed_form() {
        let mut rng = ChaCha12Rng::seed_from_u64(17);
        for _ in 0..30 {
            let (lp, d, _, _) = random_instance(8, 20, 1.0, 1.0, &mut rng);
            let s = random_support(8, 8, &mut rng);
            let (value, _) = lp.c_value(&d, &s.to_relaxed()).unwrap();
            let direct = closed_form_c(&lp, &d, &s);
            assert!(
                (value - direct).abs() <= 1e-9 * (1.0 + direct.abs()),
                "{value} vs {direct} at s={s}"
            );
        }
    }

    #[test]
    fn c_value_is_minimum_over_supported_regressors() {
        let mut rng = ChaCha12Rng::seed_from_u64(19);
        for _ in 0..20 {
            let (lp, d, _, _) = random_instance(6, 14, 2.0, 1.0, &mut rng);
            let s = random_support(6, 6, &mut rng);
            let (value, _) = lp.c_value(&d, &s.to_relaxed()).unwrap();
            let w = lp.solve_support(&d, &s).unwrap();
            let at_min = lp.objective(&d, &w).unwrap() - lp.const_term();
            assert!(
                (value - at_min).abs() <= 1e-9 * (1.0 + at_min.abs()),
                "{value} vs {at_min}"
            );
        }
    }

    #[test]
    fn gradient_is_nonpositive_and_vanishes_at_zero_residual() {
        let mut rng = ChaCha12Rng::seed_from_u64(23);
        let (lp, d, _, _) = random_instance(5, 10, 1.0, 1.0, &mut rng);
        let g = lp.c_gradient(&d, &[0.5; 5]).unwrap();
        assert!(g.iter().all(|v| *v <= 0.0));

        // With d == ybar the residual is zero, so the gradient vanishes.
        let d_eq: Vec<f64> = lp.ybar().to_vec();
        let g0 = lp.c_gradient(&d_eq, &[0.3; 5]).unwrap();
        assert!(g0.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn gradient_matches_central_finite_differences() {
        let mut rng = ChaCha12Rng::seed_from_u64(29);
        let (lp, d, _, _) = random_instance(6, 14, 1.5, 1.0, &mut rng);
        let s = vec![0.5; 6];
        let g = lp.c_gradient(&d, &s).unwrap();
        let h = 1e-5;
        let mut fd = vec![0.0; 6];
        for i in 0..6 {
            let mut sp = s.clone();
            let mut sm = s.clone();
            sp[i] += h;
            sm[i] -= h;
            let (vp, _) = lp.c_value(&d, &sp).unwrap();
            let (vm, _) = lp.c_value(&d, &sm).unwrap();
            fd[i] = (vp - vm) / (2.0 * h);
        }
        let diff = g.iter().zip(&fd).map(|(a, b)| (a - b).abs()).fold(0.0f64, f64::max);
        let scale = fd.iter().map(|v| v.abs()).fold(0.0f64, f64::max);
        assert!(diff <= 1e-4 * (1.0 + scale), "diff={diff:.3e}");
    }

    #[test]
    fn solve_support_empty_is_zero() {
        let mut rng = ChaCha12Rng::seed_from_u64(31);
        let (lp, d, _, _) = random_instance(4, 8, 1.0, 1.0, &mut rng);
        let w = lp.solve_support(&d, &SupportVector::zeros(4)).unwrap();
        assert_eq!(w, vec![0.0; 4]);
    }

    #[test]
    fn solve_support_dense_satisfies_normal_equations() {
        let mut rng = ChaCha12Rng::seed_from_u64(37);
        let (lp, d, data, d_dual) = random_instance(5, 12, 1.3, 1.0, &mut rng);
        let w = lp.solve_support(&d, &SupportVector::ones(5)).unwrap();
        // Raw-space stationarity: (X^T X + 2I/gamma) w = X^T Y - D.
        let mut lhs = data.x().gram().matvec(&w).unwrap();
        for (li, wi) in lhs.iter_mut().zip(&w) {
            *li += 2.0 / lp.gamma() * wi;
        }
        let xty = data.x().matvec_t(data.y()).unwrap();
        let resid = lhs
            .iter()
            .zip(xty.iter().zip(&d_dual))
            .map(|(l, (x, dd))| (l - (x - dd)).abs())
            .fold(0.0f64, f64::max);
        assert!(resid <= 1e-8, "residual {resid:.3e}");
    }

    #[test]
    fn solve_support_scalar_case() {
        // X = (1,1)^T, Y = (1,1)^T, ridge weight 2: the objective
        // 0.5*sum (y - x w)^2 + w^2/2 has the minimizer 2/3.
        let data = Dataset::new(
            Matrix::from_rows(&[vec![1.0], vec![1.0]]).unwrap(),
            vec![1.0, 1.0],
        )
        .unwrap();
        let (lp, d) = transform(&data, 2.0, &[0.0]).unwrap();
        let w = lp.solve_support(&d, &SupportVector::ones(1)).unwrap();
        assert!((w[0] - 2.0 / 3.0).abs() < 1e-12, "w = {}", w[0]);
        // Stationarity of the raw objective at the returned point.
        let grad = -(1.0 - w[0]) * 2.0 + 2.0 / lp.gamma() * w[0];
        assert!(grad.abs() <= 1e-12);
    }

    #[test]
    fn solve_support_is_zero_off_support() {
        let mut rng = ChaCha12Rng::seed_from_u64(41);
        let (lp, d, _, _) = random_instance(7, 16, 1.0, 1.0, &mut rng);
        let s = SupportVector::from_indices(7, &[1, 4, 6]).unwrap();
        let w = lp.solve_support(&d, &s).unwrap();
        for i in [0, 2, 3, 5] {
            assert_eq!(w[i], 0.0);
        }
        // Stationarity restricted to the support (transformed coordinates):
        // (xbar^T xbar + I/gamma) w - xbar^T (ybar - d), rows on the support.
        let xw = lp.xbar().matvec(&w).unwrap();
        let resid: Vec<f64> = lp.ybar().iter().zip(&d).map(|(y, di)| y - di).collect();
        let diff: Vec<f64> = xw.iter().zip(&resid).map(|(a, r)| a - r).collect();
        let mut grad = lp.xbar().matvec_t(&diff).unwrap();
        for (gi, wi) in grad.iter_mut().zip(&w) {
            *gi += wi / lp.gamma();
        }
        for i in s.indices() {
            assert!(grad[i].abs() <= 1e-8, "grad[{i}] = {:.3e}", grad[i]);
        }
    }

    #[test]
    fn warm_start_examples() {
        let mut rng = ChaCha12Rng::seed_from_u64(43);
        let (lp, d, _, _) = random_instance(4, 9, 1.0, 1.0, &mut rng);
        assert_eq!(lp.warm_start(&d, 4).unwrap(), SupportVector::ones(4));

        // Magnitude ranking on a constructed dense solution: identity design
        // pieces give a diagonal system, so the dense solution is
        // proportional to the targets.
        let x = Matrix::identity(3);
        let data = Dataset::new(x, vec![3.0, -5.0, 0.1]).unwrap();
        let (lp, d) = transform(&data, 1.0, &[0.0, 0.0, 0.0]).unwrap();
        assert_eq!(
            lp.warm_start(&d, 1).unwrap(),
            SupportVector::from_indices(3, &[1]).unwrap()
        );

        // Exact tie: equal observations on identical coordinates.
        let x = Matrix::identity(2);
        let data = Dataset::new(x, vec![2.0, 2.0]).unwrap();
        let (lp, d) = transform(&data, 1.0, &[0.0, 0.0]).unwrap();
        assert_eq!(
            lp.warm_start(&d, 1).unwrap(),
            SupportVector::from_indices(2, &[0]).unwrap()
        );
    }

    #[test]
    fn outer_approx_full_support_terminates_fast() {
        let mut rng = ChaCha12Rng::seed_from_u64(47);
        let (lp, d, _, _) = random_instance(5, 12, 1.0, 1.0, &mut rng);
        let warm = lp.warm_start(&d, 5).unwrap();
        let sol = outer_approx(&lp, &d, 5, &warm, DEFAULT_MAX_CUTS).unwrap();
        assert_eq!(sol.s, SupportVector::ones(5));
        assert!(sol.cuts_used <= 2, "cuts_used = {}", sol.cuts_used);
        let dense = lp.solve_support(&d, &SupportVector::ones(5)).unwrap();
        assert_eq!(sol.w, dense);
    }

    #[test]
    fn outer_approx_is_warm_start_invariant() {
        let mut rng = ChaCha12Rng::seed_from_u64(53);
        for _ in 0..10 {
            let (lp, d, _, _) = random_instance(7, 15, 1.0, 1.0, &mut rng);
            let k = 3;
            let w1 = lp.warm_start(&d, k).unwrap();
            let sol1 = outer_approx(&lp, &d, k, &w1, DEFAULT_MAX_CUTS).unwrap();
            let alt = random_support_exact(7, k, &mut rng);
            let sol2 = outer_approx(&lp, &d, k, &alt, DEFAULT_MAX_CUTS).unwrap();
            let sol3 = outer_approx(&lp, &d, k, &SupportVector::zeros(7), DEFAULT_MAX_CUTS).unwrap();
            assert!((sol1.objective - sol2.objective).abs() <= 1e-9 * (1.0 + sol1.objective.abs()));
            assert!((sol1.objective - sol3.objective).abs() <= 1e-9 * (1.0 + sol1.objective.abs()));
        }
    }

    fn random_support_exact(p: usize, k: usize, rng: &mut ChaCha12Rng) -> SupportVector {
        let idx: Vec<usize> = rand::seq::index::sample(rng, p, k).into_vec();
        SupportVector::from_indices(p, &idx).unwrap()
    }

    #[test]
    fn outer_approx_bounds_are_monotone() {
        let mut rng = ChaCha12Rng::seed_from_u64(59);
        for _ in 0..10 {
            let (lp, d, _, _) = random_instance(8, 18, 10.0, 1.0, &mut rng);
            let warm = lp.warm_start(&d, 3).unwrap();
            let (sol, trace) = outer_approx_traced(&lp, &d, 3, &warm, DEFAULT_MAX_CUTS).unwrap();
            for pair in trace.lower_bounds.windows(2) {
                assert!(pair[1] >= pair[0], "lower bound decreased");
            }
            for pair in trace.upper_bounds.windows(2) {
                assert!(pair[1] <= pair[0], "upper bound increased");
            }
            let best = trace.upper_bounds.last().unwrap();
            let eta = trace.lower_bounds.last().unwrap();
            assert!(best - eta <= GAP_TOL * (1.0 + best.abs()));
            assert!(*eta <= best + GAP_TOL * (1.0 + best.abs()));
            assert!(sol.cuts_used <= DEFAULT_MAX_CUTS);
        }
    }

    #[test]
    fn support_monotonicity_of_c() {
        let mut rng = ChaCha12Rng::seed_from_u64(61);
        let (lp, d, _, _) = random_instance(6, 13, 1.0, 1.0, &mut rng);
        for _ in 0..20 {
            let small = random_support(6, 4, &mut rng);
            let mut big = small.clone();
            for i in 0..6 {
                if rng.random::<f64>() < 0.4 {
                    big.set(i, true);
                }
            }
            let (c_small, _) = lp.c_value(&d, &small.to_relaxed()).unwrap();
            let (c_big, _) = lp.c_value(&d, &big.to_relaxed()).unwrap();
            assert!(c_big <= c_small + 1e-10 * (1.0 + c_small.abs()));
        }
    }
}
