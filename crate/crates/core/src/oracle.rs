//! Brute-force reference solvers.
//!
//! These exist to certify the fast paths and deliberately avoid them: the
//! local oracle touches only [`LocalProblem::solve_support`] plus direct
//! objective evaluation, and the centralized oracle works on raw data
//! without the coordinate transform at all. Both enumerate supports of size
//! exactly `k`, which is sufficient because enlarging a support never
//! increases the optimal cost.

use crate::datagen::Dataset;
use crate::error::{Error, Result};
use crate::linalg::{cholesky, dot, Matrix};
use crate::local_qip::{LocalProblem, LocalSolution};
use crate::support::SupportVector;

/// Enumeration budget: refuse instances with more than this many supports.
pub const ENUMERATION_LIMIT: u64 = 1_000_000;

fn binomial(p: usize, k: usize) -> u64 {
    let k = k.min(p - k.min(p));
    let mut acc = 1u128;
    for i in 0..k {
        acc = acc.saturating_mul((p - i) as u128) / (i as u128 + 1);
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

/// Calls `visit` with every size-`k` index combination of `0..p`, in
/// lexicographic index order.
fn for_each_combination<F: FnMut(&[usize])>(p: usize, k: usize, mut visit: F) {
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        visit(&idx);
        // Advance to the next combination.
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] != i + p - k {
                break;
            }
            if i == 0 {
                return;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Exact local solve by support enumeration.
///
/// Evaluates the restricted ridge solution of every size-`k` support with
/// the direct objective and returns the best, ties to the lexicographically
/// smallest support.
pub fn enumerate_local(lp: &LocalProblem, d: &[f64], k: usize) -> Result<LocalSolution> {
    let p = lp.p();
    if k == 0 || k > p {
        return Err(Error::InvalidParams(format!(
            "cardinality bound must satisfy 1 <= k <= p, got k={k}, p={p}"
        )));
    }
    if binomial(p, k) > ENUMERATION_LIMIT {
        return Err(Error::TooLarge { p, k, limit: ENUMERATION_LIMIT });
    }

    let mut best: Option<(f64, SupportVector, Vec<f64>)> = None;
    let mut failure: Option<Error> = None;
    for_each_combination(p, k, |idx| {
        if failure.is_some() {
            return;
        }
        let s = SupportVector::from_indices(p, idx).expect("indices in range");
        let result = lp
            .solve_support(d, &s)
            .and_then(|w| lp.objective(d, &w).map(|obj| (w, obj)));
        match result {
            Ok((w, obj)) => {
                let better = match &best {
                    None => true,
                    Some((bv, bs, _)) => obj < *bv || (obj == *bv && s < *bs),
                };
                if better {
                    best = Some((obj, s, w));
                }
            }
            Err(e) => failure = Some(e),
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }
    let (objective, s, w) = best.expect("at least one support");
    Ok(LocalSolution { s, w, objective, cuts_used: 0, master_nodes: 0 })
}

/// Exact minimizer of the pooled problem
/// `0.5*||Y - X w||^2 + ||w||^2/gamma` subject to at most `k` nonzeros,
/// by enumeration over supports with restricted ridge solves.
///
/// The returned value includes every term of the objective, so it is
/// directly comparable to a sum of per-agent objectives.
pub fn solve_centralized(
    data: &Dataset,
    gamma: f64,
    k: usize,
) -> Result<(Vec<f64>, f64, SupportVector)> {
    let p = data.p();
    if k == 0 || k > p {
        return Err(Error::InvalidParams(format!(
            "cardinality bound must satisfy 1 <= k <= p, got k={k}, p={p}"
        )));
    }
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(Error::InvalidParams(format!(
            "ridge weight must be positive, got {gamma}"
        )));
    }
    if binomial(p, k) > ENUMERATION_LIMIT {
        return Err(Error::TooLarge { p, k, limit: ENUMERATION_LIMIT });
    }

    let gram = data.x().gram();
    let xty = data.x().matvec_t(data.y())?;

    let objective = |w: &[f64]| -> Result<f64> {
        let fit = data.x().matvec(w)?;
        let mut sq = 0.0;
        for (yi, fi) in data.y().iter().zip(&fit) {
            sq += (yi - fi) * (yi - fi);
        }
        Ok(0.5 * sq + dot(w, w) / gamma)
    };

    let mut best: Option<(f64, SupportVector, Vec<f64>)> = None;
    let mut failure: Option<Error> = None;
    for_each_combination(p, k, |idx| {
        if failure.is_some() {
            return;
        }
        let m = idx.len();
        let mut sub = Matrix::zeros(m, m);
        let mut rhs = vec![0.0; m];
        for (a, &ja) in idx.iter().enumerate() {
            for (b, &jb) in idx.iter().enumerate() {
                let mut v = gram.get(ja, jb);
                if a == b {
                    v += 2.0 / gamma;
                }
                sub.set(a, b, v);
            }
            rhs[a] = xty[ja];
        }
        let solved = cholesky(&sub).and_then(|f| f.solve(&rhs)).and_then(|sol| {
            let mut w = vec![0.0; p];
            for (a, &ja) in idx.iter().enumerate() {
                w[ja] = sol[a];
            }
            objective(&w).map(|z| (w, z))
        });
        match solved {
            Ok((w, z)) => {
                let s = SupportVector::from_indices(p, idx).expect("indices in range");
                let better = match &best {
                    None => true,
                    Some((bz, bs, _)) => z < *bz || (z == *bz && s < *bs),
                };
                if better {
                    best = Some((z, s, w));
                }
            }
            Err(e) => failure = Some(e),
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }
    let (z, s, w) = best.expect("at least one support");
    Ok((w, z, s))
}
