//! Exact solver for the cutting-plane master problem.
//!
//! Given accumulated cuts, the master minimizes the piecewise-linear
//! under-estimator `f(s) = max_j [ value_j + grad_j^T (s - anchor_j) ]` over
//! binary supports with at most `k` ones. Gradients of the support cost are
//! never positive, which gives a cheap per-node lower bound: for each cut,
//! complete the fixed coordinates with the most favorable feasible choice of
//! the free ones and take the worst cut. Best-first branch-and-bound with
//! that bound finds the optimal value, and a second lexicographic
//! depth-first pass pins the tie-break rule: among optimal supports, the
//! lexicographically smallest bit tuple is returned.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::support::SupportVector;

/// One affine under-estimator of the support cost.
#[derive(Debug, Clone)]
pub struct Cut {
    /// Cost at the anchor support.
    pub value: f64,
    /// Gradient at the anchor; entries are never positive.
    pub grad: Vec<f64>,
    pub anchor: SupportVector,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MasterResult {
    pub s: SupportVector,
    /// Value of the piecewise-linear model at `s`; tight at the optimum.
    pub eta: f64,
    pub nodes_explored: usize,
}

/// Evaluates one cut at a binary point, summing coordinates left to right.
///
/// Every evaluation in this module goes through this function so that equal
/// supports always produce bit-identical values.
fn cut_eval(cut: &Cut, bits: &[bool]) -> f64 {
    let mut v = cut.value;
    for (i, gi) in cut.grad.iter().enumerate() {
        let si = f64::from(u8::from(bits[i]));
        let ai = f64::from(u8::from(cut.anchor.get(i)));
        v += gi * (si - ai);
    }
    v
}

/// The piecewise-linear model: max over cuts.
fn model_eval(cuts: &[Cut], bits: &[bool]) -> f64 {
    cuts.iter()
        .map(|c| cut_eval(c, bits))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Lower bound for a node in which coordinates with `fixed[i] = true` carry
/// the values in `bits` and at most `budget` of the free coordinates may
/// still be set. For each cut the free coordinates are completed greedily
/// (the `budget` most negative gradient entries), which is that cut's exact
/// minimum over the subtree; the bound is the worst cut.
fn node_bound(cuts: &[Cut], fixed: &[bool], bits: &[bool], budget: usize) -> f64 {
    let p = bits.len();
    let mut completion = bits.to_vec();
    let mut best = f64::NEG_INFINITY;
    let mut free_neg: Vec<(f64, usize)> = Vec::with_capacity(p);
    for cut in cuts {
        free_neg.clear();
        for i in 0..p {
            if !fixed[i] {
                completion[i] = false;
                if cut.grad[i] < 0.0 {
                    free_neg.push((cut.grad[i], i));
                }
            }
        }
        free_neg.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite gradient").then(a.1.cmp(&b.1)));
        for &(_, i) in free_neg.iter().take(budget) {
            completion[i] = true;
        }
        best = best.max(cut_eval(cut, &completion));
    }
    best
}

struct HeapNode {
    bound: f64,
    seq: usize,
    depth: usize,
    used: usize,
    bits: Vec<bool>,
}

impl PartialEq for HeapNode {
    fn eq(&self, other: &Self) -> bool {
        self.bound == other.bound && self.seq == other.seq
    }
}
impl Eq for HeapNode {}
impl PartialOrd for HeapNode {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for HeapNode {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // Max-heap on Reverse(bound), with insertion order as tie-break so
        // pops are fully deterministic.
        self.bound
            .partial_cmp(&other.bound)
            .expect("finite bound")
            .then(self.seq.cmp(&other.seq))
    }
}

/// Exactly minimizes the current cut model over supports with at most `k`
/// ones. Ties are broken to the lexicographically smallest bit tuple.
pub fn solve_master(cuts: &[Cut], p: usize, k: usize) -> Result<MasterResult> {
    if cuts.is_empty() {
        return Err(Error::NoCuts);
    }
    if k > p {
        return Err(Error::InvalidParams(format!("k={k} exceeds p={p}")));
    }
    for cut in cuts {
        if cut.grad.len() != p || cut.anchor.len() != p {
            return Err(Error::DimensionMismatch(format!(
                "cut dimension {} vs problem dimension {p}",
                cut.grad.len()
            )));
        }
        if !cut.value.is_finite() || cut.grad.iter().any(|g| !g.is_finite()) {
            return Err(Error::InvalidParams("non-finite cut".into()));
        }
    }

    let mut nodes = 0usize;

    // Incumbent from cheap candidates: every anchor, plus the greedy
    // minimizer of the newest cut.
    let mut inc = f64::INFINITY;
    let mut inc_bits: Vec<bool> = vec![false; p];
    let consider = |bits: &[bool], inc: &mut f64, inc_bits: &mut Vec<bool>| {
        let v = model_eval(cuts, bits);
        if v < *inc || (v == *inc && bits < inc_bits.as_slice()) {
            *inc = v;
            *inc_bits = bits.to_vec();
        }
    };
    for cut in cuts {
        if cut.anchor.count() <= k {
            consider(cut.anchor.bits(), &mut inc, &mut inc_bits);
        }
    }
    let newest = cuts.last().expect("non-empty");
    let mut greedy: Vec<(f64, usize)> = newest
        .grad
        .iter()
        .enumerate()
        .filter(|(_, g)| **g < 0.0)
        .map(|(i, g)| (*g, i))
        .collect();
    greedy.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite gradient").then(a.1.cmp(&b.1)));
    let mut greedy_bits = vec![false; p];
    for &(_, i) in greedy.iter().take(k) {
        greedy_bits[i] = true;
    }
    consider(&greedy_bits, &mut inc, &mut inc_bits);

    // Branch on coordinates with the largest gradient spread first.
    let mut order: Vec<usize> = (0..p).collect();
    let spread: Vec<f64> = (0..p)
        .map(|i| {
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for cut in cuts {
                let m = cut.grad[i].abs();
                lo = lo.min(m);
                hi = hi.max(m);
            }
            hi - lo
        })
        .collect();
    order.sort_by(|&a, &b| {
        spread[b].partial_cmp(&spread[a]).expect("finite spread").then(a.cmp(&b))
    });

    // Phase 1: best-first search for the optimal model value.
    let mut heap: BinaryHeap<Reverse<HeapNode>> = BinaryHeap::new();
    let mut seq = 0usize;
    let root_fixed = vec![false; p];
    let root_bound = node_bound(cuts, &root_fixed, &vec![false; p], k);
    if root_bound < inc {
        heap.push(Reverse(HeapNode {
            bound: root_bound,
            seq,
            depth: 0,
            used: 0,
            bits: vec![false; p],
        }));
    }
    let mut fixed_buf = vec![false; p];
    while let Some(Reverse(node)) = heap.pop() {
        if node.bound >= inc {
            break; // min-heap: nothing left can improve
        }
        nodes += 1;
        let coord = order[node.depth];
        for choice in [false, true] {
            if choice && node.used == k {
                continue;
            }
            let mut bits = node.bits.clone();
            bits[coord] = choice;
            let used = node.used + usize::from(choice);
            let depth = node.depth + 1;
            if depth == p || used == k {
                // Remaining coordinates are forced to zero: this is a leaf.
                consider(&bits, &mut inc, &mut inc_bits);
                continue;
            }
            fixed_buf.fill(false);
            for &c in &order[..depth] {
                fixed_buf[c] = true;
            }
            let bound = node_bound(cuts, &fixed_buf, &bits, k - used);
            if bound < inc {
                seq += 1;
                heap.push(Reverse(HeapNode { bound, seq, depth, used, bits }));
            }
        }
    }
    let eta = inc;

    // Phase 2: lexicographic depth-first extraction of the smallest support
    // attaining eta. Visits {0,1}^p in lex order, pruning subtrees whose
    // bound exceeds the optimum.
    let mut bits = vec![false; p];
    let mut fixed = vec![false; p];
    let mut found: Option<Vec<bool>> = None;
    lex_dfs(cuts, k, eta, &mut bits, &mut fixed, 0, 0, &mut nodes, &mut found);
    let best_bits = found.unwrap_or(inc_bits);

    Ok(MasterResult {
        eta,
        s: SupportVector::from_bits(best_bits),
        nodes_explored: nodes,
    })
}

#[allow(clippy::too_many_arguments)]
fn lex_dfs(
    cuts: &[Cut],
    k: usize,
    eta: f64,
    bits: &mut Vec<bool>,
    fixed: &mut Vec<bool>,
    i: usize,
    used: usize,
    nodes: &mut usize,
    found: &mut Option<Vec<bool>>,
) {
    if found.is_some() {
        return;
    }
    let p = bits.len();
    if i == p {
        if model_eval(cuts, bits) == eta {
            *found = Some(bits.clone());
        }
        return;
    }
    *nodes += 1;
    for choice in [false, true] {
        if choice && used == k {
            continue;
        }
        bits[i] = choice;
        fixed[i] = true;
        if node_bound(cuts, fixed, bits, k - used - usize::from(choice)) <= eta {
            lex_dfs(cuts, k, eta, bits, fixed, i + 1, used + usize::from(choice), nodes, found);
        }
        bits[i] = false;
        fixed[i] = false;
        if found.is_some() {
            return;
        }
    }
}
