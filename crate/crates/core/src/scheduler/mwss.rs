//! Maximum-weight stable sets: exact branch and bound and the randomized
//! candidate-sampling variant used per slot.

use rand::seq::SliceRandom;
use rand::Rng;

use super::SchedulerError;
use crate::graph::{bit, members, ConflictGraph, VertexSet};

pub const MAX_EXACT_MWSS_VERTICES: usize = 24;

pub fn set_weight(set: VertexSet, weights: &[u64]) -> u64 {
    members(set).map(|v| weights[v]).sum()
}

fn positive(weights: &[u64]) -> VertexSet {
    weights.iter().enumerate().filter(|(_, &w)| w > 0).fold(0, |acc, (v, _)| acc | bit(v))
}

/// A maximum-weight stable set restricted to positive-weight vertices.
/// Among sets of equal weight the one with more vertices wins.
///
/// The size limit applies to the number of positive-weight vertices, since
/// zero-weight ones never enter the answer.
pub fn mwss_exact(g: &ConflictGraph, weights: &[u64]) -> Result<VertexSet, SchedulerError> {
    if weights.len() != g.n() {
        return Err(SchedulerError::InvalidParameter(format!("{} weights for {} vertices", weights.len(), g.n())));
    }
    let mut order: Vec<usize> = members(positive(weights)).collect();
    if order.len() > MAX_EXACT_MWSS_VERTICES {
        return Err(SchedulerError::TooLarge {
            what: "positive-weight vertex set",
            n: order.len(),
            limit: MAX_EXACT_MWSS_VERTICES,
        });
    }
    // ties go to the set serving more subflows: scale weights past any
    // possible cardinality and add one per vertex
    let scale = order.len() as u64 + 1;
    let keyed: Vec<u64> = weights
        .iter()
        .map(|&w| if w > 0 { w.checked_mul(scale).and_then(|x| x.checked_add(1)).expect("weight overflow") } else { 0 })
        .collect();
    order.sort_by_key(|&v| std::cmp::Reverse(keyed[v]));
    let mut best = (0u64, 0 as VertexSet);
    branch(g, &keyed, &order, 0, 0, 0, &mut best);
    Ok(best.1)
}

fn branch(
    g: &ConflictGraph,
    w: &[u64],
    order: &[usize],
    at: usize,
    cur: VertexSet,
    cur_w: u64,
    best: &mut (u64, VertexSet),
) {
    if cur_w > best.0 {
        *best = (cur_w, cur);
    }
    let open: Vec<usize> = order[at..].iter().copied().filter(|&v| g.neighbors(v) & cur == 0).collect();
    let bound: u64 = open.iter().map(|&v| w[v]).sum();
    if cur_w + bound <= best.0 {
        return;
    }
    for (k, &v) in open.iter().enumerate() {
        let pos = at + order[at..].iter().position(|&x| x == v).expect("v comes from order");
        // include v; vertices before it in `open` are excluded on this branch
        let rest: u64 = open[k..].iter().map(|&u| w[u]).sum();
        if cur_w + rest <= best.0 {
            return;
        }
        branch(g, w, order, pos + 1, cur | bit(v), cur_w + w[v], best);
    }
}

/// Greedy closure of `order`: each vertex joins if it has no neighbour
/// already chosen.
pub fn greedy_maximal(g: &ConflictGraph, order: &[usize], start: VertexSet) -> VertexSet {
    let mut s = start;
    for &v in order {
        if s & bit(v) == 0 && g.neighbors(v) & s == 0 {
            s |= bit(v);
        }
    }
    s
}

/// Best of the re-maximalized `previous` set and `candidates` random
/// maximal stable sets.
///
/// Candidates are ranked by weight, then by positive-weight members.
/// `previous` loses its zero-weight members and is closed greedily. A random
/// set is the greedy closure of a shuffled vertex order with positive-weight
/// vertices first, so it is still maximal in `g`. Zero-weight members stay
/// in the result; callers drop them before serving.
pub fn mwss_randomized<R: Rng + ?Sized>(
    g: &ConflictGraph,
    weights: &[u64],
    previous: VertexSet,
    candidates: usize,
    rng: &mut R,
) -> Result<VertexSet, SchedulerError> {
    if candidates == 0 {
        return Err(SchedulerError::InvalidParameter("candidates must be at least 1".into()));
    }
    if weights.len() != g.n() {
        return Err(SchedulerError::InvalidParameter(format!("{} weights for {} vertices", weights.len(), g.n())));
    }
    let pos = positive(weights);
    let prev = previous & pos;
    let prev = if g.is_stable(prev) { prev } else { 0 };
    let mut order: Vec<usize> = (0..g.n()).collect();
    order.sort_by_key(|&v| weights[v] == 0);
    let key = |s: VertexSet| (set_weight(s, weights), (s & pos).count_ones());
    let mut best = greedy_maximal(g, &order, prev);
    let mut best_w = key(best);
    for _ in 0..candidates {
        order.shuffle(rng);
        order.sort_by_key(|&v| weights[v] == 0);
        let s = greedy_maximal(g, &order, 0);
        let w = key(s);
        if w > best_w {
            best = s;
            best_w = w;
        }
    }
    Ok(best)
}
