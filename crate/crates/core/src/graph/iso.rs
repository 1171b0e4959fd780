use super::{bit, members, ConflictGraph, GraphError, VertexSet};

pub const MAX_PATTERN_VERTICES: usize = 12;

/// Whether `pattern` occurs as an induced subgraph of `g`.
pub fn contains_induced(g: &ConflictGraph, pattern: &ConflictGraph) -> Result<bool, GraphError> {
    Ok(find_induced(g, pattern)?.is_some())
}

/// An embedding `pattern vertex -> g vertex` witnessing an induced copy.
pub fn find_induced(g: &ConflictGraph, pattern: &ConflictGraph) -> Result<Option<Vec<usize>>, GraphError> {
    if pattern.n() > MAX_PATTERN_VERTICES {
        return Err(GraphError::PatternTooLarge { n: pattern.n(), limit: MAX_PATTERN_VERTICES });
    }
    if pattern.n() > g.n() {
        return Ok(None);
    }
    let order = search_order(pattern);
    let mut map = vec![usize::MAX; pattern.n()];
    Ok(if embed(g, pattern, &order, 0, 0, &mut map) { Some(map) } else { None })
}

/// Isomorphism test for small graphs (same order, same edge count, mutual
/// induced containment).
pub fn is_isomorphic(a: &ConflictGraph, b: &ConflictGraph) -> Result<bool, GraphError> {
    if a.n() != b.n() || a.edge_count() != b.edge_count() {
        return Ok(false);
    }
    contains_induced(a, b)
}

/// Pattern vertices ordered so each one (after the first of its component)
/// has an already-placed neighbour, which keeps candidate sets small.
fn search_order(p: &ConflictGraph) -> Vec<usize> {
    let mut order = Vec::with_capacity(p.n());
    let mut placed: VertexSet = 0;
    while order.len() < p.n() {
        let frontier = members(p.all() & !placed).filter(|&v| p.neighbors(v) & placed != 0);
        let next = frontier
            .max_by_key(|&v| ((p.neighbors(v) & placed).count_ones(), p.degree(v)))
            .or_else(|| members(p.all() & !placed).max_by_key(|&v| p.degree(v)))
            .expect("unplaced vertex exists");
        placed |= bit(next);
        order.push(next);
    }
    order
}

fn embed(
    g: &ConflictGraph,
    p: &ConflictGraph,
    order: &[usize],
    depth: usize,
    used: VertexSet,
    map: &mut [usize],
) -> bool {
    if depth == order.len() {
        return true;
    }
    let pv = order[depth];
    let mut cand = g.all() & !used;
    for &q in &order[..depth] {
        let gq = map[q];
        if p.adjacent(pv, q) {
            cand &= g.neighbors(gq);
        } else {
            cand &= !g.neighbors(gq);
        }
    }
    for c in members(cand) {
        if g.degree(c) < p.degree(pv) {
            continue;
        }
        map[pv] = c;
        if embed(g, p, order, depth + 1, used | bit(c), map) {
            return true;
        }
    }
    map[pv] = usize::MAX;
    false
}
