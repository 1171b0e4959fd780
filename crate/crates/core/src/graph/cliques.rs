use super::{bit, members, ConflictGraph, GraphError, VertexSet};

pub const DEFAULT_ENUMERATION_LIMIT: usize = 40;

/// All maximal cliques, each as a bitmask, sorted lexicographically by their
/// member lists. Bron-Kerbosch with Tomita pivoting.
pub fn maximal_cliques(g: &ConflictGraph, limit: usize) -> Result<Vec<VertexSet>, GraphError> {
    if g.n() > limit {
        return Err(GraphError::TooLarge { n: g.n(), limit });
    }
    let mut out = Vec::new();
    if g.n() == 0 {
        return Ok(out);
    }
    expand(g, 0, g.all(), 0, &mut out);
    sort_lex(&mut out);
    Ok(out)
}

/// Maximal stable sets = maximal cliques of the complement.
pub fn maximal_stable_sets(g: &ConflictGraph, limit: usize) -> Result<Vec<VertexSet>, GraphError> {
    maximal_cliques(&g.complement(), limit)
}

fn expand(g: &ConflictGraph, r: VertexSet, p: VertexSet, x: VertexSet, out: &mut Vec<VertexSet>) {
    if p == 0 {
        if x == 0 {
            out.push(r);
        }
        return;
    }
    let pivot = members(p | x).max_by_key(|&u| (g.neighbors(u) & p).count_ones()).expect("p | x nonempty");
    let (mut p, mut x) = (p, x);
    for v in members(p & !g.neighbors(pivot)) {
        let nv = g.neighbors(v);
        expand(g, r | bit(v), p & nv, x & nv, out);
        p &= !bit(v);
        x |= bit(v);
    }
}

pub(crate) fn sort_lex(sets: &mut [VertexSet]) {
    sets.sort_by_cached_key(|&s| members(s).collect::<Vec<_>>());
}
