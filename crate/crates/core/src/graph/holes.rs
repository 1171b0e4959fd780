use super::{bit, members, upto, ConflictGraph, GraphError, VertexSet};

pub const DEFAULT_PERFECTION_LIMIT: usize = 24;

/// Shortest induced odd cycle of length at least 5 and at most `max_len`.
///
/// Lengths are tried in increasing order. The returned cycle starts at its
/// smallest vertex and lists vertices in cycle order.
pub fn find_odd_hole(g: &ConflictGraph, max_len: usize) -> Option<Vec<usize>> {
    let mut len = 5;
    while len <= max_len.min(g.n()) {
        if let Some(c) = hole_of_length(g, len) {
            return Some(c);
        }
        len += 2;
    }
    None
}

/// An odd hole of the complement, i.e. an odd antihole of `g`.
pub fn find_odd_antihole(g: &ConflictGraph, max_len: usize) -> Option<Vec<usize>> {
    find_odd_hole(&g.complement(), max_len)
}

/// Perfection by the strong perfect graph theorem: no odd hole and no odd
/// antihole.
pub fn is_perfect(g: &ConflictGraph, limit: usize) -> Result<bool, GraphError> {
    if g.n() > limit {
        return Err(GraphError::TooLarge { n: g.n(), limit });
    }
    let n = g.n();
    Ok(find_odd_hole(g, n).is_none() && find_odd_antihole(g, n).is_none())
}

fn hole_of_length(g: &ConflictGraph, len: usize) -> Option<Vec<usize>> {
    let n = g.n();
    let mut path = Vec::with_capacity(len);
    for s in 0..n {
        // only vertices above s may appear, so each hole is found from its minimum
        let allowed = g.all() & !upto(s);
        path.clear();
        path.push(s);
        if extend(g, len, allowed, 0, &mut path) {
            return Some(path.clone());
        }
    }
    None
}

/// `inner` is the union of neighbourhoods of path[1..len-1], i.e. every
/// vertex on the path except the start and the current end.
fn extend(g: &ConflictGraph, len: usize, allowed: VertexSet, inner: VertexSet, path: &mut Vec<usize>) -> bool {
    let k = path.len();
    let s = path[0];
    let last = path[k - 1];
    let on_path: VertexSet = path.iter().fold(0, |a, &v| a | bit(v));
    let mut cand = g.neighbors(last) & allowed & !on_path & !inner;
    if k == len - 1 {
        // closing vertex must touch the start and come after path[1]
        cand &= g.neighbors(s) & !upto(path[1]);
        if let Some(v) = members(cand).next() {
            path.push(v);
            return true;
        }
        return false;
    }
    if k >= 2 {
        cand &= !g.neighbors(s);
    }
    let next_inner = if k >= 2 { inner | g.neighbors(last) } else { inner };
    for v in members(cand) {
        path.push(v);
        if extend(g, len, allowed, next_inner, path) {
            return true;
        }
        path.pop();
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::named::{complete, cycle, grotzsch, path_graph};

    fn is_induced_cycle(g: &ConflictGraph, c: &[usize]) -> bool {
        let k = c.len();
        (0..k).all(|a| {
            (0..k).all(|b| {
                if a == b {
                    return true;
                }
                let d = (a + k - b) % k;
                g.adjacent(c[a], c[b]) == (d == 1 || d == k - 1)
            })
        })
    }

    #[test]
    fn c5_and_c7_holes() {
        assert_eq!(find_odd_hole(&cycle(5), 9), Some(vec![0, 1, 2, 3, 4]));
        let h = find_odd_hole(&cycle(7), 9).unwrap();
        assert_eq!(h.len(), 7);
        assert!(find_odd_hole(&cycle(7), 5).is_none());
        assert!(find_odd_hole(&cycle(6), 9).is_none());
    }

    #[test]
    fn perfect_and_imperfect() {
        assert!(!is_perfect(&cycle(5), 24).unwrap());
        assert!(!is_perfect(&cycle(7).complement(), 24).unwrap());
        assert!(is_perfect(&cycle(6), 24).unwrap());
        assert!(is_perfect(&complete(5), 24).unwrap());
        assert!(is_perfect(&path_graph(8), 24).unwrap());
        assert!(!is_perfect(&grotzsch(), 24).unwrap());
    }

    #[test]
    fn antihole_of_c7_complement() {
        let g = cycle(7).complement();
        // no C5 inside the complement of C7, but C7 itself is the antihole
        let hole = find_odd_antihole(&g, 7).unwrap();
        assert_eq!(hole.len(), 7);
    }

    #[test]
    fn holes_found_are_induced() {
        let g = grotzsch();
        let h = find_odd_hole(&g, 11).unwrap();
        assert_eq!(h.len(), 5);
        assert!(is_induced_cycle(&g, &h));
    }

    #[test]
    fn limit_errors() {
        let g = ConflictGraph::empty(25).unwrap();
        assert!(is_perfect(&g, 24).is_err());
    }
}
