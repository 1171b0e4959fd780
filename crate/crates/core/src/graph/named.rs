//! Small named graphs used as fixtures and forbidden patterns.

use super::ConflictGraph;

const WEBBED_CLAW: &str = include_str!("../../data/webbed_claw.txt");
const DOUBLE_DIAMOND: &str = include_str!("../../data/connected_double_diamond.txt");

pub fn cycle(n: usize) -> ConflictGraph {
    assert!(n >= 3);
    let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    ConflictGraph::from_edges(n, &edges).expect("cycle is valid")
}

pub fn complete(n: usize) -> ConflictGraph {
    let edges: Vec<_> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    ConflictGraph::from_edges(n, &edges).expect("complete graph is valid")
}

pub fn path_graph(n: usize) -> ConflictGraph {
    let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
    ConflictGraph::from_edges(n, &edges).expect("path is valid")
}

/// Mycielski construction: vertices `0..n` copy `g`, `n..2n` are shadows
/// (shadow of v joins the neighbours of v), `2n` joins every shadow.
pub fn mycielskian(g: &ConflictGraph) -> ConflictGraph {
    let n = g.n();
    let mut h = ConflictGraph::empty(2 * n + 1).expect("mycielskian fits");
    for (u, v) in g.edges() {
        h.add_edge(u, v);
        h.add_edge(n + u, v);
        h.add_edge(u, n + v);
    }
    for u in 0..n {
        h.add_edge(n + u, 2 * n);
    }
    h
}

/// Triangle-free, 4-chromatic, 11 vertices.
pub fn grotzsch() -> ConflictGraph {
    mycielskian(&cycle(5))
}

/// Vertices A..F = 0..5. E (4) is adjacent to everything; A-B and C-D are the
/// only other edges. The pairs are fixed by the forbidden-subgraph argument
/// for enhanced conflict graphs; this graph is figure-dependent.
pub fn webbed_claw() -> ConflictGraph {
    ConflictGraph::parse_edge_list(WEBBED_CLAW).expect("bundled graph parses")
}

/// Vertices A..G = 0..6. Two 4-cycles C-D-E-F and C-B-A-G sharing C, joined
/// by the edge A-E. Also figure-dependent.
pub fn connected_double_diamond() -> ConflictGraph {
    ConflictGraph::parse_edge_list(DOUBLE_DIAMOND).expect("bundled graph parses")
}
