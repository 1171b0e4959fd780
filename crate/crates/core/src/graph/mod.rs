//! Conflict graphs and the structural queries run on them.
//!
//! Graphs are simple and undirected with at most 128 vertices, stored as one
//! adjacency bitmask per vertex.

mod cliques;
mod holes;
mod iso;
pub mod named;

pub use cliques::{maximal_cliques, maximal_stable_sets, DEFAULT_ENUMERATION_LIMIT};
pub use holes::{find_odd_antihole, find_odd_hole, is_perfect, DEFAULT_PERFECTION_LIMIT};
pub use iso::{contains_induced, find_induced, is_isomorphic, MAX_PATTERN_VERTICES};

use std::fmt;

use crate::traffic::{SubflowId, TrafficPattern};

pub type VertexSet = u128;

pub const MAX_VERTICES: usize = 128;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("graph has {n} vertices; at most {limit} supported here")]
    TooLarge { n: usize, limit: usize },
    #[error("pattern has {n} vertices; at most {limit} supported")]
    PatternTooLarge { n: usize, limit: usize },
    #[error("malformed edge list: {0}")]
    Malformed(String),
    #[error("io error: {0}")]
    Io(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VertexLabel {
    Subflow(SubflowId),
    Flow { flow: usize, input: usize, fanout: Vec<usize> },
    Plain(usize),
}

impl fmt::Display for VertexLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VertexLabel::Subflow(s) => write!(f, "{s}"),
            VertexLabel::Flow { input, fanout, .. } => {
                let o: Vec<String> = fanout.iter().map(|x| x.to_string()).collect();
                write!(f, "({}, {{{}}})", input, o.join(","))
            }
            VertexLabel::Plain(i) => write!(f, "{i}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConflictGraph {
    adj: Vec<VertexSet>,
    labels: Vec<VertexLabel>,
}

pub fn bit(v: usize) -> VertexSet {
    1u128 << v
}

/// Iterates the members of a vertex set in increasing order.
pub fn members(mut s: VertexSet) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if s == 0 {
            None
        } else {
            let v = s.trailing_zeros() as usize;
            s &= s - 1;
            Some(v)
        }
    })
}

/// Vertices `0..=v`.
pub fn upto(v: usize) -> VertexSet {
    if v >= 127 {
        u128::MAX
    } else {
        bit(v + 1) - 1
    }
}

pub fn set_of(vs: &[usize]) -> VertexSet {
    vs.iter().fold(0, |acc, &v| acc | bit(v))
}

impl ConflictGraph {
    pub fn empty(n: usize) -> Result<Self, GraphError> {
        if n > MAX_VERTICES {
            return Err(GraphError::TooLarge { n, limit: MAX_VERTICES });
        }
        Ok(ConflictGraph { adj: vec![0; n], labels: (0..n).map(VertexLabel::Plain).collect() })
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut g = Self::empty(n)?;
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(GraphError::Malformed(format!("edge ({u},{v}) out of range for {n} vertices")));
            }
            if u == v {
                return Err(GraphError::Malformed(format!("self-loop at {u}")));
            }
            g.add_edge(u, v);
        }
        Ok(g)
    }

    pub fn add_edge(&mut self, u: usize, v: usize) {
        debug_assert!(u != v);
        self.adj[u] |= bit(v);
        self.adj[v] |= bit(u);
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn all(&self) -> VertexSet {
        if self.n() == 128 {
            u128::MAX
        } else {
            bit(self.n()) - 1
        }
    }

    pub fn neighbors(&self, v: usize) -> VertexSet {
        self.adj[v]
    }

    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        self.adj[u] & bit(v) != 0
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].count_ones() as usize
    }

    pub fn labels(&self) -> &[VertexLabel] {
        &self.labels
    }

    pub fn label(&self, v: usize) -> &VertexLabel {
        &self.labels[v]
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.n()).flat_map(|u| members(self.adj[u]).filter(move |&v| v > u).map(move |v| (u, v))).collect()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|a| a.count_ones() as usize).sum::<usize>() / 2
    }

    pub fn complement(&self) -> ConflictGraph {
        let all = self.all();
        ConflictGraph {
            adj: self.adj.iter().enumerate().map(|(v, &a)| !a & all & !bit(v)).collect(),
            labels: self.labels.clone(),
        }
    }

    /// Subgraph induced by `vs`, relabelled `0..vs.len()` in the given order.
    pub fn induced(&self, vs: &[usize]) -> ConflictGraph {
        let mut adj = vec![0; vs.len()];
        for (a, &u) in vs.iter().enumerate() {
            for (b, &v) in vs.iter().enumerate() {
                if a != b && self.adjacent(u, v) {
                    adj[a] |= bit(b);
                }
            }
        }
        ConflictGraph { adj, labels: vs.iter().map(|&v| self.labels[v].clone()).collect() }
    }

    pub fn is_stable(&self, s: VertexSet) -> bool {
        members(s).all(|v| self.adj[v] & s == 0)
    }

    pub fn is_clique(&self, s: VertexSet) -> bool {
        members(s).all(|v| (self.adj[v] | bit(v)) & s == s)
    }

    /// Extends a stable set greedily in vertex order until maximal.
    pub fn maximalize(&self, s: VertexSet) -> VertexSet {
        let mut s = s;
        for v in 0..self.n() {
            if s & bit(v) == 0 && self.adj[v] & s == 0 {
                s |= bit(v);
            }
        }
        s
    }

    pub fn is_bipartite(&self) -> bool {
        let n = self.n();
        let mut color = vec![u8::MAX; n];
        for s in 0..n {
            if color[s] != u8::MAX {
                continue;
            }
            color[s] = 0;
            let mut stack = vec![s];
            while let Some(u) = stack.pop() {
                for v in members(self.adj[u]) {
                    if color[v] == u8::MAX {
                        color[v] = 1 - color[u];
                        stack.push(v);
                    } else if color[v] == color[u] {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Parses the edge-list format: a header `n m`, then `m` lines `u v`
    /// (0-indexed). Blank lines and lines starting with `#` are skipped.
    pub fn parse_edge_list(text: &str) -> Result<Self, GraphError> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines.next().ok_or_else(|| GraphError::Malformed("missing header".into()))?;
        let nums = parse_pair(header)?;
        let (n, m) = (nums.0, nums.1);
        let mut edges = Vec::with_capacity(m);
        for line in lines {
            edges.push(parse_pair(line)?);
        }
        if edges.len() != m {
            return Err(GraphError::Malformed(format!("header announces {m} edges, found {}", edges.len())));
        }
        Self::from_edges(n, &edges)
    }

    pub fn to_edge_list(&self) -> String {
        let edges = self.edges();
        let mut s = format!("{} {}\n", self.n(), edges.len());
        for (u, v) in edges {
            s.push_str(&format!("{u} {v}\n"));
        }
        s
    }

    pub fn load(path: &std::path::Path) -> Result<Self, GraphError> {
        let text = std::fs::read_to_string(path).map_err(|e| GraphError::Io(e.to_string()))?;
        Self::parse_edge_list(&text)
    }
}

fn parse_pair(line: &str) -> Result<(usize, usize), GraphError> {
    let mut it = line.split_whitespace().map(|t| t.parse::<usize>());
    match (it.next(), it.next(), it.next()) {
        (Some(Ok(a)), Some(Ok(b)), None) => Ok((a, b)),
        _ => Err(GraphError::Malformed(format!("expected two integers, got {line:?}"))),
    }
}

/// One vertex per subflow; two subflows conflict when they share an output,
/// or share an input but belong to different flows.
pub fn build_enhanced_conflict_graph(tp: &TrafficPattern) -> Result<ConflictGraph, GraphError> {
    let subs = tp.subflows();
    let mut g = ConflictGraph::empty(subs.len())?;
    for a in 0..subs.len() {
        for b in a + 1..subs.len() {
            let (x, y) = (&subs[a], &subs[b]);
            if x.output == y.output || (x.input == y.input && x.flow != y.flow) {
                g.add_edge(a, b);
            }
        }
    }
    g.labels = subs.into_iter().map(VertexLabel::Subflow).collect();
    Ok(g)
}

/// One vertex per flow; two flows conflict when they share an input or any
/// output.
pub fn build_flow_conflict_graph(tp: &TrafficPattern) -> Result<ConflictGraph, GraphError> {
    let flows = tp.flows();
    let mut g = ConflictGraph::empty(flows.len())?;
    for a in 0..flows.len() {
        for b in a + 1..flows.len() {
            let (x, y) = (&flows[a], &flows[b]);
            if x.input == y.input || x.fanout.iter().any(|o| y.fanout.contains(o)) {
                g.add_edge(a, b);
            }
        }
    }
    g.labels = flows
        .iter()
        .enumerate()
        .map(|(i, f)| VertexLabel::Flow { flow: i, input: f.input, fanout: f.fanout.clone() })
        .collect();
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::Rational;
    use crate::traffic::{benefit_pattern, speedup_pattern_2x3};

    #[test]
    fn fig3_shape_is_a_path() {
        let h = Rational::new(1, 2);
        let tp = benefit_pattern(2, h, &[h, h]).unwrap();
        let g = build_enhanced_conflict_graph(&tp).unwrap();
        assert_eq!(g.n(), 4);
        // b1 - u1 - u2 - b2
        assert_eq!(g.edges(), vec![(0, 2), (1, 3), (2, 3)]);
        assert!(!g.adjacent(0, 1));
    }

    #[test]
    fn speedup_graph_counts() {
        let g = build_enhanced_conflict_graph(&speedup_pattern_2x3()).unwrap();
        assert_eq!(g.n(), 6);
        assert_eq!(g.edge_count(), 6);
    }

    #[test]
    fn flow_graph_of_special_point_is_complete() {
        let tp = crate::traffic::special_rate_point(3).unwrap();
        let g = build_flow_conflict_graph(&tp).unwrap();
        assert_eq!(g.edge_count(), 6);
    }

    #[test]
    fn edge_list_round_trip() {
        let g = ConflictGraph::from_edges(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let text = g.to_edge_list();
        assert_eq!(text, "4 3\n0 1\n1 2\n2 3\n");
        assert_eq!(ConflictGraph::parse_edge_list(&text).unwrap(), g);
    }

    #[test]
    fn edge_list_errors() {
        assert!(ConflictGraph::parse_edge_list("").is_err());
        assert!(ConflictGraph::parse_edge_list("3 2\n0 1\n").is_err());
        assert!(ConflictGraph::parse_edge_list("3 1\n0 3\n").is_err());
        assert!(ConflictGraph::parse_edge_list("3 1\n1 1\n").is_err());
        assert!(ConflictGraph::parse_edge_list("3 1\n0 x\n").is_err());
    }

    #[test]
    fn complement_and_induced() {
        let g = ConflictGraph::from_edges(3, &[(0, 1)]).unwrap();
        let c = g.complement();
        assert_eq!(c.edges(), vec![(0, 2), (1, 2)]);
        let h = c.induced(&[2, 0]);
        assert!(h.adjacent(0, 1));
    }

    #[test]
    fn maximalize_extends_in_order() {
        let g = ConflictGraph::from_edges(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        assert_eq!(g.maximalize(bit(1)), bit(1) | bit(3));
        assert_eq!(g.maximalize(0), bit(0) | bit(2));
    }
}
