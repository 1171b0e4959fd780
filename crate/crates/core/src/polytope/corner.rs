//! Fractional corner points of QSTAB for the 2 x N unicast/broadcast shape
//! and their explicit stable-set decompositions.
//!
//! Coordinates: `u1[j]` (input-1 unicast to j), `b1[j]` (input-1 broadcast
//! copy at j), `u2[j]` (input-2 unicast to j). Outputs are 1-based in the
//! public API and 0-based in the index vectors.

use super::vertices::integer_rank;
use super::{PolytopeError, StableSetDecomposition};
use crate::graph::{bit, build_enhanced_conflict_graph, ConflictGraph, VertexSet};
use crate::rational::Rational;
use crate::traffic::{Flow, TrafficPattern};

#[derive(Debug, Clone)]
pub struct CornerShape {
    pub n: usize,
    pub pattern: TrafficPattern,
    pub graph: ConflictGraph,
    pub u1: Vec<usize>,
    pub b1: Vec<usize>,
    pub u2: Vec<usize>,
}

/// Input 1 carries N unicasts and a broadcast; input 2 carries N unicasts.
pub fn corner_shape_2xn(n: usize) -> Result<CornerShape, PolytopeError> {
    if n < 2 {
        return Err(PolytopeError::InvalidParameter(format!("N must be at least 2, got {n}")));
    }
    let mut flows: Vec<Flow> = (1..=n).map(|j| Flow::new(1, vec![j], Rational::ZERO)).collect();
    flows.push(Flow::new(1, (1..=n).collect(), Rational::ZERO));
    flows.extend((1..=n).map(|j| Flow::new(2, vec![j], Rational::ZERO)));
    let pattern = TrafficPattern::new(2, n, flows)?;
    let graph = build_enhanced_conflict_graph(&pattern)?;
    let (mut u1, mut b1, mut u2) = (vec![0; n], vec![0; n], vec![0; n]);
    for (idx, s) in pattern.subflows().iter().enumerate() {
        let j = s.output - 1;
        match (s.input, s.fanout.len()) {
            (1, 1) => u1[j] = idx,
            (1, _) => b1[j] = idx,
            _ => u2[j] = idx,
        }
    }
    Ok(CornerShape { n, pattern, graph, u1, b1, u2 })
}

/// One inequality `row . x <= rhs`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Inequality {
    pub name: String,
    pub row: Vec<i128>,
    pub rhs: i128,
}

/// The explicit QSTAB system: nonnegativity, the N input-1 cliques, the
/// input-2 clique and the N output cliques.
pub fn qstab_system_2xn(shape: &CornerShape) -> Vec<Inequality> {
    let n = shape.n;
    let dim = 3 * n;
    let unit = |idx: &[usize], coef: i128| {
        let mut row = vec![0i128; dim];
        for &i in idx {
            row[i] = coef;
        }
        row
    };
    let mut out = Vec::new();
    for j in 0..n {
        out.push(Inequality { name: format!("u1_{} >= 0", j + 1), row: unit(&[shape.u1[j]], -1), rhs: 0 });
        out.push(Inequality { name: format!("b1_{} >= 0", j + 1), row: unit(&[shape.b1[j]], -1), rhs: 0 });
        out.push(Inequality { name: format!("u2_{} >= 0", j + 1), row: unit(&[shape.u2[j]], -1), rhs: 0 });
    }
    for j in 0..n {
        let mut idx = shape.u1.clone();
        idx.push(shape.b1[j]);
        out.push(Inequality { name: format!("input1 at {}", j + 1), row: unit(&idx, 1), rhs: 1 });
    }
    out.push(Inequality { name: "input2".into(), row: unit(&shape.u2, 1), rhs: 1 });
    for j in 0..n {
        out.push(Inequality {
            name: format!("output {}", j + 1),
            row: unit(&[shape.u1[j], shape.u2[j], shape.b1[j]], 1),
            rhs: 1,
        });
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CornerPoint {
    /// 1-based output carrying the input-1 unicast.
    pub m: usize,
    pub u: Vec<usize>,
    pub v: Vec<usize>,
    pub point: Vec<Rational>,
    /// Names of the 3N constraints held tight.
    pub tight: Vec<String>,
    /// Rank of the tight rows; a corner point needs 3N.
    pub rank: usize,
    pub feasible: bool,
    pub all_tight: bool,
}

fn subsets(items: &[usize]) -> Vec<Vec<usize>> {
    (0u32..1 << items.len())
        .map(|mask| items.iter().enumerate().filter(|(k, _)| mask & (1 << k) != 0).map(|(_, &x)| x).collect())
        .collect()
}

/// All points `v(m, U, V)` with `2 <= |U| <= N-1`, `m` outside `U` and
/// `V` a superset of `U`, each with its tight set and rank certificate.
pub fn qstab_corner_points_2xn(n: usize) -> Result<Vec<CornerPoint>, PolytopeError> {
    if !(3..=8).contains(&n) {
        return Err(PolytopeError::InvalidParameter(format!("N must be in 3..=8, got {n}")));
    }
    let shape = corner_shape_2xn(n)?;
    let system = qstab_system_2xn(&shape);
    let by_name = |name: &str| system.iter().find(|q| q.name == name).expect("named constraint exists");
    let outputs: Vec<usize> = (1..=n).collect();
    let mut out = Vec::new();
    for m in 1..=n {
        let others: Vec<usize> = outputs.iter().copied().filter(|&j| j != m).collect();
        for u in subsets(&others).into_iter().filter(|u| u.len() >= 2 && u.len() < n) {
            let rest: Vec<usize> = outputs.iter().copied().filter(|j| !u.contains(j)).collect();
            for extra in subsets(&rest) {
                let mut v = u.clone();
                v.extend(extra);
                v.sort_unstable();
                let s = Rational::from(u.len());
                let inv = s.recip();
                let mut point = vec![Rational::ZERO; 3 * n];
                point[shape.u1[m - 1]] = inv;
                for &j in &v {
                    point[shape.b1[j - 1]] = Rational::ONE - inv;
                }
                for &j in &u {
                    point[shape.u2[j - 1]] = inv;
                }
                let mut tight = Vec::with_capacity(3 * n);
                for j in outputs.iter().filter(|&&j| j != m) {
                    tight.push(format!("u1_{j} >= 0"));
                }
                for j in outputs.iter().filter(|j| !v.contains(j)) {
                    tight.push(format!("b1_{j} >= 0"));
                }
                for j in outputs.iter().filter(|j| !u.contains(j)) {
                    tight.push(format!("u2_{j} >= 0"));
                }
                for j in &v {
                    tight.push(format!("input1 at {j}"));
                }
                for j in &u {
                    tight.push(format!("output {j}"));
                }
                tight.push("input2".into());
                let rows: Vec<Vec<i128>> = tight.iter().map(|t| by_name(t).row.clone()).collect();
                let rank = integer_rank(&rows);
                let value = |q: &Inequality| -> Rational {
                    q.row.iter().zip(&point).map(|(&a, &x)| Rational::from_int(a) * x).sum()
                };
                let feasible = system.iter().all(|q| value(q) <= q.rhs);
                let all_tight = tight.iter().all(|t| {
                    let q = by_name(t);
                    value(q) == q.rhs
                });
                out.push(CornerPoint { m, u: u.clone(), v, point, tight, rank, feasible, all_tight });
            }
        }
    }
    Ok(out)
}

/// Explicit decomposition of a corner point: `|U|` pair sets at `1/|U|^2`,
/// `|U|` mixed sets and one broadcast set at `1/|U| - 1/|U|^2`. Outputs in
/// `V \ U` are left out of the broadcast set so the sum equals the point.
pub fn cornerpoint_decomposition(shape: &CornerShape, cp: &CornerPoint) -> StableSetDecomposition {
    let s = Rational::from(cp.u.len());
    let small = (s * s).recip();
    let big = s.recip() - small;
    let u1m = bit(shape.u1[cp.m - 1]);
    let mut terms: Vec<(Rational, VertexSet)> = Vec::new();
    for &j in &cp.u {
        terms.push((small, u1m | bit(shape.u2[j - 1])));
    }
    for &j in &cp.u {
        let bs = cp.v.iter().filter(|&&k| k != j).fold(0, |acc, &k| acc | bit(shape.b1[k - 1]));
        terms.push((big, bit(shape.u2[j - 1]) | bs));
    }
    let b_u = cp.u.iter().fold(0, |acc, &k| acc | bit(shape.b1[k - 1]));
    terms.push((big, b_u));
    let mut d = StableSetDecomposition { terms };
    d.normalize();
    d
}
