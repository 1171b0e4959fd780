//! Stable set polytopes, fractional chromatic numbers and the speedup and
//! region computations built on them. Everything here is exact.

mod corner;
pub mod lp;
mod region;
pub mod vertices;

pub use corner::{
    corner_shape_2xn, cornerpoint_decomposition, qstab_corner_points_2xn, qstab_system_2xn, CornerPoint, CornerShape,
};
pub use region::{fs_min_scaling, fs_region_check, FsRegionCheck};

use serde::Serialize;

use crate::graph::{
    self, build_enhanced_conflict_graph, build_flow_conflict_graph, is_perfect, maximal_cliques, maximal_stable_sets,
    members, ConflictGraph, GraphError, VertexSet, DEFAULT_ENUMERATION_LIMIT, DEFAULT_PERFECTION_LIMIT,
};
use crate::par::{self, Exec};
use crate::rational::Rational;
use crate::traffic::{enhanced_rate_vector, unicast_broadcast_pattern, TrafficError, TrafficPattern};

pub const MAX_EXACT_REGION_FLOWS: usize = 10;
pub const MAX_IMPERFECTION_VERTICES: usize = 14;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PolytopeError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Traffic(#[from] TrafficError),
    #[error(transparent)]
    Lp(#[from] lp::LpError),
    #[error(transparent)]
    Vertex(#[from] vertices::VertexError),
    #[error("weight vector has length {got}, graph has {expected} vertices")]
    Dimension { expected: usize, got: usize },
    #[error("weight of vertex {0} is negative")]
    NegativeWeight(usize),
    #[error("{what} has size {n}; at most {limit} supported")]
    TooLarge { what: &'static str, n: usize, limit: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("cover family is not uniform: vertex {vertex} covered {got} times, expected {expected}")]
    NonUniformCover { vertex: usize, got: usize, expected: usize },
    #[error("cover family member {0} does not induce a perfect graph")]
    ImperfectMember(usize),
}

/// A weighted sum of stable sets, `sum lambda_S * chi^S`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct StableSetDecomposition {
    pub terms: Vec<(Rational, VertexSet)>,
}

impl StableSetDecomposition {
    pub fn total(&self) -> Rational {
        self.terms.iter().map(|(l, _)| *l).sum()
    }

    pub fn coverage(&self, n: usize) -> Vec<Rational> {
        let mut c = vec![Rational::ZERO; n];
        for (l, s) in &self.terms {
            for v in members(*s) {
                c[v] += *l;
            }
        }
        c
    }

    pub fn dominates(&self, w: &[Rational]) -> bool {
        self.coverage(w.len()).iter().zip(w).all(|(c, x)| c >= x)
    }

    pub fn equals(&self, w: &[Rational]) -> bool {
        self.coverage(w.len()) == w
    }

    pub fn all_stable(&self, g: &ConflictGraph) -> bool {
        self.terms.iter().all(|(l, s)| !l.is_negative() && g.is_stable(*s))
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.terms
                .iter()
                .map(|(l, s)| {
                    serde_json::json!({
                        "lambda": l.to_string(),
                        "set": members(*s).collect::<Vec<_>>(),
                    })
                })
                .collect(),
        )
    }

    /// Lowers coverage to exactly `w` by removing vertices from sets (splitting
    /// a term where only part of it is surplus). The total is unchanged.
    pub fn trim_to(&mut self, w: &[Rational]) {
        let cov = self.coverage(w.len());
        for (v, (&c, &target)) in cov.iter().zip(w).enumerate() {
            let mut surplus = c - target;
            let mut k = 0;
            while surplus.is_positive() && k < self.terms.len() {
                let (l, s) = self.terms[k];
                if s & graph::bit(v) != 0 {
                    if l <= surplus {
                        self.terms[k].1 = s & !graph::bit(v);
                        surplus -= l;
                    } else {
                        self.terms[k].0 = l - surplus;
                        self.terms.push((surplus, s & !graph::bit(v)));
                        surplus = Rational::ZERO;
                    }
                }
                k += 1;
            }
        }
        self.normalize();
    }

    /// Merges repeated sets, drops zero and empty terms, sorts by set.
    pub fn normalize(&mut self) {
        let mut merged: std::collections::BTreeMap<Vec<usize>, (Rational, VertexSet)> = Default::default();
        for &(l, s) in &self.terms {
            if l.is_zero() || s == 0 {
                continue;
            }
            let e = merged.entry(members(s).collect()).or_insert((Rational::ZERO, s));
            e.0 += l;
        }
        self.terms = merged.into_values().collect();
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChiSolution {
    pub value: Rational,
    /// Covers the weights exactly; total equals `value`.
    pub decomposition: StableSetDecomposition,
    /// Optimal fractional clique: `w . y = value` and every stable set has
    /// `y`-weight at most 1.
    pub dual: Vec<Rational>,
}

fn check_weights(g: &ConflictGraph, w: &[Rational]) -> Result<(), PolytopeError> {
    if w.len() != g.n() {
        return Err(PolytopeError::Dimension { expected: g.n(), got: w.len() });
    }
    if let Some(v) = w.iter().position(|x| x.is_negative()) {
        return Err(PolytopeError::NegativeWeight(v));
    }
    Ok(())
}

/// Weighted fractional chromatic number, solved exactly as the dual of the
/// covering LP over maximal stable sets of the weight support.
pub fn fractional_chromatic(g: &ConflictGraph, w: &[Rational]) -> Result<ChiSolution, PolytopeError> {
    check_weights(g, w)?;
    let support: Vec<usize> = (0..g.n()).filter(|&v| w[v].is_positive()).collect();
    if support.is_empty() {
        return Ok(ChiSolution {
            value: Rational::ZERO,
            decomposition: StableSetDecomposition::default(),
            dual: vec![Rational::ZERO; g.n()],
        });
    }
    let sub = g.induced(&support);
    let stables = maximal_stable_sets(&sub, DEFAULT_ENUMERATION_LIMIT)?;
    let c: Vec<Rational> = support.iter().map(|&v| w[v]).collect();
    let a: Vec<Vec<Rational>> = stables
        .iter()
        .map(|&s| {
            (0..support.len()).map(|k| if s & graph::bit(k) != 0 { Rational::ONE } else { Rational::ZERO }).collect()
        })
        .collect();
    let b = vec![Rational::ONE; stables.len()];
    let sol = lp::maximize(&c, &a, &b)?;

    let lift = |s: VertexSet| members(s).fold(0, |acc, k| acc | graph::bit(support[k]));
    let mut decomposition = StableSetDecomposition {
        terms: stables.iter().zip(&sol.y).filter(|(_, l)| l.is_positive()).map(|(&s, &l)| (l, lift(s))).collect(),
    };
    decomposition.trim_to(w);
    let mut dual = vec![Rational::ZERO; g.n()];
    for (k, &v) in support.iter().enumerate() {
        dual[v] = sol.x[k];
    }
    debug_assert_eq!(decomposition.total(), sol.value);
    Ok(ChiSolution { value: sol.value, decomposition, dual })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum QstabViolation {
    Negative { vertex: usize },
    Clique { clique: Vec<usize>, sum: Rational },
}

/// Membership in QSTAB: nonnegative and at most 1 on every maximal clique.
/// The reported clique is the most violated one (first in lexicographic
/// order on ties).
pub fn qstab_membership(g: &ConflictGraph, x: &[Rational]) -> Result<Option<QstabViolation>, PolytopeError> {
    if x.len() != g.n() {
        return Err(PolytopeError::Dimension { expected: g.n(), got: x.len() });
    }
    if let Some(v) = x.iter().position(|t| t.is_negative()) {
        return Ok(Some(QstabViolation::Negative { vertex: v }));
    }
    let mut worst: Option<(Rational, VertexSet)> = None;
    for q in maximal_cliques(g, DEFAULT_ENUMERATION_LIMIT)? {
        let sum: Rational = members(q).map(|v| x[v]).sum();
        if sum > 1 && worst.is_none_or(|(s, _)| sum > s) {
            worst = Some((sum, q));
        }
    }
    Ok(worst.map(|(sum, q)| QstabViolation::Clique { clique: members(q).collect(), sum }))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StabCheck {
    pub member: bool,
    pub chi: ChiSolution,
}

/// `x` is in STAB iff its fractional chromatic number is at most 1. When it
/// is not, `chi.dual` certifies it: a weighting with every stable set at
/// most 1 but `x . y > 1`.
pub fn stab_membership(g: &ConflictGraph, x: &[Rational]) -> Result<StabCheck, PolytopeError> {
    let chi = fractional_chromatic(g, x)?;
    Ok(StabCheck { member: chi.value <= 1, chi })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpeedupReport {
    pub value: Rational,
    /// Flow rates at which the value is attained.
    pub rate_point: Vec<Rational>,
    pub decomposition: StableSetDecomposition,
}

/// Speedup needed for the rates of `tp` with fanout splitting and coding.
pub fn speedup_for_rate(tp: &TrafficPattern) -> Result<SpeedupReport, PolytopeError> {
    let g = build_enhanced_conflict_graph(tp)?;
    let e = enhanced_rate_vector(tp);
    let chi = fractional_chromatic(&g, &e.rates)?;
    Ok(SpeedupReport { value: chi.value, rate_point: tp.rates(), decomposition: chi.decomposition })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GraphKind {
    /// Vertices are subflows (coding with fanout splitting).
    Enhanced,
    /// Vertices are flows (no fanout splitting).
    Flow,
}

fn weights_for(kind: GraphKind, tp: &TrafficPattern, rates: &[Rational]) -> Vec<Rational> {
    match kind {
        GraphKind::Flow => rates.to_vec(),
        GraphKind::Enhanced => tp.subflows().iter().map(|s| rates[s.flow]).collect(),
    }
}

/// Inequalities of the admissible region `A` for the flows of `tp`, as
/// integer rows `a . r <= b` (nonnegativity implied).
pub fn admissible_region_rows(tp: &TrafficPattern) -> (Vec<Vec<i128>>, Vec<i128>) {
    let flows = tp.flows();
    let mut a = Vec::new();
    for i in 1..=tp.num_inputs() {
        let row: Vec<i128> = flows.iter().map(|f| i128::from(f.input == i)).collect();
        if row.iter().filter(|&&x| x != 0).count() > 1 {
            a.push(row);
        }
    }
    for j in 1..=tp.num_outputs() {
        let row: Vec<i128> = flows.iter().map(|f| i128::from(f.fanout.contains(&j))).collect();
        if row.iter().any(|&x| x != 0) {
            a.push(row);
        }
    }
    let b = vec![1; a.len()];
    (a, b)
}

/// Maximum of the fractional chromatic number over the vertices of the
/// admissible region for the flow set of `tp` (its rates are ignored).
pub fn min_speedup_exact(tp: &TrafficPattern, kind: GraphKind, exec: Exec) -> Result<SpeedupReport, PolytopeError> {
    let d = tp.flows().len();
    if d > MAX_EXACT_REGION_FLOWS {
        return Err(PolytopeError::TooLarge { what: "flow set", n: d, limit: MAX_EXACT_REGION_FLOWS });
    }
    let g = match kind {
        GraphKind::Enhanced => build_enhanced_conflict_graph(tp)?,
        GraphKind::Flow => build_flow_conflict_graph(tp)?,
    };
    let (a, b) = admissible_region_rows(tp);
    let verts = vertices::vertices_nonneg(&a, &b, exec)?;
    let chis = par::map(exec, &verts, |r| fractional_chromatic(&g, &weights_for(kind, tp, r)));
    let mut best: Option<SpeedupReport> = None;
    for (r, chi) in verts.iter().zip(chis) {
        let chi = chi?;
        if best.as_ref().is_none_or(|b| chi.value > b.value) {
            best = Some(SpeedupReport { value: chi.value, rate_point: r.clone(), decomposition: chi.decomposition });
        }
    }
    Ok(best.unwrap_or(SpeedupReport {
        value: Rational::ZERO,
        rate_point: vec![],
        decomposition: StableSetDecomposition::default(),
    }))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImperfectionReport {
    pub value: Rational,
    pub vertex: Vec<Rational>,
    pub decomposition: StableSetDecomposition,
    pub num_vertices: usize,
}

/// Maximum fractional chromatic number over the vertices of QSTAB(g).
pub fn imperfection_ratio(g: &ConflictGraph, exec: Exec) -> Result<ImperfectionReport, PolytopeError> {
    if g.n() > MAX_IMPERFECTION_VERTICES {
        return Err(PolytopeError::TooLarge { what: "graph", n: g.n(), limit: MAX_IMPERFECTION_VERTICES });
    }
    let cliques = maximal_cliques(g, DEFAULT_ENUMERATION_LIMIT)?;
    let a: Vec<Vec<i128>> =
        cliques.iter().map(|&q| (0..g.n()).map(|v| i128::from(q & graph::bit(v) != 0)).collect()).collect();
    let b = vec![1; a.len()];
    let verts = vertices::vertices_nonneg(&a, &b, exec)?;
    let chis = par::map(exec, &verts, |x| fractional_chromatic(g, x));
    let mut best = ImperfectionReport {
        value: Rational::ZERO,
        vertex: vec![Rational::ZERO; g.n()],
        decomposition: StableSetDecomposition::default(),
        num_vertices: verts.len(),
    };
    for (x, chi) in verts.iter().zip(chis) {
        let chi = chi?;
        if chi.value > best.value {
            best.value = chi.value;
            best.vertex = x.clone();
            best.decomposition = chi.decomposition;
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverBound {
    pub p: usize,
    pub q: usize,
    pub bound: Rational,
}

/// Upper bound `p/q` on the imperfection ratio from a family of `p` vertex
/// subsets, each inducing a perfect graph, covering every vertex exactly `q`
/// times.
pub fn perfect_cover_bound(g: &ConflictGraph, family: &[Vec<usize>]) -> Result<CoverBound, PolytopeError> {
    if family.is_empty() {
        return Err(PolytopeError::InvalidParameter("empty cover family".into()));
    }
    let mut count = vec![0usize; g.n()];
    for (k, member) in family.iter().enumerate() {
        if member.iter().any(|&v| v >= g.n()) {
            return Err(PolytopeError::InvalidParameter(format!("member {k} names a vertex out of range")));
        }
        for &v in member {
            count[v] += 1;
        }
        if !is_perfect(&g.induced(member), DEFAULT_PERFECTION_LIMIT)? {
            return Err(PolytopeError::ImperfectMember(k));
        }
    }
    let q = count.first().copied().unwrap_or(0);
    if let Some(v) = count.iter().position(|&c| c != q) {
        return Err(PolytopeError::NonUniformCover { vertex: v, got: count[v], expected: q });
    }
    if q == 0 {
        return Err(PolytopeError::InvalidParameter("family covers nothing".into()));
    }
    Ok(CoverBound { p: family.len(), q, bound: Rational::new(family.len() as i128, q as i128) })
}

/// Vertex indices of the unicast/broadcast graph G_{K,N}, built from
/// [`unicast_broadcast_pattern`]. `u[i][j]` and `b[i][j]` are 0-based in
/// both input and output.
#[derive(Debug, Clone)]
pub struct UnicastBroadcastGraph {
    pub graph: ConflictGraph,
    pub u: Vec<Vec<usize>>,
    pub b: Vec<Vec<usize>>,
}

pub fn unicast_broadcast_graph(k: usize, n: usize) -> Result<UnicastBroadcastGraph, PolytopeError> {
    let tp = unicast_broadcast_pattern(k, n)?;
    let graph = build_enhanced_conflict_graph(&tp)?;
    let mut u = vec![vec![0; n]; k];
    let mut b = vec![vec![0; n]; k];
    for (idx, s) in tp.subflows().iter().enumerate() {
        if s.fanout.len() == 1 {
            u[s.input - 1][s.output - 1] = idx;
        } else {
            b[s.input - 1][s.output - 1] = idx;
        }
    }
    Ok(UnicastBroadcastGraph { graph, u, b })
}

impl UnicastBroadcastGraph {
    fn all_u(&self) -> Vec<usize> {
        self.u.iter().flatten().copied().collect()
    }
    fn all_b(&self) -> Vec<usize> {
        self.b.iter().flatten().copied().collect()
    }

    /// `K-1` copies of all unicasts, plus, for each input, all broadcast
    /// subflows with that input's unicasts. Covers every vertex K times.
    pub fn input_cover_family(&self) -> Vec<Vec<usize>> {
        let k = self.u.len();
        let mut fam: Vec<Vec<usize>> = (1..k).map(|_| self.all_u()).collect();
        for i in 0..k {
            let mut s = self.all_b();
            s.extend(&self.u[i]);
            s.sort_unstable();
            fam.push(s);
        }
        fam
    }

    /// For each output, its unicasts with all broadcast subflows, and its
    /// broadcast subflows with all unicasts. Covers every vertex N+1 times.
    pub fn output_cover_family(&self) -> Vec<Vec<usize>> {
        let n = self.u[0].len();
        let mut fam = Vec::with_capacity(2 * n);
        for j in 0..n {
            let mut s: Vec<usize> = self.u.iter().map(|row| row[j]).collect();
            s.extend(self.all_b());
            s.sort_unstable();
            fam.push(s);
            let mut s: Vec<usize> = self.b.iter().map(|row| row[j]).collect();
            s.extend(self.all_u());
            s.sort_unstable();
            fam.push(s);
        }
        fam
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::named::{complete, cycle};
    use crate::traffic::{special_rate_point, speedup_pattern_2x3};

    fn r(p: i128, q: i128) -> Rational {
        Rational::new(p, q)
    }

    #[test]
    fn chi_of_c5_uniform() {
        let sol = fractional_chromatic(&cycle(5), &[Rational::ONE; 5]).unwrap();
        assert_eq!(sol.value, r(5, 2));
        assert!(sol.decomposition.equals(&[Rational::ONE; 5]));
        assert!(sol.decomposition.all_stable(&cycle(5)));
    }

    #[test]
    fn chi_of_zero_weights() {
        let sol = fractional_chromatic(&cycle(5), &[Rational::ZERO; 5]).unwrap();
        assert_eq!(sol.value, Rational::ZERO);
        assert!(sol.decomposition.terms.is_empty());
    }

    #[test]
    fn chi_rejects_bad_weights() {
        assert!(matches!(fractional_chromatic(&cycle(5), &[Rational::ONE]), Err(PolytopeError::Dimension { .. })));
        let mut w = vec![Rational::ONE; 5];
        w[2] = r(-1, 2);
        assert_eq!(fractional_chromatic(&cycle(5), &w), Err(PolytopeError::NegativeWeight(2)));
    }

    #[test]
    fn qstab_membership_reports_worst_clique() {
        let g = complete(3);
        assert_eq!(qstab_membership(&g, &[r(1, 3), r(1, 3), r(1, 3)]).unwrap(), None);
        let v = qstab_membership(&g, &[r(1, 2), r(1, 2), r(1, 2)]).unwrap().unwrap();
        assert_eq!(v, QstabViolation::Clique { clique: vec![0, 1, 2], sum: r(3, 2) });
    }

    #[test]
    fn stab_certificate_for_c5_halves() {
        let g = cycle(5);
        let x = vec![r(1, 2); 5];
        assert_eq!(qstab_membership(&g, &x).unwrap(), None);
        let chk = stab_membership(&g, &x).unwrap();
        assert!(!chk.member);
        assert_eq!(chk.chi.value, r(5, 4));
        let dot: Rational = chk.chi.dual.iter().zip(&x).map(|(a, b)| *a * *b).sum();
        assert!(dot > 1);
    }

    #[test]
    fn speedup_of_the_hole_pattern() {
        assert_eq!(speedup_for_rate(&speedup_pattern_2x3()).unwrap().value, r(5, 4));
        assert_eq!(speedup_for_rate(&special_rate_point(4).unwrap()).unwrap().value, Rational::ONE);
    }

    #[test]
    fn imperfection_of_c5() {
        let rep = imperfection_ratio(&cycle(5), Exec::Sequential).unwrap();
        assert_eq!(rep.value, r(5, 4));
        assert_eq!(rep.vertex, vec![r(1, 2); 5]);
    }

    #[test]
    fn perfect_graphs_have_ratio_one() {
        assert_eq!(imperfection_ratio(&cycle(6), Exec::Sequential).unwrap().value, Rational::ONE);
        assert_eq!(imperfection_ratio(&complete(4), Exec::Parallel).unwrap().value, Rational::ONE);
    }

    #[test]
    fn cover_bound_rejects_bad_families() {
        let g = cycle(5);
        assert!(matches!(perfect_cover_bound(&g, &[vec![0, 1, 2, 3, 4]]), Err(PolytopeError::ImperfectMember(0))));
        assert!(matches!(perfect_cover_bound(&g, &[vec![0, 1]]), Err(PolytopeError::NonUniformCover { .. })));
        assert!(perfect_cover_bound(&g, &[]).is_err());
    }

    #[test]
    fn admissible_rows_skip_single_flow_inputs() {
        let (a, _) = admissible_region_rows(&speedup_pattern_2x3());
        // two inputs with two flows each, three outputs
        assert_eq!(a.len(), 5);
    }
}
