mod common;

use ncswitch::graph::named::{
    complete, connected_double_diamond, cycle, grotzsch, mycielskian, path_graph, webbed_claw,
};
use ncswitch::graph::{
    build_enhanced_conflict_graph, build_flow_conflict_graph, contains_induced, find_odd_hole, is_isomorphic,
    is_perfect, maximal_cliques, maximal_stable_sets, members, ConflictGraph, VertexSet,
};
use ncswitch::rational::Rational;
use ncswitch::traffic::{benefit_pattern, speedup_pattern_2x3, Flow, TrafficPattern};
use proptest::prelude::*;

fn co_p3() -> ConflictGraph {
    ConflictGraph::from_edges(3, &[(0, 1)]).unwrap()
}

fn random_graph(n: usize, bits: u64) -> ConflictGraph {
    let mut g = ConflictGraph::empty(n).unwrap();
    let mut k = 0;
    for u in 0..n {
        for v in u + 1..n {
            if bits >> (k % 64) & 1 == 1 {
                g.add_edge(u, v);
            }
            k += 1;
        }
    }
    g
}

fn clique_number(g: &ConflictGraph) -> usize {
    (0u128..1 << g.n()).filter(|&s| g.is_clique(s)).map(|s| s.count_ones() as usize).max().unwrap_or(0)
}

fn colorable(g: &ConflictGraph, k: usize, v: usize, colors: &mut Vec<usize>) -> bool {
    if v == g.n() {
        return true;
    }
    for c in 0..k {
        if (0..v).all(|u| !g.adjacent(u, v) || colors[u] != c) {
            colors[v] = c;
            if colorable(g, k, v + 1, colors) {
                return true;
            }
        }
    }
    false
}

fn chromatic_number(g: &ConflictGraph) -> usize {
    (0..=g.n()).find(|&k| colorable(g, k, 0, &mut vec![0; g.n()])).unwrap()
}

/// Perfection from the definition: chi = omega on every induced subgraph.
fn perfect_by_definition(g: &ConflictGraph) -> bool {
    (1u128..1 << g.n()).all(|s: VertexSet| {
        let h = g.induced(&members(s).collect::<Vec<_>>());
        chromatic_number(&h) == clique_number(&h)
    })
}

#[test]
fn benefit_graph_shape() {
    let h = Rational::new(1, 3);
    let g = build_enhanced_conflict_graph(&benefit_pattern(3, Rational::new(2, 3), &[h, h, h]).unwrap()).unwrap();
    assert_eq!((g.n(), g.edge_count()), (6, 6));
    let mut cl: Vec<Vec<usize>> = maximal_cliques(&g, 40).unwrap().into_iter().map(|c| members(c).collect()).collect();
    cl.sort();
    // broadcast subflows 0..3, unicasts 3..6
    assert_eq!(cl, vec![vec![0, 3], vec![1, 4], vec![2, 5], vec![3, 4, 5]]);
}

#[test]
fn single_multicast_has_no_edges() {
    let tp = TrafficPattern::new(1, 3, vec![Flow::new(1, vec![1, 2, 3], Rational::ONE)]).unwrap();
    let g = build_enhanced_conflict_graph(&tp).unwrap();
    assert_eq!((g.n(), g.edge_count()), (3, 0));
}

#[test]
fn flow_graph_examples() {
    let r = Rational::new(1, 3);
    let tri = TrafficPattern::new(
        2,
        2,
        vec![Flow::new(1, vec![1, 2], r), Flow::new(1, vec![1], r), Flow::new(2, vec![1, 2], r)],
    )
    .unwrap();
    let g = build_flow_conflict_graph(&tri).unwrap();
    assert!(is_isomorphic(&g, &complete(3)).unwrap());
    let apart = TrafficPattern::new(2, 2, vec![Flow::new(1, vec![1], r), Flow::new(2, vec![2], r)]).unwrap();
    assert_eq!(build_flow_conflict_graph(&apart).unwrap().edge_count(), 0);
}

#[test]
fn hole_and_named_graph_examples() {
    let g = build_enhanced_conflict_graph(&speedup_pattern_2x3()).unwrap();
    assert_eq!(find_odd_hole(&g, 5).map(|h| h.len()), Some(5));
    assert_eq!(find_odd_hole(&grotzsch(), 11).map(|h| h.len()), Some(5));
    assert!(find_odd_hole(&cycle(8), 7).is_none());
    assert!(is_isomorphic(&mycielskian(&complete(2)), &cycle(5)).unwrap());
    let gz = mycielskian(&cycle(5));
    assert_eq!((gz.n(), gz.edge_count(), clique_number(&gz)), (11, 20, 2));
    assert!(contains_induced(&path_graph(4), &path_graph(3)).unwrap());
    assert_eq!(maximal_cliques(&cycle(5), 40).unwrap().len(), 5);
    assert_eq!(maximal_stable_sets(&complete(4), 40).unwrap().len(), 4);
}

/// Every output relabeling and input swap of the hole pattern gives an
/// isomorphic enhanced graph.
#[test]
fn hole_pattern_labelings_are_isomorphic() {
    let base = speedup_pattern_2x3();
    let g0 = build_enhanced_conflict_graph(&base).unwrap();
    let perms = [[1, 2, 3], [1, 3, 2], [2, 1, 3], [2, 3, 1], [3, 1, 2], [3, 2, 1]];
    for p in perms {
        for swap in [false, true] {
            let flows = base
                .flows()
                .iter()
                .map(|f| {
                    let input = if swap { 3 - f.input } else { f.input };
                    Flow::new(input, f.fanout.iter().map(|&o| p[o - 1]).collect(), f.rate)
                })
                .collect();
            let g = build_enhanced_conflict_graph(&TrafficPattern::new(2, 3, flows).unwrap()).unwrap();
            assert!(is_isomorphic(&g0, &g).unwrap(), "{p:?} swap={swap}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn enhanced_graph_structure(tp in common::pattern(3, 4, 6)) {
        let g = build_enhanced_conflict_graph(&tp).unwrap();
        let subs = tp.subflows();
        for u in 0..g.n() {
            prop_assert!(!g.adjacent(u, u));
            for v in 0..g.n() {
                prop_assert_eq!(g.adjacent(u, v), g.adjacent(v, u));
                if u == v {
                    continue;
                }
                let (a, b) = (&subs[u], &subs[v]);
                if a.flow == b.flow {
                    prop_assert!(!g.adjacent(u, v));
                } else if a.input == b.input {
                    prop_assert!(g.adjacent(u, v));
                }
            }
        }
        for q in maximal_cliques(&g, 40).unwrap() {
            let m: Vec<usize> = members(q).collect();
            let same_input = m.iter().all(|&v| subs[v].input == subs[m[0]].input);
            let same_output = m.iter().all(|&v| subs[v].output == subs[m[0]].output);
            prop_assert!(same_input || same_output, "clique {:?}", m);
        }
    }

    #[test]
    fn forbidden_subgraphs_never_appear(tp in common::pattern(3, 4, 5)) {
        let g = build_enhanced_conflict_graph(&tp).unwrap();
        let subs = tp.subflows();
        for i in 1..=tp.num_inputs() {
            let own: Vec<usize> = (0..g.n()).filter(|&v| subs[v].input == i).collect();
            prop_assert!(!contains_induced(&g.induced(&own), &co_p3()).unwrap());
        }
        prop_assert!(!contains_induced(&g, &grotzsch()).unwrap());
        prop_assert!(!contains_induced(&g, &webbed_claw()).unwrap());
        prop_assert!(!contains_induced(&g, &connected_double_diamond()).unwrap());
    }

    #[test]
    fn complement_and_stable_sets(n in 1usize..=9, bits in any::<u64>()) {
        let g = random_graph(n, bits);
        prop_assert_eq!(&g.complement().complement(), &g);
        let mut stable = maximal_stable_sets(&g, 40).unwrap();
        let mut cl = maximal_cliques(&g.complement(), 40).unwrap();
        stable.sort_unstable();
        cl.sort_unstable();
        prop_assert_eq!(stable, cl);
    }

    #[test]
    fn perfection_matches_definition(n in 1usize..=9, bits in any::<u64>()) {
        let g = random_graph(n, bits);
        prop_assert_eq!(is_perfect(&g, 24).unwrap(), perfect_by_definition(&g));
    }
}
