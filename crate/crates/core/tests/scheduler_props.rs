mod common;

use ncswitch::graph::{build_enhanced_conflict_graph, members, ConflictGraph};
use ncswitch::polytope::{fractional_chromatic, fs_region_check};
use ncswitch::rational::Rational;
use ncswitch::scheduler::{
    appendix_fs_schedule, fanout_splitting_step, mwss_exact, mwss_randomized, offline_schedule, online_step,
    replay_uncoded, set_weight, verify_frame_service, CodedSwitch, CodingBackend, SchedulerKind, UncodedSwitch,
};
use ncswitch::traffic::{enhanced_rate_vector, special_rate_point, TrafficPattern};
use proptest::prelude::*;
use proptest::strategy::ValueTree;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

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

fn brute_mwss(g: &ConflictGraph, w: &[u64]) -> u64 {
    (0u128..1 << g.n()).filter(|&s| g.is_stable(s)).map(|s| set_weight(s, w)).max().unwrap_or(0)
}

/// Feeds the same Bernoulli arrivals into a coded switch per backend and
/// steps them in lockstep.
fn lockstep(tp: &TrafficPattern, slots: u64, p: f64, seed: u64) {
    let mut arrivals = ChaCha8Rng::seed_from_u64(seed);
    let mut counting = CodedSwitch::new(tp, CodingBackend::Counting, None).unwrap();
    let mut exact = CodedSwitch::new(tp, CodingBackend::Exact, None).unwrap();
    let (mut rc, mut re) = (ChaCha8Rng::seed_from_u64(seed ^ 1), ChaCha8Rng::seed_from_u64(seed ^ 1));
    let kind = SchedulerKind::MwssRandomized { candidates: 4 };
    let (mut dc, mut de) = (Vec::new(), Vec::new());
    for t in 0..slots {
        for f in 0..tp.flows().len() {
            if arrivals.gen_bool(p) {
                counting.arrive(f, t);
                exact.arrive(f, t);
            }
        }
        let before = exact.virtual_queues().sizes;
        let a = online_step(&mut counting, kind, &mut rc).unwrap();
        let b = online_step(&mut exact, kind, &mut re).unwrap();
        assert_eq!(a.configuration, b.configuration, "slot {t}");
        a.configuration.validate(tp).unwrap();
        // each served subflow loses exactly one unit of virtual queue
        let after = exact.virtual_queues().sizes;
        let served = b.configuration.served_subflows(tp);
        for v in 0..before.len() {
            let drop = u64::from(served.contains(&v));
            assert_eq!(after[v] + drop, before[v], "slot {t} subflow {v}");
        }
        assert!(exact.check_virtual_queues());
        assert_eq!(counting.virtual_queues(), exact.virtual_queues());
        counting.end_slot(t, &mut dc);
        exact.end_slot(t, &mut de);
        assert_eq!(dc, de);
    }
}

#[test]
fn backends_agree_on_corpus_patterns() {
    for (name, tp) in ncswitch::verify::corpus().into_iter().take(8) {
        let load = tp.max_load().to_f64();
        lockstep(&tp, 400, (0.8 / load.max(1.0)).min(0.8), name.len() as u64);
    }
}

#[test]
fn offline_schedules_serve_scaled_random_patterns() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let strategy = common::pattern(3, 3, 4);
    let mut runner = proptest::test_runner::TestRunner::deterministic();
    for _ in 0..40 {
        let tp = strategy.new_tree(&mut runner).unwrap().current();
        let g = build_enhanced_conflict_graph(&tp).unwrap();
        let chi = fractional_chromatic(&g, &enhanced_rate_vector(&tp).rates).unwrap().value;
        // shrink into STAB when needed
        let tp = if chi > Rational::ONE { tp.scaled(chi.recip()).unwrap() } else { tp };
        let s = offline_schedule(&tp, Rational::ONE).unwrap();
        let queued: Vec<usize> = s.codes.iter().map(|c| rng.gen_range(0..=c.k)).collect();
        let rep = verify_frame_service(&s, &tp, &queued).unwrap();
        assert!(rep.served && rep.innovation_sets_stable, "{tp:?}");
        for c in s.execution_order() {
            c.validate(&tp).unwrap();
        }
    }
}

#[test]
fn explicit_uncoded_schedule_fits_the_frame() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut checked = 0;
    while checked < 500 {
        let n = rng.gen_range(3..=5);
        let d = 12;
        let r0 = Rational::new(rng.gen_range(0..=d), d);
        let r: Vec<Rational> = (0..n).map(|_| Rational::new(rng.gen_range(0..=d / 2), d)).collect();
        if !fs_region_check(n, r0, &r).unwrap().inside {
            continue;
        }
        let (tp, s) = appendix_fs_schedule(n, r0, &r).unwrap();
        let rep = replay_uncoded(&tp, &s).unwrap();
        assert!(rep.complete, "N={n} r0={r0} r={r:?}: {rep:?}");
        assert!(rep.length as u64 <= s.frame_size);
        checked += 1;
    }
}

/// Every uncoded configuration obeys the switch constraints and names the
/// packet it carries.
#[test]
fn uncoded_switch_serves_valid_configurations() {
    let tp = special_rate_point(4).unwrap();
    let mut sw = UncodedSwitch::new(&tp).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut out = Vec::new();
    for t in 0..2000 {
        for f in 0..tp.flows().len() {
            if rng.gen_bool(tp.flows()[f].rate.to_f64() * 0.6) {
                sw.arrive(f, t);
            }
        }
        let step = fanout_splitting_step(&mut sw, 4, &mut rng).unwrap();
        step.configuration.validate(&tp).unwrap();
        assert!(step.configuration.grants.values().all(|g| g.packet.is_some()));
        sw.take_departures(t, &mut out);
    }
    assert!(out.iter().all(|d| d.departure > d.arrival));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn exact_mwss_is_optimal(n in 1usize..=10, bits in any::<u64>(), w in prop::collection::vec(0u64..20, 10)) {
        let g = random_graph(n, bits);
        let w = &w[..n];
        let s = mwss_exact(&g, w).unwrap();
        prop_assert!(g.is_stable(s));
        prop_assert_eq!(set_weight(s, w), brute_mwss(&g, w));
        prop_assert!(members(s).all(|v| w[v] > 0));
    }

    #[test]
    fn randomized_mwss_is_a_maximal_stable_set(
        n in 1usize..=10,
        bits in any::<u64>(),
        w in prop::collection::vec(0u64..20, 10),
        prev in any::<u16>(),
        seed in any::<u64>(),
    ) {
        let g = random_graph(n, bits);
        let w = &w[..n];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let prev = u128::from(prev) & g.all();
        let s = mwss_randomized(&g, w, prev, 5, &mut rng).unwrap();
        prop_assert!(g.is_stable(s));
        prop_assert_eq!(g.maximalize(s), s);
        prop_assert!(set_weight(s, w) <= set_weight(mwss_exact(&g, w).unwrap(), w));
        // never worse than keeping the positive part of a stable previous set
        if g.is_stable(prev) {
            let kept = members(prev).filter(|&v| w[v] > 0).map(|v| w[v]).sum::<u64>();
            prop_assert!(set_weight(s, w) >= kept);
        }
    }

    #[test]
    fn backends_agree_on_random_patterns(tp in common::pattern(3, 3, 4), seed in any::<u64>()) {
        lockstep(&tp, 120, 0.3, seed);
    }
}
