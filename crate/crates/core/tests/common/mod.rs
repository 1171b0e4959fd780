#![allow(dead_code)]

use ncswitch::rational::Rational;
use ncswitch::traffic::{Flow, TrafficPattern};
use proptest::prelude::*;

/// Random admissible pattern: up to `max_flows` distinct flows on a
/// `K x N` switch, each at rate `1 / #flows` so no port is overloaded.
pub fn pattern(max_k: usize, max_n: usize, max_flows: usize) -> impl Strategy<Value = TrafficPattern> {
    (1..=max_k, 2..=max_n)
        .prop_flat_map(move |(k, n)| {
            let flow = (1..=k, 1u32..(1u32 << n));
            (Just(k), Just(n), prop::collection::vec(flow, 1..=max_flows))
        })
        .prop_map(|(k, n, raw)| {
            let mut seen = std::collections::BTreeSet::new();
            let picked: Vec<(usize, Vec<usize>)> = raw
                .into_iter()
                .map(|(i, mask)| (i, (1..=n).filter(|j| mask & (1 << (j - 1)) != 0).collect::<Vec<_>>()))
                .filter(|f| seen.insert(f.clone()))
                .collect();
            let rate = Rational::new(1, picked.len() as i128);
            TrafficPattern::new(k, n, picked.into_iter().map(|(i, fo)| Flow::new(i, fo, rate)).collect())
                .expect("generated pattern is valid")
        })
}

/// Random rational weights with small denominators.
pub fn weights(n: usize) -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::vec((0i128..=6, 1i128..=6), n)
        .prop_map(|v| v.into_iter().map(|(p, q)| Rational::new(p, q)).collect())
}
