//! Executable acceptance checks. Each criterion runs against the library's
//! public API and reports a verdict with a short detail string; the CLI
//! prints them as a table and the `acceptance` test target asserts them.

use std::time::{Duration, Instant};

use serde::Serialize;

use crate::coding::{exists_uncovered_vector, Gf, KnowledgeSpace, MdsCode};
use crate::graph::{
    build_enhanced_conflict_graph, build_flow_conflict_graph, find_odd_hole, is_perfect, named::cycle,
    DEFAULT_PERFECTION_LIMIT,
};
use crate::par::{self, Exec};
use crate::polytope::{
    corner_shape_2xn, cornerpoint_decomposition, fractional_chromatic, fs_min_scaling, imperfection_ratio,
    min_speedup_exact, perfect_cover_bound, qstab_corner_points_2xn, speedup_for_rate, stab_membership,
    unicast_broadcast_graph, GraphKind, MAX_EXACT_REGION_FLOWS, MAX_IMPERFECTION_VERTICES,
};
use crate::rational::Rational;
use crate::scheduler::{offline_schedule, verify_frame_service, SchedulerKind};
use crate::sim::{self, SimConfig, SimMetrics};
use crate::traffic::{
    benefit_pattern, composite_pattern, is_admissible, relaxed_speedup_pattern, special_rate_point,
    speedup_pattern_2x3, TrafficPattern,
};

/// Settings of the simulation criterion.
pub const KNEE_DELTA: u64 = 3000;
pub const KNEE_HORIZON: u64 = 300_000;
pub const KNEE_SEED: u64 = 42;
pub const KNEE_CANDIDATES: usize = 10;
pub const LIGHT_LOAD_ALPHA: f64 = 0.1;
pub const LIGHT_LOAD_DELAY: f64 = 1500.0;
pub const LIGHT_LOAD_TOLERANCE: f64 = 150.0;

pub fn knee_epsilon() -> Rational {
    Rational::new(1, 200)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// Deliberately not reproduced.
    Skip,
}

#[derive(Debug, Clone, Serialize)]
pub struct CriterionResult {
    pub id: u8,
    pub name: &'static str,
    pub status: Status,
    pub detail: String,
    pub seconds: f64,
    pub budget_seconds: f64,
}

impl CriterionResult {
    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }

    pub fn within_budget(&self) -> bool {
        self.seconds <= self.budget_seconds
    }

    pub fn line(&self) -> String {
        let tag = match self.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skip => "SKIP",
        };
        format!(
            "[{tag}] AC-{} {} ({:.2}s / {}s): {}",
            self.id, self.name, self.seconds, self.budget_seconds, self.detail
        )
    }
}

pub const CRITERIA: [(u8, &str, u64); 11] = [
    (1, "speedup constant 5/4", 1),
    (2, "fanout-splitting scaling 3/2 - 1/N", 1),
    (3, "no-splitting speedup 5/3", 5),
    (4, "perfection results", 10),
    (5, "perfect-cover bounds", 30),
    (6, "speedup chain on the corpus", 60),
    (7, "2xN corner points", 60),
    (8, "frame schedules decode", 60),
    (9, "coding properties", 30),
    (10, "simulation knees", 300),
    (11, "volume columns", 1),
];

type Verdict = Result<(bool, String), String>;

fn time(id: u8, f: impl FnOnce() -> Verdict) -> CriterionResult {
    let (_, name, budget) = CRITERIA[usize::from(id) - 1];
    let start = Instant::now();
    let (status, detail) = match f() {
        Ok((true, d)) => (Status::Pass, d),
        Ok((false, d)) => (Status::Fail, d),
        Err(e) => (Status::Fail, format!("error: {e}")),
    };
    let seconds = start.elapsed().as_secs_f64();
    CriterionResult { id, name, status, detail, seconds, budget_seconds: Duration::from_secs(budget).as_secs_f64() }
}

fn r(p: i128, q: i128) -> Rational {
    Rational::new(p, q)
}

/// Named patterns every corpus-wide criterion iterates over.
pub fn corpus() -> Vec<(String, TrafficPattern)> {
    let mut out = vec![("speedup-2x3".to_string(), speedup_pattern_2x3())];
    for drop in 1..=3 {
        out.push((format!("relaxed-drop{drop}"), relaxed_speedup_pattern(drop).expect("valid drop")));
    }
    for n in 3..=5 {
        out.push((format!("special-{n}"), special_rate_point(n).expect("N >= 3")));
    }
    out.push((
        "benefit-3-skewed".to_string(),
        benefit_pattern(3, r(1, 2), &[r(1, 2), r(1, 4), r(1, 4)]).expect("valid benefit pattern"),
    ));
    out.push((
        "benefit-4-light".to_string(),
        benefit_pattern(4, r(1, 3), &[r(1, 6), r(1, 3), r(1, 6), r(1, 3)]).expect("valid benefit pattern"),
    ));
    out.push(("speedup-2x3-scaled".to_string(), speedup_pattern_2x3().scaled(r(4, 5)).expect("scaling is valid")));
    for k in 3..=4 {
        out.push((format!("composite-{k}"), composite_pattern(k).expect("K in 3..=4")));
    }
    out
}

pub fn criterion_1() -> CriterionResult {
    time(1, || {
        let v = speedup_for_rate(&speedup_pattern_2x3()).map_err(|e| e.to_string())?.value;
        Ok((v == r(5, 4), format!("speedup_for_rate = {v}")))
    })
}

pub fn criterion_2() -> CriterionResult {
    time(2, || {
        let mut bad = Vec::new();
        for n in 3..=8 {
            let got = fs_min_scaling(n).map_err(|e| e.to_string())?;
            if got != r(3, 2) - r(1, n as i128) {
                bad.push(format!("N={n}: {got}"));
            }
        }
        let n3 = fs_min_scaling(3).map_err(|e| e.to_string())?;
        let n4 = fs_min_scaling(4).map_err(|e| e.to_string())?;
        let ok = bad.is_empty() && n3 == r(7, 6) && n4 == r(5, 4);
        Ok((ok, if ok { format!("N=3..8 exact; N=3 -> {n3}, N=4 -> {n4}") } else { bad.join("; ") }))
    })
}

/// Worst case without fanout splitting: the 2x3 special point, where the
/// broadcast and the three unicasts pairwise conflict as whole flows.
pub fn criterion_3() -> CriterionResult {
    time(3, || {
        let tp = special_rate_point(3).map_err(|e| e.to_string())?;
        let g = build_flow_conflict_graph(&tp).map_err(|e| e.to_string())?;
        let at_point = fractional_chromatic(&g, &tp.rates()).map_err(|e| e.to_string())?.value;
        let worst = min_speedup_exact(&tp, GraphKind::Flow, Exec::default()).map_err(|e| e.to_string())?.value;
        let ok = at_point == r(5, 3) && worst == r(5, 3);
        Ok((ok, format!("chi_f at the point = {at_point}, max over the admissible region = {worst}")))
    })
}

pub fn criterion_4() -> CriterionResult {
    time(4, || {
        let err = |e: crate::graph::GraphError| e.to_string();
        let mut ok = true;
        let mut notes = Vec::new();
        for n in 2..=6 {
            let tp = benefit_pattern(n, r(1, 2), &vec![r(1, 2 * n as i128); n]).map_err(|e| e.to_string())?;
            let g = build_enhanced_conflict_graph(&tp).map_err(err)?;
            let p = is_perfect(&g, DEFAULT_PERFECTION_LIMIT).map_err(err)?;
            ok &= p;
            if !p {
                notes.push(format!("benefit N={n} imperfect"));
            }
        }
        let relaxed =
            build_enhanced_conflict_graph(&relaxed_speedup_pattern(1).map_err(|e| e.to_string())?).map_err(err)?;
        let relaxed_ok = relaxed.is_bipartite() && is_perfect(&relaxed, DEFAULT_PERFECTION_LIMIT).map_err(err)?;
        let hole_g = build_enhanced_conflict_graph(&speedup_pattern_2x3()).map_err(err)?;
        let hole = find_odd_hole(&hole_g, hole_g.n());
        let hole_ok = hole.is_some() && !is_perfect(&hole_g, DEFAULT_PERFECTION_LIMIT).map_err(err)?;
        ok &= relaxed_ok && hole_ok;
        notes.push(format!("benefit N=2..6 perfect; relaxed bipartite+perfect: {relaxed_ok}; 2x3 odd hole {hole:?}"));
        Ok((ok, notes.join("; ")))
    })
}

pub fn criterion_5() -> CriterionResult {
    time(5, || {
        let mut ok = true;
        let mut notes = Vec::new();
        for k in 2..=3 {
            let ub = unicast_broadcast_graph(k, 3).map_err(|e| e.to_string())?;
            let b = perfect_cover_bound(&ub.graph, &ub.input_cover_family()).map_err(|e| e.to_string())?;
            let want = r(2 * k as i128 - 1, k as i128);
            ok &= b.bound == want;
            notes.push(format!("K={k},N=3 input cover {}", b.bound));
        }
        for n in 3..=4 {
            let ub = unicast_broadcast_graph(2, n).map_err(|e| e.to_string())?;
            let b = perfect_cover_bound(&ub.graph, &ub.output_cover_family()).map_err(|e| e.to_string())?;
            let want = r(2 * n as i128, n as i128 + 1);
            ok &= b.bound == want;
            notes.push(format!("K=2,N={n} output cover {}", b.bound));
        }
        Ok((ok, notes.join("; ")))
    })
}

/// One row of the speedup chain: rate-point speedup, worst case over the
/// admissible region, and the imperfection ratio of the graph.
#[derive(Debug, Clone, Serialize)]
pub struct ChainRow {
    pub name: String,
    pub at_rate: Rational,
    pub region: Rational,
    pub imperfection: Rational,
}

pub fn speedup_chain(exec: Exec) -> Result<Vec<ChainRow>, String> {
    let mut rows = Vec::new();
    for (name, tp) in corpus() {
        if !is_admissible(&tp)
            || tp.flows().len() > MAX_EXACT_REGION_FLOWS
            || tp.num_subflows() > MAX_IMPERFECTION_VERTICES
        {
            continue;
        }
        let g = build_enhanced_conflict_graph(&tp).map_err(|e| e.to_string())?;
        rows.push(ChainRow {
            at_rate: speedup_for_rate(&tp).map_err(|e| e.to_string())?.value,
            region: min_speedup_exact(&tp, GraphKind::Enhanced, exec).map_err(|e| e.to_string())?.value,
            imperfection: imperfection_ratio(&g, exec).map_err(|e| e.to_string())?.value,
            name,
        });
    }
    Ok(rows)
}

pub fn criterion_6() -> CriterionResult {
    time(6, || {
        let rows = speedup_chain(Exec::default())?;
        let broken: Vec<String> = rows
            .iter()
            .filter(|c| !(c.at_rate <= c.region && c.region <= c.imperfection))
            .map(|c| format!("{}: {} / {} / {}", c.name, c.at_rate, c.region, c.imperfection))
            .collect();
        let c5 = imperfection_ratio(&cycle(5), Exec::default()).map_err(|e| e.to_string())?.value;
        let ok = broken.is_empty() && rows.len() >= 5 && c5 == r(5, 4);
        let detail = if broken.is_empty() {
            format!("chain holds on {} patterns; C5 ratio {c5}", rows.len())
        } else {
            format!("chain broken: {}", broken.join("; "))
        };
        Ok((ok, detail))
    })
}

pub fn criterion_7() -> CriterionResult {
    time(7, || {
        let mut total = 0;
        let mut bad = Vec::new();
        for n in 3..=5 {
            let shape = corner_shape_2xn(n).map_err(|e| e.to_string())?;
            for cp in qstab_corner_points_2xn(n).map_err(|e| e.to_string())? {
                total += 1;
                let d = cornerpoint_decomposition(&shape, &cp);
                let s = Rational::from(cp.u.len());
                let want = Rational::ONE + s.recip() - (s * s).recip();
                let ok = cp.rank == 3 * n
                    && cp.feasible
                    && cp.all_tight
                    && d.all_stable(&shape.graph)
                    && d.equals(&cp.point)
                    && d.total() == want
                    && want <= r(5, 4);
                if !ok {
                    bad.push(format!("N={n} m={} U={:?} V={:?}", cp.m, cp.u, cp.v));
                }
            }
        }
        Ok((bad.is_empty(), if bad.is_empty() { format!("{total} corner points verified") } else { bad.join("; ") }))
    })
}

pub fn criterion_8() -> CriterionResult {
    time(8, || {
        let mut verified = Vec::new();
        let mut bad = Vec::new();
        for (name, tp) in corpus() {
            let g = build_enhanced_conflict_graph(&tp).map_err(|e| e.to_string())?;
            let rates = crate::traffic::enhanced_rate_vector(&tp).rates;
            if !stab_membership(&g, &rates).map_err(|e| e.to_string())?.member {
                continue;
            }
            let sch = offline_schedule(&tp, Rational::ONE).map_err(|e| format!("{name}: {e}"))?;
            let full: Vec<usize> = sch.codes.iter().map(|c| c.k).collect();
            let rep = verify_frame_service(&sch, &tp, &full).map_err(|e| format!("{name}: {e}"))?;
            if rep.served && rep.decoded && rep.innovation_sets_stable {
                verified.push(format!("{name} (F={})", sch.frame_size));
            } else {
                bad.push(format!("{name}: {rep:?}"));
            }
        }
        let ok = bad.is_empty() && verified.len() >= 4;
        Ok((ok, if bad.is_empty() { format!("verified {}", verified.join(", ")) } else { bad.join("; ") }))
    })
}

fn lines(field: Gf) -> Result<Vec<KnowledgeSpace>, String> {
    [[1, 0], [0, 1], [1, 1]]
        .iter()
        .map(|v| KnowledgeSpace::spanned_by(field, 2, &[v.to_vec()]).map_err(|e| e.to_string()))
        .collect()
}

fn all_erasures_decode(n: usize, k: usize) -> Result<bool, String> {
    let code = MdsCode::new(n, k).map_err(|e| e.to_string())?;
    let data: Vec<Vec<u8>> = (0..k).map(|i| (0..6).map(|b| (i * 37 + b * 11 + 1) as u8).collect()).collect();
    let coded = code.encode(&data).map_err(|e| e.to_string())?;
    for mask in 0u32..1 << n {
        if mask.count_ones() as usize != k {
            continue;
        }
        let syms: Vec<(usize, Vec<u8>)> =
            (0..n).filter(|&i| mask & (1 << i) != 0).map(|i| (i, coded[i].clone())).collect();
        if code.decode(&syms).map_err(|e| e.to_string())? != data {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn criterion_9() -> CriterionResult {
    time(9, || {
        let gf2 = Gf::new(1).ok_or("GF(2) unavailable")?;
        let gf4 = Gf::new(2).ok_or("GF(4) unavailable")?;
        let tight = exists_uncovered_vector(gf2, 2, &lines(gf2)?).map_err(|e| e.to_string())?;
        let roomy = exists_uncovered_vector(gf4, 2, &lines(gf4)?).map_err(|e| e.to_string())?;
        let mut ok = !tight.exists && tight.exhaustive && roomy.exists && roomy.exhaustive;
        let mut notes = vec![format!("q=2 covered: {}, q=4 uncovered vector {:?}", !tight.exists, roomy.witness)];
        for (n, k) in [(4, 2), (5, 4), (6, 3)] {
            let d = all_erasures_decode(n, k)?;
            ok &= d;
            notes.push(format!("({n},{k}) {}", if d { "all erasures decode" } else { "decode failed" }));
        }
        Ok((ok, notes.join("; ")))
    })
}

/// Runs of the simulation criterion, keyed by a short label.
pub fn knee_runs(exec: Exec) -> Result<Vec<(String, SimMetrics)>, String> {
    let tp = special_rate_point(4).map_err(|e| e.to_string())?;
    let coded = SchedulerKind::MwssRandomized { candidates: KNEE_CANDIDATES };
    let uncoded = SchedulerKind::FanoutSplitting { candidates: KNEE_CANDIDATES };
    let plan = [
        ("coded@0.95", coded, 0.95),
        ("coded@1.1", coded, 1.1),
        ("uncoded@0.7", uncoded, 0.7),
        ("uncoded@0.9", uncoded, 0.9),
        ("coded@light", coded, LIGHT_LOAD_ALPHA),
    ];
    let configs: Vec<SimConfig> = plan
        .iter()
        .map(|&(_, kind, alpha)| {
            let c = SimConfig::new(tp.clone(), alpha, kind, KNEE_HORIZON, KNEE_SEED);
            if kind.is_coded() {
                c.with_batching(KNEE_DELTA, knee_epsilon())
            } else {
                c
            }
        })
        .collect();
    let runs = par::map(exec, &configs, sim::run);
    plan.iter().zip(runs).map(|(p, m)| m.map(|m| (p.0.to_string(), m)).map_err(|e| e.to_string())).collect()
}

pub fn criterion_10() -> CriterionResult {
    time(10, || {
        let runs = knee_runs(Exec::default())?;
        let get = |label: &str| &runs.iter().find(|(l, _)| l == label).expect("planned run").1;
        let light = get("coded@light").mean_delay;
        let ok = get("coded@0.95").stable
            && !get("coded@1.1").stable
            && get("uncoded@0.7").stable
            && !get("uncoded@0.9").stable
            && (light - LIGHT_LOAD_DELAY).abs() <= LIGHT_LOAD_TOLERANCE;
        let detail = runs
            .iter()
            .map(|(l, m)| format!("{l}: {} delay {:.0}", if m.stable { "stable" } else { "unstable" }, m.mean_delay))
            .collect::<Vec<_>>()
            .join("; ");
        Ok((ok, detail))
    })
}

pub fn criterion_11() -> CriterionResult {
    let mut res =
        time(11, || Ok((true, "volume columns are not reproduced; speedup columns are AC-1 and AC-3".into())));
    res.status = Status::Skip;
    res
}

pub fn run_criterion(id: u8) -> Option<CriterionResult> {
    Some(match id {
        1 => criterion_1(),
        2 => criterion_2(),
        3 => criterion_3(),
        4 => criterion_4(),
        5 => criterion_5(),
        6 => criterion_6(),
        7 => criterion_7(),
        8 => criterion_8(),
        9 => criterion_9(),
        10 => criterion_10(),
        11 => criterion_11(),
        _ => return None,
    })
}

/// All criteria, in order.
pub fn run_all() -> Vec<CriterionResult> {
    (1..=11).filter_map(run_criterion).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_patterns_are_distinct() {
        let c = corpus();
        let mut names: Vec<&str> = c.iter().map(|(n, _)| n.as_str()).collect();
        names.sort_unstable();
        names.dedup();
        assert_eq!(names.len(), c.len());
    }

    #[test]
    fn fast_criteria_pass() {
        for r in [criterion_1(), criterion_2(), criterion_3(), criterion_9()] {
            assert!(r.passed(), "{}", r.line());
        }
        assert_eq!(criterion_11().status, Status::Skip);
        assert!(run_criterion(12).is_none());
    }
}
