//! Explicit uncoded frame schedule for the benefit pattern at any point of
//! its fanout-splitting region.
//!
//! The broadcast's packets are split into groups sized by the unicast rates.
//! Group `j` rides along while input 2 serves a share of the unicast to
//! output `j`, reaching every output except `j`. What remains is a pure
//! unicast problem, cleared in max-load slots by matchings that always cover
//! every port of maximum remaining load.

use std::collections::BTreeSet;

use serde::Serialize;

use super::{FrameSchedule, Grant, SchedulerError, SwitchConfiguration};
use crate::polytope::fs_region_check;
use crate::rational::{lcm_denominators, Rational};
use crate::traffic::{benefit_pattern, TrafficPattern};

pub fn appendix_fs_schedule(
    n: usize,
    r0: Rational,
    r: &[Rational],
) -> Result<(TrafficPattern, FrameSchedule), SchedulerError> {
    let check = fs_region_check(n, r0, r)?;
    if !check.inside {
        return Err(SchedulerError::OutsideRegion(check.violated.join(", ")));
    }
    let tp = benefit_pattern(n, r0, r)?;
    let s: Rational = r.iter().copied().sum();
    let half = Rational::new(1, 2);
    let alpha = if s.is_zero() { half } else { (r0 / s).min(half) };
    let shares: Vec<Rational> = r.iter().map(|&x| alpha * x).collect();
    let frame = lcm_denominators(std::iter::once(&r0).chain(r).chain(&shares));
    let fr = Rational::from_int(frame);
    let count = |x: Rational| (x * fr).numer() as u64;

    let group: Vec<u64> = shares.iter().map(|&x| count(x)).collect();
    let broadcast_total = count(r0);
    let rest = broadcast_total - group.iter().sum::<u64>();
    // group j occupies ids [start[j], start[j] + group[j]); the rest follow
    let mut start = vec![0u64; n + 1];
    for j in 0..n {
        start[j + 1] = start[j] + group[j];
    }
    let mut unicast_next = vec![0u64; n];
    let all: Vec<usize> = (1..=n).collect();
    let mut configs: Vec<SwitchConfiguration> = Vec::new();
    let grant = |flow: usize, outputs: Vec<usize>, packet: u64| Grant { flow, outputs, packet: Some(packet) };

    for p in 0..rest {
        let mut c = SwitchConfiguration::idle();
        c.grants.insert(1, grant(0, all.clone(), start[n] + p));
        configs.push(c);
    }
    for j in 0..n {
        for p in 0..group[j] {
            let mut c = SwitchConfiguration::idle();
            let others: Vec<usize> = all.iter().copied().filter(|&o| o != j + 1).collect();
            c.grants.insert(1, grant(0, others, start[j] + p));
            c.grants.insert(2, grant(j + 1, vec![j + 1], unicast_next[j]));
            unicast_next[j] += 1;
            configs.push(c);
        }
    }

    // remaining demand: input 1 owes group j to output j, input 2 its unicasts
    let mut g_rem = group.clone();
    let mut g_next = start.clone();
    let mut u_rem: Vec<u64> = r.iter().enumerate().map(|(j, &x)| count(x) - unicast_next[j]).collect();
    loop {
        let in1: u64 = g_rem.iter().sum();
        let in2: u64 = u_rem.iter().sum();
        let outs: Vec<u64> = (0..n).map(|j| g_rem[j] + u_rem[j]).collect();
        let d = *[in1, in2].iter().chain(&outs).max().expect("nonempty");
        if d == 0 {
            break;
        }
        let (a, b) = covering_matching(&g_rem, &u_rem, in1 == d, in2 == d, &outs, d)
            .ok_or_else(|| SchedulerError::InvalidParameter("no covering matching; demand is inconsistent".into()))?;
        let mut c = SwitchConfiguration::idle();
        if let Some(j) = a {
            c.grants.insert(1, grant(0, vec![j + 1], g_next[j]));
            g_next[j] += 1;
            g_rem[j] -= 1;
        }
        if let Some(j) = b {
            c.grants.insert(2, grant(j + 1, vec![j + 1], unicast_next[j]));
            unicast_next[j] += 1;
            u_rem[j] -= 1;
        }
        configs.push(c);
    }

    let len = configs.len();
    if len as i128 > frame {
        return Err(SchedulerError::InvalidParameter(format!("schedule needs {len} slots but the frame has {frame}")));
    }
    let slots = (0..frame as usize).map(|t| if t < len { vec![t] } else { Vec::new() }).collect();
    let schedule = FrameSchedule {
        frame_size: frame as u64,
        speedup: Rational::ONE,
        chi: Rational::from(len) / fr,
        configurations: configs,
        slots,
        codes: Vec::new(),
    };
    Ok((tp, schedule))
}

/// Picks input 1's output `a` and input 2's output `b` so every port at
/// load `d` is served. Prefers serving two ports over one.
fn covering_matching(
    g_rem: &[u64],
    u_rem: &[u64],
    need1: bool,
    need2: bool,
    outs: &[u64],
    d: u64,
) -> Option<(Option<usize>, Option<usize>)> {
    let n = outs.len();
    let opts = |rem: &[u64]| -> Vec<Option<usize>> {
        std::iter::once(None).chain((0..n).filter(|&j| rem[j] > 0).map(Some)).collect()
    };
    let mut best: Option<(usize, (Option<usize>, Option<usize>))> = None;
    for a in opts(g_rem) {
        for b in opts(u_rem) {
            if a.is_some() && a == b {
                continue;
            }
            if (need1 && a.is_none()) || (need2 && b.is_none()) {
                continue;
            }
            let covered = (0..n).filter(|&j| outs[j] == d).all(|j| a == Some(j) || b == Some(j));
            if !covered {
                continue;
            }
            let size = usize::from(a.is_some()) + usize::from(b.is_some());
            if best.is_none_or(|(s, _)| size > s) {
                best = Some((size, (a, b)));
            }
        }
    }
    best.map(|(_, m)| m)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UncodedReplay {
    /// Every packet of every flow reached every fanout output.
    pub complete: bool,
    /// (flow, packet, output) triples never delivered.
    pub missing: usize,
    /// Slots that actually carry a configuration.
    pub length: usize,
}

/// Replays an uncoded schedule with `r F` packets per flow and checks
/// that each is delivered to its whole fanout.
pub fn replay_uncoded(tp: &TrafficPattern, schedule: &FrameSchedule) -> Result<UncodedReplay, SchedulerError> {
    let fr = Rational::from_int(schedule.frame_size as i128);
    let mut got: BTreeSet<(usize, u64, usize)> = BTreeSet::new();
    for c in schedule.execution_order() {
        c.validate(tp)?;
        for g in c.grants.values() {
            let p = g.packet.ok_or_else(|| SchedulerError::InvalidConfiguration("grant without a packet id".into()))?;
            for &o in &g.outputs {
                got.insert((g.flow, p, o));
            }
        }
    }
    let mut missing = 0;
    for (f, flow) in tp.flows().iter().enumerate() {
        let k = (flow.rate * fr).floor() as u64;
        for p in 0..k {
            missing += flow.fanout.iter().filter(|&&o| !got.contains(&(f, p, o))).count();
        }
    }
    let length = schedule.execution_order().filter(|c| !c.is_idle()).count();
    Ok(UncodedReplay { complete: missing == 0, missing, length })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(p: i128, q: i128) -> Rational {
        Rational::new(p, q)
    }

    #[test]
    fn boundary_point_uses_whole_frame() {
        // r0/S = 3/2 > 1/2 and 2 r0 + S = 2
        let (tp, s) = appendix_fs_schedule(3, r(3, 4), &[r(1, 6); 3]).unwrap();
        let rep = replay_uncoded(&tp, &s).unwrap();
        assert!(rep.complete, "{rep:?}");
        assert_eq!(rep.length as u64, s.frame_size);
    }

    #[test]
    fn pure_unicast() {
        let (tp, s) = appendix_fs_schedule(3, Rational::ZERO, &[r(1, 3), r(1, 3), r(1, 6)]).unwrap();
        let rep = replay_uncoded(&tp, &s).unwrap();
        assert!(rep.complete);
        // input 2 carries 5/6 of the frame
        assert_eq!(rep.length as u64 * 6, s.frame_size * 5);
    }

    #[test]
    fn special_point_is_rejected() {
        assert!(matches!(appendix_fs_schedule(3, r(2, 3), &[r(1, 3); 3]), Err(SchedulerError::OutsideRegion(_))));
    }
}
