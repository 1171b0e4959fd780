//! Frame-based coded schedules built from a stable-set decomposition.

use serde::Serialize;
use serde_json::{json, Value};

use super::{SchedulerError, SwitchConfiguration};
use crate::coding::{pack_frame, unpack_frame, MdsCode};
use crate::graph::{bit, build_enhanced_conflict_graph};
use crate::polytope::fractional_chromatic;
use crate::rational::{lcm_denominators, Rational};
use crate::traffic::{enhanced_rate_vector, TrafficPattern};

/// The `(T, rF)` erasure code a flow uses within one frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CodeSpec {
    pub flow: usize,
    /// Configurations in which the flow reaches at least one output.
    pub t: usize,
    /// Packets served per frame, `r F`.
    pub k: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrameSchedule {
    /// Frame length in slots.
    pub frame_size: u64,
    pub speedup: Rational,
    /// Fractional chromatic number of the rate vector scaled by `1/speedup`.
    pub chi: Rational,
    /// `speedup * frame_size` configurations, idle ones last.
    pub configurations: Vec<SwitchConfiguration>,
    /// Indices into `configurations` run in each slot.
    pub slots: Vec<Vec<usize>>,
    pub codes: Vec<CodeSpec>,
}

impl FrameSchedule {
    /// Copy with configuration `idx` replaced by an idle one.
    pub fn without_configuration(&self, idx: usize) -> FrameSchedule {
        let mut s = self.clone();
        if let Some(c) = s.configurations.get_mut(idx) {
            *c = SwitchConfiguration::idle();
        }
        s
    }

    /// Configurations in execution order.
    pub fn execution_order(&self) -> impl Iterator<Item = &SwitchConfiguration> {
        self.slots.iter().flatten().map(|&i| &self.configurations[i])
    }

    pub fn to_json(&self, tp: &TrafficPattern) -> Value {
        let config_json = |c: &SwitchConfiguration| -> Value {
            let grants: serde_json::Map<String, Value> = c
                .grants
                .iter()
                .map(|(i, g)| {
                    let f = &tp.flows()[g.flow];
                    let mut v = json!({"flow": [f.input, f.fanout], "outputs": g.outputs});
                    if let Some(p) = g.packet {
                        v["packet"] = json!(p);
                    }
                    (i.to_string(), v)
                })
                .collect();
            Value::Object(grants)
        };
        json!({
            "frame_size": self.frame_size,
            "speedup": self.speedup.to_string(),
            "chi_f": self.chi.to_string(),
            "num_configurations": self.configurations.len(),
            "slots": self.slots.iter().map(|s| s.iter().map(|&i| config_json(&self.configurations[i])).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "codes": self.codes.iter().map(|c| {
                let f = &tp.flows()[c.flow];
                json!({"flow": [f.input, f.fanout], "T": c.t, "k": c.k})
            }).collect::<Vec<_>>(),
        })
    }
}

/// Splits `count` configurations over `frame` slots, `⌊s⌋` or `⌊s⌋ + 1`
/// per slot with the extras spread evenly.
fn spread(count: usize, speedup: Rational, frame: u64) -> Vec<Vec<usize>> {
    (0..frame)
        .map(|t| {
            let lo = (speedup * Rational::from_int(t as i128)).floor() as usize;
            let hi = (speedup * Rational::from_int(t as i128 + 1)).floor() as usize;
            (lo.min(count)..hi.min(count)).collect()
        })
        .collect()
}

/// Frame schedule for the pattern's rates run at speedup `s`.
///
/// The rate vector scaled by `1/s` must lie in the stable set polytope of the
/// enhanced conflict graph. When it does not, the error carries the
/// fractional chromatic number of the unscaled rates, which is the speedup
/// that would work.
pub fn offline_schedule(tp: &TrafficPattern, speedup: Rational) -> Result<FrameSchedule, SchedulerError> {
    if !speedup.is_positive() {
        return Err(SchedulerError::InvalidParameter(format!("speedup must be positive, got {speedup}")));
    }
    let g = build_enhanced_conflict_graph(tp)?;
    let erv = enhanced_rate_vector(tp);
    let w: Vec<Rational> = erv.rates.iter().map(|&r| r / speedup).collect();
    let chi = fractional_chromatic(&g, &w)?;
    if chi.value > 1 {
        return Err(SchedulerError::NotInStab { chi: chi.value * speedup });
    }
    let mut terms = chi.decomposition.terms.clone();
    terms.sort_by_key(|&(_, s)| s);
    let scaled: Vec<Rational> = terms.iter().map(|&(l, _)| l * speedup).collect();
    let frame = lcm_denominators(tp.rates().iter().chain(&scaled).chain(std::iter::once(&speedup)));
    let frame_r = Rational::from_int(frame);
    let total = (speedup * frame_r).numer() as usize;

    let subflows = erv.subflows;
    let mut configurations = Vec::with_capacity(total);
    for (&(_, set), &sl) in terms.iter().zip(&scaled) {
        let reps = (sl * frame_r).numer() as usize;
        let c = SwitchConfiguration::from_stable_set(&subflows, set);
        configurations.extend(std::iter::repeat_n(c, reps));
    }
    debug_assert!(configurations.len() <= total);
    configurations.resize(total, SwitchConfiguration::idle());

    let codes = tp
        .flows()
        .iter()
        .enumerate()
        .map(|(f, flow)| CodeSpec {
            flow: f,
            t: configurations.iter().filter(|c| c.grants.values().any(|g| g.flow == f)).count(),
            k: (flow.rate * frame_r).numer() as usize,
        })
        .collect();
    let slots = spread(total, speedup, frame as u64);
    Ok(FrameSchedule { frame_size: frame as u64, speedup, chi: chi.value, configurations, slots, codes })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SubflowDeficit {
    pub flow: usize,
    pub output: usize,
    pub received: usize,
    pub needed: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FrameServiceReport {
    pub served: bool,
    pub deficits: Vec<SubflowDeficit>,
    /// Every output that received enough symbols recovered exactly the
    /// queued packets.
    pub decoded: bool,
    /// Per configuration, the subflows that received an innovative symbol
    /// formed a stable set of the enhanced conflict graph.
    pub innovation_sets_stable: bool,
}

const PACKET_BYTES: usize = 8;

fn payload(flow: usize, idx: usize) -> Vec<u8> {
    (0..PACKET_BYTES).map(|b| (flow * 131 + idx * 17 + b * 29 + 5) as u8).collect()
}

/// Runs one frame of the schedule with `queued[f]` packets waiting at each
/// flow, coding every flow with its `(T, rF)` MDS code, and checks that each
/// fanout output decodes the oldest `min(queued, rF)` packets.
pub fn verify_frame_service(
    schedule: &FrameSchedule,
    tp: &TrafficPattern,
    queued: &[usize],
) -> Result<FrameServiceReport, SchedulerError> {
    let flows = tp.flows();
    if queued.len() != flows.len() || schedule.codes.len() != flows.len() {
        return Err(SchedulerError::InvalidParameter(format!(
            "{} queue sizes and {} code specs for {} flows",
            queued.len(),
            schedule.codes.len(),
            flows.len()
        )));
    }
    let g = build_enhanced_conflict_graph(tp)?;
    let offs = tp.subflow_offsets();
    struct FlowRun {
        real: Vec<Vec<u8>>,
        code: Option<MdsCode>,
        coded: Vec<Vec<u8>>,
        sent: usize,
        received: Vec<Vec<(usize, Vec<u8>)>>,
    }
    let mut runs = Vec::with_capacity(flows.len());
    for (f, flow) in flows.iter().enumerate() {
        let spec = schedule.codes[f];
        let real: Vec<Vec<u8>> = (0..queued[f].min(spec.k)).map(|i| payload(f, i)).collect();
        let (code, coded) = if real.is_empty() {
            (None, Vec::new())
        } else {
            let code = MdsCode::new(spec.t.max(spec.k), spec.k)?;
            let coded = code.encode(&pack_frame(&real, spec.k, PACKET_BYTES)?)?;
            (Some(code), coded)
        };
        let fanout = flow.fanout.len();
        runs.push(FlowRun { real, code, coded, sent: 0, received: vec![Vec::new(); fanout] });
    }

    let mut innovation_sets_stable = true;
    for config in schedule.execution_order() {
        config.validate(tp)?;
        let mut indicator = 0u128;
        for gr in config.grants.values() {
            let run = &mut runs[gr.flow];
            let pos = run.sent;
            run.sent += 1;
            let Some(code) = &run.code else { continue };
            if pos >= run.coded.len() {
                continue;
            }
            let fanout = &flows[gr.flow].fanout;
            for o in &gr.outputs {
                let k = fanout.binary_search(o).expect("validated grant");
                // any k symbols of an MDS code are independent, so a symbol
                // is innovative exactly while the output holds fewer than k
                if run.received[k].len() < code.k {
                    indicator |= bit(offs[gr.flow] + k);
                }
                run.received[k].push((pos, run.coded[pos].clone()));
            }
        }
        innovation_sets_stable &= g.is_stable(indicator);
    }

    let mut deficits = Vec::new();
    let mut decoded = true;
    for (f, run) in runs.iter().enumerate() {
        let Some(code) = &run.code else { continue };
        for (k, got) in run.received.iter().enumerate() {
            let output = flows[f].fanout[k];
            if got.len() < code.k {
                deficits.push(SubflowDeficit { flow: f, output, received: got.len(), needed: code.k });
                continue;
            }
            let data = code.decode(got)?;
            decoded &= unpack_frame(&data)? == run.real;
        }
    }
    Ok(FrameServiceReport { served: deficits.is_empty() && decoded, deficits, decoded, innovation_sets_stable })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::traffic::{special_rate_point, speedup_pattern_2x3, Flow};

    #[test]
    fn special_point_three_slots() {
        let tp = special_rate_point(3).unwrap();
        let s = offline_schedule(&tp, Rational::ONE).unwrap();
        assert_eq!(s.frame_size, 3);
        assert_eq!(s.configurations.len(), 3);
        for (t, c) in s.configurations.iter().enumerate() {
            let uni = &c.grants[&2];
            assert_eq!(uni.outputs, vec![t + 1]);
            let bc = &c.grants[&1];
            assert_eq!(bc.outputs, (1..=3).filter(|&j| j != t + 1).collect::<Vec<_>>());
        }
        assert_eq!(s.codes[0], CodeSpec { flow: 0, t: 3, k: 2 });
    }

    #[test]
    fn special_point_four_is_served() {
        let tp = special_rate_point(4).unwrap();
        let s = offline_schedule(&tp, Rational::ONE).unwrap();
        let full = vec![usize::MAX; tp.flows().len()];
        let rep = verify_frame_service(&s, &tp, &full).unwrap();
        assert!(rep.served && rep.innovation_sets_stable, "{rep:?}");
        let empty = vec![0; tp.flows().len()];
        assert!(verify_frame_service(&s, &tp, &empty).unwrap().served);
    }

    #[test]
    fn deleted_configuration_leaves_deficit() {
        let tp = special_rate_point(4).unwrap();
        let s = offline_schedule(&tp, Rational::ONE).unwrap().without_configuration(0);
        let full = vec![usize::MAX; tp.flows().len()];
        let rep = verify_frame_service(&s, &tp, &full).unwrap();
        assert!(!rep.served);
        assert!(rep.deficits.iter().all(|d| d.needed - d.received == 1));
        assert!(!rep.deficits.is_empty());
    }

    #[test]
    fn speedup_pattern_needs_five_configurations_in_four_slots() {
        let tp = speedup_pattern_2x3();
        match offline_schedule(&tp, Rational::ONE) {
            Err(SchedulerError::NotInStab { chi }) => assert_eq!(chi, Rational::new(5, 4)),
            other => panic!("expected NotInStab, got {other:?}"),
        }
        let s = offline_schedule(&tp, Rational::new(5, 4)).unwrap();
        assert_eq!(s.frame_size, 4);
        assert_eq!(s.configurations.len(), 5);
        assert_eq!(s.slots.iter().map(Vec::len).collect::<Vec<_>>(), vec![1, 1, 1, 2]);
        let full = vec![usize::MAX; 4];
        assert!(verify_frame_service(&s, &tp, &full).unwrap().served);
    }

    #[test]
    fn single_full_rate_flow() {
        let tp = TrafficPattern::new(1, 2, vec![Flow::new(1, vec![1, 2], Rational::ONE)]).unwrap();
        let s = offline_schedule(&tp, Rational::ONE).unwrap();
        assert_eq!((s.frame_size, s.configurations.len()), (1, 1));
    }
}
