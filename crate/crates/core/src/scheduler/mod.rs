//! Switch configurations, offline frame schedules, online max-weight
//! stable-set scheduling and the uncoded fanout-splitting baseline.

mod appendix;
mod batch;
mod frame;
mod mwss;
mod online;

pub use appendix::{appendix_fs_schedule, replay_uncoded, UncodedReplay};
pub use batch::BatchController;
pub use frame::{offline_schedule, verify_frame_service, CodeSpec, FrameSchedule, FrameServiceReport, SubflowDeficit};
pub use mwss::{greedy_maximal, mwss_exact, mwss_randomized, set_weight, MAX_EXACT_MWSS_VERTICES};
pub use online::{
    fanout_splitting_step, online_step, CodedSwitch, CodingBackend, Departure, SchedulerKind, StepOutcome,
    Transmission, UncodedSwitch, VirtualQueueState,
};

use std::collections::BTreeMap;

use serde::Serialize;

use crate::coding::CodingError;
use crate::graph::{members, GraphError, VertexSet};
use crate::polytope::PolytopeError;
use crate::rational::Rational;
use crate::traffic::{SubflowId, TrafficError, TrafficPattern};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SchedulerError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
    #[error(transparent)]
    Coding(#[from] CodingError),
    #[error(transparent)]
    Traffic(#[from] TrafficError),
    #[error("rate vector is outside the coded rate region: fractional chromatic number {chi} exceeds 1")]
    NotInStab { chi: Rational },
    #[error("{what} has size {n}; at most {limit} supported")]
    TooLarge { what: &'static str, n: usize, limit: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("rates are outside the fanout-splitting region: {0}")]
    OutsideRegion(String),
    #[error("invalid configuration: {0}")]
    InvalidConfiguration(String),
}

/// What one input sends in one configuration.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Grant {
    /// Index of the flow in canonical order.
    pub flow: usize,
    /// 1-based outputs receiving the transmission.
    pub outputs: Vec<usize>,
    /// Packet sequence number, for uncoded schedules.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub packet: Option<u64>,
}

/// Grants keyed by 1-based input.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize)]
pub struct SwitchConfiguration {
    pub grants: BTreeMap<usize, Grant>,
}

impl SwitchConfiguration {
    pub fn idle() -> Self {
        Self::default()
    }

    pub fn is_idle(&self) -> bool {
        self.grants.is_empty()
    }

    /// Configuration that serves exactly the subflows in `set`. The caller
    /// guarantees the set is stable in the enhanced conflict graph.
    pub fn from_stable_set(subflows: &[SubflowId], set: VertexSet) -> Self {
        let mut grants: BTreeMap<usize, Grant> = BTreeMap::new();
        for v in members(set) {
            let s = &subflows[v];
            grants
                .entry(s.input)
                .or_insert_with(|| Grant { flow: s.flow, outputs: Vec::new(), packet: None })
                .outputs
                .push(s.output);
        }
        SwitchConfiguration { grants }
    }

    /// Subflow indices served, given the pattern's subflow offsets.
    pub fn served_subflows(&self, tp: &TrafficPattern) -> Vec<usize> {
        let offs = tp.subflow_offsets();
        let mut out = Vec::new();
        for g in self.grants.values() {
            let fanout = &tp.flows()[g.flow].fanout;
            for o in &g.outputs {
                if let Ok(k) = fanout.binary_search(o) {
                    out.push(offs[g.flow] + k);
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Checks both switch constraints: every output hears at most one
    /// input, and each input sends one flow to a subset of its fanout.
    pub fn validate(&self, tp: &TrafficPattern) -> Result<(), SchedulerError> {
        let mut used = vec![false; tp.num_outputs() + 1];
        for (&input, g) in &self.grants {
            let bad = |m: String| Err(SchedulerError::InvalidConfiguration(m));
            let Some(flow) = tp.flows().get(g.flow) else {
                return bad(format!("input {input} grants unknown flow {}", g.flow));
            };
            if flow.input != input {
                return bad(format!("input {input} grants flow {} of input {}", g.flow, flow.input));
            }
            if g.outputs.is_empty() {
                return bad(format!("input {input} has an empty grant"));
            }
            for &o in &g.outputs {
                if !flow.fanout.contains(&o) {
                    return bad(format!("input {input} sends flow {} to output {o} outside its fanout", g.flow));
                }
                if std::mem::replace(&mut used[o], true) {
                    return bad(format!("output {o} receives from two inputs"));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_enhanced_conflict_graph, set_of};
    use crate::traffic::speedup_pattern_2x3;

    #[test]
    fn stable_sets_give_valid_configurations() {
        let tp = speedup_pattern_2x3();
        let g = build_enhanced_conflict_graph(&tp).unwrap();
        let subs = tp.subflows();
        for s in crate::graph::maximal_stable_sets(&g, 40).unwrap() {
            let c = SwitchConfiguration::from_stable_set(&subs, s);
            c.validate(&tp).unwrap();
            assert_eq!(c.served_subflows(&tp), members(s).collect::<Vec<_>>());
        }
    }

    #[test]
    fn validator_rejects_output_clash() {
        let tp = speedup_pattern_2x3();
        let subs = tp.subflows();
        // the broadcast to output 1 and input 2's unicast to output 1
        let clash = (0..subs.len()).filter(|&v| subs[v].output == 1).collect::<Vec<_>>();
        let c = SwitchConfiguration::from_stable_set(&subs, set_of(&clash));
        assert!(c.validate(&tp).is_err());
        let mut wrong = SwitchConfiguration::idle();
        wrong.grants.insert(2, Grant { flow: 0, outputs: vec![1], packet: None });
        assert!(wrong.validate(&tp).is_err());
    }
}
