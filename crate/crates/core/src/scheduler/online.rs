//! Per-slot switch state and the two online policies: coded MWSS and the
//! uncoded fanout-splitting baseline.
//!
//! Coded state is kept per flow as a queue of generations. Without batching
//! a flow has one open generation that resets once every packet in it has
//! departed. With batching, arrivals in window `k` form generation `k` and
//! depart after the window closes. A combination only mixes one
//! generation, so an output that finishes a generation early waits for the
//! rest of its flow's outputs before moving on (see
//! [`CodedSwitch::scheduling_weights`]).

use std::collections::VecDeque;

use rand::Rng;
use serde::Serialize;

use super::mwss::{mwss_exact, mwss_randomized};
use super::{BatchController, SchedulerError, SwitchConfiguration};
use crate::coding::{innovative_combination, CodingError, Gf, KnowledgeSpace};
use crate::graph::{bit, build_enhanced_conflict_graph, members, ConflictGraph, VertexSet};
use crate::traffic::{SubflowId, TrafficPattern};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum SchedulerKind {
    MwssExact,
    MwssRandomized { candidates: usize },
    FanoutSplitting { candidates: usize },
}

impl SchedulerKind {
    pub fn name(&self) -> &'static str {
        match self {
            SchedulerKind::MwssExact => "mwss-exact",
            SchedulerKind::MwssRandomized { .. } => "mwss-rand",
            SchedulerKind::FanoutSplitting { .. } => "fanout-split",
        }
    }

    pub fn is_coded(&self) -> bool {
        !matches!(self, SchedulerKind::FanoutSplitting { .. })
    }
}

/// How the coded switch tracks knowledge.
///
/// `Counting` keeps only dimensions, which is exact because a combination
/// innovative for every chosen output always exists over a field larger
/// than the fanout. `Exact` keeps real knowledge spaces and runs the
/// combination search every transmission.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CodingBackend {
    #[default]
    Counting,
    Exact,
}

/// Virtual queue size of every subflow, in canonical subflow order.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct VirtualQueueState {
    pub sizes: Vec<u64>,
}

impl VirtualQueueState {
    pub fn total(&self) -> u64 {
        self.sizes.iter().sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Transmission {
    pub flow: usize,
    pub outputs: Vec<usize>,
    /// Coefficients over the generation's packets, with the exact backend.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coefficients: Option<Vec<u8>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StepOutcome {
    pub configuration: SwitchConfiguration,
    pub transmissions: Vec<Transmission>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Departure {
    pub flow: usize,
    pub arrival: u64,
    /// Slot boundary at which the packet left, one past the last slot used.
    pub departure: u64,
}

#[derive(Debug, Clone)]
struct Generation {
    batch: u64,
    arrivals: Vec<u64>,
    departed: usize,
    /// Dimension known at each fanout output.
    dims: Vec<usize>,
    /// Packets decoded at each fanout output.
    prefix: Vec<usize>,
    spaces: Option<Vec<KnowledgeSpace>>,
}

impl Generation {
    fn new(batch: u64, fanout: usize, exact: Option<Gf>) -> Self {
        Generation {
            batch,
            arrivals: Vec::new(),
            departed: 0,
            dims: vec![0; fanout],
            prefix: vec![0; fanout],
            spaces: exact.map(|f| vec![KnowledgeSpace::new(f, 0); fanout]),
        }
    }

    fn size(&self) -> usize {
        self.arrivals.len()
    }
}

#[derive(Debug, Clone)]
pub struct CodedSwitch {
    tp: TrafficPattern,
    graph: ConflictGraph,
    subflows: Vec<SubflowId>,
    offsets: Vec<usize>,
    backend: CodingBackend,
    field: Gf,
    batch: Option<BatchController>,
    gens: Vec<VecDeque<Generation>>,
    previous: VertexSet,
}

impl CodedSwitch {
    pub fn new(
        tp: &TrafficPattern,
        backend: CodingBackend,
        batch: Option<BatchController>,
    ) -> Result<Self, SchedulerError> {
        let graph = build_enhanced_conflict_graph(tp)?;
        let field = Gf::with_more_than(tp.max_fanout().max(1)).ok_or_else(|| {
            SchedulerError::InvalidParameter(format!("fanout {} needs a field beyond GF(256)", tp.max_fanout()))
        })?;
        Ok(CodedSwitch {
            tp: tp.clone(),
            graph,
            subflows: tp.subflows(),
            offsets: tp.subflow_offsets(),
            backend,
            field,
            batch,
            gens: vec![VecDeque::new(); tp.flows().len()],
            previous: 0,
        })
    }

    pub fn pattern(&self) -> &TrafficPattern {
        &self.tp
    }

    pub fn graph(&self) -> &ConflictGraph {
        &self.graph
    }

    pub fn field(&self) -> Gf {
        self.field
    }

    pub fn arrive(&mut self, flow: usize, t: u64) {
        let batch = self.batch.map_or(0, |b| b.batch_of(t));
        let fanout = self.tp.flows()[flow].fanout.len();
        let exact = (self.backend == CodingBackend::Exact).then_some(self.field);
        let q = &mut self.gens[flow];
        if q.back().is_none_or(|g| g.batch != batch) {
            q.push_back(Generation::new(batch, fanout, exact));
        }
        let g = q.back_mut().expect("just ensured");
        g.arrivals.push(t);
        if let Some(spaces) = &mut g.spaces {
            let n = g.arrivals.len();
            for s in spaces.iter_mut() {
                s.grow(n);
            }
        }
    }

    /// Dimensions each subflow's output still lacks, over every generation
    /// of its flow.
    pub fn virtual_queues(&self) -> VirtualQueueState {
        let mut sizes = vec![0u64; self.subflows.len()];
        for (f, q) in self.gens.iter().enumerate() {
            for g in q {
                for (k, d) in g.dims.iter().enumerate() {
                    sizes[self.offsets[f] + k] += (g.size() - d) as u64;
                }
            }
        }
        VirtualQueueState { sizes }
    }

    /// Per-subflow scheduling weights. An output that has finished the
    /// oldest generation some other output of its flow still needs waits at
    /// weight zero; the rest weigh their full virtual queue. Keeping a flow's
    /// outputs on one generation is what lets a single combination serve
    /// them together.
    pub fn scheduling_weights(&self) -> Vec<u64> {
        let mut w = self.virtual_queues().sizes;
        for (f, q) in self.gens.iter().enumerate() {
            if q.len() < 2 {
                continue;
            }
            let width = self.offsets[f + 1] - self.offsets[f];
            let at: Vec<Option<usize>> = (0..width).map(|k| q.iter().position(|g| g.dims[k] < g.size())).collect();
            let oldest = at.iter().flatten().min().copied();
            for (k, a) in at.iter().enumerate() {
                if *a != oldest {
                    w[self.offsets[f] + k] = 0;
                }
            }
        }
        w
    }

    /// Number of generations currently queued for `flow`.
    pub fn generations(&self, flow: usize) -> usize {
        self.gens[flow].len()
    }

    /// Degrees of freedom owed across all generations.
    pub fn total_backlog(&self) -> u64 {
        self.gens.iter().flatten().map(|g| g.dims.iter().map(|d| (g.size() - d) as u64).sum::<u64>()).sum()
    }

    /// Packets that arrived and have not departed.
    pub fn physical_queue(&self, flow: usize) -> usize {
        self.gens[flow].iter().map(|g| g.size() - g.departed).sum()
    }

    /// True when the exact backend's space dimensions agree with the
    /// tracked counts (always true for the counting backend).
    pub fn check_virtual_queues(&self) -> bool {
        self.gens.iter().flatten().all(|g| match &g.spaces {
            None => g.dims.iter().all(|&d| d <= g.size()),
            Some(sp) => sp.iter().zip(&g.dims).all(|(s, &d)| s.dimension() == d && s.ambient() == g.size()),
        })
    }

    /// Sends one combination to the chosen outputs working on the same
    /// generation, picking the generation shared by most of them (oldest on
    /// ties). The returned transmission lists the outputs actually served.
    pub fn transmit(&mut self, flow: usize, outputs: &[usize]) -> Result<Transmission, SchedulerError> {
        let fanout = &self.tp.flows()[flow].fanout;
        let mut at = Vec::with_capacity(outputs.len());
        for (r, o) in outputs.iter().enumerate() {
            let k = fanout.binary_search(o).map_err(|_| {
                SchedulerError::InvalidConfiguration(format!("output {o} is outside flow {flow}'s fanout"))
            })?;
            let Some(gi) = self.gens[flow].iter().position(|g| g.dims[k] < g.size()) else {
                return Err(CodingError::NothingInnovative { receiver: r }.into());
            };
            at.push((gi, k, *o));
        }
        let Some(gi) = at
            .iter()
            .map(|&(gi, _, _)| gi)
            .max_by_key(|&gi| (at.iter().filter(|&&(g, _, _)| g == gi).count(), std::cmp::Reverse(gi)))
        else {
            return Err(SchedulerError::InvalidConfiguration(format!("flow {flow} granted no outputs")));
        };
        let (idx, served): (Vec<usize>, Vec<usize>) =
            at.iter().filter(|&&(g, _, _)| g == gi).map(|&(_, k, o)| (k, o)).unzip();
        let g = &mut self.gens[flow][gi];
        let n = g.size();
        let coefficients = match &mut g.spaces {
            None => None,
            Some(spaces) => {
                // a unit vector outside each receiver, at its first non-pivot
                let mut support: Vec<usize> =
                    idx.iter().map(|&k| spaces[k].first_non_pivot().expect("receiver is not full")).collect();
                support.sort_unstable();
                support.dedup();
                let basis: Vec<Vec<u8>> = support
                    .iter()
                    .map(|&p| {
                        let mut e = vec![0u8; n];
                        e[p] = 1;
                        e
                    })
                    .collect();
                let receivers: Vec<&KnowledgeSpace> = idx.iter().map(|&k| &spaces[k]).collect();
                let c = innovative_combination(&basis, &receivers)?;
                for &k in &idx {
                    if !spaces[k].insert(&c.vector)? {
                        return Err(CodingError::NothingInnovative { receiver: k }.into());
                    }
                }
                Some(c.vector)
            }
        };
        for &k in &idx {
            g.dims[k] += 1;
            if g.dims[k] == n {
                g.prefix[k] = n;
            }
        }
        Ok(Transmission { flow, outputs: served, coefficients })
    }

    /// Closes slot `t`: packets decoded at every fanout output leave, and
    /// emptied generations are dropped.
    pub fn end_slot(&mut self, t: u64, out: &mut Vec<Departure>) {
        for (f, q) in self.gens.iter_mut().enumerate() {
            let Some(g) = q.front_mut() else { continue };
            if let Some(b) = &self.batch {
                if t + 1 < b.close_of(g.batch) {
                    continue;
                }
            }
            let ready = g.prefix.iter().copied().min().unwrap_or(0);
            while g.departed < ready {
                out.push(Departure { flow: f, arrival: g.arrivals[g.departed], departure: t + 1 });
                g.departed += 1;
            }
            if g.departed == g.size() {
                q.pop_front();
            }
        }
    }
}

fn positive_only(set: VertexSet, w: &[u64]) -> VertexSet {
    members(set).filter(|&v| w[v] > 0).fold(0, |acc, v| acc | bit(v))
}

/// One coded configuration: pick a stable set by scheduling weight, then
/// send each chosen flow one combination innovative for all its chosen
/// outputs.
pub fn online_step<R: Rng + ?Sized>(
    sw: &mut CodedSwitch,
    kind: SchedulerKind,
    rng: &mut R,
) -> Result<StepOutcome, SchedulerError> {
    let w = sw.scheduling_weights();
    let set = match kind {
        SchedulerKind::MwssExact => mwss_exact(&sw.graph, &w)?,
        SchedulerKind::MwssRandomized { candidates } => {
            let s = mwss_randomized(&sw.graph, &w, sw.previous, candidates, rng)?;
            sw.previous = s;
            s
        }
        SchedulerKind::FanoutSplitting { .. } => {
            return Err(SchedulerError::InvalidParameter("fanout splitting is the uncoded policy".into()))
        }
    };
    let mut configuration = SwitchConfiguration::from_stable_set(&sw.subflows, positive_only(set, &w));
    let mut transmissions = Vec::with_capacity(configuration.grants.len());
    for g in configuration.grants.values_mut() {
        let tx = sw.transmit(g.flow, &g.outputs)?;
        g.outputs.clone_from(&tx.outputs);
        transmissions.push(tx);
    }
    Ok(StepOutcome { configuration, transmissions })
}

#[derive(Debug, Clone)]
struct Packet {
    seq: u64,
    arrival: u64,
    /// Fanout positions still missing this packet.
    residual: u32,
}

/// Uncoded switch: each flow is a FIFO of packets with residual fanouts.
#[derive(Debug, Clone)]
pub struct UncodedSwitch {
    tp: TrafficPattern,
    graph: ConflictGraph,
    subflows: Vec<SubflowId>,
    offsets: Vec<usize>,
    queues: Vec<VecDeque<Packet>>,
    /// Packets of the flow still owed to each subflow's output.
    backlog: Vec<u64>,
    next_seq: Vec<u64>,
    previous: VertexSet,
    done: Vec<Departure>,
}

impl UncodedSwitch {
    pub fn new(tp: &TrafficPattern) -> Result<Self, SchedulerError> {
        if tp.max_fanout() > 32 {
            return Err(SchedulerError::TooLarge { what: "fanout", n: tp.max_fanout(), limit: 32 });
        }
        Ok(UncodedSwitch {
            tp: tp.clone(),
            graph: build_enhanced_conflict_graph(tp)?,
            subflows: tp.subflows(),
            offsets: tp.subflow_offsets(),
            queues: vec![VecDeque::new(); tp.flows().len()],
            backlog: vec![0; tp.num_subflows()],
            next_seq: vec![0; tp.flows().len()],
            previous: 0,
            done: Vec::new(),
        })
    }

    pub fn pattern(&self) -> &TrafficPattern {
        &self.tp
    }

    pub fn arrive(&mut self, flow: usize, t: u64) {
        let width = self.tp.flows()[flow].fanout.len();
        let seq = self.next_seq[flow];
        self.next_seq[flow] += 1;
        self.queues[flow].push_back(Packet { seq, arrival: t, residual: ((1u64 << width) - 1) as u32 });
        for k in 0..width {
            self.backlog[self.offsets[flow] + k] += 1;
        }
    }

    /// Residual backlog per subflow.
    pub fn residual_backlogs(&self) -> VirtualQueueState {
        VirtualQueueState { sizes: self.backlog.clone() }
    }

    pub fn physical_queue(&self, flow: usize) -> usize {
        self.queues[flow].len()
    }

    /// Backlog of subflows whose output the head-of-line packet still needs,
    /// zero elsewhere.
    fn eligible_weights(&self) -> Vec<u64> {
        let mut w = vec![0u64; self.subflows.len()];
        for (f, q) in self.queues.iter().enumerate() {
            if let Some(p) = q.front() {
                for k in 0..self.tp.flows()[f].fanout.len() {
                    if p.residual & (1 << k) != 0 {
                        let v = self.offsets[f] + k;
                        w[v] = self.backlog[v];
                    }
                }
            }
        }
        w
    }

    /// Packets completed since the last call.
    pub fn take_departures(&mut self, t: u64, out: &mut Vec<Departure>) {
        for d in self.done.drain(..) {
            out.push(Departure { departure: t + 1, ..d });
        }
    }
}

/// One uncoded configuration. Each input sends the head-of-line packet of
/// one flow to a subset of the outputs still missing it; the subset family
/// is chosen by the same randomized max-weight search as the coded policy,
/// over subflows eligible for their flow's head packet.
pub fn fanout_splitting_step<R: Rng + ?Sized>(
    sw: &mut UncodedSwitch,
    candidates: usize,
    rng: &mut R,
) -> Result<StepOutcome, SchedulerError> {
    let w = sw.eligible_weights();
    let set = mwss_randomized(&sw.graph, &w, sw.previous, candidates, rng)?;
    sw.previous = set;
    let chosen = positive_only(set, &w);
    let mut configuration = SwitchConfiguration::from_stable_set(&sw.subflows, chosen);
    let mut transmissions = Vec::with_capacity(configuration.grants.len());
    for g in configuration.grants.values_mut() {
        let f = g.flow;
        let fanout = &sw.tp.flows()[f].fanout;
        let p = sw.queues[f].front_mut().expect("eligible flows have a head packet");
        g.packet = Some(p.seq);
        for o in &g.outputs {
            let k = fanout.binary_search(o).expect("output from the flow's subflows");
            p.residual &= !(1 << k);
            sw.backlog[sw.offsets[f] + k] -= 1;
        }
        if p.residual == 0 {
            let p = sw.queues[f].pop_front().expect("head exists");
            sw.done.push(Departure { flow: f, arrival: p.arrival, departure: 0 });
        }
        transmissions.push(Transmission { flow: f, outputs: g.outputs.clone(), coefficients: None });
    }
    Ok(StepOutcome { configuration, transmissions })
}
