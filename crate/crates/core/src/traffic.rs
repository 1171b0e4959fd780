//! Multicast traffic patterns on a K x N switch.
//!
//! Inputs and outputs are 1-based. Flows are kept in canonical order, sorted
//! by `(input, fanout)`, and every other module relies on that order.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TrafficError {
    #[error("malformed pattern document: {0}")]
    Malformed(String),
    #[error("{flow}: rate {rate} is negative")]
    NegativeRate { flow: String, rate: String },
    #[error("{flow}: unparsable rate {rate:?}")]
    BadRate { flow: String, rate: String },
    #[error("{flow}: duplicate (input, fanout) pair")]
    DuplicateFlow { flow: String },
    #[error("{flow}: output {output} outside 1..={n}")]
    FanoutOutOfRange { flow: String, output: usize, n: usize },
    #[error("{flow}: input outside 1..={k}")]
    InputOutOfRange { flow: String, k: usize },
    #[error("{flow}: output {output} listed twice")]
    DuplicateOutput { flow: String, output: usize },
    #[error("{flow}: empty fanout")]
    EmptyFanout { flow: String },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Flow {
    pub input: usize,
    /// Sorted ascending, no duplicates.
    pub fanout: Vec<usize>,
    pub rate: Rational,
}

impl Flow {
    pub fn new(input: usize, fanout: Vec<usize>, rate: Rational) -> Self {
        Flow { input, fanout, rate }
    }

    pub fn is_unicast(&self) -> bool {
        self.fanout.len() == 1
    }
}

impl fmt::Display for Flow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.rate, self.input, fmt_set(&self.fanout))
    }
}

fn fmt_set(s: &[usize]) -> String {
    let inner: Vec<String> = s.iter().map(|x| x.to_string()).collect();
    format!("{{{}}}", inner.join(","))
}

/// One output of one flow, i.e. a vertex of the enhanced conflict graph.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SubflowId {
    pub input: usize,
    pub fanout: Vec<usize>,
    pub output: usize,
    /// Index of the parent flow in canonical order.
    pub flow: usize,
}

impl fmt::Display for SubflowId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.input, fmt_set(&self.fanout), self.output)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrafficPattern {
    k: usize,
    n: usize,
    flows: Vec<Flow>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnhancedRateVector {
    pub subflows: Vec<SubflowId>,
    pub rates: Vec<Rational>,
}

impl TrafficPattern {
    /// Validates and canonicalizes. Fanouts are sorted; flows are sorted by
    /// `(input, fanout)`.
    pub fn new(k: usize, n: usize, flows: Vec<Flow>) -> Result<Self, TrafficError> {
        if k == 0 || n == 0 {
            return Err(TrafficError::InvalidParameter(format!(
                "switch must have at least one input and output, got {k}x{n}"
            )));
        }
        let mut out = Vec::with_capacity(flows.len());
        let mut seen = BTreeSet::new();
        for (idx, f) in flows.into_iter().enumerate() {
            let name = || format!("flow #{idx} (input {}, fanout {})", f.input, fmt_set(&f.fanout));
            if f.input == 0 || f.input > k {
                return Err(TrafficError::InputOutOfRange { flow: name(), k });
            }
            if f.fanout.is_empty() {
                return Err(TrafficError::EmptyFanout { flow: name() });
            }
            let mut fanout = f.fanout.clone();
            fanout.sort_unstable();
            for w in fanout.windows(2) {
                if w[0] == w[1] {
                    return Err(TrafficError::DuplicateOutput { flow: name(), output: w[0] });
                }
            }
            if let Some(&o) = fanout.iter().find(|&&o| o == 0 || o > n) {
                return Err(TrafficError::FanoutOutOfRange { flow: name(), output: o, n });
            }
            if f.rate.is_negative() {
                return Err(TrafficError::NegativeRate { flow: name(), rate: f.rate.to_string() });
            }
            if !seen.insert((f.input, fanout.clone())) {
                return Err(TrafficError::DuplicateFlow { flow: name() });
            }
            out.push(Flow { input: f.input, fanout, rate: f.rate });
        }
        out.sort_by(|a, b| (a.input, &a.fanout).cmp(&(b.input, &b.fanout)));
        Ok(TrafficPattern { k, n, flows: out })
    }

    pub fn num_inputs(&self) -> usize {
        self.k
    }

    pub fn num_outputs(&self) -> usize {
        self.n
    }

    pub fn flows(&self) -> &[Flow] {
        &self.flows
    }

    pub fn rates(&self) -> Vec<Rational> {
        self.flows.iter().map(|f| f.rate).collect()
    }

    /// Same flows, new rates (canonical order).
    pub fn with_rates(&self, rates: &[Rational]) -> Result<Self, TrafficError> {
        if rates.len() != self.flows.len() {
            return Err(TrafficError::InvalidParameter(format!(
                "expected {} rates, got {}",
                self.flows.len(),
                rates.len()
            )));
        }
        let flows = self.flows.iter().zip(rates).map(|(f, &r)| Flow { rate: r, ..f.clone() }).collect();
        TrafficPattern::new(self.k, self.n, flows)
    }

    pub fn scaled(&self, factor: Rational) -> Result<Self, TrafficError> {
        let rates: Vec<Rational> = self.flows.iter().map(|f| f.rate * factor).collect();
        self.with_rates(&rates)
    }

    pub fn input_load(&self, i: usize) -> Rational {
        self.flows.iter().filter(|f| f.input == i).map(|f| f.rate).sum()
    }

    pub fn output_load(&self, j: usize) -> Rational {
        self.flows.iter().filter(|f| f.fanout.contains(&j)).map(|f| f.rate).sum()
    }

    /// Largest port load.
    pub fn max_load(&self) -> Rational {
        let ins = (1..=self.k).map(|i| self.input_load(i));
        let outs = (1..=self.n).map(|j| self.output_load(j));
        ins.chain(outs).fold(Rational::ZERO, Rational::max)
    }

    pub fn max_fanout(&self) -> usize {
        self.flows.iter().map(|f| f.fanout.len()).max().unwrap_or(0)
    }

    /// Subflows in canonical order: by input, then fanout, then output.
    pub fn subflows(&self) -> Vec<SubflowId> {
        self.flows
            .iter()
            .enumerate()
            .flat_map(|(idx, f)| {
                f.fanout.iter().map(move |&o| SubflowId {
                    input: f.input,
                    fanout: f.fanout.clone(),
                    output: o,
                    flow: idx,
                })
            })
            .collect()
    }

    /// Index of the first subflow of each flow, plus a final sentinel.
    pub fn subflow_offsets(&self) -> Vec<usize> {
        let mut offs = Vec::with_capacity(self.flows.len() + 1);
        let mut acc = 0;
        for f in &self.flows {
            offs.push(acc);
            acc += f.fanout.len();
        }
        offs.push(acc);
        offs
    }

    pub fn num_subflows(&self) -> usize {
        self.flows.iter().map(|f| f.fanout.len()).sum()
    }

    pub fn find_flow(&self, input: usize, fanout: &[usize]) -> Option<usize> {
        let mut key = fanout.to_vec();
        key.sort_unstable();
        self.flows.iter().position(|f| f.input == input && f.fanout == key)
    }
}

impl fmt::Display for TrafficPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let flows: Vec<String> = self.flows.iter().map(|x| x.to_string()).collect();
        write!(f, "{}x{} [{}]", self.k, self.n, flows.join(", "))
    }
}

pub fn is_admissible(tp: &TrafficPattern) -> bool {
    tp.max_load() <= 1
}

pub fn enhanced_rate_vector(tp: &TrafficPattern) -> EnhancedRateVector {
    let subflows = tp.subflows();
    let rates = subflows.iter().map(|s| tp.flows[s.flow].rate).collect();
    EnhancedRateVector { subflows, rates }
}

/// 2 x N pattern: a broadcast of rate `r0` from input 1 and a unicast of rate
/// `r[j-1]` from input 2 to every output j.
pub fn benefit_pattern(n: usize, r0: Rational, r: &[Rational]) -> Result<TrafficPattern, TrafficError> {
    if n < 2 {
        return Err(TrafficError::InvalidParameter(format!("benefit pattern needs N >= 2, got {n}")));
    }
    if r.len() != n {
        return Err(TrafficError::InvalidParameter(format!(
            "benefit pattern needs {n} unicast rates, got {}",
            r.len()
        )));
    }
    let mut flows = vec![Flow::new(1, (1..=n).collect(), r0)];
    flows.extend(r.iter().enumerate().map(|(j, &rate)| Flow::new(2, vec![j + 1], rate)));
    TrafficPattern::new(2, n, flows)
}

/// Benefit pattern with `r0 = 1 - 1/N` and every unicast at `1/N`.
pub fn special_rate_point(n: usize) -> Result<TrafficPattern, TrafficError> {
    if n < 3 {
        return Err(TrafficError::InvalidParameter(format!("special rate point needs N >= 3, got {n}")));
    }
    let nn = Rational::from(n);
    let u = nn.recip();
    benefit_pattern(n, Rational::ONE - u, &vec![u; n])
}

/// The 2 x 3 pattern whose enhanced conflict graph has an odd hole.
///
/// Input 1 unicasts to output 3 (`j1`); input 2 unicasts to outputs 1 and 2
/// (`j2`, `j3`). Every flow has rate 1/2.
pub fn speedup_pattern_2x3() -> TrafficPattern {
    let h = Rational::new(1, 2);
    TrafficPattern::new(
        2,
        3,
        vec![
            Flow::new(1, vec![1, 2, 3], h),
            Flow::new(1, vec![3], h),
            Flow::new(2, vec![1], h),
            Flow::new(2, vec![2], h),
        ],
    )
    .expect("static pattern is valid")
}

/// [`speedup_pattern_2x3`] with `drop` removed from the multicast fanout.
///
/// Dropping output 3 (the input-1 unicast target) keeps the odd hole; dropping
/// output 1 or 2 leaves a bipartite graph.
pub fn relaxed_speedup_pattern(drop: usize) -> Result<TrafficPattern, TrafficError> {
    if !(1..=3).contains(&drop) {
        return Err(TrafficError::InvalidParameter(format!("drop must be in 1..=3, got {drop}")));
    }
    let mut flows = speedup_pattern_2x3().flows;
    flows[0].fanout.retain(|&o| o != drop);
    TrafficPattern::new(2, 3, flows)
}

/// K x 3 composite load (K = 3 or 4) at unit scale: the special rate point for
/// N = 3 weighted by 2/3, plus a 1/100 unicast between every input and output.
pub fn composite_pattern(k: usize) -> Result<TrafficPattern, TrafficError> {
    if !(3..=4).contains(&k) {
        return Err(TrafficError::InvalidParameter(format!("composite pattern needs K in 3..=4, got {k}")));
    }
    let base = special_rate_point(3)?;
    let w = Rational::new(2, 3);
    let bg = Rational::new(1, 100);
    let mut flows: Vec<Flow> = base.flows().iter().map(|f| Flow { rate: f.rate * w, ..f.clone() }).collect();
    for i in 1..=k {
        for j in 1..=3 {
            if let Some(f) = flows.iter_mut().find(|f| f.input == i && f.fanout == [j]) {
                f.rate += bg;
            } else {
                flows.push(Flow::new(i, vec![j], bg));
            }
        }
    }
    TrafficPattern::new(k, 3, flows)
}

/// Every input carries N unicasts and one broadcast, all at rate 0.
pub fn unicast_broadcast_pattern(k: usize, n: usize) -> Result<TrafficPattern, TrafficError> {
    if k == 0 || n < 2 {
        return Err(TrafficError::InvalidParameter(format!("need K >= 1 and N >= 2, got {k}x{n}")));
    }
    let mut flows = Vec::new();
    for i in 1..=k {
        for j in 1..=n {
            flows.push(Flow::new(i, vec![j], Rational::ZERO));
        }
        flows.push(Flow::new(i, (1..=n).collect(), Rational::ZERO));
    }
    TrafficPattern::new(k, n, flows)
}

#[derive(Serialize, Deserialize)]
struct PatternDoc {
    #[serde(rename = "K")]
    k: usize,
    #[serde(rename = "N")]
    n: usize,
    flows: Vec<FlowDoc>,
}

#[derive(Serialize, Deserialize)]
struct FlowDoc {
    input: usize,
    fanout: Vec<usize>,
    rate: String,
}

/// Parses the JSON pattern format. Rates above 1 parse fine; admissibility is
/// a separate question.
pub fn parse_pattern(text: &str) -> Result<TrafficPattern, TrafficError> {
    let doc: PatternDoc = serde_json::from_str(text).map_err(|e| TrafficError::Malformed(e.to_string()))?;
    let mut flows = Vec::with_capacity(doc.flows.len());
    for (idx, f) in doc.flows.into_iter().enumerate() {
        let name = format!("flow #{idx} (input {}, fanout {})", f.input, fmt_set(&f.fanout));
        let rate: Rational =
            f.rate.parse().map_err(|_| TrafficError::BadRate { flow: name.clone(), rate: f.rate.clone() })?;
        flows.push(Flow::new(f.input, f.fanout, rate));
    }
    TrafficPattern::new(doc.k, doc.n, flows)
}

pub fn pattern_to_value(tp: &TrafficPattern) -> serde_json::Value {
    let doc = PatternDoc {
        k: tp.k,
        n: tp.n,
        flows: tp
            .flows
            .iter()
            .map(|f| FlowDoc { input: f.input, fanout: f.fanout.clone(), rate: f.rate.to_string() })
            .collect(),
    };
    serde_json::to_value(doc).expect("pattern serializes")
}

pub fn serialize_pattern(tp: &TrafficPattern) -> String {
    serde_json::to_string_pretty(&pattern_to_value(tp)).expect("pattern serializes")
}
