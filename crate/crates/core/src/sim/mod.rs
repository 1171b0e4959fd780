//! Slotted simulation of the switch under Bernoulli arrivals.
//!
//! Each slot: arrivals join their flow's queue, the scheduler runs as many
//! configurations as the speedup allows, then finished packets depart at the
//! slot boundary. Arrivals and scheduling draw from separate ChaCha8
//! streams of the same seed, so a run is a pure function of its config.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::par::{self, Exec};
use crate::rational::Rational;
use crate::scheduler::{
    fanout_splitting_step, online_step, BatchController, CodedSwitch, CodingBackend, Departure, SchedulerError,
    SchedulerKind, UncodedSwitch,
};
use crate::traffic::TrafficPattern;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SimError {
    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Scheduler(#[from] SchedulerError),
    #[error("trace output failed: {0}")]
    Trace(String),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimConfig {
    #[serde(skip)]
    pub pattern: TrafficPattern,
    /// Load factor; flow `f` sees Bernoulli arrivals of mean `alpha * r_f`.
    pub alpha: f64,
    pub scheduler: SchedulerKind,
    /// `(Δ, ε)`. Only meaningful for the coded schedulers.
    pub batching: Option<(u64, Rational)>,
    pub horizon: u64,
    pub seed: u64,
    pub speedup: Rational,
    pub backend: CodingBackend,
    /// Clip arrival probabilities above 1 instead of rejecting the config.
    pub clip: bool,
    /// Record a per-slot CSV trace.
    pub trace: bool,
}

impl SimConfig {
    pub fn new(pattern: TrafficPattern, alpha: f64, scheduler: SchedulerKind, horizon: u64, seed: u64) -> Self {
        SimConfig {
            pattern,
            alpha,
            scheduler,
            batching: None,
            horizon,
            seed,
            speedup: Rational::ONE,
            backend: CodingBackend::Counting,
            clip: false,
            trace: false,
        }
    }

    pub fn with_batching(mut self, delta: u64, epsilon: Rational) -> Self {
        self.batching = Some((delta, epsilon));
        self
    }

    fn controller(&self) -> Result<Option<BatchController>, SimError> {
        self.batching.map(|(d, e)| BatchController::new(d, e)).transpose().map_err(SimError::from)
    }

    fn probabilities(&self) -> Result<Vec<f64>, SimError> {
        if !(self.alpha.is_finite() && self.alpha >= 0.0) {
            return Err(SimError::InvalidConfig(format!("alpha must be finite and nonnegative, got {}", self.alpha)));
        }
        self.pattern
            .flows()
            .iter()
            .enumerate()
            .map(|(f, flow)| {
                let p = self.alpha * flow.rate.to_f64();
                match (p > 1.0, self.clip) {
                    (false, _) => Ok(p),
                    (true, true) => Ok(1.0),
                    (true, false) => Err(SimError::InvalidConfig(format!(
                        "flow {f} has arrival probability {p} > 1; enable clipping to cap it"
                    ))),
                }
            })
            .collect()
    }

    fn validate(&self) -> Result<Option<BatchController>, SimError> {
        if self.horizon == 0 {
            return Err(SimError::InvalidConfig("horizon must be at least 1 slot".into()));
        }
        if !self.speedup.is_positive() {
            return Err(SimError::InvalidConfig(format!("speedup must be positive, got {}", self.speedup)));
        }
        if let SchedulerKind::MwssRandomized { candidates } | SchedulerKind::FanoutSplitting { candidates } =
            self.scheduler
        {
            if candidates == 0 {
                return Err(SimError::InvalidConfig("candidates must be at least 1".into()));
            }
        }
        let b = self.controller()?;
        if let Some(b) = &b {
            if !self.scheduler.is_coded() {
                return Err(SimError::InvalidConfig("batching applies to the coded schedulers only".into()));
            }
            if self.horizon < b.window {
                return Err(SimError::InvalidConfig(format!(
                    "horizon {} is shorter than one batch window of {} slots",
                    self.horizon, b.window
                )));
            }
        }
        Ok(b)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimMetrics {
    pub alpha: f64,
    pub scheduler: String,
    pub horizon: u64,
    pub arrivals: u64,
    pub departures: u64,
    /// Packets counted in the delay statistics (first batch excluded).
    pub delay_samples: u64,
    pub mean_delay: f64,
    /// Departures per slot, all flows.
    pub throughput: f64,
    pub flow_throughput: Vec<f64>,
    pub flow_offered: Vec<f64>,
    pub flow_arrivals: Vec<u64>,
    pub flow_departures: Vec<u64>,
    /// Largest per-slot total queue. Coded: virtual queues over all
    /// generations. Uncoded: residual backlogs.
    pub max_vq: u64,
    pub mean_vq: f64,
    pub middle_window_vq: f64,
    pub final_window_vq: f64,
    pub stable: bool,
    /// Slot ends at which every queue was empty.
    pub empty_visits: u64,
    pub max_empty_gap: u64,
    /// Slot ends where a flow had no virtual backlog yet packets still
    /// waiting (checked without batching only).
    pub consistency_violations: u64,
    /// Packets still queued at the horizon.
    pub in_queue: u64,
    #[serde(skip)]
    pub trace: Option<String>,
}

/// Final-window growth test used for the stability flag.
pub const STABILITY_RATIO: f64 = 1.5;
pub const STABILITY_SLACK: f64 = 1.0;

fn window_mean(series: &[u64], from: f64, to: f64) -> f64 {
    let n = series.len();
    let (a, b) = ((n as f64 * from) as usize, ((n as f64 * to) as usize).max((n as f64 * from) as usize + 1).min(n));
    if a >= b {
        return 0.0;
    }
    series[a..b].iter().sum::<u64>() as f64 / (b - a) as f64
}

/// Stable iff the mean queue over the last 10% of the run stays within
/// `1.5x + 1` of the mean over the middle 10%.
pub fn stability_flag(series: &[u64]) -> (bool, f64, f64) {
    let mid = window_mean(series, 0.45, 0.55);
    let fin = window_mean(series, 0.9, 1.0);
    (fin <= STABILITY_RATIO * mid + STABILITY_SLACK, mid, fin)
}

enum Switch {
    Coded(CodedSwitch),
    Uncoded(UncodedSwitch),
}

#[derive(Serialize)]
struct TraceRow {
    slot: u64,
    arrivals: u64,
    departures: u64,
    queue: u64,
}

pub fn run(config: &SimConfig) -> Result<SimMetrics, SimError> {
    let batch = config.validate()?;
    let probs = config.probabilities()?;
    let tp = &config.pattern;
    let nflows = tp.flows().len();
    let mut sw = match config.scheduler {
        SchedulerKind::FanoutSplitting { .. } => Switch::Uncoded(UncodedSwitch::new(tp)?),
        _ => Switch::Coded(CodedSwitch::new(tp, config.backend, batch)?),
    };
    let mut arrivals_rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut sched_rng = ChaCha8Rng::seed_from_u64(config.seed);
    sched_rng.set_stream(1);
    let warmup = batch.map_or(0, |b| b.window);
    let (sp, sq) = (config.speedup.numer(), config.speedup.denom());

    let mut trace = config.trace.then(|| csv::Writer::from_writer(Vec::new()));
    let mut series = Vec::with_capacity(config.horizon as usize);
    let mut deps: Vec<Departure> = Vec::new();
    let mut flow_deps = vec![0u64; nflows];
    let mut flow_arrs = vec![0u64; nflows];
    let (mut arrivals, mut departures, mut delay_sum, mut delay_n) = (0u64, 0u64, 0u64, 0u64);
    let (mut empty_visits, mut last_empty, mut max_gap, mut violations) = (0u64, 0u64, 0u64, 0u64);

    for t in 0..config.horizon {
        let mut slot_arrivals = 0;
        for (f, &p) in probs.iter().enumerate() {
            if p > 0.0 && arrivals_rng.gen_bool(p) {
                slot_arrivals += 1;
                flow_arrs[f] += 1;
                match &mut sw {
                    Switch::Coded(s) => s.arrive(f, t),
                    Switch::Uncoded(s) => s.arrive(f, t),
                }
            }
        }
        arrivals += slot_arrivals;
        let ti = t as i128;
        let configs = ((ti + 1) * sp / sq - ti * sp / sq) as usize;
        for _ in 0..configs {
            match (&mut sw, config.scheduler) {
                (Switch::Uncoded(s), SchedulerKind::FanoutSplitting { candidates }) => {
                    fanout_splitting_step(s, candidates, &mut sched_rng)?;
                }
                (Switch::Coded(s), kind) => {
                    online_step(s, kind, &mut sched_rng)?;
                }
                _ => unreachable!("switch kind follows the scheduler"),
            }
        }
        deps.clear();
        let queue = match &mut sw {
            Switch::Coded(s) => {
                s.end_slot(t, &mut deps);
                if batch.is_none() {
                    let vq = s.virtual_queues().sizes;
                    let offs = tp.subflow_offsets();
                    for f in 0..nflows {
                        if vq[offs[f]..offs[f + 1]].iter().all(|&q| q == 0) && s.physical_queue(f) > 0 {
                            violations += 1;
                        }
                    }
                }
                s.total_backlog()
            }
            Switch::Uncoded(s) => {
                s.take_departures(t, &mut deps);
                s.residual_backlogs().total()
            }
        };
        for d in &deps {
            flow_deps[d.flow] += 1;
            if d.arrival >= warmup {
                delay_sum += d.departure - d.arrival;
                delay_n += 1;
            }
        }
        departures += deps.len() as u64;
        if queue == 0 {
            empty_visits += 1;
            max_gap = max_gap.max(t + 1 - last_empty);
            last_empty = t + 1;
        }
        series.push(queue);
        if let Some(w) = &mut trace {
            w.serialize(TraceRow { slot: t, arrivals: slot_arrivals, departures: deps.len() as u64, queue })
                .map_err(|e| SimError::Trace(e.to_string()))?;
        }
    }
    max_gap = max_gap.max(config.horizon - last_empty);

    let in_queue = (0..nflows)
        .map(|f| match &sw {
            Switch::Coded(s) => s.physical_queue(f) as u64,
            Switch::Uncoded(s) => s.physical_queue(f) as u64,
        })
        .sum();
    debug_assert_eq!(arrivals, departures + in_queue);
    let (stable, mid, fin) = stability_flag(&series);
    let h = config.horizon as f64;
    let trace = match trace {
        Some(w) => Some(
            String::from_utf8(w.into_inner().map_err(|e| SimError::Trace(e.to_string()))?)
                .map_err(|e| SimError::Trace(e.to_string()))?,
        ),
        None => None,
    };
    Ok(SimMetrics {
        alpha: config.alpha,
        scheduler: config.scheduler.name().to_string(),
        horizon: config.horizon,
        arrivals,
        departures,
        delay_samples: delay_n,
        mean_delay: if delay_n == 0 { 0.0 } else { delay_sum as f64 / delay_n as f64 },
        throughput: departures as f64 / h,
        flow_throughput: flow_deps.iter().map(|&d| d as f64 / h).collect(),
        flow_offered: probs,
        flow_arrivals: flow_arrs,
        flow_departures: flow_deps,
        max_vq: series.iter().copied().max().unwrap_or(0),
        mean_vq: series.iter().sum::<u64>() as f64 / h,
        middle_window_vq: mid,
        final_window_vq: fin,
        stable,
        empty_visits,
        max_empty_gap: max_gap,
        consistency_violations: violations,
        in_queue,
        trace,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub alpha: f64,
    pub scheduler: String,
    pub mean_delay: f64,
    pub throughput: f64,
    pub max_vq: u64,
    pub stable: bool,
}

/// One run per grid point, seeded `seed + index`. Runs are independent and
/// dispatched through [`par::map`].
pub fn sweep(config: &SimConfig, grid: &[f64], exec: Exec) -> Result<Vec<SweepRow>, SimError> {
    if grid.windows(2).any(|w| w[0] > w[1]) {
        return Err(SimError::InvalidConfig("alpha grid must be sorted ascending".into()));
    }
    let points: Vec<(usize, f64)> = grid.iter().copied().enumerate().collect();
    par::map(exec, &points, |&(i, alpha)| {
        let c = SimConfig { alpha, seed: config.seed.wrapping_add(i as u64), trace: false, ..config.clone() };
        run(&c).map(|m| SweepRow {
            alpha,
            scheduler: m.scheduler,
            mean_delay: m.mean_delay,
            throughput: m.throughput,
            max_vq: m.max_vq,
            stable: m.stable,
        })
    })
    .into_iter()
    .collect()
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record(["alpha", "scheduler", "mean_delay", "throughput", "max_vq", "stable"]).expect("in-memory write");
    for r in rows {
        w.serialize(r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
}

/// Parses `start:stop:step` into an inclusive ascending grid.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>, SimError> {
    let bad = || SimError::InvalidConfig(format!("alpha grid {spec:?} is not start:stop:step"));
    let parts: Vec<f64> =
        spec.split(':').map(|p| p.trim().parse::<f64>()).collect::<Result<_, _>>().map_err(|_| bad())?;
    let [a, b, s] = parts[..] else { return Err(bad()) };
    if !(s > 0.0) || b < a {
        return Err(bad());
    }
    let n = ((b - a) / s + 1e-9).floor() as usize;
    Ok((0..=n).map(|k| ((a + k as f64 * s) * 1e9).round() / 1e9).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeReport {
    pub slots: u64,
    pub empty_visits: u64,
    pub max_gap: u64,
    pub mean_gap: f64,
    /// Whenever a flow's virtual queues were all zero, its physical queue
    /// was empty too.
    pub consistent: bool,
}

/// Counts returns of the coded switch to the all-empty state.
pub fn stability_probe(config: &SimConfig) -> Result<ProbeReport, SimError> {
    if config.batching.is_some() || !config.scheduler.is_coded() {
        return Err(SimError::InvalidConfig("the probe runs the coded scheduler without batching".into()));
    }
    let m = run(config)?;
    Ok(ProbeReport {
        slots: config.horizon,
        empty_visits: m.empty_visits,
        max_gap: m.max_empty_gap,
        mean_gap: if m.empty_visits == 0 {
            config.horizon as f64
        } else {
            config.horizon as f64 / m.empty_visits as f64
        },
        consistent: m.consistency_violations == 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::traffic::special_rate_point;

    fn coded(alpha: f64, horizon: u64) -> SimConfig {
        SimConfig::new(
            special_rate_point(3).unwrap(),
            alpha,
            SchedulerKind::MwssRandomized { candidates: 4 },
            horizon,
            11,
        )
    }

    #[test]
    fn zero_load_is_empty_throughout() {
        let m = run(&coded(0.0, 500)).unwrap();
        assert_eq!((m.arrivals, m.delay_samples, m.max_vq, m.empty_visits), (0, 0, 0, 500));
        assert_eq!(m.mean_delay, 0.0);
    }

    #[test]
    fn conservation_and_rates() {
        let m = run(&coded(0.6, 5000)).unwrap();
        assert_eq!(m.arrivals, m.departures + m.in_queue);
        assert!(m.stable);
        assert!(m.mean_delay >= 1.0);
        assert_eq!(m.consistency_violations, 0);
    }

    #[test]
    fn deterministic_trace() {
        let mut c = coded(0.5, 400);
        c.trace = true;
        let a = run(&c).unwrap().trace.unwrap();
        let b = run(&c).unwrap().trace.unwrap();
        assert_eq!(a, b);
        assert!(a.starts_with("slot,arrivals,departures,queue\n"));
    }

    #[test]
    fn config_errors() {
        let mut c = coded(2.0, 100);
        assert!(matches!(run(&c), Err(SimError::InvalidConfig(_))));
        c.clip = true;
        assert!(run(&c).is_ok());
        let c = coded(0.5, 100).with_batching(1000, Rational::new(1, 200));
        assert!(matches!(run(&c), Err(SimError::InvalidConfig(_))));
        let c = coded(0.5, 100).with_batching(10, Rational::ZERO);
        assert!(run(&c).is_err());
    }

    #[test]
    fn grid_parsing() {
        assert_eq!(parse_grid("0.1:0.3:0.1").unwrap(), vec![0.1, 0.2, 0.3]);
        assert!(parse_grid("1:0:0.1").is_err());
        assert!(parse_grid("0:1").is_err());
    }

    #[test]
    fn empty_grid_gives_empty_table() {
        assert!(sweep(&coded(0.1, 10), &[], Exec::Sequential).unwrap().is_empty());
        assert_eq!(sweep_csv(&[]), "alpha,scheduler,mean_delay,throughput,max_vq,stable\n");
    }

    #[test]
    fn flag_detects_linear_growth() {
        let grow: Vec<u64> = (0..1000).collect();
        assert!(!stability_flag(&grow).0);
        let flat: Vec<u64> = (0..1000).map(|t| t % 7).collect();
        assert!(stability_flag(&flat).0);
    }
}
