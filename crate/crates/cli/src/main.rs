use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use ncswitch::graph::{
    build_enhanced_conflict_graph, build_flow_conflict_graph, find_odd_hole, is_perfect, maximal_cliques, members,
    ConflictGraph, VertexSet, DEFAULT_ENUMERATION_LIMIT, DEFAULT_PERFECTION_LIMIT,
};
use ncswitch::par::Exec;
use ncswitch::polytope::{
    min_speedup_exact, qstab_membership, speedup_for_rate, stab_membership, GraphKind, QstabViolation,
    StableSetDecomposition,
};
use ncswitch::rational::Rational;
use ncswitch::scheduler::{offline_schedule, SchedulerKind};
use ncswitch::sim::{self, parse_grid, SimConfig, SweepRow};
use ncswitch::traffic::{
    benefit_pattern, is_admissible, parse_pattern, pattern_to_value, special_rate_point, speedup_pattern_2x3,
    TrafficPattern,
};
use ncswitch::verify::{self, CriterionResult, Status};
use serde_json::{json, Value};

const SCHEMA: &str = "ncswitch/1";

/// Longest odd hole `analyze` searches for.
const HOLE_SEARCH_LEN: usize = 15;

#[derive(Parser)]
#[command(name = "ncswitch", version, about = "Coded multicast scheduling for input-queued switches")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    /// Also write the JSON body to this file.
    #[arg(long, global = true, value_name = "PATH")]
    json: Option<PathBuf>,
    /// Write tabular output (sweep rows, simulation summary) as CSV to this file.
    #[arg(long, global = true, value_name = "PATH")]
    csv: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Emit a named traffic pattern.
    Gen(GenArgs),
    /// Conflict graph statistics: cliques, perfection, shortest odd hole.
    Analyze {
        pattern: PathBuf,
        #[arg(long, value_enum, default_value_t = GraphChoice::Enhanced)]
        graph: GraphChoice,
    },
    /// Admissibility and membership of the rates in QSTAB and STAB.
    Region { pattern: PathBuf },
    /// Speedup needed for the pattern's rates.
    Speedup {
        pattern: PathBuf,
        /// Also compute the worst case over the whole admissible region.
        #[arg(long)]
        exact_region: bool,
    },
    /// Offline frame schedule with erasure codes per flow.
    Schedule {
        pattern: PathBuf,
        #[arg(long, default_value = "1")]
        speedup: Rational,
    },
    /// One simulation run.
    Simulate {
        pattern: PathBuf,
        #[arg(long)]
        alpha: f64,
        #[command(flatten)]
        sim: SimArgs,
        /// Write the per-slot trace CSV to this file.
        #[arg(long, value_name = "PATH")]
        trace: Option<PathBuf>,
    },
    /// Runs over a grid of load factors.
    Sweep {
        pattern: PathBuf,
        /// `start:stop:step`, inclusive.
        #[arg(long)]
        alpha_grid: String,
        #[command(flatten)]
        sim: SimArgs,
        #[arg(long)]
        sequential: bool,
    },
    /// Run the acceptance suite and print a pass/fail table.
    Verify {
        #[arg(value_enum, default_value_t = Suite::All)]
        suite: Suite,
    },
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    pattern: PatternName,
    /// Number of outputs.
    #[arg(long, default_value_t = 3)]
    n: usize,
    /// Broadcast rate of the benefit pattern.
    #[arg(long, default_value = "1/2")]
    r0: Rational,
    /// Comma-separated unicast rates of the benefit pattern; defaults to 1/(2N) each.
    #[arg(long, value_delimiter = ',')]
    rates: Vec<Rational>,
}

#[derive(Args)]
struct SimArgs {
    #[arg(long, value_enum, default_value_t = SchedulerChoice::MwssRand)]
    scheduler: SchedulerChoice,
    /// Candidate stable sets per slot for the randomized schedulers.
    #[arg(long, default_value_t = 10)]
    candidates: usize,
    /// Batch length. Batching is off unless given.
    #[arg(long)]
    delta: Option<u64>,
    #[arg(long, default_value = "1/200")]
    eps: Rational,
    #[arg(long, default_value_t = 200_000)]
    horizon: u64,
    #[arg(long, default_value = "1")]
    speedup: Rational,
}

#[derive(Clone, Copy, ValueEnum)]
enum PatternName {
    Benefit,
    Special,
    #[value(name = "speedup2x3")]
    Speedup2x3,
}

#[derive(Clone, Copy, ValueEnum)]
enum GraphChoice {
    Enhanced,
    Flow,
}

#[derive(Clone, Copy, ValueEnum)]
enum SchedulerChoice {
    MwssRand,
    MwssExact,
    FanoutSplit,
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    Coding,
    Acceptance,
    All,
}

/// A command's result: the JSON body, plus an optional human table that
/// replaces it on stdout.
struct Output {
    body: Value,
    table: Option<String>,
    ok: bool,
}

impl Output {
    fn json(body: Value) -> Self {
        Output { body, table: None, ok: true }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(out) => {
            if let Some(path) = &cli.json {
                if let Err(e) = write_file(path, &pretty(&out.body)) {
                    return fail(&e);
                }
            }
            match &out.table {
                Some(t) => emit(t),
                None => emit(&format!("{}\n", pretty(&out.body))),
            }
            if out.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(e) => fail(&e),
    }
}

fn fail(e: &anyhow::Error) -> ExitCode {
    let causes: Vec<String> = e.chain().map(|c| c.to_string()).collect();
    eprintln!("error: {e:#}");
    emit(&format!(
        "{}\n",
        pretty(&json!({"schema": SCHEMA, "error": {"message": format!("{e:#}"), "causes": causes}}))
    ));
    ExitCode::FAILURE
}

/// Ignores write failures so a closed pipe ends the program quietly.
fn emit(text: &str) {
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("JSON values serialize")
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn with_schema(mut v: Value) -> Value {
    if let Value::Object(m) = &mut v {
        m.insert("schema".into(), SCHEMA.into());
    }
    v
}

fn load(path: &Path) -> Result<TrafficPattern> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_pattern(&text).with_context(|| format!("parsing {}", path.display()))
}

fn execute(cli: &Cli) -> Result<Output> {
    match &cli.command {
        Command::Gen(args) => gen(args),
        Command::Analyze { pattern, graph } => analyze(&load(pattern)?, *graph),
        Command::Region { pattern } => region(&load(pattern)?),
        Command::Speedup { pattern, exact_region } => speedup(&load(pattern)?, *exact_region),
        Command::Schedule { pattern, speedup } => {
            let tp = load(pattern)?;
            let s = offline_schedule(&tp, *speedup)?;
            Ok(Output::json(with_schema(s.to_json(&tp))))
        }
        Command::Simulate { pattern, alpha, sim, trace } => {
            let mut config = sim_config(load(pattern)?, *alpha, sim, cli.seed)?;
            config.trace = trace.is_some();
            let mut m = sim::run(&config)?;
            if let (Some(path), Some(t)) = (trace, m.trace.take()) {
                write_file(path, &t)?;
            }
            if let Some(path) = &cli.csv {
                let row = SweepRow {
                    alpha: m.alpha,
                    scheduler: m.scheduler.clone(),
                    mean_delay: m.mean_delay,
                    throughput: m.throughput,
                    max_vq: m.max_vq,
                    stable: m.stable,
                };
                write_file(path, &sim::sweep_csv(&[row]))?;
            }
            let mut body = json!({"config": config, "metrics": m});
            body["config"]["pattern"] = pattern_to_value(&config.pattern);
            Ok(Output::json(with_schema(body)))
        }
        Command::Sweep { pattern, alpha_grid, sim, sequential } => {
            let config = sim_config(load(pattern)?, 0.0, sim, cli.seed)?;
            let grid = parse_grid(alpha_grid)?;
            let exec = if *sequential { Exec::Sequential } else { Exec::default() };
            let rows = sim::sweep(&config, &grid, exec)?;
            if let Some(path) = &cli.csv {
                write_file(path, &sim::sweep_csv(&rows))?;
            }
            Ok(Output::json(json!({"schema": SCHEMA, "scheduler": config.scheduler.name(), "rows": rows})))
        }
        Command::Verify { suite } => Ok(verify_suite(*suite)),
    }
}

fn gen(args: &GenArgs) -> Result<Output> {
    let tp = match args.pattern {
        PatternName::Special => special_rate_point(args.n)?,
        PatternName::Speedup2x3 => speedup_pattern_2x3(),
        PatternName::Benefit => {
            let rates = if args.rates.is_empty() {
                vec![Rational::new(1, 2 * args.n as i128); args.n]
            } else {
                args.rates.clone()
            };
            benefit_pattern(args.n, args.r0, &rates)?
        }
    };
    Ok(Output::json(with_schema(pattern_to_value(&tp))))
}

fn labelled(g: &ConflictGraph, s: VertexSet) -> Vec<String> {
    members(s).map(|v| g.label(v).to_string()).collect()
}

fn decomposition_json(g: &ConflictGraph, d: &StableSetDecomposition) -> Value {
    d.terms.iter().map(|(w, s)| json!({"weight": w, "set": labelled(g, *s)})).collect()
}

fn analyze(tp: &TrafficPattern, choice: GraphChoice) -> Result<Output> {
    let g = match choice {
        GraphChoice::Enhanced => build_enhanced_conflict_graph(tp)?,
        GraphChoice::Flow => build_flow_conflict_graph(tp)?,
    };
    let cliques: Vec<Vec<String>> =
        maximal_cliques(&g, DEFAULT_ENUMERATION_LIMIT)?.into_iter().map(|q| labelled(&g, q)).collect();
    // too large for the exact check: report null rather than guess
    let perfect = is_perfect(&g, DEFAULT_PERFECTION_LIMIT).ok();
    let hole =
        find_odd_hole(&g, HOLE_SEARCH_LEN).map(|h| h.iter().map(|&v| g.label(v).to_string()).collect::<Vec<_>>());
    Ok(Output::json(json!({
        "schema": SCHEMA,
        "graph": match choice { GraphChoice::Enhanced => "enhanced", GraphChoice::Flow => "flow" },
        "vertices": g.n(),
        "edges": g.edge_count(),
        "labels": (0..g.n()).map(|v| g.label(v).to_string()).collect::<Vec<_>>(),
        "maximal_cliques": cliques,
        "perfect": perfect,
        "odd_hole": hole,
    })))
}

fn region(tp: &TrafficPattern) -> Result<Output> {
    let g = build_enhanced_conflict_graph(tp)?;
    let rates = ncswitch::traffic::enhanced_rate_vector(tp).rates;
    let violation = qstab_membership(&g, &rates)?;
    let stab = stab_membership(&g, &rates)?;
    let violation = violation.map(|v| match v {
        QstabViolation::Negative { vertex } => json!({"negative": g.label(vertex).to_string()}),
        QstabViolation::Clique { clique, sum } => {
            json!({"clique": clique.iter().map(|&v| g.label(v).to_string()).collect::<Vec<_>>(), "sum": sum})
        }
    });
    Ok(Output::json(json!({
        "schema": SCHEMA,
        "admissible": is_admissible(tp),
        "in_qstab": violation.is_none(),
        "in_stab": stab.member,
        "chi_f": stab.chi.value,
        "decomposition": decomposition_json(&g, &stab.chi.decomposition),
        "qstab_violation": violation,
    })))
}

fn speedup(tp: &TrafficPattern, exact_region: bool) -> Result<Output> {
    let g = build_enhanced_conflict_graph(tp)?;
    let rep = speedup_for_rate(tp)?;
    let mut body = json!({
        "schema": SCHEMA,
        "chi_f": rep.value,
        "rate_point": rep.rate_point,
        "decomposition": decomposition_json(&g, &rep.decomposition),
    });
    if exact_region {
        let worst = min_speedup_exact(tp, GraphKind::Enhanced, Exec::Sequential)?;
        body["region"] = json!({"speedup": worst.value, "rate_point": worst.rate_point});
    }
    Ok(Output::json(body))
}

fn sim_config(tp: TrafficPattern, alpha: f64, a: &SimArgs, seed: u64) -> Result<SimConfig> {
    let kind = match a.scheduler {
        SchedulerChoice::MwssExact => SchedulerKind::MwssExact,
        SchedulerChoice::MwssRand => SchedulerKind::MwssRandomized { candidates: a.candidates },
        SchedulerChoice::FanoutSplit => SchedulerKind::FanoutSplitting { candidates: a.candidates },
    };
    let mut c = SimConfig::new(tp, alpha, kind, a.horizon, seed);
    c.speedup = a.speedup;
    if let Some(delta) = a.delta {
        if !kind.is_coded() {
            bail!("--delta applies to the coded schedulers only");
        }
        c = c.with_batching(delta, a.eps);
    }
    Ok(c)
}

/// Table lines leave out timings so repeated runs print the same thing;
/// timings go to stderr.
fn verify_suite(suite: Suite) -> Output {
    let results: Vec<CriterionResult> = match suite {
        Suite::Coding => vec![verify::criterion_9()],
        Suite::Acceptance | Suite::All => verify::run_all(),
    };
    let mut table = String::new();
    for r in &results {
        let tag = match r.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skip => "SKIP",
        };
        table.push_str(&format!("{tag}  AC-{:<2} {:<36} {}\n", r.id, r.name, r.detail));
        eprintln!("AC-{}: {:.2}s (budget {}s)", r.id, r.seconds, r.budget_seconds);
    }
    let failed = results.iter().filter(|r| !r.passed()).count();
    table.push_str(&format!("{} passed, {failed} failed\n", results.len() - failed));
    let rows: Vec<Value> =
        results.iter().map(|r| json!({"id": r.id, "name": r.name, "status": r.status, "detail": r.detail})).collect();
    let body = json!({"schema": SCHEMA, "passed": results.len() - failed, "failed": failed, "criteria": rows});
    Output { body, table: Some(table), ok: failed == 0 }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn error_for_a_missing_file_names_it() {
        let e = load(Path::new("/nonexistent/p.json")).unwrap_err();
        assert!(format!("{e:#}").contains("/nonexistent/p.json"));
    }

    #[test]
    fn batching_is_rejected_for_the_uncoded_switch() {
        let a = SimArgs {
            scheduler: SchedulerChoice::FanoutSplit,
            candidates: 4,
            delta: Some(10),
            eps: Rational::new(1, 200),
            horizon: 10,
            speedup: Rational::ONE,
        };
        assert!(sim_config(speedup_pattern_2x3(), 0.5, &a, 1).is_err());
    }
}
