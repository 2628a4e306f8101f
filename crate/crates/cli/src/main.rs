mod args;
mod report;

use std::fs;
use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use serde::Serialize;
use worm_core::check::Check;
use worm_core::estimators::{
    estimate_correlation, estimate_susceptibility, median_of_replicas, plan_correlation,
    plan_susceptibility, replica_count, replica_plan, single_rng, Estimate, EstimatorError,
    MedianEstimate, Provenance, Target,
};
use worm_core::exact::{verify_suite, Caps, ExactOracle, OracleError};
use worm_core::graph::{generate, parse_graph};
use worm_core::paths::{
    congestion, reconstruction_failures, CongestionReport, PathError, TransitionLoad,
};
use worm_core::spectral::{theorem1, ChainMatrix, SpectralCaps, SpectralError};
use worm_core::{ChainParams, Graph, WormChain, WormState};

use args::{Cli, Command, Common, CongestionArgs, EstimateArgs, SampleArgs, SpectralArgs};
use report::{open_output, write_json, GraphInfo, Header, Report};

/// How a run ended, mapped onto the exit-code contract.
#[derive(Debug)]
enum Failure {
    /// Bad input or configuration: exit 2.
    Usage(String),
    /// A checked identity or bound did not hold: exit 1.
    Violation(String),
}

impl Failure {
    fn usage(e: impl std::fmt::Display) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Usage(format!("i/o error: {e}"))
    }
}

impl From<OracleError> for Failure {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::TooLarge { .. } => Failure::Usage(format!(
                "{e}; raise --max-edges/--max-vertices or use a smaller graph"
            )),
            OracleError::Mismatch(_)
            | OracleError::CrossCheckMismatch { .. }
            | OracleError::BoundViolation(_)
            | OracleError::BijectionViolation(_) => Failure::Violation(e.to_string()),
            other => Failure::Usage(other.to_string()),
        }
    }
}

impl From<SpectralError> for Failure {
    fn from(e: SpectralError) -> Self {
        match e {
            SpectralError::Oracle(inner) => inner.into(),
            SpectralError::BoundViolation(_) | SpectralError::NotIrreducible(_) => {
                Failure::Violation(e.to_string())
            }
            SpectralError::TooLarge { .. } => {
                Failure::Usage(format!("{e}; raise --max-states or use a smaller graph"))
            }
            SpectralError::IterationCap { .. } => {
                Failure::Usage(format!("{e}; raise --max-iterations"))
            }
            other => Failure::Usage(other.to_string()),
        }
    }
}

impl From<PathError> for Failure {
    fn from(e: PathError) -> Self {
        match e {
            PathError::Oracle(inner) => inner.into(),
            PathError::TooLarge { .. } => {
                Failure::Usage(format!("{e}; raise --budget or use a smaller graph"))
            }
            other => Failure::Violation(other.to_string()),
        }
    }
}

impl From<EstimatorError> for Failure {
    fn from(e: EstimatorError) -> Self {
        let hint = match e {
            EstimatorError::ZeroSampleFraction(_) => "; increase --samples",
            EstimatorError::DistanceExceedsK { .. } => "; raise --k",
            _ => "",
        };
        Failure::Usage(format!("{e}{hint}"))
    }
}

struct Context {
    graph: Graph,
    info: GraphInfo,
    params: ChainParams,
    seed: u64,
    caps: Caps,
}

impl Context {
    fn resolve(c: &Common) -> Result<Self, Failure> {
        let (graph, source) = match (&c.source.graph, c.source.kind) {
            (Some(path), None) => {
                if !c.source.dims.is_empty() {
                    return Err(Failure::usage("unexpected dimensions after --graph FILE"));
                }
                let text = fs::read_to_string(path)
                    .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
                let g = parse_graph(&text)
                    .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
                (g, path.display().to_string())
            }
            (None, Some(kind)) => {
                let g = generate(kind, &c.source.dims).map_err(|e| {
                    Failure::Usage(format!("{e}; try --gen cycle N, --gen grid R C"))
                })?;
                let dims: Vec<String> = c.source.dims.iter().map(|d| d.to_string()).collect();
                (g, format!("{} {}", kind_name(kind), dims.join(" ")))
            }
            _ => {
                return Err(Failure::usage(
                    "give exactly one of --graph FILE or --gen KIND DIMS",
                ))
            }
        };
        let params = match (c.temperature.beta, c.temperature.x) {
            (Some(beta), None) => ChainParams::from_beta(beta),
            (None, Some(x)) => ChainParams::from_x(x),
            _ => return Err(Failure::usage("give exactly one of --beta or --x")),
        }
        .map_err(|e| Failure::Usage(format!("{e}; beta must be positive, x in (0, 1)")))?;
        let info = GraphInfo::new(&graph, source);
        Ok(Context {
            graph,
            info,
            params,
            seed: c.seed.unwrap_or_else(rand::random),
            caps: Caps {
                max_edges: c.max_edges,
                max_vertices: c.max_vertices,
            },
        })
    }

    fn header(&self, command: &'static str) -> Header<'_> {
        Header {
            tool: "worm",
            version: env!("CARGO_PKG_VERSION"),
            command,
            graph: &self.info,
            params: self.params,
            seed: self.seed,
        }
    }

    fn emit<T: Serialize>(
        &self,
        c: &Common,
        command: &'static str,
        body: T,
        pass: bool,
    ) -> Result<bool, Failure> {
        let report = Report {
            header: self.header(command),
            body,
            pass,
        };
        write_json(c.output.as_deref(), &report)?;
        Ok(pass)
    }
}

fn kind_name(kind: worm_core::GraphKind) -> &'static str {
    match kind {
        worm_core::GraphKind::Cycle => "cycle",
        worm_core::GraphKind::Path => "path",
        worm_core::GraphKind::Complete => "complete",
        worm_core::GraphKind::Grid => "grid",
    }
}

#[derive(Serialize)]
struct VerifyBody {
    checks: Vec<Check>,
    failures: usize,
}

fn verify(c: &Common) -> Result<bool, Failure> {
    let ctx = Context::resolve(c)?;
    let report = verify_suite(&ctx.graph, ctx.params.beta(), ctx.caps)?;
    let pass = report.pass();
    let failures = report.checks.iter().filter(|c| !c.pass).count();
    ctx.emit(
        c,
        "verify",
        VerifyBody {
            checks: report.checks,
            failures,
        },
        pass,
    )
}

#[derive(Serialize)]
struct PairValue {
    u: usize,
    v: usize,
    distance: usize,
    value: f64,
}

#[derive(Serialize)]
struct ExactBody {
    chi: f64,
    pi_c0: f64,
    partition_function: f64,
    cycle_space_size: usize,
    correlations: Vec<PairValue>,
}

fn exact(c: &Common) -> Result<bool, Failure> {
    let ctx = Context::resolve(c)?;
    let g = &ctx.graph;
    let oracle = ExactOracle::new(g, false, ctx.caps)?;
    let beta = ctx.params.beta();
    let chi = oracle.susceptibility(beta)?;
    let dist = g.distance_matrix();
    let mut correlations = Vec::new();
    for (u, row) in dist.iter().enumerate() {
        for (v, &distance) in row.iter().enumerate().skip(u + 1) {
            correlations.push(PairValue {
                u: u + 1,
                v: v + 1,
                distance,
                value: oracle.two_point(beta, u, v)?,
            });
        }
    }
    let ps = oracle.table().measure(ctx.params.x());
    let body = ExactBody {
        chi,
        pi_c0: ps.pi_c0(),
        partition_function: ps.partition_function(),
        cycle_space_size: oracle.table().c0().len(),
        correlations,
    };
    ctx.emit(c, "exact", body, true)
}

fn sample(a: &SampleArgs) -> Result<bool, Failure> {
    let ctx = Context::resolve(&a.common)?;
    let g = &ctx.graph;
    if a.every == 0 || a.dump_every == Some(0) {
        return Err(Failure::usage("--every and --dump-every must be positive"));
    }
    let mut out = open_output(a.common.output.as_deref())?;
    writeln!(
        out,
        "# worm {} sample graph={} sha256={} n={} m={} beta={} x={} seed={} steps={}",
        env!("CARGO_PKG_VERSION"),
        ctx.info.source,
        ctx.info.sha256,
        g.n(),
        g.m(),
        ctx.params.beta(),
        ctx.params.x(),
        ctx.seed,
        a.steps
    )?;
    writeln!(out, "# t |A| class")?;
    let write_record = |t: u64, s: &WormState, out: &mut dyn Write| -> std::io::Result<()> {
        write!(out, "{t} {} {}", s.edges().len(), s.class())?;
        if a.dump_every.is_some_and(|k| t.is_multiple_of(k)) {
            write!(out, " {}", s.dump(g))?;
        }
        writeln!(out)
    };
    let chain = WormChain::new(g, ctx.params);
    let mut rng = single_rng(ctx.seed);
    let mut status = Ok(());
    write_record(0, &WormState::zero(g), &mut out)?;
    chain.run(WormState::zero(g), a.steps, &mut rng, |t, s| {
        if status.is_ok() && t.is_multiple_of(a.every) {
            status = write_record(t, s, &mut out);
        }
    });
    status?;
    out.flush()?;
    Ok(true)
}

#[derive(Serialize)]
#[serde(untagged)]
enum EstimateBody {
    Single {
        target: Target,
        value: f64,
        std_error: Option<f64>,
        provenance: Provenance,
        estimate: Estimate,
    },
    Median {
        target: Target,
        value: f64,
        provenance: Provenance,
        replica_count: usize,
        median: MedianEstimate,
    },
}

fn parse_target(words: &[String], g: &Graph) -> Result<Target, Failure> {
    let label = |s: &str| -> Result<usize, Failure> {
        let v: usize = s
            .parse()
            .map_err(|_| Failure::Usage(format!("bad vertex label {s:?}")))?;
        if v == 0 || v > g.n() {
            return Err(Failure::Usage(format!("vertex {v} outside 1..={}", g.n())));
        }
        Ok(v - 1)
    };
    match words {
        [t] if t == "chi" => Ok(Target::Chi),
        [t, u, v] if t == "corr" => {
            let (u, v) = (label(u)?, label(v)?);
            if u == v {
                return Err(Failure::usage("corr needs two distinct vertices"));
            }
            Ok(Target::Corr { u, v })
        }
        _ => Err(Failure::usage("--target takes `chi` or `corr U V`")),
    }
}

fn estimate(a: &EstimateArgs) -> Result<bool, Failure> {
    let ctx = Context::resolve(&a.common)?;
    let g = &ctx.graph;
    let target = parse_target(&a.target, g)?;
    let overrides = |plan: worm_core::EstimatorPlan| plan.with_overrides(a.tau, a.samples);
    let provenance = |plan: &worm_core::EstimatorPlan| {
        if plan.is_analytic() {
            Provenance::Analytic
        } else {
            Provenance::Manual
        }
    };
    let count = match (a.eta, a.replicas) {
        (Some(eta), _) => Some(replica_count(eta)?),
        (None, Some(r)) if r > 0 => Some(r),
        (None, Some(_)) => return Err(Failure::usage("--replicas must be positive")),
        (None, None) => None,
    };
    let body = match count {
        None => {
            let plan = overrides(match target {
                Target::Chi => plan_susceptibility(g, a.epsilon, a.delta)?,
                Target::Corr { u, v } => {
                    let k = match a.k {
                        Some(k) => k,
                        None => g.distance(u, v).map_err(Failure::usage)?,
                    };
                    plan_correlation(g, a.epsilon, a.delta, k, ctx.params.x())?
                }
            });
            let mut rng = single_rng(ctx.seed);
            let est = match target {
                Target::Chi => estimate_susceptibility(g, ctx.params, &plan, &mut rng)?,
                Target::Corr { u, v } => {
                    estimate_correlation(g, ctx.params, u, v, &plan, &mut rng)?
                }
            };
            EstimateBody::Single {
                target: label_target(target),
                value: est.value,
                std_error: est.std_error,
                provenance: provenance(&plan),
                estimate: est,
            }
        }
        Some(count) => {
            let plan = overrides(replica_plan(g, ctx.params, target, a.epsilon, a.k)?);
            let mut med = median_of_replicas(g, ctx.params, target, &plan, count, ctx.seed)?;
            med.eta = a.eta;
            EstimateBody::Median {
                target: label_target(target),
                value: med.value,
                provenance: provenance(&plan),
                replica_count: count,
                median: med,
            }
        }
    };
    ctx.emit(&a.common, "estimate", body, true)
}

/// Target with 1-based labels for output.
fn label_target(t: Target) -> Target {
    match t {
        Target::Chi => Target::Chi,
        Target::Corr { u, v } => Target::Corr { u: u + 1, v: v + 1 },
    }
}

#[derive(Serialize)]
struct MixTime {
    delta: f64,
    from_zero: usize,
    worst: usize,
}

#[derive(Serialize)]
struct MixBound {
    delta: f64,
    from_zero: f64,
    worst: f64,
}

#[derive(Serialize)]
struct SpectralBody {
    states: usize,
    lambda_star: f64,
    t_rel: f64,
    t_rel_bound: f64,
    mix_times: Vec<MixTime>,
    mix_bounds: Vec<MixBound>,
}

fn spectral(a: &SpectralArgs) -> Result<bool, Failure> {
    let ctx = Context::resolve(&a.common)?;
    if a.deltas.iter().any(|&d| !(d > 0.0 && d < 1.0)) {
        return Err(Failure::usage("every --delta must lie in (0, 1)"));
    }
    let caps = SpectralCaps {
        max_states: a.max_states,
        max_tv_iterations: a.max_iterations,
        enumeration: ctx.caps,
    };
    let cm = ChainMatrix::build(&ctx.graph, ctx.params, caps)?;
    let r = theorem1(&ctx.graph, &cm, &a.deltas, caps.max_tv_iterations)?;
    let body = SpectralBody {
        states: cm.len(),
        lambda_star: r.lambda_star,
        t_rel: r.t_rel,
        t_rel_bound: r.t_rel_bound,
        mix_times: r
            .mixing
            .iter()
            .map(|m| MixTime {
                delta: m.delta,
                from_zero: m.mix_zero,
                worst: m.mix_worst,
            })
            .collect(),
        mix_bounds: r
            .mixing
            .iter()
            .map(|m| MixBound {
                delta: m.delta,
                from_zero: m.mix_zero_bound,
                worst: m.mix_worst_bound,
            })
            .collect(),
    };
    ctx.emit(&a.common, "spectral", body, r.pass)
}

#[derive(Serialize)]
struct CongestionBody {
    #[serde(flatten)]
    report: CongestionReport,
    reconstruction_failures: usize,
}

fn write_csv(path: &std::path::Path, table: &[TransitionLoad]) -> std::io::Result<()> {
    let mut out = open_output(Some(path))?;
    writeln!(out, "from,edge,prob,load,pairs")?;
    for t in table {
        writeln!(
            out,
            "\"{}\",{},{},{},{}",
            t.from, t.edge, t.prob, t.load, t.pairs
        )?;
    }
    out.flush()
}

fn congestion_cmd(a: &CongestionArgs) -> Result<bool, Failure> {
    let ctx = Context::resolve(&a.common)?;
    let mut report = congestion(&ctx.graph, ctx.params, a.budget, ctx.caps)?;
    let failures = reconstruction_failures(&ctx.graph, a.budget, ctx.caps)?;
    if let Some(path) = &a.csv {
        write_csv(path, &report.table)?;
    }
    report.table.clear();
    let pass = report.pass && failures == 0;
    let body = CongestionBody {
        report,
        reconstruction_failures: failures,
    };
    ctx.emit(&a.common, "congestion", body, pass)
}

fn configure_threads() -> Result<(), Failure> {
    if let Ok(value) = std::env::var("WORM_THREADS") {
        let n: usize = value
            .parse()
            .map_err(|_| Failure::Usage(format!("WORM_THREADS={value:?} is not a thread count")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(Failure::usage)?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<bool, Failure> {
    configure_threads()?;
    match &cli.command {
        Command::Verify(a) => verify(&a.common),
        Command::Exact(c) => exact(c),
        Command::Sample(a) => sample(a),
        Command::Estimate(a) => estimate(a),
        Command::Spectral(a) => spectral(a),
        Command::Congestion(a) => congestion_cmd(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Violation(msg)) => {
            eprintln!("violation: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
