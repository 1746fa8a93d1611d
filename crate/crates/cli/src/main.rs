//! `ghzctx`: certify GHZ-type paradox graphs, extract rays, screen strongly
//! regular graphs and simulate the photonic experiment.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use ghz_paradox::contextuality::{certify_ghz_graph, context_cover, Bounds, Verdict};
use ghz_paradox::graph::{
    adjacency_spectrum, chromatic_number_with_budget, clique_number, independence_number_with_budget, is_srg,
    named_graph, ChromaticOutcome, Graph, NamedGraph,
};
use ghz_paradox::lovasz::{
    closed_form_perkel_gram, default_tolerance, extract_rays, gram_rank, handle_probabilities, lovasz_theta,
    write_rays_csv, GramMatrix, RaySet, DEFAULT_MAX_ITERATIONS, DEFAULT_RANK_THRESHOLD,
};
use ghz_paradox::photonics::{run_experiment, SimConfig, SubspacePlan};
use ghz_paradox::srg::screen_three_context;
use ghz_paradox::Error;
use serde_json::json;

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_RESOURCE: u8 = 3;
/// Node budget for exact invariants shown by `graph-info`.
const INFO_BUDGET: u64 = 5_000_000;

#[derive(Parser)]
#[command(name = "ghzctx", version, about = "GHZ-type contextuality toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print exact invariants and the spectrum of a graph.
    GraphInfo(GraphArgs),
    /// Compute the Lovász theta number with a duality certificate.
    Theta(ThetaArgs),
    /// Check whether a graph hosts a GHZ-type paradox with n contexts.
    Certify(CertifyArgs),
    /// Extract the ray realization from the optimal Gram matrix.
    Rays(ThetaArgs),
    /// Screen triangle-free strongly regular graphs for three-context paradoxes.
    ScreenSrg(ScreenArgs),
    /// Simulate the noisy prepare-and-measure campaign.
    Simulate(SimulateArgs),
}

#[derive(Args)]
struct GraphArgs {
    /// Fixture name (pentagon, perkel-complement, ...) or an edge-list file.
    #[arg(long)]
    graph: String,
    /// Directory for output files.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ThetaArgs {
    #[command(flatten)]
    graph: GraphArgs,
    /// Absolute duality-gap tolerance.
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Args)]
struct CertifyArgs {
    #[command(flatten)]
    theta: ThetaArgs,
    /// Number of complete contexts.
    #[arg(long)]
    contexts: usize,
}

#[derive(Args)]
struct ScreenArgs {
    /// Largest common-neighbour count c to screen.
    #[arg(long, default_value_t = 100)]
    c_max: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long, default_value = "perkel-complement")]
    graph: String,
    #[arg(long, default_value_t = 3)]
    contexts: usize,
    /// Key-value configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write per-trial traces.
    #[arg(long)]
    emit_traces: bool,
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::BudgetExhausted { .. }
            | Error::TooLarge { .. }
            | Error::RetryBudget(_)
            | Error::Calibration(_)
            | Error::Decomposition(_) => EXIT_RESOURCE,
            _ => EXIT_USAGE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

type Outcome = Result<u8, Failure>;

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

/// Writes to stdout; a closed pipe ends the process quietly.
macro_rules! out {
    ($($arg:tt)*) => {{
        use std::io::Write;
        if let Err(e) = write!(std::io::stdout().lock(), $($arg)*) {
            if e.kind() == std::io::ErrorKind::BrokenPipe {
                std::process::exit(0);
            }
            panic!("failed writing to stdout: {e}");
        }
    }};
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::GraphInfo(a) => graph_info(a),
        Command::Theta(a) => theta(a),
        Command::Certify(a) => certify(a),
        Command::Rays(a) => rays(a),
        Command::ScreenSrg(a) => screen(a),
        Command::Simulate(a) => simulate(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn load(spec: &str) -> Result<Graph, Failure> {
    if let Ok(name) = NamedGraph::from_str(spec) {
        return Ok(named_graph(&name)?);
    }
    let path = Path::new(spec);
    if !path.exists() {
        return Err(usage(format!("`{spec}` is neither a known graph nor a file")));
    }
    let text = fs::read_to_string(path).map_err(|e| usage(format!("{spec}: {e}")))?;
    let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or(spec).to_string();
    Ok(Graph::from_edge_list(&text)
        .map_err(|e| usage(format!("{spec}: {e}")))?
        .with_name(name))
}

fn tolerance(tol: Option<f64>, g: &Graph) -> Result<f64, Failure> {
    match tol {
        Some(t) if !(t > 0.0 && t.is_finite()) => Err(usage(format!("--tol must be positive, got {t}"))),
        Some(t) => Ok(t),
        None => Ok(default_tolerance(g.vertex_count())),
    }
}

/// Writes `contents` to `dir/name` when an output directory was given.
fn emit(dir: Option<&Path>, name: &str, contents: &str) -> Result<(), Failure> {
    if let Some(dir) = dir {
        fs::create_dir_all(dir).map_err(|e| usage(format!("{}: {e}", dir.display())))?;
        let path = dir.join(name);
        fs::write(&path, contents).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    }
    Ok(())
}

fn pretty(value: &serde_json::Value) -> String {
    serde_json::to_string_pretty(value).expect("JSON values serialize") + "\n"
}

fn graph_info(a: GraphArgs) -> Outcome {
    let g = load(&a.graph)?;
    let n = g.vertex_count();
    let exact = |r: Result<usize, Error>| match r {
        Ok(v) => json!(v),
        Err(Error::BudgetExhausted { .. } | Error::TooLarge { .. }) => json!(null),
        Err(e) => json!(e.to_string()),
    };
    let chi = |h: &Graph| {
        exact(chromatic_number_with_budget(h, n, INFO_BUDGET).map(|c| match c {
            ChromaticOutcome::Exact(c) => c.color_count,
            ChromaticOutcome::ExceedsLimit { upper_limit } => upper_limit + 1,
        }))
    };
    let complement = g.complement();
    let spectrum = adjacency_spectrum(&g)?;
    let info = json!({
        "schema_version": ghz_paradox::SCHEMA_VERSION,
        "graph": g.name().unwrap_or(&a.graph),
        "vertices": n,
        "edges": g.edge_count(),
        "regular_degree": g.regular_degree(),
        "triangles": g.triangle_count(),
        "independence_number": exact(independence_number_with_budget(&g, INFO_BUDGET).map(|s| s.size)),
        "clique_number": exact(clique_number(&g).map(|s| s.size)),
        "chromatic_number": chi(&g),
        "complement_chromatic_number": chi(&complement),
        "srg": is_srg(&g),
        "eigenvalues": spectrum.eigenvalues,
        "multiplicities": spectrum.multiplicities,
    });
    let show = |key: &str, v: &serde_json::Value| match (key, v.is_null()) {
        ("regular_degree", true) => "not regular".to_string(),
        (_, true) => "budget exhausted".to_string(),
        _ => v.to_string(),
    };
    out!("graph                        {}\n", info["graph"].as_str().unwrap_or_default());
    for key in [
        "vertices",
        "edges",
        "regular_degree",
        "triangles",
        "independence_number",
        "clique_number",
        "chromatic_number",
        "complement_chromatic_number",
    ] {
        out!("{key:<28} {}\n", show(key, &info[key]));
    }
    let spectrum_line: Vec<String> = spectrum
        .eigenvalues
        .iter()
        .zip(&spectrum.multiplicities)
        .map(|(&e, m)| format!("{:.6}^{m}", if e.abs() < 5e-7 { 0.0 } else { e }))
        .collect();
    out!("{:<28} {}\n", "spectrum", spectrum_line.join(" "));
    if let Some(p) = is_srg(&g) {
        out!("{:<28} ({}, {}, {}, {})\n", "srg", p.n, p.k, p.a, p.c);
    }
    emit(a.out.as_deref(), "graph_info.json", &pretty(&info))?;
    Ok(0)
}

fn theta(a: ThetaArgs) -> Outcome {
    let g = load(&a.graph.graph)?;
    let tol = tolerance(a.tol, &g)?;
    let cert = lovasz_theta(&g, tol, DEFAULT_MAX_ITERATIONS)?;
    let mut doc = serde_json::to_value(cert.to_json()).expect("certificate serializes");
    doc["theta"] = json!(cert.value());
    let text = pretty(&doc);
    out!("{text}");
    emit(a.graph.out.as_deref(), "theta.json", &text)?;
    Ok(if cert.converged { 0 } else { EXIT_RESOURCE })
}

fn certify(a: CertifyArgs) -> Outcome {
    let g = load(&a.theta.graph.graph)?;
    let tol = tolerance(a.theta.tol, &g)?;
    let report = certify_ghz_graph(&g, a.contexts, tol)?;
    let text = pretty(&report.to_json());
    out!("{text}");
    emit(a.theta.graph.out.as_deref(), "certificate.json", &text)?;
    eprintln!("verdict: {:?}", report.verdict);
    Ok(match report.verdict {
        Verdict::Pass => 0,
        Verdict::Fail => EXIT_FAIL,
        Verdict::Inconclusive => EXIT_RESOURCE,
    })
}

/// Unit-diagonal Gram matrix of an optimal orthonormal representation: the
/// exact closed form for the 57-event graph, the SDP witness otherwise.
fn optimal_gram(g: &Graph, tol: f64) -> Result<GramMatrix, Failure> {
    if *g == named_graph(&NamedGraph::PerkelComplement)? {
        return Ok(closed_form_perkel_gram()?);
    }
    let cert = lovasz_theta(g, tol, DEFAULT_MAX_ITERATIONS)?;
    if !cert.converged {
        return Err(Failure {
            code: EXIT_RESOURCE,
            message: format!("theta did not converge to {tol:e}; gap {:.3e}", cert.gap),
        });
    }
    Ok(cert.primal.to_unit_diagonal()?)
}

fn rays(a: ThetaArgs) -> Outcome {
    let g = load(&a.graph.graph)?;
    let tol = tolerance(a.tol, &g)?;
    let gram = optimal_gram(&g, tol)?;
    let rs = extract_rays(&gram, &g)?;
    let csv = write_rays_csv(&rs);
    let report = json!({
        "schema_version": ghz_paradox::SCHEMA_VERSION,
        "rays": rs.len(),
        "dimension": rs.dimension(),
        "rank": gram_rank(&gram, DEFAULT_RANK_THRESHOLD),
        "exclusive_pairs": g.edge_count(),
        "max_exclusive_overlap": rs.max_edge_overlap(&g),
        "reconstruction_error": rs.reconstruction_error,
        "pivots": rs.pivots,
        "handle_probabilities": handle_probabilities(&rs),
    });
    match a.graph.out.as_deref() {
        Some(dir) => {
            emit(Some(dir), "rays.csv", &csv)?;
            emit(Some(dir), "rays_report.json", &pretty(&report))?;
            out!("{}", pretty(&report));
        }
        None => {
            out!("{csv}");
            eprint!("{}", pretty(&report));
        }
    }
    Ok(0)
}

fn screen(a: ScreenArgs) -> Outcome {
    let report = screen_three_context(a.c_max)?;
    out!("{}", report.to_table());
    let doc = serde_json::to_value(&report).expect("report serializes");
    emit(a.out.as_deref(), "screen.json", &pretty(&doc))?;
    Ok(if report.survivors == 0 { 0 } else { EXIT_FAIL })
}

/// Splits `dimension` into blocks of at most seven pulses.
fn even_blocks(dimension: usize) -> Vec<usize> {
    let blocks = dimension.div_ceil(7);
    (0..blocks)
        .map(|b| dimension / blocks + usize::from(b < dimension % blocks))
        .collect()
}

fn simulate_rays(g: &Graph, tol: f64) -> Result<RaySet, Failure> {
    let gram = optimal_gram(g, tol)?;
    Ok(extract_rays(&gram, g)?)
}

fn simulate(a: SimulateArgs) -> Outcome {
    let mut cfg = match &a.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
            SimConfig::parse(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?
        }
        None => SimConfig::default(),
    };
    if let Some(t) = a.trials {
        cfg.trials = t;
    }
    if let Some(s) = a.seed {
        cfg.seed = s;
    }
    let g = load(&a.graph)?;
    let tol = tolerance(a.tol, &g)?;
    let rs = simulate_rays(&g, tol)?;
    if cfg.plan.dimension() != rs.dimension() {
        if a.config.is_some() {
            return Err(usage(format!(
                "block sizes cover {} dimensions but the rays live in {}",
                cfg.plan.dimension(),
                rs.dimension()
            )));
        }
        cfg.plan = SubspacePlan::new(even_blocks(rs.dimension()), rs.dimension(), &cfg.kernel)?;
    }
    let cover = context_cover(&g, a.contexts)?;
    let alpha = ghz_paradox::graph::independence_number(&g)?.size as f64;
    let theta = lovasz_theta(&g, tol, DEFAULT_MAX_ITERATIONS)?.value();
    let out = run_experiment(&rs, &g, &cover, Bounds { alpha, theta }, &cfg)?;

    let mut doc = serde_json::to_value(&out.report).expect("report serializes");
    let verdict = if out.report.quantum_agreement && out.report.classical_violation {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    doc["verdict"] = json!(verdict);
    doc["trials"] = json!(cfg.trials);
    doc["seed"] = json!(cfg.seed);
    doc["accepted_draws"] = json!(out.draws.accepted);
    doc["rejected_draws"] = json!(out.draws.rejected);
    doc["metadata"] = serde_json::to_value(cfg.metadata).expect("metadata serializes");
    let text = pretty(&doc);
    out!("{text}");
    let dir = a.out.as_deref();
    emit(dir, "report.json", &text)?;
    emit(dir, "defects.csv", &out.defects.to_csv())?;
    if a.emit_traces {
        if dir.is_none() {
            eprintln!("note: --emit-traces needs --out; traces not written");
        }
        emit(dir, "traces.csv", &out.traces_csv())?;
    }
    Ok(if verdict == Verdict::Pass { 0 } else { EXIT_FAIL })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn even_blocks_cover_the_dimension() {
        for d in 1..100 {
            let b = even_blocks(d);
            assert_eq!(b.iter().sum::<usize>(), d);
            assert!(b.iter().all(|&s| (1..=7).contains(&s)));
        }
    }
}
