//! `supersat`: command-line front end for supersat-core.
//!
//! Exit status: 0 on success, 2 when a campaign finds a counterexample, 1 on
//! usage or runtime errors.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use supersat_core::counting::{
    alpha_exact, alpha_residual_scan, c_bruteforce_detail, c_exact, count_copies,
    count_copies_through_edge, fraction_string, CountLimits,
};
use supersat_core::graph::{
    edge, enumerate_graphs, read_graph, write_graph, write_graph6, Family, Graph, Guardrails,
    VertexPartition,
};
use supersat_core::harness::{resolve_pattern, run_campaign, with_workers, Campaign, CampaignSpec};
use supersat_core::pattern::PatternProfile;
use supersat_core::spectral::{
    check_peel_bounds, check_terminal_bounds, light_edges, peel, spectral_radius, SpectralConfig,
    TerminalReason,
};
use supersat_core::stability::{distance_to_bipartite, distance_to_turan, DistanceMode};
use supersat_core::{Error, Result};

#[derive(Parser, Debug)]
#[command(name = "supersat", version, about = "Spectral supersaturation toolkit")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, global = true, default_value_t = Format::Text)]
    format: Format,
    /// Write output here instead of stdout.
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,
    /// Seed for every randomized step.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for campaigns and enumeration (falls back to SUPERSAT_WORKERS).
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Spectral radius, Perron vector, Phi and light edges of a graph.
    Spectral {
        graph: PathBuf,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Copies of a pattern in a graph, optionally through one edge.
    Count(CountArgs),
    /// The extremal count c(n, F), its leading coefficient and residuals.
    Cnf(CnfArgs),
    /// Chromatic number, good edges, colorings, automorphisms of a pattern.
    Pattern(PatternArgs),
    /// Light-edge peeling trace with the step-wise bound checks.
    Peel {
        graph: PathBuf,
        #[arg(long, default_value_t = 0.5)]
        epsilon: f64,
        /// Density parameter for the checks, in [0.81, 2].
        #[arg(long, default_value_t = 1.2)]
        a: f64,
    },
    /// Build a graph from a named family.
    Construct(ConstructArgs),
    /// Edit distance to the nearest Turán or complete bipartite graph.
    Distance(DistanceArgs),
    /// Run a campaign described by a key = value file.
    Campaign {
        spec: PathBuf,
        #[arg(long)]
        allow_large: bool,
    },
    /// List graphs with m edges on at most max-n vertices, as graph6.
    Enumerate {
        #[arg(long)]
        max_n: usize,
        #[arg(long)]
        m: usize,
        /// All labeled edge sets instead of one graph per isomorphism class.
        #[arg(long)]
        labeled: bool,
        #[arg(long)]
        allow_large: bool,
    },
}

#[derive(Args, Debug)]
struct CountArgs {
    graph: PathBuf,
    /// Registry name or pattern file.
    #[arg(long)]
    pattern: String,
    /// Count only copies through this edge, written `u,v`.
    #[arg(long)]
    edge: Option<String>,
    /// Keep only copies whose sole intra-part edge is `--edge`; parts as `0,1,2;3,4,5`.
    #[arg(long, requires = "edge")]
    parts: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum CnfMethod {
    Formula,
    BruteForce,
    Both,
    Alpha,
    Scan,
}

#[derive(Args, Debug)]
struct CnfArgs {
    #[arg(long)]
    pattern: String,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, value_enum, default_value_t = CnfMethod::Both)]
    method: CnfMethod,
    /// Values of n for `--method scan`, comma separated.
    #[arg(long, value_delimiter = ',')]
    n_values: Vec<usize>,
}

#[derive(Args, Debug)]
struct PatternArgs {
    /// Registry name, or a file if no such name exists.
    #[arg(long, conflicts_with = "file")]
    name: Option<String>,
    #[arg(long)]
    file: Option<PathBuf>,
    #[arg(long)]
    allow_large: bool,
}

#[derive(Args, Debug)]
struct ConstructArgs {
    #[arg(long)]
    family: String,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    r: Option<usize>,
    #[arg(long)]
    a: Option<usize>,
    #[arg(long)]
    b: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    sizes: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum TargetArg {
    Turan,
    Bipartite,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Exact,
    Heuristic,
}

#[derive(Args, Debug)]
struct DistanceArgs {
    graph: PathBuf,
    #[arg(long, value_enum)]
    target: TargetArg,
    #[arg(long)]
    r: Option<usize>,
    #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
    mode: ModeArg,
    #[arg(long, default_value_t = supersat_core::stability::DEFAULT_STARTS)]
    starts: usize,
}

/// What a subcommand produced: a JSON document plus an optional CSV/text form.
struct Output {
    value: Value,
    /// Pre-rendered JSON that takes the place of `value` (keeps field order).
    json: Option<String>,
    csv: Option<String>,
    text: Option<String>,
    exit: u8,
}

impl Output {
    fn json(value: Value) -> Self {
        Output {
            value,
            json: None,
            csv: None,
            text: None,
            exit: 0,
        }
    }
}

fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path)
        .map_err(|e| Error::InvalidParameter(format!("cannot read {}: {e}", path.display())))
}

fn load_graph(path: &Path) -> Result<Graph> {
    read_graph(&read_file(path)?)
}

fn load_pattern(name: &str, allow_large: bool) -> Result<PatternProfile> {
    let (g, warning) = resolve_pattern(name)?;
    if let Some(w) = warning {
        eprintln!("warning: {w}");
    }
    PatternProfile::build(&g, allow_large)
}

fn parse_edge(s: &str) -> Result<(usize, usize)> {
    let bad = || Error::InvalidParameter(format!("edge must be written u,v; got {s:?}"));
    let (u, v) = s.split_once(',').ok_or_else(bad)?;
    Ok(edge(
        u.trim().parse().map_err(|_| bad())?,
        v.trim().parse().map_err(|_| bad())?,
    ))
}

fn parse_parts(s: &str) -> Result<VertexPartition> {
    let parts = s
        .split(';')
        .map(|p| {
            p.split(',')
                .map(|v| {
                    v.trim()
                        .parse()
                        .map_err(|_| Error::InvalidParameter(format!("bad vertex {v:?} in parts")))
                })
                .collect::<Result<Vec<usize>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    VertexPartition::new(parts)
}

fn need(v: Option<usize>, flag: &str) -> Result<usize> {
    v.ok_or_else(|| Error::InvalidParameter(format!("--{flag} is required here")))
}

fn cmd_spectral(path: &Path, tol: f64) -> Result<Output> {
    let g = load_graph(path)?;
    let cfg = SpectralConfig {
        tol,
        ..SpectralConfig::default()
    };
    let s = spectral_radius(&g, &cfg)?;
    let light = light_edges(&g, &s);
    let phi = s.rho / (g.m() as f64).sqrt();
    let text = format!(
        "rho = {}\nphi = {}\nresidual = {:e}\nlight edges = {}\n",
        s.rho,
        phi,
        s.residual,
        light.len()
    );
    let mut out = Output::json(json!({
        "n": g.n(),
        "m": g.m(),
        "rho": s.rho,
        "phi": phi,
        "residual": s.residual,
        "iterations": s.iterations,
        "perron_vector": s.x,
        "dominant_component": s.dominant_component,
        "light_edges": light,
    }));
    out.text = Some(text);
    Ok(out)
}

fn cmd_count(a: &CountArgs) -> Result<Output> {
    let g = load_graph(&a.graph)?;
    let f = load_pattern(&a.pattern, false)?;
    let (copies, e) = match &a.edge {
        Some(s) => {
            let e = parse_edge(s)?;
            let parts = a.parts.as_deref().map(parse_parts).transpose()?;
            (
                count_copies_through_edge(&g, &f, e, parts.as_ref())?,
                Some(e),
            )
        }
        None => (count_copies(&g, &f)?, None),
    };
    let mut out = Output::json(json!({
        "pattern": a.pattern,
        "copies": copies,
        "edge": e,
        "exclusive": a.parts.is_some(),
    }));
    out.text = Some(format!("copies = {copies}\n"));
    Ok(out)
}

fn cmd_cnf(a: &CnfArgs) -> Result<Output> {
    let f = load_pattern(&a.pattern, false)?;
    match a.method {
        CnfMethod::Alpha => {
            let alpha = fraction_string(&alpha_exact(&f)?);
            let mut out = Output::json(json!({ "pattern": a.pattern, "alpha": alpha }));
            out.text = Some(format!("alpha = {alpha}\n"));
            Ok(out)
        }
        CnfMethod::Scan => {
            if a.n_values.is_empty() {
                return Err(Error::InvalidParameter(
                    "--n-values is required for scan".into(),
                ));
            }
            let scan = alpha_residual_scan(&f, &a.n_values)?;
            let mut text = format!("alpha = {}\n", scan.alpha);
            for p in &scan.points {
                text.push_str(&format!(
                    "n = {}: c = {}, ratio = {:.6}, residual = {:.6}, sandwich {}\n",
                    p.n,
                    p.c,
                    p.ratio,
                    p.residual_f64,
                    if p.sandwich_holds() {
                        "holds"
                    } else {
                        "fails (finding)"
                    }
                ));
            }
            let mut out = Output::json(serde_json::to_value(&scan)?);
            out.text = Some(text);
            Ok(out)
        }
        method => {
            let n = need(a.n, "n")?;
            let formula = matches!(method, CnfMethod::Formula | CnfMethod::Both)
                .then(|| c_exact(n, &f))
                .transpose()?;
            let brute = matches!(method, CnfMethod::BruteForce | CnfMethod::Both)
                .then(|| c_bruteforce_detail(n, &f, &CountLimits::default()))
                .transpose()?;
            let agree = match (&formula, &brute) {
                (Some(x), Some(y)) => Some(*x == y.value.into()),
                _ => None,
            };
            let mut text = String::new();
            if let Some(x) = &formula {
                text.push_str(&format!("formula = {x}\n"));
            }
            if let Some(y) = &brute {
                text.push_str(&format!("brute-force = {}\n", y.value));
            }
            if let Some(ok) = agree {
                text.push_str(if ok { "agree\n" } else { "DISAGREE\n" });
            }
            let mut out = Output::json(json!({
                "pattern": a.pattern,
                "n": n,
                "formula": formula.map(|x| x.to_string()),
                "brute_force": brute,
                "agree": agree,
            }));
            out.text = Some(text);
            Ok(out)
        }
    }
}

fn cmd_pattern(a: &PatternArgs) -> Result<Output> {
    let f = match (&a.name, &a.file) {
        (Some(name), _) => load_pattern(name, a.allow_large)?,
        (None, Some(path)) => PatternProfile::build(&load_graph(path)?, a.allow_large)?,
        (None, None) => {
            return Err(Error::InvalidParameter("give --name or --file".into()));
        }
    };
    let mut text = format!(
        "f = {}\nchi = {}\ngood edges = {} {:?}\nAut = {}\ncolorings = {}\n",
        f.f,
        f.chi,
        f.good_edges.len(),
        f.good_edges,
        f.aut,
        f.coloring_count()
    );
    if let Some(b) = f.beta_prime {
        text.push_str(&format!("beta' = {b}\n"));
    }
    let mut out = Output::json(serde_json::to_value(&f)?);
    out.text = Some(text);
    Ok(out)
}

fn cmd_peel(path: &Path, epsilon: f64, a: f64) -> Result<Output> {
    let g = load_graph(path)?;
    let trace = peel(&g, epsilon, &SpectralConfig::default())?;
    let report = check_peel_bounds(&trace, a);
    let terminal = (trace.terminal_reason == TerminalReason::NoLightEdges && a > 1.0)
        .then(|| check_terminal_bounds(&trace.terminal, &trace.terminal_spectral, a));
    let mut text = format!(
        "steps = {}\nremoved = {:?}\nterminal = {:?}\nhypothesis = {:?}\nbounds hold = {}\n",
        trace.steps.len(),
        trace.removed_edges(),
        trace.terminal_reason,
        report.hypothesis,
        report.holds()
    );
    if let Some(t) = &terminal {
        text.push_str(&format!(
            "terminal bounds hold = {}\n",
            t.hypothesis.is_met() && t.all_hold()
        ));
    }
    let mut out = Output::json(json!({
        "trace": trace,
        "checks": report,
        "terminal_checks": terminal,
    }));
    out.text = Some(text);
    Ok(out)
}

fn cmd_construct(a: &ConstructArgs) -> Result<Output> {
    let family = match a.family.as_str() {
        "turan" | "turan-plus-edge" => {
            let params = [need(a.n, "n")?, need(a.r, "r")?];
            Family::from_kind(&a.family, &params)?
        }
        "complete-multipartite" => Family::from_kind(&a.family, &a.sizes)?,
        "complete-bipartite-plus-edge" => {
            Family::from_kind(&a.family, &[need(a.a, "a")?, need(a.b, "b")?])?
        }
        "star" => Family::from_kind(&a.family, &[need(a.k, "k")?])?,
        "cycle" | "clique" => Family::from_kind(&a.family, &[need(a.n, "n")?])?,
        other => Family::from_kind(other, &[])?,
    };
    let c = family.build()?;
    let text = write_graph(&c.graph);
    Ok(Output {
        value: json!({
            "family": family,
            "graph": c.graph,
            "partition": c.partition,
            "added_edge": c.added_edge,
        }),
        json: None,
        csv: None,
        text: Some(text),
        exit: 0,
    })
}

fn cmd_distance(a: &DistanceArgs, seed: u64) -> Result<Output> {
    let g = load_graph(&a.graph)?;
    let mode = match a.mode {
        ModeArg::Exact => DistanceMode::Exact,
        ModeArg::Heuristic => DistanceMode::Heuristic {
            seed,
            starts: a.starts,
        },
    };
    let res = match a.target {
        TargetArg::Turan => distance_to_turan(&g, need(a.r, "r")?, mode)?,
        TargetArg::Bipartite => distance_to_bipartite(&g, mode)?,
    };
    let mut out = Output::json(serde_json::to_value(&res)?);
    out.text = Some(format!(
        "distance = {} ({:?})\nwitness = {:?}\n",
        res.distance, res.method, res.witness
    ));
    Ok(out)
}

fn cmd_campaign(path: &Path, allow_large: bool, cli: &Cli) -> Result<Output> {
    let mut spec = CampaignSpec::parse(&read_file(path)?)?;
    spec.allow_large |= allow_large;
    if cli.workers.is_some() {
        spec.workers = cli.workers;
    }
    if let (Some(seed), Campaign::PeelProperties(p)) = (cli.seed, &mut spec.campaign) {
        p.seed = seed;
    }
    let report = run_campaign(&spec)?;
    let s = &report.summary;
    let mut text = format!(
        "campaign {}: {} instances, {} passed, {} failed, {} findings, {} skipped\n",
        report.campaign, s.instances, s.passed, s.failed, s.findings, s.skipped
    );
    for n in &s.notes {
        text.push_str(&format!("  {n}\n"));
    }
    for c in &s.counterexamples {
        text.push_str(&format!("  counterexample {c}\n"));
    }
    text.push_str(if s.pass { "PASS\n" } else { "FAIL\n" });
    let exit = if report.passed() { 0 } else { 2 };
    let csv = report.to_csv()?;
    let json = report.to_json()?;
    // a campaign file may name its own output; -o takes precedence
    if cli.output.is_none() {
        if let Some(target) = &spec.output {
            let body = match cli.format {
                Format::Json => json,
                Format::Csv => csv,
                Format::Text => text.clone(),
            };
            fs::write(target, body)?;
            return Ok(Output {
                value: json!({ "written": target }),
                json: None,
                csv: None,
                text: Some(format!("report written to {}\n{text}", target.display())),
                exit,
            });
        }
    }
    Ok(Output {
        value: Value::Null,
        json: Some(json),
        csv: Some(csv),
        text: Some(text),
        exit,
    })
}

fn cmd_enumerate(max_n: usize, m: usize, labeled: bool, allow_large: bool) -> Result<Output> {
    let guard = if allow_large {
        Guardrails::unrestricted()
    } else {
        Guardrails::default()
    };
    let codes = enumerate_graphs(max_n, m, !labeled, &guard)?
        .map(|g| write_graph6(&g))
        .collect::<Result<Vec<_>>>()?;
    let mut text: String = codes.iter().map(|c| format!("{c}\n")).collect();
    if codes.is_empty() {
        text.clear();
    }
    let csv = std::iter::once("graph6\n".to_string())
        .chain(codes.iter().map(|c| format!("{c}\n")))
        .collect();
    Ok(Output {
        value: json!({ "max_n": max_n, "m": m, "dedupe": !labeled, "count": codes.len(), "graphs": codes }),
        json: None,
        csv: Some(csv),
        text: Some(text),
        exit: 0,
    })
}

/// One-row CSV of the top-level fields; nested values are embedded as JSON.
fn generic_csv(value: &Value) -> String {
    let Value::Object(map) = value else {
        return format!("value\n{value}\n");
    };
    let quote = |s: String| {
        if s.contains([',', '"', '\n']) {
            format!("\"{}\"", s.replace('"', "\"\""))
        } else {
            s
        }
    };
    let header: Vec<String> = map.keys().map(|k| quote(k.clone())).collect();
    let row: Vec<String> = map
        .values()
        .map(|v| {
            quote(match v {
                Value::Null => String::new(),
                Value::String(s) => s.clone(),
                other => other.to_string(),
            })
        })
        .collect();
    format!("{}\n{}\n", header.join(","), row.join(","))
}

fn render(format: Format, out: &Output) -> Result<String> {
    let json = || -> Result<String> {
        match &out.json {
            Some(j) => Ok(j.clone()),
            None => Ok(serde_json::to_string_pretty(&out.value)? + "\n"),
        }
    };
    Ok(match format {
        Format::Json => json()?,
        Format::Csv => match &out.csv {
            Some(c) => c.clone(),
            None => generic_csv(&out.value),
        },
        Format::Text => match &out.text {
            Some(t) => t.clone(),
            None => json()?,
        },
    })
}

fn dispatch(cli: &Cli) -> Result<Output> {
    let seed = cli.seed.unwrap_or(0);
    let single = || with_workers(Some(1), || -> Result<Output> { single_instance(cli, seed) });
    match &cli.command {
        Command::Campaign { spec, allow_large } => cmd_campaign(spec, *allow_large, cli),
        Command::Enumerate {
            max_n,
            m,
            labeled,
            allow_large,
        } => with_workers(cli.workers, || {
            cmd_enumerate(*max_n, *m, *labeled, *allow_large)
        })?,
        _ => single()?,
    }
}

fn single_instance(cli: &Cli, seed: u64) -> Result<Output> {
    match &cli.command {
        Command::Spectral { graph, tol } => cmd_spectral(graph, *tol),
        Command::Count(a) => cmd_count(a),
        Command::Cnf(a) => cmd_cnf(a),
        Command::Pattern(a) => cmd_pattern(a),
        Command::Peel { graph, epsilon, a } => cmd_peel(graph, *epsilon, *a),
        Command::Construct(a) => cmd_construct(a),
        Command::Distance(a) => cmd_distance(a, seed),
        Command::Campaign { .. } | Command::Enumerate { .. } => {
            unreachable!("dispatched separately")
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let out = match dispatch(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let body = match render(cli.format, &out) {
        Ok(b) => b,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    match &cli.output {
        Some(path) => {
            if let Err(e) = fs::write(path, body) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(1);
            }
        }
        None => print!("{body}"),
    }
    ExitCode::from(out.exit)
}
