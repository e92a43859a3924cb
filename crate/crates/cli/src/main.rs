use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use ticketzone::asymptotics::{self, default_schedule, sigma_estimate, Direction, ScanOptions, SigmaBracket};
use ticketzone::gallery::{self, CaseReport};
use ticketzone::partition::{classify_existence, Classification, ClassifyOptions, OptimizeOptions};
use ticketzone::report::{fmt, to_json};
use ticketzone::spectral::{eigenvalue_estimates, ground_energy, DEFAULT_MESH};
use ticketzone::subgraph::{annulus, ball, exterior, PointSpec, SubgraphSpec};
use ticketzone::zones::{build_equipartition_rings, ZoneOptions};
use ticketzone::{EnergyEstimate, Execution, GraphSpec, MetricGraph, Point, Potential, Subgraph};

#[derive(Parser)]
#[command(name = "ticketzone", version, about = "Ground energies, ticket zones and spectral partitions of metric graphs")]
struct Cli {
    /// Worker threads; defaults to the number of cores.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Finite element mesh width.
    #[arg(long, global = true, default_value_t = DEFAULT_MESH)]
    mesh: f64,
    /// Write the main report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Lowest eigenvalues of a subgraph.
    Spectrum(SpectrumArgs),
    /// Essential-spectrum threshold estimate from exteriors of balls.
    Sigma(SigmaArgs),
    /// Ground energy of balls or exteriors over a radius grid, as CSV.
    Scan(ScanArgs),
    /// Equalised rings around a root, as CSV.
    Zones(ZonesArgs),
    /// Best k-partition found and its existence classification.
    Partition(PartitionArgs),
    /// Run the built-in validation cases.
    ValidateGallery(GalleryArgs),
}

#[derive(Args)]
struct SpectrumArgs {
    graph: PathBuf,
    /// `whole`, `ball:V:R`, `exterior:V:R`, `annulus:V:R1:R2` or a JSON file.
    #[arg(long, default_value = "whole")]
    subgraph: String,
    #[arg(long, default_value_t = 1)]
    count: usize,
    /// Include the ground state samples.
    #[arg(long)]
    eigenfunction: bool,
}

#[derive(Args)]
struct SigmaArgs {
    graph: PathBuf,
    /// Vertex id or `e<edge>@<offset>`.
    #[arg(long)]
    root: String,
    /// Comma-separated radii; defaults to eight radii up to the truncation limit.
    #[arg(long, value_delimiter = ',')]
    radii: Option<Vec<f64>>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Ball,
    Exterior,
}

#[derive(Args)]
struct ScanArgs {
    graph: PathBuf,
    #[arg(long, value_enum, default_value = "ball")]
    mode: Mode,
    #[arg(long)]
    root: String,
    #[arg(long)]
    rmin: f64,
    #[arg(long)]
    rmax: f64,
    #[arg(long)]
    step: f64,
}

#[derive(Args)]
struct ZonesArgs {
    graph: PathBuf,
    #[arg(long)]
    root: String,
    #[arg(long)]
    lambda: f64,
    #[arg(long, default_value_t = 1)]
    rings: usize,
    /// Inner radius of the first ring.
    #[arg(long, default_value_t = 1.0)]
    start: f64,
    /// Relative energy tolerance.
    #[arg(long, default_value_t = 1e-3)]
    tol: f64,
    /// Skip the comparison of the target with the threshold estimate.
    #[arg(long)]
    no_sigma_check: bool,
    /// Write the ring partition here.
    #[arg(long)]
    partition_out: Option<PathBuf>,
}

#[derive(Args)]
struct PartitionArgs {
    graph: PathBuf,
    #[arg(long)]
    k: usize,
    /// Cap on the total number of cuts; defaults to k + 2.
    #[arg(long)]
    max_cuts: Option<usize>,
    /// Relative equalisation tolerance.
    #[arg(long, default_value_t = 1e-3)]
    tol: f64,
    /// Number of screened topologies that are refined.
    #[arg(long, default_value_t = 6)]
    refine: usize,
    /// Root for the threshold estimate; without it no classification is made.
    #[arg(long)]
    root: Option<String>,
    /// Classification margin relative to the threshold.
    #[arg(long, default_value_t = 1e-2)]
    margin_rel: f64,
    /// Write the partition here.
    #[arg(long)]
    partition_out: Option<PathBuf>,
}

#[derive(Args)]
struct GalleryArgs {
    /// Case name or `all`.
    #[arg(long, default_value = "all")]
    case: String,
    /// Write the JSON report here.
    #[arg(long)]
    report: Option<PathBuf>,
    /// List the cases and exit.
    #[arg(long)]
    list: bool,
}

struct Loaded {
    graph: MetricGraph,
    potential: Potential,
}

fn load(path: &Path) -> Result<Loaded> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let spec = GraphSpec::from_json(&text).with_context(|| format!("parsing {}", path.display()))?;
    let graph = MetricGraph::build(&spec)?;
    let potential = Potential::from_graph_spec(&graph, &spec)?;
    Ok(Loaded { graph, potential })
}

fn parse_root(g: &MetricGraph, text: &str) -> Result<Point> {
    if let Some(rest) = text.strip_prefix('e') {
        let (edge, offset) = rest.split_once('@').context("edge points are written e<edge>@<offset>")?;
        return Ok(g.point(edge.parse()?, offset.parse()?)?);
    }
    Ok(g.vertex_point(text.parse().with_context(|| format!("bad root {text:?}"))?)?)
}

fn parse_subgraph(g: &MetricGraph, text: &str) -> Result<Subgraph> {
    let parts: Vec<&str> = text.split(':').collect();
    let num = |s: &str| s.parse::<f64>().with_context(|| format!("bad radius {s:?}"));
    Ok(match parts.as_slice() {
        ["whole"] => Subgraph::whole(g),
        ["ball", v, r] => ball(g, parse_root(g, v)?, num(r)?)?,
        ["exterior", v, r] => exterior(g, parse_root(g, v)?, num(r)?)?,
        ["annulus", v, r1, r2] => annulus(g, parse_root(g, v)?, num(r1)?, num(r2)?)?,
        _ => {
            let body = fs::read_to_string(text).with_context(|| format!("unknown subgraph {text:?}"))?;
            let spec: SubgraphSpec = serde_json::from_str(&body)?;
            Subgraph::from_spec(g, &spec)?
        }
    })
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct Sample {
    point: PointSpec,
    value: f64,
}

#[derive(Serialize)]
struct SpectrumReport {
    lambda: f64,
    lambda_h: f64,
    lambda_half: f64,
    error_indicator: f64,
    residual: f64,
    iterations: usize,
    refined: bool,
    degenerate: bool,
    eigenvalues: Vec<EnergyEstimate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    eigenfunction: Option<Vec<Sample>>,
}

fn spectrum(cli: &Cli, a: &SpectrumArgs) -> Result<()> {
    let Loaded { graph: g, potential: v } = load(&a.graph)?;
    let s = parse_subgraph(&g, &a.subgraph)?;
    let gs = ground_energy(&g, &s, &v, cli.mesh)?;
    let eigenvalues = eigenvalue_estimates(&g, &s, &v, cli.mesh, a.count.max(1))?;
    let eigenfunction = a.eigenfunction.then(|| {
        gs.eigenfunction
            .iter()
            .map(|n| Sample { point: PointSpec::from_point(&g, n.point), value: n.value })
            .collect()
    });
    let report = SpectrumReport {
        lambda: gs.lambda_extrapolated,
        lambda_h: gs.lambda_h,
        lambda_half: gs.lambda_half,
        error_indicator: gs.error_indicator,
        residual: gs.residual,
        iterations: gs.iterations,
        refined: gs.refined,
        degenerate: gs.degenerate,
        eigenvalues,
        eigenfunction,
    };
    emit(&cli.out, &to_json(&report)?)
}

#[derive(Serialize)]
struct SigmaReport {
    root: PointSpec,
    lower: f64,
    error_indicator: f64,
    converged: bool,
    truncated_at: Option<f64>,
    trend: Vec<TrendRow>,
}

#[derive(Serialize)]
struct TrendRow {
    radius: f64,
    lambda: f64,
    error_indicator: f64,
}

fn sigma_report(g: &MetricGraph, root: Point, s: &SigmaBracket) -> SigmaReport {
    SigmaReport {
        root: PointSpec::from_point(g, root),
        lower: s.lower,
        error_indicator: s.error_indicator(),
        converged: s.converged,
        truncated_at: s.truncated_at,
        trend: s
            .trend
            .iter()
            .map(|(r, e)| TrendRow { radius: *r, lambda: e.lambda_extrapolated, error_indicator: e.error_indicator })
            .collect(),
    }
}

fn exec() -> Execution {
    Execution::default()
}

fn sigma(cli: &Cli, a: &SigmaArgs) -> Result<()> {
    let Loaded { graph: g, potential: v } = load(&a.graph)?;
    let root = parse_root(&g, &a.root)?;
    let radii = match &a.radii {
        Some(r) => r.clone(),
        None => default_schedule(&g, root, 8)?,
    };
    let s = sigma_estimate(&g, &v, root, &radii, &ScanOptions { h: cli.mesh, exec: exec() })?;
    emit(&cli.out, &to_json(&sigma_report(&g, root, &s))?)
}

fn scan(cli: &Cli, a: &ScanArgs) -> Result<()> {
    let Loaded { graph: g, potential: v } = load(&a.graph)?;
    let root = parse_root(&g, &a.root)?;
    let radii = asymptotics::grid(a.rmin, a.rmax, a.step)?;
    let direction = match a.mode {
        Mode::Ball => Direction::Ball,
        Mode::Exterior => Direction::Exterior,
    };
    let rep = asymptotics::continuity_scan(&g, &v, root, direction, &radii, &ScanOptions { h: cli.mesh, exec: exec() })?;
    for j in &rep.jumps {
        eprintln!("jump between R={} and R={}: {}", fmt(j.from_radius), fmt(j.to_radius), fmt(j.gap));
    }
    emit(&cli.out, &rep.scan.to_csv())
}

fn zones(cli: &Cli, a: &ZonesArgs) -> Result<()> {
    let Loaded { graph: g, potential: v } = load(&a.graph)?;
    let root = parse_root(&g, &a.root)?;
    let opts = ZoneOptions {
        h: cli.mesh,
        tol: a.tol,
        start_radius: a.start,
        check_sigma: !a.no_sigma_check,
        exec: exec(),
        ..Default::default()
    };
    let rings = build_equipartition_rings(&g, &v, root, a.lambda, a.rings, &opts)?;
    if let Some(p) = &a.partition_out {
        fs::write(p, rings.partition.to_json(&g)?).with_context(|| format!("writing {}", p.display()))?;
    }
    emit(&cli.out, &rings.to_csv())
}

#[derive(Serialize)]
struct PartitionReport {
    k: usize,
    energy: f64,
    error_indicator: f64,
    cluster_energies: Vec<f64>,
    topology: Vec<usize>,
    topologies: usize,
    cuts: Vec<PointSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    verdict: Option<Verdict>,
}

#[derive(Serialize)]
struct Verdict {
    classification: Classification,
    sigma: SigmaReport,
    margin: f64,
}

fn partition(cli: &Cli, a: &PartitionArgs) -> Result<()> {
    let Loaded { graph: g, potential: v } = load(&a.graph)?;
    let optimize = OptimizeOptions {
        h: cli.mesh,
        max_cuts: a.max_cuts,
        tol: a.tol,
        refine: a.refine,
        exec: exec(),
        ..Default::default()
    };
    let (witness, verdict) = match &a.root {
        Some(r) => {
            let root = parse_root(&g, r)?;
            let opts = ClassifyOptions { optimize, margin_rel: a.margin_rel, ..ClassifyOptions::new(root) };
            let res = classify_existence(&g, &v, a.k, &opts)?;
            let verdict = Verdict {
                classification: res.classification,
                sigma: sigma_report(&g, root, &res.sigma),
                margin: res.margin,
            };
            (res.witness, Some(verdict))
        }
        None => (ticketzone::partition::optimize_k(&g, &v, a.k, &optimize)?, None),
    };
    if let Some(p) = &a.partition_out {
        fs::write(p, witness.partition.to_json(&g)?).with_context(|| format!("writing {}", p.display()))?;
    }
    let report = PartitionReport {
        k: a.k,
        energy: witness.report.energy,
        error_indicator: witness.report.error_indicator_sum(),
        cluster_energies: witness.report.clusters.iter().map(|c| c.lambda_extrapolated).collect(),
        topology: witness.topology.clone(),
        topologies: witness.topologies,
        cuts: witness.partition.cuts.iter().map(|&p| PointSpec::from_point(&g, p)).collect(),
        verdict,
    };
    emit(&cli.out, &to_json(&report)?)
}

fn table(reports: &[CaseReport]) -> String {
    let width = reports.iter().map(|r| r.name.len()).max().unwrap_or(4).max(4);
    let mut out = format!("{:<width$}  result  checks  seconds\n", "case");
    for r in reports {
        let passed = r.checks.iter().filter(|c| c.passed).count();
        out.push_str(&format!(
            "{:<width$}  {:<6}  {:>3}/{:<3} {:>8.2}\n",
            r.name,
            if r.passed { "PASS" } else { "FAIL" },
            passed,
            r.checks.len(),
            r.seconds
        ));
        if let Some(e) = &r.error {
            out.push_str(&format!("  error: {e}\n"));
        }
        for c in r.checks.iter().filter(|c| !c.passed) {
            out.push_str(&format!(
                "  failed: {} observed {} expected {} tolerance {}\n",
                c.name,
                fmt(c.observed),
                fmt(c.expected),
                fmt(c.tolerance)
            ));
        }
    }
    out
}

fn validate_gallery(cli: &Cli, a: &GalleryArgs) -> Result<bool> {
    if a.list {
        let mut out = String::new();
        for c in gallery::cases() {
            out.push_str(&format!("{}\t{}\n", c.name, c.description));
        }
        emit(&cli.out, &out)?;
        return Ok(true);
    }
    let cases = if a.case == "all" {
        gallery::cases()
    } else {
        match gallery::find_case(&a.case) {
            Some(c) => vec![c],
            None => bail!("unknown case {:?}; try --list", a.case),
        }
    };
    let reports = gallery::run_cases(&cases, exec());
    if let Some(p) = &a.report {
        let mut stable = reports.clone();
        stable.iter_mut().for_each(|r| r.seconds = 0.0);
        fs::write(p, to_json(&stable)?).with_context(|| format!("writing {}", p.display()))?;
    }
    emit(&cli.out, &table(&reports))?;
    Ok(reports.iter().all(|r| r.passed))
}

fn run(cli: &Cli) -> Result<bool> {
    if !(cli.mesh > 0.0 && cli.mesh.is_finite()) {
        bail!("--mesh must be positive");
    }
    #[cfg(feature = "parallel")]
    if let Some(j) = cli.jobs {
        rayon::ThreadPoolBuilder::new().num_threads(j.max(1)).build_global()?;
    }
    match &cli.command {
        Command::Spectrum(a) => spectrum(cli, a)?,
        Command::Sigma(a) => sigma(cli, a)?,
        Command::Scan(a) => scan(cli, a)?,
        Command::Zones(a) => zones(cli, a)?,
        Command::Partition(a) => partition(cli, a)?,
        Command::ValidateGallery(a) => return validate_gallery(cli, a),
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
