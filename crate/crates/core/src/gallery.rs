//! Built-in example graphs and runnable validation cases.

use std::f64::consts::PI;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::asymptotics::{self, default_schedule, sigma_estimate, Direction, ScanOptions};
use crate::error::{Error, Result};
use crate::graph::{EdgeIx, EdgeSpec, EndCondition, GraphSpec, MetricGraph, Point, TruncatedEnd, TruncatedEndSpec, VertexIx};
use crate::parallel::{self, Execution};
use crate::partition::{energy, evaluate_cuts, optimize_k, Partition, OptimizeOptions};
use crate::potential::Potential;
use crate::spectral::{eigenvalue_estimates, energy_estimate, DEFAULT_MESH};
use crate::subgraph::{ball, ball_in, Subgraph};
use crate::zones::{build_equipartition_rings, ZoneOptions};

/// `θ = arccos(2 / (√b + 1/√b))`; `θ²` is the bottom of the spectrum of the
/// homogeneous tree with branching `b`.
pub fn theta(b: usize) -> f64 {
    let s = (b as f64).sqrt();
    (2.0 / (s + 1.0 / s)).acos()
}

/// Pendant length `π/(2θ)` whose Dirichlet–Neumann ground energy is `θ²`.
pub fn pendant_length(b: usize) -> f64 {
    PI / (2.0 * theta(b))
}

fn end(vertex: u64, condition: EndCondition, tag: &str) -> TruncatedEndSpec {
    TruncatedEndSpec::Full(TruncatedEnd { vertex, condition, tag: tag.to_string() })
}

fn build(spec: GraphSpec) -> MetricGraph {
    MetricGraph::build(&spec).expect("generated graphs are valid")
}

/// Interval `[0, len]` with optional truncation conditions at its ends;
/// `None` leaves a natural (Neumann) end.
pub fn make_interval(len: f64, left: Option<EndCondition>, right: Option<EndCondition>) -> MetricGraph {
    let mut truncated_ends = Vec::new();
    if let Some(c) = left {
        truncated_ends.push(end(0, c, "interval end"));
    }
    if let Some(c) = right {
        truncated_ends.push(end(1, c, "interval end"));
    }
    build(GraphSpec {
        vertices: vec![0, 1],
        edges: vec![EdgeSpec { id: 0, from: 0, to: 1, length: len }],
        truncated_ends,
        ..Default::default()
    })
}

/// The real line cut to `[-l, l]`; vertex 0 is the origin, both rays end freely.
pub fn make_line(l: f64) -> MetricGraph {
    build(GraphSpec {
        vertices: vec![0, 1, 2],
        edges: vec![
            EdgeSpec { id: 0, from: 0, to: 1, length: l },
            EdgeSpec { id: 1, from: 0, to: 2, length: l },
        ],
        truncated_ends: vec![end(1, EndCondition::Free, "ray"), end(2, EndCondition::Free, "ray")],
        ..Default::default()
    })
}

/// Half-line cut at `l` with a free end; vertex 0 is the origin.
pub fn make_half_line(l: f64) -> MetricGraph {
    build(GraphSpec {
        vertices: vec![0, 1],
        edges: vec![EdgeSpec { id: 0, from: 0, to: 1, length: l }],
        truncated_ends: vec![end(1, EndCondition::Free, "ray")],
        ..Default::default()
    })
}

/// `m` rays of length `l` from hub 0, with free truncated ends.
pub fn make_star(m: usize, l: f64) -> MetricGraph {
    let m = m as u64;
    build(GraphSpec {
        vertices: (0..=m).collect(),
        edges: (0..m).map(|i| EdgeSpec { id: i, from: 0, to: i + 1, length: l }).collect(),
        truncated_ends: (1..=m).map(|i| end(i, EndCondition::Free, "ray")).collect(),
        ..Default::default()
    })
}

/// A single loop of length `l` at vertex 0.
pub fn make_cycle(l: f64) -> MetricGraph {
    build(GraphSpec {
        vertices: vec![0],
        edges: vec![EdgeSpec { id: 0, from: 0, to: 0, length: l }],
        ..Default::default()
    })
}

fn tree_spec(b: usize, depth: usize, spec: &mut GraphSpec, root: u64) {
    let mut next_vertex = spec.vertices.iter().max().map_or(0, |m| m + 1);
    let mut next_edge = spec.edges.iter().map(|e| e.id + 1).max().unwrap_or(0);
    let mut level = vec![root];
    for d in 1..=depth {
        let mut children = Vec::with_capacity(level.len() * b);
        for &p in &level {
            for _ in 0..b {
                spec.vertices.push(next_vertex);
                spec.edges.push(EdgeSpec { id: next_edge, from: p, to: next_vertex, length: 1.0 });
                if d == depth {
                    spec.truncated_ends.push(end(next_vertex, EndCondition::Dirichlet, "tree leaf"));
                }
                children.push(next_vertex);
                next_vertex += 1;
                next_edge += 1;
            }
        }
        level = children;
    }
}

/// Rooted tree with branching `b` and unit edges, cut after `depth`
/// generations with Dirichlet leaves. The root is vertex 0 and has `b` children.
pub fn make_tree(b: usize, depth: usize) -> MetricGraph {
    let mut spec = GraphSpec { vertices: vec![0], ..Default::default() };
    tree_spec(b, depth, &mut spec, 0);
    build(spec)
}

/// Tree of branching `b` (depth `depth`) and `k` pendants of length `π/(2θ)`
/// glued at the root, vertex 0. Pendant ends are natural.
pub fn make_glued_tree_star(b: usize, depth: usize, k: usize) -> MetricGraph {
    let mut spec = GraphSpec { vertices: vec![0], ..Default::default() };
    tree_spec(b, depth, &mut spec, 0);
    let len = pendant_length(b);
    let v0 = spec.vertices.iter().max().unwrap() + 1;
    let e0 = spec.edges.iter().map(|e| e.id).max().unwrap() + 1;
    for i in 0..k as u64 {
        spec.vertices.push(v0 + i);
        spec.edges.push(EdgeSpec { id: e0 + i, from: 0, to: v0 + i, length: len });
    }
    build(spec)
}

/// Edge ids of the pendants of [`make_glued_tree_star`].
pub fn glued_pendant_edges(g: &MetricGraph, k: usize) -> Vec<EdgeIx> {
    let n = g.edge_count();
    (n - k..n).map(EdgeIx).collect()
}

/// Glues a lead of length `lead` carrying the constant potential `lambda_bar`
/// to vertex `at` of a compact graph. The far end of the lead is a Dirichlet
/// truncation.
pub fn make_compact_plus_lead(compact: &GraphSpec, at: u64, lead: f64, lambda_bar: f64) -> Result<(MetricGraph, Potential)> {
    let mut spec = compact.clone();
    let v = spec.vertices.iter().max().map_or(0, |m| m + 1);
    let e = spec.edges.iter().map(|e| e.id + 1).max().unwrap_or(0);
    spec.vertices.push(v);
    spec.edges.push(EdgeSpec { id: e, from: at, to: v, length: lead });
    spec.truncated_ends.push(end(v, EndCondition::Dirichlet, "lead"));
    let g = MetricGraph::build(&spec)?;
    let pot = Potential::from_spec(&g, &spec.potential)?.with_edge(&g, e, &[(lead, lambda_bar)])?;
    Ok((g, pot))
}

/// Unit interval (vertices 0, 1) with a lead attached at vertex 1.
pub fn make_interval_plus_lead(lead: f64, lambda_bar: f64) -> (MetricGraph, Potential) {
    let compact = GraphSpec {
        vertices: vec![0, 1],
        edges: vec![EdgeSpec { id: 0, from: 0, to: 1, length: 1.0 }],
        ..Default::default()
    };
    make_compact_plus_lead(&compact, 1, lead, lambda_bar).expect("valid lead")
}

/// Cuts a tree from [`make_tree`] at vertices along the leftmost path, one
/// generation deeper each time, until at least `k` components lie below the
/// cuts. The `k` lowest-energy of those subtrees become the clusters.
pub fn branch_cut_partition(g: &MetricGraph, v: &Potential, k: usize, h: f64) -> Result<Partition> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    let root = Point::Vertex(VertexIx(0));
    let mut cuts: Vec<Point> = Vec::new();
    let mut at = VertexIx(0);
    loop {
        let child = g
            .incident(at)
            .iter()
            .filter(|ee| g.edge(ee.edge).from == at)
            .map(|ee| g.edge(ee.edge).to)
            .min();
        let Some(child) = child.filter(|&c| g.truncation(c).is_none()) else {
            return Err(Error::KUnreachable { k, max_cuts: cuts.len() });
        };
        cuts.push(Point::Vertex(child));
        let s = Subgraph::new(g, Subgraph::whole(g).pieces().to_vec(), &cuts)?;
        let comps: Vec<Subgraph> = s.components(g).into_iter().filter(|c| !c.contains(g, root)).collect();
        if comps.len() >= k {
            let energies = comps
                .iter()
                .map(|c| energy_estimate(g, c, v, h).map(|e| e.lambda_extrapolated))
                .collect::<Result<Vec<_>>>()?;
            let mut order: Vec<usize> = (0..comps.len()).collect();
            order.sort_by(|&a, &b| energies[a].total_cmp(&energies[b]).then(a.cmp(&b)));
            order.truncate(k);
            order.sort_unstable();
            let clusters = order.into_iter().map(|i| comps[i].clone()).collect();
            return Ok(Partition::new(g, clusters, cuts));
        }
        at = child;
    }
}

/// A local perturbation of the cut at a vertex.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Probe {
    pub description: String,
    /// `None` when the perturbed cut set has fewer than `k` components.
    pub energy: Option<f64>,
    pub error: f64,
}

/// Energies of perturbations of a single vertex cut: the cut moved by `δ`
/// along each incident edge, an extra cut at `δ` on each incident edge, and
/// the cut split into cuts at `δ` on all incident edges.
pub fn vertex_cut_probes(g: &MetricGraph, v: &Potential, k: usize, vertex: VertexIx, deltas: &[f64], h: f64) -> Result<Vec<Probe>> {
    let incident = g.incident(vertex).to_vec();
    let offset = |ee: &crate::graph::EdgeEnd, d: f64| match ee.end {
        crate::graph::End::Tail => d,
        crate::graph::End::Head => g.length(ee.edge) - d,
    };
    let mut out = Vec::new();
    let empty = || vec![Vec::<f64>::new(); g.edge_count()];
    let run = |cuts: Vec<Vec<f64>>, description: String| -> Result<Probe> {
        let mut cuts = cuts;
        cuts.iter_mut().for_each(|c| c.sort_by(f64::total_cmp));
        let ev = evaluate_cuts(g, v, k, &cuts, h)?;
        Ok(match ev {
            Some(ev) => Probe {
                description,
                energy: Some(ev.max),
                error: ev.selected.iter().map(|&i| ev.errors[i]).sum(),
            },
            None => Probe { description, energy: None, error: 0.0 },
        })
    };
    for &d in deltas {
        for ee in &incident {
            if d >= g.length(ee.edge) {
                continue;
            }
            let mut moved = empty();
            moved[ee.edge.0].push(offset(ee, d));
            out.push(run(moved, format!("move {d} along edge {}", g.edge(ee.edge).id))?);

            let mut extra = empty();
            for e2 in &incident {
                extra[e2.edge.0].push(offset(e2, 0.0));
            }
            extra[ee.edge.0].push(offset(ee, d));
            out.push(run(extra, format!("extra cut {d} along edge {}", g.edge(ee.edge).id))?);
        }
        if incident.iter().all(|ee| d < g.length(ee.edge)) {
            let mut split = empty();
            for ee in &incident {
                split[ee.edge.0].push(offset(ee, d));
            }
            out.push(run(split, format!("split at {d}"))?);
        }
    }
    Ok(out)
}

/// One comparison made by a gallery case.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub observed: f64,
    pub expected: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub source: String,
}

impl Check {
    fn abs(name: &str, observed: f64, expected: f64, tolerance: f64, source: &str) -> Self {
        let passed = (observed - expected).abs() <= tolerance;
        Check { name: name.into(), observed, expected, tolerance, passed, source: source.into() }
    }

    fn rel(name: &str, observed: f64, expected: f64, tolerance: f64, source: &str) -> Self {
        let passed = (observed - expected).abs() <= tolerance * expected.abs();
        Check { name: name.into(), observed, expected, tolerance, passed, source: source.into() }
    }

    /// Passes when `observed ≤ bound + tolerance`.
    fn at_most(name: &str, observed: f64, bound: f64, tolerance: f64, source: &str) -> Self {
        let passed = observed <= bound + tolerance;
        Check { name: name.into(), observed, expected: bound, tolerance, passed, source: source.into() }
    }

    fn at_least(name: &str, observed: f64, bound: f64, tolerance: f64, source: &str) -> Self {
        let passed = observed >= bound - tolerance;
        Check { name: name.into(), observed, expected: bound, tolerance, passed, source: source.into() }
    }

    fn flag(name: &str, ok: bool, source: &str) -> Self {
        let v = if ok { 1.0 } else { 0.0 };
        Check { name: name.into(), observed: v, expected: 1.0, tolerance: 0.0, passed: ok, source: source.into() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaseReport {
    pub name: String,
    pub passed: bool,
    pub checks: Vec<Check>,
    pub error: Option<String>,
    pub seconds: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CaseKind {
    IntervalOracle,
    CycleBallScan,
    TreeThreshold,
    SigmaBound,
    TicketZones,
    MinmaxOptimizer,
    GluedTreeStar,
    MonotonicityShift,
    CompactPlusLead,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GalleryCase {
    pub name: String,
    pub kind: CaseKind,
    pub description: String,
    pub branching: usize,
    pub depth: usize,
    pub ray_length: f64,
    pub lambda_bar: f64,
    pub h: f64,
}

fn case(name: &str, kind: CaseKind, description: &str) -> GalleryCase {
    GalleryCase {
        name: name.into(),
        kind,
        description: description.into(),
        branching: 2,
        depth: 12,
        ray_length: 10.0,
        lambda_bar: 2.0 * PI * PI,
        h: DEFAULT_MESH,
    }
}

/// All built-in cases in a fixed order.
pub fn cases() -> Vec<GalleryCase> {
    vec![
        GalleryCase { h: 1e-3, ..case("interval-oracle", CaseKind::IntervalOracle, "Dirichlet unit interval against pi^2") },
        case("cycle-ball-scan", CaseKind::CycleBallScan, "balls on the unit cycle against pi^2/(4R^2) and the jump at R = 1/2"),
        case("tree-threshold", CaseKind::TreeThreshold, "truncated binary trees decreasing to theta^2"),
        GalleryCase { depth: 3, ..case("sigma-bound", CaseKind::SigmaBound, "best k-partition energy against the exterior-ball threshold") },
        GalleryCase { ray_length: 20.0, ..case("ticket-zones", CaseKind::TicketZones, "equalised rings on the half-line") },
        case("minmax-optimizer", CaseKind::MinmaxOptimizer, "optimal cuts on the free interval and the 3-star"),
        GalleryCase { depth: 6, ..case("glued-tree-star", CaseKind::GluedTreeStar, "tree with three pendants glued at the root") },
        GalleryCase { depth: 4, ..case("monotonicity-shift", CaseKind::MonotonicityShift, "nested subgraphs and constant shifts") },
        GalleryCase { ray_length: 200.0, ..case("compact-plus-lead", CaseKind::CompactPlusLead, "unit interval with a lead at constant potential") },
    ]
}

pub fn find_case(name: &str) -> Option<GalleryCase> {
    cases().into_iter().find(|c| c.name == name)
}

/// Runs one case; errors are reported as a failed case.
pub fn run_case(c: &GalleryCase, exec: Execution) -> CaseReport {
    let start = Instant::now();
    let result = match c.kind {
        CaseKind::IntervalOracle => interval_oracle(c),
        CaseKind::CycleBallScan => cycle_ball_scan(c, exec),
        CaseKind::TreeThreshold => tree_threshold(c, exec),
        CaseKind::SigmaBound => sigma_bound(c, exec),
        CaseKind::TicketZones => ticket_zones(c, exec),
        CaseKind::MinmaxOptimizer => minmax_optimizer(c, exec),
        CaseKind::GluedTreeStar => glued_tree_star(c, exec),
        CaseKind::MonotonicityShift => monotonicity_shift(c, exec),
        CaseKind::CompactPlusLead => compact_plus_lead(c, exec),
    };
    let seconds = start.elapsed().as_secs_f64();
    match result {
        Ok(checks) => CaseReport {
            name: c.name.clone(),
            passed: checks.iter().all(|k| k.passed),
            checks,
            error: None,
            seconds,
        },
        Err(e) => CaseReport { name: c.name.clone(), passed: false, checks: Vec::new(), error: Some(e.to_string()), seconds },
    }
}

pub fn run_cases(cs: &[GalleryCase], exec: Execution) -> Vec<CaseReport> {
    parallel::map(exec, cs, |c| run_case(c, exec))
}

fn interval_oracle(c: &GalleryCase) -> Result<Vec<Check>> {
    let g = make_interval(1.0, Some(EndCondition::Dirichlet), Some(EndCondition::Dirichlet));
    let start = Instant::now();
    let r = crate::spectral::ground_energy(&g, &Subgraph::whole(&g), &Potential::zero(), c.h)?;
    let secs = start.elapsed().as_secs_f64();
    Ok(vec![
        Check::rel("lambda vs pi^2", r.lambda_extrapolated, PI * PI, 1e-6, "separation of variables"),
        Check::at_most("runtime seconds", secs, 2.0, 0.0, "budget"),
    ])
}

fn cycle_ball_scan(c: &GalleryCase, exec: Execution) -> Result<Vec<Check>> {
    let g = make_cycle(1.0);
    let v = Potential::zero();
    let root = Point::Vertex(VertexIx(0));
    let opts = ScanOptions { h: c.h, exec };
    let mut radii: Vec<f64> = (1..=9).map(|i| 0.05 * i as f64).collect();
    radii.extend([0.5, 0.6]);
    let scan = asymptotics::radius_scan(&g, &v, root, Direction::Ball, &radii, &opts)?;
    let mut checks = Vec::new();
    for (r, val) in radii.iter().zip(scan.values()) {
        let val = val.unwrap_or(f64::NAN);
        if *r < 0.5 - 1e-12 {
            checks.push(Check::rel(&format!("ball R={r:.2}"), val, PI * PI / (4.0 * r * r), 1e-3, "Dirichlet interval of length 2R"));
        } else {
            checks.push(Check::abs(&format!("ball R={r:.2}"), val, 0.0, 1e-8, "constant ground state"));
        }
    }
    let step = 0.01;
    let grid = asymptotics::grid(0.05, 0.6, step)?;
    let rep = asymptotics::continuity_scan(&g, &v, root, Direction::Ball, &grid, &opts)?;
    checks.push(Check::abs("jump count", rep.jumps.len() as f64, 1.0, 0.0, "lower semicontinuity"));
    if let Some(j) = rep.jumps.first() {
        checks.push(Check::abs("jump radius", j.to_radius, 0.5, step + 1e-9, "cycle half-length"));
    }
    Ok(checks)
}

fn tree_threshold(c: &GalleryCase, exec: Execution) -> Result<Vec<Check>> {
    let t2 = theta(c.branching).powi(2);
    let depths: Vec<usize> = [6, 8, 10, c.depth].into_iter().filter(|&d| d <= c.depth).collect();
    let values = parallel::map(exec, &depths, |&d| {
        let g = make_tree(c.branching, d);
        energy_estimate(&g, &Subgraph::whole(&g), &Potential::zero(), c.h)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let mut checks = Vec::new();
    for (d, e) in depths.iter().zip(&values) {
        checks.push(Check::at_least(&format!("depth {d} above theta^2"), e.lambda_extrapolated, t2, 0.0, "domain monotonicity"));
    }
    for w in values.windows(2) {
        checks.push(Check::flag("decreasing in depth", w[1].lambda_extrapolated < w[0].lambda_extrapolated, "domain monotonicity"));
    }
    let last = values.last().map_or(f64::NAN, |e| e.lambda_extrapolated);
    checks.push(Check::abs("deepest vs theta^2", last, t2, 5e-2, "tree spectrum"));
    Ok(checks)
}

fn sigma_bound(c: &GalleryCase, exec: Execution) -> Result<Vec<Check>> {
    let (lead_g, lead_v) = make_interval_plus_lead(c.ray_length.max(20.0), c.lambda_bar);
    let graphs: Vec<(&str, MetricGraph, Potential, Point, Option<usize>)> = vec![
        ("line", make_line(c.ray_length), Potential::zero(), Point::Vertex(VertexIx(0)), None),
        ("3-star", make_star(3, c.ray_length), Potential::zero(), Point::Vertex(VertexIx(0)), None),
        ("tree", make_tree(c.branching, c.depth), Potential::zero(), Point::Vertex(VertexIx(0)), Some(0)),
        ("compact+lead", lead_g, lead_v, Point::Vertex(VertexIx(1)), None),
    ];
    let mut checks = Vec::new();
    for (name, g, v, root, extra) in &graphs {
        let radii = default_schedule(g, *root, 8)?;
        let sigma = sigma_estimate(g, v, *root, &radii, &ScanOptions { h: c.h, exec })?;
        for k in 1..=3 {
            let opts = OptimizeOptions { h: c.h, exec, max_cuts: extra.map(|x| k + x), ..Default::default() };
            let best = optimize_k(g, v, k, &opts)?;
            let errs = best.report.error_indicator_sum() + sigma.trend.iter().map(|(_, e)| e.error_indicator).sum::<f64>();
            checks.push(Check::at_most(&format!("{name} k={k}"), best.report.energy, sigma.lower, 2.0 * errs, "Lambda_k <= Sigma"));
        }
    }
    Ok(checks)
}

fn ticket_zones(c: &GalleryCase, exec: Execution) -> Result<Vec<Check>> {
    let g = make_half_line(c.ray_length);
    let v = Potential::zero();
    let root = Point::Vertex(VertexIx(0));
    let mut checks = Vec::new();
    for target in [PI * PI, 4.0 * PI * PI] {
        let opts = ZoneOptions { h: c.h, exec, ..Default::default() };
        let rings = build_equipartition_rings(&g, &v, root, target, 5, &opts)?;
        let width = PI / target.sqrt();
        for r in &rings.rings {
            checks.push(Check::abs(&format!("lambda={target:.4} ring {} width", r.index), r.r_outer - r.r_inner, width, 1e-3, "pi/sqrt(lambda)"));
            checks.push(Check::rel(&format!("lambda={target:.4} ring {} energy", r.index), r.energy.lambda_extrapolated, target, 1e-3, "equipartition"));
        }
    }
    Ok(checks)
}

fn minmax_optimizer(c: &GalleryCase, exec: Execution) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let g = make_interval(1.0, None, None);
    let opts = OptimizeOptions { h: c.h, exec, ..Default::default() };
    let best = optimize_k(&g, &Potential::zero(), 3, &opts)?;
    let mut cuts: Vec<f64> = best.offsets.concat();
    cuts.sort_by(f64::total_cmp);
    checks.push(Check::abs("interval cut count", cuts.len() as f64, 2.0, 0.0, "equalisation"));
    if cuts.len() == 2 {
        checks.push(Check::abs("interval cut 1", cuts[0], 0.25, 1e-3, "equalisation"));
        checks.push(Check::abs("interval cut 2", cuts[1], 0.75, 1e-3, "equalisation"));
    }
    checks.push(Check::rel("interval Lambda_3", best.report.energy, 4.0 * PI * PI, 1e-2, "equalisation"));
    let l = c.ray_length;
    let star = make_star(3, l);
    let best = optimize_k(&star, &Potential::zero(), 3, &opts)?;
    checks.push(Check::rel("3-star Lambda_3", best.report.energy, PI * PI / (4.0 * l * l), 1e-2, "one Dirichlet end ray"));
    Ok(checks)
}

fn glued_tree_star(c: &GalleryCase, exec: Execution) -> Result<Vec<Check>> {
    let k = 3;
    let t2 = theta(c.branching).powi(2);
    let g = make_glued_tree_star(c.branching, c.depth, k);
    let v = Potential::zero();
    let ev = eigenvalue_estimates(&g, &Subgraph::whole(&g), &v, c.h, k)?;
    let mut checks = vec![
        Check::abs("lambda_2", ev[1].lambda_extrapolated, t2, 1e-2, "antisymmetric pendant modes"),
        Check::abs("lambda_3", ev[2].lambda_extrapolated, t2, 1e-2, "antisymmetric pendant modes"),
        Check::at_most("lambda_1 <= lambda_2", ev[0].lambda_extrapolated, ev[1].lambda_extrapolated, 1e-8, "interlacing"),
    ];
    let pendants = glued_pendant_edges(&g, k);
    let centre = Point::Vertex(VertexIx(0));
    let s = Subgraph::new(&g, Subgraph::whole(&g).pieces().to_vec(), &[centre])?;
    let clusters: Vec<Subgraph> = s
        .components(&g)
        .into_iter()
        .filter(|comp| comp.pieces().iter().all(|p| pendants.contains(&p.edge)))
        .collect();
    let part = Partition::new(&g, clusters, vec![centre]);
    let rep = energy(&g, &part, &v, c.h, exec)?;
    checks.push(Check::abs("pendant partition energy", rep.energy, t2, 1e-2, "equipartition"));
    let probes = vertex_cut_probes(&g, &v, k, VertexIx(0), &[1e-3, 1e-2, 0.1, 0.5], c.h)?;
    let tol = 2.0 * rep.error_indicator_sum() + 1e-9;
    let beaten = probes.iter().filter(|p| p.energy.is_some_and(|e| e < rep.energy - tol - 2.0 * p.error)).count();
    checks.push(Check::abs("probes beating the pendant partition", beaten as f64, 0.0, 0.0, "minimality"));
    Ok(checks)
}

/// Deterministic low-discrepancy sequence in `[0, 1)`.
fn weyl(i: usize, dim: usize) -> f64 {
    const ALPHAS: [f64; 4] = [0.618_033_988_749_894_9, 0.414_213_562_373_095_1, 0.732_050_807_568_877_2, 0.236_067_977_499_789_7];
    ((i + 1) as f64 * ALPHAS[dim % ALPHAS.len()]).fract()
}

fn random_point(g: &MetricGraph, i: usize) -> Point {
    let e = ((weyl(i, 0) * g.edge_count() as f64) as usize).min(g.edge_count() - 1);
    let t = 0.05 + 0.9 * weyl(i, 1);
    g.canonical(EdgeIx(e), t * g.length(EdgeIx(e)))
}

/// Nested pair `inner ⊂ outer`: a ball and its intersection with a second ball.
pub fn nested_pair(g: &MetricGraph, i: usize, u: [f64; 4]) -> Result<Option<(Subgraph, Subgraph)>> {
    let x = random_point(g, i);
    let reach = g.distances_from(x)?.reach(g);
    let outer = ball_in(g, &g.distances_from(x)?, (0.2 + 0.8 * u[0]) * reach);
    let y = random_point(g, i + 7919);
    let inner = outer.intersect(g, &ball(g, y, (0.1 + 0.9 * u[1]) * reach)?);
    if inner.is_empty() || inner.volume() < 1e-3 {
        return Ok(None);
    }
    Ok(Some((outer, inner)))
}

fn monotonicity_shift(c: &GalleryCase, exec: Execution) -> Result<Vec<Check>> {
    let (lead_g, lead_v) = make_interval_plus_lead(20.0, c.lambda_bar);
    let graphs = vec![
        ("line", make_line(5.0), Potential::zero()),
        ("3-star", make_star(3, 5.0), Potential::zero()),
        ("cycle", make_cycle(1.0), Potential::zero()),
        ("tree", make_tree(c.branching, c.depth), Potential::zero()),
        ("compact+lead", lead_g, lead_v),
    ];
    let mut checks = Vec::new();
    for (name, g, v) in &graphs {
        let idx: Vec<usize> = (0..200).collect();
        let outcomes = parallel::map(exec, &idx, |&i| -> Result<Option<bool>> {
            let u = [weyl(i, 2), weyl(i, 3), 0.0, 0.0];
            let Some((outer, inner)) = nested_pair(g, i, u)? else { return Ok(None) };
            let a = energy_estimate(g, &outer, v, c.h)?;
            let b = energy_estimate(g, &inner, v, c.h)?;
            Ok(Some(b.lambda_extrapolated >= a.lambda_extrapolated - 2.0 * (a.error_indicator + b.error_indicator)))
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
        let pairs: Vec<bool> = outcomes.into_iter().flatten().take(50).collect();
        checks.push(Check::abs(&format!("{name} nested pairs"), pairs.len() as f64, 50.0, 0.0, "sample size"));
        let violations = pairs.iter().filter(|ok| !**ok).count();
        checks.push(Check::abs(&format!("{name} nested violations"), violations as f64, 0.0, 0.0, "domain monotonicity"));

        let s = Subgraph::whole(g);
        let shift = 1.7;
        let base = crate::spectral::energy_single(g, &s, v, c.h)?;
        let moved = crate::spectral::energy_single(g, &s, &v.shifted(shift), c.h)?;
        checks.push(Check::abs(&format!("{name} shift"), moved - base, shift, 1e-10, "constant shift of the form"));
    }
    Ok(checks)
}

fn compact_plus_lead(c: &GalleryCase, exec: Execution) -> Result<Vec<Check>> {
    let lambda_bar = c.lambda_bar;
    let (g, v) = make_interval_plus_lead(c.ray_length, lambda_bar);
    let opts = OptimizeOptions { h: c.h, exec, ..Default::default() };
    let compact = make_interval(1.0, None, None);
    let mut k = 0;
    let mut compact_energies = Vec::new();
    for j in 1..=4 {
        let e = optimize_k(&compact, &Potential::zero(), j, &opts)?.report.energy;
        compact_energies.push(e);
        if e <= lambda_bar {
            k = j;
        } else {
            break;
        }
    }
    let ell = 1;
    let mut checks = vec![Check::abs("k from the compact part", k as f64, 2.0, 0.0, "Lambda_k <= lambda_bar < Lambda_{k+1}")];
    let k_star = (k + ell).saturating_sub(2).max(k).max(ell);
    for j in 1..=k_star {
        let e = optimize_k(&g, &v, j, &opts)?.report.energy;
        checks.push(Check::at_most(&format!("j={j} energy"), e, lambda_bar, 0.0, "existence below lambda_bar"));
    }
    let j = k + ell + 2;
    let e = optimize_k(&g, &v, j, &opts)?.report.energy;
    checks.push(Check::abs(&format!("j={j} energy near lambda_bar"), e, lambda_bar, 1e-2, "no minimal partition"));
    checks.push(Check::at_least(&format!("j={j} energy not below lambda_bar"), e, lambda_bar, 1e-2, "no minimal partition"));
    Ok(checks)
}
