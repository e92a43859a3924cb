//! Finite-element discretisation of `−Δ + V` on a subgraph and its low spectrum.
//!
//! Continuous piecewise-linear elements with a consistent mass matrix. Graph
//! vertices are shared nodes, which imposes continuity; the Kirchhoff flux
//! condition holds weakly. Dirichlet nodes are removed from the unknowns.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{MetricGraph, Point, VertexIx};
use crate::linalg::{Factor, Pattern, Symbolic};
use crate::potential::Potential;
use crate::subgraph::{Piece, Subgraph};

pub const DEFAULT_MESH: f64 = 0.05;
pub const ITERATION_CAP: usize = 10_000;
pub const RESIDUAL_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct Node {
    pub point: Point,
    pub unknown: Option<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Segment {
    pub piece: Piece,
    /// Node ids from the piece start to its end; `cells + 1` entries.
    pub nodes: Vec<usize>,
}

impl Segment {
    pub fn cells(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn spacing(&self) -> f64 {
        self.piece.length() / self.cells() as f64
    }
}

#[derive(Clone, Debug)]
pub struct Mesh {
    h: f64,
    refined: bool,
    segments: Vec<Segment>,
    nodes: Vec<Node>,
    unknowns: usize,
}

fn base_cells(len: f64, h: f64) -> (usize, bool) {
    let n = (len / h - 1e-9).ceil().max(1.0) as usize;
    if n < 2 {
        (2, true)
    } else {
        (n, false)
    }
}

impl Mesh {
    /// Mesh with `multiplier` times the cell count implied by `h` on every piece.
    pub fn build(g: &MetricGraph, s: &Subgraph, h: f64, multiplier: usize) -> Result<Self> {
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::InvalidMesh(h));
        }
        if s.is_empty() {
            return Err(Error::EmptySubgraph);
        }
        let mut nodes: Vec<Node> = Vec::new();
        let mut dirichlet: Vec<bool> = Vec::new();
        let mut vertex_node: HashMap<VertexIx, usize> = HashMap::new();
        let mut refined = false;
        let mut segments = Vec::with_capacity(s.pieces().len());
        let mut end_node = |v: Option<VertexIx>, p: Point, nodes: &mut Vec<Node>, dirichlet: &mut Vec<bool>| match v {
            Some(v) => *vertex_node.entry(v).or_insert_with(|| {
                nodes.push(Node { point: Point::Vertex(v), unknown: None });
                dirichlet.push(s.is_dirichlet_vertex(v));
                nodes.len() - 1
            }),
            None => {
                nodes.push(Node { point: p, unknown: None });
                dirichlet.push(true);
                nodes.len() - 1
            }
        };
        for &piece in s.pieces() {
            let edge = g.edge(piece.edge);
            let (n0, forced) = base_cells(piece.length(), h);
            refined |= forced;
            let cells = n0 * multiplier;
            let mut ids = Vec::with_capacity(cells + 1);
            let start_v = (piece.start == 0.0).then_some(edge.from);
            ids.push(end_node(
                start_v,
                Point::Edge { edge: piece.edge, offset: piece.start },
                &mut nodes,
                &mut dirichlet,
            ));
            let step = piece.length() / cells as f64;
            for i in 1..cells {
                nodes.push(Node {
                    point: Point::Edge { edge: piece.edge, offset: piece.start + step * i as f64 },
                    unknown: None,
                });
                dirichlet.push(false);
                ids.push(nodes.len() - 1);
            }
            let end_v = (piece.end == edge.length).then_some(edge.to);
            ids.push(end_node(
                end_v,
                Point::Edge { edge: piece.edge, offset: piece.end },
                &mut nodes,
                &mut dirichlet,
            ));
            segments.push(Segment { piece, nodes: ids });
        }
        let mut unknowns = 0;
        for (node, &d) in nodes.iter_mut().zip(&dirichlet) {
            if !d {
                node.unknown = Some(unknowns);
                unknowns += 1;
            }
        }
        Ok(Mesh { h, refined, segments, nodes, unknowns })
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// Whether some piece was shorter than `h` and got the minimum two cells.
    pub fn refined(&self) -> bool {
        self.refined
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn unknowns(&self) -> usize {
        self.unknowns
    }

    pub fn is_dirichlet(&self, node: usize) -> bool {
        self.nodes[node].unknown.is_none()
    }

    /// Node values of an unknown vector, zero at Dirichlet nodes.
    pub fn expand(&self, x: &[f64]) -> Vec<f64> {
        self.nodes.iter().map(|n| n.unknown.map_or(0.0, |u| x[u])).collect()
    }

    /// Unknown vector of a node-sampled function, or an error if it does not
    /// vanish at the Dirichlet nodes.
    pub fn restrict(&self, f: &[f64]) -> Result<Vec<f64>> {
        if f.len() != self.nodes.len() {
            return Err(Error::InvalidArgument(format!(
                "expected {} node values, got {}",
                self.nodes.len(),
                f.len()
            )));
        }
        let mut x = vec![0.0; self.unknowns];
        for (n, &v) in self.nodes.iter().zip(f) {
            match n.unknown {
                Some(u) => x[u] = v,
                None if v != 0.0 => {
                    return Err(Error::InvalidArgument("function does not vanish at a Dirichlet node".into()))
                }
                None => {}
            }
        }
        Ok(x)
    }

    /// Flux balance `Σ (u_nb − u_v)/h_c` at every unconstrained graph vertex.
    pub fn kirchhoff_residuals(&self, values: &[f64]) -> Vec<(VertexIx, f64)> {
        let mut acc: HashMap<usize, f64> = HashMap::new();
        for seg in &self.segments {
            let hc = seg.spacing();
            let last = seg.nodes.len() - 1;
            for (end, nb) in [(0, 1), (last, last - 1)] {
                let id = seg.nodes[end];
                if let (Point::Vertex(_), Some(_)) = (self.nodes[id].point, self.nodes[id].unknown) {
                    *acc.entry(id).or_insert(0.0) += (values[seg.nodes[nb]] - values[id]) / hc;
                }
            }
        }
        let mut out: Vec<(VertexIx, f64)> = acc
            .into_iter()
            .filter_map(|(id, r)| match self.nodes[id].point {
                Point::Vertex(v) => Some((v, r)),
                Point::Edge { .. } => None,
            })
            .collect();
        out.sort_by_key(|&(v, _)| v);
        out
    }
}

// ∫_{s0}^{s1} of (1−s)², s(1−s), s² ds
fn shape_integrals(s0: f64, s1: f64) -> (f64, f64, f64) {
    let aa = ((1.0 - s0).powi(3) - (1.0 - s1).powi(3)) / 3.0;
    let ab = (s1 * s1 / 2.0 - s1.powi(3) / 3.0) - (s0 * s0 / 2.0 - s0.powi(3) / 3.0);
    let bb = (s1.powi(3) - s0.powi(3)) / 3.0;
    (aa, ab, bb)
}

/// Stiffness (with the potential term) and mass on the unknowns of a mesh.
#[derive(Clone, Debug)]
pub struct DiscreteOperator {
    pattern: Pattern,
    symbolic: Symbolic,
    k: Vec<f64>,
    m: Vec<f64>,
    vmin: f64,
    k_scale: f64,
    m_scale: f64,
}

/// An eigenpair of the discrete pencil.
#[derive(Clone, Debug)]
pub struct Eigenpair {
    pub lambda: f64,
    pub vector: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
}

pub fn assemble(g: &MetricGraph, s: &Subgraph, v: &Potential, h: f64) -> Result<(Mesh, DiscreteOperator)> {
    let mesh = Mesh::build(g, s, h, 1)?;
    let op = DiscreteOperator::new(&mesh, v);
    Ok((mesh, op))
}

impl DiscreteOperator {
    pub fn new(mesh: &Mesh, v: &Potential) -> Self {
        let mut pairs = Vec::new();
        for seg in &mesh.segments {
            for w in seg.nodes.windows(2) {
                if let (Some(a), Some(b)) = (mesh.nodes[w[0]].unknown, mesh.nodes[w[1]].unknown) {
                    pairs.push((a, b));
                }
            }
        }
        let pattern = Pattern::new(mesh.unknowns, &pairs);
        let mut k = vec![0.0; pattern.nnz()];
        let mut m = vec![0.0; pattern.nnz()];
        let mut vmin = f64::INFINITY;
        for seg in &mesh.segments {
            let hc = seg.spacing();
            let e = seg.piece.edge;
            for (c, w) in seg.nodes.windows(2).enumerate() {
                let x0 = seg.piece.start + hc * c as f64;
                let x1 = if c + 1 == seg.cells() { seg.piece.end } else { x0 + hc };
                let (mut vaa, mut vab, mut vbb) = (0.0, 0.0, 0.0);
                for (a, b, val) in v.segments(e, x0, x1) {
                    vmin = vmin.min(val);
                    if val != 0.0 {
                        let (ia, iab, ib) = shape_integrals(((a - x0) / hc).clamp(0.0, 1.0), ((b - x0) / hc).clamp(0.0, 1.0));
                        vaa += val * hc * ia;
                        vab += val * hc * iab;
                        vbb += val * hc * ib;
                    }
                }
                let ua = mesh.nodes[w[0]].unknown;
                let ub = mesh.nodes[w[1]].unknown;
                let local = [
                    (ua, ua, 1.0 / hc + vaa, hc / 3.0),
                    (ua, ub, -1.0 / hc + vab, hc / 6.0),
                    (ub, ua, -1.0 / hc + vab, hc / 6.0),
                    (ub, ub, 1.0 / hc + vbb, hc / 3.0),
                ];
                for (i, j, kv, mv) in local {
                    if let (Some(i), Some(j)) = (i, j) {
                        let slot = pattern.slot(i, j).expect("entry in pattern");
                        k[slot] += kv;
                        m[slot] += mv;
                    }
                }
            }
        }
        let symbolic = Symbolic::analyse(&pattern);
        let diag_max = |vals: &[f64]| {
            (0..pattern.n())
                .filter_map(|j| pattern.slot(j, j).map(|p| vals[p].abs()))
                .fold(0.0_f64, f64::max)
        };
        let k_scale = diag_max(&k);
        let m_scale = diag_max(&m);
        DiscreteOperator {
            pattern,
            symbolic,
            k,
            m,
            vmin: if vmin.is_finite() { vmin } else { 0.0 },
            k_scale,
            m_scale,
        }
    }

    pub fn dim(&self) -> usize {
        self.pattern.n()
    }

    pub fn pattern(&self) -> &Pattern {
        &self.pattern
    }

    pub fn stiffness(&self) -> &[f64] {
        &self.k
    }

    pub fn mass(&self) -> &[f64] {
        &self.m
    }

    fn shifted(&self, sigma: f64) -> Vec<f64> {
        self.k.iter().zip(&self.m).map(|(k, m)| k - sigma * m).collect()
    }

    /// Number of discrete eigenvalues strictly below `sigma`.
    pub fn count_below(&self, sigma: f64) -> usize {
        Factor::new(&self.pattern, &self.symbolic, &self.shifted(sigma)).negative_pivots()
    }

    pub fn rayleigh(&self, x: &[f64]) -> f64 {
        self.pattern.quadratic(&self.k, x) / self.pattern.quadratic(&self.m, x)
    }

    fn m_normalise(&self, x: &mut [f64]) {
        let n = self.pattern.quadratic(&self.m, x).sqrt();
        if n > 0.0 {
            x.iter_mut().for_each(|v| *v /= n);
        }
    }

    /// Normwise backward error of `(lambda, x)`.
    pub fn residual(&self, lambda: f64, x: &[f64]) -> f64 {
        let n = self.dim();
        let mut kx = vec![0.0; n];
        let mut mx = vec![0.0; n];
        self.pattern.matvec(&self.k, x, &mut kx);
        self.pattern.matvec(&self.m, x, &mut mx);
        let num: f64 = kx.iter().zip(&mx).map(|(a, b)| (a - lambda * b).powi(2)).sum::<f64>().sqrt();
        if num == 0.0 {
            return 0.0;
        }
        let xn: f64 = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        num / ((self.k_scale + lambda.abs() * self.m_scale) * xn)
    }

    /// Lower bound strictly below the spectrum.
    fn floor(&self) -> f64 {
        self.vmin - 1e-3 * self.vmin.abs().max(1.0)
    }

    /// Smallest eigenpair by inertia bracketing followed by inverse iteration.
    pub fn ground_state(&self) -> Result<Eigenpair> {
        let n = self.dim();
        if n == 0 {
            return Err(Error::EmptySubgraph);
        }
        let ones = vec![1.0; n];
        let mut lo = self.floor();
        let mut hi = self.rayleigh(&ones);
        hi += 1e-12 * hi.abs().max(1.0);
        let mut width = 1e-4;
        let mut x = ones;
        self.m_normalise(&mut x);
        let mut iterations = 0;
        let mut residual = f64::INFINITY;
        let mut lambda = hi;
        loop {
            while hi - lo > width * lo.abs().max(hi.abs()).max(1e-8) {
                let mid = 0.5 * (lo + hi);
                if self.count_below(mid) >= 1 {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            let factor = Factor::new(&self.pattern, &self.symbolic, &self.shifted(lo));
            let mut checkpoint = residual;
            let mut mx = vec![0.0; n];
            for _ in 0..200 {
                iterations += 1;
                self.pattern.matvec(&self.m, &x, &mut mx);
                factor.solve(&mut mx);
                std::mem::swap(&mut x, &mut mx);
                self.m_normalise(&mut x);
                lambda = self.rayleigh(&x);
                residual = self.residual(lambda, &x);
                if residual <= RESIDUAL_TOL {
                    fix_sign(&mut x);
                    return Ok(Eigenpair { lambda, vector: x, residual, iterations });
                }
                if iterations % 50 == 0 {
                    if residual > 0.1 * checkpoint {
                        break;
                    }
                    checkpoint = residual;
                }
                if iterations >= ITERATION_CAP {
                    return Err(Error::NotConverged { iterations, residual });
                }
            }
            // slow convergence: tighten the bracket and restart from the current vector
            hi = hi.min(lambda + 1e-12 * lambda.abs().max(1.0));
            width *= 1e-3;
            if width < 1e-15 {
                return Err(Error::NotConverged { iterations, residual });
            }
        }
    }

    /// The `j`-th eigenvalue (1-based, with multiplicity) by bisection on inertia.
    pub fn eigenvalue(&self, j: usize) -> Result<f64> {
        let n = self.dim();
        if j == 0 || j > n {
            return Err(Error::TooManyModes { requested: j, available: n });
        }
        let mut lo = self.floor();
        let mut hi = self.rayleigh(&vec![1.0; n]).max(self.vmin + 1.0);
        while self.count_below(hi) < j {
            hi = lo + 2.0 * (hi - lo);
        }
        for _ in 0..200 {
            if hi - lo <= 1e-12 * lo.abs().max(hi.abs()) + 1e-14 {
                break;
            }
            let mid = 0.5 * (lo + hi);
            if self.count_below(mid) >= j {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }
}

fn fix_sign(x: &mut [f64]) {
    let scale = x.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if let Some(first) = x.iter().find(|v| v.abs() > 1e-12 * scale) {
        if *first < 0.0 {
            x.iter_mut().for_each(|v| *v = -*v);
        }
    }
}

/// Eigenvalue at `h`, at `h/2`, and the Richardson combination.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyEstimate {
    pub lambda_h: f64,
    pub lambda_half: f64,
    pub lambda_extrapolated: f64,
    pub error_indicator: f64,
}

impl EnergyEstimate {
    pub fn from_pair(lambda_h: f64, lambda_half: f64) -> Self {
        EnergyEstimate {
            lambda_h,
            lambda_half,
            lambda_extrapolated: (4.0 * lambda_half - lambda_h) / 3.0,
            error_indicator: (lambda_h - lambda_half).abs(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NodeSample {
    pub point: Point,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroundStateResult {
    pub lambda_h: f64,
    pub lambda_half: f64,
    pub lambda_extrapolated: f64,
    pub error_indicator: f64,
    pub residual: f64,
    pub iterations: usize,
    /// Some piece was shorter than `h` and was meshed with two cells.
    pub refined: bool,
    /// The ground state is (numerically) not simple.
    pub degenerate: bool,
    /// Ground state on the `h` mesh, unit mass norm, first nonzero entry positive.
    pub eigenfunction: Vec<NodeSample>,
}

impl GroundStateResult {
    pub fn estimate(&self) -> EnergyEstimate {
        EnergyEstimate {
            lambda_h: self.lambda_h,
            lambda_half: self.lambda_half,
            lambda_extrapolated: self.lambda_extrapolated,
            error_indicator: self.error_indicator,
        }
    }
}

fn solve_level(g: &MetricGraph, s: &Subgraph, v: &Potential, h: f64, mult: usize) -> Result<(Mesh, DiscreteOperator, Eigenpair)> {
    let mesh = Mesh::build(g, s, h, mult)?;
    let op = DiscreteOperator::new(&mesh, v);
    let pair = op.ground_state()?;
    Ok((mesh, op, pair))
}

pub fn ground_energy(g: &MetricGraph, s: &Subgraph, v: &Potential, h: f64) -> Result<GroundStateResult> {
    let (mesh, op, pair) = solve_level(g, s, v, h, 1)?;
    let (_, _, half) = solve_level(g, s, v, h, 2)?;
    let est = EnergyEstimate::from_pair(pair.lambda, half.lambda);
    let probe = pair.lambda + 1e-6 * pair.lambda.abs().max(1.0);
    let degenerate = op.dim() > 1 && op.count_below(probe) >= 2;
    let values = mesh.expand(&pair.vector);
    let eigenfunction = mesh
        .nodes()
        .iter()
        .zip(values)
        .map(|(n, value)| NodeSample { point: n.point, value })
        .collect();
    Ok(GroundStateResult {
        lambda_h: est.lambda_h,
        lambda_half: est.lambda_half,
        lambda_extrapolated: est.lambda_extrapolated,
        error_indicator: est.error_indicator,
        residual: pair.residual.max(half.residual),
        iterations: pair.iterations + half.iterations,
        refined: mesh.refined(),
        degenerate,
        eigenfunction,
    })
}

/// Ground energy without eigenfunction samples.
pub fn energy_estimate(g: &MetricGraph, s: &Subgraph, v: &Potential, h: f64) -> Result<EnergyEstimate> {
    let (_, _, a) = solve_level(g, s, v, h, 1)?;
    let (_, _, b) = solve_level(g, s, v, h, 2)?;
    Ok(EnergyEstimate::from_pair(a.lambda, b.lambda))
}

/// Ground energy on a single mesh, used for coarse screening.
pub fn energy_single(g: &MetricGraph, s: &Subgraph, v: &Potential, h: f64) -> Result<f64> {
    Ok(solve_level(g, s, v, h, 1)?.2.lambda)
}

/// The lowest `count` eigenvalues at `h` and `h/2`.
pub fn eigenvalue_estimates(
    g: &MetricGraph,
    s: &Subgraph,
    v: &Potential,
    h: f64,
    count: usize,
) -> Result<Vec<EnergyEstimate>> {
    let level = |mult| -> Result<Vec<f64>> {
        let mesh = Mesh::build(g, s, h, mult)?;
        let op = DiscreteOperator::new(&mesh, v);
        (1..=count).map(|j| op.eigenvalue(j)).collect()
    };
    let a = level(1)?;
    let b = level(2)?;
    Ok(a.into_iter().zip(b).map(|(x, y)| EnergyEstimate::from_pair(x, y)).collect())
}

/// The lowest `count` eigenvalues, each Richardson-extrapolated.
pub fn eigenvalues_below(g: &MetricGraph, s: &Subgraph, v: &Potential, h: f64, count: usize) -> Result<Vec<f64>> {
    Ok(eigenvalue_estimates(g, s, v, h, count)?
        .into_iter()
        .map(|e| e.lambda_extrapolated)
        .collect())
}

/// Rayleigh quotient of a node-sampled function on the mesh of `assemble`.
pub fn rayleigh(mesh: &Mesh, op: &DiscreteOperator, f: &[f64]) -> Result<f64> {
    let x = mesh.restrict(f)?;
    if x.iter().all(|&v| v == 0.0) {
        return Err(Error::InvalidArgument("zero function".into()));
    }
    Ok(op.rayleigh(&x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{EdgeSpec, GraphSpec, TruncatedEnd, TruncatedEndSpec, EndCondition};
    use std::f64::consts::PI;

    fn interval(len: f64, free_end: bool) -> MetricGraph {
        let mut spec = GraphSpec {
            vertices: vec![0, 1],
            edges: vec![EdgeSpec { id: 0, from: 0, to: 1, length: len }],
            truncated_ends: vec![TruncatedEndSpec::Bare(0)],
            ..Default::default()
        };
        spec.truncated_ends.push(TruncatedEndSpec::Full(TruncatedEnd {
            vertex: 1,
            condition: if free_end { EndCondition::Free } else { EndCondition::Dirichlet },
            tag: String::new(),
        }));
        MetricGraph::build(&spec).unwrap()
    }

    fn cycle() -> MetricGraph {
        MetricGraph::build(&GraphSpec {
            vertices: vec![0],
            edges: vec![EdgeSpec { id: 0, from: 0, to: 0, length: 1.0 }],
            ..Default::default()
        })
        .unwrap()
    }

    #[test]
    fn interval_assembly_is_tridiagonal() {
        let g = interval(1.0, false);
        let (mesh, op) = assemble(&g, &Subgraph::whole(&g), &Potential::zero(), 0.25).unwrap();
        assert_eq!(mesh.unknowns(), 3);
        assert_eq!(op.pattern().nnz(), 7);
        let s = op.pattern().slot(0, 1).unwrap();
        assert!((op.stiffness()[s] + 4.0).abs() < 1e-12);
        let d = op.pattern().slot(1, 1).unwrap();
        assert!((op.stiffness()[d] - 8.0).abs() < 1e-12);
    }

    #[test]
    fn hat_function_quotient_is_twelve() {
        let g = interval(1.0, false);
        let (mesh, op) = assemble(&g, &Subgraph::whole(&g), &Potential::zero(), 0.5).unwrap();
        let f: Vec<f64> = mesh.nodes().iter().map(|n| if n.unknown.is_some() { 1.0 } else { 0.0 }).collect();
        assert!((rayleigh(&mesh, &op, &f).unwrap() - 12.0).abs() < 1e-12);
    }

    #[test]
    fn dirichlet_interval_ground_energy() {
        let g = interval(1.0, false);
        let r = ground_energy(&g, &Subgraph::whole(&g), &Potential::zero(), 0.02).unwrap();
        assert!((r.lambda_extrapolated - PI * PI).abs() < 1e-5, "{r:?}");
        assert!(r.residual <= RESIDUAL_TOL);
        assert!(!r.degenerate);
    }

    #[test]
    fn free_end_interval_ground_energy() {
        let g = interval(2.0, true);
        let r = ground_energy(&g, &Subgraph::whole(&g), &Potential::zero(), 0.02).unwrap();
        assert!((r.lambda_extrapolated - PI * PI / 16.0).abs() < 1e-6);
    }

    #[test]
    fn cycle_has_zero_ground_energy() {
        let g = cycle();
        let r = ground_energy(&g, &Subgraph::whole(&g), &Potential::zero(), 0.05).unwrap();
        assert!(r.lambda_extrapolated.abs() < 1e-10);
        // the constant function
        let vals: Vec<f64> = r.eigenfunction.iter().map(|s| s.value).collect();
        assert!(vals.iter().all(|v| (v - vals[0]).abs() < 1e-8 && *v > 0.0));
    }

    #[test]
    fn three_lowest_dirichlet_modes() {
        let g = interval(1.0, false);
        let ev = eigenvalues_below(&g, &Subgraph::whole(&g), &Potential::zero(), 0.01, 3).unwrap();
        for (k, l) in ev.iter().enumerate() {
            let exact = ((k + 1) as f64 * PI).powi(2);
            assert!((l - exact).abs() / exact < 1e-5, "{k}: {l}");
        }
        assert!(eigenvalues_below(&g, &Subgraph::whole(&g), &Potential::zero(), 0.5, 2).is_err());
    }

    #[test]
    fn kirchhoff_residual_shrinks_with_h() {
        let g = MetricGraph::build(&GraphSpec {
            vertices: vec![0, 1, 2, 3],
            edges: (0..3).map(|i| EdgeSpec { id: i, from: 0, to: i + 1, length: 1.0 + i as f64 * 0.3 }).collect(),
            truncated_ends: vec![TruncatedEndSpec::Bare(1), TruncatedEndSpec::Bare(2), TruncatedEndSpec::Bare(3)],
            ..Default::default()
        })
        .unwrap();
        let s = Subgraph::whole(&g);
        let res = |h: f64| {
            let mesh = Mesh::build(&g, &s, h, 1).unwrap();
            let op = DiscreteOperator::new(&mesh, &Potential::zero());
            let pair = op.ground_state().unwrap();
            mesh.kirchhoff_residuals(&mesh.expand(&pair.vector))[0].1.abs()
        };
        let (a, b) = (res(0.05), res(0.025));
        assert!(a / b > 1.5, "{a} {b}");
    }
}
