//! Two-stage search for low-energy k-partitions.
//!
//! Stage one enumerates cut topologies (a number of cuts per edge), places
//! the cuts evenly and scores every topology on a coarse mesh. Stage two
//! takes the best few and moves the cuts continuously: coordinate descent
//! with a golden-section line search, followed by an equalisation pass that
//! balances the two clusters meeting at each cut.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{snap_tol, EdgeIx, MetricGraph, Point};
use crate::parallel::{self, Execution};
use crate::potential::Potential;
use crate::spectral::{energy_estimate, energy_single, DEFAULT_MESH};
use crate::subgraph::{Piece, Subgraph};

use super::{energy, EnergyReport, Partition};

/// Weight of the mean cluster energy added to the maximum; it breaks the
/// plateaus of the pure maximum.
const MEAN_WEIGHT: f64 = 1e-3;
const GOLDEN: f64 = 0.618_033_988_749_894_8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizeOptions {
    pub h: f64,
    /// Cap on the total number of cuts; `None` means `k + 2`.
    pub max_cuts: Option<usize>,
    /// Number of screened topologies that are refined.
    pub refine: usize,
    /// Refuse to enumerate more topologies than this.
    pub max_topologies: usize,
    /// Coordinate-descent sweeps per topology.
    pub sweeps: usize,
    pub equalize_sweeps: usize,
    /// Relative energy gap below which neighbouring clusters count as equal.
    pub tol: f64,
    /// Golden-section stopping width relative to the edge length.
    pub line_tol: f64,
    pub exec: Execution,
}

impl Default for OptimizeOptions {
    fn default() -> Self {
        OptimizeOptions {
            h: DEFAULT_MESH,
            max_cuts: None,
            refine: 6,
            max_topologies: 5000,
            sweeps: 12,
            equalize_sweeps: 200,
            tol: 1e-3,
            line_tol: 1e-6,
            exec: Execution::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OptimizeResult {
    pub partition: Partition,
    pub report: EnergyReport,
    /// Cut count per edge, indexed like the graph's edges.
    pub topology: Vec<usize>,
    pub topology_id: usize,
    pub topologies: usize,
    /// Cut offsets per edge after refinement.
    pub offsets: Vec<Vec<f64>>,
}

fn binomial(n: u128, r: u128) -> u128 {
    let r = r.min(n - r);
    let mut acc: u128 = 1;
    for i in 0..r {
        acc = acc.saturating_mul(n - i) / (i + 1);
    }
    acc
}

/// Number of cut-count vectors over `edges` edges with total at most `max_cuts`.
pub fn count_topologies(edges: usize, max_cuts: usize) -> u128 {
    binomial((edges + max_cuts) as u128, max_cuts as u128)
}

/// Cut-count vectors ordered by total, then lexicographically descending.
pub fn enumerate_topologies(edges: usize, max_cuts: usize) -> Vec<Vec<usize>> {
    fn rec(i: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i + 1 == cur.len() {
            cur[i] = left;
            out.push(cur.clone());
            return;
        }
        for c in (0..=left).rev() {
            cur[i] = c;
            rec(i + 1, left - c, cur, out);
        }
    }
    let mut out = Vec::new();
    for total in 0..=max_cuts {
        let mut cur = vec![0; edges];
        rec(0, total, &mut cur, &mut out);
    }
    out
}

fn even_cuts(g: &MetricGraph, topology: &[usize]) -> Vec<Vec<f64>> {
    topology
        .iter()
        .enumerate()
        .map(|(e, &c)| {
            let len = g.length(EdgeIx(e));
            (1..=c).map(|j| len * j as f64 / (c + 1) as f64).collect()
        })
        .collect()
}

/// Components of the cut graph and the `k` lowest-energy ones.
#[derive(Clone, Debug, PartialEq)]
pub struct CutEvaluation {
    pub components: Vec<Subgraph>,
    pub energies: Vec<f64>,
    pub errors: Vec<f64>,
    /// Indices into `components`, ordered by energy.
    pub selected: Vec<usize>,
    pub max: f64,
    pub mean: f64,
}

impl CutEvaluation {
    fn objective(&self) -> f64 {
        self.max + MEAN_WEIGHT * self.mean
    }
}

#[derive(Clone, Copy)]
enum Level {
    Coarse,
    Fine,
}

struct Evaluator<'a> {
    g: &'a MetricGraph,
    v: &'a Potential,
    k: usize,
    h: f64,
    level: Level,
    cache: HashMap<Vec<u64>, (f64, f64)>,
}

fn key(s: &Subgraph) -> Vec<u64> {
    let mut out = Vec::with_capacity(3 * s.pieces().len() + 3 * s.dirichlet_points().len());
    for p in s.pieces() {
        out.extend([p.edge.0 as u64, p.start.to_bits(), p.end.to_bits()]);
    }
    out.push(u64::MAX);
    for d in s.dirichlet_points() {
        match *d {
            Point::Vertex(v) => out.extend([0, v.0 as u64]),
            Point::Edge { edge, offset } => out.extend([1, edge.0 as u64, offset.to_bits()]),
        }
    }
    out
}

fn cut_points(g: &MetricGraph, cuts: &[Vec<f64>]) -> Vec<Point> {
    let mut pts: Vec<Point> = cuts
        .iter()
        .enumerate()
        .flat_map(|(e, ts)| ts.iter().map(move |&t| g.canonical(EdgeIx(e), t)))
        .collect();
    pts.sort_by_key(Point::sort_key);
    pts.dedup_by_key(|p| p.sort_key());
    pts
}

impl<'a> Evaluator<'a> {
    fn new(g: &'a MetricGraph, v: &'a Potential, k: usize, h: f64, level: Level) -> Self {
        Evaluator { g, v, k, h, level, cache: HashMap::new() }
    }

    fn component_energy(&mut self, s: &Subgraph) -> Result<(f64, f64)> {
        let key = key(s);
        if let Some(&e) = self.cache.get(&key) {
            return Ok(e);
        }
        let e = match self.level {
            Level::Coarse => (energy_single(self.g, s, self.v, self.h)?, 0.0),
            Level::Fine => {
                let est = energy_estimate(self.g, s, self.v, self.h)?;
                (est.lambda_extrapolated, est.error_indicator)
            }
        };
        self.cache.insert(key, e);
        Ok(e)
    }

    fn evaluate(&mut self, cuts: &[Vec<f64>]) -> Result<Option<CutEvaluation>> {
        let whole: Vec<Piece> = self
            .g
            .edges()
            .iter()
            .enumerate()
            .map(|(i, e)| Piece { edge: EdgeIx(i), start: 0.0, end: e.length })
            .collect();
        let s = Subgraph::build(self.g, whole, &cut_points(self.g, cuts));
        let components = s.components(self.g);
        if components.len() < self.k {
            return Ok(None);
        }
        let mut energies = Vec::with_capacity(components.len());
        let mut errors = Vec::with_capacity(components.len());
        for c in &components {
            let (e, err) = self.component_energy(c)?;
            energies.push(e);
            errors.push(err);
        }
        let mut order: Vec<usize> = (0..components.len()).collect();
        order.sort_by(|&a, &b| {
            energies[a]
                .total_cmp(&energies[b])
                .then_with(|| components[a].min_edge().cmp(&components[b].min_edge()))
                .then_with(|| a.cmp(&b))
        });
        order.truncate(self.k);
        let max = order.iter().map(|&i| energies[i]).fold(f64::NEG_INFINITY, f64::max);
        let mean = order.iter().map(|&i| energies[i]).sum::<f64>() / self.k as f64;
        Ok(Some(CutEvaluation { components, energies, errors, selected: order, max, mean }))
    }

    fn objective(&mut self, cuts: &[Vec<f64>]) -> Result<f64> {
        Ok(self.evaluate(cuts)?.map_or(f64::INFINITY, |e| e.objective()))
    }
}

/// Energies of the cut graph given explicit cut offsets per edge, on the fine
/// mesh with extrapolation.
pub fn evaluate_cuts(
    g: &MetricGraph,
    v: &Potential,
    k: usize,
    cuts: &[Vec<f64>],
    h: f64,
) -> Result<Option<CutEvaluation>> {
    Evaluator::new(g, v, k, h, Level::Fine).evaluate(cuts)
}

fn golden<F: FnMut(f64) -> Result<f64>>(mut f: F, lo: f64, hi: f64, tol: f64) -> Result<(f64, f64)> {
    let (mut a, mut b) = (lo, hi);
    let mut c = b - GOLDEN * (b - a);
    let mut d = a + GOLDEN * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    while b - a > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - GOLDEN * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + GOLDEN * (b - a);
            fd = f(d)?;
        }
    }
    Ok(if fc <= fd { (c, fc) } else { (d, fd) })
}

fn slots(cuts: &[Vec<f64>]) -> Vec<(usize, usize)> {
    cuts.iter()
        .enumerate()
        .flat_map(|(e, ts)| (0..ts.len()).map(move |i| (e, i)))
        .collect()
}

fn bounds(g: &MetricGraph, cuts: &[Vec<f64>], e: usize, i: usize) -> (f64, f64) {
    let lo = if i == 0 { 0.0 } else { cuts[e][i - 1] };
    let hi = if i + 1 == cuts[e].len() { g.length(EdgeIx(e)) } else { cuts[e][i + 1] };
    (lo, hi)
}

fn with_cut(cuts: &[Vec<f64>], e: usize, i: usize, t: f64) -> Vec<Vec<f64>> {
    let mut c = cuts.to_vec();
    c[e][i] = t;
    c
}

/// Components on either side of the interior cut `(e, t)`.
fn sides(ev: &CutEvaluation, e: usize, t: f64, tol: f64) -> Option<(usize, usize)> {
    let find = |left: bool| {
        ev.components.iter().position(|c| {
            c.pieces().iter().any(|p| {
                p.edge == EdgeIx(e) && if left { (p.end - t).abs() <= tol } else { (p.start - t).abs() <= tol }
            })
        })
    };
    Some((find(true)?, find(false)?))
}

struct Refiner<'a> {
    g: &'a MetricGraph,
    opts: &'a OptimizeOptions,
    eval: Evaluator<'a>,
}

impl<'a> Refiner<'a> {
    fn descend(&mut self, cuts: &mut [Vec<f64>], current: &mut f64) -> Result<()> {
        for (e, i) in slots(cuts) {
            let (lo, hi) = bounds(self.g, cuts, e, i);
            let len = self.g.length(EdgeIx(e));
            if hi - lo <= 2.0 * snap_tol(len) {
                continue;
            }
            let base = cuts.to_vec();
            let (t, ft) = golden(|t| self.eval.objective(&with_cut(&base, e, i, t)), lo, hi, self.opts.line_tol * len)?;
            let mut best = (cuts[e][i], *current);
            if ft < best.1 {
                best = (t, ft);
            }
            // cuts may sit on the end vertices of the edge
            for end in [(i == 0).then_some(0.0), (i + 1 == cuts[e].len()).then_some(len)].into_iter().flatten() {
                let f = self.eval.objective(&with_cut(&base, e, i, end))?;
                if f < best.1 {
                    best = (end, f);
                }
            }
            if best.1 < *current - 1e-12 * current.abs() {
                cuts[e][i] = best.0;
                *current = best.1;
            }
        }
        Ok(())
    }

    fn equalize(&mut self, cuts: &mut [Vec<f64>]) -> Result<()> {
        for _ in 0..self.opts.equalize_sweeps {
            let mut worst_gap: f64 = 0.0;
            let mut moved = false;
            for (e, i) in slots(cuts) {
                let len = self.g.length(EdgeIx(e));
                let tol = snap_tol(len);
                let t0 = cuts[e][i];
                if t0 <= tol || t0 >= len - tol {
                    continue;
                }
                let Some(ev) = self.eval.evaluate(cuts)? else { return Ok(()) };
                let Some((l, r)) = sides(&ev, e, t0, tol) else { continue };
                if l == r || !ev.selected.contains(&l) || !ev.selected.contains(&r) {
                    continue;
                }
                let (el, er) = (ev.energies[l], ev.energies[r]);
                let gap = (el - er).abs() / el.abs().max(er.abs()).max(f64::MIN_POSITIVE);
                worst_gap = worst_gap.max(gap);
                if gap <= self.opts.tol {
                    continue;
                }
                // the left cluster shrinks as the cut moves left, raising its energy
                let (lo, hi) = bounds(self.g, cuts, e, i);
                let (mut a, mut b) = if el > er { (t0, hi) } else { (lo, t0) };
                let mut best: Option<(f64, f64)> = None;
                for _ in 0..60 {
                    if b - a <= self.opts.line_tol * len {
                        break;
                    }
                    let mid = 0.5 * (a + b);
                    let trial = with_cut(cuts, e, i, mid);
                    let Some(tv) = self.eval.evaluate(&trial)? else { break };
                    let Some((tl, tr)) = sides(&tv, e, mid, tol) else { break };
                    if tl == tr {
                        break;
                    }
                    if tv.selected.contains(&tl)
                        && tv.selected.contains(&tr)
                        && best.is_none_or(|(_, m)| tv.max < m)
                    {
                        best = Some((mid, tv.max));
                    }
                    if tv.energies[tl] > tv.energies[tr] {
                        a = mid;
                    } else {
                        b = mid;
                    }
                }
                if let Some((t, m)) = best {
                    if m <= ev.max * (1.0 + 1e-12) && t != t0 {
                        cuts[e][i] = t;
                        moved = true;
                    }
                }
            }
            if worst_gap <= self.opts.tol || !moved {
                break;
            }
        }
        Ok(())
    }

    fn run(&mut self, topology: &[usize]) -> Result<Option<(f64, Vec<Vec<f64>>)>> {
        let mut cuts = even_cuts(self.g, topology);
        let mut current = self.eval.objective(&cuts)?;
        if !current.is_finite() {
            return Ok(None);
        }
        for _ in 0..self.opts.sweeps {
            let before = current;
            self.descend(&mut cuts, &mut current)?;
            self.equalize(&mut cuts)?;
            current = self.eval.objective(&cuts)?;
            if current >= before * (1.0 - 1e-9) - 1e-15 {
                break;
            }
        }
        let max = self.eval.evaluate(&cuts)?.map(|e| e.max);
        Ok(max.map(|m| (m, cuts)))
    }
}

/// Best k-partition found by the two-stage search.
pub fn optimize_k(g: &MetricGraph, v: &Potential, k: usize, opts: &OptimizeOptions) -> Result<OptimizeResult> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    let max_cuts = opts.max_cuts.unwrap_or(k + 2);
    let count = count_topologies(g.edge_count(), max_cuts);
    if count > opts.max_topologies as u128 {
        return Err(Error::SearchTooLarge { count: count.min(usize::MAX as u128) as usize, cap: opts.max_topologies });
    }
    let topologies = enumerate_topologies(g.edge_count(), max_cuts);
    let ids: Vec<usize> = (0..topologies.len()).collect();

    let screened = parallel::map(opts.exec, &ids, |&id| -> Result<Option<(f64, f64, usize)>> {
        let mut ev = Evaluator::new(g, v, k, 2.0 * opts.h, Level::Coarse);
        Ok(ev.evaluate(&even_cuts(g, &topologies[id]))?.map(|e| (e.max, e.mean, id)))
    });
    let mut ranked: Vec<(f64, f64, usize)> = Vec::new();
    for s in screened {
        if let Some(r) = s? {
            ranked.push(r);
        }
    }
    if ranked.is_empty() {
        return Err(Error::KUnreachable { k, max_cuts });
    }
    ranked.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)).then(a.2.cmp(&b.2)));
    ranked.truncate(opts.refine.max(1));

    let refined = parallel::map(opts.exec, &ranked, |&(_, _, id)| -> Result<Option<(f64, usize, Vec<Vec<f64>>)>> {
        let mut r = Refiner { g, opts, eval: Evaluator::new(g, v, k, opts.h, Level::Fine) };
        Ok(r.run(&topologies[id])?.map(|(m, cuts)| (m, id, cuts)))
    });
    let mut best: Option<(f64, usize, Vec<Vec<f64>>)> = None;
    for r in refined {
        if let Some(c) = r? {
            let better = match &best {
                None => true,
                Some(b) => c.0 < b.0 || (c.0 == b.0 && c.1 < b.1),
            };
            if better {
                best = Some(c);
            }
        }
    }
    let (_, id, cuts) = best.ok_or(Error::KUnreachable { k, max_cuts })?;
    let ev = Evaluator::new(g, v, k, opts.h, Level::Fine)
        .evaluate(&cuts)?
        .ok_or(Error::KUnreachable { k, max_cuts })?;
    let mut chosen = ev.selected.clone();
    chosen.sort_unstable();
    let clusters: Vec<Subgraph> = chosen.iter().map(|&i| ev.components[i].clone()).collect();
    let partition = Partition::new(g, clusters, cut_points(g, &cuts));
    let report = energy(g, &partition, v, opts.h, opts.exec)?;
    Ok(OptimizeResult {
        partition,
        report,
        topology: topologies[id].clone(),
        topology_id: id,
        topologies: topologies.len(),
        offsets: cuts,
    })
}
