//! Metric graphs, points on them and the path metric.
//!
//! Every edge is a compact interval `[0, length]`. Unbounded ends are stored
//! as truncations: the end vertex is tagged with a provenance string and the
//! boundary condition used at the cut.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potential::PotentialSpec;

/// Relative tolerance used to snap offsets onto vertices and to discard
/// zero-length pieces.
pub const SNAP: f64 = 1e-10;

pub(crate) fn snap_tol(length: f64) -> f64 {
    SNAP * length.max(1.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct VertexIx(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EdgeIx(pub usize);

/// Boundary condition imposed where an unbounded end was cut off.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EndCondition {
    /// Functions vanish at the truncation vertex. The truncated graph is then
    /// a subgraph of the infinite one, so ground energies are overestimated.
    #[default]
    Dirichlet,
    /// Natural (Neumann-type) condition at the truncation vertex.
    Free,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TruncatedEnd {
    pub vertex: u64,
    #[serde(default)]
    pub condition: EndCondition,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub tag: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TruncatedEndSpec {
    Bare(u64),
    Full(TruncatedEnd),
}

impl TruncatedEndSpec {
    fn into_end(self) -> TruncatedEnd {
        match self {
            TruncatedEndSpec::Bare(vertex) => TruncatedEnd {
                vertex,
                condition: EndCondition::Dirichlet,
                tag: String::new(),
            },
            TruncatedEndSpec::Full(end) => end,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeSpec {
    pub id: u64,
    pub from: u64,
    pub to: u64,
    pub length: f64,
}

/// On-disk graph description. See the README for the schema.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct GraphSpec {
    pub vertices: Vec<u64>,
    pub edges: Vec<EdgeSpec>,
    #[serde(default)]
    pub truncated_ends: Vec<TruncatedEndSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub potential: Vec<PotentialSpec>,
}

impl GraphSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Edge {
    pub id: u64,
    pub from: VertexIx,
    pub to: VertexIx,
    pub length: f64,
}

/// Which end of an edge meets a vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum End {
    Tail,
    Head,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeEnd {
    pub edge: EdgeIx,
    pub end: End,
}

/// A point of the metric space. Offsets at 0 or at the edge length are
/// always stored as the corresponding vertex.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Point {
    Vertex(VertexIx),
    Edge { edge: EdgeIx, offset: f64 },
}

impl Point {
    pub(crate) fn sort_key(&self) -> (usize, usize, u64) {
        match *self {
            Point::Vertex(v) => (0, v.0, 0),
            Point::Edge { edge, offset } => (1, edge.0, offset.to_bits()),
        }
    }
}

#[derive(Clone, Debug)]
pub struct MetricGraph {
    vertex_ids: Vec<u64>,
    edges: Vec<Edge>,
    incidence: Vec<Vec<EdgeEnd>>,
    truncated: Vec<Option<TruncatedEnd>>,
    vertex_lookup: HashMap<u64, VertexIx>,
    edge_lookup: HashMap<u64, EdgeIx>,
}

impl MetricGraph {
    /// Validates a description and builds the graph. The potential block of
    /// the description is ignored here; see [`crate::Potential::from_spec`].
    pub fn build(spec: &GraphSpec) -> Result<Self> {
        let mut vertex_lookup = HashMap::new();
        for (i, &id) in spec.vertices.iter().enumerate() {
            if vertex_lookup.insert(id, VertexIx(i)).is_some() {
                return Err(Error::DuplicateVertex(id));
            }
        }
        if spec.edges.is_empty() {
            return Err(Error::NoEdges);
        }
        let mut edge_lookup = HashMap::new();
        let mut edges = Vec::with_capacity(spec.edges.len());
        let mut incidence = vec![Vec::new(); spec.vertices.len()];
        for (i, e) in spec.edges.iter().enumerate() {
            if edge_lookup.insert(e.id, EdgeIx(i)).is_some() {
                return Err(Error::DuplicateEdge(e.id));
            }
            if !(e.length.is_finite() && e.length > 0.0) {
                return Err(Error::InvalidLength { id: e.id, length: e.length });
            }
            let from = *vertex_lookup.get(&e.from).ok_or(Error::UnknownVertex(e.from))?;
            let to = *vertex_lookup.get(&e.to).ok_or(Error::UnknownVertex(e.to))?;
            incidence[from.0].push(EdgeEnd { edge: EdgeIx(i), end: End::Tail });
            incidence[to.0].push(EdgeEnd { edge: EdgeIx(i), end: End::Head });
            edges.push(Edge { id: e.id, from, to, length: e.length });
        }
        let mut truncated = vec![None; spec.vertices.len()];
        for t in spec.truncated_ends.iter().cloned().map(TruncatedEndSpec::into_end) {
            let v = *vertex_lookup.get(&t.vertex).ok_or(Error::UnknownVertex(t.vertex))?;
            truncated[v.0] = Some(t);
        }
        let graph = MetricGraph {
            vertex_ids: spec.vertices.clone(),
            edges,
            incidence,
            truncated,
            vertex_lookup,
            edge_lookup,
        };
        if !graph.is_connected() {
            return Err(Error::Disconnected);
        }
        Ok(graph)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::build(&GraphSpec::from_json(text)?)
    }

    fn is_connected(&self) -> bool {
        let n = self.vertex_ids.len();
        if n == 0 {
            return false;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for ee in &self.incidence[v] {
                let w = self.other_end(ee.edge, VertexIx(v)).0;
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_ids.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: EdgeIx) -> &Edge {
        &self.edges[e.0]
    }

    pub fn length(&self, e: EdgeIx) -> f64 {
        self.edges[e.0].length
    }

    pub fn total_length(&self) -> f64 {
        self.edges.iter().map(|e| e.length).sum()
    }

    pub fn vertex_id(&self, v: VertexIx) -> u64 {
        self.vertex_ids[v.0]
    }

    pub fn vertex_ix(&self, id: u64) -> Result<VertexIx> {
        self.vertex_lookup.get(&id).copied().ok_or(Error::UnknownVertex(id))
    }

    pub fn edge_ix(&self, id: u64) -> Result<EdgeIx> {
        self.edge_lookup.get(&id).copied().ok_or(Error::UnknownEdge(id))
    }

    pub fn incident(&self, v: VertexIx) -> &[EdgeEnd] {
        &self.incidence[v.0]
    }

    pub fn degree(&self, v: VertexIx) -> usize {
        self.incidence[v.0].len()
    }

    pub fn other_end(&self, e: EdgeIx, v: VertexIx) -> VertexIx {
        let edge = &self.edges[e.0];
        if edge.from == v {
            edge.to
        } else {
            edge.from
        }
    }

    pub fn end_vertex(&self, ee: EdgeEnd) -> VertexIx {
        let edge = &self.edges[ee.edge.0];
        match ee.end {
            End::Tail => edge.from,
            End::Head => edge.to,
        }
    }

    pub fn truncation(&self, v: VertexIx) -> Option<&TruncatedEnd> {
        self.truncated[v.0].as_ref()
    }

    pub fn has_truncations(&self) -> bool {
        self.truncated.iter().any(Option::is_some)
    }

    pub fn truncated_ends(&self) -> impl Iterator<Item = (VertexIx, &TruncatedEnd)> {
        self.truncated
            .iter()
            .enumerate()
            .filter_map(|(i, t)| t.as_ref().map(|t| (VertexIx(i), t)))
    }

    /// Vertices where functions are forced to vanish independently of any subgraph.
    pub fn is_dirichlet_vertex(&self, v: VertexIx) -> bool {
        matches!(self.truncated[v.0], Some(TruncatedEnd { condition: EndCondition::Dirichlet, .. }))
    }

    /// Canonical point at `offset` along the edge with external id `edge_id`.
    pub fn point(&self, edge_id: u64, offset: f64) -> Result<Point> {
        let e = self.edge_ix(edge_id)?;
        self.point_on(e, offset)
    }

    pub fn point_on(&self, e: EdgeIx, offset: f64) -> Result<Point> {
        let edge = &self.edges[e.0];
        let tol = snap_tol(edge.length);
        if !offset.is_finite() || offset < -tol || offset > edge.length + tol {
            return Err(Error::InvalidPoint { edge: edge.id, offset, length: edge.length });
        }
        Ok(self.canonical(e, offset))
    }

    pub(crate) fn canonical(&self, e: EdgeIx, offset: f64) -> Point {
        let edge = &self.edges[e.0];
        let tol = snap_tol(edge.length);
        if offset <= tol {
            Point::Vertex(edge.from)
        } else if offset >= edge.length - tol {
            Point::Vertex(edge.to)
        } else {
            Point::Edge { edge: e, offset }
        }
    }

    pub fn vertex_point(&self, id: u64) -> Result<Point> {
        Ok(Point::Vertex(self.vertex_ix(id)?))
    }

    /// Checks that a point refers to this graph.
    pub fn check_point(&self, p: Point) -> Result<()> {
        match p {
            Point::Vertex(v) if v.0 < self.vertex_ids.len() => Ok(()),
            Point::Vertex(v) => Err(Error::UnknownVertex(v.0 as u64)),
            Point::Edge { edge, offset } => {
                let e = self.edges.get(edge.0).ok_or(Error::UnknownEdge(edge.0 as u64))?;
                if offset > 0.0 && offset < e.length {
                    Ok(())
                } else {
                    Err(Error::InvalidPoint { edge: e.id, offset, length: e.length })
                }
            }
        }
    }

    /// Representation of a point as (edge, offset) pairs; a vertex yields one
    /// pair per incident edge end.
    pub fn locations(&self, p: Point) -> Vec<(EdgeIx, f64)> {
        match p {
            Point::Edge { edge, offset } => vec![(edge, offset)],
            Point::Vertex(v) => self.incidence[v.0]
                .iter()
                .map(|ee| match ee.end {
                    End::Tail => (ee.edge, 0.0),
                    End::Head => (ee.edge, self.edges[ee.edge.0].length),
                })
                .collect(),
        }
    }

    /// Shortest-path distances from `source` to every point of the graph.
    pub fn distances_from(&self, source: Point) -> Result<DistanceField> {
        self.check_point(source)?;
        let n = self.vertex_ids.len();
        let mut dist = vec![f64::INFINITY; n];
        let mut heap = BinaryHeap::new();
        let seed = |v: VertexIx, d: f64, dist: &mut Vec<f64>, heap: &mut BinaryHeap<HeapItem>| {
            if d < dist[v.0] {
                dist[v.0] = d;
                heap.push(HeapItem { dist: d, vertex: v.0 });
            }
        };
        match source {
            Point::Vertex(v) => seed(v, 0.0, &mut dist, &mut heap),
            Point::Edge { edge, offset } => {
                let e = &self.edges[edge.0];
                seed(e.from, offset, &mut dist, &mut heap);
                seed(e.to, e.length - offset, &mut dist, &mut heap);
            }
        }
        while let Some(HeapItem { dist: d, vertex }) = heap.pop() {
            if d > dist[vertex] {
                continue;
            }
            for ee in &self.incidence[vertex] {
                let edge = &self.edges[ee.edge.0];
                let w = self.other_end(ee.edge, VertexIx(vertex));
                let nd = d + edge.length;
                if nd < dist[w.0] {
                    dist[w.0] = nd;
                    heap.push(HeapItem { dist: nd, vertex: w.0 });
                }
            }
        }
        Ok(DistanceField { source, vertex_dist: dist })
    }

    pub fn distance(&self, p: Point, q: Point) -> Result<f64> {
        self.check_point(q)?;
        Ok(self.distances_from(p)?.at(self, q))
    }
}

#[derive(Clone, Copy, Debug)]
struct HeapItem {
    dist: f64,
    vertex: usize,
}

impl PartialEq for HeapItem {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for HeapItem {}
impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for HeapItem {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.vertex.cmp(&self.vertex))
    }
}

/// Distance function `y ↦ dist(x, y)` for a fixed source `x`.
///
/// On each edge the function is the minimum of at most three linear pieces:
/// through the tail, through the head and, on the source's own edge, directly.
#[derive(Clone, Debug)]
pub struct DistanceField {
    source: Point,
    vertex_dist: Vec<f64>,
}

/// Linear pieces `a + s·t` (`s = ±1`) whose minimum is the distance along an edge.
#[derive(Clone, Copy, Debug)]
pub(crate) enum Branch {
    /// `d(t) = base + t`
    Rising(f64),
    /// `d(t) = base - t`
    Falling(f64),
    /// `d(t) = |t - s|`
    Direct(f64),
}

impl Branch {
    fn eval(self, t: f64) -> f64 {
        match self {
            Branch::Rising(b) => b + t,
            Branch::Falling(b) => b - t,
            Branch::Direct(s) => (t - s).abs(),
        }
    }
}

impl DistanceField {
    pub fn source(&self) -> Point {
        self.source
    }

    pub fn vertex(&self, v: VertexIx) -> f64 {
        self.vertex_dist[v.0]
    }

    pub(crate) fn branches(&self, g: &MetricGraph, e: EdgeIx) -> Vec<Branch> {
        let edge = g.edge(e);
        let mut out = vec![
            Branch::Rising(self.vertex_dist[edge.from.0]),
            Branch::Falling(self.vertex_dist[edge.to.0] + edge.length),
        ];
        if let Point::Edge { edge: se, offset } = self.source {
            if se == e {
                out.push(Branch::Direct(offset));
            }
        }
        out
    }

    pub fn on_edge(&self, g: &MetricGraph, e: EdgeIx, t: f64) -> f64 {
        self.branches(g, e)
            .into_iter()
            .map(|b| b.eval(t))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn at(&self, g: &MetricGraph, p: Point) -> f64 {
        match p {
            Point::Vertex(v) => self.vertex_dist[v.0],
            Point::Edge { edge, offset } => self.on_edge(g, edge, offset),
        }
    }

    /// Largest distance attained on edge `e`.
    pub fn edge_max(&self, g: &MetricGraph, e: EdgeIx) -> f64 {
        let len = g.length(e);
        let branches = self.branches(g, e);
        let mut candidates = vec![0.0, len];
        for b in &branches {
            if let Branch::Direct(s) = *b {
                candidates.push(s);
            }
        }
        // crossings of every pair of linear pieces
        let lines: Vec<(f64, f64)> = branches
            .iter()
            .flat_map(|b| match *b {
                Branch::Rising(a) => vec![(a, 1.0)],
                Branch::Falling(a) => vec![(a, -1.0)],
                Branch::Direct(s) => vec![(-s, 1.0), (s, -1.0)],
            })
            .collect();
        for i in 0..lines.len() {
            for j in i + 1..lines.len() {
                let (a1, s1) = lines[i];
                let (a2, s2) = lines[j];
                if s1 != s2 {
                    let t = (a2 - a1) / (s1 - s2);
                    if (0.0..=len).contains(&t) {
                        candidates.push(t);
                    }
                }
            }
        }
        candidates
            .into_iter()
            .map(|t| self.on_edge(g, e, t))
            .fold(0.0, f64::max)
    }

    /// Eccentricity of the source: the largest distance to any point.
    pub fn reach(&self, g: &MetricGraph) -> f64 {
        (0..g.edge_count())
            .map(|i| self.edge_max(g, EdgeIx(i)))
            .fold(0.0, f64::max)
    }

    /// Closed sublevel set `{t : d(t) ≤ r}` on edge `e`, as sorted intervals.
    pub(crate) fn sublevel(&self, g: &MetricGraph, e: EdgeIx, r: f64) -> Vec<(f64, f64)> {
        let len = g.length(e);
        let mut out = Vec::new();
        for b in self.branches(g, e) {
            let (lo, hi) = match b {
                Branch::Rising(a) => (0.0, r - a),
                Branch::Falling(a) => (a - r, len),
                Branch::Direct(s) => (s - r, s + r),
            };
            let (lo, hi) = (lo.max(0.0), hi.min(len));
            if hi >= lo {
                out.push((lo, hi));
            }
        }
        union(out)
    }

    /// Closed superlevel set `{t : d(t) ≥ r}` on edge `e`.
    pub(crate) fn superlevel(&self, g: &MetricGraph, e: EdgeIx, r: f64) -> Vec<(f64, f64)> {
        let len = g.length(e);
        let mut acc: Vec<(f64, f64)> = vec![(0.0, len)];
        for b in self.branches(g, e) {
            let allowed: Vec<(f64, f64)> = match b {
                Branch::Rising(a) => vec![(r - a, len)],
                Branch::Falling(a) => vec![(0.0, a - r)],
                Branch::Direct(s) => vec![(0.0, s - r), (s + r, len)],
            };
            let mut next = Vec::new();
            for &(lo, hi) in &acc {
                for &(alo, ahi) in &allowed {
                    let (l, h) = (lo.max(alo), hi.min(ahi));
                    if h >= l {
                        next.push((l, h));
                    }
                }
            }
            acc = next;
        }
        union(acc)
    }
}

/// Union of closed intervals, sorted, merging overlapping or touching ones.
pub(crate) fn union(mut v: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    v.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(v.len());
    for (lo, hi) in v {
        match out.last_mut() {
            Some(last) if lo <= last.1 => last.1 = last.1.max(hi),
            _ => out.push((lo, hi)),
        }
    }
    out
}
