//! Closed subgraphs given by per-edge sub-intervals plus Dirichlet points.
//!
//! The boundary of a subgraph is computed from the ambient graph: every
//! interval endpoint strictly inside an edge, every vertex where some
//! incident edge end is not retained, and every Dirichlet truncation vertex.
//! Explicit marks (cut points) are added on top and split retained intervals
//! where they fall inside them. Connectivity is taken relative to these
//! Dirichlet points, so pieces that only meet at a Dirichlet vertex belong to
//! different components.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{self, snap_tol, DistanceField, EdgeIx, MetricGraph, Point, VertexIx};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Piece {
    pub edge: EdgeIx,
    pub start: f64,
    pub end: f64,
}

impl Piece {
    pub fn length(&self) -> f64 {
        self.end - self.start
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Subgraph {
    pieces: Vec<Piece>,
    dirichlet: Vec<Point>,
    components: usize,
}

impl Subgraph {
    /// Normalises `pieces` (clamping, snapping, merging, splitting at marks,
    /// stripping zero-length pieces) and computes the Dirichlet boundary.
    pub fn new(g: &MetricGraph, pieces: Vec<Piece>, marks: &[Point]) -> Result<Self> {
        for p in &pieces {
            if p.edge.0 >= g.edge_count() {
                return Err(Error::UnknownEdge(p.edge.0 as u64));
            }
            let len = g.length(p.edge);
            let tol = snap_tol(len);
            if !(p.start.is_finite() && p.end.is_finite())
                || p.start < -tol
                || p.end > len + tol
                || p.end < p.start
            {
                return Err(Error::InvalidPoint { edge: g.edge(p.edge).id, offset: p.start, length: len });
            }
        }
        for m in marks {
            g.check_point(*m)?;
        }
        Ok(Self::build(g, pieces, marks))
    }

    pub(crate) fn build(g: &MetricGraph, pieces: Vec<Piece>, marks: &[Point]) -> Self {
        let mut by_edge: Vec<Vec<(f64, f64)>> = vec![Vec::new(); g.edge_count()];
        for p in pieces {
            let len = g.length(p.edge);
            let tol = snap_tol(len);
            let mut s = p.start.clamp(0.0, len);
            let mut e = p.end.clamp(0.0, len);
            if s <= tol {
                s = 0.0;
            }
            if e >= len - tol {
                e = len;
            }
            by_edge[p.edge.0].push((s, e));
        }
        let mut interior_marks: Vec<Vec<f64>> = vec![Vec::new(); g.edge_count()];
        let mut vertex_marks: Vec<VertexIx> = Vec::new();
        for m in marks {
            match *m {
                Point::Vertex(v) => vertex_marks.push(v),
                Point::Edge { edge, offset } => interior_marks[edge.0].push(offset),
            }
        }
        vertex_marks.sort();
        vertex_marks.dedup();

        let mut out = Vec::new();
        for (ei, list) in by_edge.into_iter().enumerate() {
            if list.is_empty() {
                continue;
            }
            let len = g.edge(EdgeIx(ei)).length;
            let tol = snap_tol(len);
            // merge pieces separated by gaps below the snapping tolerance
            let mut merged: Vec<(f64, f64)> = Vec::new();
            for (lo, hi) in graph::union(list) {
                match merged.last_mut() {
                    Some(last) if lo - last.1 <= tol => last.1 = last.1.max(hi),
                    _ => merged.push((lo, hi)),
                }
            }
            let mut cuts = interior_marks[ei].clone();
            cuts.sort_by(f64::total_cmp);
            for (lo, hi) in merged {
                let mut a = lo;
                for &c in &cuts {
                    if c > a + tol && c < hi - tol {
                        out.push(Piece { edge: EdgeIx(ei), start: a, end: c });
                        a = c;
                    }
                }
                if hi - a > tol {
                    out.push(Piece { edge: EdgeIx(ei), start: a, end: hi });
                }
            }
        }

        // covered edge ends
        let mut tail = vec![false; g.edge_count()];
        let mut head = vec![false; g.edge_count()];
        for p in &out {
            if p.start == 0.0 {
                tail[p.edge.0] = true;
            }
            if p.end == g.length(p.edge) {
                head[p.edge.0] = true;
            }
        }
        let covered = |ee: graph::EdgeEnd| match ee.end {
            graph::End::Tail => tail[ee.edge.0],
            graph::End::Head => head[ee.edge.0],
        };
        let mut touched: Vec<VertexIx> = Vec::new();
        let mut dirichlet: Vec<Point> = Vec::new();
        for p in &out {
            let edge = g.edge(p.edge);
            if p.start == 0.0 {
                touched.push(edge.from);
            } else {
                dirichlet.push(Point::Edge { edge: p.edge, offset: p.start });
            }
            if p.end == edge.length {
                touched.push(edge.to);
            } else {
                dirichlet.push(Point::Edge { edge: p.edge, offset: p.end });
            }
        }
        touched.sort();
        touched.dedup();
        for &v in &touched {
            let open = g.incident(v).iter().any(|&ee| !covered(ee));
            if open || g.is_dirichlet_vertex(v) || vertex_marks.binary_search(&v).is_ok() {
                dirichlet.push(Point::Vertex(v));
            }
        }
        dirichlet.sort_by_key(Point::sort_key);
        dirichlet.dedup_by_key(|p| p.sort_key());

        let mut sub = Subgraph { pieces: out, dirichlet, components: 0 };
        sub.components = sub.component_labels(g).1;
        sub
    }

    pub fn empty() -> Self {
        Subgraph { pieces: Vec::new(), dirichlet: Vec::new(), components: 0 }
    }

    pub fn whole(g: &MetricGraph) -> Self {
        let pieces = g
            .edges()
            .iter()
            .enumerate()
            .map(|(i, e)| Piece { edge: EdgeIx(i), start: 0.0, end: e.length })
            .collect();
        Self::build(g, pieces, &[])
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn dirichlet_points(&self) -> &[Point] {
        &self.dirichlet
    }

    pub fn component_count(&self) -> usize {
        self.components
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    pub fn volume(&self) -> f64 {
        self.pieces.iter().map(Piece::length).sum()
    }

    pub fn is_dirichlet_vertex(&self, v: VertexIx) -> bool {
        self.dirichlet
            .binary_search_by_key(&Point::Vertex(v).sort_key(), Point::sort_key)
            .is_ok()
    }

    pub fn is_dirichlet(&self, p: Point) -> bool {
        self.dirichlet.binary_search_by_key(&p.sort_key(), Point::sort_key).is_ok()
    }

    /// Smallest edge index carrying a piece; used for deterministic tie-breaking.
    pub fn min_edge(&self) -> Option<EdgeIx> {
        self.pieces.first().map(|p| p.edge)
    }

    /// Whether `p` lies in the closed retained region.
    pub fn contains(&self, g: &MetricGraph, p: Point) -> bool {
        g.locations(p).into_iter().any(|(e, t)| {
            let tol = snap_tol(g.length(e));
            self.pieces
                .iter()
                .any(|q| q.edge == e && t >= q.start - tol && t <= q.end + tol)
        })
    }

    /// Whether every retained piece of `self` lies inside `other`.
    pub fn is_subset_of(&self, g: &MetricGraph, other: &Subgraph) -> bool {
        self.pieces.iter().all(|p| {
            let tol = snap_tol(g.length(p.edge));
            other
                .pieces
                .iter()
                .filter(|q| q.edge == p.edge)
                .any(|q| p.start >= q.start - tol && p.end <= q.end + tol)
                || self.covered_by_pieces(g, p, &other.pieces)
        })
    }

    fn covered_by_pieces(&self, g: &MetricGraph, p: &Piece, pieces: &[Piece]) -> bool {
        // pieces of `other` may be split at marks; walk them in order
        let tol = snap_tol(g.length(p.edge));
        let mut at = p.start;
        for q in pieces.iter().filter(|q| q.edge == p.edge) {
            if q.start <= at + tol && q.end > at {
                at = q.end;
            }
        }
        at >= p.end - tol
    }

    pub fn intersect(&self, g: &MetricGraph, other: &Subgraph) -> Subgraph {
        let mut pieces = Vec::new();
        for a in &self.pieces {
            for b in other.pieces.iter().filter(|b| b.edge == a.edge) {
                let (s, e) = (a.start.max(b.start), a.end.min(b.end));
                if e > s {
                    pieces.push(Piece { edge: a.edge, start: s, end: e });
                }
            }
        }
        let marks: Vec<Point> = self.dirichlet.iter().chain(&other.dirichlet).copied().collect();
        Self::build(g, pieces, &marks)
    }

    /// Component label per piece and the number of components.
    fn component_labels(&self, g: &MetricGraph) -> (Vec<usize>, usize) {
        let n = self.pieces.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        let mut at_vertex: Vec<(VertexIx, usize)> = Vec::new();
        for (i, p) in self.pieces.iter().enumerate() {
            let edge = g.edge(p.edge);
            if p.start == 0.0 {
                at_vertex.push((edge.from, i));
            }
            if p.end == edge.length {
                at_vertex.push((edge.to, i));
            }
        }
        at_vertex.sort();
        for w in at_vertex.windows(2) {
            if w[0].0 == w[1].0 && !self.is_dirichlet_vertex(w[0].0) {
                let (a, b) = (find(&mut parent, w[0].1), find(&mut parent, w[1].1));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
        let mut labels = vec![usize::MAX; n];
        let mut count = 0;
        let mut root_label = vec![usize::MAX; n];
        for i in 0..n {
            let r = find(&mut parent, i);
            if root_label[r] == usize::MAX {
                root_label[r] = count;
                count += 1;
            }
            labels[i] = root_label[r];
        }
        (labels, count)
    }

    /// Connected components, ordered by their first piece; each inherits the
    /// Dirichlet marks lying in its closure.
    pub fn components(&self, g: &MetricGraph) -> Vec<Subgraph> {
        let (labels, count) = self.component_labels(g);
        let mut groups: Vec<Vec<Piece>> = vec![Vec::new(); count];
        for (p, &l) in self.pieces.iter().zip(&labels) {
            groups[l].push(*p);
        }
        groups
            .into_iter()
            .map(|pieces| {
                let marks: Vec<Point> = self
                    .dirichlet
                    .iter()
                    .copied()
                    .filter(|&m| touches(g, &pieces, m))
                    .collect();
                Self::build(g, pieces, &marks)
            })
            .collect()
    }

    pub fn to_spec(&self, g: &MetricGraph) -> SubgraphSpec {
        SubgraphSpec {
            intervals: self
                .pieces
                .iter()
                .map(|p| IntervalSpec { edge: g.edge(p.edge).id, start: p.start, end: p.end })
                .collect(),
            dirichlet: self.dirichlet.iter().map(|&p| PointSpec::from_point(g, p)).collect(),
        }
    }

    pub fn from_spec(g: &MetricGraph, spec: &SubgraphSpec) -> Result<Self> {
        let pieces = spec
            .intervals
            .iter()
            .map(|i| Ok(Piece { edge: g.edge_ix(i.edge)?, start: i.start, end: i.end }))
            .collect::<Result<Vec<_>>>()?;
        let marks = spec
            .dirichlet
            .iter()
            .map(|p| p.to_point(g))
            .collect::<Result<Vec<_>>>()?;
        Subgraph::new(g, pieces, &marks)
    }
}

fn touches(g: &MetricGraph, pieces: &[Piece], p: Point) -> bool {
    g.locations(p).into_iter().any(|(e, t)| {
        let tol = snap_tol(g.length(e));
        pieces.iter().any(|q| q.edge == e && t >= q.start - tol && t <= q.end + tol)
    })
}

/// Closed ball `{y : dist(x, y) ≤ r}`.
pub fn ball(g: &MetricGraph, x: Point, r: f64) -> Result<Subgraph> {
    check_radius(r)?;
    Ok(ball_in(g, &g.distances_from(x)?, r))
}

/// Closed complement of the open ball, isolated points removed.
pub fn exterior(g: &MetricGraph, x: Point, r: f64) -> Result<Subgraph> {
    check_radius(r)?;
    Ok(exterior_in(g, &g.distances_from(x)?, r))
}

/// Closed annulus `{y : r1 ≤ dist(x, y) ≤ r2}`.
pub fn annulus(g: &MetricGraph, x: Point, r1: f64, r2: f64) -> Result<Subgraph> {
    check_radius(r1)?;
    if !(r2 > r1) {
        return Err(Error::InvalidRadius(format!("annulus needs r1 < r2, got {r1} and {r2}")));
    }
    Ok(annulus_in(g, &g.distances_from(x)?, r1, r2))
}

fn check_radius(r: f64) -> Result<()> {
    if r.is_finite() && r > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidRadius(format!("radius must be positive, got {r}")))
    }
}

pub fn ball_in(g: &MetricGraph, field: &DistanceField, r: f64) -> Subgraph {
    let pieces = (0..g.edge_count())
        .flat_map(|i| {
            field
                .sublevel(g, EdgeIx(i), r)
                .into_iter()
                .map(move |(s, e)| Piece { edge: EdgeIx(i), start: s, end: e })
        })
        .collect();
    Subgraph::build(g, pieces, &[])
}

pub fn exterior_in(g: &MetricGraph, field: &DistanceField, r: f64) -> Subgraph {
    let pieces = (0..g.edge_count())
        .flat_map(|i| {
            field
                .superlevel(g, EdgeIx(i), r)
                .into_iter()
                .map(move |(s, e)| Piece { edge: EdgeIx(i), start: s, end: e })
        })
        .collect();
    Subgraph::build(g, pieces, &[])
}

pub fn annulus_in(g: &MetricGraph, field: &DistanceField, r1: f64, r2: f64) -> Subgraph {
    ball_in(g, field, r2).intersect(g, &exterior_in(g, field, r1))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntervalSpec {
    pub edge: u64,
    pub start: f64,
    pub end: f64,
}

/// A point in terms of external ids.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PointSpec {
    Vertex { vertex: u64 },
    Edge { edge: u64, offset: f64 },
}

impl PointSpec {
    pub fn from_point(g: &MetricGraph, p: Point) -> Self {
        match p {
            Point::Vertex(v) => PointSpec::Vertex { vertex: g.vertex_id(v) },
            Point::Edge { edge, offset } => PointSpec::Edge { edge: g.edge(edge).id, offset },
        }
    }

    pub fn to_point(&self, g: &MetricGraph) -> Result<Point> {
        match *self {
            PointSpec::Vertex { vertex } => g.vertex_point(vertex),
            PointSpec::Edge { edge, offset } => g.point(edge, offset),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SubgraphSpec {
    pub intervals: Vec<IntervalSpec>,
    #[serde(default)]
    pub dirichlet: Vec<PointSpec>,
}
