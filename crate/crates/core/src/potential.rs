//! Nonnegative piecewise-constant potentials.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{snap_tol, EdgeIx, End, GraphSpec, MetricGraph, Point};
use crate::subgraph::{Piece, Subgraph};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepSpec {
    /// Right end of the piece, measured from the edge's tail.
    pub upto: f64,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PotentialSpec {
    pub edge: u64,
    pub pieces: Vec<StepSpec>,
}

/// Potential on a graph: a step function per listed edge and a constant
/// `default` on every other edge.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Potential {
    default: f64,
    // (upto, value) with strictly increasing `upto`, last one equal to the edge length
    edges: BTreeMap<EdgeIx, Vec<(f64, f64)>>,
}

/// A potential re-anchored to one retained piece: offsets are measured from
/// the piece start.
#[derive(Clone, Debug, PartialEq)]
pub struct PieceProfile {
    pub piece: Piece,
    pub steps: Vec<(f64, f64)>,
}

impl PieceProfile {
    pub fn integral(&self) -> f64 {
        let mut at = 0.0;
        let mut acc = 0.0;
        for &(upto, value) in &self.steps {
            acc += (upto - at) * value;
            at = upto;
        }
        acc
    }
}

fn check_value(edge: u64, value: f64) -> Result<()> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidPotential { edge, reason: format!("value {value} is not a finite nonnegative number") })
    }
}

impl Potential {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: f64) -> Result<Self> {
        check_value(0, c)?;
        Ok(Potential { default: c, edges: BTreeMap::new() })
    }

    pub fn from_spec(g: &MetricGraph, specs: &[PotentialSpec]) -> Result<Self> {
        let mut pot = Potential::zero();
        for s in specs {
            let steps: Vec<(f64, f64)> = s.pieces.iter().map(|p| (p.upto, p.value)).collect();
            pot = pot.with_edge(g, s.edge, &steps)?;
        }
        Ok(pot)
    }

    pub fn from_graph_spec(g: &MetricGraph, spec: &GraphSpec) -> Result<Self> {
        Self::from_spec(g, &spec.potential)
    }

    /// Sets the step function on one edge. `steps` holds `(upto, value)`
    /// pairs; the last `upto` must reach the edge length.
    pub fn with_edge(mut self, g: &MetricGraph, edge_id: u64, steps: &[(f64, f64)]) -> Result<Self> {
        let e = g.edge_ix(edge_id)?;
        let len = g.length(e);
        let tol = snap_tol(len);
        if self.edges.contains_key(&e) {
            return Err(Error::InvalidPotential { edge: edge_id, reason: "edge listed twice".into() });
        }
        if steps.is_empty() {
            return Err(Error::InvalidPotential { edge: edge_id, reason: "no pieces".into() });
        }
        let mut out = Vec::with_capacity(steps.len());
        let mut prev = 0.0;
        for (i, &(upto, value)) in steps.iter().enumerate() {
            check_value(edge_id, value)?;
            if !(upto.is_finite() && upto > prev && upto <= len + tol) {
                return Err(Error::InvalidPotential {
                    edge: edge_id,
                    reason: format!("breakpoint {upto} out of order or outside [0, {len}]"),
                });
            }
            let last = i + 1 == steps.len();
            if last && upto < len - tol {
                return Err(Error::InvalidPotential {
                    edge: edge_id,
                    reason: format!("pieces stop at {upto}, edge length is {len}"),
                });
            }
            let upto = if last { len } else { upto };
            out.push((upto, value));
            prev = upto;
        }
        self.edges.insert(e, out);
        Ok(self)
    }

    /// `V + c`.
    pub fn shifted(&self, c: f64) -> Self {
        Potential {
            default: self.default + c,
            edges: self
                .edges
                .iter()
                .map(|(&e, steps)| (e, steps.iter().map(|&(u, v)| (u, v + c)).collect()))
                .collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.default == 0.0 && self.edges.values().flatten().all(|&(_, v)| v == 0.0)
    }

    pub fn to_spec(&self, g: &MetricGraph) -> Vec<PotentialSpec> {
        let mut out: Vec<PotentialSpec> = self
            .edges
            .iter()
            .map(|(&e, steps)| PotentialSpec {
                edge: g.edge(e).id,
                pieces: steps.iter().map(|&(upto, value)| StepSpec { upto, value }).collect(),
            })
            .collect();
        if self.default != 0.0 {
            for i in 0..g.edge_count() {
                if !self.edges.contains_key(&EdgeIx(i)) {
                    out.push(PotentialSpec {
                        edge: g.edge(EdgeIx(i)).id,
                        pieces: vec![StepSpec { upto: g.length(EdgeIx(i)), value: self.default }],
                    });
                }
            }
        }
        out
    }

    /// Value at offset `t` on edge `e`; at a breakpoint the right-hand piece wins.
    pub fn on_edge(&self, g: &MetricGraph, e: EdgeIx, t: f64) -> f64 {
        match self.edges.get(&e) {
            None => self.default,
            Some(steps) => {
                let tol = snap_tol(g.length(e));
                steps
                    .iter()
                    .find(|&&(upto, _)| t < upto - tol)
                    .or(steps.last())
                    .map(|&(_, v)| v)
                    .unwrap_or(self.default)
            }
        }
    }

    /// Value at a point. At a vertex the value is read on the first incident
    /// edge, from the side of that edge touching the vertex.
    pub fn evaluate(&self, g: &MetricGraph, p: Point) -> f64 {
        match p {
            Point::Edge { edge, offset } => self.on_edge(g, edge, offset),
            Point::Vertex(v) => match g.incident(v).first() {
                None => self.default,
                Some(ee) => {
                    let t = match ee.end {
                        End::Tail => 0.0,
                        End::Head => g.length(ee.edge),
                    };
                    self.on_edge(g, ee.edge, t)
                }
            },
        }
    }

    /// Constant segments `(from, to, value)` covering `[a, b]` on edge `e`.
    pub fn segments(&self, e: EdgeIx, a: f64, b: f64) -> Vec<(f64, f64, f64)> {
        match self.edges.get(&e) {
            None => vec![(a, b, self.default)],
            Some(steps) => {
                let mut out = Vec::new();
                let mut lo = 0.0_f64;
                for &(upto, value) in steps {
                    let (s, t) = (lo.max(a), upto.min(b));
                    if t > s {
                        out.push((s, t, value));
                    }
                    lo = upto;
                }
                if out.is_empty() {
                    out.push((a, b, steps.last().map_or(self.default, |s| s.1)));
                }
                out
            }
        }
    }

    pub fn restrict(&self, s: &Subgraph) -> Vec<PieceProfile> {
        s.pieces()
            .iter()
            .map(|&piece| PieceProfile {
                piece,
                steps: self
                    .segments(piece.edge, piece.start, piece.end)
                    .into_iter()
                    .map(|(_, to, v)| (to - piece.start, v))
                    .collect(),
            })
            .collect()
    }

    pub fn integrate(&self, s: &Subgraph) -> f64 {
        self.restrict(s).iter().map(PieceProfile::integral).sum()
    }

    /// Smallest value taken on the retained part of `s`.
    pub fn min_on(&self, s: &Subgraph) -> f64 {
        s.pieces()
            .iter()
            .flat_map(|p| self.segments(p.edge, p.start, p.end))
            .map(|(_, _, v)| v)
            .fold(f64::INFINITY, f64::min)
    }
}
