//! Partitions into connected closed clusters, their energy, the min-max
//! search and the existence classifier.

mod classify;
mod constructive;
mod optimize;

pub use classify::{classify_existence, Classification, ClassifyOptions, ExistenceVerdict};
pub use constructive::{constructive_annulus_partition, find_ball_radius};
pub use optimize::{
    count_topologies, enumerate_topologies, evaluate_cuts, optimize_k, CutEvaluation, OptimizeOptions,
    OptimizeResult,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{snap_tol, MetricGraph, Point};
use crate::parallel::{self, Execution};
use crate::potential::Potential;
use crate::spectral::{ground_energy, GroundStateResult};
use crate::subgraph::{PointSpec, Subgraph, SubgraphSpec};

#[derive(Clone, Debug, PartialEq)]
pub struct Partition {
    pub clusters: Vec<Subgraph>,
    pub cuts: Vec<Point>,
    /// The clusters cover the graph.
    pub exhaustive: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartitionSpec {
    pub clusters: Vec<SubgraphSpec>,
    #[serde(default)]
    pub cuts: Vec<PointSpec>,
    #[serde(default)]
    pub exhaustive: bool,
}

impl Partition {
    /// Builds a partition and sets the exhaustive flag from the cluster volumes.
    pub fn new(g: &MetricGraph, clusters: Vec<Subgraph>, cuts: Vec<Point>) -> Self {
        let covered: f64 = clusters.iter().map(Subgraph::volume).sum();
        let exhaustive = (covered - g.total_length()).abs() <= 1e-9 * g.total_length().max(1.0);
        Partition { clusters, cuts, exhaustive }
    }

    pub fn k(&self) -> usize {
        self.clusters.len()
    }

    pub fn to_spec(&self, g: &MetricGraph) -> PartitionSpec {
        PartitionSpec {
            clusters: self.clusters.iter().map(|c| c.to_spec(g)).collect(),
            cuts: self.cuts.iter().map(|&p| PointSpec::from_point(g, p)).collect(),
            exhaustive: self.exhaustive,
        }
    }

    pub fn from_spec(g: &MetricGraph, spec: &PartitionSpec) -> Result<Self> {
        let clusters = spec
            .clusters
            .iter()
            .map(|c| Subgraph::from_spec(g, c))
            .collect::<Result<Vec<_>>>()?;
        let cuts = spec.cuts.iter().map(|p| p.to_point(g)).collect::<Result<Vec<_>>>()?;
        Ok(Partition { clusters, cuts, exhaustive: spec.exhaustive })
    }

    pub fn to_json(&self, g: &MetricGraph) -> Result<String> {
        crate::report::to_json(&self.to_spec(g))
    }

    pub fn from_json(g: &MetricGraph, text: &str) -> Result<Self> {
        Self::from_spec(g, &serde_json::from_str(text)?)
    }

    /// The partition with cluster `i` dropped.
    pub fn without(&self, i: usize) -> Partition {
        let mut clusters = self.clusters.clone();
        clusters.remove(i);
        Partition { clusters, cuts: self.cuts.clone(), exhaustive: false }
    }
}

/// Violations of the partition axioms; empty when the partition is valid.
pub fn validate(g: &MetricGraph, p: &Partition) -> Vec<String> {
    let mut out = Vec::new();
    if p.clusters.is_empty() {
        out.push("partition has no clusters".to_string());
    }
    for (i, c) in p.clusters.iter().enumerate() {
        if c.is_empty() {
            out.push(format!("cluster {i} is empty"));
            continue;
        }
        if c.component_count() != 1 {
            out.push(format!("cluster {i} has {} components", c.component_count()));
        }
        for &cut in &p.cuts {
            if c.contains(g, cut) && !c.is_dirichlet(cut) {
                out.push(format!("cut {cut:?} lies in cluster {i} but is not on its boundary"));
            }
        }
    }
    for i in 0..p.clusters.len() {
        for j in i + 1..p.clusters.len() {
            let (a, b) = (&p.clusters[i], &p.clusters[j]);
            for pa in a.pieces() {
                for pb in b.pieces().iter().filter(|pb| pb.edge == pa.edge) {
                    let overlap = pa.end.min(pb.end) - pa.start.max(pb.start);
                    if overlap > snap_tol(g.length(pa.edge)) {
                        out.push(format!("clusters {i} and {j} overlap on edge {}", g.edge(pa.edge).id));
                    }
                }
            }
            for v in 0..g.vertex_count() {
                let v = Point::Vertex(crate::graph::VertexIx(v));
                if a.contains(g, v) && b.contains(g, v) && !(a.is_dirichlet(v) && b.is_dirichlet(v)) {
                    out.push(format!("clusters {i} and {j} share {v:?} outside their boundaries"));
                }
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub clusters: Vec<GroundStateResult>,
    /// Largest extrapolated cluster energy.
    pub energy: f64,
    pub argmax: usize,
    /// Clusters whose energy matches the maximum within `1e-9` relative.
    pub ties: Vec<usize>,
}

impl EnergyReport {
    pub fn from_clusters(clusters: Vec<GroundStateResult>) -> Self {
        let values: Vec<f64> = clusters.iter().map(|c| c.lambda_extrapolated).collect();
        let (argmax, energy) = values
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |(bi, bv), (i, &v)| if v > bv { (i, v) } else { (bi, bv) });
        let ties = values
            .iter()
            .enumerate()
            .filter(|(_, &v)| (energy - v).abs() <= 1e-9 * energy.abs().max(1e-12))
            .map(|(i, _)| i)
            .collect();
        EnergyReport { clusters, energy, argmax, ties }
    }

    pub fn error_indicator_sum(&self) -> f64 {
        self.clusters.iter().map(|c| c.error_indicator).sum()
    }
}

/// Ground energy of every cluster and their maximum.
pub fn energy(g: &MetricGraph, p: &Partition, v: &Potential, h: f64, exec: Execution) -> Result<EnergyReport> {
    if p.clusters.is_empty() {
        return Err(Error::InvalidPartition("no clusters".into()));
    }
    let results = parallel::map(exec, &p.clusters, |c| ground_energy(g, c, v, h))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    Ok(EnergyReport::from_clusters(results))
}
