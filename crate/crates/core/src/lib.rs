//! Spectral partitions of metric graphs into clusters of low ground energy.

pub mod asymptotics;
pub mod error;
pub mod gallery;
pub mod graph;
pub mod linalg;
pub mod parallel;
pub mod partition;
pub mod potential;
pub mod report;
pub mod spectral;
pub mod subgraph;
pub mod zones;

pub use error::{Error, Result};
pub use graph::{EdgeIx, EndCondition, GraphSpec, MetricGraph, Point, VertexIx};
pub use parallel::Execution;
pub use partition::{EnergyReport, Partition};
pub use potential::Potential;
pub use spectral::{ground_energy, EnergyEstimate, GroundStateResult};
pub use subgraph::Subgraph;
