//! Existence classification: compare the best partition energy found with a
//! lower estimate of the essential-spectrum threshold.

use serde::{Deserialize, Serialize};

use crate::asymptotics::{default_schedule, sigma_estimate, ScanOptions, SigmaBracket};
use crate::error::Result;
use crate::graph::{MetricGraph, Point};
use crate::potential::Potential;

use super::{optimize_k, OptimizeOptions, OptimizeResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    ExistsCertified,
    BoundaryCase,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClassifyOptions {
    pub optimize: OptimizeOptions,
    pub root: Point,
    /// Exterior radii; `None` uses eight evenly spaced radii.
    pub radii: Option<Vec<f64>>,
    /// Margin relative to `max(1, Σ̂)`, added to twice the summed error indicators.
    pub margin_rel: f64,
}

impl ClassifyOptions {
    pub fn new(root: Point) -> Self {
        ClassifyOptions { optimize: OptimizeOptions::default(), root, radii: None, margin_rel: 1e-2 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExistenceVerdict {
    pub k: usize,
    pub lambda_hat: f64,
    pub sigma: SigmaBracket,
    pub margin: f64,
    pub classification: Classification,
    pub witness: OptimizeResult,
}

/// Decides between a certified minimiser, a boundary case and no decision.
/// Non-existence is never claimed.
pub fn classify(lambda_hat: f64, sigma: f64, margin: f64) -> Classification {
    if lambda_hat < sigma - margin {
        Classification::ExistsCertified
    } else if (lambda_hat - sigma).abs() <= margin {
        Classification::BoundaryCase
    } else {
        Classification::Inconclusive
    }
}

pub fn classify_existence(g: &MetricGraph, v: &Potential, k: usize, opts: &ClassifyOptions) -> Result<ExistenceVerdict> {
    let witness = optimize_k(g, v, k, &opts.optimize)?;
    let radii = match &opts.radii {
        Some(r) => r.clone(),
        None => default_schedule(g, opts.root, 8)?,
    };
    let sigma = sigma_estimate(
        g,
        v,
        opts.root,
        &radii,
        &ScanOptions { h: opts.optimize.h, exec: opts.optimize.exec },
    )?;
    let errors = witness.report.error_indicator_sum() + sigma.trend.iter().map(|(_, e)| e.error_indicator).sum::<f64>();
    let margin = opts.margin_rel * sigma.lower.abs().max(1.0) + 2.0 * errors;
    let lambda_hat = witness.report.energy;
    Ok(ExistenceVerdict {
        k,
        lambda_hat,
        classification: classify(lambda_hat, sigma.lower, margin),
        sigma,
        margin,
        witness,
    })
}
