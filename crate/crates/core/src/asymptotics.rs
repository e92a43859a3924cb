//! Radius sweeps: exterior-ball limits for the essential-spectrum threshold,
//! expanding balls, Nicaise-type lower bounds and jump detection.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{DistanceField, MetricGraph, Point};
use crate::parallel::{self, Execution};
use crate::potential::Potential;
use crate::spectral::{energy_estimate, EnergyEstimate, DEFAULT_MESH};
use crate::subgraph::{ball_in, exterior_in, Subgraph};

/// The largest swept radius must stay below `reach / TRUNCATION_MARGIN` on
/// graphs with truncated ends.
pub const TRUNCATION_MARGIN: f64 = 1.25;
pub const PLATEAU_TOL: f64 = 1e-3;
pub const JUMP_FACTOR: f64 = 10.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanOptions {
    pub h: f64,
    pub exec: Execution,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions { h: DEFAULT_MESH, exec: Execution::default() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Ball,
    Exterior,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    pub radius: f64,
    /// `None` when the swept region is empty.
    pub energy: Option<EnergyEstimate>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadiusScan {
    pub center: Point,
    pub direction: Direction,
    pub points: Vec<ScanPoint>,
}

impl RadiusScan {
    pub fn values(&self) -> Vec<Option<f64>> {
        self.points.iter().map(|p| p.energy.map(|e| e.lambda_extrapolated)).collect()
    }

    /// CSV rows `radius,lambda,error_indicator`; empty regions leave the
    /// last two fields blank.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("radius,lambda,error_indicator\n");
        for p in &self.points {
            match p.energy {
                Some(e) => out.push_str(&format!(
                    "{},{},{}\n",
                    crate::report::fmt(p.radius),
                    crate::report::fmt(e.lambda_extrapolated),
                    crate::report::fmt(e.error_indicator)
                )),
                None => out.push_str(&format!("{},,\n", crate::report::fmt(p.radius))),
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SigmaBracket {
    /// Largest exterior ground energy in the trend.
    pub lower: f64,
    pub trend: Vec<(f64, EnergyEstimate)>,
    pub converged: bool,
    /// First requested radius at which the exterior was empty, if any.
    pub truncated_at: Option<f64>,
}

impl SigmaBracket {
    pub fn error_indicator(&self) -> f64 {
        self.trend
            .iter()
            .map(|(_, e)| e.error_indicator)
            .fold(0.0, f64::max)
    }
}

fn check_schedule(radii: &[f64]) -> Result<()> {
    if radii.is_empty() {
        return Err(Error::InvalidRadius("empty schedule".into()));
    }
    if radii.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
        return Err(Error::InvalidRadius("radii must be positive".into()));
    }
    if radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidRadius("radii must be strictly increasing".into()));
    }
    Ok(())
}

/// Fails when a truncated graph does not extend past `r_max` by the margin.
pub fn check_margin(g: &MetricGraph, field: &DistanceField, r_max: f64) -> Result<()> {
    if !g.has_truncations() {
        return Ok(());
    }
    let reach = field.reach(g);
    let required = TRUNCATION_MARGIN * r_max;
    if reach < required * (1.0 - 1e-12) {
        return Err(Error::TruncationTooSmall { radius: r_max, required, reach });
    }
    Ok(())
}

/// Largest radius admissible under the truncation margin.
pub fn max_radius(g: &MetricGraph, root: Point) -> Result<f64> {
    let reach = g.distances_from(root)?.reach(g);
    Ok(if g.has_truncations() { reach / TRUNCATION_MARGIN } else { reach })
}

/// `count` evenly spaced radii up to [`max_radius`].
pub fn default_schedule(g: &MetricGraph, root: Point, count: usize) -> Result<Vec<f64>> {
    let top = max_radius(g, root)?;
    let count = count.max(1);
    Ok((1..=count).map(|i| top * i as f64 / count as f64).collect())
}

/// Lower estimate of the essential-spectrum threshold from `λ(G ∖ B_R(root))`.
pub fn sigma_estimate(
    g: &MetricGraph,
    v: &Potential,
    root: Point,
    radii: &[f64],
    opts: &ScanOptions,
) -> Result<SigmaBracket> {
    check_schedule(radii)?;
    let field = g.distances_from(root)?;
    check_margin(g, &field, radii[radii.len() - 1])?;
    let regions: Vec<Subgraph> = radii.iter().map(|&r| exterior_in(g, &field, r)).collect();
    let cut = regions.iter().position(Subgraph::is_empty);
    let kept = cut.unwrap_or(regions.len());
    if kept == 0 {
        return Err(Error::EmptySubgraph);
    }
    let energies = parallel::map(opts.exec, &regions[..kept], |s| energy_estimate(g, s, v, opts.h));
    let trend = radii[..kept]
        .iter()
        .zip(energies)
        .map(|(&r, e)| e.map(|e| (r, e)))
        .collect::<Result<Vec<_>>>()?;
    let lower = trend.iter().map(|(_, e)| e.lambda_extrapolated).fold(f64::NEG_INFINITY, f64::max);
    let converged = trend.len() >= 3 && {
        let tail: Vec<f64> = trend[trend.len() - 3..].iter().map(|(_, e)| e.lambda_extrapolated).collect();
        let hi = tail.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lo = tail.iter().cloned().fold(f64::INFINITY, f64::min);
        hi - lo <= PLATEAU_TOL * hi.abs().max(f64::MIN_POSITIVE)
    };
    Ok(SigmaBracket { lower, trend, converged, truncated_at: cut.map(|i| radii[i]) })
}

fn scan(
    g: &MetricGraph,
    v: &Potential,
    root: Point,
    radii: &[f64],
    opts: &ScanOptions,
    direction: Direction,
    within: Option<&Subgraph>,
) -> Result<RadiusScan> {
    check_schedule(radii)?;
    let field = g.distances_from(root)?;
    check_margin(g, &field, radii[radii.len() - 1])?;
    let energies = parallel::map(opts.exec, radii, |&r| {
        let mut region = match direction {
            Direction::Ball => ball_in(g, &field, r),
            Direction::Exterior => exterior_in(g, &field, r),
        };
        if let Some(s) = within {
            region = s.intersect(g, &region);
        }
        if region.is_empty() {
            Ok(None)
        } else {
            energy_estimate(g, &region, v, opts.h).map(Some)
        }
    });
    let points = radii
        .iter()
        .zip(energies)
        .map(|(&radius, e)| e.map(|energy| ScanPoint { radius, energy }))
        .collect::<Result<Vec<_>>>()?;
    Ok(RadiusScan { center: root, direction, points })
}

/// `λ(s ∩ B_R(root))` along the schedule.
pub fn expanding_ball_scan(
    g: &MetricGraph,
    v: &Potential,
    s: &Subgraph,
    root: Point,
    radii: &[f64],
    opts: &ScanOptions,
) -> Result<RadiusScan> {
    scan(g, v, root, radii, opts, Direction::Ball, Some(s))
}

/// `λ(B_R(root))` or `λ(G ∖ B_R(root))` along the schedule.
pub fn radius_scan(
    g: &MetricGraph,
    v: &Potential,
    root: Point,
    direction: Direction,
    radii: &[f64],
    opts: &ScanOptions,
) -> Result<RadiusScan> {
    scan(g, v, root, radii, opts, direction, None)
}

/// `π² / (4 |s|²)`: the ground energy of an interval of the same length with a
/// single Dirichlet end, a lower bound for compact `s` with nonempty boundary.
pub fn nicaise_bound(s: &Subgraph) -> Result<f64> {
    if s.is_empty() {
        return Err(Error::EmptySubgraph);
    }
    if s.dirichlet_points().is_empty() {
        return Err(Error::InvalidArgument("subgraph has no Dirichlet boundary".into()));
    }
    Ok(PI * PI / (4.0 * s.volume().powi(2)))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Jump {
    pub from_radius: f64,
    pub to_radius: f64,
    pub gap: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContinuityReport {
    pub scan: RadiusScan,
    pub jumps: Vec<Jump>,
}

/// Flags steps whose change exceeds [`JUMP_FACTOR`] times the larger
/// neighbouring change. Radii where the region is empty are skipped.
pub fn detect_jumps(radii: &[f64], values: &[Option<f64>]) -> Vec<Jump> {
    let pts: Vec<(f64, f64)> = radii
        .iter()
        .zip(values)
        .filter_map(|(&r, v)| v.map(|v| (r, v)))
        .collect();
    if pts.len() < 2 {
        return Vec::new();
    }
    let deltas: Vec<f64> = pts.windows(2).map(|w| w[1].1 - w[0].1).collect();
    let mut jumps = Vec::new();
    for i in 0..deltas.len() {
        let left = if i > 0 { deltas[i - 1].abs() } else { 0.0 };
        let right = deltas.get(i + 1).map_or(0.0, |d| d.abs());
        if deltas.len() == 1 {
            break;
        }
        let local = left.max(right);
        let floor = 1e-8 * pts[i].1.abs().max(pts[i + 1].1.abs()).max(1.0);
        if deltas[i].abs() > JUMP_FACTOR * local && deltas[i].abs() > floor {
            jumps.push(Jump { from_radius: pts[i].0, to_radius: pts[i + 1].0, gap: deltas[i] });
        }
    }
    jumps
}

pub fn continuity_scan(
    g: &MetricGraph,
    v: &Potential,
    root: Point,
    direction: Direction,
    radii: &[f64],
    opts: &ScanOptions,
) -> Result<ContinuityReport> {
    let scan = radius_scan(g, v, root, direction, radii, opts)?;
    let jumps = detect_jumps(radii, &scan.values());
    Ok(ContinuityReport { scan, jumps })
}

/// Evenly spaced grid `rmin, rmin + step, …` up to `rmax` inclusive.
pub fn grid(rmin: f64, rmax: f64, step: f64) -> Result<Vec<f64>> {
    if !(rmin > 0.0 && rmax >= rmin && step > 0.0) {
        return Err(Error::InvalidRadius(format!("bad grid {rmin}..{rmax} step {step}")));
    }
    let n = ((rmax - rmin) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| rmin + step * i as f64).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jump_detector_finds_isolated_step() {
        let radii: Vec<f64> = (1..=10).map(|i| i as f64).collect();
        let mut vals: Vec<Option<f64>> = radii.iter().map(|r| Some(10.0 - 0.1 * r)).collect();
        for v in vals.iter_mut().skip(6) {
            *v = Some(0.0);
        }
        let j = detect_jumps(&radii, &vals);
        assert_eq!(j.len(), 1);
        assert_eq!(j[0].to_radius, 7.0);
        let smooth: Vec<Option<f64>> = radii.iter().map(|r| Some(1.0 / (r * r))).collect();
        assert!(detect_jumps(&radii, &smooth).is_empty());
    }

    #[test]
    fn grid_includes_endpoint() {
        let g = grid(0.05, 0.45, 0.05).unwrap();
        assert_eq!(g.len(), 9);
        assert!((g[8] - 0.45).abs() < 1e-12);
    }
}
