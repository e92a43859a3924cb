//! Ticket zones: annuli with a prescribed ground energy, and ring
//! equipartitions built from them.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::asymptotics::{default_schedule, max_radius, sigma_estimate, ScanOptions};
use crate::error::{Error, Result};
use crate::graph::{DistanceField, MetricGraph, Point};
use crate::parallel::Execution;
use crate::partition::Partition;
use crate::potential::Potential;
use crate::spectral::{energy_estimate, EnergyEstimate, DEFAULT_MESH};
use crate::subgraph::{annulus_in, Subgraph};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZoneOptions {
    pub h: f64,
    /// Relative energy tolerance of the equaliser.
    pub tol: f64,
    /// Radius tolerance relative to the reach of the root.
    pub radius_tol: f64,
    /// Inner radius of the first ring.
    pub start_radius: f64,
    /// Compare the target with an essential-spectrum estimate first.
    pub check_sigma: bool,
    pub exec: Execution,
}

impl Default for ZoneOptions {
    fn default() -> Self {
        ZoneOptions {
            h: DEFAULT_MESH,
            tol: 1e-3,
            radius_tol: 1e-6,
            start_radius: 1.0,
            check_sigma: true,
            exec: Execution::default(),
        }
    }
}

struct Probe<'a> {
    g: &'a MetricGraph,
    v: &'a Potential,
    field: DistanceField,
    reach: f64,
    limit: f64,
    h: f64,
}

impl<'a> Probe<'a> {
    fn new(g: &'a MetricGraph, v: &'a Potential, root: Point, h: f64) -> Result<Self> {
        let field = g.distances_from(root)?;
        let reach = field.reach(g);
        let limit = max_radius(g, root)?;
        Ok(Probe { g, v, field, reach, limit, h })
    }

    fn annulus(&self, r1: f64, r3: f64) -> Subgraph {
        annulus_in(self.g, &self.field, r1, r3)
    }

    /// `λ(A_{r1,r3})`, infinite when the annulus is empty.
    fn energy(&self, r1: f64, r3: f64) -> Result<f64> {
        let a = self.annulus(r1, r3);
        if a.is_empty() {
            return Ok(f64::INFINITY);
        }
        Ok(energy_estimate(self.g, &a, self.v, self.h)?.lambda_extrapolated)
    }

    /// Smallest `r3` with `λ(A_{r1,r3}) ≤ target`, by doubling and bisection.
    fn outer(&self, r1: f64, target: f64, radius_tol: f64) -> Result<f64> {
        if !(r1 > 0.0) {
            return Err(Error::InvalidRadius(format!("inner radius must be positive, got {r1}")));
        }
        if r1 >= self.limit {
            return Err(Error::TruncationTooSmall { radius: r1, required: r1 * 1.25, reach: self.reach });
        }
        let tol = radius_tol * self.reach;
        let mut width = 0.25 * PI / target.max(f64::MIN_POSITIVE).sqrt();
        let mut lo = r1;
        let hi;
        loop {
            let r3 = (r1 + width).min(self.limit);
            if self.energy(r1, r3)? <= target {
                hi = r3;
                break;
            }
            if r3 >= self.limit {
                return Err(Error::TruncationTooSmall {
                    radius: r3,
                    required: crate::asymptotics::TRUNCATION_MARGIN * r3,
                    reach: self.reach,
                });
            }
            lo = r3;
            width *= 2.0;
        }
        let mut hi = hi;
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            if self.energy(r1, mid)? <= target {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(hi)
    }

    /// `r2 ∈ [r1, r3)` with `λ(A_{r2,r3}) = target` within the tolerance.
    fn inner(&self, r1: f64, r3: f64, target: f64, tol: f64, radius_tol: f64) -> Result<f64> {
        let f_lo = self.energy(r1, r3)?;
        if (f_lo - target).abs() <= tol * target.abs() {
            return Ok(r1);
        }
        if f_lo > target {
            return Err(Error::NoBracket { lo: r1, hi: r3, f_lo, f_hi: f64::INFINITY });
        }
        let (mut lo, mut hi) = (r1, r3);
        let rtol = radius_tol * self.reach;
        let mut best = (r1, f_lo);
        while hi - lo > rtol {
            let mid = 0.5 * (lo + hi);
            let f = self.energy(mid, r3)?;
            if (f - target).abs() < (best.1 - target).abs() {
                best = (mid, f);
            }
            if f <= target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        if (best.1 - target).abs() > tol * target.abs() {
            return Err(Error::NoBracket { lo: r1, hi: r3, f_lo, f_hi: best.1 });
        }
        Ok(best.0)
    }
}

fn check_target(g: &MetricGraph, v: &Potential, root: Point, target: f64, opts: &ZoneOptions) -> Result<()> {
    if !(target.is_finite() && target > 0.0) {
        return Err(Error::InvalidArgument(format!("target energy must be positive, got {target}")));
    }
    if opts.check_sigma {
        let radii = default_schedule(g, root, 8)?;
        let sigma = sigma_estimate(g, v, root, &radii, &ScanOptions { h: opts.h, exec: opts.exec })?;
        if target <= sigma.lower {
            return Err(Error::TargetBelowSigma { target, sigma: sigma.lower });
        }
    }
    Ok(())
}

/// Smallest radius `R3` with `λ(A_{R1,R3}) ≤ target`, to the radius tolerance.
pub fn find_outer_radius(
    g: &MetricGraph,
    v: &Potential,
    root: Point,
    r1: f64,
    target: f64,
    opts: &ZoneOptions,
) -> Result<f64> {
    check_target(g, v, root, target, opts)?;
    Probe::new(g, v, root, opts.h)?.outer(r1, target, opts.radius_tol)
}

/// Inner radius `R2 ∈ [R1, R3)` with `λ(A_{R2,R3})` equal to the target.
pub fn equalize_inner_radius(
    g: &MetricGraph,
    v: &Potential,
    root: Point,
    r3: f64,
    target: f64,
    r1: f64,
    opts: &ZoneOptions,
) -> Result<f64> {
    Probe::new(g, v, root, opts.h)?.inner(r1, r3, target, opts.tol, opts.radius_tol)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ring {
    pub index: usize,
    pub r_inner: f64,
    pub r_outer: f64,
    pub energy: EnergyEstimate,
    /// Index of the selected component among the annulus components.
    pub component: usize,
    pub components: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RingPartition {
    pub rings: Vec<Ring>,
    pub partition: Partition,
}

impl RingPartition {
    pub fn to_csv(&self) -> String {
        use crate::report::fmt;
        let mut out = String::from("ring,r_inner,r_outer,lambda,component\n");
        for r in &self.rings {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                r.index,
                fmt(r.r_inner),
                fmt(r.r_outer),
                fmt(r.energy.lambda_extrapolated),
                r.component
            ));
        }
        out
    }
}

/// Lowest-energy component, ties within `tol` going to the lowest edge.
fn select_component(
    g: &MetricGraph,
    v: &Potential,
    a: &Subgraph,
    h: f64,
    tol: f64,
) -> Result<(usize, Subgraph, EnergyEstimate, usize)> {
    let comps = a.components(g);
    let energies = comps
        .iter()
        .map(|c| energy_estimate(g, c, v, h))
        .collect::<Result<Vec<_>>>()?;
    let min = energies.iter().map(|e| e.lambda_extrapolated).fold(f64::INFINITY, f64::min);
    let best = (0..comps.len())
        .filter(|&i| energies[i].lambda_extrapolated <= min + tol * min.abs())
        .min_by_key(|&i| (comps[i].min_edge(), i))
        .ok_or(Error::EmptySubgraph)?;
    Ok((best, comps[best].clone(), energies[best], comps.len()))
}

/// `count` contiguous rings, each equalised to the target energy.
pub fn build_equipartition_rings(
    g: &MetricGraph,
    v: &Potential,
    root: Point,
    target: f64,
    count: usize,
    opts: &ZoneOptions,
) -> Result<RingPartition> {
    if count == 0 {
        return Err(Error::InvalidArgument("ring count must be at least 1".into()));
    }
    check_target(g, v, root, target, opts)?;
    let probe = Probe::new(g, v, root, opts.h)?;
    let mut r1 = opts.start_radius;
    let mut rings = Vec::with_capacity(count);
    let mut clusters = Vec::with_capacity(count);
    let mut cuts = Vec::new();
    for index in 0..count {
        let r3 = probe.outer(r1, target, opts.radius_tol)?;
        let r2 = probe.inner(r1, r3, target, opts.tol, opts.radius_tol)?;
        let a = probe.annulus(r2, r3);
        let (component, cluster, energy, components) = select_component(g, v, &a, opts.h, opts.tol)?;
        cuts.extend(cluster.dirichlet_points().iter().copied());
        clusters.push(cluster);
        rings.push(Ring { index, r_inner: r2, r_outer: r3, energy, component, components });
        r1 = r3;
    }
    cuts.sort_by_key(Point::sort_key);
    cuts.dedup_by_key(|p| p.sort_key());
    Ok(RingPartition { rings, partition: Partition::new(g, clusters, cuts) })
}

/// Rings with `λ ≤ target` and no equalisation, starting at `r1`.
pub(crate) fn rings_below(
    g: &MetricGraph,
    v: &Potential,
    root: Point,
    target: f64,
    count: usize,
    r1: f64,
    opts: &ZoneOptions,
) -> Result<Vec<(Ring, Subgraph)>> {
    let probe = Probe::new(g, v, root, opts.h)?;
    let mut r1 = r1;
    let mut out = Vec::with_capacity(count);
    for index in 0..count {
        let r3 = probe.outer(r1, target, opts.radius_tol)?;
        let a = probe.annulus(r1, r3);
        let (component, cluster, energy, components) = select_component(g, v, &a, opts.h, opts.tol)?;
        out.push((Ring { index, r_inner: r1, r_outer: r3, energy, component, components }, cluster));
        r1 = r3;
    }
    Ok(out)
}
