//! A ball around the root followed by ticket-zone annuli.

use crate::asymptotics::max_radius;
use crate::error::{Error, Result};
use crate::graph::{MetricGraph, Point};
use crate::potential::Potential;
use crate::spectral::energy_estimate;
use crate::subgraph::ball_in;
use crate::zones::{rings_below, ZoneOptions};

use super::Partition;

/// Smallest radius (to the radius tolerance) whose closed ball has ground
/// energy at most `target`.
pub fn find_ball_radius(g: &MetricGraph, v: &Potential, root: Point, target: f64, opts: &ZoneOptions) -> Result<f64> {
    let field = g.distances_from(root)?;
    let reach = field.reach(g);
    let limit = max_radius(g, root)?;
    let f = |r: f64| -> Result<f64> { Ok(energy_estimate(g, &ball_in(g, &field, r), v, opts.h)?.lambda_extrapolated) };
    let mut lo = 0.0;
    let mut hi = (0.5 * std::f64::consts::PI / target.max(f64::MIN_POSITIVE).sqrt()).min(limit);
    loop {
        if f(hi)? <= target {
            break;
        }
        if hi >= limit {
            return Err(Error::TruncationTooSmall { radius: hi, required: 1.25 * hi, reach });
        }
        lo = hi;
        hi = (2.0 * hi).min(limit);
    }
    while hi - lo > opts.radius_tol * reach {
        let mid = 0.5 * (lo + hi);
        if f(mid)? <= target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Cluster 1 is a ball with energy at most `target`; clusters 2..k are the
/// lowest components of successive annuli with energy at most `target`.
pub fn constructive_annulus_partition(
    g: &MetricGraph,
    v: &Potential,
    root: Point,
    k: usize,
    target: f64,
    opts: &ZoneOptions,
) -> Result<Partition> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    let r1 = find_ball_radius(g, v, root, target, opts)?;
    let ball = ball_in(g, &g.distances_from(root)?, r1);
    let mut cuts: Vec<Point> = ball.dirichlet_points().to_vec();
    let mut clusters = vec![ball];
    if k > 1 {
        for (_, c) in rings_below(g, v, root, target, k - 1, r1, opts)? {
            cuts.extend(c.dirichlet_points().iter().copied());
            clusters.push(c);
        }
    }
    cuts.sort_by_key(Point::sort_key);
    cuts.dedup_by_key(|p| p.sort_key());
    Ok(Partition::new(g, clusters, cuts))
}
