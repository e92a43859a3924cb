//! One PASS/FAIL line per acceptance criterion.

use std::f64::consts::PI;
use std::time::Instant;

use ticketzone::asymptotics::{continuity_scan, default_schedule, grid, radius_scan, sigma_estimate, Direction, ScanOptions};
use ticketzone::gallery::{
    glued_pendant_edges, make_cycle, make_glued_tree_star, make_half_line, make_interval, make_interval_plus_lead,
    make_line, make_star, make_tree, nested_pair, vertex_cut_probes,
};
use ticketzone::partition::{energy, optimize_k, OptimizeOptions};
use ticketzone::spectral::{eigenvalue_estimates, energy_estimate, energy_single, ground_energy};
use ticketzone::zones::{build_equipartition_rings, ZoneOptions};
use ticketzone::{EndCondition, Execution, MetricGraph, Partition, Point, Potential, Subgraph, VertexIx};

const ORIGIN: Point = Point::Vertex(VertexIx(0));
const H: f64 = 0.05;

type Outcome = (bool, String);

fn theta_sq() -> f64 {
    (1.0f64 / 3.0).asin().powi(2)
}

fn interval_oracle() -> Outcome {
    let g = make_interval(1.0, Some(EndCondition::Dirichlet), Some(EndCondition::Dirichlet));
    let start = Instant::now();
    let lam = ground_energy(&g, &Subgraph::whole(&g), &Potential::zero(), 1e-3).unwrap().lambda_extrapolated;
    let secs = start.elapsed().as_secs_f64();
    let err = (lam - PI * PI).abs() / (PI * PI);
    (err <= 1e-6 && secs < 2.0, format!("lambda {lam:.10}, rel err {err:.2e}, {secs:.3}s"))
}

fn cycle_ball_scan() -> Outcome {
    let g = make_cycle(1.0);
    let v = Potential::zero();
    let opts = ScanOptions { h: H, exec: Execution::Parallel };
    let radii: Vec<f64> = (1..=9).map(|i| 0.05 * i as f64).chain([0.5, 0.6]).collect();
    let vals = radius_scan(&g, &v, ORIGIN, Direction::Ball, &radii, &opts).unwrap().values();
    let mut worst = 0.0f64;
    let mut ok = true;
    for (r, val) in radii.iter().zip(&vals) {
        let val = val.expect("nonempty ball");
        if *r < 0.5 - 1e-12 {
            let exact = PI * PI / (4.0 * r * r);
            worst = worst.max((val - exact).abs() / exact);
        } else {
            ok &= val.abs() < 1e-8;
        }
    }
    ok &= worst <= 1e-3;
    let step = 0.01;
    let rep = continuity_scan(&g, &v, ORIGIN, Direction::Ball, &grid(0.05, 0.6, step).unwrap(), &opts).unwrap();
    ok &= rep.jumps.len() == 1 && (rep.jumps[0].to_radius - 0.5).abs() <= step + 1e-9;
    (ok, format!("worst rel err {worst:.2e}, jumps at {:?}", rep.jumps.iter().map(|j| j.to_radius).collect::<Vec<_>>()))
}

fn tree_threshold() -> Outcome {
    let t2 = theta_sq();
    let vals: Vec<f64> = [6, 8, 10, 12]
        .iter()
        .map(|&d| {
            let g = make_tree(2, d);
            energy_estimate(&g, &Subgraph::whole(&g), &Potential::zero(), H).unwrap().lambda_extrapolated
        })
        .collect();
    let ok = vals.windows(2).all(|w| w[1] < w[0]) && vals.iter().all(|&x| x >= t2) && (vals[3] - t2).abs() <= 5e-2;
    (ok, format!("depths 6..12: {vals:.5?}, theta^2 {t2:.5}"))
}

fn sigma_bound() -> Outcome {
    let lambda_bar = 2.0 * PI * PI;
    let (lead, lead_v) = make_interval_plus_lead(20.0, lambda_bar);
    let graphs: Vec<(&str, MetricGraph, Potential, Point, Option<usize>)> = vec![
        ("line", make_line(10.0), Potential::zero(), ORIGIN, None),
        ("3-star", make_star(3, 10.0), Potential::zero(), ORIGIN, None),
        ("tree", make_tree(2, 3), Potential::zero(), ORIGIN, Some(0)),
        ("compact+lead", lead, lead_v, Point::Vertex(VertexIx(1)), None),
    ];
    let mut ok = true;
    let mut detail = Vec::new();
    for (name, g, v, root, extra) in &graphs {
        let radii = default_schedule(g, *root, 8).unwrap();
        let sigma = sigma_estimate(g, v, *root, &radii, &ScanOptions { h: H, exec: Execution::Parallel }).unwrap();
        let sigma_err: f64 = sigma.trend.iter().map(|(_, e)| e.error_indicator).sum();
        for k in 1..=3 {
            let opts = OptimizeOptions { h: H, max_cuts: extra.map(|x| k + x), ..Default::default() };
            let best = optimize_k(g, v, k, &opts).unwrap();
            let slack = 2.0 * (best.report.error_indicator_sum() + sigma_err);
            let pass = best.report.energy <= sigma.lower + slack;
            ok &= pass;
            if !pass {
                detail.push(format!("{name} k={k}: {} > {}", best.report.energy, sigma.lower + slack));
            }
        }
    }
    (ok, if detail.is_empty() { "12 of 12 (graph, k) pairs".into() } else { detail.join("; ") })
}

fn ticket_zones() -> Outcome {
    let g = make_half_line(20.0);
    let mut ok = true;
    let mut worst = (0.0f64, 0.0f64);
    for target in [PI * PI, 4.0 * PI * PI] {
        let rings = build_equipartition_rings(&g, &Potential::zero(), ORIGIN, target, 5, &ZoneOptions { h: H, ..Default::default() }).unwrap();
        ok &= rings.rings.len() == 5;
        let width = PI / target.sqrt();
        for r in &rings.rings {
            let dw = (r.r_outer - r.r_inner - width).abs();
            let de = (r.energy.lambda_extrapolated - target).abs() / target;
            worst = (worst.0.max(dw), worst.1.max(de));
            ok &= dw <= 1e-3 && de <= 1e-3;
        }
    }
    (ok, format!("worst width err {:.2e}, worst rel energy err {:.2e}", worst.0, worst.1))
}

fn minmax_optimizer() -> Outcome {
    let g = make_interval(1.0, None, None);
    let best = optimize_k(&g, &Potential::zero(), 3, &OptimizeOptions::default()).unwrap();
    let mut cuts = best.offsets.concat();
    cuts.sort_by(f64::total_cmp);
    let exact = 4.0 * PI * PI;
    let mut ok = cuts.len() == 2 && (cuts[0] - 0.25).abs() <= 1e-3 && (cuts[1] - 0.75).abs() <= 1e-3;
    ok &= (best.report.energy - exact).abs() <= 1e-2 * exact;
    let l = 10.0;
    let star = optimize_k(&make_star(3, l), &Potential::zero(), 3, &OptimizeOptions::default()).unwrap();
    let ray = PI * PI / (4.0 * l * l);
    ok &= (star.report.energy - ray).abs() <= 1e-2 * ray;
    (ok, format!("cuts {cuts:.5?}, interval {:.5}, star {:.6} vs {ray:.6}", best.report.energy, star.report.energy))
}

fn glued_tree_star() -> Outcome {
    let t2 = theta_sq();
    let k = 3;
    let g = make_glued_tree_star(2, 6, k);
    let v = Potential::zero();
    let ev = eigenvalue_estimates(&g, &Subgraph::whole(&g), &v, H, k).unwrap();
    let l: Vec<f64> = ev.iter().map(|e| e.lambda_extrapolated).collect();
    let mut ok = (l[1] - t2).abs() <= 1e-2 && (l[2] - t2).abs() <= 1e-2 && l[0] <= l[1] + 1e-8;
    let pendants = glued_pendant_edges(&g, k);
    let cut = Subgraph::new(&g, Subgraph::whole(&g).pieces().to_vec(), &[ORIGIN]).unwrap();
    let clusters: Vec<Subgraph> = cut
        .components(&g)
        .into_iter()
        .filter(|c| c.pieces().iter().all(|p| pendants.contains(&p.edge)))
        .collect();
    let part = Partition::new(&g, clusters, vec![ORIGIN]);
    let rep = energy(&g, &part, &v, H, Execution::Parallel).unwrap();
    ok &= part.k() == k && (rep.energy - t2).abs() <= 1e-2;
    let probes = vertex_cut_probes(&g, &v, k, VertexIx(0), &[1e-3, 1e-2, 0.1, 0.5], H).unwrap();
    let slack = 2.0 * rep.error_indicator_sum();
    let beaten = probes.iter().filter(|p| p.energy.is_some_and(|e| e < rep.energy - slack - 2.0 * p.error)).count();
    ok &= beaten == 0;
    (ok, format!("lambda_1..3 {l:.5?}, k-interval energy {:.6}, {} probes, {beaten} better", rep.energy, probes.len()))
}

fn monotonicity_shift() -> Outcome {
    let (lead, lead_v) = make_interval_plus_lead(20.0, 2.0 * PI * PI);
    let graphs = [
        make_line(5.0),
        make_star(3, 5.0),
        make_cycle(1.0),
        make_tree(2, 4),
        lead,
    ];
    let mut ok = true;
    let mut pairs = 0;
    let mut worst_shift = 0.0f64;
    for (gi, g) in graphs.iter().enumerate() {
        let v = if gi == 4 { lead_v.clone() } else { Potential::zero() };
        let mut found = 0;
        let mut i = 0;
        while found < 50 {
            let u = [((i as f64 + 0.5) * 0.754_877_666).fract(), ((i as f64 + 0.5) * 0.569_840_291).fract(), 0.0, 0.0];
            if let Some((outer, inner)) = nested_pair(g, i, u).unwrap() {
                let a = energy_estimate(g, &outer, &v, H).unwrap();
                let b = energy_estimate(g, &inner, &v, H).unwrap();
                ok &= b.lambda_extrapolated >= a.lambda_extrapolated - 2.0 * (a.error_indicator + b.error_indicator);
                found += 1;
            }
            i += 1;
            assert!(i < 1000, "could not draw nested pairs");
        }
        pairs += found;
        let s = Subgraph::whole(g);
        for c in [0.5, 3.0] {
            let d = energy_single(g, &s, &v.shifted(c), H).unwrap() - energy_single(g, &s, &v, H).unwrap() - c;
            worst_shift = worst_shift.max(d.abs());
        }
    }
    ok &= worst_shift <= 1e-10;
    (ok, format!("{pairs} nested pairs, worst shift error {worst_shift:.1e}"))
}

fn compact_plus_lead() -> Outcome {
    let lambda_bar = 2.0 * PI * PI;
    let opts = OptimizeOptions::default();
    let compact = make_interval(1.0, None, None);
    let mut k = 0;
    while k < 6 && optimize_k(&compact, &Potential::zero(), k + 1, &opts).unwrap().report.energy <= lambda_bar {
        k += 1;
    }
    let ell = 1;
    let (g, v) = make_interval_plus_lead(200.0, lambda_bar);
    let low: Vec<f64> = (1..=2).map(|j| optimize_k(&g, &v, j, &opts).unwrap().report.energy).collect();
    let j = k + ell + 2;
    let high = optimize_k(&g, &v, j, &opts).unwrap().report.energy;
    let ok = k == 2 && low.iter().all(|&e| e <= lambda_bar) && (high - lambda_bar).abs() <= 1e-2 && high >= lambda_bar - 1e-2;
    (ok, format!("k={k}, j=1,2 energies {low:.4?}, j={j} energy {high:.5} vs {lambda_bar:.5}"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("interval oracle", interval_oracle),
        ("cycle ball scan", cycle_ball_scan),
        ("tree threshold", tree_threshold),
        ("energy below threshold", sigma_bound),
        ("ticket zones", ticket_zones),
        ("min-max optimizer", minmax_optimizer),
        ("glued tree and pendants", glued_tree_star),
        ("monotonicity and shift", monotonicity_shift),
        ("compact plus lead", compact_plus_lead),
    ];
    let mut failed = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (ok, detail) = run();
        println!(
            "criterion {}: {} {name} ({detail}) [{:.1}s]",
            i + 1,
            if ok { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64()
        );
        if !ok {
            failed.push(i + 1);
        }
    }
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
