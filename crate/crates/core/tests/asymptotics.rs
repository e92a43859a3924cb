use std::f64::consts::PI;

use ticketzone::asymptotics::{
    continuity_scan, default_schedule, detect_jumps, expanding_ball_scan, grid, nicaise_bound, radius_scan,
    sigma_estimate, Direction, ScanOptions,
};
use ticketzone::gallery::{make_cycle, make_half_line, make_interval, make_line, make_star, make_tree, theta};
use ticketzone::subgraph::{annulus, ball};
use ticketzone::{EndCondition, Error, Execution, Point, Potential, Subgraph, VertexIx};

const ORIGIN: Point = Point::Vertex(VertexIx(0));

fn opts() -> ScanOptions {
    ScanOptions { h: 0.05, exec: Execution::Sequential }
}

#[test]
fn constant_potential_half_line_threshold() {
    let lambda_bar = 2.0;
    let g = make_half_line(200.0);
    let v = Potential::constant(lambda_bar).unwrap();
    let radii = default_schedule(&g, ORIGIN, 8).unwrap();
    let s = sigma_estimate(&g, &v, ORIGIN, &radii, &opts()).unwrap();
    assert!((s.lower - lambda_bar).abs() < 1e-2, "{}", s.lower);
    assert!(s.trend.iter().all(|(_, e)| e.lambda_extrapolated >= lambda_bar));
}

#[test]
fn line_threshold_tends_to_zero() {
    let g = make_line(50.0);
    let radii = default_schedule(&g, ORIGIN, 8).unwrap();
    let s = sigma_estimate(&g, &Potential::zero(), ORIGIN, &radii, &opts()).unwrap();
    for (r, e) in &s.trend {
        let exact = PI * PI / (4.0 * (50.0 - r).powi(2));
        assert!((e.lambda_extrapolated - exact).abs() < 1e-6 * exact.max(1.0));
    }
    assert!(s.lower < 0.03);
}

#[test]
fn tree_exteriors_stay_above_theta_squared() {
    let g = make_tree(2, 8);
    let radii = default_schedule(&g, ORIGIN, 4).unwrap();
    let s = sigma_estimate(&g, &Potential::zero(), ORIGIN, &radii, &ScanOptions { h: 0.05, exec: Execution::Parallel }).unwrap();
    let t2 = (1.0f64 / 3.0).asin().powi(2);
    assert!((theta(2).powi(2) - t2).abs() < 1e-14);
    assert!(s.trend.iter().all(|(_, e)| e.lambda_extrapolated >= t2));
}

#[test]
fn ball_scans_match_interval_oracles() {
    let c = make_cycle(1.0);
    let scan = radius_scan(&c, &Potential::zero(), ORIGIN, Direction::Ball, &[0.1, 0.25, 0.4, 0.5], &opts()).unwrap();
    let vals: Vec<f64> = scan.values().into_iter().map(Option::unwrap).collect();
    assert!((vals[1] - 4.0 * PI * PI).abs() < 1e-3 * 4.0 * PI * PI);
    assert!(vals[3].abs() < 1e-8);

    let h = make_interval(30.0, Some(EndCondition::Dirichlet), None);
    let far = Point::Vertex(VertexIx(1));
    let radii = [1.0, 2.0, 5.0, 10.0];
    let scan = radius_scan(&h, &Potential::zero(), far, Direction::Ball, &radii, &opts()).unwrap();
    for (r, v) in radii.iter().zip(scan.values()) {
        let exact = PI * PI / (4.0 * r * r);
        assert!((v.unwrap() - exact).abs() < 1e-4 * exact);
    }
}

#[test]
fn ball_scans_are_nonincreasing() {
    let graphs = [make_line(6.0), make_star(3, 6.0), make_cycle(1.0), make_tree(2, 4), make_half_line(6.0)];
    for g in &graphs {
        let radii = default_schedule(g, ORIGIN, 10).unwrap();
        let vals = radius_scan(g, &Potential::zero(), ORIGIN, Direction::Ball, &radii, &opts()).unwrap().values();
        for w in vals.windows(2) {
            let (a, b) = (w[0].unwrap(), w[1].unwrap());
            assert!(b <= a + 1e-6 * a.max(1.0), "{a} -> {b}");
        }
    }
}

#[test]
fn expanding_ball_inside_subgraph() {
    let c = make_cycle(1.0);
    let arc = annulus(&c, ORIGIN, 0.1, 0.4).unwrap();
    let part = arc.components(&c).remove(0);
    let fine = ScanOptions { h: 0.005, exec: Execution::Sequential };
    let scan = expanding_ball_scan(&c, &Potential::zero(), &part, ORIGIN, &[0.2, 0.3, 0.45], &fine).unwrap();
    let vals = scan.values();
    let exact = |len: f64| PI * PI / (len * len);
    assert!((vals[0].unwrap() - exact(0.1)).abs() < 1e-3 * exact(0.1));
    assert!((vals[2].unwrap() - exact(0.3)).abs() < 1e-3 * exact(0.3));
}

#[test]
fn nicaise_lower_bound() {
    let one = make_interval(1.0, Some(EndCondition::Dirichlet), None);
    let s = Subgraph::whole(&one);
    assert!((nicaise_bound(&s).unwrap() - PI * PI / 4.0).abs() < 1e-12);
    let two = make_interval(1.0, Some(EndCondition::Dirichlet), Some(EndCondition::Dirichlet));
    let lam = ticketzone::ground_energy(&two, &Subgraph::whole(&two), &Potential::zero(), 0.05).unwrap();
    assert!(nicaise_bound(&Subgraph::whole(&two)).unwrap() <= lam.lambda_extrapolated);
    let c = make_cycle(1.0);
    let small = ball(&c, ORIGIN, 1e-3).unwrap();
    assert!(nicaise_bound(&small).unwrap() > 1e5);
    assert!(nicaise_bound(&Subgraph::empty()).is_err());
}

#[test]
fn jumps_only_where_the_ball_closes_up() {
    let c = make_cycle(1.0);
    let radii = grid(0.05, 0.6, 0.01).unwrap();
    let ball = continuity_scan(&c, &Potential::zero(), ORIGIN, Direction::Ball, &radii, &opts()).unwrap();
    assert_eq!(ball.jumps.len(), 1);
    assert!((ball.jumps[0].to_radius - 0.5).abs() <= 0.01 + 1e-9);

    let radii = grid(0.05, 0.45, 0.01).unwrap();
    let ext = continuity_scan(&c, &Potential::zero(), ORIGIN, Direction::Exterior, &radii, &opts()).unwrap();
    assert!(ext.jumps.is_empty());

    let i = make_interval(1.0, None, None);
    let radii = grid(0.05, 0.95, 0.01).unwrap();
    let rep = continuity_scan(&i, &Potential::zero(), ORIGIN, Direction::Ball, &radii, &opts()).unwrap();
    assert!(rep.jumps.is_empty());

    assert!(detect_jumps(&[1.0, 2.0, 3.0], &[Some(1.0), None, Some(1.0)]).is_empty());
}

#[test]
fn schedule_and_truncation_errors() {
    let g = make_half_line(10.0);
    let v = Potential::zero();
    assert!(matches!(
        sigma_estimate(&g, &v, ORIGIN, &[2.0, 9.0], &opts()),
        Err(Error::TruncationTooSmall { .. })
    ));
    assert!(sigma_estimate(&g, &v, ORIGIN, &[2.0, 1.0], &opts()).is_err());
    assert!(sigma_estimate(&g, &v, ORIGIN, &[], &opts()).is_err());
    assert!(grid(0.0, 1.0, 0.1).is_err());
}
