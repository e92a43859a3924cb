use ticketzone::gallery::{make_cycle, make_half_line, make_interval, make_line, make_star, make_tree};
use ticketzone::graph::EdgeSpec;
use ticketzone::subgraph::{annulus, ball, exterior};
use ticketzone::{EdgeIx, GraphSpec, MetricGraph, Point, Potential, Subgraph, VertexIx};

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * b.abs().max(1.0)
}

fn on(g: &MetricGraph, edge: u64, offset: f64) -> Point {
    g.point(edge, offset).unwrap()
}

#[test]
fn distances_on_small_graphs() {
    let g = make_interval(10.0, None, None);
    assert!(close(g.distance(on(&g, 0, 2.0), on(&g, 0, 7.0)).unwrap(), 5.0));

    let c = make_cycle(1.0);
    assert!(close(c.distance(Point::Vertex(VertexIx(0)), on(&c, 0, 0.7)).unwrap(), 0.3));

    let s = make_star(3, 5.0);
    assert!(close(s.distance(on(&s, 0, 2.0), on(&s, 1, 2.0)).unwrap(), 4.0));
}

#[test]
fn balls_exteriors_and_annuli() {
    let g = make_interval(10.0, None, None);
    let root = Point::Vertex(VertexIx(0));
    let b = ball(&g, root, 3.0).unwrap();
    assert!(close(b.volume(), 3.0));
    assert_eq!(b.dirichlet_points(), &[on(&g, 0, 3.0)]);
    let e = exterior(&g, root, 3.0).unwrap();
    assert!(close(e.volume(), 7.0));
    assert_eq!(e.dirichlet_points(), &[on(&g, 0, 3.0)]);

    let s = make_star(3, 5.0);
    let hub = Point::Vertex(VertexIx(0));
    let b = ball(&s, hub, 2.0).unwrap();
    assert!(close(b.volume(), 6.0));
    assert_eq!(b.component_count(), 1);
    let e = exterior(&s, hub, 2.0).unwrap();
    assert_eq!(e.component_count(), 3);
    assert!(e.pieces().iter().all(|p| close(p.start, 2.0) && close(p.end, 5.0)));

    let c = make_cycle(1.0);
    let b = ball(&c, on(&c, 0, 0.4), 0.3).unwrap();
    assert!(close(b.volume(), 0.6));
    assert_eq!(b.dirichlet_points().len(), 2);
    assert!(exterior(&c, on(&c, 0, 0.4), 0.6).unwrap().is_empty());
    let a = annulus(&c, Point::Vertex(VertexIx(0)), 0.1, 0.2).unwrap();
    assert_eq!(a.component_count(), 2);
    assert!(close(a.volume(), 0.2));

    let h = make_half_line(20.0);
    let a = annulus(&h, Point::Vertex(VertexIx(0)), 2.0, 5.0).unwrap();
    assert_eq!(a.pieces().len(), 1);
    assert_eq!(a.dirichlet_points(), &[on(&h, 0, 2.0), on(&h, 0, 5.0)]);
}

#[test]
fn annulus_is_ball_minus_inner_ball() {
    let graphs = [make_line(5.0), make_star(3, 5.0), make_cycle(1.0), make_tree(2, 3), make_half_line(8.0)];
    for g in &graphs {
        let x = g.point(0, 0.3 * g.length(EdgeIx(0))).unwrap();
        for (r1, r2) in [(0.2, 0.9), (0.5, 2.5), (1.0, 4.0)] {
            let a = annulus(g, x, r1, r2).unwrap();
            let b = ball(g, x, r2).unwrap().intersect(g, &exterior(g, x, r1).unwrap());
            assert!(close(a.volume(), b.volume()), "{r1} {r2}");
            assert_eq!(a.component_count(), b.component_count());
            assert!(a.is_subset_of(g, &b) && b.is_subset_of(g, &a));
        }
    }
}

#[test]
fn potential_conventions() {
    let g = make_interval(2.0, None, None);
    let v = Potential::zero().with_edge(&g, 0, &[(1.0, 0.0), (2.0, 5.0)]).unwrap();
    assert_eq!(v.evaluate(&g, on(&g, 0, 1.0)), 5.0);
    assert_eq!(v.evaluate(&g, on(&g, 0, 0.5)), 0.0);
    let part = Subgraph::new(&g, vec![ticketzone::subgraph::Piece { edge: EdgeIx(0), start: 0.5, end: 1.5 }], &[]).unwrap();
    assert!(close(v.integrate(&part), 2.5));
    assert!(close(Potential::constant(3.0).unwrap().integrate(&Subgraph::whole(&g)), 6.0));
    assert_eq!(Potential::zero().integrate(&Subgraph::whole(&g)), 0.0);
    assert!(Potential::zero().with_edge(&g, 0, &[(1.0, -1.0), (2.0, 0.0)]).is_err());
}

#[test]
fn graph_json_round_trip_and_rejections() {
    let text = r#"{"vertices":[3,7],"edges":[{"id":9,"from":3,"to":7,"length":2.5}],
        "truncated_ends":[{"vertex":7,"condition":"free","tag":"ray"}],
        "potential":[{"edge":9,"pieces":[{"upto":1.0,"value":0.0},{"upto":2.5,"value":4.0}]}]}"#;
    let spec = GraphSpec::from_json(text).unwrap();
    let again = GraphSpec::from_json(&spec.to_json().unwrap()).unwrap();
    assert_eq!(spec, again);
    let g = MetricGraph::build(&spec).unwrap();
    let v = Potential::from_graph_spec(&g, &spec).unwrap();
    assert_eq!(v.evaluate(&g, g.point(9, 2.0).unwrap()), 4.0);

    let bad = |edges: Vec<EdgeSpec>, vertices: Vec<u64>| MetricGraph::build(&GraphSpec { vertices, edges, ..Default::default() });
    assert!(bad(vec![EdgeSpec { id: 0, from: 0, to: 1, length: -1.0 }], vec![0, 1]).is_err());
    assert!(bad(vec![EdgeSpec { id: 0, from: 0, to: 5, length: 1.0 }], vec![0, 1]).is_err());
    assert!(bad(vec![EdgeSpec { id: 0, from: 0, to: 1, length: 1.0 }], vec![0, 1, 2]).is_err());
    assert!(bad(vec![], vec![0]).is_err());
    assert!(g.point(9, 3.0).is_err());
}
