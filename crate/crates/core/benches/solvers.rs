use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use ticketzone::asymptotics::{default_schedule, sigma_estimate, ScanOptions};
use ticketzone::gallery::{make_star, make_tree};
use ticketzone::partition::{optimize_k, OptimizeOptions};
use ticketzone::{Execution, Point, Potential, VertexIx};

const POLICIES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn sigma_scan(c: &mut Criterion) {
    let g = make_tree(2, 9);
    let root = Point::Vertex(VertexIx(0));
    let radii = default_schedule(&g, root, 8).unwrap();
    let v = Potential::zero();
    let mut group = c.benchmark_group("sigma_scan_tree9");
    group.sample_size(10);
    for (name, exec) in POLICIES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| sigma_estimate(&g, &v, root, black_box(&radii), &ScanOptions { h: 0.05, exec }).unwrap())
        });
    }
    group.finish();
}

fn topology_search(c: &mut Criterion) {
    let g = make_star(4, 3.0);
    let v = Potential::zero();
    let mut group = c.benchmark_group("optimize_star4_k3");
    group.sample_size(10);
    for (name, exec) in POLICIES {
        let opts = OptimizeOptions { h: 0.05, refine: 2, exec, ..Default::default() };
        group.bench_with_input(BenchmarkId::from_parameter(name), &opts, |b, opts| {
            b.iter(|| optimize_k(&g, &v, black_box(3), opts).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, sigma_scan, topology_search);
criterion_main!(benches);
