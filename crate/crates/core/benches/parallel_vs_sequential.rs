use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use phindex::degree::{degree_s2_with, SphereMap};
use phindex::euler::{chi_voxel_with, Inclusion};
use phindex::field::{ExprField, VectorField};
use phindex::linalg::Vec3;
use phindex::manifold::DomainManifold;
use phindex::par::Execution;
use phindex::zerofind::{find_interior_zeros, SearchOptions};
use phindex::Result;

const MODES: [(&str, Execution); 2] = [("parallel", Execution::Parallel), ("sequential", Execution::Sequential)];

fn solid_torus() -> DomainManifold {
    DomainManifold::parse(
        "(x1^2 + x2^2 + x3^2 + 3)^2 - 16*(x1^2 + x2^2)",
        &[(-4.0, 4.0), (-4.0, 4.0), (-2.0, 2.0)],
        "solid_torus",
    )
    .unwrap()
}

fn bench_chi_voxel(c: &mut Criterion) {
    let m = solid_torus();
    let mut group = c.benchmark_group("chi_voxel");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::new(name, 32), &exec, |b, &exec| {
            b.iter(|| chi_voxel_with(m.level(), Inclusion::Sublevel, 32, exec).unwrap())
        });
    }
    group.finish();
}

fn bench_degree_s2(c: &mut Criterion) {
    let v = ExprField::parse(&["x1^3 - x2*x3", "x2 + x1^2*x3", "x3 - x1*x2"]).unwrap();
    let f = |x: &Vec3| -> Result<Vec3> { v.eval(x) };
    let map = SphereMap::new(3, [0.0; 3], 0.5, &f);
    let mut group = c.benchmark_group("degree_s2");
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::new(name, 5), &exec, |b, &exec| {
            b.iter(|| degree_s2_with(&map, 5, exec).unwrap())
        });
    }
    group.finish();
}

fn bench_zero_search(c: &mut Criterion) {
    let m = DomainManifold::parse("x1^2 + x2^2 + x3^2 - 1", &[(-2.0, 2.0); 3], "ball_3").unwrap();
    let v = ExprField::parse(&["x1^2 - 0.25", "x2", "x3*(x3^2 - 0.04)"]).unwrap();
    let mut group = c.benchmark_group("zero_search");
    group.sample_size(10);
    for (name, exec) in MODES {
        let opts = SearchOptions {
            exec,
            ..SearchOptions::default()
        };
        group.bench_with_input(BenchmarkId::new(name, opts.depth), &opts, |b, opts| {
            b.iter(|| find_interior_zeros(&m, &v, opts).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_chi_voxel, bench_degree_s2, bench_zero_search);
criterion_main!(benches);
