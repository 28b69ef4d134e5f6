use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use satake_core::building::{bfs_layers, standard_chamber, Ring};
use satake_core::par::Exec;

fn bfs(c: &mut Criterion) {
    let mut group = c.benchmark_group("bfs_layers");
    group.sample_size(10);
    for (p, radius) in [(2, 2), (3, 2)] {
        let starts = standard_chamber(Ring::Ramified, p, 3);
        for (name, exec) in [("parallel", Exec::Parallel), ("sequential", Exec::Sequential)] {
            group.bench_with_input(BenchmarkId::new(name, format!("p{p}_r{radius}")), &starts, |b, s| {
                b.iter(|| bfs_layers(s, radius, exec).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, bfs);
criterion_main!(benches);
