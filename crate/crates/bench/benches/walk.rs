use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use fracwos_core::{make_constants, CaseId, FracOrder, WalkConfig, Walker};

fn single_path(c: &mut Criterion) {
    let mut group = c.benchmark_group("run_path");
    for (id, x0) in [(CaseId::Disk, [0.5, 0.3]), (CaseId::DiskDecay, [0.5, 0.3]), (CaseId::LShape, [-0.5, 0.3])] {
        for a in [0.4, 1.6] {
            let case = id.build(FracOrder::new(a).unwrap(), None).unwrap();
            let problem = case.problem();
            let cfg = WalkConfig::default();
            let k = make_constants(2, case.alpha, cfg.zeta_quad_points).unwrap();
            let walker = Walker::new(&problem, &cfg, &k).unwrap();
            let mut idx = 0u64;
            group.bench_with_input(BenchmarkId::new(id.name(), a), &x0, |b, x0| {
                b.iter(|| {
                    idx += 1;
                    walker.run_path(x0, idx).unwrap()
                })
            });
        }
    }
    group.finish();
}

fn estimate(c: &mut Criterion) {
    let case = CaseId::Disk.build(FracOrder::new(0.8).unwrap(), None).unwrap();
    let problem = case.problem();
    let cfg = WalkConfig::new(1e-6, 10_000, 1);
    let k = make_constants(2, case.alpha, 64).unwrap();
    let mut group = c.benchmark_group("estimate_point");
    group.sample_size(10);
    group.bench_function("disk/10k_paths", |b| {
        b.iter(|| fracwos_core::estimate_point(&problem, &cfg, &k, &[0.5, 0.3]).unwrap())
    });
    group.finish();
}

criterion_group!(benches, single_path, estimate);
criterion_main!(benches);
