use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use sinailab::entropy::wedge_table;
use sinailab::exec::with_workers;
use sinailab::measures::birkhoff_sample;
use sinailab::sweep::{run_sweep, MeasureSpec, SweepConfig};
use sinailab::systems::make_standard_skew;

fn wedge(c: &mut Criterion) {
    let f = make_standard_skew(0.5, 2).unwrap();
    let m = birkhoff_sample(&f, 1, 1000, 16_384).unwrap();
    let mut g = c.benchmark_group("wedge_table");
    g.sample_size(10);
    for workers in [1, 0] {
        let label = if workers == 1 { "sequential" } else { "parallel" };
        g.bench_with_input(BenchmarkId::new(label, m.len()), &workers, |b, &w| {
            b.iter(|| with_workers(w, || wedge_table(&f, &m, 10).unwrap()))
        });
    }
    g.finish();
}

fn sweep(c: &mut Criterion) {
    let mut cfg = SweepConfig::new("mp", (0..8).map(|k| k as f64 / 10.0).collect());
    cfg.steps = 50_000;
    cfg.spectrum_burn_in = 1000;
    cfg.measure = MeasureSpec::Birkhoff { burn_in: 1000, length: 10_000 };
    let mut g = c.benchmark_group("mp_sweep");
    g.sample_size(10);
    for workers in [1, 0] {
        let label = if workers == 1 { "sequential" } else { "parallel" };
        cfg.workers = workers;
        g.bench_with_input(BenchmarkId::new(label, cfg.grid.len()), &cfg, |b, cfg| {
            b.iter(|| run_sweep(cfg).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, wedge, sweep);
criterion_main!(benches);
