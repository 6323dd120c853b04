use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use ldpgof::channel::{privatize, ChannelSpec};
use ldpgof::dyadic::{project, PiecewiseConstantDensity};
use ldpgof::gof::{draw_sample, null_coefficients, simulate_statistics, statistic};
use ldpgof::harness::Executor;
use ldpgof::Seed;

fn privatize_bench(c: &mut Criterion) {
    let exec = Executor::new(1).unwrap();
    let xs = draw_sample(&PiecewiseConstantDensity::uniform(1).sampler(), 1000, Seed(1));
    let mut group = c.benchmark_group("privatize");
    for l in [8usize, 64] {
        let spec = ChannelSpec::single_level(1.0, l).unwrap();
        group.throughput(Throughput::Elements((xs.len() * l) as u64));
        group.bench_with_input(BenchmarkId::new("single", l), &spec, |b, spec| {
            b.iter(|| exec.install(|| privatize(black_box(&xs), spec, Seed(2)).unwrap()))
        });
    }
    let spec = ChannelSpec::multi_level(1.0, 30).unwrap();
    group.throughput(Throughput::Elements((xs.len() * spec.dimension()) as u64));
    group.bench_function("multi n=30", |b| b.iter(|| exec.install(|| privatize(black_box(&xs), &spec, Seed(2)).unwrap())));
    group.finish();
}

fn statistic_bench(c: &mut Criterion) {
    let f0 = PiecewiseConstantDensity::uniform(1);
    let mut group = c.benchmark_group("statistic");
    for (n, l) in [(1000usize, 8usize), (4000, 32)] {
        let spec = ChannelSpec::single_level(1.0, l).unwrap();
        let xs = draw_sample(&f0.sampler(), n, Seed(3));
        let z = privatize(&xs, &spec, Seed(4)).unwrap();
        let alpha0 = project(&f0, l).unwrap();
        group.throughput(Throughput::Elements((n * l) as u64));
        group.bench_function(format!("n={n} L={l}"), |b| b.iter(|| statistic(black_box(&z), &alpha0).unwrap()));
    }
    group.finish();
}

fn simulate_bench(c: &mut Criterion) {
    let f0 = PiecewiseConstantDensity::uniform(1);
    let sampler = f0.sampler();
    let mut group = c.benchmark_group("simulate");
    for (label, spec) in [
        ("single L=8", ChannelSpec::single_level(1.0, 8).unwrap()),
        ("multi J<=7", ChannelSpec::multi_level_truncated(1.0, 200, 7).unwrap()),
    ] {
        let alpha0 = null_coefficients(&f0, &spec).unwrap();
        group.bench_function(format!("n=200 {label}"), |b| {
            let mut r = 0u64;
            b.iter(|| {
                r += 1;
                simulate_statistics(&sampler, &alpha0, &spec, 200, Seed(r)).unwrap()
            })
        });
    }
    group.finish();
}

criterion_group!(benches, privatize_bench, statistic_bench, simulate_bench);
criterion_main!(benches);
