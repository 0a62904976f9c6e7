use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use trackscore::experiments::{warp_experiment, WarpConfig};
use trackscore::path::signatures;
use trackscore::stochastic::{brownian_with, stream_rng, SimConfig, SpiralModel};
use trackscore::{EmpiricalMeasure, Exec, PiecewiseLinearPath, ScoringRule, Side};

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn brownian_batch(n: usize) -> Vec<PiecewiseLinearPath> {
    let cfg = SimConfig::default();
    (0..n)
        .map(|k| brownian_with(&cfg, &mut stream_rng(7, k as u64)).unwrap())
        .collect()
}

fn batch_signatures(c: &mut Criterion) {
    let paths = brownian_batch(512);
    let mut g = c.benchmark_group("batch_signatures_512x100_depth4");
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| signatures(black_box(&paths), 4, exec))
        });
    }
    g.finish();
}

fn entropy(c: &mut Criterion) {
    let mu = EmpiricalMeasure::new(brownian_batch(1024)).unwrap();
    let mut g = c.benchmark_group("entropy_1024_paths_depth4");
    g.sample_size(20);
    for (name, exec) in MODES {
        let rule = ScoringRule::new(4, Side::Right).with_exec(exec);
        g.bench_function(BenchmarkId::from_parameter(name), |b| b.iter(|| rule.entropy(black_box(&mu)).unwrap()));
    }
    g.finish();
}

fn mutual_information(c: &mut Criterion) {
    let model = SpiralModel { rho: 0.5, cfg: SimConfig::default() };
    let mut g = c.benchmark_group("mi_spiral_8x20_depth3");
    g.sample_size(10);
    for (name, exec) in MODES {
        let rule = ScoringRule::new(3, Side::Right).with_exec(exec);
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| rule.mutual_information(&model, 8, 20, 1).unwrap())
        });
    }
    g.finish();
}

fn warp_sweep(c: &mut Criterion) {
    let cfg = WarpConfig { n_p: 8, n_paths: 4, ..Default::default() };
    let mut g = c.benchmark_group("warp_sweep_8p_4paths");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| b.iter(|| warp_experiment(&cfg, exec).unwrap()));
    }
    g.finish();
}

criterion_group!(benches, batch_signatures, entropy, mutual_information, warp_sweep);
criterion_main!(benches);
