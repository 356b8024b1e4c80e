use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use isicode::channel::{simulate_point, Codebook};
use isicode::minimal_basis::scan_code_set;
use isicode::multilevel::{full_codebook, LayerSpec};
use isicode::rank_codes::{verify_rank_distance, CodeParams, CodeSet, VerifyOptions};
use isicode::trellis::{build_generator, verify_trellis_rank};
use isicode::{Execution, FieldContext, MapperConfig};

const MODES: [(&str, Execution); 2] = [("parallel", Execution::Parallel), ("sequential", Execution::Sequential)];

fn rank_scan(c: &mut Criterion) {
    let ctx = FieldContext::with_default_poly(10).unwrap();
    let code = CodeSet::new(&ctx, CodeParams::isi(2, 1, 10, 2).unwrap()).unwrap();
    let mut group = c.benchmark_group("rank_scan_2^16");
    for (name, exec) in MODES {
        let opts = VerifyOptions { exec, ..Default::default() };
        group.bench_function(name, |b| b.iter(|| verify_rank_distance(black_box(&code), 2, &opts).unwrap()));
    }
    group.finish();
}

fn basis_scan(c: &mut Criterion) {
    let ctx = FieldContext::with_default_poly(8).unwrap();
    let code = CodeSet::new(&ctx, CodeParams::isi(2, 1, 8, 2).unwrap()).unwrap();
    let mut group = c.benchmark_group("basis_scan_2^14");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(name, |b| b.iter(|| scan_code_set(black_box(&code), 1 << 20, exec).unwrap()));
    }
    group.finish();
}

fn trellis_scan(c: &mut Criterion) {
    let gen = build_generator(2, 1, 1, 22).unwrap();
    let mut group = c.benchmark_group("trellis_scan_2^18");
    for (name, exec) in MODES {
        group.bench_function(name, |b| b.iter(|| verify_trellis_rank(black_box(&gen), 4, 1 << 20, exec).unwrap()));
    }
    group.finish();
}

fn monte_carlo(c: &mut Criterion) {
    let ctx = FieldContext::new(5, 0x37).unwrap();
    let layer = LayerSpec::from_code_set(&CodeSet::new(&ctx, CodeParams::isi(2, 1, 5, 1).unwrap()).unwrap(), 64).unwrap();
    let qam = MapperConfig::qam(2).unwrap();
    let words = full_codebook(&[layer.clone(), layer], &qam, 1 << 12, Execution::Sequential).unwrap();
    let cb = Codebook::from_multilevel(&words, 1).unwrap().normalized();
    let mut group = c.benchmark_group("monte_carlo_20k_trials");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(name, |b| {
            b.iter(|| simulate_point(black_box(&cb), 1, 1, 0.05, 20_000, 5_000, None, 7, 0, exec))
        });
    }
    group.finish();
}

criterion_group!(benches, rank_scan, basis_scan, trellis_scan, monte_carlo);
criterion_main!(benches);
