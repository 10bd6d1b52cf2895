use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use tonal_coherence::key_estimation::{Mode, TonalCenter};
use tonal_coherence::par::{self, Execution};
use tonal_coherence::pitch_space::{LofDistribution, LofIndex};
use tonal_coherence::tdm::{self, sample_distribution, TdmParams, FIFTH_HEAVY_WEIGHTS, UNIFORM_WEIGHTS};

fn batch(n: usize) -> Vec<LofDistribution> {
    let center = TonalCenter::annotated(LofIndex::C, Mode::Major);
    (0..n)
        .map(|i| {
            let lambda = 0.5 + (i % 8) as f64 * 0.5;
            let w = if i % 2 == 0 { FIFTH_HEAVY_WEIGHTS } else { UNIFORM_WEIGHTS };
            sample_distribution(&TdmParams::new(lambda, w).unwrap(), &center, 5000, i as u64).unwrap()
        })
        .collect()
}

fn batch_fit(c: &mut Criterion) {
    let center = TonalCenter::annotated(LofIndex::C, Mode::Major);
    let pieces = batch(32);
    let mut group = c.benchmark_group("batch_fit");
    group.sample_size(10);
    for (name, exec) in [
        ("sequential", Execution::Sequential),
        ("parallel", Execution::Parallel { jobs: 0 }),
    ] {
        group.bench_with_input(BenchmarkId::new(name, pieces.len()), &pieces, |b, pieces| {
            b.iter(|| par::map(pieces, exec, |d| tdm::fit(d, &center).unwrap().log_likelihood))
        });
    }
    group.finish();
}

criterion_group!(benches, batch_fit);
criterion_main!(benches);
