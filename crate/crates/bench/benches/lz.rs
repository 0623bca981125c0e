use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tcclab_core::lz;

fn random(n: usize, alphabet: u32, seed: u64) -> Vec<u32> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.gen_range(0..alphabet)).collect()
}

fn phrase_count(c: &mut Criterion) {
    let mut g = c.benchmark_group("phrase_count");
    for &n in &[1_000usize, 100_000, 1_000_000] {
        let s = random(n, 2, 7);
        g.throughput(Throughput::Elements(n as u64));
        g.bench_with_input(BenchmarkId::new("automaton", n), &s, |b, s| b.iter(|| lz::phrase_count(s).unwrap()));
        if n <= 100_000 {
            g.bench_with_input(BenchmarkId::new("scan", n), &s, |b, s| b.iter(|| lz::phrase_count_ks(s).unwrap()));
        }
    }
    let wide = random(100_000, 1_000, 11);
    g.bench_function("automaton/alphabet-1000", |b| b.iter(|| lz::phrase_count(&wide).unwrap()));
    g.finish();
}

criterion_group!(benches, phrase_count);
criterion_main!(benches);
