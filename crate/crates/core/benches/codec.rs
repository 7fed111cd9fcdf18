use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};

use pcc::envelope::{sample, Envelope};
use pcc::pc::{decode, encode};

fn codec(c: &mut Criterion) {
    let env = Envelope::power_law(1.0, 0.5).unwrap();
    let mut group = c.benchmark_group("codec");
    group.sample_size(10);
    for &n in &[10_000usize, 100_000, 1_000_000] {
        let xs = sample(env.distribution().source(), n, 3);
        let packed = encode(&xs).unwrap();
        group.throughput(Throughput::Elements(n as u64));
        group.bench_with_input(BenchmarkId::new("encode", n), &xs, |b, xs| b.iter(|| encode(xs).unwrap()));
        group.bench_with_input(BenchmarkId::new("decode", n), &packed, |b, p| b.iter(|| decode(p).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, codec);
criterion_main!(benches);
