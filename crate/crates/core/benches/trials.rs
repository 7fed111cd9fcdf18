use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use pcc::envelope::{sample, Envelope};
use pcc::occupancy::distinct;
use pcc::par::{map_trials, map_trials_sequential, trial_seed};
use pcc::pc::{encode, ideal_codelength, EliasCost};

/// One Monte Carlo trial: draw from the envelope distribution, encode, and
/// report code length, ideal length and distinct count.
fn trial(env: &Envelope, n: usize, t: u64) -> (u64, f64, u64) {
    let xs = sample(env.distribution().source(), n, trial_seed(7, t));
    let bits = encode(&xs).unwrap().bit_length();
    let ideal = ideal_codelength(&xs, EliasCost::Realized).unwrap().total();
    (bits, ideal, distinct(&xs))
}

fn monte_carlo(c: &mut Criterion) {
    let envs = [Envelope::geometric(2.0, 0.5).unwrap(), Envelope::power_law(1.0, 0.5).unwrap()];
    let mut group = c.benchmark_group("monte_carlo");
    group.sample_size(10);
    for env in &envs {
        for &n in &[1_000usize, 10_000] {
            let id = format!("{env} n={n}");
            group.bench_with_input(BenchmarkId::new("sequential", &id), &n, |b, &n| {
                b.iter(|| map_trials_sequential(64, |t| trial(env, n, t)))
            });
            group.bench_with_input(BenchmarkId::new("parallel", &id), &n, |b, &n| {
                b.iter(|| map_trials(64, |t| trial(env, n, t)))
            });
        }
    }
    group.finish();
}

criterion_group!(benches, monte_carlo);
criterion_main!(benches);
