use serde::Serialize;

use crate::envelope::{sample, SourceSpec};
use crate::error::Result;
use crate::numeric::NeumaierSum;
use crate::par::{map_trials, trial_seed};
use crate::pc::{encode, ideal_codelength, EliasCost};

/// One simulated message, as written to the empirical CSV.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRecord {
    pub env: String,
    pub source: String,
    pub n: u64,
    pub trial: u64,
    /// bits of the actual container payload
    pub code_bits: u64,
    /// flush-free code length
    pub ideal_bits: f64,
    /// `-log2 P^n(x)`
    pub neg_log_p: f64,
    /// `ideal_bits - neg_log_p`
    pub redundancy_bits: f64,
}

/// Aggregate over the trials at one sample size.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmpiricalRedundancy {
    pub n: u64,
    pub trials: u64,
    pub seed: u64,
    pub mean_code_bits: f64,
    pub mean_ideal_bits: f64,
    pub mean_neg_log_p: f64,
    pub redundancy_bits: f64,
    pub std_error: f64,
}

/// Per-trial records for every `n` in `n_grid`; trial `t` draws its message
/// with seed `seed ^ t`.
pub fn empirical_trials(
    spec: &SourceSpec,
    env: &str,
    n_grid: &[u64],
    trials: u64,
    seed: u64,
    cost: EliasCost,
) -> Result<Vec<TrialRecord>> {
    let mut out = Vec::with_capacity(n_grid.len() * trials as usize);
    for &n in n_grid {
        let rows: Vec<Result<TrialRecord>> = map_trials(trials, |t| {
            let xs = sample(spec, n as usize, trial_seed(seed, t));
            let ideal = ideal_codelength(&xs, cost)?.total();
            let code_bits = encode(&xs)?.bit_length();
            let neg_log_p: NeumaierSum = xs.iter().map(|&x| -spec.pmf(x).log2()).collect();
            let neg_log_p = neg_log_p.value();
            Ok(TrialRecord {
                env: env.to_string(),
                source: spec.label().to_string(),
                n,
                trial: t,
                code_bits,
                ideal_bits: ideal,
                neg_log_p,
                redundancy_bits: ideal - neg_log_p,
            })
        });
        for r in rows {
            out.push(r?);
        }
    }
    Ok(out)
}

fn mean_and_se(xs: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let t = xs.clone().count() as f64;
    let mean = xs.clone().collect::<NeumaierSum>().value() / t;
    let var = xs.map(|x| (x - mean) * (x - mean)).collect::<NeumaierSum>().value() / (t - 1.0).max(1.0);
    (mean, (var / t).sqrt())
}

/// Aggregates [`empirical_trials`] per sample size.
pub fn empirical_redundancy(
    spec: &SourceSpec,
    n_grid: &[u64],
    trials: u64,
    seed: u64,
    cost: EliasCost,
) -> Result<Vec<EmpiricalRedundancy>> {
    let records = empirical_trials(spec, spec.label(), n_grid, trials, seed, cost)?;
    Ok(summarize(&records, seed))
}

/// Groups consecutive records by `n`, in order.
pub fn summarize(records: &[TrialRecord], seed: u64) -> Vec<EmpiricalRedundancy> {
    records
        .chunk_by(|a, b| a.n == b.n)
        .map(|group| {
            let (code, _) = mean_and_se(group.iter().map(|r| r.code_bits as f64));
            let (ideal, _) = mean_and_se(group.iter().map(|r| r.ideal_bits));
            let (nlp, _) = mean_and_se(group.iter().map(|r| r.neg_log_p));
            let (red, se) = mean_and_se(group.iter().map(|r| r.redundancy_bits));
            EmpiricalRedundancy {
                n: group[0].n,
                trials: group.len() as u64,
                seed,
                mean_code_bits: code,
                mean_ideal_bits: ideal,
                mean_neg_log_p: nlp,
                redundancy_bits: red,
                std_error: se,
            }
        })
        .collect()
}
