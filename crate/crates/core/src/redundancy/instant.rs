//! Conditional instantaneous redundancy of the PC coding distribution and its
//! four-term rearrangement.
//!
//! After a prefix of length `i` with `K` distinct symbols and counts `N^j`,
//! with `s = i + (K + 1)/2`, the flush-free coding distribution is
//! `Q(j) = (N^j - 1/2) / s` for a seen `j` and
//! `Q(j) = (K + 1/2) / s * 2^{-L(j)}` for an unseen `j`, `L` the Elias cost.
//! Then `sum_j p_j log2(p_j / Q(j)) = A + B + C + D` with
//!
//! * `A = sum_j p_j log2(p_j s)`
//! * `B = sum_{seen} p_j log2(1 / (N^j - 1/2))`
//! * `C = sum_{unseen} p_j (1 + log2(j / (K + 1/2)))`
//! * `D = sum_{unseen} p_j (L(j) - 1 - log2 j)`, i.e. `2 log2(log2 j + 1)` for the idealized cost.

use std::collections::HashMap;

use serde::Serialize;

use crate::envelope::{sample, SourceSpec};
use crate::error::{Error, Result};
use crate::numeric::NeumaierSum;
use crate::occupancy::expected_k;
use crate::par::{map_trials, trial_seed};
use crate::pc::{elias_cost, EliasCost};

/// Constant of the distribution-free bound, in bits.
pub const KAPPA: f64 = 19.0;

/// Excess of the Elias cost over `1 + log2 j`.
fn elias_excess(j: f64, cost: EliasCost) -> f64 {
    elias_cost(j as u64, cost) - 1.0 - j.log2()
}

/// Prefix-independent sums over the whole support.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourceMoments {
    /// `sum p_j log2 p_j`
    pub neg_entropy: f64,
    /// `sum p_j log2 j`
    pub log_index: f64,
    /// `sum p_j (L(j) - 1 - log2 j)`
    pub elias_excess: f64,
    pub cost: EliasCost,
}

impl SourceMoments {
    pub fn new(spec: &SourceSpec, cost: EliasCost) -> Result<Self> {
        Ok(SourceMoments {
            neg_entropy: spec.sum_over_support(|_, p| p * p.log2())?,
            log_index: spec.sum_over_support(|j, p| p * j.log2())?,
            elias_excess: spec.sum_over_support(|j, p| p * elias_excess(j, cost))?,
            cost,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Decomposition {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Decomposition {
    pub fn total(&self) -> f64 {
        self.a + self.b + self.c + self.d
    }
}

fn counts_of(prefix: &[u64]) -> Result<HashMap<u64, u64>> {
    let mut counts = HashMap::new();
    for &x in prefix {
        if x == 0 {
            return Err(Error::InvalidSymbol(0));
        }
        *counts.entry(x).or_insert(0u64) += 1;
    }
    Ok(counts)
}

fn decompose(spec: &SourceSpec, m: &SourceMoments, i: u64, counts: &HashMap<u64, u64>) -> Decomposition {
    let k = counts.len() as f64;
    let s = i as f64 + (k + 1.0) / 2.0;
    let mut b = NeumaierSum::new();
    let mut seen_mass = NeumaierSum::new();
    let mut seen_log_index = NeumaierSum::new();
    let mut seen_excess = NeumaierSum::new();
    for (&j, &n) in counts {
        let p = spec.pmf(j);
        let jf = j as f64;
        b.add(-p * (n as f64 - 0.5).log2());
        seen_mass.add(p);
        seen_log_index.add(p * jf.log2());
        seen_excess.add(p * elias_excess(jf, m.cost));
    }
    let unseen_mass = (1.0 - seen_mass.value()).max(0.0);
    Decomposition {
        a: m.neg_entropy + s.log2(),
        b: b.value(),
        c: unseen_mass * (1.0 - (k + 0.5).log2()) + (m.log_index - seen_log_index.value()),
        d: m.elias_excess - seen_excess.value(),
    }
}

/// The rearranged conditional redundancy after `prefix`.
pub fn instantaneous_decomposition(spec: &SourceSpec, prefix: &[u64], cost: EliasCost) -> Result<Decomposition> {
    let moments = SourceMoments::new(spec, cost)?;
    Ok(decompose(spec, &moments, prefix.len() as u64, &counts_of(prefix)?))
}

/// `sum_j p_j log2(p_j / Q(j))` evaluated term by term from `Q`.
pub fn direct_instantaneous_redundancy(spec: &SourceSpec, prefix: &[u64], cost: EliasCost) -> Result<f64> {
    let counts = counts_of(prefix)?;
    let k = counts.len() as f64;
    let s = prefix.len() as f64 + (k + 1.0) / 2.0;
    let escape = (k + 0.5) / s;
    let unseen = |j: f64, p: f64| p * (p.log2() - escape.log2() + elias_cost(j as u64, cost));
    let mut acc = NeumaierSum::new();
    acc.add(spec.sum_over_support(unseen)?);
    for (&j, &n) in &counts {
        let p = spec.pmf(j);
        if p > 0.0 {
            acc.add(-unseen(j as f64, p));
            acc.add(p * (p / ((n as f64 - 0.5) / s)).log2());
        }
    }
    Ok(acc.value())
}

/// Outcome of the distribution-free bound check at one `i`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DistFreeReport {
    pub i: u64,
    pub trials: u64,
    /// Monte Carlo mean of the conditional redundancy
    pub lhs: f64,
    pub lhs_std_error: f64,
    pub rhs: f64,
    /// `rhs - lhs`
    pub slack: f64,
}

/// Checks `E[log2(P(X_{i+1}) / Q(X_{i+1} | X_{1:i}))] <= kappa E K_i / i +
/// sum_j p_j (1 - p_j)^i (log2(j / E K_i) + 2 log2(log2 j + 1))` with the
/// idealized Elias cost, allowing a 3 sigma Monte Carlo margin.
pub fn check_distfree_bound(spec: &SourceSpec, i: u64, trials: u64, seed: u64) -> Result<DistFreeReport> {
    if i == 0 || trials == 0 {
        return Err(Error::Domain("distribution-free bound needs i >= 1 and trials >= 1".into()));
    }
    let moments = SourceMoments::new(spec, EliasCost::Idealized)?;
    let per_trial: Vec<f64> = map_trials(trials, |t| {
        let xs = sample(spec, i as usize, trial_seed(seed, t));
        let counts = counts_of(&xs).expect("sampled symbols are positive");
        decompose(spec, &moments, i, &counts).total()
    });
    let tf = trials as f64;
    let lhs = per_trial.iter().copied().collect::<NeumaierSum>().value() / tf;
    let var = per_trial.iter().map(|x| (x - lhs) * (x - lhs)).collect::<NeumaierSum>().value() / (tf - 1.0).max(1.0);
    let se = (var / tf).sqrt();
    let ek = expected_k(spec, i);
    let fi = i as f64;
    let unseen = spec.sum_over_support(|j, p| {
        p * (fi * (-p).ln_1p()).exp() * ((j / ek).log2() + 2.0 * (j.log2() + 1.0).log2())
    })?;
    let rhs = KAPPA * ek / fi + unseen;
    if lhs - 3.0 * se > rhs {
        return Err(Error::BoundViolation { bound: format!("distribution-free, i={i}"), lhs, rhs });
    }
    Ok(DistFreeReport { i, trials, lhs, lhs_std_error: se, rhs, slack: rhs - lhs })
}
