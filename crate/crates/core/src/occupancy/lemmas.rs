//! Numeric checks of the finite-n occupancy inequalities used by the codec
//! analysis, reported row by row.

use serde::Serialize;
use statrs::distribution::{DiscreteCDF, Poisson};

use super::{distinct, expected_k, expected_k1, expected_missing_mass};
use crate::envelope::{sample, SourceSpec};
use crate::error::{Error, Result};
use crate::numeric::{ln_binomial, NeumaierSum};
use crate::par::{map_trials, trial_seed};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LemmaStatus {
    #[serde(rename = "OK")]
    Ok,
    #[serde(rename = "VIOLATION")]
    Violation,
}

/// One checked inequality `lhs <= rhs`; `slack = rhs - lhs`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LemmaRow {
    pub lemma: String,
    pub n: u64,
    pub param: String,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub status: LemmaStatus,
}

/// Relative rounding allowance for inequalities between exact sums.
const ROUNDING: f64 = 1e-12;

impl LemmaRow {
    fn new(lemma: &str, n: u64, param: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        let slack = rhs - lhs;
        let ok = slack >= -ROUNDING * lhs.abs().max(rhs.abs()).max(1e-300);
        LemmaRow {
            lemma: lemma.to_string(),
            n,
            param: param.into(),
            lhs,
            rhs,
            slack,
            status: if ok { LemmaStatus::Ok } else { LemmaStatus::Violation },
        }
    }

    pub fn holds(&self) -> bool {
        self.status == LemmaStatus::Ok
    }

    fn into_result(self) -> Result<Self> {
        if self.holds() {
            Ok(self)
        } else {
            Err(Error::LemmaViolation { lemma: self.lemma, lhs: self.lhs, rhs: self.rhs })
        }
    }
}

/// Monte Carlo mean of `1/K_n` and its standard error over `trials` samples.
pub fn mean_inverse_distinct(spec: &SourceSpec, n: u64, trials: u64, seed: u64) -> (f64, f64) {
    let inv: Vec<f64> = map_trials(trials, |t| {
        let k = distinct(&sample(spec, n as usize, trial_seed(seed, t)));
        1.0 / k as f64
    });
    let t = trials as f64;
    let mean = inv.iter().copied().collect::<NeumaierSum>().value() / t;
    let var = inv.iter().map(|x| (x - mean) * (x - mean)).collect::<NeumaierSum>().value() / (t - 1.0).max(1.0);
    (mean, (var / t).sqrt())
}

/// The missing-mass / singleton / counting-function inequalities at sample
/// size `n`, with `E[1/K_n]` estimated from `trials` samples at a 3 sigma margin.
pub fn evaluate_occupancy_lemma(spec: &SourceSpec, n: u64, trials: u64, seed: u64) -> Result<Vec<LemmaRow>> {
    if n == 0 {
        return Err(Error::Domain("occupancy lemma needs n >= 1".into()));
    }
    let label = spec.label().to_string();
    let nf = n as f64;
    let ek = expected_k(spec, n);
    let ek1 = expected_k1(spec, n);
    let em = expected_missing_mass(spec, n);
    let nu = spec.counting_function(1.0 / nf)? as f64;
    let nu1 = spec.nu1_open(1.0 / nf)?;
    let e = std::f64::consts::E;
    let mut rows = vec![
        LemmaRow::new("missing_mass_le_singletons", n, &label, em, ek1 / nf),
        LemmaRow::new("singletons_le_distinct", n, &label, ek1 / nf, ek / nf),
        LemmaRow::new("distinct_lower", n, &label, (e - 1.0) / e * nu, ek),
        LemmaRow::new("distinct_upper", n, &label, ek, nu + nf * nu1),
    ];
    if trials > 0 {
        let (inv, se) = mean_inverse_distinct(spec, n, trials, seed);
        let margin = 3.0 * se * ek;
        rows.push(LemmaRow::new("inverse_distinct_lower", n, &label, 1.0, ek * inv + margin));
        rows.push(LemmaRow::new("inverse_distinct_upper", n, &label, ek * inv - margin, 3.0));
    }
    Ok(rows)
}

pub fn check_occupancy_lemma(spec: &SourceSpec, n: u64, trials: u64, seed: u64) -> Result<Vec<LemmaRow>> {
    evaluate_occupancy_lemma(spec, n, trials, seed)?.into_iter().map(LemmaRow::into_result).collect()
}

/// `E[1/(N - 1/2) | N > 0] <= (1/(np)) (1 + 9/(np))` for `N ~ Bin(n, p)`, by
/// exact summation over `k = 1..=n`.
pub fn evaluate_binomial_inverse(n: u64, p: f64) -> Result<LemmaRow> {
    if n == 0 || !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!("binomial lemma needs n >= 1 and 0 < p < 1, got n={n}, p={p}")));
    }
    let (lp, lq) = (p.ln(), (-p).ln_1p());
    let nf = n as f64;
    let mut acc = NeumaierSum::new();
    for k in 1..=n {
        let ln_pmf = ln_binomial(n, k) + k as f64 * lp + (n - k) as f64 * lq;
        acc.add(ln_pmf.exp() / (k as f64 - 0.5));
    }
    let positive = -(nf * lq).exp_m1();
    let lhs = acc.value() / positive;
    let np = nf * p;
    Ok(LemmaRow::new("binomial_inverse", n, format!("p={p}"), lhs, (1.0 + 9.0 / np) / np))
}

pub fn check_binomial_inverse_lemma(n: u64, p: f64) -> Result<f64> {
    Ok(evaluate_binomial_inverse(n, p)?.into_result()?.slack)
}

/// `P(N >= lambda + t) <= exp(-t^2 / (2 (lambda + t/3)))` for `N ~ Poisson(lambda)`.
pub fn evaluate_poisson_tail(lambda: f64, t: f64) -> Result<LemmaRow> {
    if !(lambda > 0.0 && t >= 0.0) {
        return Err(Error::Domain(format!("poisson tail needs lambda > 0, t >= 0, got {lambda}, {t}")));
    }
    let m = (lambda + t).ceil();
    let pois = Poisson::new(lambda).map_err(|e| Error::Domain(e.to_string()))?;
    let lhs = if m <= 0.0 { 1.0 } else { pois.sf(m as u64 - 1) };
    let rhs = (-t * t / (2.0 * (lambda + t / 3.0))).exp();
    Ok(LemmaRow::new("poisson_tail", 0, format!("lambda={lambda};t={t}"), lhs, rhs))
}
