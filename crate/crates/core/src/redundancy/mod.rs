//! Redundancy quantities of envelope classes and measurements of the PC code
//! against them.

mod empirical;
mod instant;

pub use empirical::{empirical_redundancy, empirical_trials, EmpiricalRedundancy, TrialRecord};
pub use instant::{
    check_distfree_bound, direct_instantaneous_redundancy, instantaneous_decomposition, Decomposition,
    DistFreeReport, SourceMoments, KAPPA,
};

use serde::Serialize;

use crate::envelope::{EnvelopeDistribution, SourceSpec};
use crate::error::{Error, Result};
use crate::numeric::{NeumaierSum, LOG2_E};
use crate::occupancy::expected_k;

/// `R_f(n) = sum_{j : f_j >= 1/n} (1/2) log2(n f_j)`, which equals
/// `log2(e) int_1^n nu_f(1/t) / (2t) dt`.
pub fn r_f(dist: &EnvelopeDistribution, n: u64) -> f64 {
    half_log_sum(dist.source(), n)
}

/// The same sum for an arbitrary source.
pub fn half_log_sum(spec: &SourceSpec, n: u64) -> f64 {
    if n <= 1 {
        return 0.0;
    }
    let nf = n as f64;
    let x = 1.0 / nf;
    let mut acc = NeumaierSum::new();
    for &p in spec.prefix() {
        if p >= x {
            acc.add(0.5 * (nf * p).log2());
        }
    }
    if let Some(model) = spec.tail() {
        let l = spec.prefix_len();
        let last = model.last_at_least(x).max(l);
        for j in l + 1..=last {
            acc.add(0.5 * (nf * model.value_at(j)).log2());
        }
    }
    acc.value().max(0.0)
}

/// Redundancy bound terms at one sample size, as written to the bounds CSV.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RedundancyBoundReport {
    pub env: String,
    pub n: u64,
    pub r_f: f64,
    pub upper_integral: f64,
    /// `log2(e) nu_f(1/n)`
    pub upper_count: f64,
    /// `log2(e) n nu_{1,f}[0, 1/n]`
    pub upper_mass: f64,
    /// `ell_f log2 n`, without the unknown constant
    pub head_term: f64,
    /// `R_f(m) - 5 nu_f(1/m) - 1` with `m = floor(n - n^{2/3})`
    pub lower_integral: Option<f64>,
    /// `E_f K_n`, before subtracting the unknown constant `c_f`
    #[serde(rename = "lower_EfKn")]
    pub lower_efkn: Option<f64>,
}

impl RedundancyBoundReport {
    /// Larger of the two lower-bound candidates, for orientation only.
    pub fn indicative_lower(&self) -> Option<f64> {
        Some(self.lower_integral?.max(self.lower_efkn?))
    }
}

/// Upper-bound terms; the lower fields are left empty.
pub fn theorem1_upper(dist: &EnvelopeDistribution, n: u64) -> Result<RedundancyBoundReport> {
    if n == 0 {
        return Err(Error::Domain("bounds need n >= 1".into()));
    }
    let x = 1.0 / n as f64;
    let r = r_f(dist, n);
    Ok(RedundancyBoundReport {
        env: dist.envelope().to_string(),
        n,
        r_f: r,
        upper_integral: r,
        upper_count: LOG2_E * dist.counting_function(x)? as f64,
        upper_mass: LOG2_E * n as f64 * dist.nu1_mass(x)?,
        head_term: dist.ell() as f64 * (n as f64).log2(),
        lower_integral: None,
        lower_efkn: None,
    })
}

/// Lower-bound candidates `(integral, E_f K_n)`; needs `n >= 8`.
pub fn theorem1_lower(dist: &EnvelopeDistribution, n: u64) -> Result<(f64, f64)> {
    if n < 8 {
        return Err(Error::Domain(format!("lower bound needs n >= 8, got {n}")));
    }
    let m = lower_split(n);
    let integral = r_f(dist, m) - 5.0 * dist.counting_function(1.0 / m as f64)? as f64 - 1.0;
    Ok((integral, expected_k(dist.source(), n)))
}

/// `m = floor(n - n^{2/3})`, at least 1.
pub fn lower_split(n: u64) -> u64 {
    let nf = n as f64;
    ((nf - nf.powf(2.0 / 3.0)).floor() as u64).max(1)
}

/// Both halves of the bound report; the lower part is empty below `n = 8`.
pub fn bounds_report(dist: &EnvelopeDistribution, n: u64) -> Result<RedundancyBoundReport> {
    let mut report = theorem1_upper(dist, n)?;
    if n >= 8 {
        let (integral, efkn) = theorem1_lower(dist, n)?;
        report.lower_integral = Some(integral);
        report.lower_efkn = Some(efkn);
    }
    Ok(report)
}
