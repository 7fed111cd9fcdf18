//! Envelope functions, their envelope distributions, Karlin's counting
//! quantities and exact sampling from sources dominated by an envelope.
//!
//! An envelope `f` is a non-increasing map from the positive integers to
//! `(0, 1]` with `1 < sum f(j) < inf`. The envelope distribution piles all the
//! mass that cannot fit under `f` onto the symbol just before `ell_f`, the first
//! index from which the remaining envelope mass is at most one.

mod sampler;
mod source;
mod tail;

use std::fmt;
use std::str::FromStr;

pub use sampler::{sample, Sampler};
pub use source::{SourceSpec, DIRECT_SUM_CAP};
pub use tail::TailModel;

use crate::error::{Error, Result};
use crate::numeric::compensated_sum;

/// Parametric family of an envelope, with the parameter names of the CLI grammar.
#[derive(Debug, Clone, PartialEq)]
pub enum EnvelopeFamily {
    /// `f(j) = c q^j`
    Geometric { c: f64, q: f64 },
    /// `f(j) = min(1, c j^{-1/alpha})`
    PowerLaw { c: f64, alpha: f64 },
    /// `f(j) = c exp(-cp j^beta)`
    StretchedExp { c: f64, cp: f64, beta: f64 },
    /// finitely supported envelope, zero past the list
    Explicit(Vec<f64>),
}

/// A validated envelope function.
#[derive(Debug, Clone, PartialEq)]
pub struct Envelope {
    family: EnvelopeFamily,
    mass: f64,
}

impl Envelope {
    pub fn new(family: EnvelopeFamily) -> Result<Self> {
        let invalid = |msg: String| Err(Error::InvalidEnvelope(msg));
        match &family {
            EnvelopeFamily::Geometric { c, q } => {
                if !(*c > 0.0 && c.is_finite()) || !(*q > 0.0 && *q < 1.0) {
                    return invalid(format!("geometric needs C > 0 and 0 < q < 1, got C={c}, q={q}"));
                }
                if c * q > 1.0 {
                    return invalid(format!("f(1) = {} exceeds 1", c * q));
                }
            }
            EnvelopeFamily::PowerLaw { c, alpha } => {
                if !(*c > 0.0 && c.is_finite()) || !(*alpha > 0.0 && *alpha < 1.0) {
                    return invalid(format!("power law needs C > 0 and 0 < alpha < 1, got C={c}, alpha={alpha}"));
                }
            }
            EnvelopeFamily::StretchedExp { c, cp, beta } => {
                if !(*c > 0.0 && c.is_finite()) || !(*cp > 0.0 && cp.is_finite()) || !(*beta > 0.0 && beta.is_finite()) {
                    return invalid(format!(
                        "stretched exponential needs C, Cp, beta > 0, got C={c}, Cp={cp}, beta={beta}"
                    ));
                }
                let f1 = c * (-cp).exp();
                if f1 > 1.0 {
                    return invalid(format!("f(1) = {f1} exceeds 1"));
                }
            }
            EnvelopeFamily::Explicit(values) => {
                if values.is_empty() {
                    return invalid("explicit envelope is empty".into());
                }
                for (i, &v) in values.iter().enumerate() {
                    if !(v > 0.0 && v <= 1.0) {
                        return invalid(format!("f({}) = {v} is outside (0, 1]", i + 1));
                    }
                    if i > 0 && v > values[i - 1] {
                        return invalid(format!("f({}) = {v} exceeds f({}) = {}", i + 1, i, values[i - 1]));
                    }
                }
            }
        }
        let mut env = Envelope { family, mass: f64::NAN };
        env.mass = env.tail_mass(0);
        if !env.mass.is_finite() || env.mass <= 1.0 {
            return invalid(format!("total mass {} must exceed 1", env.mass));
        }
        Ok(env)
    }

    pub fn geometric(c: f64, q: f64) -> Result<Self> {
        Self::new(EnvelopeFamily::Geometric { c, q })
    }

    pub fn power_law(c: f64, alpha: f64) -> Result<Self> {
        Self::new(EnvelopeFamily::PowerLaw { c, alpha })
    }

    pub fn stretched_exp(c: f64, cp: f64, beta: f64) -> Result<Self> {
        Self::new(EnvelopeFamily::StretchedExp { c, cp, beta })
    }

    pub fn explicit(values: Vec<f64>) -> Result<Self> {
        Self::new(EnvelopeFamily::Explicit(values))
    }

    pub fn family(&self) -> &EnvelopeFamily {
        &self.family
    }

    /// `sum_j f(j)`.
    pub fn total_mass(&self) -> f64 {
        self.mass
    }

    /// Largest index clipped to 1 by the power-law head; 0 for other families.
    fn clipped_head(&self) -> u64 {
        match self.family {
            EnvelopeFamily::PowerLaw { c, alpha } => {
                let model = TailModel::Power { c, s: 1.0 / alpha };
                model.last_at_least(1.0)
            }
            _ => 0,
        }
    }

    /// Model valid for every index past [`Self::clipped_head`]; `None` for explicit envelopes.
    pub(crate) fn tail_model(&self) -> Option<TailModel> {
        match self.family {
            EnvelopeFamily::Geometric { c, q } => Some(TailModel::Geometric { c, q }),
            EnvelopeFamily::PowerLaw { c, alpha } => Some(TailModel::Power { c, s: 1.0 / alpha }),
            EnvelopeFamily::StretchedExp { c, cp, beta } => Some(TailModel::StretchedExp { c, rate: cp, beta }),
            EnvelopeFamily::Explicit(_) => None,
        }
    }

    /// `f(j)` for `j >= 1`.
    pub fn value(&self, j: u64) -> f64 {
        assert!(j >= 1, "envelope is defined on positive integers");
        match &self.family {
            EnvelopeFamily::Explicit(values) => values.get(j as usize - 1).copied().unwrap_or(0.0),
            _ => {
                let model = self.tail_model().expect("parametric family");
                model.value_at(j).min(1.0)
            }
        }
    }

    /// `sum_{j > k} f(j)`.
    pub fn tail_mass(&self, k: u64) -> f64 {
        match &self.family {
            EnvelopeFamily::Explicit(values) => compensated_sum(values.iter().skip(k as usize).copied()),
            _ => {
                let model = self.tail_model().expect("parametric family");
                let head = self.clipped_head();
                if k >= head {
                    model.tail_sum(k)
                } else {
                    (head - k) as f64 + model.tail_sum(head)
                }
            }
        }
    }

    /// `ell_f = min { l >= 1 : sum_{j >= l} f(j) <= 1 }`.
    pub fn ell(&self) -> u64 {
        // tail_mass(l - 1) is non-increasing in l
        let fits = |l: u64| self.tail_mass(l - 1) <= 1.0;
        if fits(1) {
            return 1;
        }
        let mut hi = 2u64;
        while !fits(hi) {
            hi *= 2;
        }
        let mut lo = hi / 2; // !fits(lo)
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if fits(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    }

    pub fn distribution(&self) -> EnvelopeDistribution {
        EnvelopeDistribution::new(self)
    }

    /// Checks `p_j <= f(j)` on the materialized prefix of `spec` and on the
    /// first few tail indices.
    pub fn dominates(&self, spec: &SourceSpec) -> bool {
        let tol = 1e-15;
        let upto = spec.prefix_len() + 64;
        (spec.offset() + 1..=upto).all(|j| spec.pmf(j) <= self.value(j) * (1.0 + tol) + tol * 1e-3)
    }
}

impl fmt::Display for Envelope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.family {
            EnvelopeFamily::Geometric { c, q } => write!(f, "geom:C={c},q={q}"),
            EnvelopeFamily::PowerLaw { c, alpha } => write!(f, "power:C={c},alpha={alpha}"),
            EnvelopeFamily::StretchedExp { c, cp, beta } => write!(f, "sexp:C={c},Cp={cp},beta={beta}"),
            EnvelopeFamily::Explicit(values) => {
                write!(f, "explicit:")?;
                for (i, v) in values.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{v}")?;
                }
                Ok(())
            }
        }
    }
}

/// Parses `geom:C=2,q=0.5`, `power:C=1,alpha=0.5`, `sexp:C=1,Cp=1,beta=1`
/// and `explicit:p1,p2,...`.
impl FromStr for Envelope {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: &str| Error::InvalidEnvelope(format!("{msg} in {s:?}"));
        let (kind, rest) = s.trim().split_once(':').ok_or_else(|| bad("missing ':'"))?;
        let number = |v: &str| v.trim().parse::<f64>().map_err(|_| bad(&format!("bad number {v:?}")));
        if kind == "explicit" {
            let values = rest.split(',').map(number).collect::<Result<Vec<_>>>()?;
            return Envelope::explicit(values);
        }
        let mut params = Vec::new();
        for item in rest.split(',') {
            let (key, value) = item.split_once('=').ok_or_else(|| bad("expected key=value"))?;
            params.push((key.trim(), number(value)?));
        }
        let get = |name: &str| {
            params
                .iter()
                .find(|(k, _)| *k == name)
                .map(|&(_, v)| v)
                .ok_or_else(|| bad(&format!("missing parameter {name}")))
        };
        let expect_keys = |keys: &[&str]| {
            if params.len() != keys.len() || params.iter().any(|(k, _)| !keys.contains(k)) {
                Err(bad(&format!("expected parameters {keys:?}")))
            } else {
                Ok(())
            }
        };
        match kind {
            "geom" => {
                expect_keys(&["C", "q"])?;
                Envelope::geometric(get("C")?, get("q")?)
            }
            "power" => {
                expect_keys(&["C", "alpha"])?;
                Envelope::power_law(get("C")?, get("alpha")?)
            }
            "sexp" => {
                expect_keys(&["C", "Cp", "beta"])?;
                Envelope::stretched_exp(get("C")?, get("Cp")?, get("beta")?)
            }
            other => Err(bad(&format!("unknown family {other:?}"))),
        }
    }
}

/// The envelope distribution `F` and its probabilities `f_j`.
#[derive(Debug, Clone)]
pub struct EnvelopeDistribution {
    envelope: Envelope,
    ell: u64,
    source: SourceSpec,
}

impl EnvelopeDistribution {
    fn new(envelope: &Envelope) -> Self {
        let ell = envelope.ell();
        debug_assert!(ell >= 2, "mass > 1 forces ell_f >= 2");
        // f_j = 0 below ell - 1, f_{ell-1} = 1 - sum_{j >= ell} f(j), f_j = f(j) from ell on
        let mut prefix = vec![(1.0 - envelope.tail_mass(ell - 1)).max(0.0), envelope.value(ell)];
        let (prefix, tail) = match envelope.family() {
            EnvelopeFamily::Explicit(values) => {
                prefix.extend_from_slice(&values[ell as usize..]);
                (prefix, None)
            }
            _ => (prefix, envelope.tail_model()),
        };
        let source = SourceSpec::from_offset_parts(ell - 2, prefix, tail, format!("F[{envelope}]"))
            .expect("envelope distribution is a probability distribution")
            .with_envelope(envelope.clone());
        EnvelopeDistribution {
            envelope: envelope.clone(),
            ell,
            source,
        }
    }

    pub fn envelope(&self) -> &Envelope {
        &self.envelope
    }

    pub fn ell(&self) -> u64 {
        self.ell
    }

    /// `F(k)`.
    pub fn cdf(&self, k: u64) -> f64 {
        if k + 1 < self.ell {
            0.0
        } else {
            1.0 - self.envelope.tail_mass(k)
        }
    }

    /// `f_j = F(j) - F(j - 1)`.
    pub fn pmf(&self, j: u64) -> f64 {
        self.source.pmf(j)
    }

    /// The envelope probabilities as a source.
    pub fn source(&self) -> &SourceSpec {
        &self.source
    }

    /// `nu_f(x) = |{j : f_j >= x}|`.
    pub fn counting_function(&self, x: f64) -> Result<u64> {
        self.source.counting_function(x)
    }

    /// `nu_{1,f}[0, x]`.
    pub fn nu1_mass(&self, x: f64) -> Result<f64> {
        self.source.nu1_mass(x)
    }
}
