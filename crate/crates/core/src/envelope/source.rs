use rand::Rng;

use super::tail::{TailModel, INDEX_LIMIT};
use super::Envelope;
use crate::error::{Error, Result};
use crate::numeric::{compensated_sum, semi_infinite_integral, NeumaierSum};

/// Sums over an infinite support are carried out term by term up to this many
/// tail indices; the remainder is integrated.
pub const DIRECT_SUM_CAP: u64 = 1 << 20;

/// Reserve symbols below `ell_f` that may absorb mass in [`SourceSpec::perturbed_member`].
const MEMBER_RESERVE: u64 = 4096;

const MASS_TOLERANCE: f64 = 1.0 / (1u64 << 40) as f64;

/// A memoryless source over the positive integers: `offset` zero atoms, an
/// explicit block `p_{offset+1}..p_L` and an optional analytic tail
/// `p_j = model(j)`, `j > L`.
#[derive(Debug, Clone)]
pub struct SourceSpec {
    offset: u64,
    prefix: Vec<f64>,
    tail: Option<TailModel>,
    envelope: Option<Envelope>,
    label: String,
}

impl SourceSpec {
    /// Validates that the masses are non-negative and sum to one within `2^-40`.
    pub fn from_parts(prefix: Vec<f64>, tail: Option<TailModel>, label: impl Into<String>) -> Result<Self> {
        Self::from_offset_parts(0, prefix, tail, label)
    }

    /// Like [`SourceSpec::from_parts`] with `p_1 = .. = p_offset = 0` left implicit.
    pub fn from_offset_parts(
        offset: u64,
        prefix: Vec<f64>,
        tail: Option<TailModel>,
        label: impl Into<String>,
    ) -> Result<Self> {
        if let Some((i, p)) = prefix.iter().enumerate().find(|(_, p)| !(**p >= 0.0 && p.is_finite())) {
            return Err(Error::InvalidSource(format!("p_{} = {p} is not a probability", offset + i as u64 + 1)));
        }
        let tail_mass = tail.map_or(0.0, |m| m.tail_sum(offset + prefix.len() as u64));
        let total = compensated_sum(prefix.iter().copied().chain(std::iter::once(tail_mass)));
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::InvalidSource(format!("total mass {total} differs from 1")));
        }
        Ok(SourceSpec {
            offset,
            prefix,
            tail,
            envelope: None,
            label: label.into(),
        })
    }

    pub fn finite(probs: Vec<f64>) -> Result<Self> {
        let label = format!("finite[{}]", probs.len());
        Self::from_parts(probs, None, label)
    }

    pub fn uniform(k: usize) -> Self {
        assert!(k >= 1);
        Self::from_parts(vec![1.0 / k as f64; k], None, format!("uniform{{1..{k}}}")).expect("uniform")
    }

    pub fn point_mass() -> Self {
        Self::from_parts(vec![1.0], None, "point").expect("point mass")
    }

    /// `p_j = p (1 - p)^{j-1}`.
    pub fn geometric(success: f64) -> Result<Self> {
        if !(success > 0.0 && success < 1.0) {
            return Err(Error::InvalidSource(format!("success probability {success} outside (0, 1)")));
        }
        let q = 1.0 - success;
        let tail = TailModel::Geometric { c: success / q, q };
        Self::from_parts(vec![success], Some(tail), format!("geometric({success})"))
    }

    /// `p_j = j^{-s} / zeta(s)`.
    pub fn zipf(s: f64) -> Result<Self> {
        if !(s > 1.0) {
            return Err(Error::InvalidSource(format!("zipf exponent {s} must exceed 1")));
        }
        let zeta = crate::numeric::hurwitz_zeta(s, 1.0);
        let tail = TailModel::Power { c: 1.0 / zeta, s };
        Self::from_parts(vec![1.0 / zeta], Some(tail), format!("zipf({s})"))
    }

    pub(crate) fn with_envelope(mut self, envelope: Envelope) -> Self {
        self.envelope = Some(envelope);
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn envelope(&self) -> Option<&Envelope> {
        self.envelope.as_ref()
    }

    /// The explicit atoms `p_{offset+1}..p_L`.
    pub fn prefix(&self) -> &[f64] {
        &self.prefix
    }

    /// Number of implicit zero atoms before [`SourceSpec::prefix`].
    pub fn offset(&self) -> u64 {
        self.offset
    }

    /// `L`, the last index not covered by the tail model.
    pub fn prefix_len(&self) -> u64 {
        self.offset + self.prefix.len() as u64
    }

    pub fn tail(&self) -> Option<&TailModel> {
        self.tail.as_ref()
    }

    /// `p_j` for `j >= 1`.
    #[inline]
    pub fn pmf(&self, j: u64) -> f64 {
        debug_assert!(j >= 1);
        if j <= self.offset {
            0.0
        } else if j <= self.prefix_len() {
            self.prefix[(j - self.offset - 1) as usize]
        } else {
            self.tail.map_or(0.0, |m| m.value_at(j))
        }
    }

    /// `sum_{j > k} p_j`.
    pub fn tail_mass(&self, k: u64) -> f64 {
        let l = self.prefix_len();
        let tail = self.tail.map_or(0.0, |m| m.tail_sum(k.max(l)));
        if k >= l {
            tail
        } else {
            compensated_sum(self.prefix[self.block_start(k)..].iter().copied().chain(std::iter::once(tail)))
        }
    }

    /// `sum_{j > k} p_j^r`.
    pub fn power_tail_sum(&self, k: u64, r: u32) -> f64 {
        let l = self.prefix_len();
        let tail = self.tail.map_or(0.0, |m| m.powered(r).tail_sum(k.max(l)));
        if k >= l {
            tail
        } else {
            compensated_sum(self.prefix[self.block_start(k)..].iter().map(|p| p.powi(r as i32)).chain(std::iter::once(tail)))
        }
    }

    /// Position in the explicit block of index `k + 1`.
    fn block_start(&self, k: u64) -> usize {
        k.saturating_sub(self.offset) as usize
    }

    /// Last index of the support, `None` for infinite support.
    pub fn support_end(&self) -> Option<u64> {
        if self.tail.is_some() {
            return None;
        }
        Some(self.prefix.iter().rposition(|&p| p > 0.0).map_or(0, |i| self.offset + i as u64 + 1))
    }

    /// Largest tail index `j > L` with `p_j >= x`, or `L` when there is none.
    pub(crate) fn tail_last_at_least(&self, x: f64) -> u64 {
        let l = self.prefix_len();
        self.tail.map_or(l, |m| m.last_at_least(x).max(l))
    }

    /// `nu(x) = |{j >= 1 : p_j >= x}|`.
    pub fn counting_function(&self, x: f64) -> Result<u64> {
        if !(x > 0.0) {
            return Err(Error::Domain(format!("counting function needs x > 0, got {x}")));
        }
        let head = self.prefix.iter().filter(|&&p| p >= x).count() as u64;
        Ok(head + (self.tail_last_at_least(x) - self.prefix_len()))
    }

    /// `nu_1[0, x] = sum_j p_j 1{p_j <= x}`.
    pub fn nu1_mass(&self, x: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::Domain(format!("nu_1[0, x] needs 0 <= x <= 1, got {x}")));
        }
        Ok(self.nu1_below(x, true))
    }

    /// `nu_1(0, x) = sum_j p_j 1{p_j < x}`.
    pub fn nu1_open(&self, x: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::Domain(format!("nu_1(0, x) needs 0 <= x <= 1, got {x}")));
        }
        Ok(self.nu1_below(x, false))
    }

    fn nu1_below(&self, x: f64, closed: bool) -> f64 {
        let keep = |p: f64| if closed { p <= x } else { p < x };
        let mut acc = NeumaierSum::new();
        for &p in &self.prefix {
            if p > 0.0 && keep(p) {
                acc.add(p);
            }
        }
        if let Some(model) = self.tail {
            let l = self.prefix_len();
            // tail atoms are non-increasing: skip the ones that are too heavy
            let j = if x > 0.0 {
                let mut j = model.last_at_least(x).max(l);
                if closed {
                    // atoms equal to x belong to the closed interval
                    while j > l && model.value_at(j) <= x {
                        j -= 1;
                    }
                }
                j
            } else {
                INDEX_LIMIT
            };
            if j < INDEX_LIMIT {
                acc.add(model.tail_sum(j));
            }
        }
        acc.value()
    }

    /// `sum_j g(j, p_j)` over the positive-mass support. Tail indices beyond
    /// [`DIRECT_SUM_CAP`] terms are replaced by `int_{J+1/2}^inf g(x, p(x)) dx`.
    pub fn sum_over_support<G: Fn(f64, f64) -> f64>(&self, g: G) -> Result<f64> {
        let mut acc = NeumaierSum::new();
        for (i, &p) in self.prefix.iter().enumerate() {
            if p > 0.0 {
                acc.add(g((self.offset + i as u64) as f64 + 1.0, p));
            }
        }
        let Some(model) = self.tail else {
            return Ok(acc.value());
        };
        let l = self.prefix_len();
        let negligible = model.last_at_least(f64::MIN_POSITIVE * 1e10).max(l);
        let end = negligible.min(l + DIRECT_SUM_CAP);
        for j in l + 1..=end {
            let p = model.value_at(j);
            if p > 0.0 {
                acc.add(g(j as f64, p));
            }
        }
        if end < negligible {
            let rest = semi_infinite_integral(|x| g(x, model.value(x)), end as f64 + 0.5)
                .ok_or_else(|| Error::UnboundedSum(format!("tail of {} past index {end}", self.label)))?;
            acc.add(rest);
        }
        let v = acc.value();
        if !v.is_finite() {
            return Err(Error::UnboundedSum(format!("sum over {} is not finite", self.label)));
        }
        Ok(v)
    }

    /// Shannon entropy in bits.
    pub fn entropy_bits(&self) -> Result<f64> {
        self.sum_over_support(|_, p| -p * p.log2())
    }

    /// A random member of the envelope class: each of the first `width` atoms
    /// from `ell_f` on is pushed down by a random factor with probability 1/2,
    /// and the removed mass is re-deposited on reserve symbols below `ell_f`
    /// without exceeding the envelope there.
    pub fn perturbed_member<R: Rng + ?Sized>(envelope: &Envelope, width: usize, rng: &mut R) -> SourceSpec {
        let dist = envelope.distribution();
        let ell = dist.ell();
        let base = dist.source();
        let last = match base.support_end() {
            Some(end) => end,
            None => ell + width as u64,
        };
        // only the reserve symbols just below ell_f are materialized
        let first = ell.saturating_sub(MEMBER_RESERVE).max(1);
        let at = |j: u64| (j - first) as usize;
        let mut probs: Vec<f64> = (first..=last).map(|j| base.pmf(j)).collect();
        let mut removal = vec![0.0; probs.len()];
        for j in ell..=last.min(ell + width as u64) {
            if rng.random_bool(0.5) {
                removal[at(j)] = probs[at(j)] * rng.random::<f64>();
            }
        }
        let slack: f64 = (first..ell).map(|j| envelope.value(j) - probs[at(j)]).sum();
        let wanted: f64 = removal.iter().sum();
        let scale = if wanted > slack { slack / wanted * (1.0 - 1e-9) } else { 1.0 };
        let mut moved = NeumaierSum::new();
        for (p, r) in probs.iter_mut().zip(&removal) {
            let r = r * scale;
            *p -= r;
            moved.add(r);
        }
        let mut left = moved.value();
        for j in (first..ell).rev() {
            if left <= 0.0 {
                break;
            }
            let room = envelope.value(j) - probs[at(j)];
            let put = room.min(left);
            probs[at(j)] += put;
            left -= put;
        }
        probs[at(ell - 1)] += left.max(0.0);
        let label = format!("member[{envelope}]");
        SourceSpec::from_offset_parts(first - 1, probs, base.tail, label)
            .expect("perturbation preserves total mass")
            .with_envelope(envelope.clone())
    }
}
