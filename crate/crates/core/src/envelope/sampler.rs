use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::tail::INDEX_LIMIT;
use super::SourceSpec;
use crate::numeric::NeumaierSum;

const TABLE_LIMIT: usize = 1 << 16;

/// Inverse-CDF sampler over a lazily extended cumulative table.
///
/// The table grows on demand whenever a uniform draw lands past its coverage.
/// Past [`TABLE_LIMIT`] entries the analytic tail of the source is inverted
/// directly, so draws are exact and nothing is truncated. A sampler owns its
/// table and is confined to one thread; share the [`SourceSpec`] instead.
pub struct Sampler<'a> {
    spec: &'a SourceSpec,
    /// indices up to `offset` carry no mass
    offset: u64,
    /// `cum[j - offset - 1] = F(j)`
    cum: Vec<f64>,
    acc: NeumaierSum,
    limit: usize,
}

impl<'a> Sampler<'a> {
    pub fn new(spec: &'a SourceSpec) -> Self {
        let limit = TABLE_LIMIT.max(spec.prefix().len());
        Sampler {
            spec,
            offset: spec.offset(),
            cum: Vec::new(),
            acc: NeumaierSum::new(),
            limit,
        }
    }

    fn extend_to(&mut self, target: usize) {
        let target = target.min(self.limit);
        let end = self.span_end();
        while self.cum.len() < target && self.cum.len() < end {
            let j = self.offset + self.cum.len() as u64 + 1;
            self.acc.add(self.spec.pmf(j));
            self.cum.push(self.acc.value());
        }
    }

    /// Table length that covers the whole finite support.
    fn span_end(&self) -> usize {
        self.spec.support_end().map_or(usize::MAX, |e| (e - self.offset) as usize)
    }

    fn exhausted(&self) -> bool {
        self.cum.len() >= self.limit || self.cum.len() >= self.span_end()
    }

    /// One draw `X = min { j : F(j) > u }`.
    pub fn draw<R: Rng + ?Sized>(&mut self, rng: &mut R) -> u64 {
        let u: f64 = rng.random();
        loop {
            if let Some(&top) = self.cum.last() {
                if u < top {
                    return self.offset + self.cum.partition_point(|&c| c <= u) as u64 + 1;
                }
            }
            if self.exhausted() {
                break;
            }
            let grow = (self.cum.len() * 2).max(64);
            self.extend_to(grow);
        }
        match self.spec.support_end() {
            // rounding left u above the last cumulative value
            Some(end) => (1..=end).rev().find(|&j| self.spec.pmf(j) > 0.0).unwrap_or(1),
            None => self.invert_tail(1.0 - u),
        }
    }

    /// Smallest `j` past the table with `sum_{i>j} p_i < r`, saturating at `2^62`.
    fn invert_tail(&self, r: f64) -> u64 {
        let mut lo = self.offset + self.cum.len() as u64; // tail_mass(lo) >= r, up to rounding
        let mut step = 1u64;
        let mut hi = lo + 1;
        while self.spec.tail_mass(hi) >= r {
            if hi >= INDEX_LIMIT {
                return INDEX_LIMIT;
            }
            lo = hi;
            step = step.saturating_mul(2);
            hi = hi.saturating_add(step).min(INDEX_LIMIT);
        }
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if self.spec.tail_mass(mid) >= r {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hi
    }

    pub fn take<R: Rng + ?Sized>(&mut self, n: usize, rng: &mut R) -> Vec<u64> {
        (0..n).map(|_| self.draw(rng)).collect()
    }
}

/// `n` i.i.d. draws from `spec`, deterministic in `seed`.
pub fn sample(spec: &SourceSpec, n: usize, seed: u64) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Sampler::new(spec).take(n, &mut rng)
}
