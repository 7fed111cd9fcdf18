//! Occupancy counts of a sample and their exact expectations under a source.

mod lemmas;

pub use lemmas::{
    check_binomial_inverse_lemma, check_occupancy_lemma, evaluate_binomial_inverse, evaluate_occupancy_lemma,
    evaluate_poisson_tail, mean_inverse_distinct, LemmaRow, LemmaStatus,
};

use std::collections::{BTreeMap, HashMap};

use crate::envelope::{SourceSpec, TailModel};
use crate::numeric::{gauss_legendre, NeumaierSum};

/// Occupancy profile of a sample.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct OccupancyProfile {
    pub n: u64,
    /// `N_n^j` for every observed symbol
    pub counts: BTreeMap<u64, u64>,
    /// `K_{n,r}` for every `r` that occurs
    pub k_r: BTreeMap<u64, u64>,
}

impl OccupancyProfile {
    /// Number of distinct symbols `K_n`.
    pub fn k(&self) -> u64 {
        self.counts.len() as u64
    }

    pub fn k_r(&self, r: u64) -> u64 {
        self.k_r.get(&r).copied().unwrap_or(0)
    }

    /// Mass of the symbols that did not occur.
    pub fn missing_mass(&self, spec: &SourceSpec) -> f64 {
        let seen: NeumaierSum = self.counts.keys().map(|&j| spec.pmf(j)).collect();
        (1.0 - seen.value()).clamp(0.0, 1.0)
    }
}

pub fn profile(symbols: &[u64]) -> OccupancyProfile {
    let mut counts: HashMap<u64, u64> = HashMap::new();
    for &x in symbols {
        *counts.entry(x).or_insert(0) += 1;
    }
    let mut k_r = BTreeMap::new();
    for &c in counts.values() {
        *k_r.entry(c).or_insert(0) += 1;
    }
    OccupancyProfile { n: symbols.len() as u64, counts: counts.into_iter().collect(), k_r }
}

/// Number of distinct symbols in `symbols`.
pub fn distinct(symbols: &[u64]) -> u64 {
    let mut seen = std::collections::HashSet::with_capacity(symbols.len());
    symbols.iter().filter(|&&x| seen.insert(x)).count() as u64
}

/// `n p` below which tail atoms are summed through the power series.
const SERIES_THRESHOLD: f64 = 0.05;
/// Tail atoms summed one by one before switching to quadrature.
const DIRECT_CAP: u64 = 1 << 22;

/// `sum_j g(p_j)` for a smooth `g` with `g(p) = sum_{r>=1} coef(r) p^r` near 0.
///
/// Atoms with `n p_j >= 0.05` are summed directly; the remaining tail is
/// `sum_r coef(r) sum_{j>J} p_j^r`, which the tail model evaluates in closed form.
fn occupancy_sum<G, C>(spec: &SourceSpec, n: u64, g: G, coef: C) -> f64
where
    G: Fn(f64) -> f64,
    C: Fn(u32) -> f64,
{
    let mut acc = NeumaierSum::new();
    for &p in spec.prefix() {
        if p > 0.0 {
            acc.add(g(p));
        }
    }
    let Some(&model) = spec.tail() else {
        return acc.value();
    };
    let l = spec.prefix_len();
    let split = model.last_at_least(SERIES_THRESHOLD / n.max(1) as f64).max(l);
    let direct_end = split.min(l + DIRECT_CAP);
    for j in l + 1..=direct_end {
        acc.add(g(model.value_at(j)));
    }
    if direct_end < split {
        acc.add(midpoint_sum(&model, direct_end, split, &g));
    }
    // power series over the light tail
    let mut r = 1u32;
    loop {
        let c = coef(r);
        let term = c * model.powered(r).tail_sum(split);
        acc.add(term);
        if r >= 2 && (term.abs() <= 1e-18 * acc.value().abs() || term == 0.0) || r >= 60 {
            break;
        }
        r += 1;
    }
    acc.value()
}

/// `sum_{j=a+1}^{b} g(p(j))` by quadrature of `g(p(x))` over `[a + 1/2, b + 1/2]`
/// in `ln x`, with the midpoint-rule correction.
fn midpoint_sum<G: Fn(f64) -> f64>(model: &TailModel, a: u64, b: u64, g: &G) -> f64 {
    let h = |y: f64| {
        let x = y.exp();
        g(model.value(x)) * x
    };
    let (lo, hi) = ((a as f64 + 0.5).ln(), (b as f64 + 0.5).ln());
    let panels = (((hi - lo) / 0.25).ceil() as usize).max(1);
    let width = (hi - lo) / panels as f64;
    let mut acc = NeumaierSum::new();
    for k in 0..panels {
        let y0 = lo + k as f64 * width;
        acc.add(gauss_legendre(&h, y0, y0 + width));
    }
    let d = |x: f64| {
        let e = 1e-4 * x;
        (g(model.value(x + e)) - g(model.value(x - e))) / (2.0 * e)
    };
    acc.add(-(d(b as f64 + 0.5) - d(a as f64 + 0.5)) / 24.0);
    acc.value()
}

/// `C(m, r)` as a float.
fn binomial(m: u64, r: u32) -> f64 {
    let mut c = 1.0;
    for t in 0..r as u64 {
        if t >= m {
            return 0.0;
        }
        c *= (m - t) as f64 / (t + 1) as f64;
    }
    c
}

#[inline]
fn sign(r: u32) -> f64 {
    if r.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// `E K_n = sum_j (1 - (1 - p_j)^n)`.
pub fn expected_k(spec: &SourceSpec, n: u64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let nf = n as f64;
    occupancy_sum(spec, n, |p| -(nf * (-p).ln_1p()).exp_m1(), |r| -sign(r) * binomial(n, r))
}

/// `E K_{n,1} = sum_j n p_j (1 - p_j)^{n-1}`.
pub fn expected_k1(spec: &SourceSpec, n: u64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let nf = n as f64;
    occupancy_sum(
        spec,
        n,
        |p| if p >= 1.0 { if n == 1 { 1.0 } else { 0.0 } } else { nf * p * ((nf - 1.0) * (-p).ln_1p()).exp() },
        |r| nf * sign(r - 1) * binomial(n - 1, r - 1),
    )
}

/// Expected missing mass `E M_{n,0} = sum_j p_j (1 - p_j)^n`.
pub fn expected_missing_mass(spec: &SourceSpec, n: u64) -> f64 {
    let nf = n as f64;
    occupancy_sum(
        spec,
        n,
        |p| if p >= 1.0 { if n == 0 { 1.0 } else { 0.0 } } else { p * (nf * (-p).ln_1p()).exp() },
        |r| sign(r - 1) * binomial(n, r - 1),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::envelope::Envelope;
    use crate::numeric::compensated_sum;

    fn brute<G: Fn(f64) -> f64>(spec: &SourceSpec, upto: u64, g: G) -> f64 {
        compensated_sum((1..=upto).map(|j| spec.pmf(j)).filter(|&p| p > 0.0).map(g))
    }

    #[test]
    fn profile_examples() {
        let p = profile(&[1, 1, 2]);
        assert_eq!((p.k(), p.k_r(1), p.k_r(2)), (2, 1, 1));
        let p = profile(&[]);
        assert_eq!((p.k(), p.n), (0, 0));
        let p = profile(&[1, 2, 3, 1, 4, 1, 5, 1, 2, 3, 1]);
        assert_eq!((p.k(), p.k_r(1), p.k_r(2), p.k_r(5)), (5, 2, 2, 1));
        assert_eq!(p.k_r.iter().map(|(r, k)| r * k).sum::<u64>(), 11);
        let missing = profile(&[1]).missing_mass(&SourceSpec::uniform(4));
        assert!((missing - 0.75).abs() < 1e-15);
    }

    #[test]
    fn small_closed_forms() {
        let u2 = SourceSpec::uniform(2);
        assert!((expected_k(&u2, 2) - 1.5).abs() < 1e-15);
        assert!((expected_k1(&u2, 2) - 1.0).abs() < 1e-15);
        assert!((expected_missing_mass(&u2, 2) - 0.25).abs() < 1e-15);
        let pm = SourceSpec::point_mass();
        assert_eq!(expected_k(&pm, 17), 1.0);
        assert_eq!(expected_missing_mass(&pm, 3), 0.0);
        assert_eq!(expected_k(&pm, 0), 0.0);
        assert!((expected_missing_mass(&SourceSpec::uniform(4), 1) - 0.75).abs() < 1e-15);
    }

    #[test]
    fn series_tail_matches_brute_force() {
        let geo = Envelope::geometric(2.0, 0.5).unwrap().distribution();
        let pow = Envelope::power_law(1.0, 0.5).unwrap().distribution();
        let sexp = Envelope::stretched_exp(2.0, 1.0, 0.5).unwrap().distribution();
        for (spec, upto) in [(geo.source(), 2000u64), (pow.source(), 2_000_000), (sexp.source(), 20_000)] {
            for n in [1u64, 10, 1000, 100_000] {
                let nf = n as f64;
                let ek = brute(spec, upto, |p| 1.0 - (1.0 - p).powf(nf));
                let ek1 = brute(spec, upto, |p| nf * p * (1.0 - p).powf(nf - 1.0));
                let em = brute(spec, upto, |p| p * (1.0 - p).powf(nf));
                // brute force sums stop at `upto`; add the analytic remainder of the leading term
                let rest = spec.tail_mass(upto);
                let rel = |a: f64, b: f64| ((a - b) / b).abs();
                assert!(rel(expected_k(spec, n), ek + nf * rest) < 1e-9, "{} n={n}", spec.label());
                assert!(rel(expected_k1(spec, n), ek1 + nf * rest) < 1e-9, "{} n={n}", spec.label());
                assert!(rel(expected_missing_mass(spec, n), em + rest) < 1e-9, "{} n={n}", spec.label());
            }
        }
    }

    #[test]
    fn monte_carlo_mean_within_variance_band() {
        let spec = Envelope::geometric(2.0, 0.5).unwrap().distribution().source().clone();
        let n = 500u64;
        let trials = 400u64;
        let mean = (0..trials)
            .map(|t| distinct(&crate::envelope::sample(&spec, n as usize, t)) as f64)
            .sum::<f64>()
            / trials as f64;
        let band = 4.0 * expected_k1(&spec, n).sqrt() / (trials as f64).sqrt();
        assert!((mean - expected_k(&spec, n)).abs() <= band);
    }
}
