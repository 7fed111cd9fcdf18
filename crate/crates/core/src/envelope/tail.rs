//! Analytic tails of the three parametric families.
//!
//! A [`TailModel`] describes a non-increasing mass sequence `j -> p(j)` for all
//! `j` past some materialized prefix, together with closed-form (or
//! Euler-Maclaurin) tail sums `sum_{j>k} p(j)`. Powers of a model stay in the
//! same family, which lets occupancy expectations expand `sum p_j^r` exactly.

use statrs::function::gamma::{gamma_ur, ln_gamma};

use crate::numeric::{hurwitz_zeta, NeumaierSum};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TailModel {
    /// `p(j) = c q^j`
    Geometric { c: f64, q: f64 },
    /// `p(j) = c j^{-s}`, `s > 1`
    Power { c: f64, s: f64 },
    /// `p(j) = c exp(-rate j^beta)`
    StretchedExp { c: f64, rate: f64, beta: f64 },
}

/// Largest index handed out by inverse searches.
pub(crate) const INDEX_LIMIT: u64 = 1 << 62;

impl TailModel {
    #[inline]
    pub fn value(&self, j: f64) -> f64 {
        match *self {
            TailModel::Geometric { c, q } => c * q.powf(j),
            TailModel::Power { c, s } => c * j.powf(-s),
            TailModel::StretchedExp { c, rate, beta } => c * (-rate * j.powf(beta)).exp(),
        }
    }

    #[inline]
    pub fn value_at(&self, j: u64) -> f64 {
        match *self {
            TailModel::Geometric { c, q } if j <= i32::MAX as u64 => c * q.powi(j as i32),
            _ => self.value(j as f64),
        }
    }

    /// The model of `p(j)^r`.
    pub fn powered(&self, r: u32) -> TailModel {
        let rf = r as f64;
        match *self {
            TailModel::Geometric { c, q } => TailModel::Geometric { c: c.powi(r as i32), q: q.powi(r as i32) },
            TailModel::Power { c, s } => TailModel::Power { c: c.powi(r as i32), s: s * rf },
            TailModel::StretchedExp { c, rate, beta } => TailModel::StretchedExp {
                c: c.powi(r as i32),
                rate: rate * rf,
                beta,
            },
        }
    }

    /// `sum_{j > k} p(j)`.
    pub fn tail_sum(&self, k: u64) -> f64 {
        match *self {
            TailModel::Geometric { c, q } => c * q.powf(k as f64 + 1.0) / (1.0 - q),
            TailModel::Power { c, s } => c * hurwitz_zeta(s, k as f64 + 1.0),
            TailModel::StretchedExp { c, rate, beta } => stretched_tail(c, rate, beta, k),
        }
    }

    /// Largest `j >= 0` with `p(j) >= x` (0 when no positive index qualifies).
    pub fn last_at_least(&self, x: f64) -> u64 {
        debug_assert!(x > 0.0);
        let guess = match *self {
            TailModel::Geometric { c, q } => (x / c).ln() / q.ln(),
            TailModel::Power { c, s } => (c / x).powf(1.0 / s),
            TailModel::StretchedExp { c, rate, beta } => {
                if c <= x {
                    0.0
                } else {
                    ((c / x).ln() / rate).powf(1.0 / beta)
                }
            }
        };
        let mut j = if guess.is_finite() && guess > 0.0 {
            (guess.floor() as u64).min(INDEX_LIMIT)
        } else if guess.is_infinite() && guess > 0.0 {
            INDEX_LIMIT
        } else {
            0
        };
        // repair floating point error around the boundary
        while j > 0 && self.value_at(j) < x {
            j -= 1;
        }
        while j < INDEX_LIMIT && self.value_at(j + 1) >= x {
            j += 1;
        }
        j
    }
}

/// `sum_{j>k} c exp(-rate j^beta)`: direct summation while the summand varies
/// quickly on unit scale, then Euler-Maclaurin with an incomplete-gamma integral.
fn stretched_tail(c: f64, rate: f64, beta: f64, k: u64) -> f64 {
    let g = |x: f64| c * (-rate * x.powf(beta)).exp();
    // log-derivative magnitude |h'(x)| with h(x) = rate x^beta
    let slope = |x: f64| rate * beta * x.powf(beta - 1.0);
    let mut acc = NeumaierSum::new();
    let mut j = k as f64 + 1.0;
    let start = j;
    loop {
        let term = g(j);
        if term == 0.0 || (j > start && term < 1e-20 * acc.value()) {
            return acc.value();
        }
        if slope(j) <= 0.02 && j >= start + 8.0 {
            break;
        }
        acc.add(term);
        j += 1.0;
        if j - start > 4.0e6 {
            return acc.value();
        }
    }
    let n = j;
    // int_n^inf c e^{-rate x^beta} dx = c / (beta rate^{1/beta}) Gamma(1/beta, rate n^beta)
    let a = 1.0 / beta;
    let upper = rate * n.powf(beta);
    let q = gamma_ur(a, upper);
    let integral = if q > 0.0 {
        (c.ln() - beta.ln() - rate.ln() / beta + ln_gamma(a) + q.ln()).exp()
    } else {
        0.0
    };
    let h1 = rate * beta * n.powf(beta - 1.0);
    let h2 = rate * beta * (beta - 1.0) * n.powf(beta - 2.0);
    let h3 = rate * beta * (beta - 1.0) * (beta - 2.0) * n.powf(beta - 3.0);
    let gn = g(n);
    let d1 = -h1 * gn;
    let d3 = (-h1 * h1 * h1 + 3.0 * h1 * h2 - h3) * gn;
    acc.add(integral);
    acc.add(0.5 * gn);
    acc.add(-d1 / 12.0);
    acc.add(d3 / 720.0);
    acc.value()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::compensated_sum;

    fn brute_tail(model: &TailModel, k: u64, upto: u64) -> f64 {
        compensated_sum((k + 1..=upto).map(|j| model.value_at(j)))
    }

    #[test]
    fn geometric_tail_closed_form() {
        let m = TailModel::Geometric { c: 2.0, q: 0.5 };
        assert_eq!(m.tail_sum(0), 2.0);
        assert_eq!(m.tail_sum(3), 0.25);
        assert!((m.tail_sum(5) - brute_tail(&m, 5, 200)).abs() < 1e-16);
    }

    #[test]
    fn stretched_tail_matches_brute_force() {
        for &(c, rate, beta) in &[(1.0, 1.0, 0.5), (2.0, 0.3, 0.7), (1.0, 2.0, 1.5), (0.9, 0.5, 0.3)] {
            let m = TailModel::StretchedExp { c, rate, beta };
            for &k in &[0u64, 3, 40] {
                let mut acc = crate::numeric::NeumaierSum::new();
                let mut j = k + 1;
                loop {
                    let t = m.value_at(j);
                    acc.add(t);
                    if t < 1e-24 * acc.value() {
                        break;
                    }
                    j += 1;
                }
                let brute = acc.value();
                let fast = m.tail_sum(k);
                let rel = ((fast - brute) / brute).abs();
                assert!(rel < 1e-11, "c={c} rate={rate} beta={beta} k={k}: {fast} vs {brute}");
            }
        }
    }

    #[test]
    fn power_tail_matches_brute_force_plus_integral() {
        let m = TailModel::Power { c: 0.7, s: 3.0 };
        let brute = brute_tail(&m, 10, 1_000_000) + 0.7 * 0.5 / (1_000_000.5f64).powi(2);
        assert!((m.tail_sum(10) - brute).abs() < 1e-15);
    }

    #[test]
    fn inverse_search_hits_exact_boundary() {
        let m = TailModel::Geometric { c: 2.0, q: 0.5 };
        assert_eq!(m.last_at_least(0.125), 4);
        assert_eq!(m.last_at_least(0.126), 3);
        let p = TailModel::Power { c: 1.0, s: 2.0 };
        assert_eq!(p.last_at_least(1e-6), 1000);
        let e = TailModel::StretchedExp { c: 1.0, rate: 1.0, beta: 1.0 };
        assert_eq!(e.last_at_least(2.0), 0);
    }

    #[test]
    fn powered_models() {
        let p = TailModel::Power { c: 0.5, s: 2.0 }.powered(3);
        assert_eq!(p, TailModel::Power { c: 0.125, s: 6.0 });
        let g = TailModel::Geometric { c: 2.0, q: 0.5 }.powered(2);
        assert_eq!(g.value_at(3), 4.0 * 0.015625);
    }
}
