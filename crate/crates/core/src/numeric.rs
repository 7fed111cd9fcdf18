//! Small numerical toolkit: compensated summation, the Hurwitz zeta function,
//! Gauss-Legendre panels for semi-infinite integrals and adaptive Simpson.

use std::sync::OnceLock;

pub const LOG2_E: f64 = std::f64::consts::LOG2_E;

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct NeumaierSum {
    sum: f64,
    compensation: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl FromIterator<f64> for NeumaierSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = NeumaierSum::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

pub fn compensated_sum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    iter.into_iter().collect::<NeumaierSum>().value()
}

/// `B_{2k} / (2k)!` for k = 1..=7.
const BERNOULLI_OVER_FACTORIAL: [f64; 7] = [
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30240.0,
    -1.0 / 1209600.0,
    1.0 / 47900160.0,
    -691.0 / 1307674368000.0,
    1.0 / 74724249600.0,
];

/// Hurwitz zeta `sum_{k>=0} (a + k)^{-s}` for `s > 1`, `a > 0`.
pub fn hurwitz_zeta(s: f64, a: f64) -> f64 {
    debug_assert!(s > 1.0 && a > 0.0);
    const SHIFT: f64 = 24.0;
    let mut acc = NeumaierSum::new();
    let mut x = a;
    while x < SHIFT {
        acc.add(x.powf(-s));
        x += 1.0;
    }
    acc.add(x.powf(1.0 - s) / (s - 1.0));
    acc.add(0.5 * x.powf(-s));
    // Euler-Maclaurin corrections: B_{2k}/(2k)! * s(s+1)...(s+2k-2) * x^{-s-2k+1}
    let mut rising = s;
    let mut power = x.powf(-s - 1.0);
    let inv_x2 = 1.0 / (x * x);
    for (k, coef) in BERNOULLI_OVER_FACTORIAL.iter().enumerate() {
        if k > 0 {
            let m = 2.0 * k as f64;
            rising *= (s + m - 1.0) * (s + m);
            power *= inv_x2;
        }
        acc.add(coef * rising * power);
    }
    acc.value()
}

fn gauss_legendre_16() -> &'static [(f64, f64)] {
    static NODES: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    NODES.get_or_init(|| {
        let n = 16usize;
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let kf = k as f64;
                    let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
        }
        out
    })
}

/// 16-point Gauss-Legendre rule on `[a, b]`.
pub fn gauss_legendre<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (b + a);
    let mut acc = NeumaierSum::new();
    for &(x, w) in gauss_legendre_16() {
        acc.add(w * f(mid + half * x));
    }
    half * acc.value()
}

/// `int_{x0}^inf g(x) dx` for a non-negative-ish integrand decaying at infinity,
/// integrated in `y = ln x` over half-unit panels. Returns `None` when the
/// panels have not died out before `x` overflows.
pub fn semi_infinite_integral<F: Fn(f64) -> f64>(g: F, x0: f64) -> Option<f64> {
    debug_assert!(x0 > 0.0);
    let h = |y: f64| {
        let x = y.exp();
        g(x) * x
    };
    let mut acc = NeumaierSum::new();
    let mut y = x0.ln();
    let mut quiet = 0;
    while y < 700.0 {
        let panel = gauss_legendre(&h, y, y + 0.5);
        if !panel.is_finite() {
            return None;
        }
        acc.add(panel);
        let scale = acc.value().abs();
        if panel.abs() <= 1e-18 * scale || panel.abs() < 1e-300 {
            quiet += 1;
            if quiet >= 4 {
                return Some(acc.value());
            }
        } else {
            quiet = 0;
        }
        y += 0.5;
    }
    None
}

/// Adaptive Simpson quadrature with absolute tolerance `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, max_depth: u32) -> f64 {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, max_depth)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// `log2(1 + log2(j))`, the double-logarithmic part of the idealized Elias cost.
#[inline]
pub fn log2_log2_plus_one(j: f64) -> f64 {
    (j.max(1.0).log2() + 1.0).log2()
}

/// Idealized Elias cost `1 + log2(j v 1) + 2 log2(1 + log2(j v 1))`.
#[inline]
pub fn idealized_elias_bits(j: u64) -> f64 {
    let j = (j.max(1)) as f64;
    1.0 + j.log2() + 2.0 * log2_log2_plus_one(j)
}

/// `ln C(n, k)`.
pub fn ln_binomial(n: u64, k: u64) -> f64 {
    use statrs::function::gamma::ln_gamma;
    if k > n {
        return f64::NEG_INFINITY;
    }
    ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn neumaier_recovers_cancelled_terms() {
        let v = compensated_sum([1.0, 1e100, 1.0, -1e100]);
        assert_eq!(v, 2.0);
    }

    #[test]
    fn hurwitz_matches_known_values() {
        let pi2_6 = std::f64::consts::PI.powi(2) / 6.0;
        assert!((hurwitz_zeta(2.0, 1.0) - pi2_6).abs() < 1e-14);
        // zeta(2, 2) = pi^2/6 - 1
        assert!((hurwitz_zeta(2.0, 2.0) - (pi2_6 - 1.0)).abs() < 1e-14);
        // zeta(3) = 1.2020569031595942
        assert!((hurwitz_zeta(3.0, 1.0) - 1.202_056_903_159_594_2).abs() < 1e-14);
        // direct sum oracle at a heavy exponent
        let direct: f64 = compensated_sum((5..200_000).map(|k| (k as f64).powf(-4.5)));
        let tail = hurwitz_zeta(4.5, 200_000.0);
        assert!((hurwitz_zeta(4.5, 5.0) - direct - tail).abs() < 1e-15);
    }

    #[test]
    fn semi_infinite_power_integral() {
        // int_10^inf x^{-3} dx = 1/200
        let v = semi_infinite_integral(|x| x.powi(-3), 10.0).unwrap();
        assert!((v - 0.005).abs() < 1e-15, "{v}");
        assert!(semi_infinite_integral(|x| 1.0 / x, 1.0).is_none());
    }

    #[test]
    fn simpson_on_polynomial() {
        let v = adaptive_simpson(&|x: f64| x * x * x, 0.0, 2.0, 1e-12, 30);
        assert!((v - 4.0).abs() < 1e-12);
    }

    #[test]
    fn idealized_cost_at_one() {
        assert_eq!(idealized_elias_bits(0), 1.0);
        assert_eq!(idealized_elias_bits(1), 1.0);
        assert!((idealized_elias_bits(4) - (1.0 + 2.0 + 2.0 * 3f64.log2())).abs() < 1e-15);
    }
}
