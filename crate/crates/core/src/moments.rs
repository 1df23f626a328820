//! Closed-form weighted exponential moments `∫_a^b σ(x) x^n e^{iμx} dx` for
//! Fourier and piecewise-linear σ and complex frequency μ.

use crate::potential::PotentialSpec;
use num_complex::Complex64;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// `∫_0^1 u^j e^{zu} du`.
fn unit_moment(j: usize, z: Complex64) -> Complex64 {
    if z.norm() < 2.0 {
        unit_moment_series(j, z)
    } else {
        unit_moment_recurrence(j, z)
    }
}

/// `Σ z^n / (n! (n + j + 1))`.
fn unit_moment_series(j: usize, z: Complex64) -> Complex64 {
    {
        let mut term = Complex64::new(1.0, 0.0);
        let mut sum = term / (j + 1) as f64;
        for n in 1..80 {
            term *= z / n as f64;
            let add = term / (n + j + 1) as f64;
            sum += add;
            if add.norm() <= 1e-17 * sum.norm() {
                break;
            }
        }
        sum
    }
}

fn unit_moment_recurrence(j: usize, z: Complex64) -> Complex64 {
    let ez = z.exp();
    let mut g = (ez - 1.0) / z;
    for i in 1..=j {
        g = (ez - i as f64 * g) / z;
    }
    g
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `∫_a^b x^n e^{cx} dx`.
pub(crate) fn monomial_exp(n: usize, c: Complex64, a: f64, b: f64) -> Complex64 {
    let len = b - a;
    if len <= 0.0 {
        return Complex64::default();
    }
    let z = c * len;
    let mut sum = Complex64::default();
    for j in 0..=n {
        sum += binomial(n, j) * a.powi((n - j) as i32) * len.powi(j as i32 + 1) * unit_moment(j, z);
    }
    (c * a).exp() * sum
}

/// `∫_a^b σ(x) x^n e^{iμx} dx` for `0 ≤ a ≤ b ≤ π`.
pub(crate) fn sigma_moment(sigma: &PotentialSpec, n: usize, mu: Complex64, a: f64, b: f64) -> Complex64 {
    match sigma {
        PotentialSpec::Fourier(f) => {
            let m = |w: Complex64| monomial_exp(n, I * w, a, b);
            let mut sum = f.c0 * m(mu);
            for (k, &c) in f.cos.iter().enumerate() {
                if c != Complex64::default() {
                    let k = (k + 1) as f64;
                    sum += c * 0.5 * (m(mu + k) + m(mu - k));
                }
            }
            for (k, &d) in f.sin.iter().enumerate() {
                if d != Complex64::default() {
                    let k = (k + 1) as f64;
                    sum += d * (m(mu + k) - m(mu - k)) / (2.0 * I);
                }
            }
            sum
        }
        PotentialSpec::PiecewiseLinear(p) => {
            let (x, y) = (p.knots_x(), p.knots_y());
            let mut sum = Complex64::default();
            for i in 0..x.len() - 1 {
                let (x0, x1) = (x[i], x[i + 1]);
                if x1 <= x0 {
                    continue;
                }
                let lo = x0.max(a);
                let hi = x1.min(b);
                if hi <= lo {
                    continue;
                }
                let slope = (y[i + 1] - y[i]) / (x1 - x0);
                let intercept = y[i] - slope * x0;
                let c = I * mu;
                sum += intercept * monomial_exp(n, c, lo, hi) + slope * monomial_exp(n + 1, c, lo, hi);
            }
            sum
        }
    }
}

/// `∫_a^b σ(x) e^{iμx} dx`.
pub(crate) fn exp_moment(sigma: &PotentialSpec, mu: Complex64, a: f64, b: f64) -> Complex64 {
    sigma_moment(sigma, 0, mu, a, b)
}

/// `∫_a^b σ(x) x^n sin(ωx) dx` for real ω.
pub(crate) fn sin_moment(sigma: &PotentialSpec, n: usize, w: f64, a: f64, b: f64) -> Complex64 {
    if w == 0.0 {
        return Complex64::default();
    }
    let p = sigma_moment(sigma, n, w.into(), a, b);
    let m = sigma_moment(sigma, n, (-w).into(), a, b);
    (p - m) / (2.0 * I)
}

/// `∫_a^b σ(x) x^n cos(ωx) dx` for real ω.
pub(crate) fn cos_moment(sigma: &PotentialSpec, n: usize, w: f64, a: f64, b: f64) -> Complex64 {
    if w == 0.0 {
        return sigma_moment(sigma, n, 0.0.into(), a, b);
    }
    let p = sigma_moment(sigma, n, w.into(), a, b);
    let m = sigma_moment(sigma, n, (-w).into(), a, b);
    (p + m) / 2.0
}
