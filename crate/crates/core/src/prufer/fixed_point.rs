//! The Prüfer angle as the fixed point of the integral map
//! `f ↦ ∫_0^x σ sin(2ρt + 2f) + (1/2ρ)∫_0^x σ²(1 − cos(2ρt + 2f))`, iterated
//! from `f₀ = 0` in the four-part splitting `Φ = Φ₀ + Φ₁ + Φ₂ + Φ₃` whose
//! contraction constant is controlled by the functional Υ(ρ).

use super::angle::PruferAngle;
use crate::chebyshev::Panels;
use crate::error::{Error, Result};
use crate::moments::exp_moment;
use crate::potential::PotentialSpec;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Smallness constant ε = 2⁻⁷ in the admissibility condition.
pub const EPSILON: f64 = 1.0 / 128.0;
const MAX_ITERATIONS: usize = 200;
const STOP_CHANGE: f64 = 1e-12;

/// `2⁻⁷ (1 + 64 R² ϰ²)⁻²` with `ϰ = cosh 2πν`.
pub fn admissibility_bound(nu: f64, radius: f64) -> f64 {
    let kappa = (2.0 * PI * nu).cosh();
    EPSILON / (1.0 + 64.0 * radius * radius * kappa * kappa).powi(2)
}

/// `Υ(ρ) = max_x (|∫_0^x σ sin 2ρt| + |∫_0^x σ cos 2ρt|) + R²(1 + ϰ + Rϰ²)/(2|ρ|)`.
/// The maximum is taken on a uniform grid of at least 512 points, doubled
/// until it changes by less than 1e−8.
pub fn upsilon(sigma: &PotentialSpec, rho: Complex64, nu: f64, radius: f64) -> Result<f64> {
    if rho.im.abs() > nu {
        return Err(Error::InvalidArgument(format!("|Im ρ| = {} exceeds ν = {nu}", rho.im.abs())));
    }
    if rho.norm() == 0.0 {
        return Err(Error::InvalidArgument("ρ must be nonzero".into()));
    }
    let kappa = (2.0 * PI * nu).cosh();
    let tail = radius * radius * (1.0 + kappa + radius * kappa * kappa) / (2.0 * rho.norm());
    if sigma.is_zero() {
        return Ok(tail);
    }
    let w = 2.0 * rho;
    let at = |x: f64| {
        let p = exp_moment(sigma, w, 0.0, x);
        let m = exp_moment(sigma, -w, 0.0, x);
        let s = (p - m) / Complex64::new(0.0, 2.0);
        let c = (p + m) / 2.0;
        s.norm() + c.norm()
    };
    let max_on = |n: usize| (0..=n).map(|i| at(PI * i as f64 / n as f64)).fold(0.0, f64::max);
    let mut n = 512;
    let mut best = max_on(n);
    loop {
        n *= 2;
        let next = max_on(n);
        let done = (next - best).abs() < 1e-8 || n >= 1 << 16;
        best = best.max(next);
        if done {
            break;
        }
    }
    Ok(best + tail)
}

/// Result of the fixed-point construction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FixedPoint {
    pub angle: PruferAngle,
    pub iterations: usize,
    pub upsilon: f64,
    pub bound: f64,
    /// `max |f|` of the converged iterate.
    pub sup_f: f64,
}

/// The four parts of the integrand of `Φ(f)` at one point; `a = 2ρt`, `b = 2f`.
fn phi_parts(s: f64, rho: f64, t: f64, f: f64) -> [f64; 4] {
    let (sa, ca) = (2.0 * rho * t).sin_cos();
    let b = 2.0 * f;
    let (sb, cb) = b.sin_cos();
    let q = s * s / (2.0 * rho);
    [s * sa + q * (1.0 - ca), b * s * ca, s * ca * (sb - b) - s * sa * (1.0 - cb), q * ((1.0 - cb) * ca + sb * sa)]
}

/// Iterates `f_k = Φ(f_{k−1})` from zero. Requires real σ and ρ, `‖σ‖_{L₂} ≤ R`
/// and `Υ(ρ) < 2⁻⁷(1 + 64R²ϰ²)⁻²`.
pub fn fixed_point_theta(sigma: &PotentialSpec, rho: f64, nu: f64, radius: f64) -> Result<FixedPoint> {
    if !sigma.is_real() {
        return Err(Error::InvalidArgument("the fixed-point construction is implemented for real σ".into()));
    }
    let l2 = sigma.l2_norm();
    if radius < l2 * (1.0 - 1e-12) {
        return Err(Error::InvalidArgument(format!("R = {radius} is smaller than ‖σ‖ = {l2}")));
    }
    let ups = upsilon(sigma, rho.into(), nu, radius)?;
    let bound = admissibility_bound(nu, radius);
    if !(ups < bound) {
        return Err(Error::Inadmissible { upsilon: ups, bound });
    }
    let mut fp = fixed_point_iterate(sigma, rho)?;
    fp.upsilon = ups;
    fp.bound = bound;
    Ok(fp)
}

/// The same iteration without the admissibility gate. Outside the admissible
/// region convergence is not guaranteed, but it is often observed; the
/// iteration cap still applies. `upsilon` and `bound` are left at NaN.
pub fn fixed_point_iterate(sigma: &PotentialSpec, rho: f64) -> Result<FixedPoint> {
    if !sigma.is_real() || rho == 0.0 || !rho.is_finite() {
        return Err(Error::InvalidArgument("the fixed-point construction needs real σ and finite ρ ≠ 0".into()));
    }
    let max_len = (6.0 / (2.0 * rho.abs() + sigma.degree() as f64 + 1.0)).min(0.25);
    let panels = Panels::new(&sigma.breakpoints(), max_len, 24);
    let s: Vec<f64> = panels.sample(|piece, x| sigma.value_in(piece, x).re);
    let x = panels.nodes();
    let mut f = vec![0.0; x.len()];
    let mut iterations = 0;
    loop {
        iterations += 1;
        let integrand: Vec<f64> = (0..x.len()).map(|i| phi_parts(s[i], rho, x[i], f[i]).iter().sum()).collect();
        let next = panels.cumulative(&integrand);
        let change = next.iter().zip(&f).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        f = next;
        if change < STOP_CHANGE {
            break;
        }
        if iterations >= MAX_ITERATIONS {
            return Err(Error::NotConverged { what: "Prüfer fixed-point iteration", iterations });
        }
    }
    let log_r_rate: Vec<f64> = (0..x.len())
        .map(|i| {
            let (sn, cs) = (2.0 * (rho * x[i] + f[i])).sin_cos();
            -s[i] * cs - s[i] * s[i] / (2.0 * rho) * sn
        })
        .collect();
    let log_r = panels.cumulative(&log_r_rate);
    let mut angle = PruferAngle { rho, grid_x: vec![], theta_values: vec![], log_r_values: vec![] };
    for i in 0..x.len() {
        if angle.grid_x.last() == Some(&x[i]) {
            continue;
        }
        angle.grid_x.push(x[i]);
        angle.theta_values.push(rho * x[i] + f[i]);
        angle.log_r_values.push(log_r[i]);
    }
    let sup_f = f.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    Ok(FixedPoint { angle, iterations, upsilon: f64::NAN, bound: f64::NAN, sup_f })
}
#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parts_sum_to_full_integrand() {
        for &(s, rho, t, f) in &[(0.3, 5.0, 0.7, 0.01), (-1.2, 2.5, 2.9, -0.3), (0.0, 1.0, 1.0, 1.0)] {
            let sum: f64 = phi_parts(s, rho, t, f).iter().sum();
            let th = 2.0 * rho * t + 2.0 * f;
            let full = s * th.sin() + s * s / (2.0 * rho) * (1.0 - th.cos());
            assert!((sum - full).abs() < 1e-14);
        }
    }

    #[test]
    fn upsilon_examples() {
        let z = PotentialSpec::zero();
        assert_eq!(upsilon(&z, 10.0.into(), 0.0, 0.0).unwrap(), 0.0);
        assert!((upsilon(&z, 10.0.into(), 0.0, 1.0).unwrap() - 0.15).abs() < 1e-15);
        assert!(upsilon(&z, Complex64::new(10.0, 1.0), 0.5, 1.0).is_err());
    }

    #[test]
    fn zero_potential_converges_immediately() {
        let fp = fixed_point_theta(&PotentialSpec::zero(), 50.0, 0.0, 0.0).unwrap();
        assert_eq!(fp.iterations, 1);
        assert_eq!(fp.sup_f, 0.0);
    }

    #[test]
    fn large_potential_is_inadmissible() {
        let sigma = PotentialSpec::cosine(0.0, &[3.0]);
        let r = sigma.l2_norm();
        assert!(matches!(fixed_point_theta(&sigma, 2.0, 0.0, r), Err(Error::Inadmissible { .. })));
    }
}
