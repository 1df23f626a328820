//! Shooting solvers: the Prüfer angle (ODE and fixed-point forms), the
//! quasi-derivative system, and eigenvalue searches built on them.

mod angle;
mod fixed_point;
mod quasi;
mod search;

pub use angle::{prufer_integrate, prufer_integrate_on, PruferAngle};
pub use fixed_point::{admissibility_bound, fixed_point_iterate, fixed_point_theta, upsilon, FixedPoint, EPSILON};
pub use quasi::{characteristic_eigenvalues, quasi_derivative_solve, quasi_derivative_solve_with};
pub use search::{eigenvalue, eigenvalues, RESIDUAL_TOL};

use crate::moments::exp_moment;
use crate::potential::PotentialSpec;
use crate::spectrum::Spectrum;
use num_complex::Complex64;
use std::f64::consts::PI;

/// `F(ρ) = ∫_0^π σ(x) e^{iρx} dx`, in closed form.
pub fn fourier_f(sigma: &PotentialSpec, rho: Complex64) -> Complex64 {
    exp_moment(sigma, rho, 0.0, PI)
}

/// `max |F(ρ)|` over `Re ρ ∈ [t, t + 2]`, `|Im ρ| ≤ ν`, sampled on a 41 × 5 grid.
pub fn fourier_f_envelope(sigma: &PotentialSpec, t: f64, nu: f64) -> f64 {
    let mut best = 0.0f64;
    for i in 0..=40 {
        let re = t + 2.0 * i as f64 / 40.0;
        for j in 0..=4 {
            let im = if nu == 0.0 { 0.0 } else { -nu + 2.0 * nu * j as f64 / 4.0 };
            best = best.max(fourier_f(sigma, Complex64::new(re, im)).norm());
        }
    }
    best
}

/// True iff every `ρ_n` satisfies `|Im ρ_n| < 4 e^{2πR}`.
pub fn strip_check(spectrum: &Spectrum, radius: f64) -> bool {
    let width = 4.0 * (2.0 * PI * radius).exp();
    spectrum.rho.iter().all(|r| r.im.abs() < width)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::{BoundaryCondition, Method};

    #[test]
    fn fourier_transform_examples() {
        assert_eq!(fourier_f(&PotentialSpec::zero(), 3.0.into()), Complex64::default());
        assert!(fourier_f(&PotentialSpec::cosine(1.0, &[]), 2.0.into()).norm() < 1e-15);
        // ∫_0^π cos x e^{iρx} dx = iρ(1 + e^{iπρ})/(ρ² − 1)
        let rho = 10.5;
        let z = Complex64::new(0.0, rho);
        let want = z * (1.0 + (z * PI).exp()) / (rho * rho - 1.0);
        assert!((fourier_f(&PotentialSpec::cosine(0.0, &[1.0]), rho.into()) - want).norm() < 1e-14);
    }

    #[test]
    fn strip_examples() {
        let mut s =
            Spectrum::from_lambdas(BoundaryCondition::Dirichlet, Method::Prufer, vec![1.0.into()], vec![0.0], None);
        assert!(strip_check(&s, 0.0));
        s.rho[0] = Complex64::new(1.0, 5.0);
        assert!(!strip_check(&s, 0.0));
    }
}
