//! Eigenvalue search on the Prüfer angle: the `n`-th Dirichlet eigenvalue is
//! the root of `θ(π, ρ) = πn`, the `n`-th Dirichlet–Neumann eigenvalue the
//! root of `θ(π, ρ) = π(n − ½)`.
//!
//! The angle crosses multiples of π/2 only upwards as ρ grows, so
//! `θ(π, ρ) − target` changes sign exactly once and bracketing is safe.

use super::angle::{theta_at_pi, theta_at_pi_on_mesh, theta_mesh};
use super::quasi::characteristic_eigenvalue;
use crate::error::{Error, Result};
use crate::ode::Tolerance;
use crate::potential::RealSigma;
use crate::roots::brent;
use crate::sequence::apply_t;
use crate::spectrum::{BoundaryCondition, Method, SpectralProblem, Spectrum};
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

/// Largest admissible residual `|θ(π, ρ_n) − target|`.
pub const RESIDUAL_TOL: f64 = 1e-10;

/// Below this ρ the angle is not used; such eigenvalues (λ ≤ ρ_MIN²) are
/// delegated to the characteristic-function solver.
const RHO_MIN: f64 = 1e-2;

struct Search<'a> {
    sigma: &'a RealSigma,
    bc: BoundaryCondition,
    tol: Tolerance,
    sup: f64,
}

enum Found {
    Rho(f64, f64),
    /// λ_n ≤ ρ_MIN²: needs the characteristic solver.
    Low,
}

impl Search<'_> {
    fn g(&self, rho: f64, target: f64) -> Result<f64> {
        Ok(theta_at_pi(self.sigma, rho, self.tol)? - target)
    }

    fn find(&self, n: usize, guess: f64) -> Result<Found> {
        let target = PI * self.bc.frequency(n);
        let rho_max = (2.0 * (n * n) as f64 + 2.0 * self.sup * self.sup).sqrt() + 1.0;
        let mut a = guess.clamp(RHO_MIN, rho_max);
        let mut ga = self.g(a, target)?;
        if ga == 0.0 {
            return Ok(Found::Rho(a, 0.0));
        }
        // Walk towards the root, doubling the stride, until the sign flips.
        let mut stride = (ga.abs() / PI * 1.1).max(1e-3);
        let (lo, hi) = loop {
            let up = ga < 0.0;
            let b = if up { (a + stride).min(rho_max) } else { (a - stride).max(RHO_MIN) };
            let gb = self.g(b, target)?;
            if gb == 0.0 {
                return Ok(Found::Rho(b, 0.0));
            }
            if gb.signum() != ga.signum() {
                break if up { (a, b) } else { (b, a) };
            }
            if !up && b == RHO_MIN {
                return Ok(Found::Low);
            }
            if up && b == rho_max {
                return Err(Error::BracketNotFound {
                    index: n,
                    reason: format!("θ(π, ρ) stays below the target up to ρ = {rho_max:.3}"),
                });
            }
            a = b;
            ga = gb;
            stride *= 2.0;
        };
        // Refine on a mesh frozen at the upper end of the bracket, where the
        // solution oscillates fastest: adaptive step selection would make
        // θ(π, ·) jump at the level of the integration tolerance.
        let meshes = theta_mesh(self.sigma, hi, self.tol)?;

        let g = |r: f64| Ok(theta_at_pi_on_mesh(self.sigma, r, &meshes) - target);
        let (glo, ghi) = (g(lo)?, g(hi)?);
        if glo.signum() == ghi.signum() {
            return Err(Error::BracketNotFound { index: n, reason: "bracket lost on the frozen mesh".into() });
        }
        let xtol = 4.0 * f64::EPSILON * hi;
        let (rho, resid) = brent(g, lo, hi, glo, ghi, xtol, 1e-14, 200)?;
        if resid.abs() > RESIDUAL_TOL {
            return Err(Error::NotConverged { what: "Prüfer root refinement", iterations: 200 });
        }
        Ok(Found::Rho(rho, resid.abs()))
    }
}

/// The first `n_max` eigenvalues, searched on the Prüfer angle. Real σ only.
pub fn eigenvalues(problem: &SpectralProblem, n_max: usize) -> Result<Spectrum> {
    let sigma = RealSigma::new(&problem.sigma)?;
    let search = Search { sigma: &sigma, bc: problem.bc, tol: problem.tolerance(), sup: problem.sigma.sup_bound() };
    // First-order guess ρ_n ≈ ω_n − b_k/2 with b the sine coefficients of σ.
    let b = apply_t(&problem.sigma, 2 * n_max).values;
    let results: Vec<Result<(Complex64, f64)>> = (1..=n_max)
        .into_par_iter()
        .map(|n| {
            let k = problem.bc.interleaved_index(n);
            let guess = problem.bc.frequency(n) - 0.5 * b[k - 1].re;
            match search.find(n, guess)? {
                Found::Rho(rho, resid) => Ok(((rho * rho).into(), resid)),
                Found::Low => {
                    let (l, r) = characteristic_eigenvalue(&sigma, search.sup, problem.bc, n, search.tol)?;
                    Ok((l.into(), r))
                }
            }
        })
        .collect();
    let mut lambda = Vec::with_capacity(n_max);
    let mut residuals = Vec::with_capacity(n_max);
    for r in results {
        let (l, res) = r?;
        lambda.push(l);
        residuals.push(res);
    }
    for i in 1..lambda.len() {
        if lambda[i].re <= lambda[i - 1].re {
            return Err(Error::DuplicateRoot(i, i + 1));
        }
    }
    Ok(Spectrum::from_lambdas(problem.bc, Method::Prufer, lambda, residuals, None))
}

/// A single eigenvalue λ_n by the Prüfer search.
pub fn eigenvalue(problem: &SpectralProblem, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidArgument("eigenvalues are numbered from 1".into()));
    }
    let sigma = RealSigma::new(&problem.sigma)?;
    let search = Search { sigma: &sigma, bc: problem.bc, tol: problem.tolerance(), sup: problem.sigma.sup_bound() };
    let k = problem.bc.interleaved_index(n);
    let b = apply_t(&problem.sigma, k).values;
    match search.find(n, problem.bc.frequency(n) - 0.5 * b[k - 1].re)? {
        Found::Rho(rho, _) => Ok(rho * rho),
        Found::Low => Ok(characteristic_eigenvalue(&sigma, search.sup, problem.bc, n, search.tol)?.0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::PotentialSpec;

    #[test]
    fn free_spectra() {
        for bc in [BoundaryCondition::Dirichlet, BoundaryCondition::DirichletNeumann] {
            let s = eigenvalues(&SpectralProblem::new(PotentialSpec::zero(), bc), 10).unwrap();
            for (n, l) in s.lambda.iter().enumerate() {
                let w = bc.frequency(n + 1);
                assert!((l.re - w * w).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn constant_potential_shift() {
        let s = eigenvalues(&SpectralProblem::new(PotentialSpec::constant_q(1.0), BoundaryCondition::Dirichlet), 5)
            .unwrap();
        assert!((s.rho[0].re - 2f64.sqrt()).abs() < 1e-10);
        for (n, l) in s.lambda.iter().enumerate() {
            assert!((l.re - ((n + 1) * (n + 1)) as f64 - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn strongly_negative_potential_uses_fallback() {
        let p = SpectralProblem::new(PotentialSpec::constant_q(-3.0), BoundaryCondition::DirichletNeumann);
        let s = eigenvalues(&p, 4).unwrap();
        for (n, l) in s.lambda.iter().enumerate() {
            let w = n as f64 + 0.5;
            assert!((l.re - (w * w - 3.0)).abs() < 1e-8, "{l}");
        }
        assert!(s.rho[0].im > 0.0 && s.rho[0].re == 0.0);
    }
}
