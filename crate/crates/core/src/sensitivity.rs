//! Eigenfunctions, the derivative of an eigenvalue with respect to σ, and the
//! distance of eigenfunctions from the free ones.
//!
//! Directions `h` live in σ-space: the perturbed potential is `σ + t h`, so in
//! terms of `q = σ'` the perturbation is `t h'`.

use crate::chebyshev::Panels;
use crate::error::{Error, Result};
use crate::ode::Dop853;
use crate::potential::{PotentialSpec, RealSigma};
use crate::prufer::eigenvalue;
use crate::spectrum::{BoundaryCondition, SpectralProblem};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// `y(0) = 0`, `y^{[1]}(0) = 1`.
    Shooting,
    /// `∫y² = π/2` and `y'(0) > 0`.
    UnitL2,
}

/// An eigenfunction sampled on composite Chebyshev–Lobatto nodes (panel ends
/// appear twice).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Eigenfunction {
    pub k: usize,
    pub bc: BoundaryCondition,
    pub lambda: f64,
    pub grid_x: Vec<f64>,
    pub y: Vec<f64>,
    /// `y^{[1]} = y' − σy`.
    pub y_quasi: Vec<f64>,
    pub normalization: Normalization,
}

impl Eigenfunction {
    /// `max |y(x) − sin ωx|` over the grid, `ω` the free frequency.
    pub fn gap(&self) -> f64 {
        let w = self.bc.frequency(self.k);
        self.grid_x.iter().zip(&self.y).map(|(&x, &y)| (y - (w * x).sin()).abs()).fold(0.0, f64::max)
    }
}

/// Quadrature panels fine enough for the oscillation at `λ` and aligned with
/// the break points of every listed potential.
fn panels_for(potentials: &[&PotentialSpec], lambda: f64) -> Panels {
    let mut breaks: Vec<f64> = potentials.iter().flat_map(|p| p.breakpoints()).collect();
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let freq = lambda.abs().sqrt();
    let degree = potentials.iter().map(|p| p.degree()).max().unwrap_or(0) as f64;
    Panels::new(&breaks, (6.0 / (2.0 * freq + degree + 1.0)).min(0.25), 24)
}

/// `(u, u^{[1]})` of the initial-value solution at every panel node.
fn solve_on(problem: &SpectralProblem, lambda: f64, panels: &Panels) -> Result<(Vec<f64>, Vec<f64>)> {
    let sigma = RealSigma::new(&problem.sigma)?;
    let mut ode = Dop853::new(problem.tolerance());
    let nodes = panels.nodes();
    let per = panels.points_per_panel();
    let mut u = Vec::with_capacity(nodes.len());
    let mut v = Vec::with_capacity(nodes.len());
    let mut state = [0.0, 1.0];
    let mut x = 0.0;
    for (i, &node) in nodes.iter().enumerate() {
        // Shared panel ends may differ in the last bit.
        let node = node.max(x);
        let (lo, hi) = panels.bounds(i / per);
        let piece = problem.sigma.piece_index(0.5 * (lo + hi));
        state = ode.integrate(
            |t, y: &[f64; 2]| {
                let s = sigma.value(piece, t);
                [s * y[0] + y[1], -(lambda + s * s) * y[0] - s * y[1]]
            },
            x,
            state,
            node,
            |_, _| {},
        )?;
        x = node;
        u.push(state[0]);
        v.push(state[1]);
    }
    Ok((u, v))
}

fn real_problem(problem: &SpectralProblem) -> Result<()> {
    if !problem.sigma.is_real() {
        return Err(Error::InvalidArgument("eigenfunctions are computed for real σ only".into()));
    }
    Ok(())
}

/// The `k`-th eigenfunction at a known eigenvalue.
pub fn eigenfunction_at(
    problem: &SpectralProblem,
    k: usize,
    lambda: f64,
    normalization: Normalization,
) -> Result<Eigenfunction> {
    real_problem(problem)?;
    let panels = panels_for(&[&problem.sigma], lambda);
    let (mut y, mut y_quasi) = solve_on(problem, lambda, &panels)?;
    if normalization == Normalization::UnitL2 {
        let sq: Vec<f64> = y.iter().map(|u| u * u).collect();
        // y'(0) = y^{[1]}(0) = 1 > 0 already; only the size changes.
        let c = (0.5 * PI / panels.integral(&sq)).sqrt();
        y.iter_mut().chain(y_quasi.iter_mut()).for_each(|v| *v *= c);
    }
    Ok(Eigenfunction { k, bc: problem.bc, lambda, grid_x: panels.nodes().to_vec(), y, y_quasi, normalization })
}

/// The `k`-th eigenfunction (`k ≥ 1`).
pub fn eigenfunction(problem: &SpectralProblem, k: usize, normalization: Normalization) -> Result<Eigenfunction> {
    real_problem(problem)?;
    let lambda = eigenvalue(problem, k)?;
    eigenfunction_at(problem, k, lambda, normalization)
}

/// `dλ_k[h]` and the matching change `ds = ½ λ_k^{−1/2} dλ_k` of the
/// square-rooted eigenvalue (absent when `λ_k ≤ 0`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenvalueDerivative {
    pub k: usize,
    pub lambda: f64,
    pub d_lambda: f64,
    pub d_s: Option<f64>,
}

/// `dλ_k[h] = −2 ∫h y y' / ∫y²` on the shooting eigenfunction, with
/// `y' = y^{[1]} + σy`.
pub fn eigenvalue_derivative(problem: &SpectralProblem, h: &PotentialSpec, k: usize) -> Result<EigenvalueDerivative> {
    real_problem(problem)?;
    if !h.is_real() {
        return Err(Error::InvalidArgument("the direction h must be real".into()));
    }
    let lambda = eigenvalue(problem, k)?;
    let panels = panels_for(&[&problem.sigma, h], lambda);
    let (u, v) = solve_on(problem, lambda, &panels)?;
    let per = panels.points_per_panel();
    let mut num = Vec::with_capacity(u.len());
    let mut den = Vec::with_capacity(u.len());
    let mut peak = 0.0f64;
    for (i, &x) in panels.nodes().iter().enumerate() {
        let (lo, hi) = panels.bounds(i / per);
        let mid = 0.5 * (lo + hi);
        let s = problem.sigma.value_in(problem.sigma.piece_index(mid), x).re;
        let hv = h.value_in(h.piece_index(mid), x).re;
        let dy = v[i] + s * u[i];
        num.push(hv * u[i] * dy);
        den.push(u[i] * u[i]);
        peak = peak.max(u[i].abs());
    }
    let norm = panels.integral(&den);
    // Scale-free: compare against the norm of a function of the same height.
    let ratio = norm / (PI * peak * peak);
    if !(ratio >= 1e-8) {
        return Err(Error::NearDegenerate(ratio));
    }
    let d_lambda = -2.0 * panels.integral(&num) / norm;
    let d_s = (lambda > 0.0).then(|| 0.5 * d_lambda / lambda.sqrt());
    Ok(EigenvalueDerivative { k, lambda, d_lambda, d_s })
}

/// Relative gap between the analytic derivative and the central difference
/// `(λ_k(σ + th) − λ_k(σ − th)) / (2t)`, measured against `max(1, |dλ_k|)`.
pub fn fd_check(problem: &SpectralProblem, h: &PotentialSpec, k: usize, t: f64) -> Result<f64> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidArgument(format!("step t must be positive (got {t})")));
    }
    if h.is_zero() {
        return Ok(0.0);
    }
    let analytic = eigenvalue_derivative(problem, h, k)?.d_lambda;
    let shifted = |s: f64| -> Result<f64> {
        let p = SpectralProblem { sigma: problem.sigma.combine(1.0, h, s)?, ..problem.clone() };
        eigenvalue(&p, k)
    };
    let fd = (shifted(t)? - shifted(-t)?) / (2.0 * t);
    Ok((analytic - fd).abs() / analytic.abs().max(1.0))
}

/// `max_x |y_k − sin ω_k x|` (unit-L² normalization) for each `k` in `ks`.
pub fn asymptotic_gap(problem: &SpectralProblem, ks: &[usize]) -> Result<Vec<f64>> {
    ks.iter().map(|&k| Ok(eigenfunction(problem, k, Normalization::UnitL2)?.gap())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dirichlet(sigma: PotentialSpec) -> SpectralProblem {
        SpectralProblem::new(sigma, BoundaryCondition::Dirichlet)
    }

    #[test]
    fn free_eigenfunctions_are_sines() {
        let f = eigenfunction(&dirichlet(PotentialSpec::zero()), 2, Normalization::UnitL2).unwrap();
        assert!(f.gap() < 1e-10);
        let dn = SpectralProblem::new(PotentialSpec::zero(), BoundaryCondition::DirichletNeumann);
        assert!(asymptotic_gap(&dn, &[1, 3, 7]).unwrap().iter().all(|&g| g < 1e-10));
        // Shooting normalization: y = sin(2x)/2.
        let f = eigenfunction(&dirichlet(PotentialSpec::zero()), 2, Normalization::Shooting).unwrap();
        for (x, y) in f.grid_x.iter().zip(&f.y) {
            assert!((y - (2.0 * x).sin() / 2.0).abs() < 1e-10);
        }
    }

    #[test]
    fn constant_shift_keeps_eigenfunctions() {
        let f = eigenfunction(&dirichlet(PotentialSpec::constant_q(1.0)), 1, Normalization::UnitL2).unwrap();
        assert!((f.lambda - 2.0).abs() < 1e-9);
        assert!(f.gap() < 1e-9, "{}", f.gap());
    }

    #[test]
    fn derivative_at_zero_potential() {
        let p = dirichlet(PotentialSpec::zero());
        let d = eigenvalue_derivative(&p, &PotentialSpec::sine(&[0.0, 1.0]), 1).unwrap();
        assert!((d.d_lambda + 1.0).abs() < 1e-10, "{}", d.d_lambda);
        assert!((d.d_s.unwrap() + 0.5).abs() < 1e-10);
        // y y' = ½ sin 2x and ∫cos x sin 2x = 4/3.
        let d = eigenvalue_derivative(&p, &PotentialSpec::cosine(0.0, &[1.0]), 1).unwrap();
        assert!((d.d_lambda + 8.0 / (3.0 * PI)).abs() < 1e-10, "{}", d.d_lambda);
        // Orthogonal direction.
        let d = eigenvalue_derivative(&p, &PotentialSpec::sine(&[1.0]), 1).unwrap();
        assert!(d.d_lambda.abs() < 1e-12);
        assert_eq!(fd_check(&p, &PotentialSpec::zero(), 1, 1e-4).unwrap(), 0.0);
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let smooth =
            PotentialSpec::cosine(0.2, &[0.3, -0.1]).combine(1.0, &PotentialSpec::sine(&[0.5, 0.0, 0.2]), 1.0).unwrap();
        let h =
            PotentialSpec::sine(&[0.1, -0.4]).combine(1.0, &PotentialSpec::cosine(0.0, &[0.0, 0.0, 0.7]), 1.0).unwrap();
        let p = dirichlet(smooth).with_tolerances(1e-13, 1e-13).unwrap();
        let err = fd_check(&p, &h, 3, 1e-4).unwrap();
        assert!(err < 1e-5, "{err}");
        let kinked = PotentialSpec::piecewise_linear(vec![0.0, 1.0, 2.5, PI], vec![0.3, -0.2, 0.5, 0.1]).unwrap();
        let p = SpectralProblem::new(PotentialSpec::constant_q(1.0), BoundaryCondition::DirichletNeumann);
        let err = fd_check(&p.with_tolerances(1e-13, 1e-13).unwrap(), &kinked, 2, 1e-4).unwrap();
        assert!(err < 1e-5, "{err}");
    }
}
