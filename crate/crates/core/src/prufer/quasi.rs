//! The first-order quasi-derivative system `u' = σu + v`,
//! `v' = −(λ + σ²)u − σv`, `u(0) = 0`, `v(0) = 1`, and an eigenvalue solver
//! built on it that does not use the Prüfer angle at all: eigenvalues are
//! isolated by Sturm zero counting and polished on the characteristic
//! functions `u(π, λ)` / `v(π, λ)`.

use crate::error::{Error, Result};
use crate::ode::{Dop853, Tolerance};
use crate::potential::{PotentialSpec, RealSigma};
use crate::roots::brent;
use crate::spectrum::{BoundaryCondition, Method, SpectralProblem, Spectrum};
use num_complex::Complex64;

/// `(u(π), u^{[1]}(π))` for the given λ. Complex σ and λ are allowed.
pub fn quasi_derivative_solve(sigma: &PotentialSpec, lambda: Complex64) -> Result<(Complex64, Complex64)> {
    quasi_derivative_solve_with(sigma, lambda, Tolerance::default())
}

pub fn quasi_derivative_solve_with(
    sigma: &PotentialSpec,
    lambda: Complex64,
    tol: Tolerance,
) -> Result<(Complex64, Complex64)> {
    if sigma.is_real() && lambda.im == 0.0 {
        let sig = RealSigma::new(sigma)?;
        let shot = shoot(&sig, lambda.re, tol)?;
        return Ok((shot.u.into(), shot.v.into()));
    }
    let mut ode = Dop853::new(tol);
    let mut y = [0.0, 0.0, 1.0, 0.0];
    let breaks = sigma.breakpoints();
    for (piece, w) in breaks.windows(2).enumerate() {
        y = ode.integrate(
            |x, y: &[f64; 4]| {
                let s = sigma.value_in(piece, x);
                let u = Complex64::new(y[0], y[1]);
                let v = Complex64::new(y[2], y[3]);
                let du = s * u + v;
                let dv = -(lambda + s * s) * u - s * v;
                [du.re, du.im, dv.re, dv.im]
            },
            w[0],
            y,
            w[1],
            |_, _| {},
        )?;
    }
    Ok((Complex64::new(y[0], y[1]), Complex64::new(y[2], y[3])))
}

/// Solution values at π and the number of sign changes of `u` on `(0, π]`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Shot {
    pub u: f64,
    pub v: f64,
    pub zeros: usize,
}

pub(crate) fn shoot(sigma: &RealSigma, lambda: f64, tol: Tolerance) -> Result<Shot> {
    shoot_observed(sigma, lambda, tol, |_, _| {})
}

/// As [`shoot`], additionally reporting every accepted step `(x, [u, v])`.
pub(crate) fn shoot_observed(
    sigma: &RealSigma,
    lambda: f64,
    tol: Tolerance,
    mut observe: impl FnMut(f64, &[f64; 2]),
) -> Result<Shot> {
    let mut ode = Dop853::new(tol);
    let mut y = [0.0, 1.0];
    // u'(0) = 1 > 0, so u starts out positive.
    let mut sign = 1.0;
    let mut zeros = 0;
    for (piece, &(a, b)) in sigma.pieces().iter().enumerate() {
        y = ode.integrate(
            |x, y: &[f64; 2]| {
                let s = sigma.value(piece, x);
                [s * y[0] + y[1], -(lambda + s * s) * y[0] - s * y[1]]
            },
            a,
            y,
            b,
            |x, y| {
                if y[0] != 0.0 && y[0].signum() != sign {
                    zeros += 1;
                    sign = y[0].signum();
                }
                observe(x, y);
            },
        )?;
    }
    Ok(Shot { u: y[0], v: y[1], zeros })
}

/// Number of eigenvalues of the given kind strictly below λ (λ itself not an
/// eigenvalue).
fn count_below(bc: BoundaryCondition, shot: &Shot) -> usize {
    match bc {
        BoundaryCondition::Dirichlet => shot.zeros,
        // The Prüfer angle at π lies in (Zπ, Zπ + π/2) when u·v > 0 and in
        // (Zπ + π/2, (Z+1)π) when u·v < 0.
        BoundaryCondition::DirichletNeumann => shot.zeros + usize::from(shot.u * shot.v < 0.0),
    }
}

fn characteristic(bc: BoundaryCondition, shot: &Shot) -> f64 {
    match bc {
        BoundaryCondition::Dirichlet => shot.u,
        BoundaryCondition::DirichletNeumann => shot.v,
    }
}

/// Eigenvalue bounds valid for real σ with `|σ| ≤ m`: all eigenvalues lie above
/// `−m²`, and the `n`-th lies below `2n² + 2m²`.
pub(crate) fn eigenvalue_bounds(sup: f64, n: usize) -> (f64, f64) {
    (-sup * sup - 1.0, 2.0 * (n * n) as f64 + 2.0 * sup * sup + 1.0)
}

/// The `n`-th eigenvalue of the given kind, by zero counting and Brent's method.
pub(crate) fn characteristic_eigenvalue(
    sig: &RealSigma,
    sup: f64,
    bc: BoundaryCondition,
    n: usize,
    tol: Tolerance,
) -> Result<(f64, f64)> {
    let (mut lo, mut hi) = eigenvalue_bounds(sup, n);
    let mut c_hi = count_below(bc, &shoot(sig, hi, tol)?);
    let mut grow = 0;
    while c_hi < n {
        grow += 1;
        if grow > 20 {
            return Err(Error::BracketNotFound { index: n, reason: "zero count never reaches the index".into() });
        }
        lo = hi;
        hi *= 2.0;
        c_hi = count_below(bc, &shoot(sig, hi, tol)?);
    }
    // Bisect until exactly the n-th eigenvalue lies in (lo, hi].
    let mut c_lo = if grow == 0 { 0 } else { count_below(bc, &shoot(sig, lo, tol)?) };
    for _ in 0..200 {
        if c_lo == n - 1 && c_hi == n {
            break;
        }
        if hi - lo <= 1e-13 * hi.abs().max(1.0) {
            return Err(Error::DuplicateRoot(n, n + 1));
        }
        let mid = 0.5 * (lo + hi);
        let c = count_below(bc, &shoot(sig, mid, tol)?);
        if c >= n {
            hi = mid;
            c_hi = c;
        } else {
            lo = mid;
            c_lo = c;
        }
    }
    let f_lo = characteristic(bc, &shoot(sig, lo, tol)?);
    let f_hi = characteristic(bc, &shoot(sig, hi, tol)?);
    let xtol = 4.0 * f64::EPSILON * hi.abs().max(1.0);
    let (lambda, resid) = brent(|l| Ok(characteristic(bc, &shoot(sig, l, tol)?)), lo, hi, f_lo, f_hi, xtol, 0.0, 200)?;
    Ok((lambda, resid.abs()))
}

/// First `n_max` eigenvalues by the characteristic-function route.
pub fn characteristic_eigenvalues(problem: &SpectralProblem, n_max: usize) -> Result<Spectrum> {
    let sig = RealSigma::new(&problem.sigma)?;
    let sup = problem.sigma.sup_bound();
    let tol = problem.tolerance();
    let mut lambda = Vec::with_capacity(n_max);
    let mut residuals = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let (l, r) = characteristic_eigenvalue(&sig, sup, problem.bc, n, tol)?;
        if let Some(&prev) = lambda.last() {
            if l <= prev {
                return Err(Error::DuplicateRoot(n - 1, n));
            }
        }
        lambda.push(l);
        residuals.push(r);
    }
    Ok(Spectrum::from_lambdas(
        problem.bc,
        Method::Characteristic,
        lambda.into_iter().map(Into::into).collect(),
        residuals,
        None,
    ))
}
