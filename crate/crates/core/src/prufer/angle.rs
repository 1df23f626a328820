//! The modified Prüfer angle `ρu = r sin θ`, `u^{[1]} = r cos θ`, integrated as
//! an ODE. The smooth part `ρx` is split off and only `f = θ − ρx` is
//! integrated, which keeps the state small and the tolerances meaningful.

use crate::error::{Error, Result};
use crate::ode::{integrate_mesh, Dop853, Tolerance};
use crate::potential::{PotentialSpec, RealSigma};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Prüfer angle and log-amplitude sampled on a grid covering `[0, π]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PruferAngle {
    pub rho: f64,
    pub grid_x: Vec<f64>,
    pub theta_values: Vec<f64>,
    pub log_r_values: Vec<f64>,
}

impl PruferAngle {
    pub fn theta_at_pi(&self) -> f64 {
        *self.theta_values.last().expect("non-empty grid")
    }
}

/// `f' = σ sin 2θ + (σ²/ρ) sin²θ` with `θ = ρx + f`.
#[inline]
fn angle_rhs(s: f64, rho: f64, x: f64, f: f64) -> f64 {
    let (sn, cs) = (rho * x + f).sin_cos();
    2.0 * s * sn * cs + s * s / rho * sn * sn
}

/// `(log r)' = −σ cos 2θ − (σ²/(2ρ)) sin 2θ`.
#[inline]
fn log_r_rhs(s: f64, rho: f64, x: f64, f: f64) -> f64 {
    let (sn, cs) = (2.0 * (rho * x + f)).sin_cos();
    -s * cs - s * s / (2.0 * rho) * sn
}

/// θ(π, ρ) only; the inner loop of the eigenvalue search.
pub(crate) fn theta_at_pi(sigma: &RealSigma, rho: f64, tol: Tolerance) -> Result<f64> {
    let mut ode = Dop853::new(tol);
    let mut f = 0.0;
    for (piece, &(a, b)) in sigma.pieces().iter().enumerate() {
        f = ode.integrate(|x, y: &[f64; 1]| [angle_rhs(sigma.value(piece, x), rho, x, y[0])], a, [f], b, |_, _| {})?[0];
    }
    Ok(rho * PI + f)
}

/// The step points an adaptive solve of θ(·, ρ) accepts, one mesh per piece
/// of σ (each starting at the left end of its piece).
pub(crate) fn theta_mesh(sigma: &RealSigma, rho: f64, tol: Tolerance) -> Result<Vec<Vec<f64>>> {
    let mut ode = Dop853::new(tol);
    let mut f = 0.0;
    let mut meshes = Vec::with_capacity(sigma.pieces().len());
    for (piece, &(a, b)) in sigma.pieces().iter().enumerate() {
        let mut mesh = vec![a];
        let rhs = |x: f64, y: &[f64; 1]| [angle_rhs(sigma.value(piece, x), rho, x, y[0])];
        f = ode.integrate(rhs, a, [f], b, |x, _| mesh.push(x))?[0];
        meshes.push(mesh);
    }
    Ok(meshes)
}

/// θ(π, ρ) on frozen meshes from [`theta_mesh`]; smooth in ρ.
pub(crate) fn theta_at_pi_on_mesh(sigma: &RealSigma, rho: f64, meshes: &[Vec<f64>]) -> f64 {
    let mut f = 0.0;
    for (piece, mesh) in meshes.iter().enumerate() {
        f = integrate_mesh(|x, y: &[f64; 1]| [angle_rhs(sigma.value(piece, x), rho, x, y[0])], mesh, [f])[0];
    }
    rho * PI + f
}

/// Integrates the Prüfer system with the default tolerances and reports it on
/// 513 equally spaced points.
pub fn prufer_integrate(sigma: &PotentialSpec, rho: f64) -> Result<PruferAngle> {
    let grid: Vec<f64> = (0..=512).map(|i| PI * i as f64 / 512.0).collect();
    prufer_integrate_on(sigma, rho, &grid, Tolerance::default())
}

/// Integrates the Prüfer system and reports θ and log r at the ascending
/// points `grid` (which must lie in `[0, π]`).
pub fn prufer_integrate_on(sigma: &PotentialSpec, rho: f64, grid: &[f64], tol: Tolerance) -> Result<PruferAngle> {
    if rho == 0.0 || !rho.is_finite() {
        return Err(Error::InvalidArgument(format!("ρ must be finite and nonzero (got {rho})")));
    }
    if grid.windows(2).any(|w| w[1] < w[0]) || grid.iter().any(|&x| !(0.0..=PI).contains(&x)) {
        return Err(Error::InvalidArgument("grid must be ascending inside [0, π]".into()));
    }
    let sig = RealSigma::new(sigma)?;
    let mut ode = Dop853::new(tol);
    let mut state = [0.0, 0.0];
    let mut x = 0.0;
    let mut out = PruferAngle { rho, grid_x: Vec::new(), theta_values: Vec::new(), log_r_values: Vec::new() };
    let mut next = 0;
    let record = |x: f64, s: &[f64; 2], out: &mut PruferAngle| {
        out.grid_x.push(x);
        out.theta_values.push(rho * x + s[0]);
        out.log_r_values.push(s[1]);
    };
    while next < grid.len() && grid[next] == 0.0 {
        record(0.0, &state, &mut out);
        next += 1;
    }
    for (piece, &(_, b)) in sig.pieces().iter().enumerate() {
        let rhs = |x: f64, y: &[f64; 2]| {
            let s = sig.value(piece, x);
            [angle_rhs(s, rho, x, y[0]), log_r_rhs(s, rho, x, y[0])]
        };
        while next < grid.len() && grid[next] <= b {
            let target = grid[next];
            state = ode.integrate(rhs, x, state, target, |_, _| {})?;
            x = target;
            record(x, &state, &mut out);
            next += 1;
        }
        state = ode.integrate(rhs, x, state, b, |_, _| {})?;
        x = b;
    }
    Ok(out)
}
