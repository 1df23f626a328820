//! Remainder sequences `s_k` of the square-rooted eigenvalues and the
//! quantities built from them.

use crate::error::{Error, Result};
use crate::potential::PotentialSpec;
use crate::sequence::{apply_t, default_window, hat_decompose, hat_norm, tau_of_theta, HatElement};
use crate::spectrum::{principal_sqrt, BoundaryCondition, Spectrum};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// `s_{2j−1} = √μ_j − (j − ½)`, `s_{2j} = √λ_j − j`, for `k = 1..=2n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RemainderSeq {
    pub s_values: Vec<Complex64>,
    pub theta: f64,
}

impl RemainderSeq {
    pub fn len(&self) -> usize {
        self.s_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s_values.is_empty()
    }

    /// `s_k`, 1-based.
    pub fn get(&self, k: usize) -> Complex64 {
        self.s_values[k - 1]
    }
}

fn check_kind(spec: &Spectrum, bc: BoundaryCondition) -> Result<()> {
    if spec.bc != bc {
        return Err(Error::InvalidArgument(format!("expected a {} spectrum, got {}", bc.name(), spec.bc.name())));
    }
    Ok(())
}

/// Interleaves a Dirichlet and a Dirichlet–Neumann spectrum of equal length.
pub fn remainders(spec_d: &Spectrum, spec_dn: &Spectrum, theta: f64) -> Result<RemainderSeq> {
    check_kind(spec_d, BoundaryCondition::Dirichlet)?;
    check_kind(spec_dn, BoundaryCondition::DirichletNeumann)?;
    if spec_d.len() != spec_dn.len() {
        return Err(Error::LengthMismatch(spec_d.len(), spec_dn.len()));
    }
    let mut s = Vec::with_capacity(2 * spec_d.len());
    for j in 1..=spec_d.len() {
        s.push(principal_sqrt(spec_dn.lambda[j - 1]) - (j as f64 - 0.5));
        s.push(principal_sqrt(spec_d.lambda[j - 1]) - j as f64);
    }
    Ok(RemainderSeq { s_values: s, theta })
}

/// `Φ_k = s_k + ½ b_k` with `b = Tσ`.
pub fn phi_of_sigma(sigma: &PotentialSpec, r: &RemainderSeq) -> Vec<Complex64> {
    let b = apply_t(sigma, r.len()).values;
    r.s_values.iter().zip(&b).map(|(s, b)| s + 0.5 * b).collect()
}

/// Decomposition of Φ in the extended space of index `τ(θ)`, fitted on the
/// default window.
pub fn phi_hat(sigma: &PotentialSpec, r: &RemainderSeq, theta: f64) -> Result<HatElement> {
    let phi = phi_of_sigma(sigma, r);
    let (lo, hi) = default_window(phi.len());
    hat_decompose(&phi, tau_of_theta(theta), lo, hi)
}

/// `‖Φ(σ)‖` in the extended space of index `τ(θ)`.
pub fn phi_hat_norm(sigma: &PotentialSpec, r: &RemainderSeq, theta: f64) -> Result<f64> {
    Ok(hat_norm(&phi_hat(sigma, r, theta)?))
}

/// Trigonometric coefficient `a_p = (2/π)∫ q cos pt` of `q = σ'`, written
/// through σ so that no derivative is taken:
/// `a_p = (2/π)[σ(π) cos pπ − σ(0) + p ∫σ sin pt]`.
pub(crate) fn q_cos_coefficient(sigma: &PotentialSpec, p: usize) -> Complex64 {
    let (s0, spi) = sigma.endpoints();
    let sign = if p.is_multiple_of(2) { 1.0 } else { -1.0 };
    let b = apply_t_single(sigma, p);
    (2.0 / PI) * (spi * sign - s0) + p as f64 * b
}

/// `(2/π)∫σ sin pt` for one `p`.
fn apply_t_single(sigma: &PotentialSpec, p: usize) -> Complex64 {
    (2.0 / PI) * crate::moments::sin_moment(sigma, 0, p as f64, 0.0, PI)
}

/// `α_{2k} = k²(s_{2k} − h₁/(2k) + a_{2k}/(4k))` and
/// `α_{2k−1} = k²(s_{2k−1} − g₁/(2k−1) + a_{2k−1}/(2(2k−1)))`, with
/// `h₁ = (σ(π) − σ(0))/π`, `g₁ = −(σ(0) + σ(π))/π`.
pub fn thm41_alphas(sigma: &PotentialSpec, spec_d: &Spectrum, spec_dn: &Spectrum) -> Result<Vec<Complex64>> {
    if let PotentialSpec::PiecewiseLinear(p) = sigma {
        if p.has_jumps() {
            return Err(Error::InsufficientSmoothness("σ has jumps, so q is not in L₂".into()));
        }
    }
    let r = remainders(spec_d, spec_dn, 1.0)?;
    let (s0, spi) = sigma.endpoints();
    let h1 = (spi - s0) / PI;
    let g1 = -(s0 + spi) / PI;
    let mut alpha = Vec::with_capacity(r.len());
    for k in 1..=spec_d.len() {
        let kf = k as f64;
        let odd = 2 * k - 1;
        let of = odd as f64;
        let a_odd = q_cos_coefficient(sigma, odd);
        alpha.push(kf * kf * (r.get(odd) - g1 / of + a_odd / (2.0 * of)));
        let a_even = q_cos_coefficient(sigma, 2 * k);
        alpha.push(kf * kf * (r.get(2 * k) - h1 / (2.0 * kf) + a_even / (4.0 * kf)));
    }
    Ok(alpha)
}

/// Least-squares fit of `log|x_k|` against `log k` over `k ∈ [k_lo, k_hi]`
/// (1-based, zero entries skipped). Returns `(slope, intercept)`.
pub fn rate_fit(seq: &[Complex64], k_lo: usize, k_hi: usize) -> Result<(f64, f64)> {
    let mags: Vec<f64> = seq.iter().map(|v| v.norm()).collect();
    rate_fit_real(&mags, k_lo, k_hi)
}

/// [`rate_fit`] on magnitudes.
pub fn rate_fit_real(seq: &[f64], k_lo: usize, k_hi: usize) -> Result<(f64, f64)> {
    let points: Vec<(f64, f64)> = (k_lo.max(1)..=k_hi.min(seq.len()))
        .filter(|&k| seq[k - 1] != 0.0 && seq[k - 1].is_finite())
        .map(|k| (k as f64, seq[k - 1].abs()))
        .collect();
    if k_hi < k_lo + 10 {
        return Err(Error::DegenerateFit(format!("window [{k_lo}, {k_hi}] is shorter than 10")));
    }
    rate_fit_points(&points)
}

/// Fit of `log|y|` against `log x` for arbitrary sample points.
pub fn rate_fit_points(points: &[(f64, f64)]) -> Result<(f64, f64)> {
    let pts: Vec<(f64, f64)> =
        points.iter().filter(|(x, y)| *x > 0.0 && *y != 0.0).map(|&(x, y)| (x.ln(), y.abs().ln())).collect();
    if pts.len() < 3 {
        return Err(Error::DegenerateFit(format!("{} usable points, need at least 3", pts.len())));
    }
    let a = DMatrix::from_fn(pts.len(), 2, |r, c| if c == 0 { pts[r].0 } else { 1.0 });
    let b = DVector::from_iterator(pts.len(), pts.iter().map(|p| p.1));
    let sol = a.svd(true, true).solve(&b, 0.0).map_err(|e| Error::DegenerateFit(e.to_string()))?;
    Ok((sol[0], sol[1]))
}

/// `Σ_{k=lo}^{hi} k^{2θ}|x_k|²`, the increment of the weighted partial sums.
pub fn window_increment(seq: &[Complex64], theta: f64, lo: usize, hi: usize) -> f64 {
    crate::sequence::weighted_sum(seq, theta, lo, hi)
}
