//! Higher-order asymptotics of the square-rooted eigenvalues for smooth σ:
//! `λ_k^{1/2} = k + Σ_{j≤s} h_j (2k)^{−(2j+1)} − (−1)^s c_{2k} / (2(2k)^{r}) + α_{2k} / k^{m+1}`
//! with `c = a` (cosine coefficients of `σ^{(m)}`), `r = 2s + 1` for odd
//! `m = 2s + 1`, and `c = b` (sine coefficients), `r = 2s` for even `m = 2s`;
//! the Dirichlet–Neumann branch has `k − ½`, `g_j`, `2k − 1` in place of `k`,
//! `h_j`, `2k`.

use super::remainder::remainders;
use crate::error::{Error, Result};
use crate::moments::{cos_moment, sin_moment};
use crate::potential::PotentialSpec;
use crate::spectrum::Spectrum;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Fitted expansion coefficients together with the trigonometric
/// coefficients of `σ^{(m)} = q^{(m−1)}` they were fitted against.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpansionCoeffs {
    pub m: usize,
    /// `h_0, …, h_s`.
    pub h: Vec<f64>,
    pub g: Vec<f64>,
    /// `a_l`, `l = 1..=2n`.
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

/// Fit outcome: the coefficients, their exact linear parts, and the scaled
/// residual `α` (interleaved, `k = 1..=2n`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpansionFit {
    pub coeffs: ExpansionCoeffs,
    pub h_linear: Vec<f64>,
    pub g_linear: Vec<f64>,
    pub alpha: Vec<f64>,
    /// Fit window in the per-spectrum index `k`.
    pub window: (usize, usize),
}

/// Number of fitted coefficients per branch: `s + 1` with `s = ⌊m/2⌋`.
fn n_terms(m: usize) -> usize {
    m / 2 + 1
}

/// `σ^{(n)}` at 0 and π for σ smooth on `[0, π]`.
fn endpoint_derivatives(sigma: &PotentialSpec, n: usize) -> Result<(f64, f64)> {
    match sigma {
        PotentialSpec::Fourier(_) => {
            let d = sigma.differentiate(n)?;
            let (a, b) = d.endpoints();
            Ok((a.re, b.re))
        }
        PotentialSpec::PiecewiseLinear(p) => {
            let (x, y) = (p.knots_x(), p.knots_y());
            match n {
                0 => Ok((y[0], y[y.len() - 1])),
                1 if x.len() == 2 => {
                    let s = (y[1] - y[0]) / (x[1] - x[0]);
                    Ok((s, s))
                }
                _ if x.len() == 2 => Ok((0.0, 0.0)),
                _ => Err(Error::InsufficientSmoothness(format!("σ^({n}) of a piecewise-linear potential"))),
            }
        }
    }
}

/// `(a_l, b_l) = (2/π)∫ σ^{(m)}(t) (cos lt, sin lt) dt`, `l = 1..=count`.
pub fn derivative_trig_coefficients(sigma: &PotentialSpec, m: usize, count: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if !sigma.is_real() {
        return Err(Error::InvalidArgument("expansion coefficients need real σ".into()));
    }
    if let PotentialSpec::PiecewiseLinear(p) = sigma {
        if p.has_jumps() {
            return Err(Error::InsufficientSmoothness("σ has jumps".into()));
        }
        if m >= 2 && sigma.breakpoints().len() > 2 {
            return Err(Error::InsufficientSmoothness(format!("σ^({m}) of a piecewise-linear potential with kinks")));
        }
    }
    let d = match sigma {
        PotentialSpec::Fourier(_) => sigma.differentiate(m)?,
        PotentialSpec::PiecewiseLinear(_) if m == 0 => sigma.clone(),
        PotentialSpec::PiecewiseLinear(_) if m == 1 => {
            // Piecewise-constant derivative, integrated by parts against σ.
            let (s0, spi) = sigma.endpoints();
            let a = (1..=count)
                .map(|l| {
                    let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
                    let lf = l as f64;
                    (2.0 / PI) * (spi.re * sign - s0.re + lf * sin_moment(sigma, 0, lf, 0.0, PI).re)
                })
                .collect();
            let b = (1..=count).map(|l| -(2.0 / PI) * l as f64 * cos_moment(sigma, 0, l as f64, 0.0, PI).re).collect();
            return Ok((a, b));
        }
        PotentialSpec::PiecewiseLinear(_) => return Ok((vec![0.0; count], vec![0.0; count])),
    };
    let a = (1..=count).map(|l| (2.0 / PI) * cos_moment(&d, 0, l as f64, 0.0, PI).re).collect();
    let b = (1..=count).map(|l| (2.0 / PI) * sin_moment(&d, 0, l as f64, 0.0, PI).re).collect();
    Ok((a, b))
}

/// Linear parts `h_j⁰ = (−1)^j π⁻¹[σ^{(2j)}(π) − σ^{(2j)}(0)]` and
/// `g_j⁰ = (−1)^{j+1} π⁻¹[σ^{(2j)}(π) + σ^{(2j)}(0)]` for `j ≤ s`; for even
/// `m = 2s` the last pair is zero.
pub fn linear_parts(sigma: &PotentialSpec, m: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let terms = n_terms(m);
    let mut h = Vec::with_capacity(terms);
    let mut g = Vec::with_capacity(terms);
    for j in 0..terms {
        if m.is_multiple_of(2) && j + 1 == terms {
            h.push(0.0);
            g.push(0.0);
            continue;
        }
        let (d0, dpi) = endpoint_derivatives(sigma, 2 * j)?;
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        h.push(sign * (dpi - d0) / PI);
        g.push(-sign * (dpi + d0) / PI);
    }
    Ok((h, g))
}

/// Weighted least squares for one branch: `y_k ≈ Σ_j c_j w_k^{−(2j+1)}` with
/// weights `k^{m+1}`; returns the coefficients and `α_k = k^{m+1}(y_k − fit)`
/// for all `k`.
fn fit_branch(
    y: &[f64],
    freq: impl Fn(usize) -> f64,
    m: usize,
    window: (usize, usize),
) -> Result<(Vec<f64>, Vec<f64>)> {
    let terms = n_terms(m);
    let (lo, hi) = window;
    let rows = hi - lo + 1;
    if rows < 2 * terms {
        return Err(Error::DegenerateFit(format!("{rows} points for {terms} coefficients")));
    }
    let weight = |k: usize| (k as f64).powi(m as i32 + 1);
    let column = |k: usize, j: usize| freq(k).powi(-(2 * j as i32 + 1));
    let a = DMatrix::from_fn(rows, terms, |r, j| weight(lo + r) * column(lo + r, j));
    let rhs = DVector::from_iterator(rows, (lo..=hi).map(|k| weight(k) * y[k - 1]));
    let svd = a.svd(true, true);
    let (smax, smin) = (svd.singular_values.max(), svd.singular_values.min());
    if !(smin > 1e-13 * smax) {
        return Err(Error::DegenerateFit(format!(
            "design matrix is rank deficient (σ_min/σ_max = {:.1e})",
            smin / smax
        )));
    }
    let c = svd.solve(&rhs, 0.0).map_err(|e| Error::DegenerateFit(e.to_string()))?;
    let coeffs: Vec<f64> = c.iter().copied().collect();
    let alpha = (1..=y.len())
        .map(|k| weight(k) * (y[k - 1] - (0..terms).map(|j| coeffs[j] * column(k, j)).sum::<f64>()))
        .collect();
    Ok((coeffs, alpha))
}

/// Fits `h_j`, `g_j` against computed spectra over `k ∈ [k_lo, n]` and reports
/// the scaled residuals.
pub fn thm51_fit(
    sigma: &PotentialSpec,
    spec_d: &Spectrum,
    spec_dn: &Spectrum,
    m: usize,
    k_lo: usize,
) -> Result<ExpansionFit> {
    if m == 0 {
        return Err(Error::InvalidArgument("m must be at least 1".into()));
    }
    let r = remainders(spec_d, spec_dn, m as f64)?;
    let n = spec_d.len();
    if k_lo == 0 || k_lo >= n {
        return Err(Error::DegenerateFit(format!("window start {k_lo} is not inside 1..{n}")));
    }
    let (a, b) = derivative_trig_coefficients(sigma, m, 2 * n)?;
    let s = m / 2;
    let parity = if s.is_multiple_of(2) { 1.0 } else { -1.0 };
    // Move the explicit trigonometric term to the left-hand side.
    let trig = |l: usize| {
        let lf = l as f64;
        if m % 2 == 1 {
            parity * a[l - 1] / (2.0 * lf.powi(2 * s as i32 + 1))
        } else {
            parity * b[l - 1] / (2.0 * lf.powi(2 * s as i32))
        }
    };
    let y_d: Vec<f64> = (1..=n).map(|k| r.get(2 * k).re + trig(2 * k)).collect();
    let y_dn: Vec<f64> = (1..=n).map(|k| r.get(2 * k - 1).re + trig(2 * k - 1)).collect();
    let window = (k_lo, n);
    let (h, alpha_d) = fit_branch(&y_d, |k| 2.0 * k as f64, m, window)?;
    let (g, alpha_dn) = fit_branch(&y_dn, |k| 2.0 * k as f64 - 1.0, m, window)?;
    let (h_linear, g_linear) = linear_parts(sigma, m)?;
    let alpha = alpha_dn.iter().zip(&alpha_d).flat_map(|(&x, &y)| [x, y]).collect();
    Ok(ExpansionFit { coeffs: ExpansionCoeffs { m, h, g, a, b }, h_linear, g_linear, alpha, window })
}

/// `α` as complex values, for the sequence utilities.
pub fn alpha_sequence(fit: &ExpansionFit) -> Vec<Complex64> {
    fit.alpha.iter().map(|&a| a.into()).collect()
}
