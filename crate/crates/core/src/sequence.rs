//! Weighted sequence spaces `l₂^θ`, their finite extensions by the slowly
//! decaying basis sequences `e^j`, and the sine-coefficient map `T`.

use crate::error::{Error, Result};
use crate::io::fmt_f64;
use crate::moments::sin_moment;
use crate::potential::PotentialSpec;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// A finite prefix `x_1, …, x_K` of a sequence, measured in `l₂^θ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightedSeq {
    pub values: Vec<Complex64>,
    pub theta: f64,
}

impl WeightedSeq {
    pub fn new(values: Vec<Complex64>, theta: f64) -> Self {
        Self { values, theta }
    }

    pub fn from_real(values: &[f64], theta: f64) -> Self {
        Self::new(values.iter().map(|&v| v.into()).collect(), theta)
    }

    /// `sqrt(Σ k^{2θ} |x_k|²)` over the stored prefix.
    pub fn weighted_norm(&self) -> f64 {
        weighted_sum(&self.values, self.theta, 1, self.values.len()).sqrt()
    }

    /// CSV with columns `k,re,im`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,re,im\n");
        for (i, v) in self.values.iter().enumerate() {
            out.push_str(&format!("{},{},{}\n", i + 1, fmt_f64(v.re), fmt_f64(v.im)));
        }
        out
    }
}

/// `Σ_{k=lo}^{hi} k^{2θ}|x_k|²` for 1-based `k`.
pub fn weighted_sum(values: &[Complex64], theta: f64, lo: usize, hi: usize) -> f64 {
    (lo.max(1)..=hi.min(values.len())).map(|k| (k as f64).powf(2.0 * theta) * values[k - 1].norm_sqr()).sum()
}

/// One of the extension sequences: `e^{2s−1}_k = k^{−(2s−1)}`, `e^{2s}_k = (−1)^k k^{−(2s−1)}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisSeq {
    pub j: usize,
}

impl BasisSeq {
    pub fn new(j: usize) -> Self {
        assert!(j >= 1, "basis sequences are numbered from 1");
        Self { j }
    }

    pub fn value(&self, k: usize) -> f64 {
        let s = self.j.div_ceil(2);
        let v = (k as f64).powi(-(2 * s as i32 - 1));
        if self.j.is_multiple_of(2) && k % 2 == 1 {
            -v
        } else {
            v
        }
    }
}

/// `x = l2_part + Σ α_j e^j`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HatElement {
    pub l2_part: WeightedSeq,
    pub alphas: Vec<Complex64>,
    pub theta: f64,
    pub m: usize,
}

impl HatElement {
    pub fn norm(&self) -> f64 {
        hat_norm(self)
    }
}

/// Number of extension pairs needed at smoothness θ: 0 below ½, otherwise the
/// `m ≥ 1` with `2m − 3/2 ≤ θ < 2m + 1/2`.
pub fn m_of_theta(theta: f64) -> usize {
    if theta < 0.5 {
        0
    } else {
        ((theta + 1.5) / 2.0).floor() as usize
    }
}

/// Smoothness gained by the nonlinear remainder: `2θ` up to θ = 1, then `θ + 1`.
pub fn tau_of_theta(theta: f64) -> f64 {
    if theta <= 1.0 {
        2.0 * theta
    } else {
        theta + 1.0
    }
}

/// `b_k = (2/π)∫_0^π σ(x) sin kx dx` for `k = 1..=K`.
pub fn apply_t(sigma: &PotentialSpec, k_max: usize) -> WeightedSeq {
    let values = match sigma {
        PotentialSpec::Fourier(f) => (1..=k_max)
            .map(|k| {
                let kf = k as f64;
                let odd = |n: usize| if n % 2 == 1 { 2.0 } else { 0.0 };
                let mut b = f.c0 * (2.0 / PI) * odd(k) / kf;
                for (j, &c) in f.cos.iter().enumerate() {
                    let j = j + 1;
                    if j != k {
                        let jf = j as f64;
                        b += c * (2.0 / PI) * kf * odd(j + k) / (kf * kf - jf * jf);
                    }
                }
                if let Some(&d) = f.sin.get(k - 1) {
                    b += d;
                }
                b
            })
            .collect(),
        PotentialSpec::PiecewiseLinear(_) => {
            (1..=k_max).map(|k| sin_moment(sigma, 0, k as f64, 0.0, PI) * (2.0 / PI)).collect()
        }
    };
    WeightedSeq::new(values, 0.0)
}

/// `Σ b_k sin kx`, the inverse of [`apply_t`] on a finite prefix.
pub fn sine_synthesis(b: &[Complex64], x: f64) -> Complex64 {
    b.iter().enumerate().map(|(k, &c)| c * ((k + 1) as f64 * x).sin()).sum()
}

/// Default least-squares window `[max(10, K/4), K]`, clipped to the data.
pub fn default_window(len: usize) -> (usize, usize) {
    ((len / 4).max(10).min(len.saturating_sub(1)).max(1), len)
}

/// Splits a finite sequence into an `l₂^θ` part and coefficients on
/// `e^1..e^{2m}`, `m = m_of_theta(θ)`. The coefficients are a weighted
/// (weights `k^{2θ}`) least-squares fit over `k ∈ [fit_lo, fit_hi]`.
pub fn hat_decompose(s: &[Complex64], theta: f64, fit_lo: usize, fit_hi: usize) -> Result<HatElement> {
    let m = m_of_theta(theta);
    if m == 0 {
        return Ok(HatElement { l2_part: WeightedSeq::new(s.to_vec(), theta), alphas: vec![], theta, m });
    }
    let unknowns = 2 * m;
    if fit_lo == 0 || fit_lo >= fit_hi || fit_hi > s.len() {
        return Err(Error::DegenerateFit(format!("window [{fit_lo}, {fit_hi}] is not inside 1..={}", s.len())));
    }
    let rows = fit_hi - fit_lo + 1;
    if rows < unknowns {
        return Err(Error::DegenerateFit(format!("{rows} points for {unknowns} unknowns")));
    }
    let basis: Vec<BasisSeq> = (1..=unknowns).map(BasisSeq::new).collect();
    let mut a = DMatrix::<f64>::zeros(rows, unknowns);
    let mut re = DVector::<f64>::zeros(rows);
    let mut im = DVector::<f64>::zeros(rows);
    for (r, k) in (fit_lo..=fit_hi).enumerate() {
        let w = (k as f64).powf(theta);
        for (c, e) in basis.iter().enumerate() {
            a[(r, c)] = w * e.value(k);
        }
        re[r] = w * s[k - 1].re;
        im[r] = w * s[k - 1].im;
    }
    let svd = a.svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if !(smin > 1e-13 * smax) {
        return Err(Error::DegenerateFit(format!(
            "design matrix is rank deficient (σ_min/σ_max = {:.1e})",
            smin / smax
        )));
    }
    let xr = svd.solve(&re, 0.0).map_err(|e| Error::DegenerateFit(e.to_string()))?;
    let xi = svd.solve(&im, 0.0).map_err(|e| Error::DegenerateFit(e.to_string()))?;
    let alphas: Vec<Complex64> = (0..unknowns).map(|j| Complex64::new(xr[j], xi[j])).collect();
    let l2: Vec<Complex64> = s
        .iter()
        .enumerate()
        .map(|(i, &v)| v - basis.iter().zip(&alphas).map(|(e, &al)| al * e.value(i + 1)).sum::<Complex64>())
        .collect();
    Ok(HatElement { l2_part: WeightedSeq::new(l2, theta), alphas, theta, m })
}

/// `sqrt(‖l2_part‖²_θ + Σ|α_j|²)`.
pub fn hat_norm(h: &HatElement) -> f64 {
    (h.l2_part.weighted_norm().powi(2) + h.alphas.iter().map(|a| a.norm_sqr()).sum::<f64>()).sqrt()
}
