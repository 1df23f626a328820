//! The successive-approximation series `s(x, ρ) = Σ_n S_n(x, ρ)` for the
//! solution with `s(0) = 0`, `s^{[1]}(0) = ρ`:
//! `S_0 = sin ρx`, `S_n(x) = ∫_0^x ρ⁻¹ sin ρ(x − t) q(t) S_{n−1}(t) dt`,
//! computed by quadrature, and its expansion in the functions
//! `ν_j(x, ρ) = (2ρ)^{−j} sin ρx` (j even) / `(2ρ)^{−j} cos ρx` (j odd).

use crate::chebyshev::{ChebSeries, Panels};
use crate::error::{Error, Result};
use crate::potential::PotentialSpec;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Largest order accepted by [`s_quadrature`].
pub const MAX_QUADRATURE_ORDER: usize = 6;

fn check_real(sigma: &PotentialSpec, rho: f64) -> Result<()> {
    if !sigma.is_real() {
        return Err(Error::InvalidArgument("the series is implemented for real σ".into()));
    }
    if rho == 0.0 || !rho.is_finite() {
        return Err(Error::InvalidArgument(format!("ρ must be finite and nonzero (got {rho})")));
    }
    Ok(())
}

/// `S_0(π, ρ), …, S_n(π, ρ)`.
///
/// With `q = σ'` only known as a distribution, each layer is integrated by
/// parts onto σ:
/// `S_n(x) = cos ρx ∫_0^x σ (cos ρt S + sin ρt S'/ρ) + sin ρx ∫_0^x σ (sin ρt S − cos ρt S'/ρ)`,
/// `S_n'(x) = σ S_{n−1} − ρ sin ρx P(x) + ρ cos ρx Q(x)`, where `S = S_{n−1}`
/// and `P`, `Q` are the two running integrals.
pub fn s_quadrature_all(sigma: &PotentialSpec, rho: f64, n: usize) -> Result<Vec<f64>> {
    check_real(sigma, rho)?;
    if n > MAX_QUADRATURE_ORDER {
        return Err(Error::InvalidArgument(format!("order {n} exceeds {MAX_QUADRATURE_ORDER}")));
    }
    let max_len = (6.0 / (2.0 * rho.abs() + sigma.degree() as f64 + 1.0)).min(0.25);
    let panels = Panels::new(&sigma.breakpoints(), max_len, 24);
    let x = panels.nodes().to_vec();
    let sig: Vec<f64> = panels.sample(|piece, x| sigma.value_in(piece, x).re);
    let trig: Vec<(f64, f64)> = x.iter().map(|&x| (rho * x).sin_cos()).collect();
    let mut s: Vec<f64> = trig.iter().map(|t| t.0).collect();
    let mut ds: Vec<f64> = trig.iter().map(|t| rho * t.1).collect();
    let mut out = vec![*s.last().expect("nodes")];
    for _ in 0..n {
        let pi: Vec<f64> = (0..x.len()).map(|i| sig[i] * (trig[i].1 * s[i] + trig[i].0 * ds[i] / rho)).collect();
        let qi: Vec<f64> = (0..x.len()).map(|i| sig[i] * (trig[i].0 * s[i] - trig[i].1 * ds[i] / rho)).collect();
        let p = panels.cumulative(&pi);
        let q = panels.cumulative(&qi);
        let next: Vec<f64> = (0..x.len()).map(|i| trig[i].1 * p[i] + trig[i].0 * q[i]).collect();
        ds = (0..x.len()).map(|i| sig[i] * s[i] - rho * trig[i].0 * p[i] + rho * trig[i].1 * q[i]).collect();
        s = next;
        out.push(*s.last().expect("nodes"));
    }
    Ok(out)
}

/// `S_n(π, ρ)` by nested quadrature; `n ≤ 6`.
pub fn s_quadrature(sigma: &PotentialSpec, rho: f64, n: usize) -> Result<f64> {
    Ok(s_quadrature_all(sigma, rho, n)?[n])
}

/// `ν_j(x, ρ)`.
pub fn nu(j: usize, x: f64, rho: f64) -> f64 {
    let scale = (2.0 * rho).powi(-(j as i32));
    if j.is_multiple_of(2) {
        scale * (rho * x).sin()
    } else {
        scale * (rho * x).cos()
    }
}

/// `σ` as a single Chebyshev series on `[0, π]`, together with its
/// derivatives up to `order`. Needs σ smooth on the whole interval.
fn smooth_derivatives(sigma: &PotentialSpec, order: usize) -> Result<Vec<ChebSeries>> {
    if !sigma.is_real() {
        return Err(Error::InvalidArgument("the expansion is implemented for real σ".into()));
    }
    match sigma {
        PotentialSpec::Fourier(_) => {
            let n = (32.0 + 1.6 * sigma.degree() as f64 * PI / 2.0) as usize + 16;
            (0..=order)
                .map(|k| {
                    let d = sigma.differentiate(k)?;
                    Ok(ChebSeries::from_fn(0.0, PI, n, |x| d.value(x).re).chopped(1e-16))
                })
                .collect()
        }
        PotentialSpec::PiecewiseLinear(p) => {
            if sigma.breakpoints().len() != 2 {
                return Err(Error::InsufficientSmoothness(
                    "a piecewise-linear σ with interior knots has a distributional second derivative".into(),
                ));
            }
            let (x, y) = (p.knots_x(), p.knots_y());
            let slope = (y[1] - y[0]) / (x[1] - x[0]);
            let lin = ChebSeries::from_fn(0.0, PI, 1, |t| y[0] + slope * (t - x[0]));
            Ok((0..=order).map(|k| if k == 0 { lin.clone() } else { lin.nth_derivative(k) }).collect())
        }
    }
}

/// The coefficient functions `f_{p,j}` of
/// `S_p(x, ρ) = Σ_{j≥1} ν_j(x, ρ) f_{p,j}(x) + (integral tails)`, for
/// `1 ≤ p ≤ m + 1` and `1 ≤ j ≤ m + 1`.
///
/// Starting from `f_{0,0} = 1` (`S_0 = ν_0`), each layer follows from
/// `ρ⁻¹ sin ρ(x−t) ν_s(t) = (−1)^{s+1} ν_{s+1}(x) + ν_{s+1}(x − 2t)` and repeated
/// integration by parts of `∫ν_{s+1}(x − 2t) F(t) dt`:
/// `f_{p,j} = (−1)^j ∫_0^x q f_{p−1,j−1} + Σ_{s=0}^{j−2} c_{s,j} (F_s^{(j−s−2)}(x) − (−1)^{j−1} F_s^{(j−s−2)}(0))`
/// with `F_s = q f_{p−1,s}` and `c_{s,j} = Π_{i=s+1}^{j−2} (−1)^{i+1}`.
#[derive(Clone, Debug)]
pub struct FTable {
    pub m: usize,
    /// `f[p][j]`, `0 ≤ p ≤ m + 1`, `0 ≤ j ≤ m + 1`.
    f: Vec<Vec<ChebSeries>>,
    /// `q, q', …, q^{(m)}`.
    q_derivs: Vec<ChebSeries>,
}

/// `Π_{i=lo}^{hi} (−1)^{i+1}` (empty product 1).
fn sign_product(lo: usize, hi: usize) -> f64 {
    (lo..=hi).fold(1.0, |acc, i| if i % 2 == 0 { -acc } else { acc })
}

impl FTable {
    /// `J = m + 1`, the highest `ν` index kept.
    pub fn top(&self) -> usize {
        self.m + 1
    }

    /// `f_{p,j}(x)`.
    pub fn eval(&self, p: usize, j: usize, x: f64) -> f64 {
        self.f[p][j].eval(x)
    }

    /// `f_{p,j}` at `points + 1` equally spaced points of `[0, π]`, as rows
    /// `(p, j, values)` for `1 ≤ p ≤ m + 1`, `1 ≤ j ≤ m + 1`.
    pub fn grid_values(&self, points: usize) -> Vec<(usize, usize, Vec<f64>)> {
        let grid: Vec<f64> = (0..=points).map(|i| PI * i as f64 / points as f64).collect();
        let mut out = Vec::new();
        for p in 1..=self.m + 1 {
            for j in 1..=self.top() {
                out.push((p, j, grid.iter().map(|&x| self.eval(p, j, x)).collect()));
            }
        }
        out
    }
}

/// Builds the table of `f_{p,j}` for analytic σ (a trigonometric polynomial
/// or a single linear segment).
pub fn f_recurrence(sigma: &PotentialSpec, m: usize) -> Result<FTable> {
    if m == 0 {
        return Err(Error::InvalidArgument("m must be at least 1".into()));
    }
    let top = m + 1;
    let sd = smooth_derivatives(sigma, top)?;
    let q_derivs: Vec<ChebSeries> = sd[1..].to_vec();
    let q = &q_derivs[0];
    let zero = ChebSeries::zero(0.0, PI);
    let mut f = vec![vec![zero.clone(); top + 1]; m + 2];
    f[0][0] = ChebSeries::from_fn(0.0, PI, 0, |_| 1.0);
    for p in 1..=m + 1 {
        // F_s = q f_{p−1,s} and its derivatives, built lazily.
        let products: Vec<ChebSeries> = (0..=top).map(|s| q.mul(&f[p - 1][s]).chopped(1e-16)).collect();
        for j in 1..=top {
            let mut acc = products[j - 1].integral().scale(if j % 2 == 0 { 1.0 } else { -1.0 });
            for (s, product) in products.iter().enumerate().take(j - 1) {
                let d = product.nth_derivative(j - s - 2);
                let at0 = d.eval(0.0);
                let sign = if (j - 1) % 2 == 0 { 1.0 } else { -1.0 };
                acc = acc.add(&d.add_constant(-sign * at0).scale(sign_product(s + 1, j - 2)));
            }
            f[p][j] = acc.chopped(1e-16);
        }
    }
    Ok(FTable { m, f, q_derivs })
}

/// `∫_0^π ν_J(π − 2t, ρ) F(t) dt`.
fn tail_integral(top: usize, rho: f64, integrand: &ChebSeries) -> f64 {
    let max_len = (6.0 / (2.0 * rho.abs() + integrand.degree() as f64 + 1.0)).min(0.25);
    let panels = Panels::new(&[0.0, PI], max_len, 24);
    let vals = panels.sample(|_, t| nu(top, PI - 2.0 * t, rho) * integrand.eval(t));
    panels.integral(&vals)
}

/// `Σ_{p=1}^{m+1} S_p(π, ρ)` from the table:
/// `Σ_p Σ_{j=1}^{m+1} ν_j(π, ρ) f_{p,j}(π)` plus the two leading integral
/// tails `r_s ∫_0^π ν_{m+1}(π − 2t) F^{(m−s)}(t) dt` with `F = q` (p = 1, s = 0)
/// and `F = q f_{1,1}` (p = 2, s = 1), `r_s = Π_{i=s+1}^{m}(−1)^{i+1}`.
/// The error is `O(ρ^{−m−2})`.
pub fn s_expansion_from_table(table: &FTable, rho: f64) -> Result<f64> {
    if rho == 0.0 || !rho.is_finite() {
        return Err(Error::InvalidArgument(format!("ρ must be finite and nonzero (got {rho})")));
    }
    let top = table.top();
    let mut sum = 0.0;
    for p in 1..=table.m + 1 {
        for j in 1..=top {
            sum += nu(j, PI, rho) * table.eval(p, j, PI);
        }
    }
    let q = &table.q_derivs[0];
    sum += sign_product(1, top - 1) * tail_integral(top, rho, &table.q_derivs[top - 1]);
    let f11q = q.mul(&table.f[1][1]).nth_derivative(top - 2);
    sum += sign_product(2, top - 1) * tail_integral(top, rho, &f11q);
    Ok(sum)
}

/// [`s_expansion_from_table`] after building the table.
pub fn s_expansion(sigma: &PotentialSpec, rho: f64, m: usize) -> Result<f64> {
    check_real(sigma, rho)?;
    s_expansion_from_table(&f_recurrence(sigma, m)?, rho)
}

/// Comparison of the expansion against quadrature at two frequencies.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrderEstimate {
    pub m: usize,
    pub rho: [f64; 2],
    /// `S_expansion(π, ρ_i)`.
    pub expansion: [f64; 2],
    /// `Σ_{p=1}^{m+1} S_p(π, ρ_i)` by quadrature.
    pub quadrature: [f64; 2],
    pub mismatch: [f64; 2],
    /// `log(mismatch₀/mismatch₁) / log(ρ₁/ρ₀)`.
    pub order: f64,
}

/// `|S_expansion − Σ_{p=1}^{m+1} S_quadrature|` at ρ₀ and ρ₁ and the implied
/// decay order.
pub fn expansion_order(sigma: &PotentialSpec, m: usize, rho: [f64; 2]) -> Result<OrderEstimate> {
    let table = f_recurrence(sigma, m)?;
    let (mut expansion, mut quadrature, mut mismatch) = ([0.0; 2], [0.0; 2], [0.0; 2]);
    for (i, &r) in rho.iter().enumerate() {
        check_real(sigma, r)?;
        quadrature[i] = s_quadrature_all(sigma, r, (m + 1).min(MAX_QUADRATURE_ORDER))?[1..].iter().sum();
        expansion[i] = s_expansion_from_table(&table, r)?;
        mismatch[i] = (expansion[i] - quadrature[i]).abs();
    }
    let order = (mismatch[0] / mismatch[1]).ln() / (rho[1] / rho[0]).ln();
    Ok(OrderEstimate { m, rho, expansion, quadrature, mismatch, order })
}
