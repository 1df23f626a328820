//! Sine-basis Galerkin truncation of the form `t[y] = ∫ y'² − ∫ σ (y²)'`.
//!
//! The form lives on `{y ∈ W₂¹ : y(0) = 0}` (plus `y(π) = 0` for Dirichlet);
//! the Dirichlet–Neumann condition `y^{[1]}(π) = 0` is natural. Basis
//! functions `φ_k = √(2/π) sin ω_k x` all have `φ_k'(π) = 0` in the
//! Dirichlet–Neumann case, while eigenfunctions satisfy `y'(π) = σ(π) y(π)`.
//! When `σ(π) ≠ 0` the basis is therefore bordered with the part of `x`
//! orthogonal to `φ_1..φ_N`, which restores fast convergence.
//!
//! With `S(w) = ∫_0^π σ sin wx` every entry is closed form:
//! `∫σ(φ_jφ_k)' = π⁻¹[(ω_j+ω_k) S(ω_j+ω_k) − (ω_j−ω_k) S(ω_j−ω_k)]`.

use crate::error::{Error, Result};
use crate::io::fmt_f64;
use crate::moments::{cos_moment, sigma_moment, sin_moment};
use crate::potential::PotentialSpec;
use crate::spectrum::{BoundaryCondition, Method, SpectralProblem, Spectrum};
use nalgebra::{DMatrix, Schur, SymmetricEigen};
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

/// Default cap on the truncation size in [`oracle_spectrum`].
pub const DEFAULT_MAX_N: usize = 4096;

/// Truncated stiffness matrix in an orthonormal basis.
#[derive(Clone, Debug)]
pub struct GalerkinMatrix {
    /// Number of sine functions.
    pub n: usize,
    pub bc: BoundaryCondition,
    /// `n × n`, or `(n + 1) × (n + 1)` when the boundary function is present
    /// (it comes last).
    pub entries: DMatrix<Complex64>,
    pub bordered: bool,
    pub real: bool,
}

impl GalerkinMatrix {
    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    /// Largest `|A_jk − A_kj|`.
    pub fn asymmetry(&self) -> f64 {
        let a = &self.entries;
        let mut worst = 0.0f64;
        for j in 0..self.dim() {
            for k in 0..j {
                worst = worst.max((a[(j, k)] - a[(k, j)]).norm());
            }
        }
        worst
    }

    /// Row-major CSV with columns `row,col,re,im` (1-based indices).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("row,col,re,im\n");
        for j in 0..self.dim() {
            for k in 0..self.dim() {
                let v = self.entries[(j, k)];
                out.push_str(&format!("{},{},{},{}\n", j + 1, k + 1, fmt_f64(v.re), fmt_f64(v.im)));
            }
        }
        out
    }
}

/// `ζ(s, a) = Σ_{k≥0} (k + a)^{−s}` for integer `s ≥ 2` and `a > 0`.
fn hurwitz_zeta(s: i32, a: f64) -> f64 {
    // Direct terms, then Euler–Maclaurin from a + 12.
    const BERNOULLI: [f64; 6] = [1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0, 5.0 / 66.0, -691.0 / 2730.0];
    let mut sum = 0.0;
    let mut a = a;
    for _ in 0..12 {
        sum += a.powi(-s);
        a += 1.0;
    }
    let sf = s as f64;
    sum += a.powf(1.0 - sf) / (sf - 1.0) + 0.5 * a.powi(-s);
    // Rising factorial (s)_{2j−1} / (2j)!.
    let mut factor = sf / 2.0;
    let mut power = a.powi(-s - 1);
    for (j, b) in BERNOULLI.iter().enumerate() {
        sum += b * factor * power;
        let j = j as f64 + 1.0;
        factor *= (sf + 2.0 * j - 1.0) * (sf + 2.0 * j) / ((2.0 * j + 1.0) * (2.0 * j + 2.0));
        power /= a * a;
    }
    sum
}

/// `∫σ(φ_jφ_k)'` from a table of `S` at the needed frequencies.
struct FormTable {
    bc: BoundaryCondition,
    /// `S(m)` for `m = 0..=2N` (Dirichlet) or `S(m)` at the integers
    /// `j + k − 1` and `j − k` (Dirichlet–Neumann): both are integer grids.
    s: Vec<Complex64>,
}

impl FormTable {
    fn new(sigma: &PotentialSpec, bc: BoundaryCondition, n: usize) -> Self {
        let s = (0..=2 * n).into_par_iter().map(|m| sin_moment(sigma, 0, m as f64, 0.0, PI)).collect();
        Self { bc, s }
    }

    fn s_at(&self, m: i64) -> Complex64 {
        // S is odd in its frequency.
        if m < 0 {
            -self.s[(-m) as usize]
        } else {
            self.s[m as usize]
        }
    }

    /// `∫σ(φ_jφ_k)'`, 1-based indices.
    fn potential(&self, j: usize, k: usize) -> Complex64 {
        let (j, k) = (j as i64, k as i64);
        let (sum, diff) = match self.bc {
            BoundaryCondition::Dirichlet => (j + k, j - k),
            BoundaryCondition::DirichletNeumann => (j + k - 1, j - k),
        };
        (sum as f64 * self.s_at(sum) - diff as f64 * self.s_at(diff)) / PI
    }
}

/// Assembles the stiffness matrix `A_jk = ω_j² δ_jk − ∫σ(φ_jφ_k)'` on `N`
/// sine functions (bordered when needed, see the module docs).
pub fn assemble(problem: &SpectralProblem, n: usize) -> Result<GalerkinMatrix> {
    if n < 4 {
        return Err(Error::InvalidArgument(format!("truncation N = {n} is below 4")));
    }
    let sigma = &problem.sigma;
    let bc = problem.bc;
    let table = FormTable::new(sigma, bc, n);
    let (_, sigma_pi) = sigma.endpoints();
    let bordered = bc == BoundaryCondition::DirichletNeumann && sigma_pi != Complex64::default();
    let dim = n + usize::from(bordered);
    let mut a = DMatrix::<Complex64>::zeros(dim, dim);
    let rows: Vec<Vec<Complex64>> = (1..=n)
        .into_par_iter()
        .map(|j| {
            (1..=n)
                .map(|k| {
                    let w = bc.frequency(j);
                    let diag = if j == k { Complex64::from(w * w) } else { Complex64::default() };
                    diag - table.potential(j, k)
                })
                .collect()
        })
        .collect();
    for (j, row) in rows.iter().enumerate() {
        for (k, v) in row.iter().enumerate() {
            a[(j, k)] = *v;
        }
    }
    if bordered {
        border(sigma, &table, n, &mut a);
    }
    Ok(GalerkinMatrix { n, bc, entries: a, bordered, real: sigma.is_real() })
}

/// Fills the last row and column with the entries of `χ̃/‖χ̃‖`, where `χ̃` is
/// `x` minus its projection on `φ_1..φ_N` (Dirichlet–Neumann frequencies).
fn border(sigma: &PotentialSpec, table: &FormTable, n: usize, a: &mut DMatrix<Complex64>) {
    let c = (2.0 / PI).sqrt();
    let omega = |k: usize| k as f64 - 0.5;
    let sign = |k: usize| if k % 2 == 1 { 1.0 } else { -1.0 };
    // ⟨x, φ_k⟩ = √(2/π) (−1)^{k+1} / ω_k².
    let g: Vec<f64> = (1..=n).map(|k| c * sign(k) / (omega(k) * omega(k))).collect();
    // ∫σ(xφ_k)' = √(2/π) [S(ω_k) + ω_k ∫σ x cos ω_k x].
    let p_chi_phi: Vec<Complex64> = (1..=n)
        .into_par_iter()
        .map(|k| {
            let w = omega(k);
            c * (sin_moment(sigma, 0, w, 0.0, PI) + w * cos_moment(sigma, 1, w, 0.0, PI))
        })
        .collect();
    let p_chi_chi = 2.0 * sigma_moment(sigma, 1, 0.0.into(), 0.0, PI);
    // P(χ̃, φ_j) = P(χ, φ_j) − Σ_k g_k P(φ_k, φ_j).
    let p_tilde_phi: Vec<Complex64> = (1..=n)
        .into_par_iter()
        .map(|j| p_chi_phi[j - 1] - (1..=n).map(|k| g[k - 1] * table.potential(k, j)).sum::<Complex64>())
        .collect();
    // P(χ̃, χ̃) = P(χ, χ) − 2 Σ g_k P(χ, φ_k) + Σ g_j g_k P(φ_j, φ_k)
    //          = P(χ, χ) − Σ g_k [P(χ, φ_k) + P(χ̃, φ_k)].
    let p_tilde_tilde = p_chi_chi - (0..n).map(|k| g[k] * (p_chi_phi[k] + p_tilde_phi[k])).sum::<Complex64>();
    // Tail sums: ‖χ̃‖² = (2/π) Σ_{k>N} ω_k⁻⁴ and ‖χ̃'‖² = (2/π) Σ_{k>N} ω_k⁻².
    let a0 = n as f64 + 0.5;
    let norm2 = (2.0 / PI) * hurwitz_zeta(4, a0);
    let kinetic = (2.0 / PI) * hurwitz_zeta(2, a0);
    let scale = norm2.sqrt();
    for j in 0..n {
        let v = -p_tilde_phi[j] / scale;
        a[(j, n)] = v;
        a[(n, j)] = v;
    }
    a[(n, n)] = (kinetic - p_tilde_tilde) / norm2;
}

/// The lowest `n_keep ≤ N/2` eigenvalues, ascending by real part.
pub fn eigen_solve(m: &GalerkinMatrix, n_keep: usize) -> Result<Spectrum> {
    if n_keep > m.n / 2 {
        return Err(Error::InvalidArgument(format!("n_keep = {n_keep} exceeds N/2 = {}", m.n / 2)));
    }
    let mut lambda: Vec<Complex64> = if m.real {
        let sym = DMatrix::<f64>::from_fn(m.dim(), m.dim(), |j, k| 0.5 * (m.entries[(j, k)].re + m.entries[(k, j)].re));
        let eig = SymmetricEigen::try_new(sym, f64::EPSILON, 0)
            .ok_or_else(|| Error::Eigensolver("symmetric QR iteration did not converge".into()))?;
        eig.eigenvalues.iter().map(|&l| l.into()).collect()
    } else {
        let schur = Schur::try_new(m.entries.clone(), f64::EPSILON, 0)
            .ok_or_else(|| Error::Eigensolver("Schur iteration did not converge".into()))?;
        schur
            .eigenvalues()
            .ok_or_else(|| Error::Eigensolver("Schur form is not triangular".into()))?
            .iter()
            .copied()
            .collect()
    };
    lambda.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    lambda.truncate(n_keep);
    let residuals = vec![0.0; lambda.len()];
    Ok(Spectrum::from_lambdas(m.bc, Method::Galerkin, lambda, residuals, Some(m.n)))
}

/// Doubles `N` from `max(64, 4 n_max)` until every one of the first `n_max`
/// eigenvalues moves by less than `tol · max(1, |λ|)`; gives up past `max_n`.
pub fn oracle_spectrum_capped(problem: &SpectralProblem, n_max: usize, tol: f64, max_n: usize) -> Result<Spectrum> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive (got {tol})")));
    }
    if n_max == 0 {
        return Err(Error::InvalidArgument("n_max must be at least 1".into()));
    }
    let mut n = (4 * n_max).max(64);
    let mut prev = eigen_solve(&assemble(problem, n)?, n_max)?;
    loop {
        n *= 2;
        if n > max_n {
            return Err(Error::NotConverged { what: "Galerkin truncation doubling", iterations: n / 2 });
        }
        let next = eigen_solve(&assemble(problem, n)?, n_max)?;
        let moved = prev.lambda.iter().zip(&next.lambda).all(|(a, b)| (a - b).norm() < tol * b.norm().max(1.0));
        if moved {
            let mut out = next.clone();
            out.residuals = prev.lambda.iter().zip(&next.lambda).map(|(a, b)| (a - b).norm()).collect();
            return Ok(out);
        }
        prev = next;
    }
}

/// [`oracle_spectrum_capped`] with the default cap of 4096.
pub fn oracle_spectrum(problem: &SpectralProblem, n_max: usize, tol: f64) -> Result<Spectrum> {
    oracle_spectrum_capped(problem, n_max, tol, DEFAULT_MAX_N)
}
