//! Problem description and the eigenvalue lists returned by every solver.

use crate::error::{Error, Result};
use crate::io::fmt_f64;
use crate::ode::Tolerance;
use crate::potential::PotentialSpec;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Boundary condition at `x = π` (the solution always vanishes at 0).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryCondition {
    /// `y(π) = 0`.
    Dirichlet,
    /// `y^{[1]}(π) = y'(π) − σ(π)y(π) = 0`.
    DirichletNeumann,
}

impl BoundaryCondition {
    /// Unperturbed square root of the `n`-th eigenvalue: `n` or `n − ½`.
    pub fn frequency(self, n: usize) -> f64 {
        match self {
            Self::Dirichlet => n as f64,
            Self::DirichletNeumann => n as f64 - 0.5,
        }
    }

    /// Position of the `n`-th remainder in the interleaved sequence `s_k`.
    pub fn interleaved_index(self, n: usize) -> usize {
        match self {
            Self::Dirichlet => 2 * n,
            Self::DirichletNeumann => 2 * n - 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Dirichlet => "dirichlet",
            Self::DirichletNeumann => "dirichlet_neumann",
        }
    }
}

impl std::str::FromStr for BoundaryCondition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dirichlet" | "d" | "D" => Ok(Self::Dirichlet),
            "dirichlet_neumann" | "dn" | "DN" => Ok(Self::DirichletNeumann),
            _ => Err(Error::InvalidArgument(format!("unknown boundary condition {s:?}"))),
        }
    }
}

/// A potential together with a boundary condition and integrator tolerances.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralProblem {
    pub sigma: PotentialSpec,
    pub bc: BoundaryCondition,
    pub abs_tol: f64,
    pub rel_tol: f64,
}

impl SpectralProblem {
    pub fn new(sigma: PotentialSpec, bc: BoundaryCondition) -> Self {
        Self { sigma, bc, abs_tol: 1e-11, rel_tol: 1e-11 }
    }

    pub fn with_tolerances(mut self, abs_tol: f64, rel_tol: f64) -> Result<Self> {
        if !(abs_tol > 0.0 && rel_tol > 0.0) {
            return Err(Error::InvalidArgument(format!("tolerances must be positive (got {abs_tol}, {rel_tol})")));
        }
        self.abs_tol = abs_tol;
        self.rel_tol = rel_tol;
        Ok(self)
    }

    pub(crate) fn tolerance(&self) -> Tolerance {
        Tolerance::new(self.abs_tol, self.rel_tol)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Root search on the Prüfer angle.
    Prufer,
    /// Root search on `u(π, λ)` / `u^{[1]}(π, λ)` with Sturm zero counting.
    Characteristic,
    /// Sine-basis Galerkin truncation.
    Galerkin,
}

/// The first eigenvalues of one problem, in ascending order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub bc: BoundaryCondition,
    pub method: Method,
    pub indices: Vec<usize>,
    /// Square roots with argument in `(−π/2, π/2]`.
    pub rho: Vec<Complex64>,
    pub lambda: Vec<Complex64>,
    pub residuals: Vec<f64>,
    /// Galerkin truncation size, if applicable.
    pub truncation: Option<usize>,
}

impl Spectrum {
    pub(crate) fn from_lambdas(
        bc: BoundaryCondition,
        method: Method,
        lambda: Vec<Complex64>,
        residuals: Vec<f64>,
        truncation: Option<usize>,
    ) -> Self {
        let rho = lambda.iter().map(|&l| principal_sqrt(l)).collect();
        Self { bc, method, indices: (1..=lambda.len()).collect(), rho, lambda, residuals, truncation }
    }

    pub fn len(&self) -> usize {
        self.lambda.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambda.is_empty()
    }

    pub fn lambda_re(&self) -> Vec<f64> {
        self.lambda.iter().map(|l| l.re).collect()
    }

    /// Keeps the first `n` entries.
    pub fn truncated(&self, n: usize) -> Self {
        let n = n.min(self.len());
        Self {
            bc: self.bc,
            method: self.method,
            indices: self.indices[..n].to_vec(),
            rho: self.rho[..n].to_vec(),
            lambda: self.lambda[..n].to_vec(),
            residuals: self.residuals[..n].to_vec(),
            truncation: self.truncation,
        }
    }

    /// CSV with columns `n,re_rho,im_rho,re_lambda,im_lambda,residual`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,re_rho,im_rho,re_lambda,im_lambda,residual\n");
        for i in 0..self.len() {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                self.indices[i],
                fmt_f64(self.rho[i].re),
                fmt_f64(self.rho[i].im),
                fmt_f64(self.lambda[i].re),
                fmt_f64(self.lambda[i].im),
                fmt_f64(self.residuals[i])
            ));
        }
        out
    }
}

/// Square root with argument in `(−π/2, π/2]`.
pub fn principal_sqrt(z: Complex64) -> Complex64 {
    let r = z.sqrt();
    if r.re < 0.0 || (r.re == 0.0 && r.im < 0.0) {
        -r
    } else {
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt_branch() {
        assert_eq!(principal_sqrt(Complex64::new(4.0, 0.0)), Complex64::new(2.0, 0.0));
        assert_eq!(principal_sqrt(Complex64::new(-4.0, 0.0)), Complex64::new(0.0, 2.0));
        assert_eq!(principal_sqrt(Complex64::new(-4.0, -0.0)), Complex64::new(0.0, 2.0));
        let z = principal_sqrt(Complex64::new(-3.0, -1e-3));
        assert!(z.re > 0.0);
    }

    #[test]
    fn csv_layout() {
        let s = Spectrum::from_lambdas(BoundaryCondition::Dirichlet, Method::Prufer, vec![1.0.into()], vec![0.0], None);
        let csv = s.to_csv();
        assert!(csv.starts_with("n,re_rho,im_rho,re_lambda,im_lambda,residual\n1,1.0000000000000000e0,"));
    }
}
