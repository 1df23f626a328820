//! The JSON run configuration and its command-line overrides.

use serde::{Deserialize, Serialize};
use slspec::asymptotics::{EnsembleSpec, SuiteOptions, DERIVATIVE_EPSILONS};
use slspec::{BoundaryCondition, Method, PotentialSpec};
use std::path::{Path, PathBuf};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub potential: Option<PotentialSpec>,
    #[serde(default)]
    pub ensemble: Option<EnsembleSpec>,
    #[serde(default = "both_bcs")]
    pub bc: Vec<BoundaryCondition>,
    #[serde(default = "default_n_max")]
    pub n_max: usize,
    /// Solver for `solve`; defaults to Prüfer for real σ and Galerkin otherwise.
    #[serde(default)]
    pub method: Option<Method>,
    /// `verify` selector.
    #[serde(default)]
    pub theorem: Option<Theorem>,
    #[serde(default = "default_theta")]
    pub theta: f64,
    /// Expansion order for `thm51` and `expand`.
    #[serde(default = "default_m")]
    pub m: usize,
    #[serde(default = "default_eps")]
    pub eps: Vec<f64>,
    #[serde(default = "default_tol")]
    pub abs_tol: f64,
    #[serde(default = "default_tol")]
    pub rel_tol: f64,
    #[serde(default = "default_oracle_tol")]
    pub oracle_tol: f64,
    #[serde(default = "default_out")]
    pub out: PathBuf,
    /// `oracle`: also write the final Galerkin matrix.
    #[serde(default)]
    pub dump_matrix: bool,
    /// `expand`: the two ρ values of the order estimate.
    #[serde(default = "default_rho")]
    pub rho: [f64; 2],
    /// `ensemble`: optional radius sweep.
    #[serde(default)]
    pub radii: Vec<f64>,
    #[serde(default)]
    pub sensitivity: Option<SensitivityConfig>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SensitivityConfig {
    /// Direction in σ-space.
    pub direction: PotentialSpec,
    pub ks: Vec<usize>,
    #[serde(default = "default_step")]
    pub t: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Theorem {
    #[serde(rename = "main-theorem")]
    MainTheorem,
    #[serde(rename = "derivative")]
    Derivative,
    #[serde(rename = "thm21")]
    Thm21,
    #[serde(rename = "thm41")]
    Thm41,
    #[serde(rename = "thm51")]
    Thm51,
}

impl Theorem {
    pub fn name(self) -> &'static str {
        match self {
            Self::MainTheorem => "main-theorem",
            Self::Derivative => "derivative",
            Self::Thm21 => "thm21",
            Self::Thm41 => "thm41",
            Self::Thm51 => "thm51",
        }
    }
}

fn both_bcs() -> Vec<BoundaryCondition> {
    vec![BoundaryCondition::Dirichlet, BoundaryCondition::DirichletNeumann]
}

fn default_n_max() -> usize {
    20
}

fn default_theta() -> f64 {
    1.0
}

fn default_m() -> usize {
    2
}

fn default_eps() -> Vec<f64> {
    DERIVATIVE_EPSILONS.to_vec()
}

fn default_tol() -> f64 {
    1e-11
}

fn default_oracle_tol() -> f64 {
    1e-9
}

fn default_out() -> PathBuf {
    PathBuf::from("out")
}

fn default_rho() -> [f64; 2] {
    [40.0, 80.0]
}

fn default_step() -> f64 {
    1e-4
}

/// Scalar settings that can be given on the command line.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub n_max: Option<usize>,
    pub out: Option<PathBuf>,
    pub bc: Option<Vec<BoundaryCondition>>,
    pub seed: Option<u64>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        serde_json::from_str(&text).map_err(|e| format!("invalid config {}: {e}", path.display()))
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(n) = o.n_max {
            self.n_max = n;
        }
        if let Some(out) = &o.out {
            self.out = out.clone();
        }
        if let Some(bc) = &o.bc {
            self.bc = bc.clone();
        }
        if let (Some(seed), Some(e)) = (o.seed, self.ensemble.as_mut()) {
            e.seed = seed;
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.n_max == 0 {
            return Err("n_max must be at least 1".into());
        }
        if self.bc.is_empty() {
            return Err("at least one boundary condition is required".into());
        }
        if let Some(e) = &self.ensemble {
            if e.count == 0 {
                return Err("ensemble count must be at least 1".into());
            }
        }
        if self.potential.is_some() && self.ensemble.is_some() {
            return Err("give either a potential or an ensemble, not both".into());
        }
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0 && self.oracle_tol > 0.0) {
            return Err("tolerances must be positive".into());
        }
        Ok(())
    }

    pub fn suite_options(&self) -> SuiteOptions {
        SuiteOptions { n_max: self.n_max, abs_tol: self.abs_tol, rel_tol: self.rel_tol, oracle_tol: self.oracle_tol }
    }

    pub fn potential(&self) -> Result<&PotentialSpec, String> {
        self.potential.as_ref().ok_or_else(|| "this command needs a \"potential\"".to_string())
    }

    pub fn ensemble(&self) -> Result<&EnsembleSpec, String> {
        self.ensemble.as_ref().ok_or_else(|| "this command needs an \"ensemble\"".to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_overrides() {
        let mut c: RunConfig =
            serde_json::from_str(r#"{"ensemble": {"theta": 1, "radius": 2, "count": 3, "seed": 5}}"#).unwrap();
        assert_eq!(c.n_max, 20);
        assert_eq!(c.bc.len(), 2);
        c.apply(&Overrides {
            n_max: Some(7),
            seed: Some(9),
            bc: Some(vec![BoundaryCondition::Dirichlet]),
            ..Default::default()
        });
        assert_eq!((c.n_max, c.ensemble.unwrap().seed, c.bc.len()), (7, 9, 1));
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(serde_json::from_str::<RunConfig>(r#"{"nmax": 3}"#).is_err());
        let c: RunConfig = serde_json::from_str(r#"{"n_max": 0}"#).unwrap();
        assert!(c.validate().is_err());
        let c: RunConfig = serde_json::from_str(r#"{"theorem": "thm41"}"#).unwrap();
        assert_eq!(c.theorem, Some(Theorem::Thm41));
    }
}
