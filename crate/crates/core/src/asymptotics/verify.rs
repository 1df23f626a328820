//! Numerical checks of the decay statements, packaged as JSON-ready reports.

use super::expansion::thm51_fit;
use super::remainder::{phi_hat, phi_of_sigma, rate_fit, remainders, thm41_alphas, window_increment};
use crate::error::{Error, Result};
use crate::galerkin::oracle_spectrum;
use crate::io::fmt_f64;
use crate::potential::PotentialSpec;
use crate::prufer::eigenvalues;
use crate::sequence::{default_window, tau_of_theta};
use crate::spectrum::{BoundaryCondition, SpectralProblem, Spectrum};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;
use std::collections::BTreeMap;
use std::fmt::Write as _;

/// Outcome of one check. Maps are ordered so the JSON is reproducible.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub theorem: String,
    pub inputs: serde_json::Value,
    pub fitted_coeffs: BTreeMap<String, f64>,
    pub linear_parts: BTreeMap<String, f64>,
    pub residual_norms: BTreeMap<String, f64>,
    pub slopes: BTreeMap<String, f64>,
    pub pass_flags: BTreeMap<String, bool>,
    /// Plot data, written separately as CSV.
    #[serde(skip)]
    pub sequences: BTreeMap<String, Vec<f64>>,
}

impl VerificationReport {
    fn new(theorem: &str, inputs: serde_json::Value) -> Self {
        Self { theorem: theorem.into(), inputs, ..Self::default() }
    }

    /// True iff every flag is set (vacuously true without flags).
    pub fn passed(&self) -> bool {
        self.pass_flags.values().all(|&f| f)
    }

    /// `k` followed by one column per sequence; short columns are left blank.
    pub fn sequences_csv(&self) -> String {
        let mut out = String::from("k");
        for name in self.sequences.keys() {
            out.push(',');
            out.push_str(name);
        }
        out.push('\n');
        let rows = self.sequences.values().map(Vec::len).max().unwrap_or(0);
        for i in 0..rows {
            write!(out, "{}", i + 1).unwrap();
            for seq in self.sequences.values() {
                out.push(',');
                if let Some(&v) = seq.get(i) {
                    out.push_str(&fmt_f64(v));
                }
            }
            out.push('\n');
        }
        out
    }
}

/// Spectrum sizes and solver tolerances shared by the suites.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteOptions {
    /// Eigenvalues per boundary condition; sequences have length `2 n_max`.
    pub n_max: usize,
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Convergence tolerance of the Galerkin oracle (complex σ only).
    pub oracle_tol: f64,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self { n_max: 100, abs_tol: 1e-12, rel_tol: 1e-12, oracle_tol: 1e-9 }
    }
}

impl SuiteOptions {
    fn to_json(self) -> serde_json::Value {
        serde_json::to_value(self).expect("plain struct")
    }
}

/// Dirichlet and Dirichlet–Neumann spectra: Prüfer search for real σ,
/// the Galerkin oracle otherwise.
pub fn compute_spectra(sigma: &PotentialSpec, opts: &SuiteOptions) -> Result<(Spectrum, Spectrum)> {
    let solve = |bc| -> Result<Spectrum> {
        let p = SpectralProblem::new(sigma.clone(), bc).with_tolerances(opts.abs_tol, opts.rel_tol)?;
        if sigma.is_real() {
            eigenvalues(&p, opts.n_max)
        } else {
            oracle_spectrum(&p, opts.n_max, opts.oracle_tol)
        }
    };
    Ok((solve(BoundaryCondition::Dirichlet)?, solve(BoundaryCondition::DirichletNeumann)?))
}

/// `Φ = s + ½Tσ` for the given σ.
pub fn phi_sequence(sigma: &PotentialSpec, opts: &SuiteOptions) -> Result<Vec<Complex64>> {
    let (d, dn) = compute_spectra(sigma, opts)?;
    Ok(phi_of_sigma(sigma, &remainders(&d, &dn, 0.0)?))
}

fn l2(seq: &[Complex64]) -> f64 {
    seq.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

/// Default scales for the derivative check.
pub const DERIVATIVE_EPSILONS: [f64; 3] = [0.1, 0.05, 0.025];

/// Values below this count as exactly zero in the trend checks.
const NEGLIGIBLE: f64 = 1e-13;

/// `‖Φ(εσ)‖₂ / ε` for each ε. Since `Φ` is quadratically small at 0 the
/// ratios shrink in proportion to ε.
pub fn derivative_ratios(sigma: &PotentialSpec, eps: &[f64], opts: &SuiteOptions) -> Result<Vec<f64>> {
    eps.iter().map(|&e| Ok(l2(&phi_sequence(&sigma.scaled(e), opts)?) / e)).collect()
}

fn halving_flags(report: &mut VerificationReport, eps: &[f64], ratios: &[f64]) {
    let mut ok = true;
    for (i, (&e, &r)) in eps.iter().zip(ratios).enumerate() {
        report.residual_norms.insert(format!("ratio_eps_{e}"), r);
        if i > 0 {
            let prev = ratios[i - 1];
            let factor = if r > NEGLIGIBLE { prev / r } else { f64::INFINITY };
            if r > NEGLIGIBLE {
                report.residual_norms.insert(format!("shrink_factor_eps_{e}"), factor);
            }
            // The ε values halve, so a quadratic remainder halves the ratio.
            let halves = (eps[i - 1] / e - 2.0).abs() < 1e-12;
            ok &= !halves || factor >= 1.8;
        }
    }
    report.pass_flags.insert("derivative_ratio_shrinks".into(), ok);
}

/// Derivative of the remainder map at 0 along σ.
pub fn verify_derivative(sigma: &PotentialSpec, eps: &[f64], opts: &SuiteOptions) -> Result<VerificationReport> {
    if eps.is_empty() || eps.iter().any(|&e| !(e > 0.0)) {
        return Err(Error::InvalidArgument("ε values must be positive".into()));
    }
    let mut report =
        VerificationReport::new("derivative", json!({"sigma": sigma, "eps": eps, "options": opts.to_json()}));
    let ratios = derivative_ratios(sigma, eps, opts)?;
    report.sequences.insert("ratio".into(), ratios.clone());
    halving_flags(&mut report, eps, &ratios);
    Ok(report)
}

/// `Φ(σ)` lies in the extended space of index `τ(θ)`, and is quadratically
/// small near 0.
pub fn verify_main_theorem(sigma: &PotentialSpec, theta: f64, opts: &SuiteOptions) -> Result<VerificationReport> {
    let mut report =
        VerificationReport::new("main-theorem", json!({"sigma": sigma, "theta": theta, "options": opts.to_json()}));
    let (d, dn) = compute_spectra(sigma, opts)?;
    let r = remainders(&d, &dn, theta)?;
    let phi = phi_of_sigma(sigma, &r);
    let hat = phi_hat(sigma, &r, theta)?;
    let (lo, hi) = default_window(phi.len());
    report.inputs["fit_window"] = json!([lo, hi]);
    report.inputs["tau"] = json!(tau_of_theta(theta));
    for (j, a) in hat.alphas.iter().enumerate() {
        report.fitted_coeffs.insert(format!("hat_alpha_{}_re", j + 1), a.re);
        report.fitted_coeffs.insert(format!("hat_alpha_{}_im", j + 1), a.im);
    }
    let norm = hat.norm();
    report.residual_norms.insert("phi_hat_norm".into(), norm);
    report.residual_norms.insert("phi_l2".into(), l2(&phi));
    report.residual_norms.insert("s_l2".into(), l2(&r.s_values));
    if let Ok(n) = sigma.sobolev_norm(theta) {
        report.residual_norms.insert("sigma_theta_norm".into(), n);
    }
    if l2(&phi) > NEGLIGIBLE {
        if let Ok((slope, _)) = rate_fit(&phi, lo, hi) {
            report.slopes.insert("phi".into(), slope);
        }
    }
    report.sequences.insert("phi_re".into(), phi.iter().map(|v| v.re).collect());
    report.sequences.insert("phi_im".into(), phi.iter().map(|v| v.im).collect());
    report.sequences.insert("s_re".into(), r.s_values.iter().map(|v| v.re).collect());
    report.pass_flags.insert("phi_hat_norm_finite".into(), norm.is_finite());
    let ratios = derivative_ratios(sigma, &DERIVATIVE_EPSILONS, opts)?;
    halving_flags(&mut report, &DERIVATIVE_EPSILONS, &ratios);
    Ok(report)
}

/// Random potentials in the `θ`-ball of radius `R`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub theta: f64,
    pub radius: f64,
    pub count: usize,
    pub seed: u64,
    /// Number of cosine modes per sample.
    #[serde(default = "default_modes")]
    pub modes: usize,
    /// Extra coefficient decay beyond `k^{−θ−1/2}`.
    #[serde(default = "default_margin")]
    pub margin: f64,
}

fn default_modes() -> usize {
    64
}

fn default_margin() -> f64 {
    0.1
}

impl EnsembleSpec {
    pub fn new(theta: f64, radius: f64, count: usize, seed: u64) -> Self {
        Self { theta, radius, count, seed, modes: default_modes(), margin: default_margin() }
    }

    /// Member `i` uses seed `seed + i`.
    pub fn member(&self, i: usize) -> Result<PotentialSpec> {
        PotentialSpec::sample_ball(self.theta, self.radius, self.margin, self.modes, self.seed.wrapping_add(i as u64))
    }

    pub fn members(&self) -> Result<Vec<PotentialSpec>> {
        if self.count == 0 {
            return Err(Error::InvalidArgument("ensemble count must be at least 1".into()));
        }
        (0..self.count).map(|i| self.member(i)).collect()
    }
}

/// Windows `[K/4, K/2]` and `(K/2, K]` for a sequence of length `K`.
fn dyadic_windows(len: usize) -> ((usize, usize), (usize, usize)) {
    ((len / 4, len / 2), (len / 2 + 1, len))
}

/// Increments of `Σ k^{2θ}|Φ_k|²` over two dyadic windows decrease for at
/// least 90% of the ensemble.
pub fn verify_thm21(ensemble: &EnsembleSpec, opts: &SuiteOptions) -> Result<VerificationReport> {
    let mut report = VerificationReport::new("thm21", json!({"ensemble": ensemble, "options": opts.to_json()}));
    let members = ensemble.members()?;
    let phis: Vec<Vec<Complex64>> = members.par_iter().map(|s| phi_sequence(s, opts)).collect::<Result<Vec<_>>>()?;
    let len = 2 * opts.n_max;
    let (w1, w2) = dyadic_windows(len);
    report.inputs["windows"] = json!([[w1.0, w1.1], [w2.0, w2.1]]);
    let mut lo_inc = Vec::new();
    let mut hi_inc = Vec::new();
    for phi in &phis {
        lo_inc.push(window_increment(phi, ensemble.theta, w1.0, w1.1));
        hi_inc.push(window_increment(phi, ensemble.theta, w2.0, w2.1));
    }
    let decreasing = lo_inc.iter().zip(&hi_inc).filter(|(a, b)| b < a).count();
    let fraction = decreasing as f64 / phis.len() as f64;
    report.residual_norms.insert("fraction_decreasing".into(), fraction);
    let worst = lo_inc.iter().zip(&hi_inc).map(|(a, b)| b / a).fold(0.0, f64::max);
    report.residual_norms.insert("max_increment_ratio".into(), worst);
    report.sequences.insert("increment_low_window".into(), lo_inc);
    report.sequences.insert("increment_high_window".into(), hi_inc);
    report.pass_flags.insert("increments_decrease_for_90_percent".into(), fraction >= 0.9);
    Ok(report)
}

/// The scaled remainders `α_k` of the second-order expansion stay bounded
/// in `l₂` (log-log slope at most −½).
pub fn verify_thm41(sigma: &PotentialSpec, opts: &SuiteOptions) -> Result<VerificationReport> {
    let mut report = VerificationReport::new("thm41", json!({"sigma": sigma, "options": opts.to_json()}));
    let (d, dn) = compute_spectra(sigma, opts)?;
    let alpha = thm41_alphas(sigma, &d, &dn)?;
    let (s0, spi) = sigma.endpoints();
    report.linear_parts.insert("h1".into(), ((spi - s0) / std::f64::consts::PI).re);
    report.linear_parts.insert("g1".into(), (-(s0 + spi) / std::f64::consts::PI).re);
    let (lo, hi) = default_window(alpha.len());
    report.inputs["fit_window"] = json!([lo, hi]);
    report.residual_norms.insert("alpha_l2".into(), l2(&alpha));
    report.sequences.insert("alpha_re".into(), alpha.iter().map(|v| v.re).collect());
    let negligible = alpha.iter().all(|a| a.norm() < 1e-9);
    if negligible {
        report.pass_flags.insert("alpha_negligible".into(), true);
        return Ok(report);
    }
    let (slope, _) = rate_fit(&alpha, lo, hi)?;
    report.slopes.insert("alpha".into(), slope);
    let even: Vec<Complex64> = alpha.iter().skip(1).step_by(2).copied().collect();
    let odd: Vec<Complex64> = alpha.iter().step_by(2).copied().collect();
    let (elo, ehi) = default_window(even.len());
    for (name, seq) in [("alpha_even", &even), ("alpha_odd", &odd)] {
        if seq.iter().any(|a| a.norm() >= 1e-9) {
            if let Ok((s, _)) = rate_fit(seq, elo, ehi) {
                report.slopes.insert(name.into(), s);
            }
        }
    }
    report.pass_flags.insert("alpha_slope_at_most_minus_half".into(), slope <= -0.5);
    Ok(report)
}

/// Order-`m` expansion: fitted coefficients against their linear parts and
/// the scaled residual tail.
pub fn verify_thm51(sigma: &PotentialSpec, m: usize, opts: &SuiteOptions) -> Result<VerificationReport> {
    let mut report = VerificationReport::new("thm51", json!({"sigma": sigma, "m": m, "options": opts.to_json()}));
    let (d, dn) = compute_spectra(sigma, opts)?;
    let k_lo = (opts.n_max / 10).max(5);
    let fit = thm51_fit(sigma, &d, &dn, m, k_lo)?;
    report.inputs["fit_window"] = json!([fit.window.0, fit.window.1]);
    for (j, (h, g)) in fit.coeffs.h.iter().zip(&fit.coeffs.g).enumerate() {
        report.fitted_coeffs.insert(format!("h{j}"), *h);
        report.fitted_coeffs.insert(format!("g{j}"), *g);
    }
    for (j, (h, g)) in fit.h_linear.iter().zip(&fit.g_linear).enumerate() {
        report.linear_parts.insert(format!("h{j}"), *h);
        report.linear_parts.insert(format!("g{j}"), *g);
    }
    let alpha: Vec<Complex64> = fit.alpha.iter().map(|&a| a.into()).collect();
    let ((a0, a1), (b0, b1)) = dyadic_windows(alpha.len());
    let inc_lo = window_increment(&alpha, 0.0, a0, a1);
    let inc_hi = window_increment(&alpha, 0.0, b0, b1);
    report.residual_norms.insert("alpha_l2".into(), l2(&alpha));
    report.residual_norms.insert("alpha_increment_low_window".into(), inc_lo);
    report.residual_norms.insert("alpha_increment_high_window".into(), inc_hi);
    report.sequences.insert("alpha".into(), fit.alpha.clone());
    // h₀ and g₀ are linear in σ, so the fit must reproduce them.
    let close = |fitted: f64, exact: f64| (fitted - exact).abs() <= 1e-3 * exact.abs().max(1.0);
    report.pass_flags.insert("h0_matches_linear_part".into(), close(fit.coeffs.h[0], fit.h_linear[0]));
    report.pass_flags.insert("g0_matches_linear_part".into(), close(fit.coeffs.g[0], fit.g_linear[0]));
    report.pass_flags.insert("alpha_tail_nonincreasing".into(), inc_hi <= inc_lo || inc_hi < 1e-16);
    Ok(report)
}

/// `‖Φ(σ_i)‖` in the extended space of index `τ(θ)`, per ensemble member.
pub fn ensemble_phi_norms(ensemble: &EnsembleSpec, opts: &SuiteOptions) -> Result<Vec<f64>> {
    let members = ensemble.members()?;
    members
        .par_iter()
        .map(|s| {
            let (d, dn) = compute_spectra(s, opts)?;
            let r = remainders(&d, &dn, ensemble.theta)?;
            Ok(phi_hat(s, &r, ensemble.theta)?.norm())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> SuiteOptions {
        SuiteOptions { n_max: 40, ..SuiteOptions::default() }
    }

    #[test]
    fn zero_potential_passes_with_zero_norms() {
        let r = verify_main_theorem(&PotentialSpec::zero(), 1.0, &small()).unwrap();
        assert!(r.passed(), "{r:?}");
        assert!(r.residual_norms["phi_hat_norm"] < 1e-12);
        assert!(r.residual_norms["ratio_eps_0.1"] < 1e-12);
    }

    #[test]
    fn constant_potential_suites_pass() {
        let q1 = PotentialSpec::constant_q(1.0);
        let r = verify_thm41(&q1, &small()).unwrap();
        assert!(r.passed(), "{r:?}");
        assert!(r.slopes["alpha_even"] < -0.9);
        let r = verify_thm51(&q1, 2, &small()).unwrap();
        assert!(r.passed(), "{r:?}");
        assert!((r.fitted_coeffs["h0"] - 1.0).abs() < 1e-3);
    }

    #[test]
    fn report_round_trip_and_csv() {
        let r = verify_derivative(&PotentialSpec::sine(&[0.0, 1.0]), &DERIVATIVE_EPSILONS, &small()).unwrap();
        assert!(r.passed(), "{r:?}");
        let text = serde_json::to_string(&r).unwrap();
        let back: VerificationReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back.pass_flags, r.pass_flags);
        let csv = r.sequences_csv();
        assert!(csv.starts_with("k,ratio\n1,"));
        assert_eq!(csv.lines().count(), 4);
    }

    #[test]
    fn ensemble_members_are_seeded() {
        let e = EnsembleSpec::new(1.0, 2.0, 3, 7);
        assert_eq!(e.member(1).unwrap(), EnsembleSpec::new(1.0, 2.0, 1, 8).member(0).unwrap());
        assert!(EnsembleSpec::new(1.0, 2.0, 0, 7).members().is_err());
    }
}
