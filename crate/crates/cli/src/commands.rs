//! Subcommand bodies. Every command writes its files through
//! [`write_atomic`], so a failed run never leaves half-written output.

use crate::config::{RunConfig, Theorem};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;
use slspec::asymptotics::{
    ensemble_phi_norms, expansion_order, f_recurrence, verify_derivative, verify_main_theorem, verify_thm21,
    verify_thm41, verify_thm51, EnsembleSpec, VerificationReport,
};
use slspec::galerkin::{assemble, oracle_spectrum};
use slspec::io::{fmt_f64, write_atomic};
use slspec::prufer::{characteristic_eigenvalues, eigenvalues};
use slspec::sensitivity::{asymptotic_gap, eigenvalue_derivative, fd_check};
use slspec::{BoundaryCondition, Error, Method, PotentialSpec, SpectralProblem, Spectrum};
use std::fmt::Write as _;
use std::path::Path;

/// Why a command stopped; each kind has its own exit code.
#[derive(Debug)]
pub enum Failure {
    Config(String),
    Solver(String),
    Internal(String),
    /// The run finished but some verification check failed.
    Checks(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => 1,
            Self::Solver(_) => 2,
            Self::Internal(_) => 3,
            Self::Checks(_) => 4,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Self::Config(m) | Self::Solver(m) | Self::Internal(m) | Self::Checks(m) => m,
        }
    }
}

/// Invalid input is a configuration error; numerical breakdowns are solver
/// failures; anything else is internal.
fn classify(e: Error) -> Failure {
    match e {
        Error::InvalidArgument(_)
        | Error::InvalidPotential(_)
        | Error::OutOfDomain(_)
        | Error::InsufficientSmoothness(_)
        | Error::LengthMismatch(..) => Failure::Config(e.to_string()),
        Error::Io(_) | Error::Json(_) => Failure::Internal(e.to_string()),
        _ => Failure::Solver(e.to_string()),
    }
}

/// For the analysis commands a numerical breakdown is an internal failure.
fn classify_internal(e: Error) -> Failure {
    match classify(e) {
        Failure::Solver(m) => Failure::Internal(m),
        f => f,
    }
}

fn config(msg: String) -> Failure {
    Failure::Config(msg)
}

fn write(path: &Path, contents: &str) -> Result<(), Failure> {
    write_atomic(path, contents.as_bytes()).map_err(|e| Failure::Internal(format!("{}: {e}", path.display())))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Failure::Internal(e.to_string()))?;
    text.push('\n');
    write(path, &text)
}

fn problem(cfg: &RunConfig, sigma: &PotentialSpec, bc: BoundaryCondition) -> Result<SpectralProblem, Failure> {
    SpectralProblem::new(sigma.clone(), bc).with_tolerances(cfg.abs_tol, cfg.rel_tol).map_err(classify)
}

fn solve_one(cfg: &RunConfig, sigma: &PotentialSpec, bc: BoundaryCondition) -> Result<Spectrum, Failure> {
    let p = problem(cfg, sigma, bc)?;
    let method = cfg.method.unwrap_or(if sigma.is_real() { Method::Prufer } else { Method::Galerkin });
    match method {
        Method::Prufer => eigenvalues(&p, cfg.n_max),
        Method::Characteristic => characteristic_eigenvalues(&p, cfg.n_max),
        Method::Galerkin => oracle_spectrum(&p, cfg.n_max, cfg.oracle_tol),
    }
    .map_err(classify)
}

fn write_spectrum(dir: &Path, stem: &str, s: &Spectrum) -> Result<(), Failure> {
    write(&dir.join(format!("{stem}.csv")), &s.to_csv())?;
    write_json(&dir.join(format!("{stem}.json")), s)
}

/// Spectra of one potential, or of every ensemble member.
pub fn solve(cfg: &RunConfig) -> Result<(), Failure> {
    if let Some(e) = &cfg.ensemble {
        let members = e.members().map_err(classify)?;
        let spectra: Vec<Vec<Spectrum>> = members
            .par_iter()
            .map(|s| cfg.bc.iter().map(|&bc| solve_one(cfg, s, bc)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<_, _>>()?;
        for (i, per_bc) in spectra.iter().enumerate() {
            let seed = e.seed.wrapping_add(i as u64);
            for s in per_bc {
                write_spectrum(&cfg.out, &format!("member_{i:03}_seed_{seed}_{}", s.bc.name()), s)?;
            }
        }
        return Ok(());
    }
    let sigma = cfg.potential().map_err(config)?;
    for &bc in &cfg.bc {
        write_spectrum(&cfg.out, &format!("spectrum_{}", bc.name()), &solve_one(cfg, sigma, bc)?)?;
    }
    Ok(())
}

fn max_relative_difference(a: &Spectrum, b: &Spectrum) -> f64 {
    a.lambda.iter().zip(&b.lambda).map(|(x, y)| (x - y).norm() / y.norm().max(1.0)).fold(0.0, f64::max)
}

/// The Galerkin oracle, compared with both shooting solvers when σ is real.
pub fn oracle(cfg: &RunConfig) -> Result<(), Failure> {
    let sigma = cfg.potential().map_err(config)?;
    for &bc in &cfg.bc {
        let p = problem(cfg, sigma, bc)?;
        let galerkin = oracle_spectrum(&p, cfg.n_max, cfg.oracle_tol).map_err(classify)?;
        write_spectrum(&cfg.out, &format!("oracle_{}", bc.name()), &galerkin)?;
        let mut summary = json!({"bc": bc, "n_max": cfg.n_max, "truncation": galerkin.truncation});
        if sigma.is_real() {
            let prufer = eigenvalues(&p, cfg.n_max).map_err(classify)?;
            let chr = characteristic_eigenvalues(&p, cfg.n_max).map_err(classify)?;
            summary["max_relative_difference"] = json!({
                "galerkin_vs_prufer": max_relative_difference(&galerkin, &prufer),
                "galerkin_vs_characteristic": max_relative_difference(&galerkin, &chr),
                "prufer_vs_characteristic": max_relative_difference(&prufer, &chr),
            });
        }
        write_json(&cfg.out.join(format!("oracle_{}_summary.json", bc.name())), &summary)?;
        if cfg.dump_matrix {
            let n = galerkin.truncation.unwrap_or(4 * cfg.n_max);
            let m = assemble(&p, n).map_err(classify)?;
            write(&cfg.out.join(format!("galerkin_matrix_{}.csv", bc.name())), &m.to_csv())?;
        }
    }
    Ok(())
}

/// Runs one verification suite; the report is written even when a check fails.
pub fn verify(cfg: &RunConfig) -> Result<(), Failure> {
    let theorem = cfg.theorem.ok_or_else(|| config("verify needs a \"theorem\" selector".into()))?;
    let opts = cfg.suite_options();
    let report: VerificationReport = match theorem {
        Theorem::MainTheorem => verify_main_theorem(cfg.potential().map_err(config)?, cfg.theta, &opts),
        Theorem::Derivative => verify_derivative(cfg.potential().map_err(config)?, &cfg.eps, &opts),
        Theorem::Thm21 => verify_thm21(cfg.ensemble().map_err(config)?, &opts),
        Theorem::Thm41 => verify_thm41(cfg.potential().map_err(config)?, &opts),
        Theorem::Thm51 => verify_thm51(cfg.potential().map_err(config)?, cfg.m, &opts),
    }
    .map_err(classify_internal)?;
    let stem = format!("report_{}", theorem.name());
    write_json(&cfg.out.join(format!("{stem}.json")), &report)?;
    write(&cfg.out.join(format!("{stem}_sequences.csv")), &report.sequences_csv())?;
    if report.passed() {
        Ok(())
    } else {
        let failed: Vec<&str> = report.pass_flags.iter().filter(|(_, &v)| !v).map(|(k, _)| k.as_str()).collect();
        Err(Failure::Checks(format!("{} failed: {}", theorem.name(), failed.join(", "))))
    }
}

#[derive(Serialize)]
struct EnsembleStats {
    radius: f64,
    count: usize,
    max: f64,
    mean: f64,
    /// Maxima over the first and second half of the members.
    half_maxima: [f64; 2],
    /// `min(half maxima) / max`; near 1 when the maximum is stable.
    half_stability: f64,
}

fn stats(radius: f64, norms: &[f64]) -> EnsembleStats {
    let max = norms.iter().copied().fold(0.0, f64::max);
    let mean = norms.iter().sum::<f64>() / norms.len() as f64;
    let half = norms.len().div_ceil(2);
    let h0 = norms[..half].iter().copied().fold(0.0, f64::max);
    let h1 = norms[half..].iter().copied().fold(0.0, f64::max);
    let half_stability = if max > 0.0 { h0.min(if norms.len() > 1 { h1 } else { h0 }) / max } else { 1.0 };
    EnsembleStats { radius, count: norms.len(), max, mean, half_maxima: [h0, h1], half_stability }
}

/// Extended-space norms of Φ over an ensemble, optionally for several radii.
pub fn ensemble(cfg: &RunConfig) -> Result<(), Failure> {
    let e = cfg.ensemble().map_err(config)?;
    let opts = cfg.suite_options();
    let norms = ensemble_phi_norms(e, &opts).map_err(classify_internal)?;
    let mut sweep = Vec::new();
    for &r in &cfg.radii {
        let spec = EnsembleSpec { radius: r, ..*e };
        let n = ensemble_phi_norms(&spec, &opts).map_err(classify_internal)?;
        sweep.push(stats(r, &n));
    }
    let report = json!({
        "ensemble": e,
        "options": opts,
        "norms": norms,
        "summary": stats(e.radius, &norms),
        "radius_sweep": sweep,
    });
    write_json(&cfg.out.join("ensemble.json"), &report)?;
    let mut csv = String::from("member,seed,phi_hat_norm\n");
    for (i, n) in norms.iter().enumerate() {
        writeln!(csv, "{i},{},{}", e.seed.wrapping_add(i as u64), fmt_f64(*n)).unwrap();
    }
    write(&cfg.out.join("ensemble_norms.csv"), &csv)
}

/// The expansion of the sine-type solution at π against direct quadrature,
/// plus the coefficient tables.
pub fn expand(cfg: &RunConfig) -> Result<(), Failure> {
    let sigma = cfg.potential().map_err(config)?;
    let estimate = expansion_order(sigma, cfg.m, cfg.rho).map_err(classify)?;
    write_json(&cfg.out.join("expansion.json"), &estimate)?;
    let table = f_recurrence(sigma, cfg.m).map_err(classify)?;
    let points = 64;
    let mut csv = String::from("p,j,x,value\n");
    for (p, j, values) in table.grid_values(points) {
        for (i, v) in values.iter().enumerate() {
            let x = std::f64::consts::PI * i as f64 / points as f64;
            writeln!(csv, "{p},{j},{},{}", fmt_f64(x), fmt_f64(*v)).unwrap();
        }
    }
    write(&cfg.out.join("f_table.csv"), &csv)
}

/// Eigenvalue derivatives along a direction, their finite-difference
/// errors, and the eigenfunction gaps.
pub fn sensitivity(cfg: &RunConfig) -> Result<(), Failure> {
    let sigma = cfg.potential().map_err(config)?;
    let s = cfg.sensitivity.as_ref().ok_or_else(|| config("sensitivity needs a \"sensitivity\" block".into()))?;
    if s.ks.is_empty() || s.ks.contains(&0) {
        return Err(config("sensitivity.ks must list indices ≥ 1".into()));
    }
    let mut per_bc = Vec::new();
    let mut csv = String::from("bc,k,d_lambda,d_s,fd_error,gap\n");
    for &bc in &cfg.bc {
        let p = problem(cfg, sigma, bc)?;
        let rows: Vec<_> =
            s.ks.par_iter()
                .map(|&k| -> Result<_, Error> {
                    let d = eigenvalue_derivative(&p, &s.direction, k)?;
                    let fd = fd_check(&p, &s.direction, k, s.t)?;
                    Ok((d, fd))
                })
                .collect::<Result<_, _>>()
                .map_err(classify)?;
        let gaps = asymptotic_gap(&p, &s.ks).map_err(classify)?;
        for ((d, fd), g) in rows.iter().zip(&gaps) {
            writeln!(
                csv,
                "{},{},{},{},{},{}",
                bc.name(),
                d.k,
                fmt_f64(d.d_lambda),
                d.d_s.map(fmt_f64).unwrap_or_default(),
                fmt_f64(*fd),
                fmt_f64(*g)
            )
            .unwrap();
        }
        let entries: Vec<_> = rows
            .iter()
            .zip(&gaps)
            .map(|((d, fd), g)| {
                json!({"k": d.k, "lambda": d.lambda, "d_lambda": d.d_lambda, "d_s": d.d_s, "fd_error": fd, "gap": g})
            })
            .collect();
        per_bc.push(json!({"bc": bc, "entries": entries}));
    }
    let report = json!({"sigma": sigma, "direction": s.direction, "t": s.t, "results": per_bc});
    write_json(&cfg.out.join("sensitivity.json"), &report)?;
    write(&cfg.out.join("sensitivity.csv"), &csv)
}
