//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line
//! with the measured quantities; the process fails if any criterion fails.

use num_complex::Complex64;
use rayon::prelude::*;
use slspec::asymptotics::{
    expansion_order, rate_fit, rate_fit_points, thm51_fit, verify_derivative, verify_thm21, verify_thm41, EnsembleSpec,
    SuiteOptions, DERIVATIVE_EPSILONS,
};
use slspec::galerkin::oracle_spectrum;
use slspec::prufer::{
    characteristic_eigenvalues, eigenvalues, fixed_point_theta, fourier_f_envelope, prufer_integrate_on, strip_check,
};
use slspec::sensitivity::{asymptotic_gap, eigenvalue_derivative, fd_check};
use slspec::{BoundaryCondition, Error, PotentialSpec, SpectralProblem, Tolerance};
use std::f64::consts::PI;
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::Instant;

type Outcome = Result<(bool, String), String>;

const BOTH: [BoundaryCondition; 2] = [BoundaryCondition::Dirichlet, BoundaryCondition::DirichletNeumann];

fn err(e: Error) -> String {
    e.to_string()
}

fn precise(sigma: PotentialSpec, bc: BoundaryCondition) -> SpectralProblem {
    SpectralProblem::new(sigma, bc).with_tolerances(1e-13, 1e-13).unwrap()
}

fn c1_exactness() -> Outcome {
    let start = Instant::now();
    let mut worst_free = 0.0f64;
    let mut worst_shift = 0.0f64;
    for bc in BOTH {
        let free = eigenvalues(&precise(PotentialSpec::zero(), bc), 50).map_err(err)?.lambda_re();
        for (n, l) in free.iter().enumerate() {
            worst_free = worst_free.max((l - bc.frequency(n + 1).powi(2)).abs());
        }
        for c in [1.0, -0.5] {
            let shifted = eigenvalues(&precise(PotentialSpec::constant_q(c), bc), 50).map_err(err)?.lambda_re();
            for (n, l) in shifted.iter().enumerate() {
                worst_shift = worst_shift.max((l - bc.frequency(n + 1).powi(2) - c).abs());
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    Ok((
        worst_free <= 1e-9 && worst_shift <= 1e-8 && secs < 10.0,
        format!("max error σ=0 {worst_free:.2e}, q=const {worst_shift:.2e}, {secs:.1} s"),
    ))
}

fn c2_cross_oracle() -> Outcome {
    let start = Instant::now();
    let ensemble = EnsembleSpec::new(1.0, 2.0, 10, 2024);
    let members = ensemble.members().map_err(err)?;
    let worst = members
        .par_iter()
        .map(|sigma| -> Result<f64, String> {
            let mut worst = 0.0f64;
            for bc in BOTH {
                let p = SpectralProblem::new(sigma.clone(), bc);
                let a = eigenvalues(&p, 20).map_err(err)?;
                let b = characteristic_eigenvalues(&p, 20).map_err(err)?;
                let c = oracle_spectrum(&p, 20, 1e-9).map_err(err)?;
                for k in 0..20 {
                    let (x, y, z) = (a.lambda[k], b.lambda[k], c.lambda[k]);
                    let scale = x.norm().max(1.0);
                    worst = worst.max((x - y).norm() / scale).max((x - z).norm() / scale).max((y - z).norm() / scale);
                }
            }
            Ok(worst)
        })
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .fold(0.0, f64::max);
    let secs = start.elapsed().as_secs_f64();
    Ok((worst <= 1e-6 && secs < 120.0, format!("max relative disagreement {worst:.2e}, {secs:.1} s")))
}

fn c3_derivative_at_zero() -> Outcome {
    let sigma = PotentialSpec::sine(&[0.0, 1.0]);
    let report = verify_derivative(&sigma, &DERIVATIVE_EPSILONS, &SuiteOptions::default()).map_err(err)?;
    let ratios = report.sequences.get("ratio").cloned().unwrap_or_default();
    let detail = format!("‖Φ(εσ)‖/ε = {ratios:.4?} at ε = {DERIVATIVE_EPSILONS:?}");
    Ok((report.passed(), detail))
}

fn c4_remainder_increments() -> Outcome {
    let opts = SuiteOptions { n_max: 100, ..SuiteOptions::default() };
    let report = verify_thm21(&EnsembleSpec::new(0.3, 1.0, 10, 300), &opts).map_err(err)?;
    let fraction = report.residual_norms["fraction_decreasing"];
    let worst = report.residual_norms["max_increment_ratio"];
    Ok((report.passed(), format!("fraction decreasing {fraction:.2}, worst window ratio {worst:.3}")))
}

fn c5_second_order_remainders() -> Outcome {
    // q = 1: ρ_k = √(k² + 1) on the Dirichlet side. The k² scaling amplifies
    // eigenvalue errors, and local errors add up over the thousands of steps needed at
    // k = 100, so the angle needs an absolute tolerance near roundoff.
    let p = SpectralProblem::new(PotentialSpec::constant_q(1.0), BoundaryCondition::Dirichlet)
        .with_tolerances(1e-16, 1e-15)
        .unwrap();
    let d = eigenvalues(&p, 100).map_err(err)?;
    let mut worst = 0.0f64;
    let mut alpha = Vec::new();
    for (i, rho) in d.rho.iter().enumerate() {
        let k = (i + 1) as f64;
        let got = k * k * (rho.re - k - 0.5 / k);
        // √(k²+1) − k − 1/(2k) without cancellation.
        let root = 1.0 / ((k * k + 1.0).sqrt() + k);
        let want = k * k * (root - 0.5 / k);
        worst = worst.max((got - want).abs());
        alpha.push(Complex64::from(got));
    }
    let (slope_q1, _) = rate_fit(&alpha, 10, 100).map_err(err)?;
    let cos2 = PotentialSpec::sine(&[0.0, 0.5]);
    let report = verify_thm41(&cos2, &SuiteOptions::default()).map_err(err)?;
    let slope_cos = report.slopes.get("alpha").copied().unwrap_or(f64::NAN);
    Ok((
        worst <= 1e-8 && slope_q1 <= -0.9 && report.passed(),
        format!("q=1 closed-form error {worst:.2e}, slope {slope_q1:.3}; q=cos 2x slope {slope_cos:.3}"),
    ))
}

fn c6_higher_order_expansion() -> Outcome {
    let q1 = PotentialSpec::constant_q(1.0);
    let opts = SuiteOptions::default();
    let d = eigenvalues(&precise(q1.clone(), BoundaryCondition::Dirichlet), opts.n_max).map_err(err)?;
    let dn = eigenvalues(&precise(q1.clone(), BoundaryCondition::DirichletNeumann), opts.n_max).map_err(err)?;
    let fit = thm51_fit(&q1, &d, &dn, 2, 10).map_err(err)?;
    let h0 = fit.coeffs.h[0];
    let mut orders = Vec::new();
    for sigma in [
        q1,
        PotentialSpec::sine(&[0.0, 1.0]),
        PotentialSpec::fourier(0.2.into(), vec![0.3.into()], vec![0.0.into(), 0.4.into()]),
    ] {
        orders.push(expansion_order(&sigma, 2, [40.0, 80.0]).map_err(err)?.order);
    }
    let min_order = orders.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(((h0 - 1.0).abs() <= 1e-3 && min_order >= 3.5, format!("h₀ = {h0:.8}, orders {orders:.2?}")))
}

fn c7_fixed_point_angle() -> Outcome {
    let potentials = [
        PotentialSpec::sine(&[0.01]),
        PotentialSpec::cosine(0.005, &[0.01, 0.005]),
        PotentialSpec::sine(&[0.0, 0.02, 0.0, 0.01]),
        PotentialSpec::piecewise_linear(vec![0.0, 1.0, PI], vec![0.0, 0.02, -0.01]).unwrap(),
        PotentialSpec::sample_ball(1.0, 0.02, 0.1, 16, 7).unwrap(),
    ];
    let mut worst = 0.0f64;
    for sigma in &potentials {
        for rho in [50.0, 100.0] {
            let fp = fixed_point_theta(sigma, rho, 0.0, sigma.l2_norm()).map_err(err)?;
            let ode = prufer_integrate_on(sigma, rho, &fp.angle.grid_x, Tolerance::new(1e-13, 1e-13)).map_err(err)?;
            for (a, b) in fp.angle.theta_values.iter().zip(&ode.theta_values) {
                worst = worst.max((a - b).abs());
            }
        }
    }
    let big = PotentialSpec::cosine(0.0, &[3.0]);
    let rejected = matches!(fixed_point_theta(&big, 50.0, 0.0, big.l2_norm()), Err(Error::Inadmissible { .. }));
    Ok((worst <= 1e-7 && rejected, format!("sup |θ_fp − θ_ode| = {worst:.2e}, large σ rejected: {rejected}")))
}

fn c8_fourier_decay() -> Outcome {
    let rhos: Vec<f64> = (0..=5).map(|j| 20.0 * 2f64.powi(j)).collect();
    let mut ok = true;
    let mut parts = Vec::new();
    for (i, theta) in [0.25, 0.5, 1.0].into_iter().enumerate() {
        let members = EnsembleSpec::new(theta, 1.0, 10, 800 + 100 * i as u64).members().map_err(err)?;
        let mut worst = f64::NEG_INFINITY;
        for sigma in &members {
            let pts: Vec<(f64, f64)> = rhos.iter().map(|&r| (r, fourier_f_envelope(sigma, r, 0.0))).collect();
            worst = worst.max(rate_fit_points(&pts).map_err(err)?.0);
        }
        ok &= worst <= -theta + 0.1;
        parts.push(format!("θ={theta}: worst slope {worst:.3}"));
    }
    Ok((ok, parts.join(", ")))
}

fn c9_complex_strip() -> Outcome {
    let sigma = PotentialSpec::fourier(0.0.into(), vec![], vec![Complex64::new(0.0, 1.0)]);
    let radius = sigma.l2_norm();
    let mut ok = true;
    let mut widest = 0.0f64;
    for bc in BOTH {
        let s = oracle_spectrum(&SpectralProblem::new(sigma.clone(), bc), 20, 1e-9).map_err(err)?;
        ok &= strip_check(&s, radius);
        widest = s.rho.iter().fold(widest, |m, r| m.max(r.im.abs()));
    }
    let width = 4.0 * (2.0 * PI * radius).exp();
    Ok((ok, format!("max |Im ρ| = {widest:.3e} < {width:.3e}")))
}

fn c10_eigenvalue_derivative() -> Outcome {
    let d = BoundaryCondition::Dirichlet;
    let dn = BoundaryCondition::DirichletNeumann;
    let triples = [
        (PotentialSpec::cosine(0.0, &[0.3]), PotentialSpec::cosine(0.0, &[0.0, 1.0]), d, 1),
        (PotentialSpec::sine(&[0.5, 0.2]), PotentialSpec::sine(&[0.0, 0.0, 1.0]), d, 3),
        (PotentialSpec::cosine(0.1, &[0.2, 0.4]), PotentialSpec::cosine(0.0, &[1.0]), dn, 2),
        (PotentialSpec::sample_ball(1.0, 1.0, 0.1, 16, 11).unwrap(), PotentialSpec::cosine(0.0, &[0.5, -0.5]), d, 5),
        (
            PotentialSpec::piecewise_linear(vec![0.0, 1.5, PI], vec![0.0, 0.4, -0.2]).unwrap(),
            PotentialSpec::piecewise_linear(vec![0.0, 2.0, PI], vec![0.3, -0.3, 0.1]).unwrap(),
            dn,
            4,
        ),
    ];
    let mut worst = 0.0f64;
    for (sigma, h, bc, k) in triples {
        worst = worst.max(fd_check(&precise(sigma, bc), &h, k, 1e-4).map_err(err)?);
    }
    let free = SpectralProblem::new(PotentialSpec::zero(), d);
    let closed = eigenvalue_derivative(&free, &PotentialSpec::sine(&[0.0, 1.0]), 1).map_err(err)?.d_lambda;
    Ok((
        worst <= 1e-5 && (closed + 1.0).abs() <= 1e-8,
        format!("max finite-difference error {worst:.2e}, dλ₁[sin 2x] = {closed:.10}"),
    ))
}

fn c11_eigenfunction_gap() -> Outcome {
    let theta = 0.3;
    let members = EnsembleSpec::new(theta, 1.0, 5, 1100).members().map_err(err)?;
    let ks: Vec<usize> = (10..=100).step_by(10).collect();
    let slopes = members
        .par_iter()
        .map(|sigma| -> Result<f64, String> {
            let gaps =
                asymptotic_gap(&SpectralProblem::new(sigma.clone(), BoundaryCondition::Dirichlet), &ks).map_err(err)?;
            let pts: Vec<(f64, f64)> = ks.iter().zip(&gaps).map(|(&k, &g)| (k as f64, g)).collect();
            Ok(rate_fit_points(&pts).map_err(err)?.0)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let worst = slopes.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok((worst <= -theta + 0.15, format!("gap slopes {slopes:.3?}")))
}

fn c12_determinism() -> Outcome {
    let dir = std::env::temp_dir().join(format!("slspec-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let cfg = dir.join("run.json");
    std::fs::write(
        &cfg,
        r#"{"ensemble": {"theta": 0.5, "radius": 1, "count": 3, "seed": 42}, "n_max": 20, "radii": [0.5, 1]}"#,
    )
    .map_err(|e| e.to_string())?;
    let run = |out: &Path, sub: &str| -> Result<(), String> {
        let status = Command::new(env!("CARGO_BIN_EXE_slspec"))
            .args([sub, "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(out)
            .status()
            .map_err(|e| e.to_string())?;
        status.success().then_some(()).ok_or(format!("{sub} exited with {status}"))
    };
    let (a, b) = (dir.join("a"), dir.join("b"));
    for sub in ["solve", "ensemble"] {
        run(&a, sub)?;
        run(&b, sub)?;
    }
    let mut names: Vec<_> = std::fs::read_dir(&a).map_err(|e| e.to_string())?.map(|e| e.unwrap().file_name()).collect();
    names.sort();
    let identical = names.iter().all(|n| std::fs::read(a.join(n)).ok() == std::fs::read(b.join(n)).ok());
    let count = names.len();
    std::fs::remove_dir_all(&dir).ok();
    Ok((identical && count > 0, format!("{count} files compared")))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("exactness", c1_exactness),
        ("cross-oracle agreement", c2_cross_oracle),
        ("derivative at zero", c3_derivative_at_zero),
        ("remainder increments", c4_remainder_increments),
        ("second-order remainders", c5_second_order_remainders),
        ("higher-order expansion", c6_higher_order_expansion),
        ("fixed-point Prüfer angle", c7_fixed_point_angle),
        ("Fourier transform decay", c8_fourier_decay),
        ("complex eigenvalue strip", c9_complex_strip),
        ("eigenvalue derivative", c10_eigenvalue_derivative),
        ("eigenfunction gap", c11_eigenfunction_gap),
        ("determinism", c12_determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (pass, detail) = match check() {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        failed += usize::from(!pass);
        let verdict = if pass { "PASS" } else { "FAIL" };
        println!("{verdict} {:>2} {name}: {detail} [{:.1} s]", i + 1, start.elapsed().as_secs_f64());
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
