use num_complex::Complex64;
use slspec::asymptotics::{remainders, s_quadrature, thm41_alphas};
use slspec::galerkin::{oracle_spectrum, oracle_spectrum_capped};
use slspec::prufer::{characteristic_eigenvalues, eigenvalues, strip_check};
use slspec::{BoundaryCondition, PotentialSpec, SpectralProblem};
use std::f64::consts::PI;

const BCS: [BoundaryCondition; 2] = [BoundaryCondition::Dirichlet, BoundaryCondition::DirichletNeumann];

fn tight(sigma: PotentialSpec, bc: BoundaryCondition) -> SpectralProblem {
    SpectralProblem::new(sigma, bc).with_tolerances(1e-13, 1e-13).unwrap()
}

#[test]
fn free_spectrum_is_exact() {
    for bc in BCS {
        let s = eigenvalues(&tight(PotentialSpec::zero(), bc), 50).unwrap();
        for (n, l) in s.lambda.iter().enumerate() {
            let w = bc.frequency(n + 1);
            assert!((l.re - w * w).abs() <= 1e-9, "{bc:?} n={} {l}", n + 1);
        }
    }
}

#[test]
fn constant_potential_shifts_spectrum() {
    for c in [1.0, -0.5] {
        for bc in BCS {
            let s = eigenvalues(&tight(PotentialSpec::constant_q(c), bc), 50).unwrap();
            for (n, l) in s.lambda.iter().enumerate() {
                let w = bc.frequency(n + 1);
                assert!((l.re - w * w - c).abs() <= 1e-8, "c={c} {bc:?} n={}", n + 1);
            }
        }
    }
}

#[test]
fn three_solvers_agree() {
    let sigma = PotentialSpec::cosine(0.3, &[0.8, -0.4, 0.0, 0.25])
        .combine(1.0, &PotentialSpec::sine(&[0.5, 0.0, -0.2]), 1.0)
        .unwrap();
    for bc in BCS {
        let p = SpectralProblem::new(sigma.clone(), bc);
        let a = eigenvalues(&p, 15).unwrap();
        let b = characteristic_eigenvalues(&p, 15).unwrap();
        let c = oracle_spectrum(&p, 15, 1e-10).unwrap();
        for i in 0..15 {
            let scale = a.lambda[i].norm().max(1.0);
            assert!((a.lambda[i] - b.lambda[i]).norm() < 1e-8 * scale, "{bc:?} {i}");
            assert!((a.lambda[i] - c.lambda[i]).norm() < 1e-8 * scale, "{bc:?} {i}");
        }
    }
}

#[test]
fn jump_potential_agrees_with_galerkin() {
    // σ with a jump at 1 makes q contain a δ at 1. The sine basis then
    // converges only like 1/N, so the comparison is loose.
    let sigma = PotentialSpec::heaviside(0.7, 1.0).unwrap();
    let p = SpectralProblem::new(sigma, BoundaryCondition::Dirichlet);
    let a = eigenvalues(&p, 6).unwrap();
    let c = oracle_spectrum_capped(&p, 6, 1e-4, 1024).unwrap();
    for i in 0..6 {
        assert!(
            (a.lambda[i] - c.lambda[i]).norm() < 3e-4 * a.lambda[i].norm(),
            "{i}: {} vs {}",
            a.lambda[i],
            c.lambda[i]
        );
    }
}

#[test]
fn complex_potential_stays_in_strip() {
    let sigma = PotentialSpec::fourier(0.0.into(), vec![], vec![Complex64::new(0.0, 1.0)]);
    for bc in BCS {
        let s = oracle_spectrum(&SpectralProblem::new(sigma.clone(), bc), 10, 1e-9).unwrap();
        assert!(strip_check(&s, sigma.l2_norm()));
    }
}

#[test]
fn second_order_remainders_of_unit_potential() {
    let q1 = PotentialSpec::constant_q(1.0);
    let d = eigenvalues(&tight(q1.clone(), BoundaryCondition::Dirichlet), 30).unwrap();
    let dn = eigenvalues(&tight(q1.clone(), BoundaryCondition::DirichletNeumann), 30).unwrap();
    let alpha = thm41_alphas(&q1, &d, &dn).unwrap();
    for k in 1..=30usize {
        let kf = k as f64;
        let exact = kf * kf * ((kf * kf + 1.0).sqrt() - kf - 0.5 / kf);
        assert!((alpha[2 * k - 1].re - exact).abs() < 1e-8, "k={k}");
    }
    let r = remainders(&d, &dn, 1.0).unwrap();
    assert!((r.get(2).re - (2f64.sqrt() - 1.0)).abs() < 1e-11);
}

#[test]
fn first_correction_of_sine_solution() {
    // q = 1 and even integer ρ: S_1(π, ρ) = −π/(2ρ).
    let s1 = s_quadrature(&PotentialSpec::constant_q(1.0), 12.0, 1).unwrap();
    assert!((s1 + PI / 24.0).abs() < 1e-12);
}
