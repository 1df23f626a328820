//! Adaptive explicit Runge–Kutta integration (order 8, Dormand–Prince type pair).
//!
//! The shooting solvers integrate small fixed-size systems many thousands of
//! times, so the state is a plain `[f64; N]` and the right-hand side is a
//! closure; no allocation happens inside the stepping loop.

mod tableau;

use crate::error::{Error, Result};
use tableau::{A, C, E3, E5, STAGES};

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 10.0;
const ERROR_EXPONENT: f64 = -1.0 / 8.0;

/// Mixed absolute/relative local error tolerance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Tolerance {
    pub fn new(abs: f64, rel: f64) -> Self {
        Self { abs, rel }
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self { abs: 1e-11, rel: 1e-11 }
    }
}

/// Integrator state. The last accepted step size is remembered so that
/// integrating a sequence of adjacent intervals does not restart from a tiny
/// initial step every time.
#[derive(Clone, Debug)]
pub struct Dop853 {
    tol: Tolerance,
    max_steps: usize,
    h: Option<f64>,
}

impl Dop853 {
    pub fn new(tol: Tolerance) -> Self {
        Self { tol, max_steps: 1_000_000, h: None }
    }

    /// Integrates `y' = rhs(x, y)` from `x0` to `x1 >= x0`. `on_step` is called
    /// after every accepted step with the new point.
    pub fn integrate<const N: usize, F, O>(
        &mut self,
        mut rhs: F,
        x0: f64,
        y0: [f64; N],
        x1: f64,
        mut on_step: O,
    ) -> Result<[f64; N]>
    where
        F: FnMut(f64, &[f64; N]) -> [f64; N],
        O: FnMut(f64, &[f64; N]),
    {
        if !(x1 >= x0) {
            return Err(Error::Integrator { x: x0, reason: format!("end point {x1} precedes start point") });
        }
        let mut x = x0;
        let mut y = y0;
        if x1 == x0 {
            return Ok(y);
        }
        let mut f0 = rhs(x, &y);
        let mut h = match self.h {
            Some(h) => h,
            None => self.initial_step(&mut rhs, x, &y, &f0),
        };
        let mut k = [[0.0; N]; STAGES];
        let mut taken = 0usize;

        while x < x1 {
            let min_step = 10.0 * f64::EPSILON * x.abs().max(1.0);
            let mut rejected = false;
            loop {
                if h < min_step {
                    return Err(Error::Integrator { x, reason: "step size underflow".into() });
                }
                let last = x + h >= x1;
                let step = if last { x1 - x } else { h };

                let y_new = stages(&mut rhs, x, &y, &f0, step, &mut k);

                let err = self.error_norm(&k, &y, &y_new, step);
                if err < 1.0 {
                    let mut factor =
                        if err == 0.0 { MAX_FACTOR } else { (SAFETY * err.powf(ERROR_EXPONENT)).min(MAX_FACTOR) };
                    if rejected {
                        factor = factor.min(1.0);
                    }
                    x = if last { x1 } else { x + step };
                    y = y_new;
                    if !y.iter().all(|v| v.is_finite()) {
                        return Err(Error::Integrator { x, reason: "non-finite state".into() });
                    }
                    f0 = rhs(x, &y);
                    // A shortened final step says nothing about the step size
                    // the solution needs, so keep the proposal in that case.
                    if step >= h {
                        h = step * factor;
                    }
                    break;
                }
                h = step * (SAFETY * err.powf(ERROR_EXPONENT)).max(MIN_FACTOR);
                rejected = true;
            }
            taken += 1;
            on_step(x, &y);
            if taken > self.max_steps {
                return Err(Error::Integrator { x, reason: format!("more than {} steps", self.max_steps) });
            }
        }
        self.h = Some(h);
        Ok(y)
    }

    fn error_norm<const N: usize>(&self, k: &[[f64; N]; STAGES], y: &[f64; N], y_new: &[f64; N], h: f64) -> f64 {
        let mut e5 = 0.0;
        let mut e3 = 0.0;
        for i in 0..N {
            let scale = self.tol.abs + y[i].abs().max(y_new[i].abs()) * self.tol.rel;
            let mut s5 = 0.0;
            let mut s3 = 0.0;
            for s in 0..STAGES {
                s5 += k[s][i] * E5[s];
                s3 += k[s][i] * E3[s];
            }
            e5 += (s5 / scale).powi(2);
            e3 += (s3 / scale).powi(2);
        }
        if e5 == 0.0 && e3 == 0.0 {
            return 0.0;
        }
        let denom = e5 + 0.01 * e3;
        h.abs() * e5 / (denom * N as f64).sqrt()
    }

    fn initial_step<const N: usize, F>(&self, rhs: &mut F, x: f64, y: &[f64; N], f0: &[f64; N]) -> f64
    where
        F: FnMut(f64, &[f64; N]) -> [f64; N],
    {
        let rms = |v: &dyn Fn(usize) -> f64| ((0..N).map(|i| v(i).powi(2)).sum::<f64>() / N as f64).sqrt();
        let scale: Vec<f64> = y.iter().map(|v| self.tol.abs + v.abs() * self.tol.rel).collect();
        let d0 = rms(&|i| y[i] / scale[i]);
        let d1 = rms(&|i| f0[i] / scale[i]);
        let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
        let mut y1 = *y;
        for i in 0..N {
            y1[i] += h0 * f0[i];
        }
        let f1 = rhs(x + h0, &y1);
        let d2 = rms(&|i| (f1[i] - f0[i]) / scale[i]) / h0;
        let h1 = if d1 <= 1e-15 && d2 <= 1e-15 { (h0 * 1e-3).max(1e-6) } else { (0.01 / d1.max(d2)).powf(1.0 / 8.0) };
        (100.0 * h0).min(h1)
    }
}

/// One step of the eighth-order formula; fills the stage derivatives `k`.
fn stages<const N: usize, F>(
    rhs: &mut F,
    x: f64,
    y: &[f64; N],
    f0: &[f64; N],
    step: f64,
    k: &mut [[f64; N]; STAGES],
) -> [f64; N]
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    k[0] = *f0;
    for s in 1..STAGES {
        let mut ys = *y;
        for (j, kj) in k.iter().enumerate().take(s) {
            let a = A[s][j];
            if a != 0.0 {
                for i in 0..N {
                    ys[i] += step * a * kj[i];
                }
            }
        }
        k[s] = rhs(x + C[s] * step, &ys);
    }
    let mut y_new = *y;
    for (s, ks) in k.iter().enumerate() {
        let b = tableau::B[s];
        if b != 0.0 {
            for i in 0..N {
                y_new[i] += step * b * ks[i];
            }
        }
    }
    y_new
}

/// Steps through the given ascending mesh with the eighth-order formula and
/// no error control. On a frozen mesh the result is a smooth function of any
/// parameter in `rhs`, which root finders need.
pub fn integrate_mesh<const N: usize, F>(mut rhs: F, mesh: &[f64], y0: [f64; N]) -> [f64; N]
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    let mut y = y0;
    let mut k = [[0.0; N]; STAGES];
    for w in mesh.windows(2) {
        let f0 = rhs(w[0], &y);
        y = stages(&mut rhs, w[0], &y, &f0, w[1] - w[0], &mut k);
    }
    y
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator_over_many_periods() {
        let mut ode = Dop853::new(Tolerance::new(1e-13, 1e-13));
        let w = 7.0;
        let end = 10.0;
        let y = ode.integrate(|_, y| [y[1], -w * w * y[0]], 0.0, [0.0, w], end, |_, _| {}).unwrap();
        assert!((y[0] - (w * end).sin()).abs() < 1e-10, "{}", y[0]);
        assert!((y[1] - w * (w * end).cos()).abs() < 1e-9);
    }

    #[test]
    fn exponential_growth() {
        let mut ode = Dop853::new(Tolerance::default());
        let y = ode.integrate(|_, y| [y[0]], 0.0, [1.0], 2.0, |_, _| {}).unwrap();
        assert!((y[0] / 2f64.exp() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn step_observer_ends_at_target() {
        let mut ode = Dop853::new(Tolerance::default());
        let mut last = 0.0;
        let mut count = 0;
        ode.integrate(
            |x, _| [x.cos()],
            0.0,
            [0.0],
            3.0,
            |x, _| {
                assert!(x > last);
                last = x;
                count += 1;
            },
        )
        .unwrap();
        assert_eq!(last, 3.0);
        assert!(count > 0);
    }

    #[test]
    fn frozen_mesh_reproduces_adaptive_result() {
        let mut ode = Dop853::new(Tolerance::new(1e-12, 1e-12));
        let mut mesh = vec![0.0];
        let rhs = |_: f64, y: &[f64; 2]| [y[1], -25.0 * y[0]];
        let y = ode.integrate(rhs, 0.0, [0.0, 5.0], 4.0, |x, _| mesh.push(x)).unwrap();
        let z = integrate_mesh(rhs, &mesh, [0.0, 5.0]);
        // Steps are rebuilt as differences of mesh points, so agreement is
        // to a few ulps rather than bitwise.
        assert!((y[0] - z[0]).abs() < 1e-14 && (y[1] - z[1]).abs() < 5e-14);
        assert!((z[0] - 20f64.sin()).abs() < 1e-10);
    }

    #[test]
    fn rejects_backwards_interval() {
        let mut ode = Dop853::new(Tolerance::default());
        assert!(ode.integrate(|_, y| [y[0]], 1.0, [1.0], 0.0, |_, _| {}).is_err());
    }
}
