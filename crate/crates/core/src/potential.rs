//! Potentials σ on `[0, π]`. The operator is driven by `q = σ'`, which may be a
//! distribution, so only σ itself is ever stored or evaluated.

use crate::chebyshev::Panels;
use crate::error::{Error, Result};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

const KNOT_SNAP: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PotentialKind {
    Fourier,
    PiecewiseLinear,
}

/// `σ(x) = c0 + Σ cos[k-1]·cos kx + Σ sin[k-1]·sin kx`.
#[derive(Clone, Debug, PartialEq)]
pub struct FourierSeries {
    pub c0: Complex64,
    pub cos: Vec<Complex64>,
    pub sin: Vec<Complex64>,
}

/// Continuous or jump-discontinuous piecewise-linear σ. A jump at `a` is
/// encoded by two consecutive knots with the same abscissa `a`; the first
/// carries the left limit and the second the right limit.
#[derive(Clone, Debug, PartialEq)]
pub struct PiecewiseLinear {
    x: Vec<f64>,
    y: Vec<f64>,
}

impl PiecewiseLinear {
    pub fn knots_x(&self) -> &[f64] {
        &self.x
    }

    pub fn knots_y(&self) -> &[f64] {
        &self.y
    }

    /// Non-degenerate segments `(x0, x1, y0, y1)`.
    fn segments(&self) -> impl Iterator<Item = (f64, f64, f64, f64)> + '_ {
        (0..self.x.len() - 1)
            .filter(|&i| self.x[i + 1] > self.x[i])
            .map(|i| (self.x[i], self.x[i + 1], self.y[i], self.y[i + 1]))
    }

    fn right_limit(&self, p: f64) -> f64 {
        for (x0, x1, y0, y1) in self.segments() {
            if p >= x0 && (p < x1 || x1 == PI) {
                return y0 + (y1 - y0) * (p - x0) / (x1 - x0);
            }
        }
        *self.y.last().unwrap()
    }

    fn left_limit(&self, p: f64) -> f64 {
        for (x0, x1, y0, y1) in self.segments() {
            if p <= x1 && (p > x0 || x0 == 0.0) {
                return y0 + (y1 - y0) * (p - x0) / (x1 - x0);
            }
        }
        self.y[0]
    }

    pub fn has_jumps(&self) -> bool {
        self.x.windows(2).any(|w| w[0] == w[1])
    }
}

/// A potential σ, either a finite trigonometric series or a piecewise-linear table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PotentialJson", into = "PotentialJson")]
pub enum PotentialSpec {
    Fourier(FourierSeries),
    PiecewiseLinear(PiecewiseLinear),
}

impl PotentialSpec {
    pub fn zero() -> Self {
        Self::fourier(Complex64::new(0.0, 0.0), vec![], vec![])
    }

    pub fn fourier(c0: Complex64, cos: Vec<Complex64>, sin: Vec<Complex64>) -> Self {
        Self::Fourier(FourierSeries { c0, cos, sin })
    }

    /// Real cosine series `c0 + Σ cos[k-1]·cos kx`.
    pub fn cosine(c0: f64, cos: &[f64]) -> Self {
        Self::fourier(c0.into(), cos.iter().map(|&c| c.into()).collect(), vec![])
    }

    /// Real sine series `Σ sin[k-1]·sin kx`.
    pub fn sine(sin: &[f64]) -> Self {
        Self::fourier(0.0.into(), vec![], sin.iter().map(|&c| c.into()).collect())
    }

    /// Piecewise-linear σ through the given knots. The abscissae must start at
    /// 0, end at π and be nondecreasing; a repeated abscissa marks a jump.
    pub fn piecewise_linear(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        let bad = |m: &str| Err(Error::InvalidPotential(m.to_string()));
        if x.len() != y.len() {
            return bad("knot lists differ in length");
        }
        if x.len() < 2 {
            return bad("at least two knots are required");
        }
        if x.iter().chain(&y).any(|v| !v.is_finite()) {
            return bad("knots must be finite");
        }
        let mut x = x;
        let n = x.len();
        if x[0].abs() > KNOT_SNAP || (x[n - 1] - PI).abs() > KNOT_SNAP {
            return bad("first knot must be 0 and last knot π");
        }
        x[0] = 0.0;
        x[n - 1] = PI;
        for i in 1..n {
            if x[i] < x[i - 1] {
                return bad("knots must be nondecreasing");
            }
            if i >= 2 && x[i] == x[i - 2] {
                return bad("at most two knots may share an abscissa");
            }
        }
        if x[1] == 0.0 || x[n - 2] == PI {
            return bad("jumps are not allowed at the end points");
        }
        Ok(Self::PiecewiseLinear(PiecewiseLinear { x, y }))
    }

    /// The antiderivative `c(x − π)` of the constant `q = c`, normalised so
    /// that σ(π) = 0.
    pub fn constant_q(c: f64) -> Self {
        Self::PiecewiseLinear(PiecewiseLinear { x: vec![0.0, PI], y: vec![-c * PI, 0.0] })
    }

    /// `σ = c·H(x − a)`, the antiderivative of the point interaction `q = c·δ_a`.
    pub fn heaviside(c: f64, a: f64) -> Result<Self> {
        if !(a > 0.0 && a < PI) {
            return Err(Error::InvalidArgument(format!("jump position {a} must lie in (0, π)")));
        }
        Self::piecewise_linear(vec![0.0, a, a, PI], vec![0.0, 0.0, c, c])
    }

    pub fn kind(&self) -> PotentialKind {
        match self {
            Self::Fourier(_) => PotentialKind::Fourier,
            Self::PiecewiseLinear(_) => PotentialKind::PiecewiseLinear,
        }
    }

    pub fn is_real(&self) -> bool {
        match self {
            Self::Fourier(f) => f.c0.im == 0.0 && f.cos.iter().chain(&f.sin).all(|c| c.im == 0.0),
            Self::PiecewiseLinear(_) => true,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Self::Fourier(f) => f.c0 == Complex64::default() && f.cos.iter().chain(&f.sin).all(|c| c.norm() == 0.0),
            Self::PiecewiseLinear(p) => p.y.iter().all(|&v| v == 0.0),
        }
    }

    pub fn as_fourier(&self) -> Option<&FourierSeries> {
        match self {
            Self::Fourier(f) => Some(f),
            Self::PiecewiseLinear(_) => None,
        }
    }

    /// Highest frequency present (0 for piecewise potentials).
    pub fn degree(&self) -> usize {
        match self {
            Self::Fourier(f) => f.cos.len().max(f.sin.len()),
            Self::PiecewiseLinear(_) => 0,
        }
    }

    /// σ(x). Piecewise potentials are right-continuous at jumps.
    pub fn eval(&self, x: f64) -> Result<Complex64> {
        if !(0.0..=PI).contains(&x) {
            return Err(Error::OutOfDomain(x));
        }
        Ok(self.value(x))
    }

    pub(crate) fn value(&self, x: f64) -> Complex64 {
        match self {
            Self::Fourier(f) => fourier_value(f, x),
            Self::PiecewiseLinear(p) => p.right_limit(x).into(),
        }
    }

    /// Break points `0 = x_0 < … < x_r = π`; σ is smooth on each interval.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            Self::Fourier(_) => vec![0.0, PI],
            Self::PiecewiseLinear(p) => {
                let mut b = p.x.clone();
                b.dedup();
                b
            }
        }
    }

    /// Index of the break-point interval containing `x` (right-continuous).
    pub(crate) fn piece_index(&self, x: f64) -> usize {
        let b = self.breakpoints();
        b[1..b.len() - 1].iter().take_while(|&&p| p <= x).count()
    }

    /// σ on the closed break-point interval `piece`, using one-sided limits
    /// at its ends.
    pub(crate) fn value_in(&self, piece: usize, x: f64) -> Complex64 {
        match self {
            Self::Fourier(f) => fourier_value(f, x),
            Self::PiecewiseLinear(p) => {
                let (x0, x1, y0, y1) = p.segments().nth(piece).expect("piece index in range");
                (y0 + (y1 - y0) * (x - x0) / (x1 - x0)).into()
            }
        }
    }

    /// `(σ(0), σ(π))`.
    pub fn endpoints(&self) -> (Complex64, Complex64) {
        match self {
            Self::Fourier(f) => (fourier_value(f, 0.0), fourier_value(f, PI)),
            Self::PiecewiseLinear(p) => (p.y[0].into(), p.y[p.y.len() - 1].into()),
        }
    }

    /// `sqrt(|c0|² + Σ (1 + k^{2θ})(|cos_k|² + |sin_k|²))`.
    pub fn sobolev_norm(&self, theta: f64) -> Result<f64> {
        let f = self
            .as_fourier()
            .ok_or_else(|| Error::InvalidArgument("the Sobolev norm is defined for Fourier potentials only".into()))?;
        let mut s = f.c0.norm_sqr();
        for k in 1..=self.degree() {
            let w = 1.0 + (k as f64).powf(2.0 * theta);
            let c = f.cos.get(k - 1).map_or(0.0, |c| c.norm_sqr());
            let d = f.sin.get(k - 1).map_or(0.0, |c| c.norm_sqr());
            s += w * (c + d);
        }
        Ok(s.sqrt())
    }

    /// `‖σ‖` in `L₂(0, π)`.
    pub fn l2_norm(&self) -> f64 {
        let panels = Panels::new(&self.breakpoints(), 0.5 / (1.0 + self.degree() as f64), 24);
        let vals = panels.sample(|piece, x| self.value_in(piece, x).norm_sqr());
        panels.integral(&vals).sqrt()
    }

    /// An upper bound for `max |σ|` on `[0, π]`.
    pub fn sup_bound(&self) -> f64 {
        match self {
            Self::Fourier(f) => f.c0.norm() + f.cos.iter().chain(&f.sin).map(|c| c.norm()).sum::<f64>(),
            Self::PiecewiseLinear(p) => p.y.iter().fold(0.0, |m, v| m.max(v.abs())),
        }
    }

    /// Termwise n-th derivative of a trigonometric series.
    pub fn differentiate(&self, n: usize) -> Result<Self> {
        let f = self
            .as_fourier()
            .ok_or_else(|| Error::InvalidArgument("spectral differentiation needs a Fourier potential".into()))?;
        let mut cos = f.cos.clone();
        let mut sin = f.sin.clone();
        let len = cos.len().max(sin.len());
        cos.resize(len, Complex64::default());
        sin.resize(len, Complex64::default());
        for _ in 0..n {
            // d/dx (a cos kx + b sin kx) = k b cos kx − k a sin kx
            for k in 1..=len {
                let (a, b) = (cos[k - 1], sin[k - 1]);
                cos[k - 1] = b * k as f64;
                sin[k - 1] = -a * k as f64;
            }
        }
        let c0 = if n == 0 { f.c0 } else { Complex64::default() };
        Ok(Self::fourier(c0, cos, sin))
    }

    /// `a·self + b·other`. Both potentials must be of the same kind.
    pub fn combine(&self, a: f64, other: &Self, b: f64) -> Result<Self> {
        match (self, other) {
            (Self::Fourier(f), Self::Fourier(g)) => {
                let mix = |u: &[Complex64], v: &[Complex64]| -> Vec<Complex64> {
                    (0..u.len().max(v.len()))
                        .map(|k| a * u.get(k).copied().unwrap_or_default() + b * v.get(k).copied().unwrap_or_default())
                        .collect()
                };
                Ok(Self::fourier(a * f.c0 + b * g.c0, mix(&f.cos, &g.cos), mix(&f.sin, &g.sin)))
            }
            (Self::PiecewiseLinear(f), Self::PiecewiseLinear(g)) => {
                let mut at: Vec<f64> = f.x.iter().chain(&g.x).copied().collect();
                at.sort_by(f64::total_cmp);
                at.dedup();
                let mut x = Vec::new();
                let mut y = Vec::new();
                for &p in &at {
                    let left = a * f.left_limit(p) + b * g.left_limit(p);
                    let right = a * f.right_limit(p) + b * g.right_limit(p);
                    if p > 0.0 && p < PI && left != right {
                        x.push(p);
                        y.push(left);
                    }
                    x.push(p);
                    y.push(if p == PI { left } else { right });
                }
                Self::piecewise_linear(x, y)
            }
            _ => Err(Error::InvalidArgument("cannot combine potentials of different kinds".into())),
        }
    }

    pub fn scaled(&self, a: f64) -> Self {
        self.combine(a, self, 0.0).expect("same kind")
    }

    /// Random real cosine series in the ball `‖σ‖_θ ≤ R`: coefficients
    /// `g_k k^{-θ-1/2-margin}` with `g_k` uniform in `[-1, 1]`, rescaled to norm
    /// `R·u` with `u` uniform in `(1/2, 1]`. Deterministic in `seed`.
    pub fn sample_ball(theta: f64, radius: f64, decay_margin: f64, k: usize, seed: u64) -> Result<Self> {
        if !(theta >= 0.0) || !(radius >= 0.0) || !(decay_margin > 0.0) || k == 0 {
            return Err(Error::InvalidArgument(format!(
                "sample_ball needs θ ≥ 0, R ≥ 0, margin > 0, K ≥ 1 (got θ={theta}, R={radius}, margin={decay_margin}, K={k})"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut cos: Vec<f64> =
            (1..=k).map(|j| rng.gen_range(-1.0..=1.0) * (j as f64).powf(-theta - 0.5 - decay_margin)).collect();
        let u = 1.0 - 0.5 * rng.gen::<f64>();
        let spec = Self::cosine(0.0, &cos);
        let norm = spec.sobolev_norm(theta)?;
        let scale = if norm > 0.0 { radius * u / norm } else { 0.0 };
        cos.iter_mut().for_each(|c| *c *= scale);
        let out = Self::cosine(0.0, &cos);
        debug_assert!(out.sobolev_norm(theta)? <= radius * (1.0 + 1e-12));
        Ok(out)
    }
}

/// Clenshaw summation of the cosine and sine parts.
fn fourier_value(f: &FourierSeries, x: f64) -> Complex64 {
    let (s, c) = x.sin_cos();
    let two_c = 2.0 * c;
    let mut sum = f.c0;
    let (mut b1, mut b2) = (Complex64::default(), Complex64::default());
    for &a in f.cos.iter().rev() {
        let b0 = a + two_c * b1 - b2;
        b2 = b1;
        b1 = b0;
    }
    sum += b1 * c - b2;
    let (mut b1, mut b2) = (Complex64::default(), Complex64::default());
    for &a in f.sin.iter().rev() {
        let b0 = a + two_c * b1 - b2;
        b2 = b1;
        b1 = b0;
    }
    sum + b1 * s
}

/// Real-valued σ prepared for tight inner loops.
#[derive(Clone, Debug)]
pub(crate) struct RealSigma {
    pieces: Vec<(f64, f64)>,
    repr: RealRepr,
}

#[derive(Clone, Debug)]
enum RealRepr {
    Fourier { c0: f64, cos: Vec<f64>, sin: Vec<f64> },
    Linear(Vec<(f64, f64)>),
}

impl RealSigma {
    pub fn new(spec: &PotentialSpec) -> Result<Self> {
        if !spec.is_real() {
            return Err(Error::InvalidArgument("this solver needs a real potential".into()));
        }
        let breaks = spec.breakpoints();
        let pieces: Vec<(f64, f64)> = breaks.windows(2).map(|w| (w[0], w[1])).collect();
        let repr = match spec {
            PotentialSpec::Fourier(f) => RealRepr::Fourier {
                c0: f.c0.re,
                cos: f.cos.iter().map(|c| c.re).collect(),
                sin: f.sin.iter().map(|c| c.re).collect(),
            },
            PotentialSpec::PiecewiseLinear(p) => RealRepr::Linear(
                p.segments().map(|(x0, x1, y0, y1)| (y0 - x0 * (y1 - y0) / (x1 - x0), (y1 - y0) / (x1 - x0))).collect(),
            ),
        };
        Ok(Self { pieces, repr })
    }

    pub fn pieces(&self) -> &[(f64, f64)] {
        &self.pieces
    }

    #[inline]
    pub fn value(&self, piece: usize, x: f64) -> f64 {
        match &self.repr {
            RealRepr::Fourier { c0, cos, sin } => {
                let (s, c) = x.sin_cos();
                let two_c = 2.0 * c;
                let (mut b1, mut b2) = (0.0, 0.0);
                let (mut e1, mut e2) = (0.0, 0.0);
                let n = cos.len().max(sin.len());
                for k in (0..n).rev() {
                    let a = cos.get(k).copied().unwrap_or(0.0);
                    let d = sin.get(k).copied().unwrap_or(0.0);
                    let b0 = a + two_c * b1 - b2;
                    b2 = b1;
                    b1 = b0;
                    let e0 = d + two_c * e1 - e2;
                    e2 = e1;
                    e1 = e0;
                }
                c0 + b1 * c - b2 + e1 * s
            }
            RealRepr::Linear(seg) => {
                let (intercept, slope) = seg[piece];
                intercept + slope * x
            }
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum Scalar {
    Real(f64),
    Complex([f64; 2]),
}

impl From<Scalar> for Complex64 {
    fn from(s: Scalar) -> Self {
        match s {
            Scalar::Real(r) => r.into(),
            Scalar::Complex([re, im]) => Complex64::new(re, im),
        }
    }
}

impl From<Complex64> for Scalar {
    fn from(z: Complex64) -> Self {
        if z.im == 0.0 {
            Scalar::Real(z.re)
        } else {
            Scalar::Complex([z.re, z.im])
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum PotentialJson {
    Fourier {
        #[serde(default = "zero_scalar")]
        c0: Scalar,
        #[serde(default)]
        cos: Vec<Scalar>,
        #[serde(default)]
        sin: Vec<Scalar>,
    },
    PiecewiseLinear {
        x: Vec<f64>,
        y: Vec<f64>,
    },
}

fn zero_scalar() -> Scalar {
    Scalar::Real(0.0)
}

impl TryFrom<PotentialJson> for PotentialSpec {
    type Error = Error;

    fn try_from(j: PotentialJson) -> Result<Self> {
        match j {
            PotentialJson::Fourier { c0, cos, sin } => Ok(Self::fourier(
                c0.into(),
                cos.into_iter().map(Into::into).collect(),
                sin.into_iter().map(Into::into).collect(),
            )),
            PotentialJson::PiecewiseLinear { x, y } => Self::piecewise_linear(x, y),
        }
    }
}

impl From<PotentialSpec> for PotentialJson {
    fn from(p: PotentialSpec) -> Self {
        match p {
            PotentialSpec::Fourier(f) => PotentialJson::Fourier {
                c0: f.c0.into(),
                cos: f.cos.into_iter().map(Into::into).collect(),
                sin: f.sin.into_iter().map(Into::into).collect(),
            },
            PotentialSpec::PiecewiseLinear(p) => PotentialJson::PiecewiseLinear { x: p.x, y: p.y },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluation_examples() {
        assert_eq!(PotentialSpec::cosine(0.0, &[1.0]).eval(0.0).unwrap().re, 1.0);
        let ramp = PotentialSpec::constant_q(1.0);
        assert!((ramp.eval(PI / 2.0).unwrap().re + PI / 2.0).abs() < 1e-15);
        assert_eq!(PotentialSpec::zero().eval(1.3).unwrap(), Complex64::default());
        assert!(matches!(ramp.eval(-0.1), Err(Error::OutOfDomain(_))));
        assert!(matches!(ramp.eval(3.2), Err(Error::OutOfDomain(_))));
    }

    #[test]
    fn fourier_sums_match_direct_evaluation() {
        let p = PotentialSpec::fourier(
            Complex64::new(0.3, 0.1),
            vec![Complex64::new(1.0, 0.0), Complex64::new(-0.5, 0.2), Complex64::new(0.25, 0.0)],
            vec![Complex64::new(0.0, 1.0), Complex64::new(0.7, 0.0)],
        );
        for i in 0..=20 {
            let x = PI * i as f64 / 20.0;
            let direct = Complex64::new(0.3, 0.1)
                + Complex64::new(1.0, 0.0) * x.cos()
                + Complex64::new(-0.5, 0.2) * (2.0 * x).cos()
                + 0.25 * (3.0 * x).cos()
                + Complex64::new(0.0, 1.0) * x.sin()
                + 0.7 * (2.0 * x).sin();
            assert!((p.value(x) - direct).norm() < 1e-14);
        }
        let r = PotentialSpec::cosine(0.5, &[1.0, -2.0, 0.0, 0.125]);
        let fast = RealSigma::new(&r).unwrap();
        for i in 0..=10 {
            let x = 0.31 * i as f64;
            assert!((fast.value(0, x) - r.value(x).re).abs() < 1e-14);
        }
    }

    #[test]
    fn endpoints_and_norms() {
        assert_eq!(PotentialSpec::constant_q(1.0).endpoints(), ((-PI).into(), 0.0.into()));
        let (a, b) = PotentialSpec::cosine(0.0, &[1.0]).endpoints();
        assert!((a.re - 1.0).abs() < 1e-15 && (b.re + 1.0).abs() < 1e-15);
        assert!((PotentialSpec::cosine(0.0, &[1.0]).sobolev_norm(1.0).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(PotentialSpec::zero().sobolev_norm(3.0).unwrap(), 0.0);
        assert!(PotentialSpec::constant_q(1.0).sobolev_norm(1.0).is_err());
        // ∫_0^π (x−π)² dx = π³/3
        assert!((PotentialSpec::constant_q(1.0).l2_norm() - (PI.powi(3) / 3.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn differentiation_examples() {
        let d = PotentialSpec::cosine(0.0, &[0.0, 1.0]).differentiate(1).unwrap();
        assert!((d.value(0.4).re + 2.0 * (0.8f64).sin()).abs() < 1e-14);
        let d2 = PotentialSpec::sine(&[0.0, 0.0, 1.0]).differentiate(2).unwrap();
        assert!((d2.value(0.4).re + 9.0 * (1.2f64).sin()).abs() < 1e-13);
        assert!(PotentialSpec::constant_q(1.0).differentiate(1).is_err());
    }

    #[test]
    fn knot_validation() {
        assert!(PotentialSpec::piecewise_linear(vec![0.0, 1.0], vec![0.0, 1.0]).is_err());
        assert!(PotentialSpec::piecewise_linear(vec![0.0, 2.0, 1.0, PI], vec![0.0; 4]).is_err());
        assert!(PotentialSpec::piecewise_linear(vec![0.0, 1.0, 1.0, 1.0, PI], vec![0.0; 5]).is_err());
        let h = PotentialSpec::heaviside(2.0, PI / 2.0).unwrap();
        assert_eq!(h.eval(PI / 2.0).unwrap().re, 2.0);
        assert_eq!(h.eval(PI / 2.0 - 1e-9).unwrap().re, 0.0);
        assert_eq!(h.breakpoints(), vec![0.0, PI / 2.0, PI]);
        assert_eq!(h.value_in(0, PI / 2.0).re, 0.0);
        assert_eq!(h.value_in(1, PI / 2.0).re, 2.0);
    }

    #[test]
    fn combining_piecewise_keeps_jumps() {
        let a = PotentialSpec::heaviside(1.0, 1.0).unwrap();
        let b = PotentialSpec::constant_q(1.0);
        let c = a.combine(2.0, &b, -1.0).unwrap();
        for &x in &[0.0, 0.5, 0.999, 1.0, 2.0, PI] {
            let want = 2.0 * a.value(x).re - b.value(x).re;
            assert!((c.value(x).re - want).abs() < 1e-14, "x={x}");
        }
        assert!(a.combine(1.0, &PotentialSpec::zero(), 1.0).is_err());
    }

    #[test]
    fn sample_ball_is_deterministic_and_inside_ball() {
        let a = PotentialSpec::sample_ball(1.0, 2.0, 0.05, 128, 7).unwrap();
        let b = PotentialSpec::sample_ball(1.0, 2.0, 0.05, 128, 7).unwrap();
        assert_eq!(a, b);
        let n = a.sobolev_norm(1.0).unwrap();
        assert!(n > 1.0 && n <= 2.0, "{n}");
        assert!(PotentialSpec::sample_ball(1.0, 0.0, 0.05, 8, 1).unwrap().is_zero());
    }

    #[test]
    fn json_round_trip() {
        let p = PotentialSpec::fourier(Complex64::new(0.0, 0.0), vec![Complex64::new(1.0, -2.0)], vec![2.5.into()]);
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"{"kind":"fourier","c0":0.0,"cos":[[1.0,-2.0]],"sin":[2.5]}"#);
        assert_eq!(serde_json::from_str::<PotentialSpec>(&s).unwrap(), p);
        let q: PotentialSpec =
            serde_json::from_str(r#"{"kind":"piecewise_linear","x":[0,3.141592653589793],"y":[-1,0]}"#).unwrap();
        assert_eq!(q.kind(), PotentialKind::PiecewiseLinear);
        assert!(serde_json::from_str::<PotentialSpec>(r#"{"kind":"piecewise_linear","x":[0,1],"y":[0,0]}"#).is_err());
    }
}
