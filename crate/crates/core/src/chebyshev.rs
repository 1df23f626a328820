//! Chebyshev series on an interval, and composite Chebyshev–Lobatto panels
//! with spectral cumulative integration.

use std::f64::consts::PI;

/// Lobatto points `-cos(πi/n)` on `[-1, 1]`, ascending.
pub(crate) fn lobatto_reference(n: usize) -> Vec<f64> {
    (0..=n).map(|i| -(PI * i as f64 / n as f64).cos()).collect()
}

/// Chebyshev coefficients of the degree-`n` interpolant through values at the
/// ascending Lobatto points.
pub(crate) fn coeffs_from_values(values: &[f64]) -> Vec<f64> {
    let n = values.len() - 1;
    if n == 0 {
        return vec![values[0]];
    }
    // Ascending points are x_i = cos(π(n-i)/n), so T_k(x_i) = cos(πk(n-i)/n).
    let mut out = vec![0.0; n + 1];
    for (k, c) in out.iter_mut().enumerate() {
        let mut s = 0.0;
        for (i, v) in values.iter().enumerate() {
            let w = if i == 0 || i == n { 0.5 } else { 1.0 };
            let idx = (k * (n - i)) % (2 * n);
            s += w * v * (PI * idx as f64 / n as f64).cos();
        }
        *c = 2.0 * s / n as f64;
    }
    out[0] *= 0.5;
    out[n] *= 0.5;
    out
}

/// Clenshaw evaluation of `Σ c_k T_k(t)`.
pub(crate) fn clenshaw(coeffs: &[f64], t: f64) -> f64 {
    let mut b1 = 0.0;
    let mut b2 = 0.0;
    for &c in coeffs.iter().skip(1).rev() {
        let b0 = c + 2.0 * t * b1 - b2;
        b2 = b1;
        b1 = b0;
    }
    coeffs.first().copied().unwrap_or(0.0) + t * b1 - b2
}

/// Coefficients of an antiderivative in `t` (constant term left arbitrary).
fn integrate_coeffs(c: &[f64]) -> Vec<f64> {
    let n = c.len();
    let mut out = vec![0.0; n + 1];
    for k in 0..n {
        match k {
            0 => out[1] += c[0],
            1 => out[2] += c[1] / 4.0,
            _ => {
                out[k + 1] += c[k] / (2.0 * (k + 1) as f64);
                out[k - 1] -= c[k] / (2.0 * (k - 1) as f64);
            }
        }
    }
    out
}

/// Coefficients of the derivative in `t`.
fn differentiate_coeffs(c: &[f64]) -> Vec<f64> {
    let n = c.len();
    if n <= 1 {
        return vec![0.0];
    }
    let mut d = vec![0.0; n + 1];
    for k in (1..n).rev() {
        d[k - 1] = d[k + 1] + 2.0 * k as f64 * c[k];
    }
    d[0] *= 0.5;
    d.truncate(n - 1);
    d
}

/// A truncated Chebyshev expansion of a real function on `[a, b]`.
#[derive(Clone, Debug)]
pub(crate) struct ChebSeries {
    a: f64,
    b: f64,
    coeffs: Vec<f64>,
}

impl ChebSeries {
    pub fn zero(a: f64, b: f64) -> Self {
        Self { a, b, coeffs: vec![0.0] }
    }

    /// Interpolates `f` at `n + 1` Lobatto points.
    pub fn from_fn(a: f64, b: f64, n: usize, f: impl Fn(f64) -> f64) -> Self {
        let values: Vec<f64> = lobatto_reference(n).iter().map(|&t| f(0.5 * (a + b) + 0.5 * (b - a) * t)).collect();
        Self { a, b, coeffs: coeffs_from_values(&values) }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    fn to_t(&self, x: f64) -> f64 {
        (2.0 * x - self.a - self.b) / (self.b - self.a)
    }

    pub fn eval(&self, x: f64) -> f64 {
        clenshaw(&self.coeffs, self.to_t(x))
    }

    pub fn derivative(&self) -> Self {
        let s = 2.0 / (self.b - self.a);
        let coeffs = differentiate_coeffs(&self.coeffs).into_iter().map(|c| c * s).collect();
        Self { a: self.a, b: self.b, coeffs }
    }

    pub fn nth_derivative(&self, n: usize) -> Self {
        (0..n).fold(self.clone(), |f, _| f.derivative())
    }

    /// Antiderivative vanishing at the left end point.
    pub fn integral(&self) -> Self {
        let s = 0.5 * (self.b - self.a);
        let mut coeffs: Vec<f64> = integrate_coeffs(&self.coeffs).into_iter().map(|c| c * s).collect();
        let at_left = clenshaw(&coeffs, -1.0);
        coeffs[0] -= at_left;
        Self { a: self.a, b: self.b, coeffs }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { a: self.a, b: self.b, coeffs: self.coeffs.iter().map(|c| c * s).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|k| self.coeffs.get(k).copied().unwrap_or(0.0) + other.coeffs.get(k).copied().unwrap_or(0.0))
            .collect();
        Self { a: self.a, b: self.b, coeffs }
    }

    pub fn add_constant(&self, c: f64) -> Self {
        let mut out = self.clone();
        out.coeffs[0] += c;
        out
    }

    /// Product, computed exactly (up to rounding) by interpolation at enough points.
    pub fn mul(&self, other: &Self) -> Self {
        let n = (self.degree() + other.degree()).max(1);
        let t = lobatto_reference(n);
        let values: Vec<f64> = t.iter().map(|&t| clenshaw(&self.coeffs, t) * clenshaw(&other.coeffs, t)).collect();
        Self { a: self.a, b: self.b, coeffs: coeffs_from_values(&values) }.chopped(0.0)
    }

    /// Drops trailing coefficients below `tol` times the largest one.
    pub fn chopped(mut self, tol: f64) -> Self {
        let scale = self.coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        let cut = tol.max(1e-17) * scale;
        while self.coeffs.len() > 1 && self.coeffs.last().unwrap().abs() <= cut {
            self.coeffs.pop();
        }
        self
    }
}

/// Composite Chebyshev–Lobatto discretisation of `[0, π]` with panels that
/// never straddle a break point of the data.
#[derive(Clone, Debug)]
pub(crate) struct Panels {
    p: usize,
    bounds: Vec<(f64, f64)>,
    /// Index of the break-point interval containing each panel.
    interval: Vec<usize>,
    nodes: Vec<f64>,
    cumulative: Vec<f64>,
    weights: Vec<f64>,
}

impl Panels {
    /// `breaks` must be ascending and contain at least two points. Each
    /// interval is split into equal panels no longer than `max_len`.
    pub fn new(breaks: &[f64], max_len: f64, p: usize) -> Self {
        let reference = lobatto_reference(p);
        let mut bounds = Vec::new();
        let mut interval = Vec::new();
        for (i, w) in breaks.windows(2).enumerate() {
            let len = w[1] - w[0];
            if len <= 0.0 {
                continue;
            }
            let count = (len / max_len).ceil().max(1.0) as usize;
            for j in 0..count {
                let a = w[0] + len * j as f64 / count as f64;
                let b = if j + 1 == count { w[1] } else { w[0] + len * (j + 1) as f64 / count as f64 };
                bounds.push((a, b));
                interval.push(i);
            }
        }
        let mut nodes = Vec::with_capacity(bounds.len() * (p + 1));
        for &(a, b) in &bounds {
            // The end nodes are set exactly so rounding never leaves the panel.
            let start = nodes.len();
            nodes.extend(reference.iter().map(|t| 0.5 * (a + b) + 0.5 * (b - a) * t));
            nodes[start] = a;
            nodes[start + p] = b;
        }
        // Column j of the reference cumulative-integration matrix is the
        // running integral of the j-th Lagrange cardinal function.
        let mut cumulative = vec![0.0; (p + 1) * (p + 1)];
        for j in 0..=p {
            let mut e = vec![0.0; p + 1];
            e[j] = 1.0;
            let c = coeffs_from_values(&e);
            let mut ic = integrate_coeffs(&c);
            let left = clenshaw(&ic, -1.0);
            ic[0] -= left;
            for (i, &t) in reference.iter().enumerate() {
                cumulative[i * (p + 1) + j] = clenshaw(&ic, t);
            }
        }
        let weights = cumulative[p * (p + 1)..].to_vec();
        Self { p, bounds, interval, nodes, cumulative, weights }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn points_per_panel(&self) -> usize {
        self.p + 1
    }

    pub fn bounds(&self, panel: usize) -> (f64, f64) {
        self.bounds[panel]
    }

    /// Evaluates `f(interval, x)` at every node.
    pub fn sample<T>(&self, mut f: impl FnMut(usize, f64) -> T) -> Vec<T> {
        let m = self.p + 1;
        self.nodes.iter().enumerate().map(|(i, &x)| f(self.interval[i / m], x)).collect()
    }

    /// Running integral from 0 evaluated at every node; continuous across panels.
    pub fn cumulative(&self, values: &[f64]) -> Vec<f64> {
        let m = self.p + 1;
        let mut out = vec![0.0; values.len()];
        let mut offset = 0.0;
        for (k, &(a, b)) in self.bounds.iter().enumerate() {
            let half = 0.5 * (b - a);
            let v = &values[k * m..(k + 1) * m];
            for i in 0..m {
                let row = &self.cumulative[i * m..(i + 1) * m];
                let s: f64 = row.iter().zip(v).map(|(r, x)| r * x).sum();
                out[k * m + i] = offset + half * s;
            }
            offset = out[k * m + m - 1];
        }
        out
    }

    pub fn integral(&self, values: &[f64]) -> f64 {
        let m = self.p + 1;
        self.bounds
            .iter()
            .enumerate()
            .map(|(k, &(a, b))| {
                let v = &values[k * m..(k + 1) * m];
                0.5 * (b - a) * self.weights.iter().zip(v).map(|(w, x)| w * x).sum::<f64>()
            })
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn series_calculus_on_exponential() {
        let f = ChebSeries::from_fn(0.0, PI, 40, f64::exp);
        for &x in &[0.0, 0.3, 1.7, PI] {
            assert!((f.eval(x) - x.exp()).abs() < 1e-12 * PI.exp());
            assert!((f.derivative().eval(x) - x.exp()).abs() < 1e-10);
            assert!((f.integral().eval(x) - (x.exp() - 1.0)).abs() < 1e-11);
        }
        let g = ChebSeries::from_fn(0.0, PI, 30, f64::sin);
        let fg = f.mul(&g);
        assert!((fg.eval(2.0) - 2f64.exp() * 2f64.sin()).abs() < 1e-11);
        assert!((g.nth_derivative(2).eval(1.0) + 1f64.sin()).abs() < 1e-9);
    }

    #[test]
    fn panels_integrate_oscillatory_function() {
        let panels = Panels::new(&[0.0, 1.0, PI], 0.2, 20);
        let w = 30.0;
        let vals = panels.sample(|_, x| (w * x).cos());
        let cum = panels.cumulative(&vals);
        for (x, c) in panels.nodes().iter().zip(&cum) {
            assert!((c - (w * x).sin() / w).abs() < 1e-13);
        }
        assert!((panels.integral(&vals) - (w * PI).sin() / w).abs() < 1e-13);
    }
}
