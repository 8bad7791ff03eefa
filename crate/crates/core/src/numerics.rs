//! Small numerical kernels shared by the geometry modules: Gauss-Legendre
//! rules, Hermite interpolation, smooth transition functions and Neville
//! extrapolation.

use std::f64::consts::PI;

/// Gauss-Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(order: usize) -> Self {
        assert!(order >= 1, "Gauss-Legendre order must be positive");
        let mut nodes = vec![0.0; order];
        let mut weights = vec![0.0; order];
        let m = order.div_ceil(2);
        for i in 0..m {
            let mut x = (PI * (i as f64 + 0.75) / (order as f64 + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre(order, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(order, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[order - 1 - i] = x;
            weights[i] = w;
            weights[order - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Integrates `f` over `[a, b]`.
    pub fn integrate(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * f(mid + half * x))
            .sum::<f64>()
            * half
    }

    /// Maps the rule onto `[a, b]`, returning `(point, weight)` pairs.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(x, w)| (mid + half * x, w * half))
    }
}

fn legendre(order: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=order {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let n = order as f64;
    let d = n * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Value and first two derivatives of a function at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
}

/// Quintic Hermite interpolation between two jets at `x0 < x1`.
pub fn hermite_quintic(x0: f64, x1: f64, left: Jet, right: Jet, x: f64) -> Jet {
    let dx = x1 - x0;
    let t = (x - x0) / dx;
    let t2 = t * t;
    let t3 = t2 * t;
    let t4 = t3 * t;
    let t5 = t4 * t;
    // basis values, first and second t-derivatives
    let b = [
        (
            1.0 - 10.0 * t3 + 15.0 * t4 - 6.0 * t5,
            -30.0 * t2 + 60.0 * t3 - 30.0 * t4,
            -60.0 * t + 180.0 * t2 - 120.0 * t3,
        ),
        (
            t - 6.0 * t3 + 8.0 * t4 - 3.0 * t5,
            1.0 - 18.0 * t2 + 32.0 * t3 - 15.0 * t4,
            -36.0 * t + 96.0 * t2 - 60.0 * t3,
        ),
        (
            0.5 * (t2 - 3.0 * t3 + 3.0 * t4 - t5),
            0.5 * (2.0 * t - 9.0 * t2 + 12.0 * t3 - 5.0 * t4),
            0.5 * (2.0 - 18.0 * t + 36.0 * t2 - 20.0 * t3),
        ),
        (
            0.5 * (t3 - 2.0 * t4 + t5),
            0.5 * (3.0 * t2 - 8.0 * t3 + 5.0 * t4),
            0.5 * (6.0 * t - 24.0 * t2 + 20.0 * t3),
        ),
        (
            -4.0 * t3 + 7.0 * t4 - 3.0 * t5,
            -12.0 * t2 + 28.0 * t3 - 15.0 * t4,
            -24.0 * t + 84.0 * t2 - 60.0 * t3,
        ),
        (
            10.0 * t3 - 15.0 * t4 + 6.0 * t5,
            30.0 * t2 - 60.0 * t3 + 30.0 * t4,
            60.0 * t - 180.0 * t2 + 120.0 * t3,
        ),
    ];
    let coef = [
        left.value,
        dx * left.d1,
        dx * dx * left.d2,
        dx * dx * right.d2,
        dx * right.d1,
        right.value,
    ];
    let mut out = Jet {
        value: 0.0,
        d1: 0.0,
        d2: 0.0,
    };
    for (c, (v, d1, d2)) in coef.iter().zip(b) {
        out.value += c * v;
        out.d1 += c * d1;
        out.d2 += c * d2;
    }
    out.d1 /= dx;
    out.d2 /= dx * dx;
    out
}

/// Index `i` with `xs[i] <= x <= xs[i + 1]`, clamped to the valid interval range.
pub fn bracket(xs: &[f64], x: f64) -> usize {
    debug_assert!(xs.len() >= 2);
    let idx = xs.partition_point(|v| *v <= x);
    idx.clamp(1, xs.len() - 1) - 1
}

/// `exp(-1/x)` for `x > 0`, zero otherwise.
fn flat_ramp(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        (-1.0 / x).exp()
    }
}

fn flat_ramp_d1(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        (-1.0 / x).exp() / (x * x)
    }
}

fn flat_ramp_d2(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        (-1.0 / x).exp() * (1.0 - 2.0 * x) / x.powi(4)
    }
}

/// C-infinity step from 0 at `x <= 0` to 1 at `x >= 1`, returned with its
/// first two derivatives.
pub fn smooth_step(x: f64) -> Jet {
    if x <= 0.0 {
        return Jet { value: 0.0, d1: 0.0, d2: 0.0 };
    }
    if x >= 1.0 {
        return Jet { value: 1.0, d1: 0.0, d2: 0.0 };
    }
    let a = flat_ramp(x);
    let a1 = flat_ramp_d1(x);
    let a2 = flat_ramp_d2(x);
    let b = flat_ramp(1.0 - x);
    let b1 = -flat_ramp_d1(1.0 - x);
    let b2 = flat_ramp_d2(1.0 - x);
    let den = a + b;
    let den1 = a1 + b1;
    let den2 = a2 + b2;
    let value = a / den;
    let d1 = (a1 * den - a * den1) / (den * den);
    // second derivative of a quotient
    let d2 = (a2 - 2.0 * d1 * den1 - value * den2) / den;
    Jet { value, d1, d2 }
}

/// Neville-Aitken polynomial extrapolation of `(x, y)` samples to `x = 0`.
///
/// Returns the sequence of diagonal estimates, one per prefix of the samples,
/// so callers can judge convergence.
pub fn neville_to_zero(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len();
    let mut table = ys.to_vec();
    let mut estimates = Vec::with_capacity(n);
    // table[i] holds P_{i-k..i}(0) after k sweeps
    let mut diag = vec![0.0; n];
    diag[0] = ys[0];
    for k in 1..n {
        for i in (k..n).rev() {
            let xa = xs[i - k];
            let xb = xs[i];
            table[i] = (xb * table[i - 1] - xa * table[i]) / (xb - xa);
        }
        diag[k] = table[k];
    }
    estimates.extend_from_slice(&diag);
    estimates
}

/// Composite trapezoid rule over samples.
pub fn trapezoid(xs: &[f64], ys: &[f64]) -> f64 {
    xs.windows(2)
        .zip(ys.windows(2))
        .map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1]))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let rule = GaussLegendre::new(8);
        let v = rule.integrate(0.0, 2.0, |x| x.powi(15));
        assert!((v - 2f64.powi(16) / 16.0).abs() < 1e-9);
        let total: f64 = rule.weights().iter().sum();
        assert!((total - 2.0).abs() < 1e-14);
    }

    #[test]
    fn hermite_reproduces_quintics() {
        let f = |x: f64| 1.0 + x - 2.0 * x.powi(3) + 0.5 * x.powi(5);
        let f1 = |x: f64| 1.0 - 6.0 * x * x + 2.5 * x.powi(4);
        let f2 = |x: f64| -12.0 * x + 10.0 * x.powi(3);
        let jet = |x: f64| Jet { value: f(x), d1: f1(x), d2: f2(x) };
        let out = hermite_quintic(0.3, 1.1, jet(0.3), jet(1.1), 0.77);
        assert!((out.value - f(0.77)).abs() < 1e-13);
        assert!((out.d1 - f1(0.77)).abs() < 1e-12);
        assert!((out.d2 - f2(0.77)).abs() < 1e-11);
    }

    #[test]
    fn smooth_step_derivatives_match_differences() {
        for &x in &[0.1, 0.35, 0.5, 0.8] {
            let h = 1e-5;
            let j = smooth_step(x);
            let fd1 = (smooth_step(x + h).value - smooth_step(x - h).value) / (2.0 * h);
            let fd2 = (smooth_step(x + h).d1 - smooth_step(x - h).d1) / (2.0 * h);
            assert!((j.d1 - fd1).abs() < 1e-7, "d1 at {x}");
            assert!((j.d2 - fd2).abs() < 1e-6, "d2 at {x}");
        }
        assert_eq!(smooth_step(0.5).value, 0.5);
    }

    #[test]
    fn neville_recovers_affine_limit() {
        let xs = [1.0, 0.5, 0.25];
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 + 2.0 * x).collect();
        let est = neville_to_zero(&xs, &ys);
        assert!((est[2] - 3.0).abs() < 1e-14);
        assert!((est[1] - 3.0).abs() < 1e-14);
    }
}
