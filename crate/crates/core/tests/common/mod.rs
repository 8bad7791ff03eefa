//! Independent oracles for the integration tests.
#![allow(dead_code, clippy::needless_range_loop)]

/// Five-point central difference of `f` at `x` with step `h`.
fn d5(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h)
}

type M3 = [[f64; 3]; 3];

fn inverse(g: &M3) -> M3 {
    let det = g[0][0] * (g[1][1] * g[2][2] - g[1][2] * g[2][1]) - g[0][1] * (g[1][0] * g[2][2] - g[1][2] * g[2][0])
        + g[0][2] * (g[1][0] * g[2][1] - g[1][1] * g[2][0]);
    let mut inv = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let (r0, r1) = ((j + 1) % 3, (j + 2) % 3);
            let (c0, c1) = ((i + 1) % 3, (i + 2) % 3);
            inv[i][j] = (g[r0][c0] * g[r1][c1] - g[r0][c1] * g[r1][c0]) / det;
        }
    }
    inv
}

fn shifted(x: [f64; 3], k: usize, t: f64) -> [f64; 3] {
    let mut y = x;
    y[k] = t;
    y
}

/// `Γ^k_ij` at `x`, from differences of the metric components.
fn christoffel(metric: &impl Fn([f64; 3]) -> M3, x: [f64; 3], h: f64) -> [[[f64; 3]; 3]; 3] {
    let mut dg = [[[0.0; 3]; 3]; 3]; // dg[l][i][j] = ∂_l g_ij
    for (l, slot) in dg.iter_mut().enumerate() {
        for i in 0..3 {
            for j in 0..3 {
                slot[i][j] = d5(|t| metric(shifted(x, l, t))[i][j], x[l], h);
            }
        }
    }
    let gi = inverse(&metric(x));
    let mut gamma = [[[0.0; 3]; 3]; 3];
    for k in 0..3 {
        for i in 0..3 {
            for j in 0..3 {
                gamma[k][i][j] = (0..3)
                    .map(|l| 0.5 * gi[k][l] * (dg[i][j][l] + dg[j][i][l] - dg[l][i][j]))
                    .sum();
            }
        }
    }
    gamma
}

/// Scalar curvature of a 3-metric given in coordinates, by differencing
/// Christoffel symbols. Agnostic of any warped-product structure.
pub fn fd_scalar_curvature(metric: impl Fn([f64; 3]) -> M3, x: [f64; 3], h: f64) -> f64 {
    let gamma = christoffel(&metric, x, h);
    // dgamma[m][k][i][j] = ∂_m Γ^k_ij
    let mut dgamma = [[[[0.0; 3]; 3]; 3]; 3];
    for (m, slot) in dgamma.iter_mut().enumerate() {
        let at = |t: f64| christoffel(&metric, shifted(x, m, t), h);
        let (a, b, c, d) = (at(x[m] - 2.0 * h), at(x[m] - h), at(x[m] + h), at(x[m] + 2.0 * h));
        for k in 0..3 {
            for i in 0..3 {
                for j in 0..3 {
                    slot[k][i][j] = (a[k][i][j] - 8.0 * b[k][i][j] + 8.0 * c[k][i][j] - d[k][i][j]) / (12.0 * h);
                }
            }
        }
    }
    let gi = inverse(&metric(x));
    let mut r = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            let mut ric = 0.0;
            for k in 0..3 {
                ric += dgamma[k][k][i][j] - dgamma[j][k][i][k];
                for l in 0..3 {
                    ric += gamma[k][k][l] * gamma[l][i][j] - gamma[k][j][l] * gamma[l][i][k];
                }
            }
            r += gi[i][j] * ric;
        }
    }
    r
}

/// `ds^2 + h(s)^2 (dθ^2 + sin^2θ dφ^2)` in coordinates `(s, θ, φ)`.
pub fn warped(h: impl Fn(f64) -> f64) -> impl Fn([f64; 3]) -> M3 {
    move |x| {
        let w = h(x[0]).powi(2);
        [[1.0, 0.0, 0.0], [0.0, w, 0.0], [0.0, 0.0, w * x[1].sin().powi(2)]]
    }
}

/// Schwarzschild in area-radius coordinates `(r, θ, φ)`, a chart the
/// library never uses.
pub fn schwarzschild_area_chart(mass: f64) -> impl Fn([f64; 3]) -> M3 {
    move |x| {
        let r = x[0];
        [
            [1.0 / (1.0 - 2.0 * mass / r), 0.0, 0.0],
            [0.0, r * r, 0.0],
            [0.0, 0.0, r * r * x[1].sin().powi(2)],
        ]
    }
}
