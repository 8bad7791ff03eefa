//! Grid builders and finite-difference weights on nonuniform nodes.

/// Fornberg weights for derivatives `0..=max_order` at `x0` from `nodes`.
/// Returns `w[k][j]`, the weight of `f(nodes[j])` in the `k`-th derivative.
pub fn fornberg(x0: f64, nodes: &[f64], max_order: usize) -> Vec<Vec<f64>> {
    let n = nodes.len();
    let mut c = vec![vec![0.0; n]; max_order + 1];
    let mut c1 = 1.0;
    let mut c4 = nodes[0] - x0;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(max_order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = nodes[i] - x0;
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

/// First and second derivatives of samples on a nonuniform grid from
/// five-point stencils, centered where possible and shifted at the edges.
pub fn five_point_derivatives(xs: &[f64], ys: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = xs.len();
    assert!(n >= 5, "five-point stencils need at least five samples");
    let mut d1 = vec![0.0; n];
    let mut d2 = vec![0.0; n];
    for i in 0..n {
        let start = i.saturating_sub(2).min(n - 5);
        let w = fornberg(xs[i], &xs[start..start + 5], 2);
        for j in 0..5 {
            d1[i] += w[1][j] * ys[start + j];
            d2[i] += w[2][j] * ys[start + j];
        }
    }
    (d1, d2)
}

/// `count` points from `a` to `b` inclusive, uniformly spaced.
pub fn uniform(a: f64, b: f64, count: usize) -> Vec<f64> {
    assert!(count >= 2);
    let step = (b - a) / (count - 1) as f64;
    let mut out: Vec<f64> = (0..count).map(|i| a + step * i as f64).collect();
    out[count - 1] = b;
    out
}

/// `count` points from `a > 0` to `b` inclusive, geometrically spaced.
pub fn geometric(a: f64, b: f64, count: usize) -> Vec<f64> {
    assert!(count >= 2 && a > 0.0 && b > a);
    let ratio = (b / a).ln() / (count - 1) as f64;
    let mut out: Vec<f64> = (0..count).map(|i| a * (ratio * i as f64).exp()).collect();
    out[0] = a;
    out[count - 1] = b;
    out
}

/// Points from `a` to `b` with spacing close to `step` near `a`, growing
/// geometrically once the local spacing reaches `grow_from * step` worth of
/// distance, so both the near field and the far field are resolved.
pub fn graded(a: f64, b: f64, near_step: f64, near_len: f64, far_count: usize) -> Vec<f64> {
    assert!(b > a && near_step > 0.0 && near_len > 0.0);
    let split = (a + near_len).min(b);
    let near_count = (((split - a) / near_step).ceil() as usize).max(1) + 1;
    let mut out = uniform(a, split, near_count);
    if split < b {
        let offset = split - a + near_step;
        let far = geometric(offset, b - a + near_step, far_count.max(2));
        out.extend(far.into_iter().skip(1).map(|x| a + x - near_step));
        let last = out.len() - 1;
        out[last] = b;
    }
    out
}
