//! Metrics with a corner along a coordinate sphere, and their two-scale
//! mollification.
//!
//! The slope `p = h'` jumps at the interface `t = s - s0 = 0`. Smoothing
//! mollifies `p` with a variable scale `sigma(t)`: `sigma = eps = delta^2/100`
//! on `|t| <= eps`, tapering smoothly to zero at `|t| = delta`. Inside
//! `|t| < eps` the kernel straddles the jump and produces the curvature spike;
//! on the annulus it only sees one smooth side, so curvature stays bounded.
//! The warping function is recovered by integrating the smoothed slope from
//! `t = -delta`, with a small bump correction in the right annulus so that it
//! meets the input exactly at `t = delta`.

use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::{scalar_from_jet, EndKind, ProfileMetric};
use crate::numerics::{bracket, smooth_step, GaussLegendre, Jet};
use crate::par;

/// Ratio `delta / eps` is `100 / delta`: the spike scale is `delta^2 / 100`.
pub fn spike_scale(delta: f64) -> f64 {
    delta * delta / 100.0
}

/// Intervals across the spike region `[-eps, eps]`.
const SPIKE_INTERVALS: usize = 200;
/// Target number of intervals across each annulus side.
const ANNULUS_INTERVALS: f64 = 300.0;
/// Geometric growth of annulus spacing away from the spike.
const ANNULUS_GROWTH: f64 = 1.05;
/// Panels and nodes of the composite rule for kernel integrals.
const KERNEL_PANELS: usize = 8;
const KERNEL_ORDER: usize = 16;
/// Nodes of the cumulative-distribution table of the standard bump.
const CDF_NODES: usize = 4001;
/// Tolerance on the unit integral of a mollifier.
pub const MOLLIFIER_MASS_TOLERANCE: f64 = 1e-8;
/// Relative tolerance on warping-function continuity at the interface.
pub const INTERFACE_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone)]
enum Kernel {
    Bump,
    Table { tau: Vec<f64>, phi: Vec<f64> },
}

/// Nonnegative kernel on `(-1, 1)` with unit integral.
#[derive(Debug, Clone)]
pub struct Mollifier {
    kernel: Kernel,
    scale: f64,
    cdf_tau: Vec<f64>,
    cdf: Vec<f64>,
    rule: GaussLegendre,
}

fn bump(tau: f64) -> f64 {
    if tau.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - tau * tau)).exp()
    }
}

impl Mollifier {
    /// The normalized bump `exp(-1/(1 - tau^2))`.
    pub fn standard() -> Self {
        let rule = GaussLegendre::new(KERNEL_ORDER);
        let tau = crate::geometry::grid::uniform(-1.0, 1.0, CDF_NODES);
        let mut cdf = vec![0.0; CDF_NODES];
        for k in 1..CDF_NODES {
            cdf[k] = cdf[k - 1] + rule.integrate(tau[k - 1], tau[k], bump);
        }
        let total = cdf[CDF_NODES - 1];
        cdf.iter_mut().for_each(|v| *v /= total);
        Self {
            kernel: Kernel::Bump,
            scale: 1.0 / total,
            cdf_tau: tau,
            cdf,
            rule,
        }
    }

    /// Piecewise-linear kernel through `(tau, phi)`; rescaled to unit integral.
    pub fn from_samples(tau: Vec<f64>, phi: Vec<f64>) -> Result<Self> {
        if tau.len() < 3 || tau.len() != phi.len() {
            return Err(Error::InvalidMollifier("need at least three (tau, phi) samples".into()));
        }
        if tau.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidMollifier("tau must be strictly increasing".into()));
        }
        if tau[0] < -1.0 || tau[tau.len() - 1] > 1.0 {
            return Err(Error::InvalidMollifier("support must lie in [-1, 1]".into()));
        }
        if phi.iter().any(|v| !(*v >= 0.0 && v.is_finite())) {
            return Err(Error::InvalidMollifier("samples must be finite and nonnegative".into()));
        }
        if phi[0] != 0.0 || phi[phi.len() - 1] != 0.0 {
            return Err(Error::InvalidMollifier("kernel must vanish at the ends of its support".into()));
        }
        let mut cdf = vec![0.0; tau.len()];
        for k in 1..tau.len() {
            cdf[k] = cdf[k - 1] + 0.5 * (tau[k] - tau[k - 1]) * (phi[k] + phi[k - 1]);
        }
        let total = cdf[tau.len() - 1];
        if !(total > 0.0) {
            return Err(Error::InvalidMollifier("kernel has zero integral".into()));
        }
        cdf.iter_mut().for_each(|v| *v /= total);
        Ok(Self {
            kernel: Kernel::Table {
                tau: tau.clone(),
                phi,
            },
            scale: 1.0 / total,
            cdf_tau: tau,
            cdf,
            rule: GaussLegendre::new(KERNEL_ORDER),
        })
    }

    /// Reads `(tau, phi)` rows with a header.
    pub fn from_csv(path: &Path) -> Result<Self> {
        let csv_err = |source| Error::Csv {
            path: path.to_path_buf(),
            source,
        };
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_path(path)
            .map_err(csv_err)?;
        let mut tau = Vec::new();
        let mut phi = Vec::new();
        for row in reader.deserialize::<(f64, f64)>() {
            let (t, p) = row.map_err(csv_err)?;
            tau.push(t);
            phi.push(p);
        }
        Self::from_samples(tau, phi)
    }

    /// Normalized kernel value.
    pub fn density(&self, tau: f64) -> f64 {
        match &self.kernel {
            Kernel::Bump => self.scale * bump(tau),
            Kernel::Table { tau: ts, phi } => {
                if tau <= ts[0] || tau >= ts[ts.len() - 1] {
                    return 0.0;
                }
                let k = bracket(ts, tau);
                let x = (tau - ts[k]) / (ts[k + 1] - ts[k]);
                self.scale * (phi[k] + x * (phi[k + 1] - phi[k]))
            }
        }
    }

    /// `Phi(tau) = int_{-1}^{tau} phi`.
    pub fn cdf(&self, tau: f64) -> f64 {
        let ts = &self.cdf_tau;
        if tau <= ts[0] {
            return 0.0;
        }
        if tau >= ts[ts.len() - 1] {
            return 1.0;
        }
        let k = bracket(ts, tau);
        let (a, b) = (ts[k], ts[k + 1]);
        let w = b - a;
        let x = (tau - a) / w;
        match &self.kernel {
            Kernel::Bump => {
                // cubic Hermite with the density as slope
                let (f0, f1) = (self.cdf[k], self.cdf[k + 1]);
                let (d0, d1) = (self.density(a) * w, self.density(b) * w);
                let x2 = x * x;
                let x3 = x2 * x;
                (2.0 * x3 - 3.0 * x2 + 1.0) * f0 + (x3 - 2.0 * x2 + x) * d0 + (-2.0 * x3 + 3.0 * x2) * f1 + (x3 - x2) * d1
            }
            Kernel::Table { .. } => {
                let (p0, p1) = (self.density(a), self.density(b));
                self.cdf[k] + w * (p0 * x + 0.5 * (p1 - p0) * x * x)
            }
        }
    }

    /// `int_a^b f(tau) phi(tau) dtau` by a composite Gauss rule.
    pub fn integrate(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        let w = (b - a) / KERNEL_PANELS as f64;
        let mut total = 0.0;
        for k in 0..KERNEL_PANELS {
            let lo = a + w * k as f64;
            total += self.rule.integrate(lo, lo + w, |tau| f(tau) * self.density(tau));
        }
        total
    }

    /// Samples of the normalized kernel on a uniform grid of `count` points.
    pub fn samples(&self, count: usize) -> Vec<(f64, f64)> {
        crate::geometry::grid::uniform(-1.0, 1.0, count)
            .into_iter()
            .map(|t| (t, self.density(t)))
            .collect()
    }

    /// Integral of the normalized kernel.
    pub fn mass(&self) -> f64 {
        self.integrate(-1.0, 1.0, |_| 1.0)
    }

    /// Checks nonnegativity, support and unit integral.
    pub fn validate(&self) -> Result<()> {
        let mass = self.mass();
        if (mass - 1.0).abs() > MOLLIFIER_MASS_TOLERANCE {
            return Err(Error::InvalidMollifier(format!("integral {mass} differs from 1")));
        }
        if self.samples(2001).iter().any(|(_, v)| *v < 0.0) {
            return Err(Error::InvalidMollifier("negative kernel values".into()));
        }
        if self.density(-1.0) != 0.0 || self.density(1.0) != 0.0 {
            return Err(Error::InvalidMollifier("kernel does not vanish at +-1".into()));
        }
        Ok(())
    }
}

impl Default for Mollifier {
    fn default() -> Self {
        Self::standard()
    }
}

/// Two profiles joined along the coordinate sphere `s = s0`.
#[derive(Debug, Clone)]
pub struct CornerMetric {
    left: ProfileMetric,
    right: ProfileMetric,
    s0: f64,
}

impl CornerMetric {
    /// `left` must end and `right` must start at the same arclength with the
    /// same warping value.
    pub fn new(left: ProfileMetric, right: ProfileMetric) -> Result<Self> {
        if left.dim() != right.dim() {
            return Err(Error::InterfaceMismatch(format!(
                "dimensions {} and {} differ",
                left.dim(),
                right.dim()
            )));
        }
        let s0 = left.s_max();
        let scale = s0.abs().max(1.0);
        if (right.s_min() - s0).abs() > INTERFACE_TOLERANCE * scale {
            return Err(Error::InterfaceMismatch(format!(
                "left side ends at s = {s0}, right side starts at s = {}",
                right.s_min()
            )));
        }
        let (hl, hr) = (left.warp()[left.len() - 1], right.warp()[0]);
        if (hl - hr).abs() > INTERFACE_TOLERANCE * hl.max(hr) {
            return Err(Error::InterfaceMismatch(format!(
                "warping function jumps from {hl} to {hr} at the interface"
            )));
        }
        Ok(Self { left, right, s0 })
    }

    /// Joins `left` to a copy of `right` shifted so that it starts at `left.s_max()`.
    pub fn glue(left: ProfileMetric, right: &ProfileMetric) -> Result<Self> {
        let shifted = right.shifted(left.s_max() - right.s_min());
        Self::new(left, shifted)
    }

    pub fn left(&self) -> &ProfileMetric {
        &self.left
    }

    pub fn right(&self) -> &ProfileMetric {
        &self.right
    }

    pub fn s0(&self) -> f64 {
        self.s0
    }

    pub fn dim(&self) -> usize {
        self.left.dim()
    }

    /// Warping value on the interface.
    pub fn interface_warp(&self) -> f64 {
        self.left.warp()[self.left.len() - 1]
    }

    /// Area of the interface sphere.
    pub fn interface_area(&self) -> f64 {
        self.left.sphere_area(self.left.len() - 1)
    }

    /// `(H_+, H_-)`, both with the normal toward increasing `s`.
    pub fn mean_curvature_gap(&self) -> (f64, f64) {
        let n1 = self.dim() as f64 - 1.0;
        let h = self.interface_warp();
        let plus = n1 * self.right.warp_d1()[0] / h;
        let minus = n1 * self.left.warp_d1()[self.left.len() - 1] / h;
        (plus, minus)
    }

    /// Whether `H_+ <= H_-` within `tol`.
    pub fn satisfies_corner_condition(&self, tol: f64) -> bool {
        let (plus, minus) = self.mean_curvature_gap();
        plus <= minus + tol
    }

    /// Largest admissible smoothing scale.
    pub fn max_delta(&self) -> f64 {
        0.5 * (self.s0 - self.left.s_min()).min(self.right.s_max() - self.s0)
    }

    /// Unsmoothed jet at `s`, from the side containing `s` (left at `s0`).
    pub fn eval(&self, s: f64) -> Result<Jet> {
        if s <= self.s0 {
            self.left.eval(s)
        } else {
            self.right.eval(s)
        }
    }

    /// The unsmoothed metric as one profile. The interface sample carries
    /// the left one-sided derivatives.
    pub fn glued(&self) -> Result<ProfileMetric> {
        let mut grid = self.left.grid().to_vec();
        let mut warp = self.left.warp().to_vec();
        let mut d1 = self.left.warp_d1().to_vec();
        let mut d2 = self.left.warp_d2().to_vec();
        grid.extend_from_slice(&self.right.grid()[1..]);
        warp.extend_from_slice(&self.right.warp()[1..]);
        d1.extend_from_slice(&self.right.warp_d1()[1..]);
        d2.extend_from_slice(&self.right.warp_d2()[1..]);
        ProfileMetric::with_derivatives(
            self.dim(),
            grid,
            warp,
            d1,
            d2,
            [self.left.ends()[0], self.right.ends()[1]],
        )
    }

    /// Slope of the left side at `t <= 0`.
    fn slope_left(&self, t: f64) -> Jet {
        let s = (self.s0 + t.min(0.0)).max(self.left.s_min());
        self.left.eval(s).expect("inside left grid")
    }

    /// Slope of the right side at `t >= 0`.
    fn slope_right(&self, t: f64) -> Jet {
        let s = (self.s0 + t.max(0.0)).min(self.right.s_max());
        self.right.eval(s).expect("inside right grid")
    }
}

/// Output of [`miao_smooth`]: the smoothed metric and its scales.
#[derive(Debug, Clone)]
pub struct SmoothedCorner {
    pub metric: ProfileMetric,
    pub delta: f64,
    pub eps: f64,
    pub s0: f64,
    /// Mismatch absorbed by the bump correction, before correction.
    pub closure_defect: f64,
}

/// Mollification scale as a function of `t`, with its derivative.
fn scale_profile(t: f64, delta: f64, eps: f64) -> (f64, f64) {
    let a = t.abs();
    if a <= eps {
        return (eps, 0.0);
    }
    if a >= delta {
        return (0.0, 0.0);
    }
    let w = delta - eps;
    let step = smooth_step((a - eps) / w);
    (eps * (1.0 - step.value), -eps * step.d1 / w * t.signum())
}

/// Smoothed slope `p_delta(t)` and its derivative, before the bump correction.
fn smoothed_slope(corner: &CornerMetric, mollifier: &Mollifier, delta: f64, eps: f64, t: f64) -> (f64, f64) {
    let (sigma, dsigma) = scale_profile(t, delta, eps);
    if sigma == 0.0 {
        let j = if t < 0.0 { corner.slope_left(t) } else { corner.slope_right(t) };
        return (j.d1, j.d2);
    }
    let tau_star = t / sigma;
    if tau_star.abs() >= 1.0 {
        // kernel support stays on one side of the interface
        let side = |x: f64| if t < 0.0 { corner.slope_left(x) } else { corner.slope_right(x) };
        let norm = mollifier.integrate(-1.0, 1.0, |_| 1.0);
        let p = mollifier.integrate(-1.0, 1.0, |tau| side(t - sigma * tau).d1) / norm;
        let dp = mollifier.integrate(-1.0, 1.0, |tau| side(t - sigma * tau).d2 * (1.0 - dsigma * tau)) / norm;
        return (p, dp);
    }
    // spike region: sigma = eps is constant; tau < tau_star maps to t > 0
    let plus0 = corner.slope_right(0.0).d1;
    let minus0 = corner.slope_left(0.0).d1;
    let cut = mollifier.cdf(tau_star);
    let p = plus0 * cut
        + minus0 * (1.0 - cut)
        + mollifier.integrate(-1.0, tau_star, |tau| corner.slope_right(t - sigma * tau).d1 - plus0)
        + mollifier.integrate(tau_star, 1.0, |tau| corner.slope_left(t - sigma * tau).d1 - minus0);
    let jump = (plus0 - minus0) * mollifier.density(tau_star) / sigma;
    let dp = jump
        + mollifier.integrate(-1.0, tau_star, |tau| corner.slope_right(t - sigma * tau).d2)
        + mollifier.integrate(tau_star, 1.0, |tau| corner.slope_left(t - sigma * tau).d2);
    (p, dp)
}

/// Nodes strictly inside `(-delta, delta)`, symmetric about the interface.
fn smoothing_nodes(delta: f64, eps: f64) -> Vec<f64> {
    let spike: Vec<f64> = crate::geometry::grid::uniform(-eps, eps, SPIKE_INTERVALS + 1);
    let target = (delta - eps) / ANNULUS_INTERVALS;
    let mut side = Vec::new();
    let mut x = eps;
    let mut step = 2.0 * eps / SPIKE_INTERVALS as f64;
    loop {
        step = (step * ANNULUS_GROWTH).min(target);
        if x + 1.5 * step >= delta {
            break;
        }
        x += step;
        side.push(x);
    }
    let mut nodes: Vec<f64> = side.iter().rev().map(|x| -x).collect();
    nodes.extend(spike);
    nodes.extend(side);
    nodes
}

/// Two-scale smoothing of the corner at scale `delta`.
pub fn miao_smooth(corner: &CornerMetric, delta: f64, mollifier: &Mollifier) -> Result<SmoothedCorner> {
    let max = corner.max_delta();
    if !(delta > 0.0 && delta < max) || spike_scale(delta) >= delta {
        return Err(Error::DeltaOutOfRange { delta, max });
    }
    let eps = spike_scale(delta);
    let nodes = smoothing_nodes(delta, eps);
    let slope = |t: f64| smoothed_slope(corner, mollifier, delta, eps, t);

    let values = par::map(&nodes, |t| slope(*t));

    // cumulative integral of the slope from t = -delta
    let mut knots = Vec::with_capacity(nodes.len() + 2);
    knots.push(-delta);
    knots.extend_from_slice(&nodes);
    knots.push(delta);
    let rule = GaussLegendre::new(4);
    let pieces = par::map_range(knots.len() - 1, |k| {
        rule.integrate(knots[k], knots[k + 1], |t| slope(t).0)
    });
    let h_left = corner.slope_left(-delta).value;
    let h_right = corner.slope_right(delta).value;
    let mut cumulative = Vec::with_capacity(pieces.len());
    let mut acc = 0.0;
    for p in &pieces {
        acc += p;
        cumulative.push(acc);
    }
    let defect = h_right - h_left - acc;

    // bump correction supported in the right annulus
    let (a, w) = (delta / 3.0, delta / 3.0);
    let correction = |t: f64| {
        let j = smooth_step((t - a) / w);
        (defect * j.value, defect * j.d1 / w, defect * j.d2 / (w * w))
    };

    let mut grid = Vec::new();
    let mut warp = Vec::new();
    let mut d1 = Vec::new();
    let mut d2 = Vec::new();
    let left = corner.left();
    for i in 0..left.len() {
        if left.grid()[i] - corner.s0 <= -delta {
            grid.push(left.grid()[i]);
            warp.push(left.warp()[i]);
            d1.push(left.warp_d1()[i]);
            d2.push(left.warp_d2()[i]);
        }
    }
    for (k, t) in nodes.iter().enumerate() {
        let (c0, c1, c2) = correction(*t);
        grid.push(corner.s0 + t);
        warp.push(h_left + cumulative[k] + c0);
        d1.push(values[k].0 + c1);
        d2.push(values[k].1 + c2);
    }
    let right = corner.right();
    for i in 0..right.len() {
        if right.grid()[i] - corner.s0 >= delta {
            grid.push(right.grid()[i]);
            warp.push(right.warp()[i]);
            d1.push(right.warp_d1()[i]);
            d2.push(right.warp_d2()[i]);
        }
    }
    let metric = ProfileMetric::with_derivatives(
        corner.dim(),
        grid,
        warp,
        d1,
        d2,
        [left.ends()[0], right.ends()[1]],
    )?;
    Ok(SmoothedCorner {
        metric,
        delta,
        eps,
        s0: corner.s0,
        closure_defect: defect,
    })
}

impl SmoothedCorner {
    fn t(&self, i: usize) -> f64 {
        self.metric.grid()[i] - self.s0
    }

    fn indices_where(&self, keep: impl Fn(f64) -> bool) -> Vec<usize> {
        (0..self.metric.len()).filter(|&i| keep(self.t(i))).collect()
    }

    /// `sup |h_delta^2 / h^2 - 1|` over `U_delta`: the pointwise norm of
    /// `g_delta - g` measured in `g`.
    pub fn c0_distance(&self, corner: &CornerMetric) -> Result<f64> {
        let mut sup: f64 = 0.0;
        for i in self.indices_where(|t| t.abs() < self.delta) {
            let h = corner.eval(self.metric.grid()[i])?.value;
            let hd = self.metric.warp()[i];
            sup = sup.max((hd * hd / (h * h) - 1.0).abs());
        }
        Ok(sup)
    }

    /// `sup |h_delta'|` over `U_delta`.
    pub fn c1_bound(&self) -> f64 {
        self.indices_where(|t| t.abs() < self.delta)
            .into_iter()
            .map(|i| self.metric.warp_d1()[i].abs())
            .fold(0.0, f64::max)
    }

    /// `max |R_delta|` over the annulus `eps < |t| < delta`.
    pub fn annulus_curvature_bound(&self) -> f64 {
        self.indices_where(|t| t.abs() > self.eps && t.abs() < self.delta)
            .into_iter()
            .map(|i| scalar_from_jet(self.metric.dim(), self.metric.jet(i)).abs())
            .fold(0.0, f64::max)
    }

    /// `int_{|t| < eps} R_delta dmu`.
    pub fn spike_integral(&self) -> Result<f64> {
        let r = self.metric.scalar_curvature_samples();
        self.metric.integrate(&r, (self.s0 - self.eps, self.s0 + self.eps))
    }

    /// Whether every sample outside `U_delta` is bitwise the input sample.
    pub fn is_local(&self, corner: &CornerMetric) -> bool {
        let outside = |m: &ProfileMetric, i: usize| {
            let t = m.grid()[i] - self.s0;
            t.abs() >= self.delta
        };
        let mut expected = Vec::new();
        for side in [corner.left(), corner.right()] {
            for i in 0..side.len() {
                if outside(side, i) {
                    expected.push((side.grid()[i], side.jet(i)));
                }
            }
        }
        let actual: Vec<(f64, Jet)> = (0..self.metric.len())
            .filter(|&i| outside(&self.metric, i))
            .map(|i| (self.metric.grid()[i], self.metric.jet(i)))
            .collect();
        expected.len() == actual.len()
            && expected.iter().zip(&actual).all(|(e, a)| {
                e.0.to_bits() == a.0.to_bits()
                    && e.1.value.to_bits() == a.1.value.to_bits()
                    && e.1.d1.to_bits() == a.1.d1.to_bits()
                    && e.1.d2.to_bits() == a.1.d2.to_bits()
            })
    }
}

/// `int (R)^- dmu` over `[a, b]`, with `(R)^- = max(-R, 0)`.
pub fn negative_part_l1(metric: &ProfileMetric, region: (f64, f64)) -> Result<f64> {
    let neg: Vec<f64> = metric.scalar_curvature_samples().iter().map(|r| (-r).max(0.0)).collect();
    metric.integrate(&neg, region)
}

/// Whether the ends allow a mass computation after smoothing.
pub fn has_flat_end(metric: &ProfileMetric) -> bool {
    metric.ends()[1] == EndKind::AsymptoticallyFlat
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::presets;

    fn flat_schwarzschild(mass: f64) -> CornerMetric {
        let left = presets::flat_ball(3, 2.5, 2001).unwrap();
        let r_max = presets::recommended_outer_radius(3, mass, 2.5);
        let right = presets::schwarzschild(3, mass, 2.5, r_max, 4000, 2.5).unwrap();
        CornerMetric::new(left, right).unwrap()
    }

    #[test]
    fn standard_mollifier_is_normalized() {
        let m = Mollifier::standard();
        m.validate().unwrap();
        assert!((m.cdf(0.0) - 0.5).abs() < 1e-12);
        assert!((m.cdf(1.0) - 1.0).abs() < 1e-15);
        let h = 1e-6;
        let fd = (m.cdf(0.3 + h) - m.cdf(0.3 - h)) / (2.0 * h);
        assert!((fd - m.density(0.3)).abs() < 1e-6);
    }

    #[test]
    fn table_mollifier_rejects_bad_input() {
        assert!(Mollifier::from_samples(vec![-1.0, 0.0, 1.0], vec![0.0, -1.0, 0.0]).is_err());
        assert!(Mollifier::from_samples(vec![-2.0, 0.0, 1.0], vec![0.0, 1.0, 0.0]).is_err());
        let hat = Mollifier::from_samples(vec![-1.0, 0.0, 1.0], vec![0.0, 3.0, 0.0]).unwrap();
        hat.validate().unwrap();
        assert!((hat.density(0.0) - 1.0).abs() < 1e-14);
        assert!((hat.cdf(0.0) - 0.5).abs() < 1e-14);
    }

    #[test]
    fn mean_curvature_gap_closed_forms() {
        let c = flat_schwarzschild(1.0);
        let (plus, minus) = c.mean_curvature_gap();
        assert!((minus - 0.8).abs() < 1e-14);
        assert!((plus - 2.0 * 0.2f64.sqrt() / 2.5).abs() < 1e-14);
        let reversed = flat_schwarzschild(-0.2);
        assert!(!reversed.satisfies_corner_condition(0.0));
    }

    #[test]
    fn mismatched_interface_is_rejected() {
        let left = presets::flat_ball(3, 2.5, 200).unwrap();
        let right = presets::schwarzschild(3, 1.0, 3.0, 1e5, 1000, 2.5).unwrap();
        assert!(matches!(CornerMetric::new(left, right), Err(Error::InterfaceMismatch(_))));
    }

    #[test]
    fn smoothing_is_local_and_continuous() {
        let c = flat_schwarzschild(1.0);
        let m = Mollifier::standard();
        let s = miao_smooth(&c, 0.1, &m).unwrap();
        assert!(s.is_local(&c));
        assert!(s.closure_defect.abs() < 1e-4);
        // increments of h_delta match the corrected trapezoid rule on h_delta'
        let g = &s.metric;
        let mut worst: f64 = 0.0;
        for i in 0..g.len() - 1 {
            let t = g.grid()[i] - s.s0;
            if t.abs() < 2.0 * s.delta {
                let dx = g.grid()[i + 1] - g.grid()[i];
                let (p0, p1) = (g.warp_d1()[i], g.warp_d1()[i + 1]);
                let (q0, q1) = (g.warp_d2()[i], g.warp_d2()[i + 1]);
                let rule = 0.5 * dx * (p0 + p1) + dx * dx * (q0 - q1) / 12.0;
                worst = worst.max((g.warp()[i + 1] - g.warp()[i] - rule).abs());
            }
        }
        assert!(worst < 1e-10, "{worst}");
    }

    #[test]
    fn zero_gap_corner_barely_moves() {
        let left = presets::flat_ball(3, 2.0, 1001).unwrap();
        let right = presets::flat_end(3, 2.0, 2e4, 2000).unwrap();
        let c = CornerMetric::new(left, right).unwrap();
        let s = miao_smooth(&c, 0.1, &Mollifier::standard()).unwrap();
        assert!(s.c0_distance(&c).unwrap() <= 1e-3);
        let neg = negative_part_l1(&s.metric, (s.s0 - 0.1, s.s0 + 0.1)).unwrap();
        assert!(neg <= 1e-6, "{neg}");
    }

    #[test]
    fn spike_carries_twice_the_mean_curvature_jump() {
        let c = flat_schwarzschild(1.0);
        let (plus, minus) = c.mean_curvature_gap();
        let geometric = 2.0 * (minus - plus) * c.interface_area();
        let s = miao_smooth(&c, 0.05, &Mollifier::standard()).unwrap();
        let spike = s.spike_integral().unwrap();
        assert!((spike / geometric - 1.0).abs() < 0.02, "{spike} vs {geometric}");
    }

    #[test]
    fn reversed_corner_has_negative_spike() {
        let c = flat_schwarzschild(-0.2);
        let s = miao_smooth(&c, 0.05, &Mollifier::standard()).unwrap();
        assert!(s.spike_integral().unwrap() < 0.0);
    }

    #[test]
    fn delta_range_is_checked() {
        let c = flat_schwarzschild(1.0);
        let m = Mollifier::standard();
        assert!(matches!(miao_smooth(&c, 0.0, &m), Err(Error::DeltaOutOfRange { .. })));
        assert!(matches!(miao_smooth(&c, 5.0, &m), Err(Error::DeltaOutOfRange { .. })));
    }
}
