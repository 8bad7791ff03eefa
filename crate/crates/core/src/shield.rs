//! Scalar curvature shields `U0 ⊃ U1 ⊃ U2` on a profile and the weight `h`
//! used for μ-bubbles, which must satisfy `R + h^2 - 2|∇h| > 0`.
//!
//! Regions are arclength intervals. An interval endpoint at the edge of the
//! grid is an edge of the manifold piece, not part of the region's boundary.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::ProfileMetric;

/// Slack for curvature lower bounds that hold with equality in exact arithmetic.
pub const SHIELD_TOLERANCE: f64 = 1e-10;
/// Default `ε_α` in `α = (1 + ε_α) 4/(κ D1)`.
pub const DEFAULT_ALPHA_MARGIN: f64 = 0.05;

/// Nested regions with their curvature bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShieldSpec {
    pub u0: [f64; 2],
    pub u1: [f64; 2],
    pub u2: [f64; 2],
    /// Lower bound for `R` on `closure(U1) \ U2`.
    pub kappa: f64,
    /// Upper bound for the mean curvature of `∂U0`.
    pub eta_bound: f64,
}

/// `D0 > 4/(κ D1) - 2/η`, with the margin `D0 - 4/(κ D1) + 2/η`.
pub fn shield_inequality(kappa: f64, d1: f64, eta: f64, d0: f64) -> (bool, f64) {
    let margin = d0 - 4.0 / (kappa * d1) + 2.0 / eta;
    (margin > 0.0, margin)
}

/// `η - 2/(α - D0)`, the bound on the weighted mean curvature of `∂U0`.
/// `None` when `α <= D0`: the weight itself reaches infinity inside `U0`.
pub fn barrier_bound(eta: f64, alpha: f64, d0: f64) -> Option<f64> {
    (alpha > d0).then(|| eta - 2.0 / (alpha - d0))
}

/// `(1 + ε_α) 4/(κ D1)`.
pub fn default_alpha(kappa: f64, d1: f64) -> f64 {
    (1.0 + DEFAULT_ALPHA_MARGIN) * 4.0 / (kappa * d1)
}

fn in_closed(s: f64, r: [f64; 2]) -> bool {
    s >= r[0] && s <= r[1]
}

fn interval_distance(x: f64, r: [f64; 2]) -> f64 {
    if x < r[0] {
        r[0] - x
    } else if x > r[1] {
        x - r[1]
    } else {
        0.0
    }
}

impl ShieldSpec {
    /// Regions and bounds for the metric `c^2 g`: lengths scale by `c`, `κ` by `c^-2`
    /// and `η` by `c^-1`.
    pub fn scaled(&self, c: f64) -> Self {
        let sc = |r: [f64; 2]| [c * r[0], c * r[1]];
        Self {
            u0: sc(self.u0),
            u1: sc(self.u1),
            u2: sc(self.u2),
            kappa: self.kappa / (c * c),
            eta_bound: self.eta_bound / c,
        }
    }

    /// Endpoints of `r` that lie strictly inside the grid.
    fn boundary(r: [f64; 2], metric: &ProfileMetric) -> Vec<f64> {
        r.iter()
            .copied()
            .filter(|e| *e > metric.s_min() && *e < metric.s_max())
            .collect()
    }

    fn check_nested(outer: [f64; 2], inner: [f64; 2], metric: &ProfileMetric, names: &str) -> Result<()> {
        let edge_lo = inner[0] == metric.s_min() && outer[0] == metric.s_min();
        let edge_hi = inner[1] == metric.s_max() && outer[1] == metric.s_max();
        let lo_ok = outer[0] < inner[0] || edge_lo;
        let hi_ok = inner[1] < outer[1] || edge_hi;
        if !(lo_ok && hi_ok) {
            return Err(Error::InvalidShield(format!(
                "{names}: [{}, {}] does not contain the closure of [{}, {}]",
                outer[0], outer[1], inner[0], inner[1]
            )));
        }
        Ok(())
    }

    /// `D0 = dist(∂U0, U1)` and `D1 = dist(∂U1, U2)`.
    pub fn distances(&self, metric: &ProfileMetric) -> Result<(f64, f64)> {
        self.validate(metric)?;
        Ok(self.distances_unchecked(metric))
    }

    fn distances_unchecked(&self, metric: &ProfileMetric) -> (f64, f64) {
        let dist = |outer: [f64; 2], inner: [f64; 2]| {
            Self::boundary(outer, metric)
                .into_iter()
                .map(|e| interval_distance(e, inner))
                .fold(f64::INFINITY, f64::min)
        };
        (dist(self.u0, self.u1), dist(self.u1, self.u2))
    }

    pub fn validate(&self, metric: &ProfileMetric) -> Result<()> {
        for (name, r) in [("U0", self.u0), ("U1", self.u1), ("U2", self.u2)] {
            if !(r[0] < r[1] && r[0] >= metric.s_min() && r[1] <= metric.s_max()) {
                return Err(Error::InvalidShield(format!(
                    "{name} = [{}, {}] is empty or leaves the grid [{}, {}]",
                    r[0],
                    r[1],
                    metric.s_min(),
                    metric.s_max()
                )));
            }
        }
        Self::check_nested(self.u0, self.u1, metric, "U0 ⊃ closure(U1)")?;
        Self::check_nested(self.u1, self.u2, metric, "U1 ⊃ closure(U2)")?;
        if !(self.kappa > 0.0) || !(self.eta_bound > 0.0) {
            return Err(Error::InvalidShield(format!(
                "kappa = {} and eta_bound = {} must be positive",
                self.kappa, self.eta_bound
            )));
        }
        let (d0, d1) = self.distances_unchecked(metric);
        if !(d0 > 0.0 && d0.is_finite() && d1 > 0.0 && d1.is_finite()) {
            return Err(Error::InvalidShield(format!(
                "U0 needs a boundary in the grid and positive gaps (D0 = {d0}, D1 = {d1})"
            )));
        }
        Ok(())
    }
}

/// One condition of the shield definition.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShieldItem {
    pub name: &'static str,
    pub value: f64,
    pub threshold: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShieldReport {
    pub items: [ShieldItem; 4],
    pub d0: f64,
    pub d1: f64,
}

impl ShieldReport {
    pub fn verdict(&self) -> bool {
        self.items.iter().all(|i| i.pass)
    }
}

/// Evaluates the four shield conditions on the grid samples.
pub fn check_shield(metric: &ProfileMetric, spec: &ShieldSpec) -> Result<ShieldReport> {
    spec.validate(metric)?;
    let (d0, d1) = spec.distances_unchecked(metric);
    let r = metric.scalar_curvature_samples();
    let grid = metric.grid();
    let min_over = |keep: &dyn Fn(f64) -> bool| {
        grid.iter()
            .zip(&r)
            .filter(|(s, _)| keep(**s))
            .map(|(_, r)| *r)
            .fold(f64::INFINITY, f64::min)
    };
    let u2_open = |s: f64| {
        let lo = if spec.u2[0] == metric.s_min() { s >= spec.u2[0] } else { s > spec.u2[0] };
        let hi = if spec.u2[1] == metric.s_max() { s <= spec.u2[1] } else { s < spec.u2[1] };
        lo && hi
    };
    let r_u0 = min_over(&|s| in_closed(s, spec.u0));
    let r_band = min_over(&|s| in_closed(s, spec.u1) && !u2_open(s));
    let n1 = metric.dim() as f64 - 1.0;
    let mut h_max = f64::NEG_INFINITY;
    for e in ShieldSpec::boundary(spec.u0, metric) {
        // normal toward U0
        let toward = if e == spec.u0[0] { 1.0 } else { -1.0 };
        let j = metric.eval(e)?;
        h_max = h_max.max(toward * n1 * j.d1 / j.value);
    }
    let (ok4, margin) = shield_inequality(spec.kappa, d1, spec.eta_bound, d0);
    let scale = spec.kappa.max(1.0);
    Ok(ShieldReport {
        items: [
            ShieldItem {
                name: "R >= 0 on U0",
                value: r_u0,
                threshold: -SHIELD_TOLERANCE,
                pass: r_u0 >= -SHIELD_TOLERANCE,
            },
            ShieldItem {
                name: "R >= kappa on closure(U1) minus U2",
                value: r_band,
                threshold: spec.kappa,
                pass: r_band >= spec.kappa - SHIELD_TOLERANCE * scale,
            },
            ShieldItem {
                name: "H of boundary(U0) <= eta",
                value: h_max,
                threshold: spec.eta_bound,
                pass: h_max <= spec.eta_bound,
            },
            ShieldItem {
                name: "D0 > 4/(kappa D1) - 2/eta",
                value: margin,
                threshold: 0.0,
                pass: ok4,
            },
        ],
        d0,
        d1,
    })
}

/// Band where the weight follows the tan profile, with the linear band
/// coordinate `ρ(s) = slope (s - center)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Band {
    pub range: [f64; 2],
    pub center: f64,
    pub slope: f64,
}

impl Band {
    fn rho(&self, s: f64) -> f64 {
        self.slope * (s - self.center)
    }
}

/// How the weight was continued into the shield.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightCase {
    /// `|h_k| < 2/α`: constant on U2, linear ramp on U1 \ U2, `±2/(α - ρ_k)` beyond.
    Ramp,
    /// `|h_k| >= 2/α`: constant on U1, shifted `±2/(α - ρ_k)` beyond.
    Shifted,
    /// `h_k = ±∞`: infinite on the whole shield side.
    Infinite,
}

/// Weight samples aligned with a grid. `±∞` marks where the weight has
/// blown up, NaN marks samples outside the band and `U0`.
#[derive(Debug, Clone, PartialEq)]
pub struct MuWeight {
    pub values: Vec<f64>,
    /// `|∇h|` where `h` is finite; one-sided maxima at ramp corners.
    pub gradient: Vec<f64>,
    pub lipschitz: f64,
    pub alpha: f64,
    /// Value where the band meets the shield.
    pub h_k: f64,
    pub case: WeightCase,
    /// `D0` measured from the far side of `U1`.
    pub d0: f64,
}

impl MuWeight {
    pub fn is_finite_at(&self, i: usize) -> bool {
        self.values[i].is_finite()
    }
}

/// `(h, |∇h|)` of the tan profile at band coordinate `rho` with `|ρ'| = speed`.
fn tan_profile(kappa: f64, lipschitz: f64, rho: f64, speed: f64) -> (f64, f64) {
    let k = kappa.sqrt();
    let theta = k * rho / (2.0 * lipschitz);
    if theta.abs() >= FRAC_PI_2 {
        return (-theta.signum() * f64::INFINITY, f64::NAN);
    }
    let sec2 = 1.0 / theta.cos().powi(2);
    (-k * theta.tan(), k * sec2 * k * speed / (2.0 * lipschitz))
}

/// Builds the weight on a band followed by a shield. `lipschitz` is the
/// bound claimed for `|∇ρ|` and `kappa_band` the lower bound for `R` on the
/// band. `alpha` defaults to [`default_alpha`].
pub fn build_mu_weight(
    metric: &ProfileMetric,
    spec: &ShieldSpec,
    band: &Band,
    lipschitz: f64,
    kappa_band: f64,
    alpha: Option<f64>,
) -> Result<MuWeight> {
    if !(lipschitz > 0.0 && kappa_band > 0.0) {
        return Err(Error::InvalidShield(format!(
            "L = {lipschitz} and band kappa = {kappa_band} must be positive"
        )));
    }
    if !(spec.kappa > 0.0 && spec.eta_bound > 0.0) {
        return Err(Error::InvalidShield("kappa and eta_bound must be positive".into()));
    }
    let grid = metric.grid();
    let r = metric.scalar_curvature_samples();
    let band_min = grid
        .iter()
        .zip(&r)
        .filter(|(s, _)| in_closed(**s, band.range))
        .map(|(_, r)| *r)
        .fold(f64::INFINITY, f64::min);
    if band_min < kappa_band - SHIELD_TOLERANCE * kappa_band.max(1.0) {
        return Err(Error::InvalidShield(format!(
            "min R = {band_min} on the band is below {kappa_band}"
        )));
    }

    // shield side: direction away from the band, junction where they meet
    let (junction, dir) = if band.range[1] <= spec.u0[0] {
        (band.range[1], 1.0)
    } else if band.range[0] >= spec.u0[1] {
        (band.range[0], -1.0)
    } else {
        return Err(Error::InvalidShield("band overlaps U0".into()));
    };
    let far = |r: [f64; 2]| if dir > 0.0 { r[1] } else { r[0] };
    let x2 = dir * (far(spec.u2) - junction);
    let x1 = dir * (far(spec.u1) - junction);
    let x0 = dir * (far(spec.u0) - junction);
    if !(0.0 < x2 && x2 < x1 && x1 < x0) {
        return Err(Error::InvalidShield("regions must nest away from the band".into()));
    }
    let d1 = x1 - x2;
    let d0 = x0 - x1;
    let alpha = alpha.unwrap_or_else(|| default_alpha(spec.kappa, d1));
    if let Some(bound) = barrier_bound(spec.eta_bound, alpha, d0) {
        if bound >= 0.0 {
            return Err(Error::NoBarrier(format!(
                "weight is finite on ∂U0 (α = {alpha} > D0 = {d0}) and η - 2/(α - D0) = {bound} >= 0"
            )));
        }
    }

    let (h_k, _) = tan_profile(kappa_band, lipschitz, band.rho(junction), band.slope.abs());
    let case = if !h_k.is_finite() {
        WeightCase::Infinite
    } else if h_k.abs() < 2.0 / alpha {
        WeightCase::Ramp
    } else {
        WeightCase::Shifted
    };
    let sign = if h_k < 0.0 { -1.0 } else { 1.0 };
    let target = sign * 2.0 / alpha;

    let mut values = vec![f64::NAN; grid.len()];
    let mut gradient = vec![f64::NAN; grid.len()];
    for (i, s) in grid.iter().enumerate() {
        if in_closed(*s, band.range) {
            let (h, g) = tan_profile(kappa_band, lipschitz, band.rho(*s), band.slope.abs());
            values[i] = h;
            gradient[i] = g;
            continue;
        }
        let x = dir * (s - junction);
        if x < 0.0 || x > x0 {
            continue;
        }
        if case == WeightCase::Infinite {
            values[i] = h_k;
            continue;
        }
        let (h, g) = if x <= x2 {
            (h_k, if case == WeightCase::Ramp && x == x2 { (target - h_k).abs() / d1 } else { 0.0 })
        } else if x < x1 {
            match case {
                WeightCase::Ramp => (h_k + (target - h_k) * (x - x2) / d1, (target - h_k).abs() / d1),
                _ => (h_k, 0.0),
            }
        } else {
            let rho = x - x1;
            if rho >= alpha {
                (sign * f64::INFINITY, f64::NAN)
            } else {
                let core = sign * 2.0 / (alpha - rho);
                let slope = 2.0 / (alpha - rho).powi(2);
                match case {
                    WeightCase::Ramp => {
                        // corner at ρ = 0 meets the ramp
                        let g = if rho == 0.0 { slope.max((target - h_k).abs() / d1) } else { slope };
                        (core, g)
                    }
                    _ => (core + (h_k - target), slope),
                }
            }
        };
        values[i] = h;
        gradient[i] = g;
    }
    Ok(MuWeight {
        values,
        gradient,
        lipschitz,
        alpha,
        h_k,
        case,
        d0,
    })
}

/// Minimum of `R + h^2 - 2|∇h|` over samples where the weight is finite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeightCheck {
    pub min: f64,
    pub location: f64,
    pub samples: usize,
}

impl WeightCheck {
    pub fn certified(&self) -> bool {
        self.samples > 0 && self.min > 0.0
    }
}

pub fn verify_weight(metric: &ProfileMetric, weight: &MuWeight) -> WeightCheck {
    let r = metric.scalar_curvature_samples();
    let mut check = WeightCheck {
        min: f64::INFINITY,
        location: f64::NAN,
        samples: 0,
    };
    for i in 0..metric.len() {
        if !weight.is_finite_at(i) {
            continue;
        }
        let h = weight.values[i];
        let v = r[i] + h * h - 2.0 * weight.gradient[i];
        check.samples += 1;
        if v < check.min {
            check.min = v;
            check.location = metric.grid()[i];
        }
    }
    check
}

/// Whether `∂U0` acts as a barrier for the weighted problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Barrier {
    /// The weight is finite on `∂U0`. `value` is `H - |h|` there with the
    /// metric's own mean curvature, `bound` is `η - 2/(α - D0)`.
    Finite { value: f64, bound: f64 },
    /// The weight reaches `±∞` before `∂U0`.
    InteriorInfinity,
}

impl Barrier {
    pub fn certified(&self) -> bool {
        match self {
            Barrier::Finite { value, bound } => *value < 0.0 && *bound < 0.0,
            Barrier::InteriorInfinity => true,
        }
    }
}

pub fn barrier_sign(metric: &ProfileMetric, spec: &ShieldSpec, band: &Band, weight: &MuWeight) -> Result<Barrier> {
    let Some(bound) = barrier_bound(spec.eta_bound, weight.alpha, weight.d0) else {
        return Ok(Barrier::InteriorInfinity);
    };
    let (e, toward) = if band.range[1] <= spec.u0[0] { (spec.u0[1], -1.0) } else { (spec.u0[0], 1.0) };
    let j = metric.eval(e)?;
    let mean = toward * (metric.dim() as f64 - 1.0) * j.d1 / j.value;
    let i = metric.nearest_index(e);
    let h = if weight.values[i].is_finite() {
        weight.values[i].abs()
    } else {
        f64::INFINITY
    };
    Ok(Barrier::Finite {
        value: mean - h,
        bound,
    })
}
