//! Radial conformal correction `-a Δu + V u = 0` and the metric `u^{4/(n-2)} g`.
//!
//! The equation is discretized by finite volumes in self-adjoint form. With
//! `Φ = ω h^{n-1} u'` the flux through a coordinate sphere, `Φ' = (V/a) u ω h^{n-1}`.
//! Face fluxes use midpoint conductances, cell sources use dual-cell volumes,
//! so `Σ V u vol / a` telescopes to the flux at the outer sphere. That flux
//! enters the mass change exactly as in the continuum identity.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{misner_sharp_from_jet, scalar_from_jet, AdmMass, End, EndKind, ProfileMetric};
use crate::numerics::{smooth_step, GaussLegendre, Jet};

/// Quadrature order for dual-cell volumes.
const VOLUME_ORDER: usize = 4;
/// Inner sample counts as a regular center when `h_0` is this small relative
/// to the first grid step.
const CENTER_RATIO: f64 = 1e-2;

/// `a = 4(n-1)/(n-2)`.
pub fn conformal_coefficient(dim: usize) -> f64 {
    let n = dim as f64;
    4.0 * (n - 1.0) / (n - 2.0)
}

/// Potential sampled on a metric grid, with the range it is supported in.
#[derive(Debug, Clone, PartialEq)]
pub struct Potential {
    values: Vec<f64>,
    support: Option<(f64, f64)>,
}

impl Potential {
    /// Samples aligned with `metric`. The support is the hull of the nonzero
    /// samples widened by one cell, which is where the piecewise-linear
    /// interpolant is nonzero.
    pub fn new(metric: &ProfileMetric, values: Vec<f64>) -> Result<Self> {
        if values.len() != metric.len() {
            return Err(Error::InvalidPotential(format!(
                "{} samples for a grid of {}",
                values.len(),
                metric.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidPotential("samples must be finite".into()));
        }
        let grid = metric.grid();
        let first = values.iter().position(|v| *v != 0.0);
        let last = values.iter().rposition(|v| *v != 0.0);
        let support = first.zip(last).map(|(i, j)| {
            (grid[i.saturating_sub(1)], grid[(j + 1).min(grid.len() - 1)])
        });
        Ok(Self { values, support })
    }

    /// Declares the support explicitly, e.g. for an indicator function.
    pub fn with_support(mut self, metric: &ProfileMetric, range: (f64, f64)) -> Result<Self> {
        let (a, b) = range;
        if !(a <= b && a >= metric.s_min() && b <= metric.s_max()) {
            return Err(Error::InvalidPotential(format!("support [{a}, {b}] outside the grid")));
        }
        let outside = metric
            .grid()
            .iter()
            .zip(&self.values)
            .any(|(s, v)| (*s < a || *s > b) && *v != 0.0);
        if outside {
            return Err(Error::InvalidPotential(format!("nonzero samples outside [{a}, {b}]")));
        }
        self.support = Some(range);
        Ok(self)
    }

    /// Zeroes the samples outside `[a, b]`.
    pub fn restricted(&self, metric: &ProfileMetric, range: (f64, f64)) -> Result<Self> {
        let values = metric
            .grid()
            .iter()
            .zip(&self.values)
            .map(|(s, v)| if *s < range.0 || *s > range.1 { 0.0 } else { *v })
            .collect();
        Self::new(metric, values)
    }

    pub fn zero(metric: &ProfileMetric) -> Self {
        Self {
            values: vec![0.0; metric.len()],
            support: None,
        }
    }

    pub fn constant(metric: &ProfileMetric, c: f64) -> Result<Self> {
        Self::new(metric, vec![c; metric.len()])
    }

    /// `V(s) = f(s, jet of h at s)`.
    pub fn from_fn(metric: &ProfileMetric, f: impl Fn(f64, Jet) -> f64) -> Result<Self> {
        let values = (0..metric.len()).map(|i| f(metric.grid()[i], metric.jet(i))).collect();
        Self::new(metric, values)
    }

    /// Smooth compactly supported bump `A exp(1 - 1/(1 - x^2))`, `x = (s - c)/w`.
    pub fn bump(metric: &ProfileMetric, center: f64, width: f64, amplitude: f64) -> Result<Self> {
        if !(width > 0.0) {
            return Err(Error::InvalidPotential(format!("bump width {width} must be positive")));
        }
        Self::from_fn(metric, |s, _| amplitude * bump_profile((s - center) / width))
    }

    /// `V = -(R_g)^- = min(R_g, 0)`.
    pub fn negative_part_of_scalar(metric: &ProfileMetric) -> Result<Self> {
        let values = metric.scalar_curvature_samples().into_iter().map(|r| r.min(0.0)).collect();
        Self::new(metric, values)
    }

    /// `V = χ f(R_g)` with [`capped_identity`] for `f` and a smooth cutoff `χ`
    /// equal to 1 on `|s - s0| <= delta` and 0 beyond `2 delta`. Unlike the
    /// negative part this is as smooth as `R_g`.
    pub fn smoothed_scalar_cutoff(metric: &ProfileMetric, s0: f64, delta: f64) -> Result<Self> {
        if !(delta > 0.0) {
            return Err(Error::InvalidPotential(format!("cutoff scale {delta} must be positive")));
        }
        let r = metric.scalar_curvature_samples();
        let values = metric
            .grid()
            .iter()
            .zip(&r)
            .map(|(s, r)| {
                let chi = 1.0 - smooth_step(((s - s0).abs() - delta) / delta).value;
                chi * capped_identity(*r)
            })
            .collect();
        Self::new(metric, values)
    }

    /// Two-column CSV `(s, V)` with a header, linearly interpolated onto the
    /// grid and zero outside the tabulated range.
    pub fn from_csv(path: &Path, metric: &ProfileMetric) -> Result<Self> {
        let csv_err = |source| Error::Csv {
            path: path.to_path_buf(),
            source,
        };
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_path(path)
            .map_err(csv_err)?;
        let mut table: Vec<(f64, f64)> = Vec::new();
        for record in reader.deserialize::<(f64, f64)>() {
            table.push(record.map_err(csv_err)?);
        }
        if table.len() < 2 || table.windows(2).any(|w| !(w[1].0 > w[0].0)) {
            return Err(Error::InvalidPotential(format!(
                "{}: need at least two rows with increasing s",
                path.display()
            )));
        }
        let xs: Vec<f64> = table.iter().map(|r| r.0).collect();
        let values = metric
            .grid()
            .iter()
            .map(|s| {
                if *s < xs[0] || *s > xs[xs.len() - 1] {
                    return 0.0;
                }
                let i = crate::numerics::bracket(&xs, *s);
                let (x0, y0) = table[i];
                let (x1, y1) = table[i + 1];
                y0 + (y1 - y0) * (s - x0) / (x1 - x0)
            })
            .collect();
        Self::new(metric, values)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn support(&self) -> Option<(f64, f64)> {
        self.support
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            values: self.values.iter().map(|v| c * v).collect(),
            support: if c == 0.0 { None } else { self.support },
        }
    }

    /// `V^- = max(-V, 0)` pointwise.
    pub fn negative_part(&self) -> Vec<f64> {
        self.values.iter().map(|v| (-v).max(0.0)).collect()
    }

    pub fn is_nonnegative(&self) -> bool {
        self.values.iter().all(|v| *v >= 0.0)
    }

    pub fn is_nonpositive(&self) -> bool {
        self.values.iter().all(|v| *v <= 0.0)
    }
}

fn bump_profile(x: f64) -> f64 {
    if x.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - x * x)).exp()
    }
}

/// Smooth `f` with `f(t) = t` for `t <= 1/2`, `f' = 1 - S(2t - 1)` on
/// `[1/2, 1]` and `f = 3/4` for `t >= 1`, where `S` is the smooth step.
/// Then `f(t) <= min(t, 1)` everywhere.
pub fn capped_identity(t: f64) -> f64 {
    if t <= 0.5 {
        return t;
    }
    if t >= 1.0 {
        return 0.75;
    }
    let rule = GaussLegendre::new(16);
    0.5 + rule.integrate(0.5, t, |x| 1.0 - smooth_step(2.0 * x - 1.0).value)
}

/// Exponents of the weighted norm `L^p_{-q-2}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightedNormConfig {
    pub p: f64,
    pub q: f64,
}

impl WeightedNormConfig {
    pub fn new(dim: usize, p: f64, q: f64) -> Result<Self> {
        let config = Self { p, q };
        config.validate(dim)?;
        Ok(config)
    }

    /// `p = 2n`, `q = 3(n-2)/4`.
    pub fn default_for(dim: usize) -> Self {
        let n = dim as f64;
        Self {
            p: 2.0 * n,
            q: 0.75 * (n - 2.0),
        }
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        let n = dim as f64;
        if !(self.p > n) {
            return Err(Error::InvalidNormConfig(format!("p = {} must exceed n = {dim}", self.p)));
        }
        if !(self.q > (n - 2.0) / 2.0) {
            return Err(Error::InvalidNormConfig(format!(
                "q = {} must exceed (n-2)/2 = {}",
                self.q,
                (n - 2.0) / 2.0
            )));
        }
        Ok(())
    }

    /// Weight exponent `s` of the potential's space `L^p_s`.
    pub fn potential_weight(&self) -> f64 {
        -self.q - 2.0
    }
}

/// The three norms in the smallness hypothesis of the solver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeightedNorms {
    /// `||V^-||_{L^{n/2}}`.
    pub negative_part: f64,
    /// `||V||_{L^p_{-q-2}}`.
    pub weighted: f64,
    /// `||V||_{L^{2n/(n+2)}}`.
    pub dual: f64,
}

impl WeightedNorms {
    pub fn sum(&self) -> f64 {
        self.negative_part + self.weighted + self.dual
    }
}

/// Norms of `v` over its support. The weighted norm is
/// `(int (h^{q+2} |V|)^p dmu / h^n)^{1/p}`, i.e. `|x| = h` with `dx/|x|^n`.
pub fn weighted_norms(v: &Potential, metric: &ProfileMetric, config: &WeightedNormConfig) -> Result<WeightedNorms> {
    let dim = metric.dim();
    config.validate(dim)?;
    check_aligned(v, metric)?;
    let Some(range) = v.support() else {
        return Ok(WeightedNorms {
            negative_part: 0.0,
            weighted: 0.0,
            dual: 0.0,
        });
    };
    let n = dim as f64;
    let lp = |f: Vec<f64>, p: f64| -> Result<f64> { Ok(metric.integrate(&f, range)?.max(0.0).powf(1.0 / p)) };

    let half = n / 2.0;
    let negative_part = lp(v.negative_part().iter().map(|x| x.powf(half)).collect(), half)?;

    let weighted = lp(
        v.values()
            .iter()
            .zip(metric.warp())
            .map(|(x, h)| (h.powf(config.q + 2.0) * x.abs()).powf(config.p) / h.powf(n))
            .collect(),
        config.p,
    )?;

    let r = 2.0 * n / (n + 2.0);
    let dual = lp(v.values().iter().map(|x| x.abs().powf(r)).collect(), r)?;
    Ok(WeightedNorms {
        negative_part,
        weighted,
        dual,
    })
}

fn check_aligned(v: &Potential, metric: &ProfileMetric) -> Result<()> {
    if v.values().len() != metric.len() {
        return Err(Error::InvalidPotential(format!(
            "{} samples for a grid of {}",
            v.values().len(),
            metric.len()
        )));
    }
    Ok(())
}

/// Condition at the inner end of the grid. Both impose zero flux; `Natural`
/// is for a regular center or a complete end, where the flux vanishes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InnerBoundary {
    NeumannAtInner,
    #[serde(rename = "none")]
    Natural,
}

/// Discrete solution with the conformal metric it defines.
#[derive(Debug, Clone)]
pub struct ConformalSolution {
    pub u: Vec<f64>,
    pub du: Vec<f64>,
    pub d2u: Vec<f64>,
    /// `a = 4(n-1)/(n-2)`.
    pub a: f64,
    /// Flux `ω h^{n-1} u'` through the outermost sphere.
    pub flux: f64,
    /// Max over rows of the discrete residual relative to the row scale.
    pub residual: f64,
    /// Least-squares slope of `ln|u - 1|` against `ln h` over the last decade.
    pub decay_exponent: Option<f64>,
    /// `u^{4/(n-2)} g`.
    pub metric: ProfileMetric,
    conductance: Vec<f64>,
    volume: Vec<f64>,
}

impl ConformalSolution {
    pub fn sup_deviation(&self) -> f64 {
        self.u.iter().map(|u| (u - 1.0).abs()).fold(0.0, f64::max)
    }

    pub fn min_u(&self) -> f64 {
        self.u.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_u(&self) -> f64 {
        self.u.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Dual-cell volumes used by the discretization.
    pub fn volumes(&self) -> &[f64] {
        &self.volume
    }
}

/// Midpoint conductances `ω h(mid)^{n-1} / Δs` and dual-cell volumes for
/// the samples `lo..=hi`. The outer half cells are clipped at `lo` and `hi`.
pub(crate) fn cell_geometry(metric: &ProfileMetric, lo: usize, hi: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let s = &metric.grid()[lo..=hi];
    let omega = metric.omega();
    let p = metric.dim() as i32 - 1;
    let n = s.len();
    let rule = GaussLegendre::new(VOLUME_ORDER);
    let mids: Vec<f64> = s.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    let mut conductance = Vec::with_capacity(n - 1);
    for (k, m) in mids.iter().enumerate() {
        conductance.push(omega * metric.eval(*m)?.value.powi(p) / (s[k + 1] - s[k]));
    }
    let area = |a: f64, b: f64| -> Result<f64> {
        let mut total = 0.0;
        for (x, w) in rule.mapped(a, b) {
            total += w * metric.eval(x)?.value.powi(p);
        }
        Ok(omega * total)
    };
    let mut volume = Vec::with_capacity(n);
    for i in 0..n {
        let mut v = 0.0;
        if i > 0 {
            v += area(mids[i - 1], s[i])?;
        }
        if i + 1 < n {
            v += area(s[i], mids[i])?;
        }
        volume.push(v);
    }
    Ok((conductance, volume))
}

/// Solves `-a Δu + V u = 0` with zero flux at the inner end and the Robin
/// condition `u' + (n-2)(h'/h)(u - 1) = 0` at the outer end, which harmonic
/// functions `1 + c h^{2-n}` of a flat end satisfy exactly.
///
/// The homogeneous recursion is shot from the inner end and scaled to meet the
/// Robin row. A non-positive iterate or scale means the operator is not
/// positive at this size of `V`, reported as [`Error::Unsolvable`].
pub fn solve_conformal(metric: &ProfileMetric, v: &Potential, boundary: InnerBoundary) -> Result<ConformalSolution> {
    check_aligned(v, metric)?;
    if metric.end_kind(End::Outer) != EndKind::AsymptoticallyFlat {
        return Err(Error::NotAsymptoticallyFlat("the outer end carries the decay condition".into()));
    }
    if boundary == InnerBoundary::Natural && metric.end_kind(End::Inner) == EndKind::Boundary {
        return Err(Error::InvalidPotential(
            "inner end is a boundary; use the Neumann condition there".into(),
        ));
    }
    let h = metric.warp();
    let s = metric.grid();
    let len = metric.len();
    let last = len - 1;
    let h_end = h[last];
    let leaks = (0..len).any(|i| h[i] >= h_end / 10.0 && v.values()[i] != 0.0);
    if leaks {
        return Err(Error::InvalidPotential(
            "potential must vanish on the last decade of the flat end".into(),
        ));
    }

    let dim = metric.dim();
    let n = dim as f64;
    let a = conformal_coefficient(dim);
    let omega = metric.omega();
    let (conductance, volume) = cell_geometry(metric, 0, last)?;
    let source: Vec<f64> = v.values().iter().zip(&volume).map(|(v, vol)| v * vol / a).collect();

    let mut y = Vec::with_capacity(len);
    let mut faces = Vec::with_capacity(last);
    y.push(1.0);
    let mut flux = 0.0;
    for i in 0..last {
        flux += source[i] * y[i];
        faces.push(flux);
        let next = y[i] + flux / conductance[i];
        if !(next > 0.0) || !next.is_finite() {
            return Err(Error::Unsolvable(format!(
                "shooting solution reaches {next:e} at s = {}",
                s[i + 1]
            )));
        }
        y.push(next);
    }
    let outer_flux = flux + source[last] * y[last];
    let kappa = omega * h_end.powi(dim as i32 - 2) * (n - 2.0) * metric.warp_d1()[last];
    let denominator = outer_flux + kappa * y[last];
    if !(denominator > 0.0) || !denominator.is_finite() {
        return Err(Error::Unsolvable(format!(
            "no positive solution meets the decay condition (denominator {denominator:e})"
        )));
    }
    let scale = kappa / denominator;
    let u: Vec<f64> = y.iter().map(|y| scale * y).collect();
    let faces: Vec<f64> = faces.iter().map(|f| scale * f).collect();
    let flux = scale * outer_flux;

    // node fluxes interpolated between faces
    let mids: Vec<f64> = s.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    let mut node_flux = vec![0.0; len];
    for i in 1..last {
        let t = (s[i] - mids[i - 1]) / (mids[i] - mids[i - 1]);
        node_flux[i] = faces[i - 1] + (faces[i] - faces[i - 1]) * t;
    }
    node_flux[last] = flux;
    let p = dim as i32 - 1;
    let du: Vec<f64> = (0..len).map(|i| node_flux[i] / (omega * h[i].powi(p))).collect();
    let centered = h[0] < CENTER_RATIO * (s[1] - s[0]);
    let d2u: Vec<f64> = (0..len)
        .map(|i| {
            let vu = v.values()[i] * u[i] / a;
            if i == 0 && centered {
                vu / n
            } else {
                vu - (n - 1.0) * metric.warp_d1()[i] / h[i] * du[i]
            }
        })
        .collect();

    let residual = discrete_residual(&u, &conductance, &source, kappa);
    let decay_exponent = decay_exponent(h, &u);
    let jets: Vec<Jet> = (0..len)
        .map(|i| Jet {
            value: u[i],
            d1: du[i],
            d2: d2u[i],
        })
        .collect();
    let tilde = conformal_metric(metric, &jets)?;
    Ok(ConformalSolution {
        u,
        du,
        d2u,
        a,
        flux,
        residual,
        decay_exponent,
        metric: tilde,
        conductance,
        volume,
    })
}

fn discrete_residual(u: &[f64], conductance: &[f64], source: &[f64], kappa: f64) -> f64 {
    let last = u.len() - 1;
    let face = |k: usize| conductance[k] * (u[k + 1] - u[k]);
    let mut worst: f64 = 0.0;
    for i in 0..=last {
        let left = if i == 0 { 0.0 } else { face(i - 1) };
        let right = if i == last { -kappa * (u[last] - 1.0) } else { face(i) };
        let c_left = if i == 0 { 0.0 } else { conductance[i - 1] };
        let c_right = if i == last { kappa } else { conductance[i] };
        let row = right - left - source[i] * u[i];
        let scale = (c_left + c_right + source[i].abs()) * u[i].abs();
        if scale > 0.0 {
            worst = worst.max(row.abs() / scale);
        }
    }
    worst
}

fn decay_exponent(h: &[f64], u: &[f64]) -> Option<f64> {
    let h_end = *h.last()?;
    let pts: Vec<(f64, f64)> = h
        .iter()
        .zip(u)
        .filter(|(h, u)| **h >= h_end / 10.0 && (**u - 1.0).abs() > 0.0)
        .map(|(h, u)| (h.ln(), (u - 1.0).abs().ln()))
        .collect();
    if pts.len() < 4 {
        return None;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Some(sxy / sxx)
}

/// `u^{4/(n-2)} g` from the jets `(u, u', u'')` at each sample. With
/// `k = 2/(n-2)` the new arclength is `int u^k ds` and the new warping
/// function is `u^k h`.
pub fn conformal_metric(metric: &ProfileMetric, u: &[Jet]) -> Result<ProfileMetric> {
    if u.len() != metric.len() {
        return Err(Error::InvalidPotential("conformal factor is not aligned with the grid".into()));
    }
    if u.iter().any(|j| !(j.value > 0.0)) {
        return Err(Error::Unsolvable("conformal factor must be positive".into()));
    }
    let k = 2.0 / (metric.dim() as f64 - 2.0);
    let s = metric.grid();
    let speed: Vec<(f64, f64)> = u
        .iter()
        .map(|j| (j.value.powf(k), k * j.value.powf(k - 1.0) * j.d1))
        .collect();
    let mut grid = Vec::with_capacity(s.len());
    let mut acc = s[0] * speed[0].0;
    grid.push(acc);
    for i in 0..s.len() - 1 {
        let d = s[i + 1] - s[i];
        // trapezoid with the endpoint derivative correction
        acc += 0.5 * d * (speed[i].0 + speed[i + 1].0) + d * d / 12.0 * (speed[i].1 - speed[i + 1].1);
        grid.push(acc);
    }
    let mut warp = Vec::with_capacity(s.len());
    let mut d1 = Vec::with_capacity(s.len());
    let mut d2 = Vec::with_capacity(s.len());
    for (i, j) in u.iter().enumerate() {
        let g = metric.jet(i);
        let r = j.d1 / j.value;
        let uk = speed[i].0;
        warp.push(uk * g.value);
        d1.push(g.d1 + k * g.value * r);
        d2.push((g.d2 + k * (g.d1 * r + g.value * j.d2 / j.value - g.value * r * r)) / uk);
    }
    ProfileMetric::with_derivatives(metric.dim(), grid, warp, d1, d2, metric.ends())
}

/// `R~ = (R_g - V) u^{-4/(n-2)}`.
pub fn conformal_scalar(sol: &ConformalSolution, v: &Potential, metric: &ProfileMetric) -> Vec<f64> {
    let e = -4.0 / (metric.dim() as f64 - 2.0);
    metric
        .scalar_curvature_samples()
        .iter()
        .zip(v.values())
        .zip(&sol.u)
        .map(|((r, v), u)| (r - v) * u.powf(e))
        .collect()
}

/// Mass before and after the conformal change.
#[derive(Debug, Clone)]
pub struct MassChange {
    /// ADM mass of the original metric.
    pub original: AdmMass,
    /// `int V u dmu` with the solver's cell volumes.
    pub integral: f64,
    /// `m - int V u dmu / (2(n-1)ω)`.
    pub formula: f64,
    /// ADM mass of the conformal metric, computed directly.
    pub direct: AdmMass,
}

impl MassChange {
    pub fn discrepancy(&self) -> f64 {
        (self.formula - self.direct.extrapolated).abs()
    }
}

pub fn mass_change(sol: &ConformalSolution, v: &Potential, metric: &ProfileMetric) -> Result<MassChange> {
    let original = metric.adm_mass(End::Outer)?;
    let integral: f64 = v.values().iter().zip(&sol.u).zip(&sol.volume).map(|((v, u), vol)| v * u * vol).sum();
    let n = metric.dim() as f64;
    let formula = original.extrapolated - integral / (2.0 * (n - 1.0) * metric.omega());
    let direct = sol.metric.adm_mass(End::Outer)?;
    Ok(MassChange {
        original,
        integral,
        formula,
        direct,
    })
}

/// `int (a |∇u|^2 + V u^2) dmu`, with the gradient term taken face by face.
pub fn energy_lower_bound(sol: &ConformalSolution, v: &Potential) -> f64 {
    let gradient: f64 = sol
        .conductance
        .iter()
        .zip(sol.u.windows(2))
        .map(|(c, w)| c * (w[1] - w[0]).powi(2))
        .sum();
    let potential: f64 = v.values().iter().zip(&sol.u).zip(&sol.volume).map(|((v, u), vol)| v * u * u * vol).sum();
    sol.a * gradient + potential
}

/// Slack in `m~ <= m - E / (2(n-1)ω)`; nonnegative when the bound holds.
pub fn energy_margin(change: &MassChange, energy: f64, dim: usize) -> f64 {
    let n = dim as f64;
    let omega = crate::geometry::unit_sphere_volume(dim - 1);
    change.original.extrapolated - energy / (2.0 * (n - 1.0) * omega) - change.formula
}

/// Misner-Sharp profile of the conformal metric, for reports.
pub fn conformal_misner_sharp(sol: &ConformalSolution) -> Vec<f64> {
    (0..sol.metric.len())
        .map(|i| misner_sharp_from_jet(sol.metric.dim(), sol.metric.jet(i)))
        .collect()
}

/// Scalar curvature of the conformal metric read off its own profile.
pub fn conformal_scalar_from_profile(sol: &ConformalSolution) -> Vec<f64> {
    (0..sol.metric.len())
        .map(|i| scalar_from_jet(sol.metric.dim(), sol.metric.jet(i)))
        .collect()
}
