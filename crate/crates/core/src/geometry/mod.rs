//! Rotationally symmetric metrics `g = ds^2 + h(s)^2 sigma` in arclength gauge.
//!
//! `sigma` is the round metric on the unit `(n-1)`-sphere. Curvature, mean
//! curvature of the coordinate spheres and the Misner-Sharp mass are closed
//! forms in `(h, h', h'')`; those derivatives are exact on analytic presets
//! and five-point finite differences on tabulated profiles.

pub mod adm;
pub mod grid;
pub mod presets;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{bracket, hermite_quintic, Jet};

pub use adm::AdmMass;

/// Smallest supported dimension.
pub const MIN_DIM: usize = 3;
/// Largest supported dimension.
pub const MAX_DIM: usize = 7;
/// Minimum number of grid samples.
pub const MIN_SAMPLES: usize = 16;
/// Default tolerance for the asymptotic-flatness test on the last decade.
pub const DEFAULT_AF_TOLERANCE: f64 = 1e-3;

/// Volume of the unit `k`-sphere.
pub fn unit_sphere_volume(k: usize) -> f64 {
    use std::f64::consts::PI;
    match k {
        0 => 2.0,
        1 => 2.0 * PI,
        _ => 2.0 * PI / (k as f64 - 1.0) * unit_sphere_volume(k - 2),
    }
}

/// Volume `omega_{n-1}` of the unit sphere bounding the unit `n`-ball.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphereConstants {
    pub omega: f64,
}

impl SphereConstants {
    pub fn new(dim: usize) -> Self {
        Self {
            omega: unit_sphere_volume(dim - 1),
        }
    }
}

/// Classification of one end of the profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EndKind {
    AsymptoticallyFlat,
    CompleteOther,
    Boundary,
    TruncatedIncomplete,
}

/// Which end of the grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum End {
    Inner,
    Outer,
}

impl End {
    fn slot(self) -> usize {
        match self {
            End::Inner => 0,
            End::Outer => 1,
        }
    }
}

/// Side toward which the unit normal of a coordinate sphere points.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    /// Toward increasing `s`.
    Increasing,
    /// Toward decreasing `s`.
    Decreasing,
}

impl Orientation {
    pub fn sign(self) -> f64 {
        match self {
            Orientation::Increasing => 1.0,
            Orientation::Decreasing => -1.0,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Orientation::Increasing => Orientation::Decreasing,
            Orientation::Decreasing => Orientation::Increasing,
        }
    }
}

/// Eigenvalues of the Ricci tensor: one radial, `n-1` equal tangential.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ricci {
    pub radial: f64,
    pub tangential: f64,
}

impl Ricci {
    pub fn max_abs(&self) -> f64 {
        self.radial.abs().max(self.tangential.abs())
    }
}

/// Scalar curvature of `ds^2 + h^2 sigma` in dimension `n`.
pub fn scalar_from_jet(n: usize, j: Jet) -> f64 {
    let n = n as f64;
    -2.0 * (n - 1.0) * j.d2 / j.value + (n - 1.0) * (n - 2.0) * (1.0 - j.d1 * j.d1) / (j.value * j.value)
}

/// Ricci eigenvalues of `ds^2 + h^2 sigma` in dimension `n`.
pub fn ricci_from_jet(n: usize, j: Jet) -> Ricci {
    let n = n as f64;
    Ricci {
        radial: -(n - 1.0) * j.d2 / j.value,
        tangential: -j.d2 / j.value + (n - 2.0) * (1.0 - j.d1 * j.d1) / (j.value * j.value),
    }
}

/// Misner-Sharp mass `h^{n-2} (1 - h'^2) / 2`.
pub fn misner_sharp_from_jet(n: usize, j: Jet) -> f64 {
    0.5 * j.value.powi(n as i32 - 2) * (1.0 - j.d1 * j.d1)
}

/// Rotationally symmetric metric sampled on an arclength grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileMetric {
    dim: usize,
    grid: Vec<f64>,
    warp: Vec<f64>,
    warp_d1: Vec<f64>,
    warp_d2: Vec<f64>,
    exact: bool,
    ends: [EndKind; 2],
}

impl ProfileMetric {
    /// Tabulated profile; derivatives come from five-point stencils.
    pub fn from_samples(dim: usize, grid: Vec<f64>, warp: Vec<f64>, ends: [EndKind; 2]) -> Result<Self> {
        check_shape(dim, &grid, &warp)?;
        let (d1, d2) = grid::five_point_derivatives(&grid, &warp);
        Self::finish(dim, grid, warp, d1, d2, false, ends)
    }

    /// Profile with exact first and second derivatives supplied.
    pub fn with_derivatives(
        dim: usize,
        grid: Vec<f64>,
        warp: Vec<f64>,
        warp_d1: Vec<f64>,
        warp_d2: Vec<f64>,
        ends: [EndKind; 2],
    ) -> Result<Self> {
        check_shape(dim, &grid, &warp)?;
        if warp_d1.len() != grid.len() || warp_d2.len() != grid.len() {
            return Err(Error::InvalidProfile("derivative arrays must match the grid length".into()));
        }
        if warp_d1.iter().chain(&warp_d2).any(|v| !v.is_finite()) {
            return Err(Error::InvalidProfile("derivatives must be finite".into()));
        }
        Self::finish(dim, grid, warp, warp_d1, warp_d2, true, ends)
    }

    fn finish(
        dim: usize,
        grid: Vec<f64>,
        warp: Vec<f64>,
        warp_d1: Vec<f64>,
        warp_d2: Vec<f64>,
        exact: bool,
        ends: [EndKind; 2],
    ) -> Result<Self> {
        let metric = Self {
            dim,
            grid,
            warp,
            warp_d1,
            warp_d2,
            exact,
            ends,
        };
        for end in [End::Inner, End::Outer] {
            if metric.end_kind(end) == EndKind::AsymptoticallyFlat {
                metric.check_asymptotic_flatness(end, DEFAULT_AF_TOLERANCE)?;
            }
        }
        Ok(metric)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn warp(&self) -> &[f64] {
        &self.warp
    }

    /// `h'` at every sample; one-sided stencils at the edges of tabulated profiles.
    pub fn warp_d1(&self) -> &[f64] {
        &self.warp_d1
    }

    /// `h''` at every sample; one-sided stencils at the edges of tabulated profiles.
    pub fn warp_d2(&self) -> &[f64] {
        &self.warp_d2
    }

    pub fn is_exact(&self) -> bool {
        self.exact
    }

    pub fn ends(&self) -> [EndKind; 2] {
        self.ends
    }

    pub fn end_kind(&self, end: End) -> EndKind {
        self.ends[end.slot()]
    }

    pub fn with_ends(mut self, ends: [EndKind; 2]) -> Result<Self> {
        self.ends = ends;
        for end in [End::Inner, End::Outer] {
            if self.end_kind(end) == EndKind::AsymptoticallyFlat {
                self.check_asymptotic_flatness(end, DEFAULT_AF_TOLERANCE)?;
            }
        }
        Ok(self)
    }

    pub fn s_min(&self) -> f64 {
        self.grid[0]
    }

    pub fn s_max(&self) -> f64 {
        self.grid[self.grid.len() - 1]
    }

    pub fn omega(&self) -> f64 {
        unit_sphere_volume(self.dim - 1)
    }

    /// Sample jet at index `i`, without stencil checks.
    pub fn jet(&self, i: usize) -> Jet {
        Jet {
            value: self.warp[i],
            d1: self.warp_d1[i],
            d2: self.warp_d2[i],
        }
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i >= self.len() {
            return Err(Error::IndexOutOfRange { index: i, len: self.len() });
        }
        Ok(())
    }

    /// Jet at an index where derivatives are trustworthy: any index for exact
    /// profiles, indices with a centered stencil for tabulated ones.
    pub fn derivatives(&self, i: usize) -> Result<Jet> {
        self.check_index(i)?;
        if !self.exact && (i < 2 || i + 3 > self.len()) {
            return Err(Error::BoundaryStencil {
                index: i,
                last: self.len() - 3,
            });
        }
        Ok(self.jet(i))
    }

    pub fn scalar_curvature(&self, i: usize) -> Result<f64> {
        Ok(scalar_from_jet(self.dim, self.derivatives(i)?))
    }

    pub fn ricci_curvature(&self, i: usize) -> Result<Ricci> {
        Ok(ricci_from_jet(self.dim, self.derivatives(i)?))
    }

    /// `H = orientation (n-1) h'/h`; positive for outward Euclidean spheres.
    pub fn mean_curvature_sphere(&self, i: usize, orientation: Orientation) -> Result<f64> {
        self.check_index(i)?;
        Ok(orientation.sign() * (self.dim as f64 - 1.0) * self.warp_d1[i] / self.warp[i])
    }

    pub fn misner_sharp_mass(&self, i: usize) -> Result<f64> {
        self.check_index(i)?;
        Ok(misner_sharp_from_jet(self.dim, self.jet(i)))
    }

    /// Scalar curvature at every sample, using edge stencils where needed.
    pub fn scalar_curvature_samples(&self) -> Vec<f64> {
        (0..self.len()).map(|i| scalar_from_jet(self.dim, self.jet(i))).collect()
    }

    /// Area `omega h^{n-1}` of the coordinate sphere at index `i`.
    pub fn sphere_area(&self, i: usize) -> f64 {
        self.omega() * self.warp[i].powi(self.dim as i32 - 1)
    }

    fn check_coordinate(&self, s: f64) -> Result<()> {
        let (lo, hi) = (self.s_min(), self.s_max());
        if !(lo..=hi).contains(&s) {
            return Err(Error::OutOfRange { value: s, lo, hi });
        }
        Ok(())
    }

    /// Riemannian distance between the coordinate spheres at `a` and `b`.
    pub fn distance(&self, a: f64, b: f64) -> Result<f64> {
        self.check_coordinate(a)?;
        self.check_coordinate(b)?;
        Ok((b - a).abs())
    }

    /// Quintic Hermite reconstruction of `(h, h', h'')` at `s`.
    pub fn eval(&self, s: f64) -> Result<Jet> {
        self.check_coordinate(s)?;
        let i = bracket(&self.grid, s);
        Ok(hermite_quintic(self.grid[i], self.grid[i + 1], self.jet(i), self.jet(i + 1), s))
    }

    /// `int f dmu_g` over `[a, b]` with `dmu = omega h^{n-1} ds`, by the
    /// trapezoid rule on `f h^{n-1}`. Partial cells at the ends are
    /// linearly interpolated.
    pub fn integrate(&self, f: &[f64], range: (f64, f64)) -> Result<f64> {
        if f.len() != self.len() {
            return Err(Error::InvalidProfile(format!(
                "integrand has {} samples, grid has {}",
                f.len(),
                self.len()
            )));
        }
        let (a, b) = if range.0 <= range.1 { range } else { (range.1, range.0) };
        self.check_coordinate(a)?;
        self.check_coordinate(b)?;
        let p = self.dim as i32 - 1;
        let density: Vec<f64> = f.iter().zip(&self.warp).map(|(v, h)| v * h.powi(p)).collect();
        let mut total = 0.0;
        for i in 0..self.len() - 1 {
            let (x0, x1) = (self.grid[i], self.grid[i + 1]);
            let lo = x0.max(a);
            let hi = x1.min(b);
            if hi <= lo {
                continue;
            }
            let lerp = |x: f64| density[i] + (density[i + 1] - density[i]) * (x - x0) / (x1 - x0);
            total += 0.5 * (hi - lo) * (lerp(lo) + lerp(hi));
        }
        Ok(self.omega() * total)
    }

    /// Sub-profile on the samples with `a <= s <= b`. Cut ends become boundaries.
    pub fn restrict(&self, a: f64, b: f64) -> Result<Self> {
        let lo = self.grid.partition_point(|s| *s < a);
        let hi = self.grid.partition_point(|s| *s <= b);
        if hi <= lo || hi - lo < MIN_SAMPLES {
            return Err(Error::InvalidProfile(format!(
                "restriction to [{a}, {b}] keeps {} samples",
                hi.saturating_sub(lo)
            )));
        }
        let ends = [
            if lo == 0 { self.ends[0] } else { EndKind::Boundary },
            if hi == self.len() { self.ends[1] } else { EndKind::Boundary },
        ];
        Ok(Self {
            dim: self.dim,
            grid: self.grid[lo..hi].to_vec(),
            warp: self.warp[lo..hi].to_vec(),
            warp_d1: self.warp_d1[lo..hi].to_vec(),
            warp_d2: self.warp_d2[lo..hi].to_vec(),
            exact: self.exact,
            ends,
        })
    }

    /// The metric `c^2 g`: arclength and warping scale by `c`, `h''` by `1/c`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidProfile(format!("scale factor {c} must be positive")));
        }
        Ok(Self {
            dim: self.dim,
            grid: self.grid.iter().map(|s| c * s).collect(),
            warp: self.warp.iter().map(|h| c * h).collect(),
            warp_d1: self.warp_d1.clone(),
            warp_d2: self.warp_d2.iter().map(|v| v / c).collect(),
            exact: self.exact,
            ends: self.ends,
        })
    }

    /// The same metric with arclength shifted by `ds`.
    pub fn shifted(&self, ds: f64) -> Self {
        let mut out = self.clone();
        out.grid.iter_mut().for_each(|s| *s += ds);
        out
    }

    /// Index of the sample nearest to `s`.
    pub fn nearest_index(&self, s: f64) -> usize {
        let i = self.grid.partition_point(|x| *x < s);
        if i == 0 {
            0
        } else if i == self.len() {
            self.len() - 1
        } else if (self.grid[i] - s).abs() < (s - self.grid[i - 1]).abs() {
            i
        } else {
            i - 1
        }
    }
}

fn check_shape(dim: usize, grid: &[f64], warp: &[f64]) -> Result<()> {
    if !(MIN_DIM..=MAX_DIM).contains(&dim) {
        return Err(Error::InvalidProfile(format!("dimension {dim} outside {MIN_DIM}..={MAX_DIM}")));
    }
    if grid.len() != warp.len() {
        return Err(Error::InvalidProfile(format!(
            "grid has {} samples but warping function has {}",
            grid.len(),
            warp.len()
        )));
    }
    if grid.len() < MIN_SAMPLES {
        return Err(Error::InvalidProfile(format!(
            "{} samples, at least {MIN_SAMPLES} required",
            grid.len()
        )));
    }
    if grid.iter().any(|s| !s.is_finite()) {
        return Err(Error::InvalidProfile("grid contains non-finite values".into()));
    }
    if let Some(i) = grid.windows(2).position(|w| w[1] <= w[0]) {
        return Err(Error::InvalidProfile(format!("grid not strictly increasing at index {}", i + 1)));
    }
    if let Some(i) = warp.iter().position(|h| !(*h > 0.0 && h.is_finite())) {
        return Err(Error::InvalidProfile(format!("warping function not positive at index {i}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::presets;
    use super::*;

    #[test]
    fn sphere_volumes() {
        use std::f64::consts::PI;
        assert!((SphereConstants::new(3).omega - 4.0 * PI).abs() < 1e-14);
        assert!((unit_sphere_volume(3) - 2.0 * PI * PI).abs() < 1e-13);
        assert!((unit_sphere_volume(4) - 8.0 * PI * PI / 3.0).abs() < 1e-13);
    }

    #[test]
    fn flat_profile_is_flat() {
        let g = presets::flat_ball(3, 5.0, 200).unwrap();
        for i in [3, 50, 150] {
            assert_eq!(g.scalar_curvature(i).unwrap(), 0.0);
            let ric = g.ricci_curvature(i).unwrap();
            assert_eq!((ric.radial, ric.tangential), (0.0, 0.0));
            assert_eq!(g.misner_sharp_mass(i).unwrap(), 0.0);
        }
        let i = g.len() - 1;
        let h = g.mean_curvature_sphere(i, Orientation::Increasing).unwrap();
        assert!((h - 2.0 / 5.0).abs() < 1e-14);
    }

    #[test]
    fn cylinder_curvatures() {
        let c = 1.7;
        let g = presets::cylinder(3, c, 0.0, 4.0, 64, [EndKind::Boundary; 2]).unwrap();
        assert!((g.scalar_curvature(10).unwrap() - 2.0 / (c * c)).abs() < 1e-14);
        let ric = g.ricci_curvature(10).unwrap();
        assert_eq!(ric.radial, 0.0);
        assert!((ric.tangential - 1.0 / (c * c)).abs() < 1e-14);
        assert_eq!(g.mean_curvature_sphere(5, Orientation::Increasing).unwrap(), 0.0);
        assert!((g.misner_sharp_mass(5).unwrap() - c / 2.0).abs() < 1e-14);
    }

    #[test]
    fn schwarzschild_closed_forms() {
        let g = presets::schwarzschild(3, 1.0, 2.0, 1e5, 4000, 0.0).unwrap();
        let i = g.nearest_index(0.0);
        let ric = g.ricci_curvature(i).unwrap();
        assert!((ric.radial + 0.25).abs() < 1e-14);
        assert!((ric.tangential - 0.125).abs() < 1e-14);
        let s = presets::schwarzschild(3, 1.0, 2.5, 1e5, 4000, 0.0).unwrap();
        let h = s.mean_curvature_sphere(0, Orientation::Increasing).unwrap();
        assert!((h - 2.0 * (1.0f64 - 2.0 / 2.5).sqrt() / 2.5).abs() < 1e-14);
        assert!((h - 0.357771).abs() < 1e-6);
    }

    #[test]
    fn tabulated_profile_rejects_edge_indices() {
        let grid = grid::uniform(1.0, 2.0, 20);
        let g = ProfileMetric::from_samples(3, grid.clone(), grid, [EndKind::Boundary; 2]).unwrap();
        assert!(matches!(g.scalar_curvature(1), Err(Error::BoundaryStencil { .. })));
        assert!(matches!(g.scalar_curvature(18), Err(Error::BoundaryStencil { .. })));
        assert!(g.scalar_curvature(2).unwrap().abs() < 1e-10);
        assert!(g.scalar_curvature(17).unwrap().abs() < 1e-10);
        assert!(matches!(g.scalar_curvature(20), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn construction_validates_invariants() {
        let grid = grid::uniform(1.0, 2.0, 20);
        let mut warp = grid.clone();
        warp[4] = -1.0;
        assert!(ProfileMetric::from_samples(3, grid.clone(), warp, [EndKind::Boundary; 2]).is_err());
        assert!(ProfileMetric::from_samples(8, grid.clone(), grid.clone(), [EndKind::Boundary; 2]).is_err());
        let short = grid::uniform(1.0, 2.0, 10);
        assert!(ProfileMetric::from_samples(3, short.clone(), short, [EndKind::Boundary; 2]).is_err());
        let cyl = vec![1.0; 20];
        let err = ProfileMetric::from_samples(3, grid, cyl, [EndKind::Boundary, EndKind::AsymptoticallyFlat]);
        assert!(matches!(err, Err(Error::NotAsymptoticallyFlat(_))));
    }

    #[test]
    fn distance_is_symmetric_and_checked() {
        let g = presets::flat_ball(3, 6.0, 100).unwrap();
        assert_eq!(g.distance(0.5, 3.5).unwrap(), 3.0);
        assert_eq!(g.distance(5.0, 2.0).unwrap(), 3.0);
        assert!(g.distance(-1.0, 2.0).is_err());
    }

    #[test]
    fn volumes_by_quadrature() {
        use std::f64::consts::PI;
        let cyl = presets::cylinder(3, 1.0, 0.0, 3.0, 40, [EndKind::Boundary; 2]).unwrap();
        let ones = vec![1.0; cyl.len()];
        assert!((cyl.integrate(&ones, (0.0, 3.0)).unwrap() - 12.0 * PI).abs() < 1e-12);
        let zeros = vec![0.0; cyl.len()];
        assert_eq!(cyl.integrate(&zeros, (0.0, 3.0)).unwrap(), 0.0);
        let ball = presets::flat_ball(3, 2.0, 2001).unwrap();
        let ones = vec![1.0; ball.len()];
        let v = ball.integrate(&ones, (ball.s_min(), 2.0)).unwrap();
        assert!((v - 4.0 / 3.0 * PI * 8.0).abs() < 1e-5);
    }

    #[test]
    fn scaling_rescales_curvature() {
        let g = presets::cylinder(3, 1.0, 0.0, 3.0, 40, [EndKind::Boundary; 2]).unwrap();
        let g2 = g.scaled(2.0).unwrap();
        assert!((g2.scalar_curvature(5).unwrap() - 0.5).abs() < 1e-14);
        assert_eq!(g2.distance(0.0, 6.0).unwrap(), 6.0);
    }

    #[test]
    fn eval_interpolates_exact_profile() {
        let g = presets::schwarzschild(3, 1.0, 2.5, 1e5, 2000, 0.0).unwrap();
        let j = g.eval(1.2345).unwrap();
        let r = j.value;
        assert!((j.d1 - (1.0 - 2.0 / r).sqrt()).abs() < 1e-9);
        assert!((j.d2 - 1.0 / (r * r)).abs() < 1e-8);
    }
}
