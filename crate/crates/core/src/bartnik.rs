//! Brown-York mass of round Bartnik data and the rotationally symmetric
//! scalar-flat extension `g_+ = u^2 dr^2 + r^2 sigma`, `u^{-2} = 1 - 2c r^{2-n}`.

use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::presets::{recommended_outer_radius, schwarzschild};
use crate::geometry::{unit_sphere_volume, ProfileMetric, MAX_DIM, MIN_DIM};
use crate::numerics::GaussLegendre;

/// Relative tolerance on the quadrature weights summing to the sphere area.
pub const AREA_TOLERANCE: f64 = 1e-8;

/// Mean curvature of the boundary sphere, constant or sampled with weights.
#[derive(Debug, Clone, PartialEq)]
pub enum BoundaryMeanCurvature {
    Constant(f64),
    Sampled { values: Vec<f64>, weights: Vec<f64> },
}

/// Round Bartnik data: a sphere of area radius `rho` with mean curvature `eta`.
#[derive(Debug, Clone, PartialEq)]
pub struct BartnikData {
    dim: usize,
    rho: f64,
    eta: BoundaryMeanCurvature,
}

impl BartnikData {
    pub fn constant(dim: usize, rho: f64, eta: f64) -> Result<Self> {
        check_dim_rho(dim, rho)?;
        if !eta.is_finite() {
            return Err(Error::InvalidBartnik(format!("mean curvature {eta} is not finite")));
        }
        Ok(Self {
            dim,
            rho,
            eta: BoundaryMeanCurvature::Constant(eta),
        })
    }

    /// Sampled mean curvature; weights must integrate the area of the sphere.
    pub fn sampled(dim: usize, rho: f64, values: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        check_dim_rho(dim, rho)?;
        if values.is_empty() || values.len() != weights.len() {
            return Err(Error::InvalidBartnik(format!(
                "{} mean-curvature samples with {} weights",
                values.len(),
                weights.len()
            )));
        }
        if values.iter().chain(&weights).any(|v| !v.is_finite()) || weights.iter().any(|w| *w < 0.0) {
            return Err(Error::InvalidBartnik("samples must be finite with nonnegative weights".into()));
        }
        let area = unit_sphere_volume(dim - 1) * rho.powi(dim as i32 - 1);
        let total: f64 = weights.iter().sum();
        if (total - area).abs() > AREA_TOLERANCE * area {
            return Err(Error::InvalidBartnik(format!(
                "weights sum to {total}, sphere area is {area}"
            )));
        }
        Ok(Self {
            dim,
            rho,
            eta: BoundaryMeanCurvature::Sampled { values, weights },
        })
    }

    /// Samples `eta(theta)` of the polar angle at the nodes of [`polar_rule`].
    pub fn from_polar_fn(dim: usize, rho: f64, order: usize, eta: impl Fn(f64) -> f64) -> Result<Self> {
        let rule = polar_rule(dim, rho, order);
        let values = rule.iter().map(|(theta, _)| eta(*theta)).collect();
        let weights = rule.iter().map(|(_, w)| *w).collect();
        Self::sampled(dim, rho, values, weights)
    }

    /// Reads `(polar_angle, eta, weight)` rows with a header.
    pub fn from_csv(path: &Path, dim: usize, rho: f64) -> Result<Self> {
        let csv_err = |source| Error::Csv {
            path: path.to_path_buf(),
            source,
        };
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_path(path)
            .map_err(csv_err)?;
        let mut values = Vec::new();
        let mut weights = Vec::new();
        for row in reader.deserialize::<(f64, f64, f64)>() {
            let (_, eta, w) = row.map_err(csv_err)?;
            values.push(eta);
            weights.push(w);
        }
        Self::sampled(dim, rho, values, weights)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn eta(&self) -> &BoundaryMeanCurvature {
        &self.eta
    }

    /// Mean curvature `(n-1)/rho` of the round sphere in Euclidean space.
    pub fn euclidean_mean_curvature(&self) -> f64 {
        (self.dim as f64 - 1.0) / self.rho
    }

    pub fn area(&self) -> f64 {
        unit_sphere_volume(self.dim - 1) * self.rho.powi(self.dim as i32 - 1)
    }

    /// `int_Sigma eta dA`.
    pub fn eta_integral(&self) -> f64 {
        match &self.eta {
            BoundaryMeanCurvature::Constant(eta) => eta * self.area(),
            BoundaryMeanCurvature::Sampled { values, weights } => {
                values.iter().zip(weights).map(|(v, w)| v * w).sum()
            }
        }
    }

    pub fn min_eta(&self) -> f64 {
        match &self.eta {
            BoundaryMeanCurvature::Constant(eta) => *eta,
            BoundaryMeanCurvature::Sampled { values, .. } => values.iter().copied().fold(f64::INFINITY, f64::min),
        }
    }

    /// The constant value, if the mean curvature is constant.
    pub fn constant_eta(&self) -> Option<f64> {
        match &self.eta {
            BoundaryMeanCurvature::Constant(eta) => Some(*eta),
            BoundaryMeanCurvature::Sampled { values, .. } => {
                let first = values[0];
                values.iter().all(|v| *v == first).then_some(first)
            }
        }
    }
}

fn check_dim_rho(dim: usize, rho: f64) -> Result<()> {
    if !(MIN_DIM..=MAX_DIM).contains(&dim) {
        return Err(Error::InvalidBartnik(format!("dimension {dim} outside {MIN_DIM}..={MAX_DIM}")));
    }
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(Error::InvalidBartnik(format!("radius {rho} must be positive")));
    }
    Ok(())
}

/// Quadrature in the polar angle on the round sphere of radius `rho`:
/// `(theta, weight)` with weights `omega_{n-2} rho^{n-1} sin^{n-2}(theta) dtheta`.
pub fn polar_rule(dim: usize, rho: f64, order: usize) -> Vec<(f64, f64)> {
    let gl = GaussLegendre::new(order);
    let scale = unit_sphere_volume(dim - 2) * rho.powi(dim as i32 - 1);
    gl.mapped(0.0, std::f64::consts::PI)
        .map(|(theta, w)| (theta, w * scale * theta.sin().powi(dim as i32 - 2)))
        .collect()
}

/// `m_BY = (1/((n-1) omega_{n-1})) int (H_0 - eta) dA`.
pub fn brown_york(data: &BartnikData) -> f64 {
    let n = data.dim as f64;
    let omega = unit_sphere_volume(data.dim - 1);
    (data.euclidean_mean_curvature() * data.area() - data.eta_integral()) / ((n - 1.0) * omega)
}

/// Mass parameter `c = (r0^{n-2}/2)(1 - (eta r0/(n-1))^2)` of the extension.
pub fn shi_tam_mass(dim: usize, r0: f64, eta: f64) -> f64 {
    let n = dim as f64;
    let x = eta * r0 / (n - 1.0);
    0.5 * r0.powi(dim as i32 - 2) * (1.0 - x * x)
}

/// Scalar-flat asymptotically flat extension of round data.
#[derive(Debug, Clone)]
pub struct ShiTamExtension {
    pub r0: f64,
    pub c: f64,
    pub profile: ProfileMetric,
}

/// Default number of samples in an extension profile.
pub const EXTENSION_SAMPLES: usize = 4000;

/// Extension with boundary mean curvature `eta > 0` toward the end.
pub fn shi_tam_extend(dim: usize, r0: f64, eta: f64) -> Result<ShiTamExtension> {
    if !(eta > 0.0) {
        return Err(Error::InvalidBartnik(format!(
            "extension needs positive boundary mean curvature, got {eta}"
        )));
    }
    extend(dim, r0, eta, EXTENSION_SAMPLES)
}

/// Like [`shi_tam_extend`] but also admits `eta = 0`, where the extension
/// starts on its own horizon.
pub fn shi_tam_extend_to_horizon(dim: usize, r0: f64, eta: f64) -> Result<ShiTamExtension> {
    if !(eta >= 0.0) {
        return Err(Error::InvalidBartnik(format!(
            "extension needs nonnegative boundary mean curvature, got {eta}"
        )));
    }
    extend(dim, r0, eta, EXTENSION_SAMPLES)
}

fn extend(dim: usize, r0: f64, eta: f64, samples: usize) -> Result<ShiTamExtension> {
    check_dim_rho(dim, r0)?;
    // eta above the Euclidean value gives c < 0, a negative-mass exterior
    let c = shi_tam_mass(dim, r0, eta);
    let r_max = recommended_outer_radius(dim, c, r0);
    let profile = schwarzschild(dim, c, r0, r_max, samples, 0.0)?;
    Ok(ShiTamExtension { r0, c, profile })
}

/// Whether `min eta <= lambda`, with margin `lambda - min eta`.
pub fn verify_fill_in_bound(data: &BartnikData, lambda: f64) -> (bool, f64) {
    let margin = lambda - data.min_eta();
    (margin >= 0.0, margin)
}
