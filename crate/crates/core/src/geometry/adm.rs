//! ADM mass of an asymptotically flat end.
//!
//! The primary value extrapolates the Misner-Sharp mass to infinity. The
//! cross-check evaluates the coordinate flux integral in the chart
//! `g_ij = delta_ij + F(|x|) x_i x_j / |x|^2` with `|x| = h` and
//! `F = 1/h'^2 - 1`, differentiating the chart components numerically.

use super::{misner_sharp_from_jet, End, EndKind, ProfileMetric};
use crate::error::{Error, Result};
use crate::numerics::{hermite_quintic, neville_to_zero, GaussLegendre};

/// Number of radii used for extrapolation.
const EXTRAPOLATION_LEVELS: usize = 4;
/// Ratio between successive extrapolation radii. The innermost radius stays
/// inside the last decade and the outermost leaves room for the flux stencil.
const RADIUS_RATIO: f64 = 1.5;
/// Relative step for the Cartesian differences in the flux oracle.
const FLUX_STEP: f64 = 1e-3;

/// Both evaluations of the ADM mass.
#[derive(Debug, Clone, PartialEq)]
pub struct AdmMass {
    /// Extrapolated Misner-Sharp mass.
    pub extrapolated: f64,
    /// Extrapolated coordinate flux integral.
    pub flux: f64,
    /// Area radii used, outermost first.
    pub radii: Vec<f64>,
    /// Misner-Sharp samples at `radii`.
    pub samples: Vec<f64>,
    /// Running extrapolation estimates, one per level.
    pub estimates: Vec<f64>,
}

impl AdmMass {
    /// `|extrapolated - flux|` relative to `max(1, |extrapolated|)`.
    pub fn disagreement(&self) -> f64 {
        (self.extrapolated - self.flux).abs() / self.extrapolated.abs().max(1.0)
    }
}

/// Indices of the end region ordered from the end inward, and the sign of
/// `dh/ds` expected there.
fn end_indices(metric: &ProfileMetric, end: End) -> (Vec<usize>, f64) {
    let n = metric.len();
    match end {
        End::Outer => ((0..n).rev().collect(), 1.0),
        End::Inner => ((0..n).collect(), -1.0),
    }
}

impl ProfileMetric {
    /// Checks `|h' - 1| <= tol` (up to orientation) and `|secant slope - 1| <= tol`
    /// on the last decade of area radius along `end`.
    pub fn check_asymptotic_flatness(&self, end: End, tol: f64) -> Result<()> {
        let (order, sign) = end_indices(self, end);
        let i_end = order[0];
        let h_end = self.warp[i_end];
        let decade: Vec<usize> = order
            .iter()
            .copied()
            .take_while(|&i| self.warp[i] >= h_end / 10.0)
            .collect();
        if decade.len() < 4 || self.warp[*decade.last().unwrap()] > h_end / 9.0 {
            return Err(Error::NotAsymptoticallyFlat(format!(
                "grid does not cover a decade of area radius below {h_end:e}"
            )));
        }
        for &i in &decade {
            let dev = (sign * self.warp_d1[i] - 1.0).abs();
            if dev > tol {
                return Err(Error::NotAsymptoticallyFlat(format!(
                    "|h' - 1| = {dev:e} at s = {} exceeds {tol:e}",
                    self.grid[i]
                )));
            }
            if i != i_end {
                let secant = (self.warp[i_end] - self.warp[i]) / (self.grid[i_end] - self.grid[i]);
                let dev = (sign * secant - 1.0).abs();
                if dev > tol {
                    return Err(Error::NotAsymptoticallyFlat(format!(
                        "|h/s - 1| proxy = {dev:e} at s = {} exceeds {tol:e}",
                        self.grid[i]
                    )));
                }
            }
        }
        Ok(())
    }

    /// ADM mass of an end flagged asymptotically flat.
    pub fn adm_mass(&self, end: End) -> Result<AdmMass> {
        if self.end_kind(end) != EndKind::AsymptoticallyFlat {
            return Err(Error::NotAsymptoticallyFlat(format!("{end:?} end is flagged {:?}", self.end_kind(end))));
        }
        let (order, _) = end_indices(self, end);
        let h_end = self.warp[order[0]];
        let region: Vec<usize> = order
            .iter()
            .copied()
            .take_while(|&i| self.warp[i] >= h_end / 10.0)
            .collect();
        let mut picks = Vec::with_capacity(EXTRAPOLATION_LEVELS);
        for k in 1..=EXTRAPOLATION_LEVELS {
            let target = h_end / RADIUS_RATIO.powi(k as i32);
            let i = *region
                .iter()
                .min_by(|&&a, &&b| {
                    (self.warp[a] - target)
                        .abs()
                        .total_cmp(&(self.warp[b] - target).abs())
                })
                .expect("end region is non-empty");
            picks.push(i);
        }
        if picks.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::NotAsymptoticallyFlat("end region too coarse to extrapolate".into()));
        }
        let radii: Vec<f64> = picks.iter().map(|&i| self.warp[i]).collect();
        let xs: Vec<f64> = radii.iter().map(|r| r.powi(2 - self.dim as i32)).collect();
        let samples: Vec<f64> = picks.iter().map(|&i| misner_sharp_from_jet(self.dim, self.jet(i))).collect();
        let estimates = neville_to_zero(&xs, &samples);
        check_convergence(&estimates, "Misner-Sharp")?;

        let fluxes: Vec<f64> = radii
            .iter()
            .map(|&r| self.flux_mass(&region, r))
            .collect::<Result<_>>()?;
        let flux_estimates = neville_to_zero(&xs, &fluxes);
        check_convergence(&flux_estimates, "flux")?;

        Ok(AdmMass {
            extrapolated: *estimates.last().unwrap(),
            flux: *flux_estimates.last().unwrap(),
            radii,
            samples,
            estimates,
        })
    }

    /// `F = 1/h'^2 - 1` at area radius `r` inside the end region.
    fn chart_perturbation(&self, order: &[usize], r: f64) -> Result<f64> {
        // `order` covers the last decade, where the area radius decreases monotonically
        let pos = order.partition_point(|&i| self.warp[i] > r);
        if pos == 0 || pos >= order.len() {
            return Err(Error::OutOfRange {
                value: r,
                lo: self.warp[*order.last().unwrap()],
                hi: self.warp[order[0]],
            });
        }
        let (ia, ib) = {
            let (a, b) = (order[pos - 1], order[pos]);
            (a.min(b), a.max(b))
        };
        let (s0, s1) = (self.grid[ia], self.grid[ib]);
        let (j0, j1) = (self.jet(ia), self.jet(ib));
        let mut s = s0 + (r - j0.value) / (j1.value - j0.value) * (s1 - s0);
        let mut jet = hermite_quintic(s0, s1, j0, j1, s);
        for _ in 0..50 {
            let step = (jet.value - r) / jet.d1;
            s = (s - step).clamp(s0, s1);
            jet = hermite_quintic(s0, s1, j0, j1, s);
            if step.abs() <= 1e-15 * s.abs().max(1.0) {
                break;
            }
        }
        Ok(1.0 / (jet.d1 * jet.d1) - 1.0)
    }

    /// Flux mass `(1/(2(n-1) omega)) int (d_j g_ij - d_i g_jj) nu^i dA` on `|x| = r`.
    fn flux_mass(&self, order: &[usize], r: f64) -> Result<f64> {
        let n = self.dim;
        let eps = FLUX_STEP * r;
        let pert = |y: &[f64], i: usize, j: usize| -> Result<f64> {
            let rr: f64 = y.iter().map(|v| v * v).sum();
            Ok(self.chart_perturbation(order, rr.sqrt())? * y[i] * y[j] / rr)
        };
        let integrand = |x: &[f64]| -> Result<f64> {
            let mut total = 0.0;
            let mut y = x.to_vec();
            for k in 0..n {
                y[k] = x[k] + eps;
                let plus: Vec<f64> = (0..n).map(|i| pert(&y, i, k)).collect::<Result<_>>()?;
                let trace_plus = self.chart_perturbation(order, norm(&y))?;
                y[k] = x[k] - eps;
                let minus: Vec<f64> = (0..n).map(|i| pert(&y, i, k)).collect::<Result<_>>()?;
                let trace_minus = self.chart_perturbation(order, norm(&y))?;
                y[k] = x[k];
                // d_k g_ik contracted with nu_i, minus d_k tr(g) nu_k
                for i in 0..n {
                    total += x[i] / r * (plus[i] - minus[i]) / (2.0 * eps);
                }
                total -= x[k] / r * (trace_plus - trace_minus) / (2.0 * eps);
            }
            Ok(total)
        };
        let mut flux = 0.0;
        for (point, weight) in sphere_rule(n, r) {
            flux += weight * integrand(&point)?;
        }
        Ok(flux / (2.0 * (n as f64 - 1.0) * self.omega()))
    }
}

fn norm(y: &[f64]) -> f64 {
    y.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Quadrature on the sphere of radius `r` in `R^n`: a Gauss-by-trapezoid
/// product rule for `n = 3`, the `2n` points `+-r e_k` otherwise.
fn sphere_rule(n: usize, r: f64) -> Vec<(Vec<f64>, f64)> {
    let area = super::unit_sphere_volume(n - 1) * r.powi(n as i32 - 1);
    if n == 3 {
        let gl = GaussLegendre::new(6);
        let n_phi = 8;
        let mut out = Vec::new();
        for (z, wz) in gl.nodes().iter().zip(gl.weights()) {
            let rho = (1.0 - z * z).sqrt();
            for k in 0..n_phi {
                let phi = 2.0 * std::f64::consts::PI * k as f64 / n_phi as f64;
                let w = wz * 2.0 * std::f64::consts::PI / n_phi as f64 * r * r;
                out.push((vec![r * rho * phi.cos(), r * rho * phi.sin(), r * z], w));
            }
        }
        out
    } else {
        let w = area / (2 * n) as f64;
        let mut out = Vec::with_capacity(2 * n);
        for k in 0..n {
            for sign in [1.0, -1.0] {
                let mut p = vec![0.0; n];
                p[k] = sign * r;
                out.push((p, w));
            }
        }
        out
    }
}

fn check_convergence(estimates: &[f64], label: &str) -> Result<()> {
    let diffs: Vec<f64> = estimates.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    let last = *estimates.last().unwrap();
    let scale = 1e-9 * last.abs().max(1.0);
    let growing = diffs.windows(2).all(|w| w[1] > w[0]);
    if !last.is_finite() || (growing && *diffs.last().unwrap() > scale) {
        return Err(Error::NonConvergent(format!(
            "{label} extrapolation estimates {estimates:?} diverge"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::super::presets;
    use super::*;

    #[test]
    fn schwarzschild_mass_in_every_dimension() {
        for dim in 3..=7 {
            let r_max = presets::recommended_outer_radius(dim, 1.0, 2.5);
            let g = presets::schwarzschild(dim, 1.0, 2.5, r_max, 3000, 0.0).unwrap();
            let adm = g.adm_mass(End::Outer).unwrap();
            assert!((adm.extrapolated - 1.0).abs() < 1e-6, "n={dim}: {adm:?}");
            assert!(adm.disagreement() < 1e-4, "n={dim}: {adm:?}");
        }
    }

    #[test]
    fn flat_end_has_zero_mass() {
        let g = presets::flat_end(3, 1.0, 1e6, 500).unwrap();
        let adm = g.adm_mass(End::Outer).unwrap();
        assert_eq!(adm.extrapolated, 0.0);
        assert!(adm.flux.abs() < 1e-8, "{adm:?}");
    }

    #[test]
    fn non_flat_end_is_rejected() {
        let g = presets::flat_ball(3, 2.0, 100).unwrap();
        assert!(matches!(g.adm_mass(End::Outer), Err(Error::NotAsymptoticallyFlat(_))));
    }

    #[test]
    fn divergent_estimates_are_reported() {
        assert!(check_convergence(&[1.0, 1.1, 1.4, 2.0], "test").is_err());
        assert!(check_convergence(&[1.0, 1.1, 1.11, 1.111], "test").is_ok());
    }
}
