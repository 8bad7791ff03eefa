//! Neumann eigenvalues of `-a Δ + V` on an arclength interval.
//!
//! The operator is discretized in the same flux form as the conformal
//! solver, giving a symmetric tridiagonal pencil `K - μ M` with `M` the
//! diagonal of dual-cell volumes. Inertia is read off a shooting recurrence
//! on fluxes: the `LDL^T` pivots of `K - μ M` are `a c u_{i+1} / u_i`, so
//! negative pivots are sign changes of the shot solution. Tracking fluxes
//! instead of forming `K` avoids cancelling the large conductances of fine
//! cells against the small volume terms.

use serde::Serialize;

use crate::conformal::{cell_geometry, conformal_coefficient, Potential};
use crate::corner::{miao_smooth, CornerMetric, Mollifier};
use crate::error::{Error, Result};
use crate::geometry::grid::five_point_derivatives;
use crate::geometry::ProfileMetric;
use crate::numerics::Jet;
use crate::par;

/// Fewest samples a domain may contain.
pub const MIN_DOMAIN_SAMPLES: usize = 8;
const BISECTION_STEPS: usize = 400;
const RESCALE_ABOVE: f64 = 1e150;

/// `-a Δ + V` with zero flux at both ends of `domain`.
#[derive(Debug, Clone)]
pub struct EigenProblem<'a> {
    metric: &'a ProfileMetric,
    lo: usize,
    hi: usize,
    potential: Vec<f64>,
    a: f64,
}

impl<'a> EigenProblem<'a> {
    /// The domain keeps the samples with `domain.0 <= s <= domain.1`.
    /// The coefficient defaults to `a = 4(n-1)/(n-2)`.
    pub fn new(metric: &'a ProfileMetric, domain: (f64, f64), potential: &Potential) -> Result<Self> {
        if potential.values().len() != metric.len() {
            return Err(Error::InvalidPotential("potential is not aligned with the grid".into()));
        }
        let grid = metric.grid();
        let lo = grid.partition_point(|s| *s < domain.0);
        let hi = grid.partition_point(|s| *s <= domain.1);
        if hi <= lo || hi - lo < MIN_DOMAIN_SAMPLES {
            return Err(Error::DegenerateDomain(format!(
                "[{}, {}] holds {} samples, need {MIN_DOMAIN_SAMPLES}",
                domain.0,
                domain.1,
                hi.saturating_sub(lo)
            )));
        }
        Ok(Self {
            metric,
            lo,
            hi: hi - 1,
            potential: potential.values()[lo..hi].to_vec(),
            a: conformal_coefficient(metric.dim()),
        })
    }

    pub fn with_coefficient(mut self, a: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::InvalidPotential(format!("coefficient {a} must be positive")));
        }
        self.a = a;
        Ok(self)
    }

    pub fn coefficient(&self) -> f64 {
        self.a
    }

    /// Samples of the domain.
    pub fn grid(&self) -> &[f64] {
        &self.metric.grid()[self.lo..=self.hi]
    }

    /// Index range of the domain in the metric's grid.
    pub fn range(&self) -> (usize, usize) {
        (self.lo, self.hi)
    }

    fn discretize(&self) -> Result<Pencil> {
        let (conductance, volume) = cell_geometry(self.metric, self.lo, self.hi)?;
        Ok(Pencil {
            conductance,
            volume,
            potential: self.potential.clone(),
            a: self.a,
        })
    }
}

struct Pencil {
    conductance: Vec<f64>,
    volume: Vec<f64>,
    potential: Vec<f64>,
    a: f64,
}

struct Shot {
    u: Vec<f64>,
    /// Flux left over at the right end; zero at an eigenvalue.
    end_flux: f64,
    /// Eigenvalues strictly below the trial value.
    below: usize,
}

impl Pencil {
    fn shoot(&self, mu: f64) -> Shot {
        let n = self.volume.len();
        let mut u = Vec::with_capacity(n);
        u.push(1.0);
        let mut flux = 0.0;
        let mut below = 0;
        for i in 0..n - 1 {
            flux += (self.potential[i] - mu) * self.volume[i] * u[i] / self.a;
            let mut next = u[i] + flux / self.conductance[i];
            if next == 0.0 {
                next = -u[i].signum() * f64::MIN_POSITIVE;
            }
            if next.signum() != u[i].signum() {
                below += 1;
            }
            u.push(next);
            if next.abs() > RESCALE_ABOVE {
                let k = 1.0 / next.abs();
                u.iter_mut().for_each(|x| *x *= k);
                flux *= k;
            }
        }
        let end_flux = flux + (self.potential[n - 1] - mu) * self.volume[n - 1] * u[n - 1] / self.a;
        if end_flux / u[n - 1] < 0.0 {
            below += 1;
        }
        Shot { u, end_flux, below }
    }

    /// `(a Σ c (Δu)^2 + Σ V u^2 vol, Σ u^2 vol)`.
    fn quadratic_forms(&self, u: &[f64]) -> (f64, f64) {
        let gradient: f64 = self
            .conductance
            .iter()
            .zip(u.windows(2))
            .map(|(c, w)| c * (w[1] - w[0]).powi(2))
            .sum();
        let potential: f64 = self
            .potential
            .iter()
            .zip(u)
            .zip(&self.volume)
            .map(|((v, u), vol)| v * u * u * vol)
            .sum();
        let mass: f64 = u.iter().zip(&self.volume).map(|(u, vol)| u * u * vol).sum();
        (self.a * gradient + potential, mass)
    }

    fn gershgorin_upper(&self) -> f64 {
        let n = self.volume.len();
        (0..n)
            .map(|i| {
                let left = if i > 0 { self.conductance[i - 1] } else { 0.0 };
                let right = if i + 1 < n { self.conductance[i] } else { 0.0 };
                2.0 * self.a * (left + right) / self.volume[i] + self.potential[i]
            })
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Bracket `[lo, hi]` around eigenvalue `index` (0-based), shrunk to
    /// adjacent floating point values or the step limit.
    fn bisect(&self, index: usize, mut lo: f64, mut hi: f64) -> (f64, f64) {
        for _ in 0..BISECTION_STEPS {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.shoot(mid).below > index {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        (lo, hi)
    }

    fn lower_bound(&self) -> f64 {
        self.potential.iter().copied().fold(f64::INFINITY, f64::min) - 1.0
    }
}

/// Principal eigenpair of a Neumann problem.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenPair {
    pub mu: f64,
    /// Positive eigenfunction with `int u^2 dmu = 1`, on the domain samples.
    pub u: Vec<f64>,
    /// `|int (a |∇u|^2 + V u^2) dmu - mu|`.
    pub rayleigh_residual: f64,
    /// Index range of the domain in the metric's grid.
    pub range: (usize, usize),
}

pub fn neumann_principal_eigenvalue(problem: &EigenProblem) -> Result<EigenPair> {
    let pencil = problem.discretize()?;
    let lo = pencil.lower_bound();
    let (mean_v, _) = pencil.quadratic_forms(&vec![1.0; pencil.volume.len()]);
    let total: f64 = pencil.volume.iter().sum();
    let hi = mean_v / total + 1.0;
    let (lo, hi) = pencil.bisect(0, lo, hi);
    let shot = pencil.shoot(lo);
    if shot.u.iter().any(|u| *u <= 0.0) {
        return Err(Error::NonConvergent("principal eigenfunction changed sign".into()));
    }
    let (energy, mass) = pencil.quadratic_forms(&shot.u);
    let norm = mass.sqrt();
    let u: Vec<f64> = shot.u.iter().map(|u| u / norm).collect();
    let mu = 0.5 * (lo + hi);
    Ok(EigenPair {
        mu,
        u,
        rayleigh_residual: (energy / mass - mu).abs(),
        range: problem.range(),
    })
}

/// The `count` smallest Neumann eigenvalues, ascending.
pub fn neumann_eigenvalues(problem: &EigenProblem, count: usize) -> Result<Vec<f64>> {
    let pencil = problem.discretize()?;
    if count > pencil.volume.len() {
        return Err(Error::DegenerateDomain(format!(
            "{count} eigenvalues requested from {} samples",
            pencil.volume.len()
        )));
    }
    let lo = pencil.lower_bound();
    let hi = pencil.gershgorin_upper() + 1.0;
    Ok((0..count)
        .map(|k| {
            let (a, b) = pencil.bisect(k, lo, hi);
            0.5 * (a + b)
        })
        .collect())
}

/// Flux through the right end when shooting at `mu`; vanishes at eigenvalues.
pub fn shooting_defect(problem: &EigenProblem, mu: f64) -> Result<f64> {
    Ok(problem.discretize()?.shoot(mu).end_flux)
}

/// One smoothing scale of an eigenvalue scan.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenScanRow {
    pub delta: f64,
    pub mu: f64,
    pub rayleigh_residual: f64,
}

/// Principal eigenvalue of `-a Δ + R` for the smoothed corner at each scale.
pub fn smoothing_eigen_scan(
    corner: &CornerMetric,
    domain: (f64, f64),
    deltas: &[f64],
    mollifier: &Mollifier,
) -> Result<Vec<EigenScanRow>> {
    if !(domain.0 < corner.s0() && corner.s0() < domain.1) {
        return Err(Error::DegenerateDomain(format!(
            "domain [{}, {}] does not contain the interface at {}",
            domain.0,
            domain.1,
            corner.s0()
        )));
    }
    par::map(deltas, |delta| {
        let smoothed = miao_smooth(corner, *delta, mollifier)?;
        let metric = &smoothed.metric;
        let v = Potential::new(metric, metric.scalar_curvature_samples())?;
        let pair = neumann_principal_eigenvalue(&EigenProblem::new(metric, domain, &v)?)?;
        Ok(EigenScanRow {
            delta: *delta,
            mu: pair.mu,
            rayleigh_residual: pair.rayleigh_residual,
        })
    })
    .into_iter()
    .collect()
}

/// Result of checking `-a Δu + V u > 0` and `δ < u < 1/δ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SupersolutionCheck {
    pub holds: bool,
    /// Minimum of `-a Δu + V u` over the samples.
    pub margin: f64,
    pub location: f64,
    /// Largest `δ` with `δ <= u <= 1/δ`; nonpositive when `u` is not positive.
    pub delta: f64,
}

/// Pointwise check with `a = 4(n-1)/(n-2)` and `Δu = u'' + (n-1)(h'/h) u'`.
pub fn supersolution_check(metric: &ProfileMetric, v: &Potential, u: &[Jet]) -> Result<SupersolutionCheck> {
    if u.len() != metric.len() || v.values().len() != metric.len() {
        return Err(Error::InvalidPotential("inputs are not aligned with the grid".into()));
    }
    let a = conformal_coefficient(metric.dim());
    let n1 = metric.dim() as f64 - 1.0;
    let mut margin = f64::INFINITY;
    let mut location = f64::NAN;
    for i in 0..metric.len() {
        let h = metric.jet(i);
        let lap = u[i].d2 + n1 * h.d1 / h.value * u[i].d1;
        let value = -a * lap + v.values()[i] * u[i].value;
        if value < margin {
            margin = value;
            location = metric.grid()[i];
        }
    }
    let (min_u, max_u) = u
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), j| (lo.min(j.value), hi.max(j.value)));
    let delta = if min_u > 0.0 { min_u.min(1.0 / max_u) } else { min_u };
    Ok(SupersolutionCheck {
        holds: margin > 0.0 && delta > 0.0,
        margin,
        location,
        delta,
    })
}

/// Jets of grid samples by five-point differences.
pub fn sample_jets(metric: &ProfileMetric, values: &[f64]) -> Vec<Jet> {
    let (d1, d2) = five_point_derivatives(metric.grid(), values);
    values
        .iter()
        .zip(d1.iter().zip(&d2))
        .map(|(v, (a, b))| Jet {
            value: *v,
            d1: *a,
            d2: *b,
        })
        .collect()
}

/// The eigenfunction on the whole grid, continued by its end values outside
/// the domain. Zero flux at the domain ends makes the continuation `C^1`.
pub fn extend_eigenfunction(metric: &ProfileMetric, pair: &EigenPair) -> Vec<f64> {
    let (lo, hi) = pair.range;
    (0..metric.len())
        .map(|i| pair.u[i.clamp(lo, hi) - lo])
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{presets, EndKind};
    use nalgebra::{DMatrix, SymmetricEigen};

    fn annulus(samples: usize) -> ProfileMetric {
        presets::analytic(
            3,
            crate::geometry::grid::uniform(1.0, 2.0, samples),
            |s| Jet { value: s, d1: 1.0, d2: 0.0 },
            [EndKind::Boundary; 2],
        )
        .unwrap()
    }

    #[test]
    fn constant_potentials_shift_the_spectrum() {
        let g = annulus(200);
        for c in [0.0, 2.0] {
            let v = Potential::constant(&g, c).unwrap();
            let pair = neumann_principal_eigenvalue(&EigenProblem::new(&g, (1.0, 2.0), &v).unwrap()).unwrap();
            assert!((pair.mu - c).abs() < 1e-9, "mu = {}", pair.mu);
            assert!(pair.rayleigh_residual < 1e-8);
            let (lo, hi) = pair.u.iter().fold((f64::INFINITY, 0.0f64), |(a, b), u| (a.min(*u), b.max(*u)));
            assert!(hi - lo < 1e-10 * hi);
        }
    }

    #[test]
    fn matches_dense_solver_at_coarse_resolution() {
        let g = annulus(24);
        let v = Potential::from_fn(&g, |s, _| (3.0 * s).sin()).unwrap();
        let problem = EigenProblem::new(&g, (1.0, 2.0), &v).unwrap();
        let ours = neumann_eigenvalues(&problem, 3).unwrap();
        let (c, vol) = cell_geometry(&g, 0, g.len() - 1).unwrap();
        let n = g.len();
        let a = problem.coefficient();
        let mut k = DMatrix::<f64>::zeros(n, n);
        for i in 0..n - 1 {
            k[(i, i)] += a * c[i];
            k[(i + 1, i + 1)] += a * c[i];
            k[(i, i + 1)] -= a * c[i];
            k[(i + 1, i)] -= a * c[i];
        }
        for i in 0..n {
            k[(i, i)] += v.values()[i] * vol[i];
        }
        let t = DMatrix::from_fn(n, n, |i, j| k[(i, j)] / (vol[i] * vol[j]).sqrt());
        let mut dense: Vec<f64> = SymmetricEigen::new(t).eigenvalues.iter().copied().collect();
        dense.sort_by(f64::total_cmp);
        for (x, y) in ours.iter().zip(&dense) {
            assert!((x - y).abs() < 1e-9 * (1.0 + y.abs()), "{ours:?} vs {dense:?}");
        }
        assert!(ours[1] > 0.0);
    }

    #[test]
    fn degenerate_domain_is_rejected() {
        let g = annulus(200);
        let v = Potential::zero(&g);
        assert!(matches!(
            EigenProblem::new(&g, (1.0, 1.02), &v),
            Err(Error::DegenerateDomain(_))
        ));
    }

    #[test]
    fn principal_eigenfunction_is_positive_and_normalized() {
        let g = annulus(400);
        let v = Potential::from_fn(&g, |s, _| 5.0 * (s - 1.5).powi(2) - 1.0).unwrap();
        let pair = neumann_principal_eigenvalue(&EigenProblem::new(&g, (1.0, 2.0), &v).unwrap()).unwrap();
        assert!(pair.u.iter().all(|u| *u > 0.0));
        let (_, vol) = cell_geometry(&g, 0, g.len() - 1).unwrap();
        let mass: f64 = pair.u.iter().zip(&vol).map(|(u, v)| u * u * v).sum();
        assert!((mass - 1.0).abs() < 1e-12);
        assert!(pair.rayleigh_residual < 1e-8);
    }

    #[test]
    fn supersolution_constant_cases() {
        let g = annulus(100);
        let one = vec![
            Jet {
                value: 1.0,
                d1: 0.0,
                d2: 0.0
            };
            g.len()
        ];
        let check = supersolution_check(&g, &Potential::constant(&g, 1.0).unwrap(), &one).unwrap();
        assert!(check.holds);
        assert_eq!(check.margin, 1.0);
        let check = supersolution_check(&g, &Potential::zero(&g), &one).unwrap();
        assert!(!check.holds);
        assert_eq!(check.margin, 0.0);
    }

    #[test]
    fn extended_eigenfunction_is_a_supersolution() {
        let g = presets::analytic(
            3,
            crate::geometry::grid::uniform(1.0, 4.0, 3001),
            |s| Jet { value: s, d1: 1.0, d2: 0.0 },
            [EndKind::Boundary; 2],
        )
        .unwrap();
        let dip = Potential::bump(&g, 2.5, 0.4, -0.5).unwrap();
        let v = Potential::from_fn(&g, |_, _| 1.0).unwrap();
        let v = Potential::new(&g, v.values().iter().zip(dip.values()).map(|(a, b)| a + b).collect()).unwrap();
        let pair = neumann_principal_eigenvalue(&EigenProblem::new(&g, (2.0, 3.0), &v).unwrap()).unwrap();
        assert!(pair.mu > 0.0);
        let u = extend_eigenfunction(&g, &pair);
        let jets = sample_jets(&g, &u);
        let check = supersolution_check(&g, &v, &jets).unwrap();
        assert!(check.holds, "{check:?}");
    }

    fn corner(mass: f64) -> CornerMetric {
        let left = presets::flat_ball(3, 2.5, 2001).unwrap();
        let right = if mass == 0.0 {
            presets::flat_end(3, 2.5, 2.5e4, 3000).unwrap()
        } else {
            let r_max = presets::recommended_outer_radius(3, mass, 2.5);
            presets::schwarzschild(3, mass, 2.5, r_max, 4000, 2.5).unwrap()
        };
        CornerMetric::new(left, right).unwrap()
    }

    #[test]
    fn corner_scan_signs() {
        let m = Mollifier::standard();
        let gap = smoothing_eigen_scan(&corner(1.0), (2.0, 3.5), &[0.05], &m).unwrap();
        let reversed = smoothing_eigen_scan(&corner(-0.2), (2.0, 3.5), &[0.05], &m).unwrap();
        let flat = smoothing_eigen_scan(&corner(0.0), (2.0, 3.5), &[0.1, 0.05], &m).unwrap();
        assert!(gap[0].mu > 0.0 && gap[0].rayleigh_residual < 1e-8);
        assert!(reversed[0].mu < 0.0 && reversed[0].rayleigh_residual < 1e-8);
        assert!(flat.iter().all(|r| r.mu.abs() < 1e-8));
    }
}
