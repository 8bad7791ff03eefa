//! Analytic profiles with exact derivatives, plus CSV-tabulated profiles.

use std::path::Path;

use super::grid::{geometric, uniform};
use super::{EndKind, ProfileMetric};
use crate::error::{Error, Result};
use crate::numerics::{GaussLegendre, Jet};

/// Inner radius of a flat ball, relative to its outer radius. The center
/// itself is excluded so that `h > 0` everywhere.
pub const BALL_CENTER_OFFSET: f64 = 1e-6;

/// Description of one analytic preset, for listings.
#[derive(Debug, Clone, Copy)]
pub struct PresetInfo {
    pub name: &'static str,
    pub parameters: &'static str,
    pub summary: &'static str,
}

/// Presets available from scenario files.
pub const PRESETS: &[PresetInfo] = &[
    PresetInfo {
        name: "flat_ball",
        parameters: "radius, samples",
        summary: "Euclidean ball h(s) = s around a regular center",
    },
    PresetInfo {
        name: "flat_end",
        parameters: "r_start, r_max, samples",
        summary: "Euclidean exterior h(s) = s with an asymptotically flat end",
    },
    PresetInfo {
        name: "schwarzschild",
        parameters: "mass, r_start, r_max, samples",
        summary: "scalar-flat exterior with h'^2 = 1 - 2 m h^(2-n)",
    },
    PresetInfo {
        name: "cylinder",
        parameters: "radius, s_start, s_end, samples",
        summary: "round cylinder h(s) = c with R = (n-1)(n-2)/c^2",
    },
    PresetInfo {
        name: "table",
        parameters: "path",
        summary: "two-column CSV (s, h) with header; derivatives by five-point stencils",
    },
];

/// Profile sampled from a closure returning `(h, h', h'')`.
pub fn analytic(dim: usize, grid: Vec<f64>, f: impl Fn(f64) -> Jet, ends: [EndKind; 2]) -> Result<ProfileMetric> {
    let jets: Vec<Jet> = grid.iter().map(|s| f(*s)).collect();
    ProfileMetric::with_derivatives(
        dim,
        grid,
        jets.iter().map(|j| j.value).collect(),
        jets.iter().map(|j| j.d1).collect(),
        jets.iter().map(|j| j.d2).collect(),
        ends,
    )
}

/// Flat ball of the given radius. The inner end is the regular center.
pub fn flat_ball(dim: usize, radius: f64, samples: usize) -> Result<ProfileMetric> {
    check_positive("radius", radius)?;
    let grid = uniform(BALL_CENTER_OFFSET * radius, radius, samples);
    analytic(
        dim,
        grid,
        |s| Jet { value: s, d1: 1.0, d2: 0.0 },
        [EndKind::CompleteOther, EndKind::Boundary],
    )
}

/// Flat exterior `r_start <= s <= r_max` on a geometric grid.
pub fn flat_end(dim: usize, r_start: f64, r_max: f64, samples: usize) -> Result<ProfileMetric> {
    check_positive("r_start", r_start)?;
    check_order(r_start, r_max)?;
    analytic(
        dim,
        geometric(r_start, r_max, samples),
        |s| Jet { value: s, d1: 1.0, d2: 0.0 },
        [EndKind::Boundary, EndKind::AsymptoticallyFlat],
    )
}

/// Round cylinder of radius `c` over `[s_start, s_end]`.
pub fn cylinder(
    dim: usize,
    c: f64,
    s_start: f64,
    s_end: f64,
    samples: usize,
    ends: [EndKind; 2],
) -> Result<ProfileMetric> {
    check_positive("radius", c)?;
    check_order(s_start, s_end)?;
    analytic(
        dim,
        uniform(s_start, s_end, samples),
        |_| Jet { value: c, d1: 0.0, d2: 0.0 },
        ends,
    )
}

/// Horizon radius `(2m)^{1/(n-2)}` for `m > 0`, zero otherwise.
pub fn horizon_radius(dim: usize, mass: f64) -> f64 {
    if mass > 0.0 {
        (2.0 * mass).powf(1.0 / (dim as f64 - 2.0))
    } else {
        0.0
    }
}

/// Outer area radius for a mass-`m` end: far enough that `2|m| h^{2-n}`
/// is below a tenth of the default flatness tolerance at a tenth of the
/// radius, and at least `10 * r_inner`. Going much further only loses
/// digits in `1 - h'^2`, which limits the Misner-Sharp mass to a relative
/// accuracy of about `eps / (2|m| h^{2-n})`.
pub fn recommended_outer_radius(dim: usize, mass: f64, r_inner: f64) -> f64 {
    let tail = 2.0 * mass.abs().max(1e-3) / (0.1 * super::DEFAULT_AF_TOLERANCE);
    let flat = 10.0 * tail.powf(1.0 / (dim as f64 - 2.0));
    flat.max(10.0 * r_inner)
}

/// Schwarzschild exterior from area radius `r_start` to `r_max`, with
/// arclength `s_start` at `r_start`. Radii are geometrically spaced.
pub fn schwarzschild(
    dim: usize,
    mass: f64,
    r_start: f64,
    r_max: f64,
    samples: usize,
    s_start: f64,
) -> Result<ProfileMetric> {
    check_positive("r_start", r_start)?;
    check_order(r_start, r_max)?;
    if samples < 2 {
        return Err(Error::InvalidProfile("schwarzschild needs at least two samples".into()));
    }
    let r_h = horizon_radius(dim, mass);
    if r_start < r_h {
        return Err(Error::InvalidProfile(format!(
            "r_start {r_start} lies inside the horizon radius {r_h}"
        )));
    }
    let radii = geometric(r_start, r_max, samples);
    let arclength = schwarzschild_arclength(dim, mass, &radii, s_start);
    let p = dim as f64;
    let d1: Vec<f64> = radii
        .iter()
        .map(|r| (1.0 - 2.0 * mass * r.powf(2.0 - p)).max(0.0).sqrt())
        .collect();
    let d2: Vec<f64> = radii.iter().map(|r| mass * (p - 2.0) * r.powf(1.0 - p)).collect();
    ProfileMetric::with_derivatives(
        dim,
        arclength,
        radii,
        d1,
        d2,
        [EndKind::Boundary, EndKind::AsymptoticallyFlat],
    )
}

/// Arclength `s(r) = s_start + int dr / sqrt(1 - 2 m r^{2-n})` at each radius.
/// For `m > 0` the substitution `r = r_h + w^2` removes the horizon singularity.
pub fn schwarzschild_arclength(dim: usize, mass: f64, radii: &[f64], s_start: f64) -> Vec<f64> {
    let rule = GaussLegendre::new(10);
    let p = dim as f64;
    let r_h = horizon_radius(dim, mass);
    let lapse = |r: f64| (1.0 - 2.0 * mass * r.powf(2.0 - p)).sqrt();
    let mut out = Vec::with_capacity(radii.len());
    let mut s = s_start;
    out.push(s);
    for w in radii.windows(2) {
        let piece = if mass > 0.0 {
            let (a, b) = ((w[0] - r_h).max(0.0).sqrt(), (w[1] - r_h).sqrt());
            rule.integrate(a, b, |x| {
                let r = r_h + x * x;
                2.0 * x / lapse(r)
            })
        } else {
            rule.integrate(w[0], w[1], |r| 1.0 / lapse(r))
        };
        s += piece;
        out.push(s);
    }
    out
}

/// Tabulated profile from a two-column CSV `(s, h)` with a header row.
pub fn table_csv(path: &Path, dim: usize, ends: [EndKind; 2]) -> Result<ProfileMetric> {
    let csv_err = |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(csv_err)?;
    let mut grid = Vec::new();
    let mut warp = Vec::new();
    for record in reader.deserialize::<(f64, f64)>() {
        let (s, h) = record.map_err(csv_err)?;
        grid.push(s);
        warp.push(h);
    }
    ProfileMetric::from_samples(dim, grid, warp, ends)
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0 && v.is_finite()) {
        return Err(Error::InvalidProfile(format!("{name} must be positive, got {v}")));
    }
    Ok(())
}

fn check_order(a: f64, b: f64) -> Result<()> {
    if !(b > a) {
        return Err(Error::InvalidProfile(format!("empty range [{a}, {b}]")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn schwarzschild_is_scalar_flat_in_all_dimensions() {
        for dim in 3..=7 {
            let r_max = recommended_outer_radius(dim, 0.7, 1.6);
            let g = schwarzschild(dim, 0.7, 1.6, r_max, 600, 0.0).unwrap();
            for i in (0..g.len()).step_by(37) {
                assert!(g.scalar_curvature(i).unwrap().abs() < 1e-10, "n={dim} i={i}");
                // roundoff in 1 - h'^2 is amplified by h^{n-2}
                let tol = 1e-12 + 1e-15 * g.warp()[i].powi(dim as i32 - 2);
                assert!((g.misner_sharp_mass(i).unwrap() - 0.7).abs() < tol);
            }
        }
    }

    #[test]
    fn arclength_from_horizon_matches_closed_form() {
        // n = 3, m = 1: s(r) = sqrt(r(r-2)) + 2 ln(sqrt(r) + sqrt(r-2)) - ln 2 from r = 2
        let radii = geometric(2.0, 50.0, 300);
        let s = schwarzschild_arclength(3, 1.0, &radii, 0.0);
        for (r, s) in radii.iter().zip(&s) {
            let exact = (r * (r - 2.0)).sqrt() + 2.0 * (r.sqrt() + (r - 2.0).sqrt()).ln() - 2f64.ln();
            assert!((s - exact).abs() < 1e-10, "r={r}");
        }
    }

    #[test]
    fn negative_mass_arclength_is_shorter_than_radius_gap() {
        let radii = geometric(1.0, 10.0, 100);
        let s = schwarzschild_arclength(3, -0.2, &radii, 0.0);
        assert!(s[99] < 9.0 && s[99] > 8.0);
    }

    #[test]
    fn table_roundtrip() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "s,h").unwrap();
        for i in 0..40 {
            let s = 1.0 + i as f64 * 0.05;
            writeln!(f, "{s},{}", s * s).unwrap();
        }
        let g = table_csv(f.path(), 3, [EndKind::Boundary; 2]).unwrap();
        assert!(!g.is_exact());
        let j = g.derivatives(10).unwrap();
        assert!((j.d1 - 2.0 * g.grid()[10]).abs() < 1e-10);
        assert!((j.d2 - 2.0).abs() < 1e-8);
    }

    #[test]
    fn rejects_start_inside_horizon() {
        assert!(schwarzschild(3, 1.0, 1.5, 10.0, 100, 0.0).is_err());
    }
}
