//! Scenario files: bracketed sections of `key = value` lines, parsed as a
//! TOML subset against a closed schema. The grammar is in `docs/scenario.ebnf`.
//!
//! Relative paths inside a scenario resolve against the scenario's directory.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::bartnik::BartnikData;
use crate::conformal::InnerBoundary;
use crate::corner::Mollifier;
use crate::error::{Error, Result};
use crate::geometry::presets::{self, recommended_outer_radius};
use crate::geometry::{EndKind, ProfileMetric, MAX_DIM, MIN_DIM};
use crate::shield::ShieldSpec;
use crate::tolerances::{ToleranceOverrides, ToleranceProfile, Tolerances};

pub const DEFAULT_DELTAS: [f64; 4] = [0.2, 0.1, 0.05, 0.025];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PipelineKind {
    CornerPositiveMass,
    ShiTam,
}

impl PipelineKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::CornerPositiveMass => "corner_positive_mass",
            Self::ShiTam => "shi_tam",
        }
    }
}

/// An analytic or tabulated profile. Omitted sample counts and outer radii
/// take the preset defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "preset", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProfileSpec {
    FlatBall {
        radius: f64,
        samples: Option<usize>,
    },
    FlatEnd {
        r_start: f64,
        r_max: Option<f64>,
        samples: Option<usize>,
    },
    Schwarzschild {
        mass: f64,
        r_start: f64,
        r_max: Option<f64>,
        samples: Option<usize>,
    },
    Cylinder {
        radius: f64,
        s_start: f64,
        s_end: f64,
        samples: Option<usize>,
        ends: Option<[EndKind; 2]>,
    },
    Table {
        path: PathBuf,
        ends: [EndKind; 2],
    },
}

impl ProfileSpec {
    pub fn build(&self, dim: usize, base: &Path) -> Result<ProfileMetric> {
        match self {
            Self::FlatBall { radius, samples } => presets::flat_ball(dim, *radius, samples.unwrap_or(2001)),
            Self::FlatEnd { r_start, r_max, samples } => presets::flat_end(
                dim,
                *r_start,
                r_max.unwrap_or_else(|| recommended_outer_radius(dim, 0.0, *r_start)),
                samples.unwrap_or(2000),
            ),
            Self::Schwarzschild {
                mass,
                r_start,
                r_max,
                samples,
            } => presets::schwarzschild(
                dim,
                *mass,
                *r_start,
                r_max.unwrap_or_else(|| recommended_outer_radius(dim, *mass, *r_start)),
                samples.unwrap_or(4000),
                0.0,
            ),
            Self::Cylinder {
                radius,
                s_start,
                s_end,
                samples,
                ends,
            } => presets::cylinder(
                dim,
                *radius,
                *s_start,
                *s_end,
                samples.unwrap_or(2001),
                ends.unwrap_or([EndKind::CompleteOther, EndKind::Boundary]),
            ),
            Self::Table { path, ends } => presets::table_csv(&base.join(path), dim, *ends),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SmoothingSpec {
    #[serde(default = "default_deltas")]
    pub deltas: Vec<f64>,
    /// Two-column CSV kernel; the standard bump when absent.
    pub mollifier: Option<PathBuf>,
}

fn default_deltas() -> Vec<f64> {
    DEFAULT_DELTAS.to_vec()
}

impl Default for SmoothingSpec {
    fn default() -> Self {
        Self {
            deltas: default_deltas(),
            mollifier: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PotentialKind {
    /// `V = -(R)^-`.
    #[default]
    NegativePart,
    /// `V = χ f(R)` with the capped identity and a cutoff at twice `δ`.
    CappedCutoff,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialSpec {
    #[serde(default)]
    pub kind: PotentialKind,
    #[serde(default = "default_inner_boundary")]
    pub inner_boundary: InnerBoundary,
}

fn default_inner_boundary() -> InnerBoundary {
    InnerBoundary::NeumannAtInner
}

impl Default for PotentialSpec {
    fn default() -> Self {
        Self {
            kind: PotentialKind::default(),
            inner_boundary: default_inner_boundary(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BartnikSpec {
    pub rho: f64,
    /// Constant boundary mean curvature; exclusive with `eta_csv`.
    pub eta: Option<f64>,
    /// CSV `(polar angle, eta, weight)`.
    pub eta_csv: Option<PathBuf>,
    /// Threshold for the `min eta <= lambda` check.
    pub lambda: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EigenSpec {
    pub domain: [f64; 2],
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub dir: Option<PathBuf>,
    pub stem: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub dimension: usize,
    pub pipeline: PipelineKind,
    #[serde(default)]
    pub tolerance_profile: ToleranceProfile,
    /// Left side of the corner.
    pub inner: Option<ProfileSpec>,
    /// Right side of the corner.
    pub outer: Option<ProfileSpec>,
    /// Interior region whose boundary carries the Bartnik data.
    pub fill_in: Option<ProfileSpec>,
    #[serde(default)]
    pub smoothing: SmoothingSpec,
    #[serde(default)]
    pub potential: PotentialSpec,
    pub bartnik: Option<BartnikSpec>,
    pub shield: Option<ShieldSpec>,
    pub eigen: Option<EigenSpec>,
    #[serde(default)]
    pub output: OutputSpec,
    #[serde(default)]
    pub tolerances: ToleranceOverrides,
    #[serde(skip)]
    base_dir: PathBuf,
}

/// 1-based line and column of byte `offset` in `src`.
pub fn line_col(src: &str, offset: usize) -> (usize, usize) {
    let before = &src[..offset.min(src.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
    (line, col)
}

/// Line of the `[section]` header, or of a top-level `key =` line.
fn locate(src: &str, name: &str) -> Option<usize> {
    let header = format!("[{name}]");
    src.lines().position(|l| {
        let t = l.trim();
        t == header || t.split('=').next().map(str::trim) == Some(name)
    })
    .map(|i| i + 1)
}

fn unknown_field(message: &str) -> Option<&str> {
    let rest = message.strip_prefix("unknown field `")?;
    rest.split('`').next()
}

/// First line at or after `from` whose key is `key`.
fn find_key(src: &str, key: &str, from: usize) -> Option<usize> {
    src.lines()
        .enumerate()
        .skip(from.saturating_sub(1))
        .find(|(_, l)| l.split('=').next().map(str::trim) == Some(key) && l.contains('='))
        .map(|(i, _)| i + 1)
}

/// Section names paired with whether the scenario has them.
type Sections<'a> = &'a [(&'static str, bool)];

impl Scenario {
    /// Parses and validates `src`. Diagnostics carry `origin:line:column`.
    pub fn parse(src: &str, origin: &str, base_dir: &Path) -> Result<Self> {
        let mut scenario: Scenario = toml::from_str(src).map_err(|e| {
            let (mut line, mut col) = e.span().map_or((1, 1), |s| line_col(src, s.start));
            // tagged tables report the header; point at the offending key instead
            if let Some(key) = unknown_field(e.message()) {
                if let Some(k) = find_key(src, key, line) {
                    (line, col) = (k, 1);
                }
            }
            Error::Scenario(format!("{origin}:{line}:{col}: {}", e.message().trim()))
        })?;
        scenario.base_dir = base_dir.to_path_buf();
        scenario.validate().map_err(|(field, msg)| {
            let line = locate(src, field).unwrap_or(1);
            Error::Scenario(format!("{origin}:{line}:1: {msg}"))
        })?;
        Ok(scenario)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let src = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::parse(&src, &path.display().to_string(), base)
    }

    pub fn base_dir(&self) -> &Path {
        &self.base_dir
    }

    /// Output stem: `[output] stem`, else the scenario name with unsafe
    /// characters replaced.
    pub fn stem(&self) -> String {
        self.output.stem.clone().unwrap_or_else(|| {
            self.name
                .chars()
                .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
                .collect()
        })
    }

    /// Tolerances for `profile` (the scenario's own when `None`) with the
    /// scenario's overrides applied.
    pub fn tolerances(&self, profile: Option<ToleranceProfile>) -> Result<Tolerances> {
        Tolerances::for_profile(profile.unwrap_or(self.tolerance_profile)).overridden(&self.tolerances)
    }

    pub fn mollifier(&self) -> Result<Mollifier> {
        match &self.smoothing.mollifier {
            Some(p) => Mollifier::from_csv(&self.base_dir.join(p)),
            None => Ok(Mollifier::standard()),
        }
    }

    pub fn bartnik_data(&self) -> Result<Option<(BartnikData, Option<f64>)>> {
        let Some(b) = &self.bartnik else { return Ok(None) };
        let data = match (&b.eta, &b.eta_csv) {
            (Some(eta), None) => BartnikData::constant(self.dimension, b.rho, *eta)?,
            (None, Some(p)) => BartnikData::from_csv(&self.base_dir.join(p), self.dimension, b.rho)?,
            _ => unreachable!("validated"),
        };
        Ok(Some((data, b.lambda)))
    }

    /// Schema-level checks beyond what the types enforce. Errors name the
    /// section or key they concern.
    fn validate(&self) -> std::result::Result<(), (&'static str, String)> {
        if !(MIN_DIM..=MAX_DIM).contains(&self.dimension) {
            return Err((
                "dimension",
                format!("dimension {} outside {MIN_DIM}..={MAX_DIM}", self.dimension),
            ));
        }
        if self.name.trim().is_empty() {
            return Err(("name", "name must not be empty".into()));
        }
        let d = &self.smoothing.deltas;
        if d.is_empty() || d.iter().any(|x| !(*x > 0.0 && x.is_finite())) {
            return Err(("smoothing", "deltas must be a nonempty list of positive numbers".into()));
        }
        let (required, forbidden): (Sections<'_>, Sections<'_>) = match self.pipeline {
            PipelineKind::CornerPositiveMass => (
                &[("inner", self.inner.is_some()), ("outer", self.outer.is_some())],
                &[
                    ("fill_in", self.fill_in.is_some()),
                    ("bartnik", self.bartnik.is_some()),
                    ("shield", self.shield.is_some()),
                ],
            ),
            PipelineKind::ShiTam => (
                &[("fill_in", self.fill_in.is_some()), ("bartnik", self.bartnik.is_some())],
                &[("inner", self.inner.is_some()), ("outer", self.outer.is_some())],
            ),
        };
        for &(section, present) in required {
            if !present {
                return Err((
                    section,
                    format!("pipeline {} needs a [{section}] section", self.pipeline.name()),
                ));
            }
        }
        for &(section, present) in forbidden {
            if present {
                return Err((
                    section,
                    format!("[{section}] is not used by pipeline {}", self.pipeline.name()),
                ));
            }
        }
        if let Some(b) = &self.bartnik {
            if b.eta.is_some() == b.eta_csv.is_some() {
                return Err(("bartnik", "give exactly one of eta and eta_csv".into()));
            }
        }
        if let Some(e) = &self.eigen {
            if !(e.domain[0] < e.domain[1]) {
                return Err(("eigen", "eigen domain must be an increasing pair".into()));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const CORNER: &str = r#"
name = "flat-schwarzschild"
dimension = 3
pipeline = "corner_positive_mass"

[inner]
preset = "flat_ball"
radius = 2.5

[outer]
preset = "schwarzschild"
mass = 1.0
r_start = 2.5

[smoothing]
deltas = [0.2, 0.1]
"#;

    fn parse(src: &str) -> Result<Scenario> {
        Scenario::parse(src, "test.toml", Path::new("."))
    }

    #[test]
    fn corner_scenario_parses_with_defaults() {
        let s = parse(CORNER).unwrap();
        assert_eq!(s.pipeline, PipelineKind::CornerPositiveMass);
        assert_eq!(s.smoothing.deltas, vec![0.2, 0.1]);
        assert_eq!(s.potential.kind, PotentialKind::NegativePart);
        assert_eq!(s.stem(), "flat-schwarzschild");
        let left = s.inner.as_ref().unwrap().build(3, s.base_dir()).unwrap();
        assert_eq!(left.len(), 2001);
    }

    #[test]
    fn unknown_key_reports_its_line() {
        let src = CORNER.replace("radius = 2.5", "radius = 2.5\nradiuss = 3");
        let msg = parse(&src).unwrap_err().to_string();
        assert!(msg.contains("test.toml:9:"), "{msg}");
        assert!(msg.contains("radiuss"), "{msg}");
    }

    #[test]
    fn unknown_section_is_rejected() {
        let src = format!("{CORNER}\n[extra]\nx = 1\n");
        assert!(parse(&src).is_err());
    }

    #[test]
    fn malformed_value_reports_its_line() {
        let src = CORNER.replace("mass = 1.0", "mass = one");
        let msg = parse(&src).unwrap_err().to_string();
        assert!(msg.contains("test.toml:12:"), "{msg}");
    }

    #[test]
    fn pipeline_sections_are_checked() {
        let src = CORNER.replace("pipeline = \"corner_positive_mass\"", "pipeline = \"shi_tam\"");
        let msg = parse(&src).unwrap_err().to_string();
        assert!(msg.contains("fill_in"), "{msg}");
        let src = format!("{CORNER}\n[bartnik]\nrho = 1.0\neta = 2.0\n");
        let msg = parse(&src).unwrap_err().to_string();
        assert!(msg.contains(":18:"), "{msg}");
    }

    #[test]
    fn bad_dimension_and_deltas() {
        assert!(parse(&CORNER.replace("dimension = 3", "dimension = 2")).is_err());
        assert!(parse(&CORNER.replace("[0.2, 0.1]", "[0.2, -0.1]")).is_err());
        assert!(parse(&CORNER.replace("[0.2, 0.1]", "[]")).is_err());
    }

    #[test]
    fn bartnik_needs_exactly_one_eta() {
        let src = r#"
name = "st"
dimension = 3
pipeline = "shi_tam"
[fill_in]
preset = "flat_ball"
radius = 1.0
[bartnik]
rho = 1.0
"#;
        assert!(parse(src).is_err());
        let ok = parse(&format!("{src}eta = 2.0\n")).unwrap();
        let (data, lambda) = ok.bartnik_data().unwrap().unwrap();
        assert_eq!(data.constant_eta(), Some(2.0));
        assert_eq!(lambda, None);
    }

    #[test]
    fn line_col_counts_from_one() {
        assert_eq!(line_col("ab\ncd", 0), (1, 1));
        assert_eq!(line_col("ab\ncd", 4), (2, 2));
    }
}
