//! Default tolerances for the scenario pipelines, in one table.
//!
//! | field              | default | strict | meaning                                             |
//! |--------------------|---------|--------|-----------------------------------------------------|
//! | `curvature`        | 1e-8    | 1e-10  | floor for `R~ >= -tol` and `R >= -tol` hypotheses   |
//! | `mass`             | 1e-6    | 1e-8   | floor for `m >= -tol`; rigidity window `|m| <= tol` |
//! | `mass_formula`     | 1e-5    | 1e-6   | formula mass vs direct ADM of the conformal metric  |
//! | `mean_curvature`   | 1e-10   | 1e-12  | slack in `H_+ <= H_-`                               |
//! | `ricci`            | 1e-6    | 1e-8   | rigidity window on `max |Ric|`                      |
//! | `boundary_match`   | 1e-8    | 1e-10  | fill-in boundary vs Bartnik data (`h` and `eta`)    |
//! | `shield`           | 1e-10   | 1e-12  | slack on each shield condition                      |
//!
//! A scenario's `[tolerances]` section overrides single entries after the
//! profile is chosen.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ToleranceProfile {
    #[default]
    Default,
    Strict,
}

impl std::str::FromStr for ToleranceProfile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "default" => Ok(Self::Default),
            "strict" => Ok(Self::Strict),
            other => Err(Error::Scenario(format!(
                "unknown tolerance profile {other:?} (expected default or strict)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    pub curvature: f64,
    pub mass: f64,
    pub mass_formula: f64,
    pub mean_curvature: f64,
    pub ricci: f64,
    pub boundary_match: f64,
    pub shield: f64,
}

impl Tolerances {
    pub const DEFAULT: Self = Self {
        curvature: 1e-8,
        mass: 1e-6,
        mass_formula: 1e-5,
        mean_curvature: 1e-10,
        ricci: 1e-6,
        boundary_match: 1e-8,
        shield: 1e-10,
    };

    pub const STRICT: Self = Self {
        curvature: 1e-10,
        mass: 1e-8,
        mass_formula: 1e-6,
        mean_curvature: 1e-12,
        ricci: 1e-8,
        boundary_match: 1e-10,
        shield: 1e-12,
    };

    pub fn for_profile(profile: ToleranceProfile) -> Self {
        match profile {
            ToleranceProfile::Default => Self::DEFAULT,
            ToleranceProfile::Strict => Self::STRICT,
        }
    }

    /// Applies the entries present in `over`.
    pub fn overridden(mut self, over: &ToleranceOverrides) -> Result<Self> {
        let slots = [
            (&mut self.curvature, over.curvature, "curvature"),
            (&mut self.mass, over.mass, "mass"),
            (&mut self.mass_formula, over.mass_formula, "mass_formula"),
            (&mut self.mean_curvature, over.mean_curvature, "mean_curvature"),
            (&mut self.ricci, over.ricci, "ricci"),
            (&mut self.boundary_match, over.boundary_match, "boundary_match"),
            (&mut self.shield, over.shield, "shield"),
        ];
        for (slot, value, name) in slots {
            if let Some(v) = value {
                if !(v >= 0.0 && v.is_finite()) {
                    return Err(Error::Scenario(format!(
                        "tolerance {name} = {v} must be finite and nonnegative"
                    )));
                }
                *slot = v;
            }
        }
        Ok(self)
    }
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}

/// Optional per-scenario overrides of [`Tolerances`].
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceOverrides {
    pub curvature: Option<f64>,
    pub mass: Option<f64>,
    pub mass_formula: Option<f64>,
    pub mean_curvature: Option<f64>,
    pub ricci: Option<f64>,
    pub boundary_match: Option<f64>,
    pub shield: Option<f64>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strict_is_tighter_everywhere() {
        let (d, s) = (Tolerances::DEFAULT, Tolerances::STRICT);
        let pairs = [
            (d.curvature, s.curvature),
            (d.mass, s.mass),
            (d.mass_formula, s.mass_formula),
            (d.mean_curvature, s.mean_curvature),
            (d.ricci, s.ricci),
            (d.boundary_match, s.boundary_match),
            (d.shield, s.shield),
        ];
        assert!(pairs.iter().all(|(a, b)| b < a));
    }

    #[test]
    fn overrides_replace_single_entries() {
        let over = ToleranceOverrides {
            mass: Some(1e-3),
            ..Default::default()
        };
        let t = Tolerances::DEFAULT.overridden(&over).unwrap();
        assert_eq!(t.mass, 1e-3);
        assert_eq!(t.curvature, Tolerances::DEFAULT.curvature);
        let bad = ToleranceOverrides {
            ricci: Some(-1.0),
            ..Default::default()
        };
        assert!(Tolerances::DEFAULT.overridden(&bad).is_err());
    }

    #[test]
    fn profile_names_parse() {
        assert_eq!("strict".parse::<ToleranceProfile>().unwrap(), ToleranceProfile::Strict);
        assert!("loose".parse::<ToleranceProfile>().is_err());
    }
}
