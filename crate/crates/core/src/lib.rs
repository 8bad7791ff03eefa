//! Numerical checks for quasi-local mass, ADM mass and scalar-curvature
//! fill-in constructions on rotationally symmetric Riemannian metrics.

// `!(x > 0.0)` is deliberate: it rejects NaN along with the bad values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Grid loops index several aligned sample arrays at once.
#![allow(clippy::needless_range_loop)]

pub mod bartnik;
pub mod conformal;
pub mod corner;
pub mod eigen;
pub mod error;
pub mod geometry;
pub mod numerics;
pub mod par;
pub mod pipeline;
pub mod report;
pub mod scenario;
pub mod shield;
pub mod tolerances;

pub use error::{Error, Result};
pub use geometry::{End, EndKind, Orientation, ProfileMetric};
