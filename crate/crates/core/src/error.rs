use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the numerical checks.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid profile: {0}")]
    InvalidProfile(String),
    #[error("grid index {index} has no centered five-point stencil (valid range 2..={last})")]
    BoundaryStencil { index: usize, last: usize },
    #[error("grid index {index} out of range for {len} samples")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("coordinate {value} outside grid range [{lo}, {hi}]")]
    OutOfRange { value: f64, lo: f64, hi: f64 },
    #[error("end is not asymptotically flat: {0}")]
    NotAsymptoticallyFlat(String),
    #[error("extrapolation did not converge: {0}")]
    NonConvergent(String),
    #[error("interface mismatch: {0}")]
    InterfaceMismatch(String),
    #[error("smoothing scale {delta} outside (0, {max})")]
    DeltaOutOfRange { delta: f64, max: f64 },
    #[error("invalid mollifier: {0}")]
    InvalidMollifier(String),
    #[error("invalid potential: {0}")]
    InvalidPotential(String),
    #[error("invalid weighted-norm configuration: {0}")]
    InvalidNormConfig(String),
    #[error("unsolvable at this size: {0}")]
    Unsolvable(String),
    #[error("invalid shield: {0}")]
    InvalidShield(String),
    #[error("no barrier mechanism applies: {0}")]
    NoBarrier(String),
    #[error("degenerate domain: {0}")]
    DegenerateDomain(String),
    #[error("invalid Bartnik data: {0}")]
    InvalidBartnik(String),
    #[error("scenario error: {0}")]
    Scenario(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
