//! Exact and floating complex arithmetic, polylines, and homotopy words of
//! loops in a finitely punctured plane.

mod curve;
mod cuts;
mod gauss;
mod word;

pub use curve::{segment_distance, winding_number, Curve, CLOSE_TOL, JOIN_TOL};
pub use cuts::{crossing_word, CutConfig};
pub use gauss::GaussRational;
pub use word::{FreeWord, Letter};

pub use num_complex::Complex64;

/// Minimum distance between a curve and any declared puncture.
pub const EPS_PUNCT: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GeomError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("endpoints differ by {gap:e}")]
    EndpointMismatch { gap: f64 },
    #[error("loop does not close: gap {gap:e}")]
    NotClosed { gap: f64 },
    #[error("invalid curve: {0}")]
    InvalidCurve(String),
    #[error("curve passes within {distance:e} of puncture {puncture}")]
    PunctureProximity { puncture: usize, distance: f64 },
    #[error("segment {segment} meets the cut of puncture {puncture} degenerately")]
    DegenerateCrossing { segment: usize, puncture: usize },
    #[error("invalid cut configuration: {0}")]
    InvalidCuts(String),
}

impl GeomError {
    /// Variant name, as surfaced by the command-line front end.
    pub fn name(&self) -> &'static str {
        match self {
            GeomError::Parse(_) => "Parse",
            GeomError::EndpointMismatch { .. } => "EndpointMismatch",
            GeomError::NotClosed { .. } => "NotClosed",
            GeomError::InvalidCurve(_) => "InvalidCurve",
            GeomError::PunctureProximity { .. } => "PunctureProximity",
            GeomError::DegenerateCrossing { .. } => "DegenerateCrossing",
            GeomError::InvalidCuts(_) => "InvalidCuts",
        }
    }
}
