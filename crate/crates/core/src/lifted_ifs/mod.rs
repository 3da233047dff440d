//! Affine lifted iterated function systems on the Euclidean covers: tiles,
//! their rasters, measures, tilings and multiplicities.

mod affine;
mod cover;
mod measure;
mod raster;
mod tiling;

pub use affine::{growth_rate_exact, lift_radial_class, AffineMap, Ambient, GrowthReport, LiftedIfs};
pub use cover::{cover_base, phi, radial_from_class};
pub use measure::{
    closed_form_measure, interval_hull_exact, multiplicity_estimate, richardson, Multiplicity,
    Richardson, INCONCLUSIVE_GAP,
};
pub use raster::{
    attractor_raster, hutchinson_defect, measure_estimate, piece_counts, HutchinsonDefect,
    TileRaster, ITERATION_CAP, MIN_RESOLUTION,
};
pub use tiling::{tiling_check, TilingReport, Window};

use crate::cod_space::CodError;
use crate::coding_tree::CodingError;
use crate::complex_geom::GeomError;
use crate::rational_maps::{Family, MapError};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LiftError {
    #[error(transparent)]
    Class(#[from] CodError),
    #[error("family {0} has no affine lifted IFS")]
    UnsupportedFamily(Family),
    #[error("map is not a contraction: {0}")]
    NotContracting(String),
    #[error("resolution {0} below the minimum {MIN_RESOLUTION} px/unit")]
    InvalidResolution(u32),
    #[error("raster still changing after {iterations} iterations")]
    NoConvergence { iterations: usize },
    #[error("tile has measure zero")]
    ZeroMeasureTile,
    #[error("measure {measure} is {gap} away from an integer")]
    Inconclusive { measure: f64, gap: f64 },
    #[error("invalid window: {0}")]
    InvalidWindow(String),
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    Coding(#[from] CodingError),
    #[error(transparent)]
    Geom(#[from] GeomError),
}

impl LiftError {
    pub fn name(&self) -> &'static str {
        match self {
            LiftError::Class(e) => e.name(),
            LiftError::UnsupportedFamily(_) => "UnsupportedFamily",
            LiftError::NotContracting(_) => "NotContracting",
            LiftError::InvalidResolution(_) => "InvalidResolution",
            LiftError::NoConvergence { .. } => "NoConvergence",
            LiftError::ZeroMeasureTile => "ZeroMeasureTile",
            LiftError::Inconclusive { .. } => "Inconclusive",
            LiftError::InvalidWindow(_) => "InvalidWindow",
            LiftError::Map(e) => e.name(),
            LiftError::Coding(e) => e.name(),
            LiftError::Geom(e) => e.name(),
        }
    }
}
