//! Finite graphs deciding when two symbol sequences code the same point,
//! for `z² - 3` with its dihedral quotient of the loop group.

mod graph;
mod group;
mod mult;
mod radials;

pub use graph::{build_eq_graph, edges_are_sound, relation_decide, Edge, EqGraph, Verdict};
pub use group::{GroupElem, QuotientGroup};
pub use mult::{
    companion_count, multiplicity_classify, singleton_certificates, MultiplicityReport,
    CERTIFICATE_MAX_LEN, DEFAULT_SEED, MODAL_FREQUENCY,
};
pub use radials::{
    calibrate_r3, matches_table, LiftRelation, LoopSetting, NamedRadial, RadialSpec, LOOP_RADIUS,
    R3_PREFIXES, R3_TABLE,
};

use crate::coding_tree::CodingError;
use crate::complex_geom::GeomError;
use crate::rational_maps::MapError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EqError {
    #[error("invalid group: {0}")]
    InvalidGroup(String),
    #[error("coset enumeration exceeded {0} cosets")]
    GroupTooLarge(usize),
    #[error("lift along legs ({i}, {j}) does not close (gap {gap:e})")]
    NonClosedLift { i: usize, j: usize, gap: f64 },
    #[error("pruning removed every vertex")]
    EmptyGraph,
    #[error("modal class size {modal} has frequency {frequency}, below 0.95")]
    Inconclusive { modal: u64, frequency: f64 },
    #[error("invalid sampling: {samples} samples of depth {depth}")]
    InvalidSampling { samples: usize, depth: usize },
    #[error("invalid radial: {0}")]
    InvalidRadial(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Coding(#[from] CodingError),
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    Geom(#[from] GeomError),
}

impl EqError {
    pub fn name(&self) -> &'static str {
        match self {
            EqError::InvalidGroup(_) => "InvalidGroup",
            EqError::GroupTooLarge(_) => "GroupTooLarge",
            EqError::NonClosedLift { .. } => "NonClosedLift",
            EqError::EmptyGraph => "EmptyGraph",
            EqError::Inconclusive { .. } => "Inconclusive",
            EqError::InvalidSampling { .. } => "InvalidSampling",
            EqError::InvalidRadial(_) => "InvalidRadial",
            EqError::Parse(_) => "Parse",
            EqError::Coding(e) => e.name(),
            EqError::Map(e) => e.name(),
            EqError::Geom(e) => e.name(),
        }
    }
}
