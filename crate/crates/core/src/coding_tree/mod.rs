//! Radials, the geometric coding tree and evaluation of the coding map.

mod symbols;
mod tree;

pub use symbols::SymbolSeq;
pub use tree::{
    image_probe, pi_eval, CodingTree, PiValue, Radial, DEFAULT_STORED_DEPTH, MAX_EVAL_DEPTH,
};

use crate::rational_maps::MapError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CodingError {
    #[error("invalid radial: {0}")]
    InvalidRadial(String),
    #[error("lifting failed at word {word}: {source}")]
    Lift { word: String, source: MapError },
    #[error("accuracy needs depth {needed}, above the maximum {max}")]
    AccuracyUnreachable { needed: usize, max: usize },
    #[error("invalid symbol sequence: {0}")]
    Parse(String),
}

impl CodingError {
    pub fn name(&self) -> &'static str {
        match self {
            CodingError::InvalidRadial(_) => "InvalidRadial",
            CodingError::Lift { source, .. } => source.name(),
            CodingError::AccuracyUnreachable { .. } => "AccuracyUnreachable",
            CodingError::Parse(_) => "Parse",
        }
    }
}
