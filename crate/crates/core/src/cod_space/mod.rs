//! Radial classes, the deck-group action on them, coding-map equality and
//! canonical forms.

mod class;
mod deck;
mod ops;

pub use class::{ClassEntry, GaussInt, RadialClass};
pub use deck::DeckElement;
pub use ops::{
    canonical_form, cod_equal, cod_witness, constant_value, deck_act, deck_search, is_degenerate,
    power_monoid_act,
};

pub(crate) use class::{lattes_shift, UNITS};

use crate::rational_maps::Family;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CodError {
    #[error("family mismatch: {left} vs {right}")]
    FamilyMismatch { left: Family, right: Family },
    #[error("class {0} lies in the degenerate locus")]
    DegenerateClass(String),
    #[error("invalid class entry {index}: {reason}")]
    InvalidClassEntry { index: usize, reason: String },
    #[error("cannot parse class: {0}")]
    Parse(String),
    #[error("unsupported family {0}")]
    UnsupportedFamily(Family),
    #[error("invalid monoid element (m, k) = ({m}, {k})")]
    InvalidMonoidElement { m: i64, k: i64 },
}

impl CodError {
    pub fn name(&self) -> &'static str {
        match self {
            CodError::FamilyMismatch { .. } => "FamilyMismatch",
            CodError::DegenerateClass(_) => "DegenerateClass",
            CodError::InvalidClassEntry { .. } => "InvalidClassEntry",
            CodError::Parse(_) => "Parse",
            CodError::UnsupportedFamily(_) => "UnsupportedFamily",
            CodError::InvalidMonoidElement { .. } => "InvalidMonoidElement",
        }
    }
}
