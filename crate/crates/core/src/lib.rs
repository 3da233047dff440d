//! Symbolic codings of Julia sets for a catalog of subhyperbolic rational maps.

pub mod cod_space;
pub mod coding_tree;
pub mod complex_geom;
pub mod eq_graph;
pub mod lifted_ifs;
pub mod rational_maps;
pub mod selftest;

pub use cod_space::{CodError, DeckElement, RadialClass};
pub use lifted_ifs::{lift_radial_class, LiftError, LiftedIfs};
pub use complex_geom::{Complex64, Curve, CutConfig, FreeWord, GaussRational, GeomError};
pub use rational_maps::{Family, MapError, MapModel};
