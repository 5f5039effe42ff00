//! Finite-model engine for interval-based synthetic topology.
//!
//! Everything here is computed over a finite base category: presheaves are
//! tables of finite stage sets, an interval is an internal bounded
//! distributive lattice, and statements of the internal language are decided
//! by Kripke-Joyal forcing. On top of that substrate the crate builds the
//! geometric constructions (simplices, horns, Sierpinski cones, partial-map
//! classifiers), the checkers for lattice-completeness conditions, and the
//! set-level Sierpinski extension algorithm with its brute-force
//! cross-validation.
//!
//! All builders are deterministic: stage sets are dense integer ranges with a
//! documented canonical order, so isomorphic inputs produce bit-identical
//! outputs. Builders that could blow up refuse instances beyond a configurable
//! element budget instead of thrashing.

pub mod budget;
pub mod complete;
pub mod error;
pub mod extend;
pub mod fincat;
pub mod geom;
pub mod kripke;
pub mod latdual;

pub use budget::Budget;
pub use error::{Error, Result};
