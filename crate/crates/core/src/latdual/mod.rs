//! Finite bounded distributive lattices and the spectrum/opens duality.
//!
//! The external side works with plain finite lattices: free finitely
//! generated algebras over a coefficient lattice (in evaluation normal form),
//! quotients by congruence closure, algebras of observations, and the
//! spectrum construction with its unit and counit. Quasi-coherence and
//! affineness are decided by brute force exactly as defined: the counit or
//! unit is built element by element and tested for bijectivity.
//!
//! The internal side packages a presheaf whose stages are lattices and whose
//! restriction maps are lattice homomorphisms; that object is the interval
//! every geometric construction downstream consumes.

mod algebra;
mod duality;
mod internal;
mod lattice;

pub use algebra::{enum_homs, free_algebra, opens_algebra, quotient, PresentedAlgebra};
pub use duality::{
    all_congruences, counit, is_affine, is_quasi_coherent, is_stably_quasi_coherent, unit,
    StabilityReport,
};
pub use internal::InternalLattice;
pub use lattice::{FinDistLattice, LatticeHom};
