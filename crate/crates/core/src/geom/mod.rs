//! Geometric constructions over an interval model: cubes, simplices and
//! horns carved out by the interval order, cones and open mapping
//! cylinders, partial-map objects with their classification property, the
//! fiberwise comparisons between the two, and the observational preorder
//! on global points.
//!
//! The entry point is [`Model`]: a presheaf topos together with an internal
//! bounded distributive lattice whose top and bottom classify the basic
//! open and closed parts. Every construction that makes sense fiberwise is
//! exposed both over the model's own base and, via `*_over` variants,
//! over an arbitrary internal lattice so it can be reused on categories of
//! elements.

mod cylinder;
mod join;
mod lift;
mod model;
mod obs;
mod scone;
mod shapes;

pub use cylinder::{
    fiber_connectedness, open_cylinder, relative_lift, sigma_f, CylinderData, RelativeLiftData,
    SigmaFData,
};
pub use join::{is_p_connected, join_with, Connectedness, Join};
pub use lift::{
    classify_open_partial, lift, lift_over, sigma, sigma_over, LiftData, SigmaComparison,
};
pub use model::{
    dualize, generic_truth_extent, reindex_lattice, zero_truth_extent, Model,
};
pub use obs::{has_obs_top, observational_preorder, ObsPreorder};
pub use scone::{
    open_inclusion_is_pullback, scone, scone_family, scone_over, SconeData, SconeFamilyData,
};
pub use shapes::{cube, horn, simplex, slice, CubeData, FiberedObject, HornData, SimplexData};
