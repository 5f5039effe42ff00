//! From cone data to full extensions: enumerating the data carried by maps
//! off a cone, restricting maps off the partial-map object to such data,
//! the evaluation square with its diagonal section, the extension algorithm
//! that rebuilds a map off the whole partial-map object from a datum, and
//! the retraction of the restriction map. Every construction cross-checks
//! itself against brute-force enumeration: the extension must be the unique
//! preimage under restriction, the square must commute, and the
//! constructive bijection must agree with the direct orthogonality test.

mod algo;
mod data;
mod eval;

pub use algo::{
    build_extension, build_retraction, verify_sierp_equivalence, EquivalenceReport,
    RetractionData, SierpinskiExtension,
};
pub use data::{restrict_scd, scone_data_of, SconeDataEnum, SierpinskiConeDatum};
pub use eval::{eval_maps, generic_element, generic_points, EvalData, GenericPoints};
