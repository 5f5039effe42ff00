//! Finite categories, presheaves on them, and the topos structure computed
//! stagewise: (co)limits, exponentials, the subobject classifier, and the
//! category of elements with its reindexing equivalence.
//!
//! Canonical orderings, fixed once and relied on everywhere:
//! * product elements: `(x, y) -> x * |Y(c)| + y`;
//! * pullback elements: pairs `(x, y)` in lexicographic order;
//! * pushout classes: ordered by least member of the disjoint union, left
//!   summand first;
//! * exponential families: lexicographic in the flattened value table,
//!   arrows into the stage listed by morphism index;
//! * sieves: ordered by bitmask over arrows into the stage.

mod category;
mod elements;
mod exponential;
mod hom;
mod limits;
mod omega;
mod presheaf;

pub use category::{arrow_category, chain_category, terminal_category, FinCategory, MorId, ObjId};
pub use elements::{
    elements_category, reindex_fibered, reindex_map, reindex_presheaf, sigma, sigma_map,
    ElCategory, SigmaTotal,
};
pub use exponential::{curry, exponential, precompose, uncurry, ExpData, Family};
pub use hom::{enum_nat_trans, find_iso, global_points, is_epi, is_iso, is_mono, inverse_of};
pub use limits::{coproduct, product, pullback, pushout, Product, Pullback, Pushout};
pub(crate) use limits::UnionFind;
pub use omega::{omega, OmegaData};
pub use presheaf::{NatTrans, Presheaf, Subobject};
