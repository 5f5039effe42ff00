//! Internal first-order language over a presheaf model, with bounded
//! higher-order quantification through exponential types, and its forcing
//! semantics.
//!
//! A [`Signature`] names the model's ingredients: base types denote
//! presheaves, and maps, subobjects, and constants denote what their names
//! say. [`force`] tabulates where a formula holds: equality, membership,
//! `/\`, `\/`, and `exists` are evaluated stagewise, while `=>` and `forall`
//! quantify over all arrows into the stage, so truth is stable under
//! restriction and the resulting table is a genuine subobject of the context
//! presheaf. [`holds_globally`] answers for closed formulas and names the
//! witnesses when the answer is no.
//!
//! The surface grammar (see [`parse_formula`] for the full reference) uses
//! `forall x:T.`, `exists`, `/\`, `\/`, `=>`, `=`, `top`, `bot`, application
//! `f(x, y)`, pairs `(a, b)`, projections `fst`/`snd`, and types built from
//! names with `*` and `^`. Printing and parsing are mutually inverse.

mod ast;
mod force;
mod parse;
mod sig;

pub use ast::{Formula, Term, TypeExpr};
pub use force::{force, holds_globally, GlobalVerdict, Verdict};
pub use parse::{parse_formula, parse_type};
pub use sig::{ConstDecl, MapDecl, ResolvedType, Signature, SubDecl, TypeShape};
