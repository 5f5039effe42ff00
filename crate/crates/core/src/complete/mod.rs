//! Decision procedures over interval models: the catalogue of lattice
//! conditions decided by forcing (with re-verified witnesses), dominance
//! and closed properness, orthogonality of objects against single maps and
//! against internally indexed families, the four completeness classes, and
//! instance-level pullback-stability checks.
//!
//! The named conditions live in a data file (`conditions.txt`) mapping
//! names to surface-syntax formulas, so new conditions can be added without
//! touching code; [`check_formula`] accepts ad-hoc formulas directly.

mod conditions;
mod ortho;

pub use conditions::{
    check_closed_proper, check_condition, check_conjunctive, check_conservative,
    check_disjunctive, check_dominant, check_formula, check_local, check_phoa,
    check_quotient_initial, check_quotient_initial_core, check_strict, condition_catalogue,
    ConditionReport, Witness,
};
pub use ortho::{
    based_segal_class, check_pullback_locality, completeness_suite, is_orthogonal,
    is_orthogonal_to_family, little_sierp_class, segal_class, ClassMembers, ClassName, FamilyMap,
    MapClass, PullbackSquare, SuiteVerdicts,
};
