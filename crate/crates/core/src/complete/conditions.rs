use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fincat::{elements_category, global_points, ObjId, Presheaf, Subobject};
use crate::geom::{generic_truth_extent, reindex_lattice, Model};
use crate::kripke::{
    force, holds_globally, parse_formula, Formula, Signature, TypeExpr,
};
use crate::latdual::{free_algebra, is_quasi_coherent};

/// Where a condition fails: the stage and the values of the outer
/// universally quantified variables there (empty for variable-free
/// conditions). For checks that run over a category of elements the stage
/// indexes that category; the check's documentation says which.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub stage: ObjId,
    pub environment: Vec<(String, usize)>,
}

/// The outcome of one condition check. For catalogue-backed conditions
/// `formula` is the surface syntax that was forced; external checks record
/// a description of the procedure instead. A failing report always carries
/// a witness that has been re-verified against the forcing tables.
#[derive(Debug, Clone)]
pub struct ConditionReport {
    pub condition: String,
    pub holds: bool,
    pub witness: Option<Witness>,
    pub formula: String,
}

const CATALOGUE_SRC: &str = include_str!("conditions.txt");

/// The named conditions shipped with the crate, as `(name, formula)` pairs
/// in file order.
pub fn condition_catalogue() -> Vec<(&'static str, &'static str)> {
    CATALOGUE_SRC
        .lines()
        .filter_map(|line| {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                return None;
            }
            let (name, formula) = line.split_once(':')?;
            Some((name.trim(), formula.trim()))
        })
        .collect()
}

/// Re-derive a failing witness directly from the forcing tables: peel the
/// universal prefix, force the body, and confirm the witness environment is
/// outside the truth subobject. A witness that does not re-verify is an
/// internal bug, reported as a clause disagreement.
fn reverify(
    sig: &Signature,
    phi: &Formula,
    stage: ObjId,
    env: &[(String, usize)],
) -> Result<()> {
    let mut ctx: Vec<(String, TypeExpr)> = Vec::new();
    let mut body = phi;
    while let Formula::ForAll(x, ty, inner) = body {
        ctx.push((x.clone(), ty.clone()));
        body = inner;
    }
    let mismatch = |details: String| Error::ClauseDisagreement {
        what: "condition witness".into(),
        details,
    };
    if ctx.len() != env.len() {
        return Err(mismatch(format!(
            "witness names {} variables but the prefix has {}",
            env.len(),
            ctx.len()
        )));
    }
    let verdict = force(sig, &ctx, body)?;
    let mut index = 0usize;
    for ((_, rt), (_, value)) in verdict.context.iter().zip(env) {
        index = index * rt.presheaf.stage(stage) + value;
    }
    if verdict.truth.contains(stage, index) {
        return Err(mismatch(format!(
            "the negated clause does not hold at stage {stage} with {env:?}"
        )));
    }
    Ok(())
}

fn forced_report(sig: &Signature, name: &str, formula_src: &str) -> Result<ConditionReport> {
    let phi = parse_formula(formula_src)?;
    let verdict = holds_globally(sig, &phi)?;
    let witness = match (&verdict.counterexample, verdict.holds) {
        (Some((stage, env)), false) => {
            reverify(sig, &phi, *stage, env)?;
            Some(Witness {
                stage: *stage,
                environment: env.clone(),
            })
        }
        _ => None,
    };
    Ok(ConditionReport {
        condition: name.to_string(),
        holds: verdict.holds,
        witness,
        formula: formula_src.to_string(),
    })
}

/// Check a custom condition given directly in surface syntax, against the
/// model's registered symbols.
pub fn check_formula(m: &Model, name: &str, formula_src: &str) -> Result<ConditionReport> {
    forced_report(m.signature(), name, formula_src)
}

/// Check a condition from the catalogue by name.
pub fn check_condition(m: &Model, name: &str) -> Result<ConditionReport> {
    let formula = condition_catalogue()
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, f)| *f)
        .ok_or_else(|| Error::UnknownSymbol {
            name: name.to_string(),
        })?;
    check_formula(m, name, formula)
}

/// The bottom indicator never fires: truth of `zero` is absurd.
pub fn check_strict(m: &Model) -> Result<ConditionReport> {
    check_condition(m, "strict")
}

/// Truth of a join is truth of one of its arms.
pub fn check_disjunctive(m: &Model) -> Result<ConditionReport> {
    check_condition(m, "disjunctive")
}

/// Strict and disjunctive together.
pub fn check_local(m: &Model) -> Result<ConditionReport> {
    check_condition(m, "local")
}

/// Falsity of a meet is falsity of one of its arms.
pub fn check_conjunctive(m: &Model) -> Result<ConditionReport> {
    check_condition(m, "conjunctive")
}

/// The truth indicator reflects the lattice order.
pub fn check_conservative(m: &Model) -> Result<ConditionReport> {
    check_condition(m, "conservative")
}

/// Every interval element is an endpoint, internally.
pub fn check_quotient_initial(m: &Model) -> Result<ConditionReport> {
    check_condition(m, "quotientInitial")
}

/// Every interval element is an endpoint, at the level of global sections:
/// each global point of the interval must equal the zero or the one
/// constant. The witness records the first stage where an offending point
/// avoids both endpoints, falling back to the first stage where it differs
/// from zero.
pub fn check_quotient_initial_core(m: &Model) -> Result<ConditionReport> {
    let points = global_points(m.interval(), m.budget())?;
    let base = m.base();
    let mut witness = None;
    for p in &points {
        if p == m.zero() || p == m.one() {
            continue;
        }
        let avoids_both = |c: &ObjId| {
            let v = p.apply(*c, 0);
            v != m.zero().apply(*c, 0) && v != m.one().apply(*c, 0)
        };
        let stage = base
            .objects()
            .find(|c| avoids_both(c))
            .or_else(|| base.objects().find(|&c| p.apply(c, 0) != m.zero().apply(c, 0)))
            .unwrap_or(0);
        witness = Some(Witness {
            stage,
            environment: vec![("i".to_string(), p.apply(stage, 0))],
        });
        break;
    }
    Ok(ConditionReport {
        condition: "quotientInitialCore".to_string(),
        holds: witness.is_none(),
        witness,
        formula: "external: every global section of J equals zero or one".to_string(),
    })
}

/// The interval equation `a(i) = a(0) v (i ^ a(1))` over all internal
/// endomaps, cross-checked on one-object bases against quasi-coherence of
/// the one-generator extension of the stage lattice. The two readings must
/// agree; a mismatch is reported as a clause disagreement.
pub fn check_phoa(m: &Model) -> Result<ConditionReport> {
    let report = check_condition(m, "phoa")?;
    let base = m.base();
    if base.object_count() == 1 && base.morphisms().count() == 1 {
        let jx = free_algebra(m.lattice().stage_lattice(0), 1, m.budget())?;
        let qc = is_quasi_coherent(&jx, m.budget())?;
        if qc != report.holds {
            return Err(Error::ClauseDisagreement {
                what: "the Phoa condition".into(),
                details: format!(
                    "the internal equation gives {}, quasi-coherence of the one-generator extension gives {}",
                    report.holds, qc
                ),
            });
        }
    }
    Ok(report)
}

const DOMINANT_SRC: &str = "forall phi:J^E. exists j:J. \
    ((IsT(j) => (exists u:E. IsT(phi(u)))) /\\ ((exists u:E. IsT(phi(u))) => IsT(j))) \
    /\\ (forall k:J. ((IsT(k) => (exists u:E. IsT(phi(u)))) /\\ ((exists u:E. IsT(phi(u))) => IsT(k))) => k = j)";

/// Conservativity together with closure of the truth opens under
/// dependent sums: over the category of elements of the interval, every
/// interval-valued observation on the generic truth extent is classified
/// by a unique interval element. When the closure clause fails, the
/// witness stage indexes the category of elements.
pub fn check_dominant(m: &Model) -> Result<ConditionReport> {
    let conservative = check_conservative(m)?;
    let el = elements_category(m.interval())?;
    let lat = reindex_lattice(&el, m.lattice(), m.budget())?;
    let (extent, _, _) = generic_truth_extent(&el, &lat)?.as_presheaf();
    let mut sig = Signature::new(Arc::clone(&el.cat), *m.budget());
    sig.add_type("J", lat.carrier.clone())?;
    sig.add_type("E", extent)?;
    sig.add_sub("IsT", TypeExpr::named("J"), lat.top_subobject()?)?;
    let closure = forced_report(&sig, "dominant", DOMINANT_SRC)?;
    let holds = conservative.holds && closure.holds;
    let witness = if !closure.holds {
        closure.witness
    } else {
        conservative.witness
    };
    Ok(ConditionReport {
        condition: "dominant".to_string(),
        holds,
        witness,
        formula: DOMINANT_SRC.to_string(),
    })
}

const CLOSED_PROPER_SRC: &str = "forall phi:Omega. forall alpha:J^X. \
    ((Holds(phi) \\/ (forall x:X. IsF(alpha(x)))) => (forall x:X. Holds(phi) \\/ IsF(alpha(x)))) \
    /\\ ((forall x:X. Holds(phi) \\/ IsF(alpha(x))) => (Holds(phi) \\/ (forall x:X. IsF(alpha(x)))))";

/// The dual distribution law between disjunction and quantification over
/// `X`, ranged over every truth value and every interval-valued predicate:
/// the shape of properness along the closed parts.
pub fn check_closed_proper(m: &Model, x: &Presheaf) -> Result<ConditionReport> {
    let mut sig = m.signature().clone();
    sig.add_type("X", x.clone())?;
    let omega = m.omega();
    let members = m
        .base()
        .objects()
        .map(|c| {
            (0..omega.object.stage(c))
                .map(|s| s == omega.top(c))
                .collect()
        })
        .collect();
    let truth_point = Subobject::new(omega.object.clone(), members)?;
    sig.add_sub("Holds", TypeExpr::named("Omega"), truth_point)?;
    forced_report(&sig, "closedProper", CLOSED_PROPER_SRC)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::budget::Budget;
    use crate::fincat::arrow_category;
    use crate::geom::{has_obs_top, simplex};
    use crate::latdual::{FinDistLattice, InternalLattice};

    fn set(n: usize) -> Model {
        Model::set_model(&FinDistLattice::chain(n), Budget::default()).unwrap()
    }

    fn diamond_model() -> Model {
        Model::set_model(&FinDistLattice::diamond(), Budget::default()).unwrap()
    }

    fn arrow_model() -> Model {
        let b = Budget::default();
        let base = arrow_category();
        let carrier = Presheaf::new(
            Arc::clone(&base),
            vec![2, 3],
            vec![vec![0, 1], vec![0, 1, 2], vec![0, 1, 1]],
        )
        .unwrap();
        let stages = vec![FinDistLattice::chain(2), FinDistLattice::chain(3)];
        Model::new(InternalLattice::new(carrier, stages, &b).unwrap(), b).unwrap()
    }

    #[test]
    fn the_catalogue_is_well_formed() {
        let cat = condition_catalogue();
        let names: Vec<&str> = cat.iter().map(|(n, _)| *n).collect();
        assert_eq!(
            names,
            [
                "strict",
                "disjunctive",
                "local",
                "conjunctive",
                "conservative",
                "phoa",
                "quotientInitial"
            ]
        );
        for (_, formula) in cat {
            parse_formula(formula).unwrap();
        }
    }

    #[test]
    fn chains_satisfy_the_order_conditions() {
        for m in [set(2), set(3)] {
            assert!(check_strict(&m).unwrap().holds);
            assert!(check_disjunctive(&m).unwrap().holds);
            assert!(check_local(&m).unwrap().holds);
            assert!(check_conjunctive(&m).unwrap().holds);
        }
    }

    #[test]
    fn conservativity_separates_the_chains() {
        assert!(check_conservative(&set(2)).unwrap().holds);
        let report = check_conservative(&set(3)).unwrap();
        assert!(!report.holds);
        let w = report.witness.unwrap();
        assert_eq!(w.stage, 0);
        assert_eq!(
            w.environment,
            vec![("i".to_string(), 1), ("j".to_string(), 0)]
        );
    }

    #[test]
    fn the_diamond_fails_the_distribution_conditions() {
        let m = diamond_model();
        assert!(check_strict(&m).unwrap().holds);
        assert!(!check_disjunctive(&m).unwrap().holds);
        assert!(!check_conjunctive(&m).unwrap().holds);
        assert!(!check_conservative(&m).unwrap().holds);
    }

    #[test]
    fn local_is_the_conjunction_of_strict_and_disjunctive() {
        for m in [set(1), set(2), set(3), diamond_model(), arrow_model()] {
            let strict = check_strict(&m).unwrap().holds;
            let disj = check_disjunctive(&m).unwrap().holds;
            assert_eq!(check_local(&m).unwrap().holds, strict && disj);
        }
    }

    #[test]
    fn the_point_lattice_is_not_strict() {
        assert!(!check_strict(&set(1)).unwrap().holds);
    }

    #[test]
    fn the_arrow_model_is_conservative_through_restrictions() {
        // At the richer stage the pair (middle, zero) would break
        // conservativity, but its restriction to the coarser stage already
        // refutes the premise, so the implication is forced everywhere.
        assert!(check_conservative(&arrow_model()).unwrap().holds);
    }

    #[test]
    fn quotient_initiality_internal_and_core() {
        let m2 = set(2);
        assert!(check_quotient_initial(&m2).unwrap().holds);
        assert!(check_quotient_initial_core(&m2).unwrap().holds);

        let m3 = set(3);
        let internal = check_quotient_initial(&m3).unwrap();
        assert!(!internal.holds);
        assert_eq!(
            internal.witness.unwrap().environment,
            vec![("i".to_string(), 1)]
        );
        let core = check_quotient_initial_core(&m3).unwrap();
        assert!(!core.holds);
        assert_eq!(core.witness.unwrap().environment, vec![("i".to_string(), 1)]);
    }

    #[test]
    fn the_arrow_model_has_a_mixed_global_point() {
        // The section that is one at the coarse stage and the middle at the
        // fine stage is neither endpoint, so the section-level check fails
        // even though its witness avoids both endpoints only at stage 1.
        let core = check_quotient_initial_core(&arrow_model()).unwrap();
        assert!(!core.holds);
        let w = core.witness.unwrap();
        assert_eq!(w.stage, 1);
        assert_eq!(w.environment, vec![("i".to_string(), 1)]);
    }

    #[test]
    fn phoa_holds_only_for_the_point_lattice() {
        assert!(check_phoa(&set(1)).unwrap().holds);
        let two = check_phoa(&set(2)).unwrap();
        assert!(!two.holds);
        // First failing endomap in enumeration order is the swap, caught at
        // the top argument.
        assert_eq!(
            two.witness.unwrap().environment,
            vec![("a".to_string(), 2), ("i".to_string(), 1)]
        );
        assert!(!check_phoa(&set(3)).unwrap().holds);
        assert!(!check_phoa(&diamond_model()).unwrap().holds);
    }

    #[test]
    fn dominance_needs_conservativity_and_unique_classifiers() {
        assert!(check_dominant(&set(1)).unwrap().holds);
        assert!(check_dominant(&set(2)).unwrap().holds);
        let three = check_dominant(&set(3)).unwrap();
        assert!(!three.holds);
        assert!(three.witness.is_some());
        assert!(!check_dominant(&diamond_model()).unwrap().holds);
    }

    #[test]
    fn closed_properness_over_a_point_base_is_free() {
        let m = set(3);
        let one = Presheaf::terminal(Arc::clone(m.base()));
        let empty = Presheaf::initial(Arc::clone(m.base()));
        assert!(check_closed_proper(&m, &one).unwrap().holds);
        assert!(check_closed_proper(&m, &empty).unwrap().holds);
        // Over a one-object base a truth value is a constant, so the two
        // sides of the distribution law coincide for every object.
        let triangle = simplex(&m, 2).unwrap();
        assert!(check_closed_proper(&m, &triangle.object).unwrap().holds);
        assert!(has_obs_top(&m, &triangle.object).unwrap().is_none());
    }

    #[test]
    fn closed_properness_fails_for_a_partial_stage() {
        // The representable at the source of the arrow has an element at
        // the coarse stage only; quantifying over it at the fine stage
        // consults that element, where a non-top truth value has already
        // restricted to top. With no global points the greatest-element
        // criterion is silent, consistently.
        let m = arrow_model();
        let y0 = Presheaf::representable(m.base(), 0).0;
        let report = check_closed_proper(&m, &y0).unwrap();
        assert!(!report.holds);
        assert!(report.witness.is_some());
        assert!(has_obs_top(&m, &y0).unwrap().is_none());
    }

    #[test]
    fn custom_formulas_are_checked_and_witnessed() {
        let m = set(3);
        let good = check_formula(&m, "unit laws", "forall i:J. meet(i, one) = i /\\ join(i, zero) = i").unwrap();
        assert!(good.holds && good.witness.is_none());
        let bad = check_formula(&m, "everything is true", "forall i:J. IsT(i)").unwrap();
        assert!(!bad.holds);
        assert_eq!(bad.witness.unwrap().environment, vec![("i".to_string(), 0)]);
    }

    #[test]
    fn unknown_catalogue_names_are_refused() {
        let err = check_condition(&set(2), "no-such-condition").unwrap_err();
        assert!(matches!(err, Error::UnknownSymbol { .. }));
    }
}
