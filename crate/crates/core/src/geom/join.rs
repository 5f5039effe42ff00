use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::fincat::{
    exponential, global_points, is_iso, product, pushout, NatTrans, Presheaf, Pushout,
};

/// The join `P * X` of a subterminal with an arbitrary object, as the
/// pushout of `P <- P x X -> X`, together with the two coprojections.
#[derive(Debug, Clone)]
pub struct Join {
    pub object: Presheaf,
    pub from_p: NatTrans,
    pub from_x: NatTrans,
    pub po: Pushout,
}

fn check_subterminal(p: &Presheaf) -> Result<()> {
    if p.stages().iter().any(|&s| s > 1) {
        return Err(Error::InvalidModel {
            details: "join requires a subterminal first argument (every stage at most one element)"
                .into(),
        });
    }
    Ok(())
}

pub fn join_with(p: &Presheaf, x: &Presheaf, budget: &Budget) -> Result<Join> {
    check_subterminal(p)?;
    let prod = product(p, x, budget)?;
    let po = pushout(&prod.left, &prod.right, budget)?;
    Ok(Join {
        object: po.object.clone(),
        from_p: po.from_left.clone(),
        from_x: po.from_right.clone(),
        po,
    })
}

/// A connectedness verdict: `x` is `p`-connected when the function space
/// `x^p` is contractible, equivalently when `x -> p * x` is invertible.
/// Downstream constructions that need the property take this record as a
/// required input instead of recomputing it.
#[derive(Debug, Clone)]
pub struct Connectedness {
    pub p: Presheaf,
    pub x: Presheaf,
    pub connected: bool,
}

/// Decide `p`-connectedness by both defining clauses and insist they agree:
/// the function space `x^p` must have exactly one global point and exactly
/// one element at every stage, and the coprojection `x -> p * x` must be an
/// isomorphism. The two clauses are equivalent in any topos, so a
/// disagreement is reported as an internal bug rather than a verdict.
pub fn is_p_connected(p: &Presheaf, x: &Presheaf, budget: &Budget) -> Result<Connectedness> {
    check_subterminal(p)?;
    let exp = exponential(p, x, budget)?;
    let stagewise_contractible = exp.object.stages().iter().all(|&s| s == 1);
    let unique_point = global_points(&exp.object, budget)?.len() == 1;
    let clause_exp = stagewise_contractible && unique_point;
    let join = join_with(p, x, budget)?;
    let clause_join = is_iso(&join.from_x);
    if clause_exp != clause_join {
        return Err(Error::ClauseDisagreement {
            what: "connectedness".into(),
            details: format!(
                "function-space clause says {clause_exp}, join clause says {clause_join}"
            ),
        });
    }
    Ok(Connectedness {
        p: p.clone(),
        x: x.clone(),
        connected: clause_exp,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::model::Model;
    use crate::latdual::FinDistLattice;
    use std::sync::Arc;

    fn set(n: usize) -> Model {
        Model::set_model(&FinDistLattice::chain(n), Budget::default()).unwrap()
    }

    #[test]
    fn join_with_the_empty_subterminal_is_the_object_itself() {
        let m = set(2);
        let b = Budget::default();
        let x = Presheaf::constant(Arc::clone(m.base()), 3);
        let empty = Presheaf::initial(Arc::clone(m.base()));
        let j = join_with(&empty, &x, &b).unwrap();
        assert_eq!(j.object, x);
        assert!(is_iso(&j.from_x));
    }

    #[test]
    fn join_with_the_full_subterminal_is_contractible() {
        let m = set(2);
        let b = Budget::default();
        let x = Presheaf::constant(Arc::clone(m.base()), 3);
        let one = Presheaf::terminal(Arc::clone(m.base()));
        let j = join_with(&one, &x, &b).unwrap();
        assert_eq!(j.object.stages(), &[1]);
    }

    #[test]
    fn join_with_an_empty_indicator_extent_changes_nothing() {
        // Over the 3-chain, the falsity extent of the middle point is empty,
        // so joining with it leaves a two-element set alone.
        let m = set(3);
        let b = Budget::default();
        let mid = NatTrans::new(
            Presheaf::terminal(Arc::clone(m.base())),
            m.interval().clone(),
            vec![vec![1]],
        )
        .unwrap();
        let extent = m.is_f_of(&mid).unwrap().as_presheaf().0;
        assert_eq!(extent.stages(), &[0]);
        let x = Presheaf::constant(Arc::clone(m.base()), 2);
        let j = join_with(&extent, &x, &b).unwrap();
        assert_eq!(j.object, x);
    }

    #[test]
    fn everything_is_connected_along_the_empty_subterminal() {
        let m = set(2);
        let b = Budget::default();
        let empty = Presheaf::initial(Arc::clone(m.base()));
        for n in 0..4 {
            let x = Presheaf::constant(Arc::clone(m.base()), n);
            assert!(is_p_connected(&empty, &x, &b).unwrap().connected);
        }
    }

    #[test]
    fn a_two_point_set_is_not_connected_along_the_full_subterminal() {
        let m = set(2);
        let b = Budget::default();
        let one = Presheaf::terminal(Arc::clone(m.base()));
        let two = Presheaf::constant(Arc::clone(m.base()), 2);
        assert!(!is_p_connected(&one, &two, &b).unwrap().connected);
        let pt = Presheaf::constant(Arc::clone(m.base()), 1);
        assert!(is_p_connected(&one, &pt, &b).unwrap().connected);
    }

    #[test]
    fn strict_models_make_everything_connected_along_the_zero_extent() {
        // In a model where 0 differs from 1 at every stage, the truth extent
        // of zero is empty, so the connectedness required by the cone
        // comparisons holds for every object.
        let m = set(2);
        let b = Budget::default();
        let p = m.is_t_of(m.zero()).unwrap().as_presheaf().0;
        assert_eq!(p.stages(), &[0]);
        for n in [0, 1, 2, 5] {
            let x = Presheaf::constant(Arc::clone(m.base()), n);
            assert!(is_p_connected(&p, &x, &b).unwrap().connected);
        }
    }
}
