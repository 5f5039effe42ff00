use std::sync::Arc;

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::fincat::{
    omega, ElCategory, FinCategory, NatTrans, OmegaData, Presheaf, Subobject,
};
use crate::kripke::{Signature, TypeExpr};
use crate::latdual::{FinDistLattice, InternalLattice};

/// A presheaf model equipped with an internal interval: the validated
/// lattice object `J`, the subobject classifier of the base, and the
/// indicator maps of the endpoint subobjects `{1}` and `{0}`. The model also
/// carries a formula signature with the canonical symbols (`J`, `Omega`,
/// `meet`, `join`, `zero`, `one`, `IsT`, `IsF`) registered, so geometric
/// loci can be cut out by formulas directly.
#[derive(Debug)]
pub struct Model {
    lattice: InternalLattice,
    omega: OmegaData,
    is_true: NatTrans,
    is_false: NatTrans,
    sig: Signature,
    budget: Budget,
}

impl Model {
    pub fn new(lattice: InternalLattice, budget: Budget) -> Result<Model> {
        let base = Arc::clone(lattice.carrier.base());
        let om = omega(&base, &budget)?;
        let top_sub = lattice.top_subobject()?;
        let bot_sub = lattice.bottom_subobject()?;
        let is_true = om.characteristic(&top_sub)?;
        let is_false = om.characteristic(&bot_sub)?;
        // The indicators must classify exactly the subobjects they were
        // built from; a mismatch would mean the classifier itself is broken.
        if om.classify(&is_true)? != top_sub {
            return Err(Error::ClauseDisagreement {
                what: "truth indicator".into(),
                details: "classifying the characteristic map of {1} does not return {1}".into(),
            });
        }
        if om.classify(&is_false)? != bot_sub {
            return Err(Error::ClauseDisagreement {
                what: "falsity indicator".into(),
                details: "classifying the characteristic map of {0} does not return {0}".into(),
            });
        }
        let mut sig = Signature::new(Arc::clone(&base), budget.clone());
        sig.add_type("J", lattice.carrier.clone())?;
        sig.add_type("Omega", om.object.clone())?;
        let j = TypeExpr::named("J");
        let jj = TypeExpr::prod(j.clone(), j.clone());
        sig.add_map("meet", jj.clone(), j.clone(), lattice.meet.clone())?;
        sig.add_map("join", jj, j.clone(), lattice.join.clone())?;
        sig.add_const("zero", j.clone(), lattice.bottom.clone())?;
        sig.add_const("one", j.clone(), lattice.top.clone())?;
        sig.add_sub("IsT", j.clone(), top_sub)?;
        sig.add_sub("IsF", j, bot_sub)?;
        Ok(Model {
            lattice,
            omega: om,
            is_true,
            is_false,
            sig,
            budget,
        })
    }

    /// The single-set model: the constant lattice over the one-object base.
    pub fn set_model(j: &FinDistLattice, budget: Budget) -> Result<Model> {
        let lattice =
            InternalLattice::constant(crate::fincat::terminal_category(), j, &budget)?;
        Model::new(lattice, budget)
    }

    /// A constant lattice over an arbitrary base category.
    pub fn constant(base: Arc<FinCategory>, j: &FinDistLattice, budget: Budget) -> Result<Model> {
        let lattice = InternalLattice::constant(base, j, &budget)?;
        Model::new(lattice, budget)
    }

    pub fn base(&self) -> &Arc<FinCategory> {
        self.lattice.carrier.base()
    }

    pub fn lattice(&self) -> &InternalLattice {
        &self.lattice
    }

    /// The interval carrier presheaf.
    pub fn interval(&self) -> &Presheaf {
        &self.lattice.carrier
    }

    pub fn omega(&self) -> &OmegaData {
        &self.omega
    }

    pub fn is_true(&self) -> &NatTrans {
        &self.is_true
    }

    pub fn is_false(&self) -> &NatTrans {
        &self.is_false
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    pub fn budget(&self) -> &Budget {
        &self.budget
    }

    /// The bottom point `0: 1 -> I`.
    pub fn zero(&self) -> &NatTrans {
        &self.lattice.bottom
    }

    /// The top point `1: 1 -> I`.
    pub fn one(&self) -> &NatTrans {
        &self.lattice.top
    }

    /// The truth extent of a generalized element `i: A -> I`: the subobject
    /// of `A` where `i` equals top.
    pub fn is_t_of(&self, i: &NatTrans) -> Result<Subobject> {
        self.lattice.top_subobject()?.preimage(i)
    }

    /// The falsity extent of a generalized element `i: A -> I`.
    pub fn is_f_of(&self, i: &NatTrans) -> Result<Subobject> {
        self.lattice.bottom_subobject()?.preimage(i)
    }
}

/// Flip an internal lattice upside down: meets and joins swap, as do the two
/// endpoints. Restrictions stay lattice homomorphisms, so the result
/// revalidates as an internal lattice and every construction applies
/// verbatim to the reversed interval.
pub fn dualize(lattice: &InternalLattice, budget: &Budget) -> Result<InternalLattice> {
    let stages = lattice
        .stages
        .iter()
        .map(|l| FinDistLattice {
            meet: l.join.clone(),
            join: l.meet.clone(),
            bottom: l.top,
            top: l.bottom,
        })
        .collect();
    InternalLattice::new(lattice.carrier.clone(), stages, budget)
}

/// Reindex an internal lattice along a category of elements: the carrier is
/// pulled back and each element object inherits the stage lattice of the
/// base object under it. This is how a model is transported to act on the
/// fibers of a family.
pub fn reindex_lattice(
    el: &ElCategory,
    lattice: &InternalLattice,
    budget: &Budget,
) -> Result<InternalLattice> {
    let carrier = crate::fincat::reindex_presheaf(el, &lattice.carrier)?;
    let stages = el
        .objects
        .iter()
        .map(|&(c, _)| lattice.stages[c].clone())
        .collect();
    InternalLattice::new(carrier, stages, budget)
}

/// The truth extent of the zero point, realized as a presheaf: empty in a
/// strict model, and one point at every stage where the lattice collapses.
/// Connectedness along this extent is the hypothesis of the cone-to-lift
/// comparisons.
pub fn zero_truth_extent(lattice: &InternalLattice) -> Result<Presheaf> {
    let sub = lattice.top_subobject()?.preimage(&lattice.bottom)?;
    Ok(sub.as_presheaf().0)
}

/// The extent of the generic element of the interval: the subterminal over
/// the category of elements of the carrier that holds exactly at the
/// elements equal to top. Its restriction stability is exactly "top is
/// preserved by restriction".
pub fn generic_truth_extent(el: &ElCategory, lattice: &InternalLattice) -> Result<Subobject> {
    let members = el
        .objects
        .iter()
        .map(|&(c, b)| vec![b == lattice.stages[c].top])
        .collect();
    Subobject::new(Presheaf::terminal(Arc::clone(&el.cat)), members)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fincat::arrow_category;
    use crate::kripke::{holds_globally, parse_formula};

    fn set3() -> Model {
        Model::set_model(&FinDistLattice::chain(3), Budget::default()).unwrap()
    }

    #[test]
    fn indicators_classify_the_endpoints() {
        let m = set3();
        let t = m.omega().classify(m.is_true()).unwrap();
        assert_eq!(t, m.lattice().top_subobject().unwrap());
        let f = m.omega().classify(m.is_false()).unwrap();
        assert_eq!(f, m.lattice().bottom_subobject().unwrap());
    }

    #[test]
    fn signature_symbols_are_usable_in_formulas() {
        let m = set3();
        let phi = parse_formula("forall i:J. meet(i, one) = i /\\ join(i, zero) = i").unwrap();
        assert!(holds_globally(m.signature(), &phi).unwrap().holds);
        let psi = parse_formula("IsT(one) /\\ IsF(zero)").unwrap();
        assert!(holds_globally(m.signature(), &psi).unwrap().holds);
    }

    #[test]
    fn truth_extent_of_the_endpoints() {
        let m = set3();
        assert_eq!(m.is_t_of(m.one()).unwrap().count(), 1);
        assert_eq!(m.is_t_of(m.zero()).unwrap().count(), 0);
        assert_eq!(m.is_f_of(m.zero()).unwrap().count(), 1);
    }

    #[test]
    fn dualizing_twice_restores_the_lattice() {
        let b = Budget::default();
        let m = set3();
        let dual = dualize(m.lattice(), &b).unwrap();
        assert_eq!(dual.stages[0].bottom, m.lattice().stages[0].top);
        assert!(dual.leq_at(0, 2, 0));
        let back = dualize(&dual, &b).unwrap();
        assert_eq!(back.stages[0].meet, m.lattice().stages[0].meet);
        assert_eq!(back.stages[0].bottom, m.lattice().stages[0].bottom);
    }

    #[test]
    fn models_build_over_nontrivial_bases() {
        let b = Budget::default();
        let base = arrow_category();
        let carrier = Presheaf::new(
            Arc::clone(&base),
            vec![2, 3],
            vec![vec![0, 1], vec![0, 1, 2], vec![0, 1, 1]],
        )
        .unwrap();
        let stages = vec![FinDistLattice::chain(2), FinDistLattice::chain(3)];
        let lattice = InternalLattice::new(carrier, stages, &b).unwrap();
        let m = Model::new(lattice, b).unwrap();
        // The dichotomy fails internally on this base (seen by forcing), but
        // the model itself is perfectly valid.
        assert_eq!(m.interval().stages(), &[2, 3]);
    }

    #[test]
    fn generic_truth_extent_is_stable() {
        let m = set3();
        let el = crate::fincat::elements_category(m.interval()).unwrap();
        let ext = generic_truth_extent(&el, m.lattice()).unwrap();
        // One element object per interval element; only the top one holds.
        assert_eq!(ext.count(), 1);
    }
}
