use std::sync::Arc;

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::fincat::{
    elements_category, enum_nat_trans, exponential, reindex_presheaf, sigma as sum_family,
    ElCategory, ExpData, Family, NatTrans, Presheaf, SigmaTotal,
};
use crate::geom::join::Connectedness;
use crate::geom::model::{generic_truth_extent, zero_truth_extent, Model};
use crate::geom::scone::{scone_over, SconeData};
use crate::latdual::InternalLattice;

/// The partial-map object: the sum, over the generic interval element `i`,
/// of the sections of `X` defined on the truth extent of `i`. An element at
/// stage `c` is a pair of an interval element and a compatible family of
/// values of `X` along every arrow making that element true.
#[derive(Debug, Clone)]
pub struct LiftData {
    pub object: Presheaf,
    /// `X -> Lift X`: the everywhere-defined partial elements.
    pub eta: NatTrans,
    /// `Lift X -> I`: the extent-of-definition observation.
    pub pi: NatTrans,
    pub el: ElCategory,
    /// The generic truth extent over the category of elements.
    pub extent: Presheaf,
    /// The generic section space `X^extent`.
    pub exp: ExpData,
    pub sigma: SigmaTotal,
    pub x: Presheaf,
}

/// Build the partial-map object over any internal lattice.
pub fn lift_over(lattice: &InternalLattice, x: &Presheaf, budget: &Budget) -> Result<LiftData> {
    let interval = &lattice.carrier;
    if !interval.same_base(x) {
        return Err(Error::BaseMismatch);
    }
    let el = elements_category(interval)?;
    let (extent, _, _) = generic_truth_extent(&el, lattice)?.as_presheaf();
    let xt = reindex_presheaf(&el, x)?;
    let exp = exponential(&extent, &xt, budget)?;
    let st = sum_family(&el, &exp.object)?;
    let base = interval.base();
    let mut comps = Vec::with_capacity(base.object_count());
    for c in base.objects() {
        let top = lattice.stages[c].top;
        let o = el.object_of(c, top);
        let arrows = el.cat.arrows_into(o).to_vec();
        let mut col = Vec::with_capacity(x.stage(c));
        for x0 in 0..x.stage(c) {
            // Top restricts to top along every arrow, so the extent is full
            // and the tautological section just restricts the element.
            let fam: Family = arrows
                .iter()
                .map(|&em| vec![x.act(el.morphisms[em].0, x0)])
                .collect();
            let e = exp.index_of(o, &fam).ok_or_else(|| Error::ClauseDisagreement {
                what: "total section".into(),
                details: format!(
                    "stage {c}: the tautological section of element {x0} is not a listed family"
                ),
            })?;
            col.push(st.index_of(c, top, e));
        }
        comps.push(col);
    }
    let eta = NatTrans::new(x.clone(), st.total.clone(), comps)?;
    Ok(LiftData {
        object: st.total.clone(),
        eta,
        pi: st.proj.clone(),
        el,
        extent,
        exp,
        sigma: st,
        x: x.clone(),
    })
}

pub fn lift(m: &Model, x: &Presheaf) -> Result<LiftData> {
    lift_over(m.lattice(), x, m.budget())
}

/// Classify a cloven open-partial map into `X`: given the chosen
/// observation `phi: A -> I` and a map `f` from the realized truth extent
/// of `phi` into `X`, produce the map `A -> Lift X` restricting to `eta . f`
/// over the extent and projecting back to `phi`. The universal property is
/// then checked exhaustively: among all maps `A -> Lift X` within budget,
/// exactly this one makes both squares commute. Returns the map and the
/// number of candidates inspected.
pub fn classify_open_partial(
    lattice: &InternalLattice,
    ld: &LiftData,
    phi: &NatTrans,
    f: &NatTrans,
    budget: &Budget,
) -> Result<(NatTrans, usize)> {
    if phi.target() != &lattice.carrier {
        return Err(Error::TargetMismatch {
            details: "the classifying observation must land in the interval".into(),
        });
    }
    let a = phi.source();
    let u_sub = lattice.top_subobject()?.preimage(phi)?;
    let (u_obj, u_incl, u_pos) = u_sub.as_presheaf();
    if f.source() != &u_obj {
        return Err(Error::SourceMismatch {
            details: "the partial map must start at the realized truth extent of its observation"
                .into(),
        });
    }
    if f.target() != &ld.x {
        return Err(Error::TargetMismatch {
            details: "the partial map must land in the object being lifted".into(),
        });
    }
    let base = a.base();
    let parent = &ld.el.parent;
    let mut comps = Vec::with_capacity(base.object_count());
    for c in base.objects() {
        let mut col = Vec::with_capacity(a.stage(c));
        for a0 in 0..a.stage(c) {
            let iv = phi.apply(c, a0);
            let o = ld.el.object_of(c, iv);
            let fam: Family = ld
                .el
                .cat
                .arrows_into(o)
                .iter()
                .map(|&em| {
                    let mb = ld.el.morphisms[em].0;
                    let d = base.src(mb);
                    if parent.act(mb, iv) == lattice.stages[d].top {
                        let am = a.act(mb, a0);
                        let up = u_pos[d][am]
                            .expect("a restriction with true observation lies in the extent");
                        vec![f.apply(d, up)]
                    } else {
                        Vec::new()
                    }
                })
                .collect();
            let e = ld.exp.index_of(o, &fam).ok_or_else(|| Error::ClauseDisagreement {
                what: "open-partial classification".into(),
                details: format!(
                    "stage {c}: the induced section of element {a0} is not a listed family"
                ),
            })?;
            col.push(ld.sigma.index_of(c, iv, e));
        }
        comps.push(col);
    }
    let h = NatTrans::new(a.clone(), ld.object.clone(), comps)?;
    let squares_commute = |k: &NatTrans| -> Result<bool> {
        Ok(&k.then(&ld.pi)? == phi && u_incl.then(k)? == f.then(&ld.eta)?)
    };
    if !squares_commute(&h)? {
        return Err(Error::ClauseDisagreement {
            what: "open-partial classification".into(),
            details: "the induced map does not make both squares commute".into(),
        });
    }
    let candidates = enum_nat_trans(a, &ld.object, budget)?;
    let total = candidates.len();
    let mut matches = 0usize;
    for k in &candidates {
        if squares_commute(k)? {
            if *k != h {
                return Err(Error::ClauseDisagreement {
                    what: "open-partial classification".into(),
                    details: "a different map also makes both squares commute".into(),
                });
            }
            matches += 1;
        }
    }
    if matches != 1 {
        return Err(Error::ClauseDisagreement {
            what: "open-partial classification".into(),
            details: format!("{matches} maps make both squares commute; exactly one must"),
        });
    }
    Ok((h, total))
}

/// The comparison from the cone to the partial-map object, built twice and
/// compared: once through the pushout property of the cone (out of the
/// undefined point and the interpolation), once through the classifying
/// property of the lift.
#[derive(Debug, Clone)]
pub struct SigmaComparison {
    pub scone: SconeData,
    pub lift: LiftData,
    /// `1 -> Lift X`: the nowhere-defined partial element.
    pub undef: NatTrans,
    /// `I x X -> Lift X`: interpolation, restricting an element to an extent.
    pub glue: NatTrans,
    /// `X_bot -> Lift X`.
    pub map: NatTrans,
}

/// Build the comparison over any internal lattice. Requires a connectedness
/// witness along the zero extent: without it the undefined point has no
/// canonical section, and the construction refuses.
pub fn sigma_over(
    lattice: &InternalLattice,
    x: &Presheaf,
    witness: &Connectedness,
    budget: &Budget,
) -> Result<SigmaComparison> {
    let p0 = zero_truth_extent(lattice)?;
    if witness.x != *x || witness.p != p0 {
        return Err(Error::NotConnected {
            details: "the witness does not certify this object along the zero extent".into(),
        });
    }
    if !witness.connected {
        return Err(Error::NotConnected {
            details: "the object is not connected along the zero extent".into(),
        });
    }
    let sc = scone_over(lattice, x, budget)?;
    let ld = lift_over(lattice, x, budget)?;
    let base = lattice.carrier.base();
    let parent = &ld.el.parent;
    // The undefined point: the zero of the interval with its unique section
    // over the zero extent. Uniqueness is exactly the connectedness of X.
    let mut undef_comps = Vec::with_capacity(base.object_count());
    for c in base.objects() {
        let bot = lattice.stages[c].bottom;
        let o = ld.el.object_of(c, bot);
        let sections = ld.exp.object.stage(o);
        if sections != 1 {
            return Err(Error::ClauseDisagreement {
                what: "undefined point".into(),
                details: format!(
                    "stage {c}: {sections} sections over the zero extent; connectedness promises exactly one"
                ),
            });
        }
        undef_comps.push(vec![ld.sigma.index_of(c, bot, 0)]);
    }
    let undef = NatTrans::new(
        Presheaf::terminal(Arc::clone(base)),
        ld.object.clone(),
        undef_comps,
    )?;
    // Interpolation: an element together with an extent restricts to a
    // partial element defined on that extent.
    let mut glue_comps = Vec::with_capacity(base.object_count());
    for c in base.objects() {
        let mut col = Vec::with_capacity(sc.cyl.object.stage(c));
        for p in 0..sc.cyl.object.stage(c) {
            let (iv, x0) = sc.cyl.unpair(c, p);
            let o = ld.el.object_of(c, iv);
            let fam: Family = ld
                .el
                .cat
                .arrows_into(o)
                .iter()
                .map(|&em| {
                    let mb = ld.el.morphisms[em].0;
                    let d = base.src(mb);
                    if parent.act(mb, iv) == lattice.stages[d].top {
                        vec![x.act(mb, x0)]
                    } else {
                        Vec::new()
                    }
                })
                .collect();
            let e = ld.exp.index_of(o, &fam).ok_or_else(|| Error::ClauseDisagreement {
                what: "interpolation".into(),
                details: format!("stage {c}: a restricted section is not a listed family"),
            })?;
            col.push(ld.sigma.index_of(c, iv, e));
        }
        glue_comps.push(col);
    }
    let glue = NatTrans::new(sc.cyl.object.clone(), ld.object.clone(), glue_comps)?;
    let map = sc.po.mediate(&undef, &glue).map_err(|e| Error::ClauseDisagreement {
        what: "cone comparison".into(),
        details: format!("the undefined point and the interpolation do not form a cocone: {e}"),
    })?;
    // Second route: classify the open-partial map carried by the cone
    // itself — its projection as the observation, undoing the top-end
    // inclusion over the extent.
    let u_sub = lattice.top_subobject()?.preimage(&sc.pi)?;
    let (u_obj, u_incl, _) = u_sub.as_presheaf();
    let mut f_comps = Vec::with_capacity(base.object_count());
    for c in base.objects() {
        let mut back = vec![None; sc.object.stage(c)];
        for x0 in 0..x.stage(c) {
            back[sc.iota.apply(c, x0)] = Some(x0);
        }
        let mut col = Vec::with_capacity(u_obj.stage(c));
        for u0 in 0..u_obj.stage(c) {
            let amb = u_incl.apply(c, u0);
            match back[amb] {
                Some(x0) => col.push(x0),
                None => {
                    // Only possible where the lattice collapses; then X is a
                    // point there by connectedness.
                    if x.stage(c) != 1 {
                        return Err(Error::ClauseDisagreement {
                            what: "cone comparison".into(),
                            details: format!(
                                "stage {c}: a true-extent cone point misses the top-end inclusion"
                            ),
                        });
                    }
                    col.push(0);
                }
            }
        }
        f_comps.push(col);
    }
    let f = NatTrans::new(u_obj, x.clone(), f_comps)?;
    let (via_classifier, _) = classify_open_partial(lattice, &ld, &sc.pi, &f, budget)?;
    if via_classifier != map {
        return Err(Error::ClauseDisagreement {
            what: "cone comparison".into(),
            details: "the pushout route and the classifier route disagree".into(),
        });
    }
    Ok(SigmaComparison {
        scone: sc,
        lift: ld,
        undef,
        glue,
        map,
    })
}

pub fn sigma(m: &Model, x: &Presheaf, witness: &Connectedness) -> Result<SigmaComparison> {
    sigma_over(m.lattice(), x, witness, m.budget())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fincat::is_iso;
    use crate::geom::join::is_p_connected;
    use crate::latdual::FinDistLattice;

    fn set(n: usize) -> Model {
        Model::set_model(&FinDistLattice::chain(n), Budget::default()).unwrap()
    }

    fn zero_witness(m: &Model, x: &Presheaf) -> Connectedness {
        let p = zero_truth_extent(m.lattice()).unwrap();
        is_p_connected(&p, x, m.budget()).unwrap()
    }

    #[test]
    fn the_lift_of_the_empty_object_is_the_undefined_point_alone() {
        let m = set(2);
        let empty = Presheaf::initial(Arc::clone(m.base()));
        let ld = lift(&m, &empty).unwrap();
        assert_eq!(ld.object.stages(), &[1]);
        assert_eq!(ld.pi.apply(0, 0), 0);
    }

    #[test]
    fn the_lift_of_a_point_is_the_interval() {
        for m in [set(2), set(3)] {
            let one = Presheaf::terminal(Arc::clone(m.base()));
            let ld = lift(&m, &one).unwrap();
            assert_eq!(ld.object.stages(), m.interval().stages());
            assert!(is_iso(&ld.pi));
            // The unit lands over the top point.
            let bang = NatTrans::to_terminal(&one);
            assert_eq!(ld.eta.then(&ld.pi).unwrap(), bang.then(m.one()).unwrap());
        }
    }

    #[test]
    fn lifting_the_zero_extent_counts_the_nontop_elements() {
        // Over the 3-chain the zero extent is empty, and a section into the
        // empty object exists exactly where the extent of definition is
        // empty: at 0 and at the middle element. The lower set of 0 has one
        // element, so the two sizes differ — the conservativity failure in
        // its partial-map guise.
        let m = set(3);
        let x = zero_truth_extent(m.lattice()).unwrap();
        assert_eq!(x.stages(), &[0]);
        let ld = lift(&m, &x).unwrap();
        assert_eq!(ld.object.stages(), &[2]);
        let lower_set_of_zero = (0..3)
            .filter(|&j| m.lattice().leq_at(0, j, m.lattice().stages[0].bottom))
            .count();
        assert_eq!(lower_set_of_zero, 1);
        assert_ne!(ld.object.stage(0), lower_set_of_zero);
    }

    #[test]
    fn over_the_two_chain_lifted_extents_match_lower_sets() {
        // The 2-chain model is conservative, and there the partial-map
        // object of a point's truth extent has exactly the size of the
        // point's lower set.
        let m = set(2);
        for point in [m.zero(), m.one()] {
            let ext = m.is_t_of(point).unwrap().as_presheaf().0;
            let ld = lift(&m, &ext).unwrap();
            let lower = (0..2)
                .filter(|&j| m.lattice().leq_at(0, j, point.apply(0, 0)))
                .count();
            assert_eq!(ld.object.stage(0), lower);
        }
    }

    #[test]
    fn eta_is_monic_and_projects_to_the_top() {
        let m = set(3);
        let x = Presheaf::constant(Arc::clone(m.base()), 2);
        let ld = lift(&m, &x).unwrap();
        // Extent sizes: sections exist over 0 and m only (empty extents) and
        // two total sections over 1.
        assert_eq!(ld.object.stages(), &[4]);
        assert!(crate::fincat::is_mono(&ld.eta));
        for x0 in 0..2 {
            let v = ld.eta.apply(0, x0);
            assert_eq!(ld.pi.apply(0, v), 2);
        }
    }

    #[test]
    fn classification_is_unique_for_the_identity_observation() {
        for m in [set(2), set(3)] {
            let one = Presheaf::terminal(Arc::clone(m.base()));
            let ld = lift(&m, &one).unwrap();
            let phi = NatTrans::identity(m.interval());
            let u = m.lattice().top_subobject().unwrap().preimage(&phi).unwrap();
            let (u_obj, _, _) = u.as_presheaf();
            let f = NatTrans::to_terminal(&u_obj);
            let (h, checked) =
                classify_open_partial(m.lattice(), &ld, &phi, &f, m.budget()).unwrap();
            assert!(checked >= 1);
            assert!(is_iso(&h), "the interval classifies its own top extent");
        }
    }

    #[test]
    fn the_cone_comparison_is_invertible_on_points() {
        for m in [set(2), set(3)] {
            let one = Presheaf::terminal(Arc::clone(m.base()));
            let w = zero_witness(&m, &one);
            let cmp = sigma(&m, &one, &w).unwrap();
            assert!(is_iso(&cmp.map));
            assert_eq!(cmp.map.source().stages(), m.interval().stages());
        }
    }

    #[test]
    fn the_cone_comparison_is_invertible_on_the_empty_object() {
        let m = set(2);
        let empty = Presheaf::initial(Arc::clone(m.base()));
        let w = zero_witness(&m, &empty);
        let cmp = sigma(&m, &empty, &w).unwrap();
        assert!(is_iso(&cmp.map));
        assert_eq!(cmp.map.target().stages(), &[1]);
    }

    #[test]
    fn the_cone_comparison_exists_for_a_two_point_fiber() {
        let m = set(2);
        let two = Presheaf::constant(Arc::clone(m.base()), 2);
        let w = zero_witness(&m, &two);
        let cmp = sigma(&m, &two, &w).unwrap();
        // Both sides have three elements over the 2-chain and the
        // comparison happens to be invertible there.
        assert_eq!(cmp.scone.object.stages(), &[3]);
        assert_eq!(cmp.lift.object.stages(), &[3]);
        assert!(is_iso(&cmp.map));
    }

    #[test]
    fn a_failed_witness_refuses() {
        let m = set(2);
        let two = Presheaf::constant(Arc::clone(m.base()), 2);
        // Misuse: a witness for the full subterminal, not the zero extent.
        let one = Presheaf::terminal(Arc::clone(m.base()));
        let w = is_p_connected(&one, &two, m.budget()).unwrap();
        let err = sigma(&m, &two, &w).unwrap_err();
        assert!(matches!(err, Error::NotConnected { .. }));
    }
}
