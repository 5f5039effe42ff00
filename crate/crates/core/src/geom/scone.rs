use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::fincat::{
    elements_category, is_iso, product, pullback, pushout, sigma as sum_family, ElCategory,
    NatTrans, Presheaf, Product, Pushout, SigmaTotal,
};
use crate::geom::model::{generic_truth_extent, reindex_lattice, Model};
use crate::geom::shapes::{horn, FiberedObject, HornData};
use crate::latdual::InternalLattice;

/// The cone `X_bot`: the pushout gluing the zero end of the cylinder
/// `I x X` to a point. Carries the inclusion of `X` at the top end, the
/// cone point, the contraction, and the projection back to the interval.
#[derive(Debug, Clone)]
pub struct SconeData {
    pub object: Presheaf,
    /// `X -> X_bot`, the inclusion at the top end.
    pub iota: NatTrans,
    /// `1 -> X_bot`, the cone point.
    pub bottom: NatTrans,
    /// `I x X -> X_bot`, the contraction of the cylinder onto the cone.
    pub gamma: NatTrans,
    /// `X_bot -> I`, sending the cone point to zero.
    pub pi: NatTrans,
    pub cyl: Product,
    pub po: Pushout,
}

/// Build the cone over any internal lattice (the interval of a model, or a
/// reindexed interval acting on the fibers of a family).
pub fn scone_over(
    lattice: &InternalLattice,
    x: &Presheaf,
    budget: &Budget,
) -> Result<SconeData> {
    let interval = &lattice.carrier;
    if !interval.same_base(x) {
        return Err(Error::BaseMismatch);
    }
    let cyl = product(interval, x, budget)?;
    let bang = NatTrans::to_terminal(x);
    let zero_leg = bang.then(&lattice.bottom)?;
    let ident = NatTrans::identity(x);
    let emb0 = cyl.mediate(&zero_leg, &ident)?;
    let po = pushout(&bang, &emb0, budget)?;
    let bottom = po.from_left.clone();
    let gamma = po.from_right.clone();
    let one_leg = bang.then(&lattice.top)?;
    let emb1 = cyl.mediate(&one_leg, &ident)?;
    let iota = emb1.then(&gamma)?;
    let pi = po.mediate(&lattice.bottom, &cyl.left)?;
    // The cone is the sum over the interval of the joins with the falsity
    // extents: over the zero element the fiber is a point, elsewhere it is a
    // copy of X. Check that description stagewise.
    let base = interval.base();
    for c in base.objects() {
        let bot = lattice.stages[c].bottom;
        let mut fiber_sizes = vec![0usize; interval.stage(c)];
        for e in 0..po.object.stage(c) {
            fiber_sizes[pi.apply(c, e)] += 1;
        }
        for (iv, &size) in fiber_sizes.iter().enumerate() {
            let expected = if iv == bot { 1 } else { x.stage(c) };
            if size != expected {
                return Err(Error::ClauseDisagreement {
                    what: "cone fiber description".into(),
                    details: format!(
                        "stage {c}, interval element {iv}: fiber has {size} elements, the join description gives {expected}"
                    ),
                });
            }
        }
    }
    Ok(SconeData {
        object: po.object.clone(),
        iota,
        bottom,
        gamma,
        pi,
        cyl,
        po,
    })
}

pub fn scone(m: &Model, x: &Presheaf) -> Result<SconeData> {
    scone_over(m.lattice(), x, m.budget())
}

/// For an object connected along the zero extent, the top-end inclusion
/// sits over `{1} -> I` as a pullback square. Returns the verdict of the
/// mediating-map test.
pub fn open_inclusion_is_pullback(
    lattice: &InternalLattice,
    x: &Presheaf,
    sc: &SconeData,
    budget: &Budget,
) -> Result<bool> {
    let (top_obj, top_incl, _) = lattice.top_subobject()?.as_presheaf();
    let pb = pullback(&sc.pi, &top_incl, budget)?;
    let base = x.base();
    let to_top = NatTrans::new(
        x.clone(),
        top_obj,
        base.objects().map(|c| vec![0; x.stage(c)]).collect(),
    )?;
    let med = pb.mediate(&sc.iota, &to_top)?;
    Ok(is_iso(&med))
}

/// The family of little cones: the sum over the generic interval element of
/// the cones on its truth extent, together with the verified identification
/// with the horn.
#[derive(Debug, Clone)]
pub struct SconeFamilyData {
    pub fibered: FiberedObject,
    pub el: ElCategory,
    /// The interval transported to the category of elements.
    pub lattice: InternalLattice,
    /// The generic little cone, one fiber per interval element.
    pub cones: SconeData,
    pub sigma: SigmaTotal,
    pub horn: HornData,
    /// The comparison pairing the projection with the fiberwise cone
    /// projection; verified invertible over the horn.
    pub to_horn: NatTrans,
}

fn iso_bug(details: String) -> Error {
    Error::IsoNotFound { details }
}

pub fn scone_family(m: &Model) -> Result<SconeFamilyData> {
    let el = elements_category(m.interval())?;
    let lattice = reindex_lattice(&el, m.lattice(), m.budget())?;
    let (extent, _, _) = generic_truth_extent(&el, m.lattice())?.as_presheaf();
    let cones = scone_over(&lattice, &extent, m.budget())?;
    let st = sum_family(&el, &cones.object)?;
    let h = horn(m)?;
    // The comparison sends a pair (i, cone element) to the triangle point
    // (i, fiberwise projection); by construction it lands in the horn.
    let base = m.base();
    let mut comps = Vec::with_capacity(base.object_count());
    for c in base.objects() {
        let mut col = Vec::with_capacity(st.total.stage(c));
        for &(bv, e) in &st.pairs[c] {
            let o = el.object_of(c, bv);
            let j = cones.pi.apply(o, e);
            let amb = h.simplex.ambient.index_of(c, &[bv, j]);
            let sp = h.simplex.positions[c][amb].ok_or_else(|| {
                iso_bug(format!(
                    "stage {c}: a little cone point projects outside the triangle"
                ))
            })?;
            let hp = h.positions[c][sp].ok_or_else(|| {
                iso_bug(format!(
                    "stage {c}: a little cone point projects outside the horn"
                ))
            })?;
            col.push(hp);
        }
        comps.push(col);
    }
    let to_horn = NatTrans::new(st.total.clone(), h.object.clone(), comps)
        .map_err(|e| iso_bug(format!("the horn comparison is not natural: {e}")))?;
    if !is_iso(&to_horn) {
        return Err(iso_bug(
            "the horn comparison is not stagewise invertible".into(),
        ));
    }
    // The identification lives over the interval: composing with the first
    // coordinate of the triangle must recover the family projection.
    let max_map = h
        .include
        .then(&h.simplex.include)?
        .then(&h.simplex.ambient.coords[0])?;
    if to_horn.then(&max_map)? != st.proj {
        return Err(iso_bug(
            "the horn comparison does not commute over the interval".into(),
        ));
    }
    let fibered = FiberedObject::new(st.total.clone(), st.proj.clone())?;
    Ok(SconeFamilyData {
        fibered,
        el,
        lattice,
        cones,
        sigma: st,
        horn: h,
        to_horn,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::latdual::FinDistLattice;
    use std::sync::Arc;

    fn set(n: usize) -> Model {
        Model::set_model(&FinDistLattice::chain(n), Budget::default()).unwrap()
    }

    fn arrow_model() -> Model {
        let b = Budget::default();
        let base = crate::fincat::arrow_category();
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
    fn the_cone_on_the_empty_object_is_a_point() {
        let m = set(2);
        let empty = Presheaf::initial(Arc::clone(m.base()));
        let sc = scone(&m, &empty).unwrap();
        assert_eq!(sc.object, Presheaf::terminal(Arc::clone(m.base())));
    }

    #[test]
    fn the_cone_on_a_point_is_the_interval() {
        for m in [set(2), set(3)] {
            let one = Presheaf::terminal(Arc::clone(m.base()));
            let sc = scone(&m, &one).unwrap();
            assert_eq!(sc.object, *m.interval());
            assert_eq!(sc.iota.then(&sc.pi).unwrap(), *m.one());
            assert_eq!(sc.bottom.then(&sc.pi).unwrap(), *m.zero());
        }
    }

    #[test]
    fn endpoint_equations_hold_for_every_cone() {
        let m = set(3);
        let x = Presheaf::constant(Arc::clone(m.base()), 2);
        let sc = scone(&m, &x).unwrap();
        let bang = NatTrans::to_terminal(&x);
        assert_eq!(sc.iota.then(&sc.pi).unwrap(), bang.then(m.one()).unwrap());
        assert_eq!(sc.bottom.then(&sc.pi).unwrap(), *m.zero());
        assert_eq!(sc.object.stages(), &[1 + 2 * 2]);
    }

    #[test]
    fn little_cones_over_the_three_chain_have_the_expected_sizes() {
        let m = set(3);
        let mid = NatTrans::new(
            Presheaf::terminal(Arc::clone(m.base())),
            m.interval().clone(),
            vec![vec![1]],
        )
        .unwrap();
        let ext_mid = m.is_t_of(&mid).unwrap().as_presheaf().0;
        assert_eq!(scone(&m, &ext_mid).unwrap().object.stages(), &[1]);
        let ext_top = m.is_t_of(m.one()).unwrap().as_presheaf().0;
        assert_eq!(scone(&m, &ext_top).unwrap().object.stages(), &[3]);
    }

    #[test]
    fn the_top_inclusion_is_a_pullback_of_the_top_point() {
        let m2 = set(2);
        let b = Budget::default();
        let two = Presheaf::constant(Arc::clone(m2.base()), 2);
        let sc2 = scone(&m2, &two).unwrap();
        assert!(open_inclusion_is_pullback(m2.lattice(), &two, &sc2, &b).unwrap());
        let m3 = set(3);
        let one = Presheaf::terminal(Arc::clone(m3.base()));
        let sc3 = scone(&m3, &one).unwrap();
        assert!(open_inclusion_is_pullback(m3.lattice(), &one, &sc3, &b).unwrap());
        let two3 = Presheaf::constant(Arc::clone(m3.base()), 2);
        let sc23 = scone(&m3, &two3).unwrap();
        assert!(open_inclusion_is_pullback(m3.lattice(), &two3, &sc23, &b).unwrap());
    }

    #[test]
    fn cones_build_over_the_arrow_base() {
        let m = arrow_model();
        let one = Presheaf::terminal(Arc::clone(m.base()));
        let sc = scone(&m, &one).unwrap();
        assert_eq!(sc.object.stages(), m.interval().stages());
        let b = Budget::default();
        assert!(open_inclusion_is_pullback(m.lattice(), &one, &sc, &b).unwrap());
    }

    #[test]
    fn the_cone_family_over_the_three_chain_matches_the_horn() {
        let m = set(3);
        let fam = scone_family(&m).unwrap();
        let sizes: Vec<usize> = (0..3)
            .map(|b| fam.sigma.pairs[0].iter().filter(|&&(bv, _)| bv == b).count())
            .collect();
        assert_eq!(sizes, vec![1, 1, 3]);
        assert_eq!(fam.fibered.total.stages(), &[5]);
        assert_eq!(fam.horn.object.stages(), &[5]);
    }

    #[test]
    fn the_cone_family_over_the_two_chain_fills_the_triangle() {
        let m = set(2);
        let fam = scone_family(&m).unwrap();
        assert_eq!(fam.fibered.total.stages(), &[3]);
        assert_eq!(fam.horn.simplex.object.stages(), &[3]);
    }

    #[test]
    fn the_fiber_over_the_top_point_is_the_whole_interval() {
        for m in [set(2), set(3), arrow_model()] {
            let fam = scone_family(&m).unwrap();
            let base = Arc::clone(m.base());
            for c in base.objects() {
                let top = m.lattice().stages[c].top;
                let fiber = fam.sigma.pairs[c]
                    .iter()
                    .filter(|&&(bv, _)| bv == top)
                    .count();
                assert_eq!(fiber, m.interval().stage(c));
            }
        }
    }

    #[test]
    fn the_cone_family_identification_holds_over_the_arrow_base() {
        let m = arrow_model();
        let fam = scone_family(&m).unwrap();
        assert_eq!(fam.fibered.total.stages(), fam.horn.object.stages());
    }
}
