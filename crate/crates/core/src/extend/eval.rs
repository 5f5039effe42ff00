//! The tautological point of each little partial-map object, the diagonal
//! pairing a partial element with the tautological point at its own extent,
//! and the two evaluation maps that connect the open mapping cylinder and
//! the relative partial-map object of the unit back to the cone and the
//! partial-map object. The construction verifies on every instance that the
//! evaluation square commutes and that the diagonal is a section of the
//! lower evaluation.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fincat::{elements_category, ElCategory, Family, NatTrans, ObjId, Presheaf};
use crate::geom::{
    fiber_connectedness, generic_truth_extent, lift_over, reindex_lattice, sigma, sigma_f,
    Connectedness, LiftData, Model, SigmaComparison, SigmaFData,
};

/// The tautological partial element at extent `i`, living at stage `c` of
/// the base of `ld`: the pair of `i` itself with the section that, wherever
/// `i` has become true, picks the single value available there. Only
/// meaningful when truth of the extent pins the value uniquely — as it does
/// for the generic truth extent and for the fibers of the unit — and the
/// construction fails loudly otherwise.
pub fn generic_element(ld: &LiftData, c: ObjId, i: usize) -> Result<usize> {
    let o2 = ld.el.object_of(c, i);
    let fam: Family = ld
        .el
        .cat
        .arrows_into(o2)
        .iter()
        .map(|&em| {
            let src = ld.el.cat.src(em);
            if ld.extent.stage(src) == 1 {
                vec![0]
            } else {
                Vec::new()
            }
        })
        .collect();
    let e = ld.exp.index_of(o2, &fam).ok_or_else(|| Error::ClauseDisagreement {
        what: "tautological point".into(),
        details: format!(
            "stage {c}: the tautological section at extent {i} is not a listed family"
        ),
    })?;
    Ok(ld.sigma.index_of(c, i, e))
}

/// The family of tautological points of the little partial-map objects,
/// assembled over the elements of the interval: a global point of the
/// partial-map object of the generic truth extent, natural in the interval
/// element.
#[derive(Debug)]
pub struct GenericPoints {
    /// The elements category of the interval.
    pub el: ElCategory,
    /// The partial-map object of the generic truth extent over `el`.
    pub lift: LiftData,
    /// `1 -> Lift(extent)` over `el`: the tautological point at each
    /// interval element.
    pub point: NatTrans,
}

impl GenericPoints {
    /// The tautological point over interval element `i` at base stage `c`.
    pub fn at(&self, c: ObjId, i: usize) -> usize {
        self.point.apply(self.el.object_of(c, i), 0)
    }
}

pub fn generic_points(m: &Model) -> Result<GenericPoints> {
    let el = elements_category(m.interval())?;
    let lattice = reindex_lattice(&el, m.lattice(), m.budget())?;
    let (extent, _, _) = generic_truth_extent(&el, m.lattice())?.as_presheaf();
    let lift = lift_over(&lattice, &extent, m.budget())?;
    let mut comps = Vec::with_capacity(el.cat.object_count());
    for o in el.cat.objects() {
        let (_, i) = el.objects[o];
        comps.push(vec![generic_element(&lift, o, i)?]);
    }
    let point = NatTrans::new(
        Presheaf::terminal(Arc::clone(&el.cat)),
        lift.object.clone(),
        comps,
    )?;
    Ok(GenericPoints { el, lift, point })
}

/// The evaluation square of an object `x` connected along the zero extent.
///
/// The family of truth extents of partial elements of `x` is exactly the
/// family of fibers of the unit `x -> Lift x`, so its summed cone is the
/// open mapping cylinder of the unit and its summed partial-map object is
/// the relative one. The upper evaluation sends the little cone on the
/// fiber over a partial element to the cone on `x`; the lower evaluation
/// composes a partial element of a partial element into a single partial
/// element. The square against the two comparison maps commutes, and the
/// diagonal — pairing a partial element with the tautological point at its
/// extent — is a verified section of the lower evaluation.
#[derive(Debug)]
pub struct EvalData {
    /// The comparison `X_bot -> Lift X` with its cone and partial-map data.
    pub comparison: SigmaComparison,
    /// The cylinder-to-relative-lift inclusion of the unit, fiberwise.
    pub inclusion: SigmaFData,
    /// `Cyl(unit) -> X_bot`: the upper evaluation.
    pub eval_cone: NatTrans,
    /// `relative total -> Lift X`: the lower evaluation.
    pub eval_lift: NatTrans,
    /// `Lift X -> relative total`: the section by tautological points.
    pub diagonal: NatTrans,
}

pub fn eval_maps(m: &Model, witness: &Connectedness) -> Result<EvalData> {
    let x = &witness.x;
    let comparison = sigma(m, x, witness)?;
    let eta_witness = fiber_connectedness(m, &comparison.lift.eta)?;
    let inclusion = sigma_f(m, &comparison.lift.eta, &eta_witness)?;
    let base = m.base();
    let ld = &comparison.lift;
    let sc = &comparison.scone;

    // Upper evaluation, by the colimit description of the cylinder: cone
    // points of every fiber land on the cone point of `x`, and the cylinder
    // part of the fiber over a totally defined element is the cylinder on
    // its value.
    let bottom_leg = NatTrans::to_terminal(&ld.object).then(&sc.bottom)?;
    let prod = &inclusion.cylinder.cyl_prod;
    let mut comps = Vec::with_capacity(base.object_count());
    for c in base.objects() {
        let mut col = Vec::with_capacity(prod.object.stage(c));
        for p in 0..prod.object.stage(c) {
            let (iv, x0) = prod.unpair(c, p);
            col.push(sc.gamma.apply(c, sc.cyl.pair_index(c, iv, x0)));
        }
        comps.push(col);
    }
    let cyl_leg = NatTrans::new(prod.object.clone(), sc.object.clone(), comps)?;
    let eval_cone = inclusion.cylinder.po.mediate(&bottom_leg, &cyl_leg)?;

    // Lower evaluation, by an element chase: a partial element of the
    // fiber family over a partial element `u` has an extent `j` and, along
    // every arrow making `j` true, picks the fiber point over the
    // restriction of `u` — which is then totally defined, so it carries a
    // value of `x`. The composite is the partial element of `x` with
    // extent `j` and those values.
    let rel = &inclusion.relative;
    let rl = &rel.lift;
    let mut comps = Vec::with_capacity(base.object_count());
    for c in base.objects() {
        let mut col = Vec::with_capacity(rel.sigma.total.stage(c));
        for t in 0..rel.sigma.total.stage(c) {
            let (u, v) = rel.sigma.pairs[c][t];
            let o_l = rel.el.object_of(c, u);
            let (j, e2) = rl.sigma.pairs[o_l][v];
            let o2 = rl.el.object_of(o_l, j);
            let section = &rl.exp.families[o2][e2];
            let o_main = ld.el.object_of(c, j);
            let arrows = ld.el.cat.arrows_into(o_main);
            let mut fam: Family = Vec::with_capacity(arrows.len());
            for &em in arrows {
                let g = ld.el.morphisms[em].0;
                let d = base.src(g);
                if m.interval().act(g, j) != m.lattice().stages[d].top {
                    fam.push(Vec::new());
                    continue;
                }
                let a_l = rel.el.morphism_of(g, u);
                let e2m = rl.el.morphism_of(a_l, j);
                let cell = &section[rl.el.cat.arrow_pos(e2m)];
                if cell.len() != 1 {
                    return Err(Error::ClauseDisagreement {
                        what: "lower evaluation".into(),
                        details: format!(
                            "stage {c}: a section is undefined where its extent is true"
                        ),
                    });
                }
                let o_lm = rel.el.object_of(d, ld.object.act(g, u));
                fam.push(vec![rel.fibers[o_lm][cell[0]]]);
            }
            let e = ld.exp.index_of(o_main, &fam).ok_or_else(|| Error::ClauseDisagreement {
                what: "lower evaluation".into(),
                details: format!("stage {c}: a composite section is not a listed family"),
            })?;
            col.push(ld.sigma.index_of(c, j, e));
        }
        comps.push(col);
    }
    let eval_lift = NatTrans::new(rel.sigma.total.clone(), ld.object.clone(), comps)?;

    // The diagonal: a partial element paired with the tautological point at
    // its own extent.
    let mut comps = Vec::with_capacity(base.object_count());
    for c in base.objects() {
        let mut col = Vec::with_capacity(ld.object.stage(c));
        for u in 0..ld.object.stage(c) {
            let o_l = rel.el.object_of(c, u);
            let v = generic_element(rl, o_l, ld.pi.apply(c, u))?;
            col.push(rel.sigma.index_of(c, u, v));
        }
        comps.push(col);
    }
    let diagonal = NatTrans::new(ld.object.clone(), rel.sigma.total.clone(), comps)?;

    if eval_cone.then(&comparison.map)? != inclusion.map.then(&eval_lift)? {
        return Err(Error::ClauseDisagreement {
            what: "evaluation square".into(),
            details: "the two composites around the evaluation square differ".into(),
        });
    }
    if diagonal.then(&eval_lift)? != NatTrans::identity(&ld.object) {
        return Err(Error::ClauseDisagreement {
            what: "diagonal section".into(),
            details: "evaluating the tautological point does not give back the element".into(),
        });
    }
    if diagonal.then(&rel.sigma.proj)? != NatTrans::identity(&ld.object) {
        return Err(Error::ClauseDisagreement {
            what: "diagonal section".into(),
            details: "the diagonal does not sit over the identity".into(),
        });
    }

    Ok(EvalData {
        comparison,
        inclusion,
        eval_cone,
        eval_lift,
        diagonal,
    })
}
