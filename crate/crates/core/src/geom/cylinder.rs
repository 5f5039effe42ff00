use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::fincat::{
    elements_category, is_iso, product, pushout, reindex_fibered, sigma as sum_family, sigma_map,
    ElCategory, NatTrans, Presheaf, Product, Pushout, SigmaTotal,
};
use crate::geom::join::{is_p_connected, Connectedness};
use crate::geom::lift::{lift_over, sigma_over, LiftData, SigmaComparison};
use crate::geom::model::{reindex_lattice, zero_truth_extent, Model};
use crate::geom::scone::{scone_over, SconeData};
use crate::geom::shapes::FiberedObject;
use crate::latdual::InternalLattice;

/// The open display cylinder of a map `f: E -> B`: the pushout gluing the
/// zero end of `I x E` onto `B` along `f`. Identified, fiber by fiber, with
/// the sum of the cones on the fibers of `f`; the identification is
/// constructed and verified invertible.
#[derive(Debug, Clone)]
pub struct CylinderData {
    pub object: Presheaf,
    /// `B -> Cyl`.
    pub from_base: NatTrans,
    /// `I x E -> Cyl`.
    pub gamma: NatTrans,
    /// `E -> Cyl`, the inclusion at the top end.
    pub iota: NatTrans,
    pub po: Pushout,
    pub cyl_prod: Product,
    pub el: ElCategory,
    pub fiber_lattice: InternalLattice,
    /// The fibers of `f` as a presheaf on the category of elements of `B`.
    pub fiber_family: Presheaf,
    pub fibers: Vec<Vec<usize>>,
    /// The generic cone on the fiber.
    pub cones: SconeData,
    /// The sum of the little cones over the base.
    pub sigma: SigmaTotal,
    /// `Cyl -> sum of cones`, verified invertible.
    pub to_sum: NatTrans,
}

fn iso_bug(details: String) -> Error {
    Error::IsoNotFound { details }
}

pub fn open_cylinder(m: &Model, f: &NatTrans) -> Result<CylinderData> {
    let e = f.source();
    let b = f.target();
    if !e.same_base(m.interval()) {
        return Err(Error::BaseMismatch);
    }
    let cyl_prod = product(m.interval(), e, m.budget())?;
    let bang = NatTrans::to_terminal(e);
    let ident = NatTrans::identity(e);
    let emb0 = cyl_prod.mediate(&bang.then(m.zero())?, &ident)?;
    let po = pushout(f, &emb0, m.budget())?;
    let iota = cyl_prod
        .mediate(&bang.then(m.one())?, &ident)?
        .then(&po.from_right)?;
    // The same object, fiber by fiber: reindex the interval and the fibers
    // of f to the category of elements of B and take the generic cone.
    let el = elements_category(b)?;
    let fiber_lattice = reindex_lattice(&el, m.lattice(), m.budget())?;
    let (fiber_family, fibers) = reindex_fibered(&el, f)?;
    let cones = scone_over(&fiber_lattice, &fiber_family, m.budget())?;
    let st = sum_family(&el, &cones.object)?;
    let pos_in_fiber: Vec<HashMap<usize, usize>> = fibers
        .iter()
        .map(|fl| fl.iter().enumerate().map(|(i, &x)| (x, i)).collect())
        .collect();
    let base = m.base();
    // Cocone legs into the sum: the base lands on the cone points, the
    // cylinder contracts within its fiber.
    let u_comps: Vec<Vec<usize>> = base
        .objects()
        .map(|c| {
            (0..b.stage(c))
                .map(|b0| {
                    let o = el.object_of(c, b0);
                    st.index_of(c, b0, cones.bottom.apply(o, 0))
                })
                .collect()
        })
        .collect();
    let u = NatTrans::new(b.clone(), st.total.clone(), u_comps)
        .map_err(|err| iso_bug(format!("the cone-point leg is not natural: {err}")))?;
    let v_comps: Vec<Vec<usize>> = base
        .objects()
        .map(|c| {
            (0..cyl_prod.object.stage(c))
                .map(|p| {
                    let (iv, e0) = cyl_prod.unpair(c, p);
                    let b0 = f.apply(c, e0);
                    let o = el.object_of(c, b0);
                    let fp = pos_in_fiber[o][&e0];
                    let q = cones.cyl.pair_index(o, iv, fp);
                    st.index_of(c, b0, cones.gamma.apply(o, q))
                })
                .collect()
        })
        .collect();
    let v = NatTrans::new(cyl_prod.object.clone(), st.total.clone(), v_comps)
        .map_err(|err| iso_bug(format!("the contraction leg is not natural: {err}")))?;
    let to_sum = po
        .mediate(&u, &v)
        .map_err(|err| iso_bug(format!("the cylinder legs do not form a cocone: {err}")))?;
    if !is_iso(&to_sum) {
        return Err(iso_bug(
            "the cylinder does not match the sum of the fiber cones".into(),
        ));
    }
    Ok(CylinderData {
        object: po.object.clone(),
        from_base: po.from_left.clone(),
        gamma: po.from_right.clone(),
        iota,
        po,
        cyl_prod,
        el,
        fiber_lattice,
        fiber_family,
        fibers,
        cones,
        sigma: st,
        to_sum,
    })
}

/// The relative partial-map object of `f: E -> B`: the sum over `B` of the
/// partial-map objects of the fibers, with the fiberwise unit.
#[derive(Debug, Clone)]
pub struct RelativeLiftData {
    pub fibered: FiberedObject,
    pub el: ElCategory,
    pub fiber_lattice: InternalLattice,
    pub fiber_family: Presheaf,
    pub fibers: Vec<Vec<usize>>,
    /// The generic fiberwise partial-map object.
    pub lift: LiftData,
    pub sigma: SigmaTotal,
    /// `E -> total`, the fiberwise unit.
    pub eta: NatTrans,
}

pub fn relative_lift(m: &Model, f: &NatTrans) -> Result<RelativeLiftData> {
    let e = f.source();
    let b = f.target();
    if !e.same_base(m.interval()) {
        return Err(Error::BaseMismatch);
    }
    let el = elements_category(b)?;
    let fiber_lattice = reindex_lattice(&el, m.lattice(), m.budget())?;
    let (fiber_family, fibers) = reindex_fibered(&el, f)?;
    let ld = lift_over(&fiber_lattice, &fiber_family, m.budget())?;
    let st = sum_family(&el, &ld.object)?;
    let pos_in_fiber: Vec<HashMap<usize, usize>> = fibers
        .iter()
        .map(|fl| fl.iter().enumerate().map(|(i, &x)| (x, i)).collect())
        .collect();
    let base = m.base();
    let eta_comps: Vec<Vec<usize>> = base
        .objects()
        .map(|c| {
            (0..e.stage(c))
                .map(|e0| {
                    let b0 = f.apply(c, e0);
                    let o = el.object_of(c, b0);
                    let fp = pos_in_fiber[o][&e0];
                    st.index_of(c, b0, ld.eta.apply(o, fp))
                })
                .collect()
        })
        .collect();
    let eta = NatTrans::new(e.clone(), st.total.clone(), eta_comps)?;
    let fibered = FiberedObject::new(st.total.clone(), st.proj.clone())?;
    Ok(RelativeLiftData {
        fibered,
        el,
        fiber_lattice,
        fiber_family,
        fibers,
        lift: ld,
        sigma: st,
        eta,
    })
}

/// Connectedness of the fibers of `f` along the zero extent, decided once
/// over the category of elements of the target: the witness the fiberwise
/// comparison requires.
pub fn fiber_connectedness(m: &Model, f: &NatTrans) -> Result<Connectedness> {
    let el = elements_category(f.target())?;
    let lat = reindex_lattice(&el, m.lattice(), m.budget())?;
    let (fam, _) = reindex_fibered(&el, f)?;
    let p0 = zero_truth_extent(&lat)?;
    is_p_connected(&p0, &fam, m.budget())
}

/// The fiberwise cone-to-lift comparison of a map, summed over the base.
#[derive(Debug, Clone)]
pub struct SigmaFData {
    pub cylinder: CylinderData,
    pub relative: RelativeLiftData,
    /// The generic fiberwise comparison.
    pub comparison: SigmaComparison,
    /// `Cyl -> relative total`.
    pub map: NatTrans,
}

pub fn sigma_f(m: &Model, f: &NatTrans, witness: &Connectedness) -> Result<SigmaFData> {
    let cylinder = open_cylinder(m, f)?;
    let relative = relative_lift(m, f)?;
    let comparison = sigma_over(
        &cylinder.fiber_lattice,
        &cylinder.fiber_family,
        witness,
        m.budget(),
    )?;
    let summed = sigma_map(
        &cylinder.el,
        &comparison.map,
        &cylinder.sigma,
        &relative.sigma,
    )?;
    let map = cylinder.to_sum.then(&summed)?;
    Ok(SigmaFData {
        cylinder,
        relative,
        comparison,
        map,
    })
}
