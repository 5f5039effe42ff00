use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fincat::category::{FinCategory, MorId, ObjId};
use crate::fincat::presheaf::{NatTrans, Presheaf};

/// The category of elements of a presheaf `B`. Objects are pairs `(c, b)`
/// with `b` a stage element of `B(c)`; a morphism `(d, b') -> (c, b)` is a
/// base morphism `m: d -> c` with `b . m = b'`. Presheaves on it are the
/// same thing as objects fibered over `B`, and both directions of that
/// equivalence are provided.
#[derive(Debug, Clone)]
pub struct ElCategory {
    pub cat: Arc<FinCategory>,
    pub parent: Presheaf,
    /// objects[o] = (c, b), sorted by (c, b).
    pub objects: Vec<(ObjId, usize)>,
    obj_index: HashMap<(ObjId, usize), usize>,
    /// morphisms[e] = (m, b) with b at the target stage of m, sorted.
    pub morphisms: Vec<(MorId, usize)>,
    mor_index: HashMap<(MorId, usize), usize>,
}

impl ElCategory {
    pub fn object_of(&self, c: ObjId, b: usize) -> usize {
        self.obj_index[&(c, b)]
    }

    pub fn morphism_of(&self, m: MorId, b: usize) -> usize {
        self.mor_index[&(m, b)]
    }
}

pub fn elements_category(b: &Presheaf) -> Result<ElCategory> {
    let base = b.base();
    let mut objects = Vec::new();
    for c in base.objects() {
        for x in 0..b.stage(c) {
            objects.push((c, x));
        }
    }
    let obj_index: HashMap<(ObjId, usize), usize> = objects
        .iter()
        .enumerate()
        .map(|(i, &o)| (o, i))
        .collect();
    let mut morphisms = Vec::new();
    for m in base.morphisms() {
        for x in 0..b.stage(base.tgt(m)) {
            morphisms.push((m, x));
        }
    }
    let mor_index: HashMap<(MorId, usize), usize> = morphisms
        .iter()
        .enumerate()
        .map(|(i, &e)| (e, i))
        .collect();
    let arrows: Vec<(ObjId, ObjId)> = morphisms
        .iter()
        .map(|&(m, x)| {
            (
                obj_index[&(base.src(m), b.act(m, x))],
                obj_index[&(base.tgt(m), x)],
            )
        })
        .collect();
    let identity: Vec<MorId> = objects
        .iter()
        .map(|&(c, x)| mor_index[&(base.identity(c), x)])
        .collect();
    let mut entries = Vec::new();
    for (fi, &(f, xf)) in morphisms.iter().enumerate() {
        for (gi, &(g, xg)) in morphisms.iter().enumerate() {
            // g . f in the element category: f: (src f, xf . f) -> (tgt f, xf),
            // g: (src g, xg . g) -> (tgt g, xg); composable when tgt f matches
            // src g as element objects.
            if base.tgt(f) == base.src(g) && xf == b.act(g, xg) {
                let gf = base.compose(g, f).expect("composable in base");
                entries.push((fi, gi, mor_index[&(gf, xg)]));
            }
        }
    }
    let cat = FinCategory::new(objects.len(), &arrows, &identity, &entries)?;
    Ok(ElCategory {
        cat,
        parent: b.clone(),
        objects,
        obj_index,
        morphisms,
        mor_index,
    })
}

/// Pull a presheaf on the base back to the category of elements (the
/// constant-family reindexing along the projection).
pub fn reindex_presheaf(el: &ElCategory, p: &Presheaf) -> Result<Presheaf> {
    if !el.parent.same_base(p) {
        return Err(Error::BaseMismatch);
    }
    let stages: Vec<usize> = el.objects.iter().map(|&(c, _)| p.stage(c)).collect();
    let act: Vec<Vec<usize>> = el
        .morphisms
        .iter()
        .map(|&(m, _)| p.act_table(m).to_vec())
        .collect();
    Presheaf::new(Arc::clone(&el.cat), stages, act)
}

/// Pull a map on the base back to the category of elements, componentwise.
pub fn reindex_map(el: &ElCategory, f: &NatTrans) -> Result<NatTrans> {
    let src = reindex_presheaf(el, f.source())?;
    let tgt = reindex_presheaf(el, f.target())?;
    let comps: Vec<Vec<usize>> = el
        .objects
        .iter()
        .map(|&(c, _)| f.component(c).to_vec())
        .collect();
    NatTrans::new(src, tgt, comps)
}

/// Turn an object fibered over `B` (a map `q: E -> B`) into a presheaf on the
/// category of elements of `B`: the stage at `(c, b)` is the fiber of `q`
/// over `b`, in ambient order. Also returns the fiber element tables
/// (`fibers[o]` lists the `E(c)` elements in fiber order).
pub fn reindex_fibered(el: &ElCategory, q: &NatTrans) -> Result<(Presheaf, Vec<Vec<usize>>)> {
    if q.target() != &el.parent {
        return Err(Error::TargetMismatch {
            details: "fibered reindexing expects a map into the element category's parent".into(),
        });
    }
    let e = q.source();
    let base = e.base();
    let mut fibers: Vec<Vec<usize>> = vec![Vec::new(); el.objects.len()];
    // Ambient order within each fiber keeps the numbering canonical.
    for c in base.objects() {
        for x in 0..e.stage(c) {
            fibers[el.object_of(c, q.apply(c, x))].push(x);
        }
    }
    let mut pos_in_fiber: Vec<HashMap<usize, usize>> = Vec::with_capacity(fibers.len());
    for f in &fibers {
        pos_in_fiber.push(f.iter().enumerate().map(|(i, &x)| (x, i)).collect());
    }
    let stages: Vec<usize> = fibers.iter().map(|f| f.len()).collect();
    let act: Vec<Vec<usize>> = el
        .morphisms
        .iter()
        .map(|&(m, b)| {
            let tgt_obj = el.object_of(e.base().tgt(m), b);
            let src_obj = el.object_of(e.base().src(m), el.parent.act(m, b));
            fibers[tgt_obj]
                .iter()
                .map(|&x| pos_in_fiber[src_obj][&e.act(m, x)])
                .collect()
        })
        .collect();
    let p = Presheaf::new(Arc::clone(&el.cat), stages, act)?;
    Ok((p, fibers))
}

/// The total object of a family: sums a presheaf on the category of elements
/// of `B` back to a presheaf over the base, fibered over `B`.
#[derive(Debug, Clone)]
pub struct SigmaTotal {
    pub total: Presheaf,
    pub proj: NatTrans,
    /// pairs[c][t] = (b, q): stage element `t` of the total is element `q` of
    /// the family at `(c, b)`. Sorted by (b, q).
    pub pairs: Vec<Vec<(usize, usize)>>,
}

impl SigmaTotal {
    pub fn index_of(&self, c: ObjId, b: usize, q: usize) -> usize {
        self.pairs[c]
            .binary_search(&(b, q))
            .expect("pair present in sigma total")
    }
}

pub fn sigma(el: &ElCategory, q: &Presheaf) -> Result<SigmaTotal> {
    if !Arc::ptr_eq(q.base(), &el.cat) && q.base().as_ref() != el.cat.as_ref() {
        return Err(Error::BaseMismatch);
    }
    let b = &el.parent;
    let base = b.base();
    let mut pairs: Vec<Vec<(usize, usize)>> = Vec::with_capacity(base.object_count());
    for c in base.objects() {
        let mut list = Vec::new();
        for bv in 0..b.stage(c) {
            let o = el.object_of(c, bv);
            for e in 0..q.stage(o) {
                list.push((bv, e));
            }
        }
        pairs.push(list);
    }
    let stages: Vec<usize> = pairs.iter().map(|v| v.len()).collect();
    let act: Vec<Vec<usize>> = base
        .morphisms()
        .map(|m| {
            let t = base.tgt(m);
            let s = base.src(m);
            pairs[t]
                .iter()
                .map(|&(bv, e)| {
                    let em = el.morphism_of(m, bv);
                    let moved = (b.act(m, bv), q.act(em, e));
                    pairs[s].binary_search(&moved).expect("restriction present")
                })
                .collect()
        })
        .collect();
    let total = Presheaf::new(Arc::clone(base), stages, act)?;
    let proj = NatTrans::new(
        total.clone(),
        b.clone(),
        base.objects()
            .map(|c| pairs[c].iter().map(|&(bv, _)| bv).collect())
            .collect(),
    )?;
    Ok(SigmaTotal { total, proj, pairs })
}

/// Sum a family map over the base: a map of presheaves on the category of
/// elements induces a map of total objects over `B`.
pub fn sigma_map(
    el: &ElCategory,
    f: &NatTrans,
    src_total: &SigmaTotal,
    tgt_total: &SigmaTotal,
) -> Result<NatTrans> {
    let base = el.parent.base();
    let comps: Vec<Vec<usize>> = base
        .objects()
        .map(|c| {
            src_total.pairs[c]
                .iter()
                .map(|&(bv, e)| {
                    let o = el.object_of(c, bv);
                    tgt_total.index_of(c, bv, f.apply(o, e))
                })
                .collect()
        })
        .collect();
    NatTrans::new(src_total.total.clone(), tgt_total.total.clone(), comps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::budget::Budget;
    use crate::fincat::category::{arrow_category, terminal_category};
    use crate::fincat::hom::enum_nat_trans;

    #[test]
    fn elements_of_terminal_is_the_base() {
        let base = arrow_category();
        let one = Presheaf::terminal(Arc::clone(&base));
        let el = elements_category(&one).unwrap();
        assert_eq!(el.cat.object_count(), base.object_count());
        assert_eq!(el.cat.mor_count(), base.mor_count());
    }

    #[test]
    fn elements_of_a_set_is_discrete() {
        let base = terminal_category();
        let x = Presheaf::constant(base, 3);
        let el = elements_category(&x).unwrap();
        assert_eq!(el.cat.object_count(), 3);
        assert_eq!(el.cat.mor_count(), 3);
    }

    #[test]
    fn elements_of_representable_is_slice() {
        let base = arrow_category();
        let (h, _) = Presheaf::representable(&base, 1);
        let el = elements_category(&h).unwrap();
        assert_eq!(el.cat.object_count(), 2);
        // identities plus the single non-identity arrow over u
        assert_eq!(el.cat.mor_count(), 3);
    }

    #[test]
    fn reindex_then_sigma_recovers_fibered_object() {
        let b = Budget::default();
        let base = arrow_category();
        let bp = Presheaf::new(
            Arc::clone(&base),
            vec![2, 2],
            vec![vec![0, 1], vec![0, 1], vec![0, 1]],
        )
        .unwrap();
        let el = elements_category(&bp).unwrap();
        let e = Presheaf::new(
            Arc::clone(&base),
            vec![3, 3],
            vec![vec![0, 1, 2], vec![0, 1, 2], vec![0, 1, 2]],
        )
        .unwrap();
        for q in enum_nat_trans(&e, &bp, &b).unwrap() {
            let (fam, fibers) = reindex_fibered(&el, &q).unwrap();
            let back = sigma(&el, &fam).unwrap();
            // The total recovers E up to the canonical regrouping bijection.
            assert_eq!(back.total.total_elements(), e.total_elements());
            let iso_comps: Vec<Vec<usize>> = base
                .objects()
                .map(|c| {
                    back.pairs[c]
                        .iter()
                        .map(|&(bv, idx)| fibers[el.object_of(c, bv)][idx])
                        .collect()
                })
                .collect();
            let iso = NatTrans::new(back.total.clone(), e.clone(), iso_comps).unwrap();
            assert!(crate::fincat::hom::is_iso(&iso));
            // And the projection matches q through the bijection.
            let proj_again = iso.then(&q).unwrap();
            assert_eq!(proj_again, back.proj);
        }
    }

    #[test]
    fn sigma_then_reindex_is_identity_on_families() {
        let base = arrow_category();
        let bp = Presheaf::new(
            Arc::clone(&base),
            vec![1, 2],
            vec![vec![0], vec![0, 1], vec![0, 0]],
        )
        .unwrap();
        let el = elements_category(&bp).unwrap();
        // A family over el: pick stage sizes and a compatible action.
        // el objects: (0,0), (1,0), (1,1); el morphisms: ids plus u-copies.
        let fam = Presheaf::new(
            Arc::clone(&el.cat),
            vec![2, 1, 2],
            {
                let mut act = Vec::new();
                for &(m, b) in &el.morphisms {
                    let t = el.object_of(base.tgt(m), b);
                    let s = el.object_of(base.src(m), bp.act(m, b));
                    if t == s {
                        act.push((0..2.min(if t == 1 { 1 } else { 2 })).collect());
                    } else {
                        // u-restrictions land in the fiber over (0,0).
                        act.push(vec![0; if t == 1 { 1 } else { 2 }]);
                    }
                }
                act
            },
        )
        .unwrap();
        let tot = sigma(&el, &fam).unwrap();
        let (fam2, _) = reindex_fibered(&el, &tot.proj).unwrap();
        assert_eq!(fam2, fam, "sigma then reindex is the identity on families");
    }
}
