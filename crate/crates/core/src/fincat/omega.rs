use std::collections::HashMap;
use std::sync::Arc;

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::fincat::category::{FinCategory, MorId, ObjId};
use crate::fincat::presheaf::{NatTrans, Presheaf, Subobject};

/// A sieve on `c`, as a bitmask over `arrows_into(c)` positions.
pub type Sieve = u128;

const MAX_SIEVE_ARROWS: usize = 128;

/// The subobject classifier: stage `c` lists the sieves on `c` ordered by
/// bitmask, restriction is sieve pullback. `true_arrow` picks the maximal
/// sieve at every stage.
#[derive(Debug, Clone)]
pub struct OmegaData {
    pub object: Presheaf,
    /// sieves[c][e] decodes element `e` of stage `c`.
    pub sieves: Vec<Vec<Sieve>>,
    index: Vec<HashMap<Sieve, usize>>,
    pub true_arrow: NatTrans,
}

impl OmegaData {
    pub fn index_of(&self, c: ObjId, s: Sieve) -> usize {
        self.index[c][&s]
    }

    /// The index of the maximal sieve at stage `c`.
    pub fn top(&self, c: ObjId) -> usize {
        self.true_arrow.apply(c, 0)
    }

    /// Whether sieve element `e` at stage `c` contains the morphism `m`
    /// (which must have target `c`).
    pub fn sieve_contains(&self, c: ObjId, e: usize, m: MorId) -> bool {
        let pos = self.object.base().arrow_pos(m);
        self.sieves[c][e] >> pos & 1 == 1
    }

    /// The characteristic map of a subobject: sends `x` to the sieve of
    /// arrows restricting `x` into the subobject.
    pub fn characteristic(&self, sub: &Subobject) -> Result<NatTrans> {
        let amb = sub.ambient();
        let base = amb.base();
        let mut comps: Vec<Vec<usize>> = Vec::with_capacity(base.object_count());
        for c in base.objects() {
            let arrows = base.arrows_into(c);
            let mut col = Vec::with_capacity(amb.stage(c));
            for x in 0..amb.stage(c) {
                let mut s: Sieve = 0;
                for (pos, &m) in arrows.iter().enumerate() {
                    if sub.contains(base.src(m), amb.act(m, x)) {
                        s |= 1 << pos;
                    }
                }
                col.push(self.index_of(c, s));
            }
            comps.push(col);
        }
        NatTrans::new(amb.clone(), self.object.clone(), comps)
    }

    /// The subobject classified by a map into the classifier: the elements
    /// sent to the maximal sieve.
    pub fn classify(&self, chi: &NatTrans) -> Result<Subobject> {
        if chi.target() != &self.object {
            return Err(Error::TargetMismatch {
                details: "classify expects a map into the subobject classifier".into(),
            });
        }
        let src = chi.source();
        let base = src.base();
        let members = base
            .objects()
            .map(|c| {
                let top = self.top(c);
                (0..src.stage(c)).map(|x| chi.apply(c, x) == top).collect()
            })
            .collect();
        Subobject::new(src.clone(), members)
    }
}

/// Build the subobject classifier of presheaves on `base` by enumerating the
/// sieves on every object.
pub fn omega(base: &Arc<FinCategory>, budget: &Budget) -> Result<OmegaData> {
    let mut sieves: Vec<Vec<Sieve>> = Vec::with_capacity(base.object_count());
    let mut total = 0usize;
    for c in base.objects() {
        let arrows = base.arrows_into(c);
        if arrows.len() > MAX_SIEVE_ARROWS {
            return Err(Error::budget("sieve enumeration", MAX_SIEVE_ARROWS));
        }
        if arrows.len() >= usize::BITS as usize - 1
            || budget.max_elements < (1usize << arrows.len().min(62))
        {
            // Subset enumeration would already blow the budget.
            return Err(Error::budget("sieve enumeration", budget.max_elements));
        }
        let mut list = Vec::new();
        'subsets: for bits in 0u128..(1u128 << arrows.len()) {
            // Closure under precomposition.
            for (pos, &m) in arrows.iter().enumerate() {
                if bits >> pos & 1 == 0 {
                    continue;
                }
                for n in base.morphisms() {
                    if base.tgt(n) != base.src(m) {
                        continue;
                    }
                    let mn = base.compose(m, n).expect("composable");
                    let pos2 = arrows.binary_search(&mn).expect("arrow into c");
                    if bits >> pos2 & 1 == 0 {
                        continue 'subsets;
                    }
                }
            }
            list.push(bits);
        }
        total = total.saturating_add(list.len());
        budget.admit("subobject classifier", total)?;
        sieves.push(list);
    }
    let stages: Vec<usize> = sieves.iter().map(|v| v.len()).collect();
    let mut index: Vec<HashMap<Sieve, usize>> = Vec::with_capacity(base.object_count());
    for list in &sieves {
        index.push(list.iter().enumerate().map(|(i, &s)| (s, i)).collect());
    }
    let act: Vec<Vec<usize>> = base
        .morphisms()
        .map(|g| {
            let c = base.tgt(g);
            let c2 = base.src(g);
            let arrows2 = base.arrows_into(c2);
            sieves[c]
                .iter()
                .map(|&s| {
                    let mut pulled: Sieve = 0;
                    for (pos2, &m) in arrows2.iter().enumerate() {
                        let gm = base.compose(g, m).expect("composable");
                        if s >> base.arrow_pos(gm) & 1 == 1 {
                            pulled |= 1 << pos2;
                        }
                    }
                    index[c2][&pulled]
                })
                .collect()
        })
        .collect();
    let object = Presheaf::new(Arc::clone(base), stages, act)?;
    let full: Vec<usize> = base
        .objects()
        .map(|c| index[c][&(((1u128 << base.arrows_into(c).len()) - 1) as Sieve)])
        .collect();
    let true_arrow = NatTrans::new(
        Presheaf::terminal(Arc::clone(base)),
        object.clone(),
        full.into_iter().map(|e| vec![e]).collect(),
    )?;
    Ok(OmegaData {
        object,
        sieves,
        index,
        true_arrow,
    })
}
