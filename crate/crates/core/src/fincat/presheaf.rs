use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fincat::category::{FinCategory, MorId, ObjId};

/// A presheaf on a finite category: a finite stage set per object and a
/// restriction function per morphism, contravariantly. Stage sets are dense
/// ranges `0..stages[c]`; `act[m]` maps the stage at `tgt(m)` to the stage at
/// `src(m)`.
#[derive(Debug, Clone)]
pub struct Presheaf {
    base: Arc<FinCategory>,
    stages: Vec<usize>,
    act: Vec<Vec<usize>>,
}

impl PartialEq for Presheaf {
    fn eq(&self, other: &Self) -> bool {
        (Arc::ptr_eq(&self.base, &other.base) || self.base == other.base)
            && self.stages == other.stages
            && self.act == other.act
    }
}

impl Eq for Presheaf {}

impl Presheaf {
    pub fn new(base: Arc<FinCategory>, stages: Vec<usize>, act: Vec<Vec<usize>>) -> Result<Self> {
        let p = Presheaf { base, stages, act };
        p.validate()?;
        Ok(p)
    }

    /// Functor laws: identities act as identities, actions respect
    /// composition, and every action lands in the right stage.
    pub fn validate(&self) -> Result<()> {
        if self.stages.len() != self.base.object_count() {
            return Err(Error::FunctorLawFailure {
                details: "stage count differs from object count".into(),
            });
        }
        if self.act.len() != self.base.mor_count() {
            return Err(Error::FunctorLawFailure {
                details: "action count differs from morphism count".into(),
            });
        }
        for m in self.base.morphisms() {
            let dom = self.stages[self.base.tgt(m)];
            let cod = self.stages[self.base.src(m)];
            if self.act[m].len() != dom {
                return Err(Error::FunctorLawFailure {
                    details: format!("action of morphism {m} has wrong domain size"),
                });
            }
            for &v in &self.act[m] {
                if v >= cod {
                    return Err(Error::FunctorLawFailure {
                        details: format!("action of morphism {m} escapes its codomain"),
                    });
                }
            }
        }
        for c in self.base.objects() {
            let e = self.base.identity(c);
            for x in 0..self.stages[c] {
                if self.act[e][x] != x {
                    return Err(Error::FunctorLawFailure {
                        details: format!("identity at object {c} moves element {x}"),
                    });
                }
            }
        }
        for g in self.base.morphisms() {
            for f in self.base.morphisms() {
                if let Some(gf) = self.base.compose(g, f) {
                    // act(g.f) = act(f) . act(g): restrict along g first.
                    for x in 0..self.stages[self.base.tgt(g)] {
                        if self.act[gf][x] != self.act[f][self.act[g][x]] {
                            return Err(Error::FunctorLawFailure {
                                details: format!(
                                    "composition law fails on ({f}, {g}) at element {x}"
                                ),
                            });
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn base(&self) -> &Arc<FinCategory> {
        &self.base
    }

    pub fn stage(&self, c: ObjId) -> usize {
        self.stages[c]
    }

    pub fn stages(&self) -> &[usize] {
        &self.stages
    }

    /// Restriction of `x` at stage `tgt(m)` along `m`.
    pub fn act(&self, m: MorId, x: usize) -> usize {
        self.act[m][x]
    }

    pub fn act_table(&self, m: MorId) -> &[usize] {
        &self.act[m]
    }

    pub fn total_elements(&self) -> usize {
        self.stages.iter().sum()
    }

    pub fn same_base(&self, other: &Presheaf) -> bool {
        Arc::ptr_eq(&self.base, &other.base) || self.base == other.base
    }

    pub fn terminal(base: Arc<FinCategory>) -> Presheaf {
        let stages = vec![1; base.object_count()];
        let act = base.morphisms().map(|_| vec![0]).collect();
        Presheaf { base, stages, act }
    }

    pub fn initial(base: Arc<FinCategory>) -> Presheaf {
        let stages = vec![0; base.object_count()];
        let act = base.morphisms().map(|_| Vec::new()).collect();
        Presheaf { base, stages, act }
    }

    /// Constant presheaf: every stage is `0..n`, every action the identity.
    pub fn constant(base: Arc<FinCategory>, n: usize) -> Presheaf {
        let stages = vec![n; base.object_count()];
        let act = base.morphisms().map(|_| (0..n).collect()).collect();
        Presheaf { base, stages, act }
    }

    /// The representable presheaf at `c`: stage at `d` is `Hom(d, c)` listed
    /// by morphism index, restriction is precomposition. Also returns, per
    /// object, the morphisms realizing the stage elements.
    pub fn representable(base: &Arc<FinCategory>, c: ObjId) -> (Presheaf, Vec<Vec<MorId>>) {
        let mut elems: Vec<Vec<MorId>> = vec![Vec::new(); base.object_count()];
        for &m in base.arrows_into(c) {
            elems[base.src(m)].push(m);
        }
        let stages: Vec<usize> = elems.iter().map(|v| v.len()).collect();
        let mut act = Vec::with_capacity(base.mor_count());
        for n in base.morphisms() {
            // act(n): Hom(tgt n, c) -> Hom(src n, c), m -> m . n
            let table = elems[base.tgt(n)]
                .iter()
                .map(|&m| {
                    let mn = base.compose(m, n).expect("composable by construction");
                    elems[base.src(n)]
                        .binary_search(&mn)
                        .expect("composite listed")
                })
                .collect();
            act.push(table);
        }
        (
            Presheaf {
                base: Arc::clone(base),
                stages,
                act,
            },
            elems,
        )
    }
}

/// A natural transformation between presheaves on the same base, stored as a
/// component table per object.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NatTrans {
    source: Presheaf,
    target: Presheaf,
    comps: Vec<Vec<usize>>,
}

impl NatTrans {
    pub fn new(source: Presheaf, target: Presheaf, comps: Vec<Vec<usize>>) -> Result<Self> {
        if !source.same_base(&target) {
            return Err(Error::BaseMismatch);
        }
        let t = NatTrans {
            source,
            target,
            comps,
        };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        let base = self.source.base();
        for c in base.objects() {
            if self.comps[c].len() != self.source.stage(c) {
                return Err(Error::NaturalityFailure {
                    morphism: base.identity(c),
                    details: format!("component at object {c} has wrong domain size"),
                });
            }
            for &v in &self.comps[c] {
                if v >= self.target.stage(c) {
                    return Err(Error::NaturalityFailure {
                        morphism: base.identity(c),
                        details: format!("component at object {c} escapes its codomain"),
                    });
                }
            }
        }
        for m in base.morphisms() {
            let (s, t) = (base.src(m), base.tgt(m));
            for x in 0..self.source.stage(t) {
                if self.target.act(m, self.comps[t][x]) != self.comps[s][self.source.act(m, x)] {
                    return Err(Error::NaturalityFailure {
                        morphism: m,
                        details: format!("square fails at element {x} of stage {t}"),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn identity(p: &Presheaf) -> NatTrans {
        let comps = p
            .base()
            .objects()
            .map(|c| (0..p.stage(c)).collect())
            .collect();
        NatTrans {
            source: p.clone(),
            target: p.clone(),
            comps,
        }
    }

    /// The unique map into the terminal presheaf.
    pub fn to_terminal(p: &Presheaf) -> NatTrans {
        let comps = p.base().objects().map(|c| vec![0; p.stage(c)]).collect();
        NatTrans {
            source: p.clone(),
            target: Presheaf::terminal(Arc::clone(p.base())),
            comps,
        }
    }

    /// The unique map out of the initial presheaf.
    pub fn from_initial(p: &Presheaf) -> NatTrans {
        NatTrans {
            source: Presheaf::initial(Arc::clone(p.base())),
            target: p.clone(),
            comps: p.base().objects().map(|_| Vec::new()).collect(),
        }
    }

    pub fn source(&self) -> &Presheaf {
        &self.source
    }

    pub fn target(&self) -> &Presheaf {
        &self.target
    }

    pub fn apply(&self, c: ObjId, x: usize) -> usize {
        self.comps[c][x]
    }

    pub fn component(&self, c: ObjId) -> &[usize] {
        &self.comps[c]
    }

    pub fn components(&self) -> &[Vec<usize>] {
        &self.comps
    }

    /// `other . self`: apply `self` first. Sources/targets must match up.
    pub fn then(&self, other: &NatTrans) -> Result<NatTrans> {
        if self.target != other.source {
            return Err(Error::TargetMismatch {
                details: "composition of natural transformations with mismatched middle".into(),
            });
        }
        let comps = self
            .source
            .base()
            .objects()
            .map(|c| {
                self.comps[c]
                    .iter()
                    .map(|&v| other.comps[c][v])
                    .collect::<Vec<_>>()
            })
            .collect();
        Ok(NatTrans {
            source: self.source.clone(),
            target: other.target.clone(),
            comps,
        })
    }
}

/// A subobject of a presheaf: a restriction-stable selection of stage
/// elements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subobject {
    ambient: Presheaf,
    members: Vec<Vec<bool>>,
}

impl Subobject {
    pub fn new(ambient: Presheaf, members: Vec<Vec<bool>>) -> Result<Self> {
        let s = Subobject { ambient, members };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        let base = self.ambient.base();
        for c in base.objects() {
            if self.members[c].len() != self.ambient.stage(c) {
                return Err(Error::InvalidModel {
                    details: format!("subobject member table at object {c} has wrong size"),
                });
            }
        }
        for m in base.morphisms() {
            let (s, t) = (base.src(m), base.tgt(m));
            for x in 0..self.ambient.stage(t) {
                if self.members[t][x] && !self.members[s][self.ambient.act(m, x)] {
                    return Err(Error::NotRestrictionStable { morphism: m });
                }
            }
        }
        Ok(())
    }

    pub fn full(ambient: &Presheaf) -> Subobject {
        let members = ambient
            .base()
            .objects()
            .map(|c| vec![true; ambient.stage(c)])
            .collect();
        Subobject {
            ambient: ambient.clone(),
            members,
        }
    }

    pub fn empty(ambient: &Presheaf) -> Subobject {
        let members = ambient
            .base()
            .objects()
            .map(|c| vec![false; ambient.stage(c)])
            .collect();
        Subobject {
            ambient: ambient.clone(),
            members,
        }
    }

    pub fn ambient(&self) -> &Presheaf {
        &self.ambient
    }

    pub fn contains(&self, c: ObjId, x: usize) -> bool {
        self.members[c][x]
    }

    pub fn members(&self) -> &[Vec<bool>] {
        &self.members
    }

    pub fn count(&self) -> usize {
        self.members
            .iter()
            .map(|v| v.iter().filter(|&&b| b).count())
            .sum()
    }

    /// Unions of subobjects are subobjects (stability is preserved).
    pub fn union(&self, other: &Subobject) -> Result<Subobject> {
        if self.ambient != other.ambient {
            return Err(Error::TargetMismatch {
                details: "union of subobjects of different ambients".into(),
            });
        }
        let members = self
            .members
            .iter()
            .zip(&other.members)
            .map(|(a, b)| a.iter().zip(b).map(|(&x, &y)| x || y).collect())
            .collect();
        Ok(Subobject {
            ambient: self.ambient.clone(),
            members,
        })
    }

    pub fn intersection(&self, other: &Subobject) -> Result<Subobject> {
        if self.ambient != other.ambient {
            return Err(Error::TargetMismatch {
                details: "intersection of subobjects of different ambients".into(),
            });
        }
        let members = self
            .members
            .iter()
            .zip(&other.members)
            .map(|(a, b)| a.iter().zip(b).map(|(&x, &y)| x && y).collect())
            .collect();
        Ok(Subobject {
            ambient: self.ambient.clone(),
            members,
        })
    }

    pub fn is_contained_in(&self, other: &Subobject) -> bool {
        self.members
            .iter()
            .zip(&other.members)
            .all(|(a, b)| a.iter().zip(b).all(|(&x, &y)| !x || y))
    }

    /// Realize the subobject as a presheaf with a monic inclusion. Elements
    /// keep their ambient order, renumbered densely. Also returns the
    /// position table: `positions[c][x]` is the index of ambient element `x`
    /// in the sub-presheaf, if it is a member.
    pub fn as_presheaf(&self) -> (Presheaf, NatTrans, Vec<Vec<Option<usize>>>) {
        let base = self.ambient.base();
        let mut positions: Vec<Vec<Option<usize>>> = Vec::with_capacity(base.object_count());
        let mut chosen: Vec<Vec<usize>> = Vec::with_capacity(base.object_count());
        for c in base.objects() {
            let mut pos = vec![None; self.ambient.stage(c)];
            let mut list = Vec::new();
            for x in 0..self.ambient.stage(c) {
                if self.members[c][x] {
                    pos[x] = Some(list.len());
                    list.push(x);
                }
            }
            positions.push(pos);
            chosen.push(list);
        }
        let stages: Vec<usize> = chosen.iter().map(|v| v.len()).collect();
        let act: Vec<Vec<usize>> = base
            .morphisms()
            .map(|m| {
                let t = base.tgt(m);
                let s = base.src(m);
                chosen[t]
                    .iter()
                    .map(|&x| positions[s][self.ambient.act(m, x)].expect("stable subobject"))
                    .collect()
            })
            .collect();
        let object = Presheaf {
            base: Arc::clone(base),
            stages,
            act,
        };
        let comps: Vec<Vec<usize>> = chosen.clone();
        let include = NatTrans {
            source: object.clone(),
            target: self.ambient.clone(),
            comps,
        };
        (object, include, positions)
    }

    /// Pull a subobject of the target back along a map.
    pub fn preimage(&self, f: &NatTrans) -> Result<Subobject> {
        if *f.target() != self.ambient {
            return Err(Error::TargetMismatch {
                details: "preimage along a map into a different ambient".into(),
            });
        }
        let members = f
            .source()
            .base()
            .objects()
            .map(|c| {
                (0..f.source().stage(c))
                    .map(|x| self.members[c][f.apply(c, x)])
                    .collect()
            })
            .collect();
        Subobject::new(f.source().clone(), members)
    }

    /// Image of a map as a subobject of its target.
    pub fn image(f: &NatTrans) -> Subobject {
        let target = f.target().clone();
        let mut members: Vec<Vec<bool>> = target
            .base()
            .objects()
            .map(|c| vec![false; target.stage(c)])
            .collect();
        for c in target.base().objects() {
            for x in 0..f.source().stage(c) {
                members[c][f.apply(c, x)] = true;
            }
        }
        Subobject {
            ambient: target,
            members,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fincat::category::{arrow_category, terminal_category};

    #[test]
    fn representable_at_arrow_target() {
        let base = arrow_category();
        let (h, elems) = Presheaf::representable(&base, 1);
        assert_eq!(h.stages(), &[1, 1]);
        assert_eq!(elems[0], vec![2]);
        assert_eq!(elems[1], vec![1]);
        h.validate().unwrap();
    }

    #[test]
    fn functor_law_violation_is_caught() {
        let base = arrow_category();
        // Identity at object 0 swaps two elements: invalid.
        let err = Presheaf::new(
            base,
            vec![2, 1],
            vec![vec![1, 0], vec![0], vec![0, 0]],
        )
        .unwrap_err();
        match err {
            Error::FunctorLawFailure { .. } => {}
            other => panic!("expected FunctorLawFailure, got {other:?}"),
        }
    }

    #[test]
    fn naturality_violation_is_caught() {
        let base = arrow_category();
        let x = Presheaf::new(
            Arc::clone(&base),
            vec![2, 2],
            vec![vec![0, 1], vec![0, 1], vec![0, 1]],
        )
        .unwrap();
        // Swap at stage 1 only: breaks the square for morphism 2.
        let err = NatTrans::new(x.clone(), x.clone(), vec![vec![0, 1], vec![1, 0]]).unwrap_err();
        match err {
            Error::NaturalityFailure { morphism: 2, .. } => {}
            other => panic!("expected NaturalityFailure at 2, got {other:?}"),
        }
    }

    #[test]
    fn unstable_subobject_is_caught() {
        let base = arrow_category();
        let x = Presheaf::new(
            Arc::clone(&base),
            vec![2, 2],
            vec![vec![0, 1], vec![0, 1], vec![0, 0]],
        )
        .unwrap();
        // Element 0 at stage 1 restricts to element 0 at stage 0, which is
        // excluded: not stable.
        let err = Subobject::new(x, vec![vec![false, true], vec![true, false]]).unwrap_err();
        match err {
            Error::NotRestrictionStable { morphism: 2 } => {}
            other => panic!("expected NotRestrictionStable at 2, got {other:?}"),
        }
    }

    #[test]
    fn subobject_as_presheaf_roundtrip() {
        let base = terminal_category();
        let x = Presheaf::constant(Arc::clone(&base), 4);
        let sub = Subobject::new(x, vec![vec![true, false, true, false]]).unwrap();
        let (obj, incl, pos) = sub.as_presheaf();
        assert_eq!(obj.stage(0), 2);
        assert_eq!(incl.apply(0, 0), 0);
        assert_eq!(incl.apply(0, 1), 2);
        assert_eq!(pos[0][2], Some(1));
        incl.validate().unwrap();
    }
}
