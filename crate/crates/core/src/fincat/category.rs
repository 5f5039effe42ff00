use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};

pub type ObjId = usize;
pub type MorId = usize;

/// A finite category given by explicit tables. Objects and morphisms are
/// dense indices; the composition table is total exactly on composable pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinCategory {
    objects: usize,
    src: Vec<ObjId>,
    tgt: Vec<ObjId>,
    identity: Vec<MorId>,
    /// compose[g][f] = g . f, defined when tgt(f) = src(g); apply f first.
    compose: Vec<Vec<Option<MorId>>>,
    /// Arrows with the given target, sorted by morphism index.
    arrows_into: Vec<Vec<MorId>>,
}

impl FinCategory {
    /// Build and validate. `compose_entries` lists `(f, g, h)` meaning
    /// `h = g . f`; composites with an identity on either side are filled in
    /// automatically and need not be listed.
    pub fn new(
        objects: usize,
        arrows: &[(ObjId, ObjId)],
        identity: &[MorId],
        compose_entries: &[(MorId, MorId, MorId)],
    ) -> Result<Arc<FinCategory>> {
        let mor_count = arrows.len();
        if identity.len() != objects {
            return Err(Error::InvalidModel {
                details: format!(
                    "expected {objects} identity morphisms, got {}",
                    identity.len()
                ),
            });
        }
        for (m, &(s, t)) in arrows.iter().enumerate() {
            if s >= objects || t >= objects {
                return Err(Error::InvalidModel {
                    details: format!("morphism {m} has endpoint out of range"),
                });
            }
        }
        for (c, &e) in identity.iter().enumerate() {
            if e >= mor_count {
                return Err(Error::InvalidModel {
                    details: format!("identity of object {c} out of range"),
                });
            }
            if arrows[e] != (c, c) {
                return Err(Error::IdentityFailure {
                    object: c,
                    details: format!("identity morphism {e} is not an endomorphism of {c}"),
                });
            }
        }
        let src: Vec<ObjId> = arrows.iter().map(|a| a.0).collect();
        let tgt: Vec<ObjId> = arrows.iter().map(|a| a.1).collect();
        let mut compose = vec![vec![None; mor_count]; mor_count];
        for &(f, g, h) in compose_entries {
            if f >= mor_count || g >= mor_count || h >= mor_count {
                return Err(Error::InvalidModel {
                    details: format!("compose entry ({f}, {g}, {h}) out of range"),
                });
            }
            if tgt[f] != src[g] {
                return Err(Error::NonComposable {
                    f,
                    g,
                    details: "composition table defined on a non-composable pair".into(),
                });
            }
            if let Some(prev) = compose[g][f] {
                if prev != h {
                    return Err(Error::NonComposable {
                        f,
                        g,
                        details: format!("conflicting composites {prev} and {h}"),
                    });
                }
            }
            compose[g][f] = Some(h);
        }
        // Identity composites are forced; fill them in and cross-check any
        // explicit entries.
        for m in 0..mor_count {
            let idt = identity[tgt[m]];
            let ids = identity[src[m]];
            for (g, f) in [(idt, m), (m, ids)] {
                match compose[g][f] {
                    None => compose[g][f] = Some(m),
                    Some(h) if h == m => {}
                    Some(h) => {
                        return Err(Error::IdentityFailure {
                            object: src[m],
                            details: format!(
                                "identity composite of morphism {m} declared as {h}"
                            ),
                        })
                    }
                }
            }
        }
        let mut arrows_into = vec![Vec::new(); objects];
        for m in 0..mor_count {
            arrows_into[tgt[m]].push(m);
        }
        let cat = FinCategory {
            objects,
            src,
            tgt,
            identity: identity.to_vec(),
            compose,
            arrows_into,
        };
        cat.validate()?;
        Ok(Arc::new(cat))
    }

    /// Category laws, exhaustively: totality of composition on composable
    /// pairs only, endpoint coherence, identity neutrality, associativity.
    fn validate(&self) -> Result<()> {
        let n = self.mor_count();
        for g in 0..n {
            for f in 0..n {
                match self.compose[g][f] {
                    Some(h) => {
                        if self.tgt[f] != self.src[g] {
                            return Err(Error::NonComposable {
                                f,
                                g,
                                details: "composition table defined on a non-composable pair"
                                    .into(),
                            });
                        }
                        if self.src[h] != self.src[f] || self.tgt[h] != self.tgt[g] {
                            return Err(Error::NonComposable {
                                f,
                                g,
                                details: format!("composite {h} has wrong endpoints"),
                            });
                        }
                    }
                    None => {
                        if self.tgt[f] == self.src[g] {
                            return Err(Error::NonComposable {
                                f,
                                g,
                                details: "missing composite of a composable pair".into(),
                            });
                        }
                    }
                }
            }
        }
        for m in 0..n {
            if self.compose[self.identity[self.tgt[m]]][m] != Some(m)
                || self.compose[m][self.identity[self.src[m]]] != Some(m)
            {
                return Err(Error::IdentityFailure {
                    object: self.src[m],
                    details: format!("identity is not neutral on morphism {m}"),
                });
            }
        }
        for f in 0..n {
            for g in 0..n {
                if self.tgt[f] != self.src[g] {
                    continue;
                }
                let gf = self.compose[g][f].unwrap();
                for h in 0..n {
                    if self.tgt[g] != self.src[h] {
                        continue;
                    }
                    let hg = self.compose[h][g].unwrap();
                    if self.compose[h][gf] != self.compose[hg][f] {
                        return Err(Error::AssocFailure { f, g, h });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn object_count(&self) -> usize {
        self.objects
    }

    pub fn mor_count(&self) -> usize {
        self.src.len()
    }

    pub fn src(&self, m: MorId) -> ObjId {
        self.src[m]
    }

    pub fn tgt(&self, m: MorId) -> ObjId {
        self.tgt[m]
    }

    pub fn identity(&self, c: ObjId) -> MorId {
        self.identity[c]
    }

    pub fn is_identity(&self, m: MorId) -> bool {
        self.identity[self.src[m]] == m
    }

    /// g . f: apply `f` first, then `g`.
    pub fn compose(&self, g: MorId, f: MorId) -> Option<MorId> {
        self.compose[g][f]
    }

    pub fn arrows_into(&self, c: ObjId) -> &[MorId] {
        &self.arrows_into[c]
    }

    pub fn morphisms(&self) -> impl Iterator<Item = MorId> {
        0..self.mor_count()
    }

    pub fn objects(&self) -> impl Iterator<Item = ObjId> {
        0..self.object_count()
    }

    /// Position of `m` in `arrows_into(tgt(m))`.
    pub fn arrow_pos(&self, m: MorId) -> usize {
        self.arrows_into[self.tgt[m]]
            .binary_search(&m)
            .expect("arrow listed under its target")
    }
}

/// One object, one (identity) morphism: presheaves on it are plain finite
/// sets.
pub fn terminal_category() -> Arc<FinCategory> {
    FinCategory::new(1, &[(0, 0)], &[0], &[]).expect("terminal category is valid")
}

/// Two objects `0 -> 1` with a single non-identity arrow (morphism 2).
pub fn arrow_category() -> Arc<FinCategory> {
    FinCategory::new(2, &[(0, 0), (1, 1), (0, 1)], &[0, 1], &[])
        .expect("arrow category is valid")
}

/// A composable chain of `n` non-identity generators on `n + 1` objects,
/// with all composites. Object i maps to object i+1 by generator i.
pub fn chain_category(n: usize) -> Arc<FinCategory> {
    let objects = n + 1;
    let mut arrows: Vec<(ObjId, ObjId)> = (0..objects).map(|c| (c, c)).collect();
    let identity: Vec<MorId> = (0..objects).collect();
    // Non-identity arrows i -> j for i < j, indexed by a map we build as we go.
    let mut index: BTreeMap<(ObjId, ObjId), MorId> = BTreeMap::new();
    for span in 1..objects {
        for i in 0..objects - span {
            index.insert((i, i + span), arrows.len());
            arrows.push((i, i + span));
        }
    }
    let mor_of = |i: ObjId, j: ObjId| -> MorId {
        if i == j {
            i
        } else {
            index[&(i, j)]
        }
    };
    let mut entries = Vec::new();
    for i in 0..objects {
        for j in i..objects {
            for k in j..objects {
                if i != j && j != k {
                    entries.push((mor_of(i, j), mor_of(j, k), mor_of(i, k)));
                }
            }
        }
    }
    FinCategory::new(objects, &arrows, &identity, &entries).expect("chain category is valid")
}
