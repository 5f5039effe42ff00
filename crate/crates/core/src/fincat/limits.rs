use std::sync::Arc;

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::fincat::category::ObjId;
use crate::fincat::presheaf::{NatTrans, Presheaf};

/// Binary product, computed stagewise. Element order: `(x, y)` is numbered
/// `x * |Y(c)| + y`.
#[derive(Debug, Clone)]
pub struct Product {
    pub object: Presheaf,
    pub left: NatTrans,
    pub right: NatTrans,
    right_sizes: Vec<usize>,
}

impl Product {
    pub fn pair_index(&self, c: ObjId, x: usize, y: usize) -> usize {
        x * self.right_sizes[c] + y
    }

    pub fn unpair(&self, c: ObjId, p: usize) -> (usize, usize) {
        (p / self.right_sizes[c], p % self.right_sizes[c])
    }

    /// The mediating map `<f, g>` of a cone.
    pub fn mediate(&self, f: &NatTrans, g: &NatTrans) -> Result<NatTrans> {
        if f.source() != g.source() {
            return Err(Error::SourceMismatch {
                details: "cone legs have different apexes".into(),
            });
        }
        if f.target() != self.left.target() || g.target() != self.right.target() {
            return Err(Error::TargetMismatch {
                details: "cone legs do not match the product factors".into(),
            });
        }
        let base = f.source().base();
        let comps = base
            .objects()
            .map(|c| {
                (0..f.source().stage(c))
                    .map(|w| self.pair_index(c, f.apply(c, w), g.apply(c, w)))
                    .collect()
            })
            .collect();
        NatTrans::new(f.source().clone(), self.object.clone(), comps)
    }
}

pub fn product(x: &Presheaf, y: &Presheaf, budget: &Budget) -> Result<Product> {
    if !x.same_base(y) {
        return Err(Error::BaseMismatch);
    }
    let base = Arc::clone(x.base());
    let mut total = 0usize;
    let stages: Vec<usize> = base
        .objects()
        .map(|c| {
            let s = x.stage(c) * y.stage(c);
            total += s;
            s
        })
        .collect();
    budget.admit("product", total)?;
    let right_sizes: Vec<usize> = base.objects().map(|c| y.stage(c)).collect();
    let act: Vec<Vec<usize>> = base
        .morphisms()
        .map(|m| {
            let t = base.tgt(m);
            let s = base.src(m);
            (0..stages[t])
                .map(|p| {
                    let (a, b) = (p / right_sizes[t], p % right_sizes[t]);
                    x.act(m, a) * right_sizes[s] + y.act(m, b)
                })
                .collect()
        })
        .collect();
    let object = Presheaf::new(base.clone(), stages.clone(), act)?;
    let left_comps = base
        .objects()
        .map(|c| (0..stages[c]).map(|p| p / right_sizes[c]).collect())
        .collect();
    let right_comps = base
        .objects()
        .map(|c| (0..stages[c]).map(|p| p % right_sizes[c]).collect())
        .collect();
    let left = NatTrans::new(object.clone(), x.clone(), left_comps)?;
    let right = NatTrans::new(object.clone(), y.clone(), right_comps)?;
    Ok(Product {
        object,
        left,
        right,
        right_sizes,
    })
}

/// Pullback of a cospan `f: X -> Z <- Y : g`. Elements at stage `c` are the
/// pairs `(x, y)` with `f(x) = g(y)`, in lexicographic order.
#[derive(Debug, Clone)]
pub struct Pullback {
    pub object: Presheaf,
    pub to_left: NatTrans,
    pub to_right: NatTrans,
    pub pairs: Vec<Vec<(usize, usize)>>,
}

impl Pullback {
    pub fn index_of(&self, c: ObjId, x: usize, y: usize) -> Option<usize> {
        self.pairs[c].binary_search(&(x, y)).ok()
    }

    pub fn mediate(&self, f: &NatTrans, g: &NatTrans) -> Result<NatTrans> {
        if f.source() != g.source() {
            return Err(Error::SourceMismatch {
                details: "cone legs have different apexes".into(),
            });
        }
        let base = f.source().base();
        let mut comps = Vec::with_capacity(base.object_count());
        for c in base.objects() {
            let mut col = Vec::with_capacity(f.source().stage(c));
            for w in 0..f.source().stage(c) {
                let idx = self.index_of(c, f.apply(c, w), g.apply(c, w)).ok_or_else(|| {
                    Error::TargetMismatch {
                        details: "cone does not commute with the pullback cospan".into(),
                    }
                })?;
                col.push(idx);
            }
            comps.push(col);
        }
        NatTrans::new(f.source().clone(), self.object.clone(), comps)
    }
}

pub fn pullback(f: &NatTrans, g: &NatTrans, budget: &Budget) -> Result<Pullback> {
    if f.target() != g.target() {
        return Err(Error::TargetMismatch {
            details: "pullback requires a common target".into(),
        });
    }
    let x = f.source();
    let y = g.source();
    let base = Arc::clone(x.base());
    let mut pairs: Vec<Vec<(usize, usize)>> = Vec::with_capacity(base.object_count());
    let mut total = 0usize;
    for c in base.objects() {
        let mut list = Vec::new();
        for a in 0..x.stage(c) {
            for b in 0..y.stage(c) {
                if f.apply(c, a) == g.apply(c, b) {
                    list.push((a, b));
                }
            }
        }
        total += list.len();
        budget.admit("pullback", total)?;
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
                .map(|&(a, b)| {
                    let moved = (x.act(m, a), y.act(m, b));
                    pairs[s]
                        .binary_search(&moved)
                        .expect("restriction of a matched pair is matched")
                })
                .collect()
        })
        .collect();
    let object = Presheaf::new(base.clone(), stages, act)?;
    let to_left = NatTrans::new(
        object.clone(),
        x.clone(),
        base.objects()
            .map(|c| pairs[c].iter().map(|&(a, _)| a).collect())
            .collect(),
    )?;
    let to_right = NatTrans::new(
        object.clone(),
        y.clone(),
        base.objects()
            .map(|c| pairs[c].iter().map(|&(_, b)| b).collect())
            .collect(),
    )?;
    Ok(Pullback {
        object,
        to_left,
        to_right,
        pairs,
    })
}

/// Pushout of a span `f: W -> X`, `g: W -> Y`, computed stagewise by
/// union-find on the disjoint sum `X(c) + Y(c)` with generators
/// `f(w) ~ g(w)`. Classes are renumbered by least member, left summand first,
/// which makes isomorphic inputs give bit-identical quotients.
#[derive(Debug, Clone)]
pub struct Pushout {
    pub object: Presheaf,
    pub from_left: NatTrans,
    pub from_right: NatTrans,
    /// Class of each left-summand element, per stage.
    pub class_of_left: Vec<Vec<usize>>,
    /// Class of each right-summand element, per stage.
    pub class_of_right: Vec<Vec<usize>>,
}

impl Pushout {
    /// The mediating map out of the pushout for a commuting cocone.
    pub fn mediate(&self, u: &NatTrans, v: &NatTrans) -> Result<NatTrans> {
        if u.target() != v.target() {
            return Err(Error::TargetMismatch {
                details: "cocone legs have different targets".into(),
            });
        }
        if u.source() != self.from_left.source() || v.source() != self.from_right.source() {
            return Err(Error::SourceMismatch {
                details: "cocone legs do not match the pushout feet".into(),
            });
        }
        let base = u.source().base();
        let mut comps: Vec<Vec<usize>> = Vec::with_capacity(base.object_count());
        for c in base.objects() {
            let mut col = vec![None; self.object.stage(c)];
            let mut put = |cls: usize, val: usize| -> Result<()> {
                match col[cls] {
                    None => {
                        col[cls] = Some(val);
                        Ok(())
                    }
                    Some(prev) if prev == val => Ok(()),
                    Some(_) => Err(Error::TargetMismatch {
                        details: "cocone does not coequalize the pushout span".into(),
                    }),
                }
            };
            for x in 0..u.source().stage(c) {
                put(self.class_of_left[c][x], u.apply(c, x))?;
            }
            for y in 0..v.source().stage(c) {
                put(self.class_of_right[c][y], v.apply(c, y))?;
            }
            comps.push(
                col.into_iter()
                    .map(|o| o.expect("every class has a representative"))
                    .collect(),
            );
        }
        NatTrans::new(self.object.clone(), u.target().clone(), comps)
    }
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    pub(crate) fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut cur = x;
        while self.parent[cur] != root {
            let next = self.parent[cur];
            self.parent[cur] = root;
            cur = next;
        }
        root
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        // Keep the smaller index as the root so class representatives are
        // least members.
        if ra < rb {
            self.parent[rb] = ra;
        } else if rb < ra {
            self.parent[ra] = rb;
        }
    }
}

pub fn pushout(f: &NatTrans, g: &NatTrans, budget: &Budget) -> Result<Pushout> {
    if f.source() != g.source() {
        return Err(Error::SourceMismatch {
            details: "pushout requires a common source".into(),
        });
    }
    let w = f.source();
    let x = f.target();
    let y = g.target();
    let base = Arc::clone(x.base());
    budget.admit(
        "pushout",
        x.total_elements().saturating_add(y.total_elements()),
    )?;

    let mut class_of_left: Vec<Vec<usize>> = Vec::with_capacity(base.object_count());
    let mut class_of_right: Vec<Vec<usize>> = Vec::with_capacity(base.object_count());
    let mut stages: Vec<usize> = Vec::with_capacity(base.object_count());
    // reps[c][k] = least disjoint-sum member of class k (left elements first).
    let mut reps: Vec<Vec<usize>> = Vec::with_capacity(base.object_count());
    for c in base.objects() {
        let nx = x.stage(c);
        let ny = y.stage(c);
        let mut uf = UnionFind::new(nx + ny);
        for v in 0..w.stage(c) {
            uf.union(f.apply(c, v), nx + g.apply(c, v));
        }
        let mut class_index = vec![None; nx + ny];
        let mut rep_list = Vec::new();
        let mut next = 0usize;
        for e in 0..nx + ny {
            let r = uf.find(e);
            if class_index[r].is_none() {
                class_index[r] = Some(next);
                rep_list.push(r);
                next += 1;
            }
        }
        class_of_left.push((0..nx).map(|e| class_index[uf.find(e)].unwrap()).collect());
        class_of_right.push(
            (0..ny)
                .map(|e| class_index[uf.find(nx + e)].unwrap())
                .collect(),
        );
        stages.push(next);
        reps.push(rep_list);
    }

    let act: Vec<Vec<usize>> = base
        .morphisms()
        .map(|m| {
            let t = base.tgt(m);
            let s = base.src(m);
            reps[t]
                .iter()
                .map(|&rep| {
                    if rep < x.stage(t) {
                        class_of_left[s][x.act(m, rep)]
                    } else {
                        class_of_right[s][y.act(m, rep - x.stage(t))]
                    }
                })
                .collect()
        })
        .collect();
    // The induced action is well defined because restrictions send generator
    // pairs to generator pairs; the presheaf validator re-checks functor laws.
    let object = Presheaf::new(base.clone(), stages, act)?;
    let from_left = NatTrans::new(x.clone(), object.clone(), class_of_left.clone())?;
    let from_right = NatTrans::new(y.clone(), object.clone(), class_of_right.clone())?;
    Ok(Pushout {
        object,
        from_left,
        from_right,
        class_of_left,
        class_of_right,
    })
}

/// Binary coproduct as the pushout over the initial presheaf.
pub fn coproduct(x: &Presheaf, y: &Presheaf, budget: &Budget) -> Result<Pushout> {
    pushout(
        &NatTrans::from_initial(x),
        &NatTrans::from_initial(y),
        budget,
    )
}
