use std::collections::HashMap;
use std::sync::Arc;

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::fincat::category::{MorId, ObjId};
use crate::fincat::limits::{product, Product};
use crate::fincat::presheaf::{NatTrans, Presheaf};

/// One element of an exponential stage: for each arrow `m: d -> c` into the
/// stage object (listed by morphism index), a function `X(d) -> Y(d)`,
/// natural in the arrow. Stored as a value table.
pub type Family = Vec<Vec<usize>>;

/// The exponential `Y^X` together with decode tables for its stage elements.
/// Element order at each stage is lexicographic in the flattened table, so
/// the numbering is canonical.
#[derive(Debug, Clone)]
pub struct ExpData {
    pub object: Presheaf,
    /// families[c][e] decodes element `e` of stage `c`.
    pub families: Vec<Vec<Family>>,
    index: Vec<HashMap<Family, usize>>,
    pub exponent: Presheaf,
    pub body: Presheaf,
}

impl ExpData {
    /// Value of family `e` at stage `c` on arrow `m` (with `tgt(m) = c`) and
    /// element `x` of `X(src m)`.
    pub fn value(&self, c: ObjId, e: usize, m: MorId, x: usize) -> usize {
        let pos = self.object.base().arrow_pos(m);
        self.families[c][e][pos][x]
    }

    /// Evaluation at the identity arrow: the function `X(c) -> Y(c)` that the
    /// family induces at its own stage.
    pub fn eval(&self, c: ObjId, e: usize, x: usize) -> usize {
        self.value(c, e, self.object.base().identity(c), x)
    }

    pub fn index_of(&self, c: ObjId, fam: &Family) -> Option<usize> {
        self.index[c].get(fam).copied()
    }

    /// The evaluation map `Y^X x X -> Y` together with the product it is
    /// defined on.
    pub fn ev_map(&self, budget: &Budget) -> Result<(Product, NatTrans)> {
        let prod = product(&self.object, &self.exponent, budget)?;
        let base = self.object.base();
        let comps = base
            .objects()
            .map(|c| {
                (0..prod.object.stage(c))
                    .map(|p| {
                        let (e, x) = prod.unpair(c, p);
                        self.eval(c, e, x)
                    })
                    .collect()
            })
            .collect();
        let ev = NatTrans::new(prod.object.clone(), self.body.clone(), comps)?;
        Ok((prod, ev))
    }
}

/// Build `Y^X`. Stage `c` enumerates the natural families over all arrows
/// into `c`; restriction along `g` is precomposition with `g`.
pub fn exponential(x: &Presheaf, y: &Presheaf, budget: &Budget) -> Result<ExpData> {
    if !x.same_base(y) {
        return Err(Error::BaseMismatch);
    }
    let base = Arc::clone(x.base());
    let mut families: Vec<Vec<Family>> = Vec::with_capacity(base.object_count());
    let mut total = 0usize;
    for c in base.objects() {
        let fams = enum_families(x, y, c, budget)?;
        total = total.saturating_add(fams.len());
        budget.admit("exponential", total)?;
        families.push(fams);
    }
    let stages: Vec<usize> = families.iter().map(|v| v.len()).collect();
    let mut index: Vec<HashMap<Family, usize>> = Vec::with_capacity(base.object_count());
    for fams in &families {
        let mut map = HashMap::with_capacity(fams.len());
        for (i, f) in fams.iter().enumerate() {
            map.insert(f.clone(), i);
        }
        index.push(map);
    }
    let act: Vec<Vec<usize>> = base
        .morphisms()
        .map(|g| {
            let c = base.tgt(g);
            let c2 = base.src(g);
            families[c]
                .iter()
                .map(|fam| {
                    let moved: Family = base
                        .arrows_into(c2)
                        .iter()
                        .map(|&m2| {
                            let gm = base.compose(g, m2).expect("composable by construction");
                            fam[base.arrow_pos(gm)].clone()
                        })
                        .collect();
                    *index[c2]
                        .get(&moved)
                        .expect("restriction of a natural family is natural")
                })
                .collect()
        })
        .collect();
    let object = Presheaf::new(base.clone(), stages, act)?;
    Ok(ExpData {
        object,
        families,
        index,
        exponent: x.clone(),
        body: y.clone(),
    })
}

/// One naturality constraint between two value cells of a family.
struct NatEq {
    n: MorId,
    from_cell: usize,
    to_cell: usize,
}

/// Enumerate the natural families at one stage by backtracking over value
/// cells with early naturality pruning. Output is sorted lexicographically.
fn enum_families(x: &Presheaf, y: &Presheaf, c: ObjId, budget: &Budget) -> Result<Vec<Family>> {
    let base = x.base();
    let arrows: Vec<MorId> = base.arrows_into(c).to_vec();
    let npos = arrows.len();
    let dom_sizes: Vec<usize> = arrows.iter().map(|&m| x.stage(base.src(m))).collect();
    let cod_sizes: Vec<usize> = arrows.iter().map(|&m| y.stage(base.src(m))).collect();
    let mut offsets = Vec::with_capacity(npos);
    let mut cells = 0usize;
    for &d in &dom_sizes {
        offsets.push(cells);
        cells += d;
    }
    // If some arrow has a nonempty domain but empty codomain there are no
    // families at all.
    if (0..npos).any(|p| dom_sizes[p] > 0 && cod_sizes[p] == 0) {
        return Ok(Vec::new());
    }

    // Naturality: for m: d -> c at position p and n: e -> d,
    //   fam[pos(m.n)][X.act(n, x)] = Y.act(n, fam[p][x]).
    // Each instance links cell (p, x) to cell (pos(m.n), X.act(n, x)).
    // Constraints are indexed by the later of the two cells.
    let mut eqs_by_cell: Vec<Vec<NatEq>> = (0..cells).map(|_| Vec::new()).collect();
    for (p, &m) in arrows.iter().enumerate() {
        let d = base.src(m);
        for n in base.morphisms() {
            if base.tgt(n) != d {
                continue;
            }
            let mn = base.compose(m, n).expect("composable");
            let p2 = arrows.binary_search(&mn).expect("arrow into c");
            for xv in 0..x.stage(d) {
                let from_cell = offsets[p] + xv;
                let to_cell = offsets[p2] + x.act(n, xv);
                let key = from_cell.max(to_cell);
                eqs_by_cell[key].push(NatEq {
                    n,
                    from_cell,
                    to_cell,
                });
            }
        }
    }

    let cell_cod: Vec<usize> = (0..npos)
        .flat_map(|p| std::iter::repeat(cod_sizes[p]).take(dom_sizes[p]))
        .collect();

    let mut out: Vec<Family> = Vec::new();
    let mut assign = vec![0usize; cells];
    fn dfs(
        depth: usize,
        cells: usize,
        assign: &mut Vec<usize>,
        cell_cod: &[usize],
        eqs_by_cell: &[Vec<NatEq>],
        y: &Presheaf,
        dom_sizes: &[usize],
        offsets: &[usize],
        out: &mut Vec<Family>,
        budget: &Budget,
    ) -> Result<()> {
        if depth == cells {
            let fam: Family = (0..dom_sizes.len())
                .map(|p| assign[offsets[p]..offsets[p] + dom_sizes[p]].to_vec())
                .collect();
            out.push(fam);
            if out.len() > budget.max_elements {
                return Err(Error::budget("exponential stage", budget.max_elements));
            }
            return Ok(());
        }
        for v in 0..cell_cod[depth] {
            assign[depth] = v;
            let ok = eqs_by_cell[depth]
                .iter()
                .all(|eq| y.act(eq.n, assign[eq.from_cell]) == assign[eq.to_cell]);
            if ok {
                dfs(
                    depth + 1,
                    cells,
                    assign,
                    cell_cod,
                    eqs_by_cell,
                    y,
                    dom_sizes,
                    offsets,
                    out,
                    budget,
                )?;
            }
        }
        Ok(())
    }
    dfs(
        0,
        cells,
        &mut assign,
        &cell_cod,
        &eqs_by_cell,
        y,
        &dom_sizes,
        &offsets,
        &mut out,
        budget,
    )?;
    Ok(out)
}

/// Transpose `t: W x X -> Y` to `W -> Y^X` through the cartesian closed
/// structure. `prod` must be the product the map is defined on.
pub fn curry(t: &NatTrans, prod: &Product, exp: &ExpData) -> Result<NatTrans> {
    let w = prod.left.target();
    let x = prod.right.target();
    if x != &exp.exponent || t.target() != &exp.body || t.source() != &prod.object {
        return Err(Error::IllTyped {
            details: "curry: map, product, and exponential do not line up".into(),
        });
    }
    let base = w.base();
    let mut comps: Vec<Vec<usize>> = Vec::with_capacity(base.object_count());
    for c in base.objects() {
        let arrows = base.arrows_into(c);
        let mut col = Vec::with_capacity(w.stage(c));
        for wv in 0..w.stage(c) {
            let fam: Family = arrows
                .iter()
                .map(|&m| {
                    let d = base.src(m);
                    let wd = w.act(m, wv);
                    (0..x.stage(d))
                        .map(|xv| t.apply(d, prod.pair_index(d, wd, xv)))
                        .collect()
                })
                .collect();
            let idx = exp.index_of(c, &fam).ok_or_else(|| Error::IllTyped {
                details: "curry: transpose family missing from exponential".into(),
            })?;
            col.push(idx);
        }
        comps.push(col);
    }
    NatTrans::new(w.clone(), exp.object.clone(), comps)
}

/// Inverse transpose: from `s: W -> Y^X` back to `W x X -> Y`.
pub fn uncurry(s: &NatTrans, prod: &Product, exp: &ExpData) -> Result<NatTrans> {
    let w = prod.left.target();
    let x = prod.right.target();
    if s.source() != w || s.target() != &exp.object || x != &exp.exponent {
        return Err(Error::IllTyped {
            details: "uncurry: map, product, and exponential do not line up".into(),
        });
    }
    let base = w.base();
    let comps = base
        .objects()
        .map(|c| {
            (0..prod.object.stage(c))
                .map(|p| {
                    let (wv, xv) = prod.unpair(c, p);
                    exp.eval(c, s.apply(c, wv), xv)
                })
                .collect()
        })
        .collect();
    NatTrans::new(prod.object.clone(), exp.body.clone(), comps)
}

/// Precomposition `C^B -> C^A` along `f: A -> B`: the contravariant action of
/// the exponential on its exponent.
pub fn precompose(exp_b: &ExpData, exp_a: &ExpData, f: &NatTrans) -> Result<NatTrans> {
    if f.source() != &exp_a.exponent || f.target() != &exp_b.exponent || exp_a.body != exp_b.body {
        return Err(Error::IllTyped {
            details: "precompose: exponentials do not match the map".into(),
        });
    }
    let base = f.source().base();
    let mut comps: Vec<Vec<usize>> = Vec::with_capacity(base.object_count());
    for c in base.objects() {
        let arrows = base.arrows_into(c);
        let mut col = Vec::with_capacity(exp_b.object.stage(c));
        for e in 0..exp_b.object.stage(c) {
            let fam: Family = arrows
                .iter()
                .enumerate()
                .map(|(p, &m)| {
                    let d = base.src(m);
                    (0..exp_a.exponent.stage(d))
                        .map(|a| exp_b.families[c][e][p][f.apply(d, a)])
                        .collect()
                })
                .collect();
            let idx = exp_a.index_of(c, &fam).ok_or_else(|| Error::IllTyped {
                details: "precompose: restricted family missing from exponential".into(),
            })?;
            col.push(idx);
        }
        comps.push(col);
    }
    NatTrans::new(exp_b.object.clone(), exp_a.object.clone(), comps)
}
