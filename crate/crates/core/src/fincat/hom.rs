use std::sync::Arc;

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::fincat::presheaf::{NatTrans, Presheaf};

/// Enumerate all natural transformations `X -> Y` in canonical order
/// (lexicographic in the flattened component table). Backtracking with
/// incremental naturality pruning; aborts past the budget.
pub fn enum_nat_trans(x: &Presheaf, y: &Presheaf, budget: &Budget) -> Result<Vec<NatTrans>> {
    if !x.same_base(y) {
        return Err(Error::BaseMismatch);
    }
    let base = Arc::clone(x.base());
    // Slots in canonical order: (object, element).
    let mut slots: Vec<(usize, usize)> = Vec::new();
    for c in base.objects() {
        for e in 0..x.stage(c) {
            slots.push((c, e));
        }
    }
    let slot_index = |c: usize, e: usize| -> usize {
        let mut idx = 0;
        for cc in 0..c {
            idx += x.stage(cc);
        }
        idx + e
    };
    // For pruning: per slot, the naturality equations that become fully
    // determined once this slot is the last one assigned. Equation for
    // morphism m and element e at stage tgt(m): Y.act(m, comp[tgt](e)) ==
    // comp[src](X.act(m, e)). It involves slots (tgt(m), e) and
    // (src(m), X.act(m, e)).
    let mut eqs_by_slot: Vec<Vec<(usize, usize, usize, usize)>> = vec![Vec::new(); slots.len()];
    for m in base.morphisms() {
        let (s, t) = (base.src(m), base.tgt(m));
        for e in 0..x.stage(t) {
            let es = x.act(m, e);
            let a = slot_index(t, e);
            let b = slot_index(s, es);
            let eq = (m, e, a, b);
            eqs_by_slot[a.max(b)].push(eq);
        }
    }

    let mut assign: Vec<usize> = vec![0; slots.len()];
    // Depth-first over slots; values tried in increasing order gives the
    // canonical output order.
    fn dfs(
        depth: usize,
        slots: &[(usize, usize)],
        assign: &mut Vec<usize>,
        y: &Presheaf,
        eqs_by_slot: &[Vec<(usize, usize, usize, usize)>],
        tables: &mut Vec<Vec<usize>>,
        budget: &Budget,
    ) -> Result<()> {
        if depth == slots.len() {
            tables.push(assign.clone());
            if tables.len() > budget.max_elements {
                return Err(Error::budget(
                    "natural transformation enumeration",
                    budget.max_elements,
                ));
            }
            return Ok(());
        }
        let (c, _e) = slots[depth];
        for v in 0..y.stage(c) {
            assign[depth] = v;
            let ok = eqs_by_slot[depth]
                .iter()
                .all(|&(m, _e, a, b)| y.act(m, assign[a]) == assign[b]);
            if ok {
                dfs(depth + 1, slots, assign, y, eqs_by_slot, tables, budget)?;
            }
        }
        Ok(())
    }

    // Empty stages at some objects mean zero slots there; handled uniformly.
    let mut tables = Vec::new();
    dfs(0, &slots, &mut assign, y, &eqs_by_slot, &mut tables, budget)?;

    let mut out = Vec::with_capacity(tables.len());
    for table in tables {
        let mut comps: Vec<Vec<usize>> = base.objects().map(|c| Vec::with_capacity(x.stage(c))).collect();
        for (i, &(c, _)) in slots.iter().enumerate() {
            comps[c].push(table[i]);
        }
        out.push(NatTrans::new(x.clone(), y.clone(), comps)?);
    }
    Ok(out)
}

/// Global points `1 -> X`, i.e. restriction-compatible families of stage
/// elements.
pub fn global_points(x: &Presheaf, budget: &Budget) -> Result<Vec<NatTrans>> {
    enum_nat_trans(&Presheaf::terminal(Arc::clone(x.base())), x, budget)
}

/// Monos are the stagewise injections.
pub fn is_mono(f: &NatTrans) -> bool {
    let base = f.source().base();
    base.objects().all(|c| {
        let mut seen = vec![false; f.target().stage(c)];
        (0..f.source().stage(c)).all(|e| {
            let v = f.apply(c, e);
            !std::mem::replace(&mut seen[v], true)
        })
    })
}

/// Epis are the stagewise surjections.
pub fn is_epi(f: &NatTrans) -> bool {
    let base = f.source().base();
    base.objects().all(|c| {
        let mut seen = vec![false; f.target().stage(c)];
        for e in 0..f.source().stage(c) {
            seen[f.apply(c, e)] = true;
        }
        seen.into_iter().all(|b| b)
    })
}

pub fn is_iso(f: &NatTrans) -> bool {
    is_mono(f) && is_epi(f)
}

/// The two-sided inverse of a stagewise bijection, if it is one.
pub fn inverse_of(f: &NatTrans) -> Option<NatTrans> {
    if !is_iso(f) {
        return None;
    }
    let base = f.source().base();
    let comps = base
        .objects()
        .map(|c| {
            let mut inv = vec![0; f.target().stage(c)];
            for e in 0..f.source().stage(c) {
                inv[f.apply(c, e)] = e;
            }
            inv
        })
        .collect();
    Some(
        NatTrans::new(f.target().clone(), f.source().clone(), comps)
            .expect("inverse of a natural bijection is natural"),
    )
}

/// Search for an isomorphism `X -> Y` by enumeration. Returns the first one
/// in canonical order.
pub fn find_iso(x: &Presheaf, y: &Presheaf, budget: &Budget) -> Result<Option<NatTrans>> {
    if x.base().objects().any(|c| x.stage(c) != y.stage(c)) {
        return Ok(None);
    }
    Ok(enum_nat_trans(x, y, budget)?.into_iter().find(is_iso))
}
