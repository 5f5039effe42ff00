use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::fincat::UnionFind;
use crate::latdual::algebra::{enum_homs, opens_algebra, quotient, PresentedAlgebra};
use crate::latdual::lattice::{FinDistLattice, LatticeHom};

/// The counit at an algebra: the evaluation homomorphism from `a` into the
/// observation algebra of its spectrum, `a |-> (p |-> p(a))`. Returns the
/// homomorphism, the spectrum used to index coordinates, and the observation
/// algebra itself.
pub fn counit(
    a: &PresentedAlgebra,
    budget: &Budget,
) -> Result<(LatticeHom, Vec<LatticeHom>, PresentedAlgebra)> {
    let points = enum_homs(a, budget)?;
    let obs = opens_algebra(&a.base, points.len(), budget)?;
    let jn = a.base.size();
    let map: Vec<usize> = (0..a.size())
        .map(|e| points.iter().fold(0usize, |acc, p| acc * jn + p.apply(e)))
        .collect();
    let hom = LatticeHom::new(a.lattice.clone(), obs.lattice.clone(), map)?;
    // The counit is a homomorphism of algebras over the base: constants go to
    // constant observations.
    for c in 0..jn {
        if hom.apply(a.structure.apply(c)) != obs.structure.apply(c) {
            return Err(Error::NotAHomomorphism {
                details: format!("evaluation map moves the constant {c}"),
            });
        }
    }
    Ok((hom, points, obs))
}

/// The unit at a finite set with `points` elements: sends a point to the
/// evaluation homomorphism on its observation algebra. Returns the unit as an
/// index map into the spectrum, together with the spectrum.
pub fn unit(
    j: &FinDistLattice,
    points: usize,
    budget: &Budget,
) -> Result<(Vec<usize>, Vec<LatticeHom>)> {
    let obs = opens_algebra(j, points, budget)?;
    let spectrum = enum_homs(&obs, budget)?;
    let jn = j.size();
    let map: Vec<usize> = (0..points)
        .map(|x| {
            // Observation index decodes with the first coordinate most
            // significant; evaluation at x reads that digit.
            let eval_map: Vec<usize> = (0..obs.size())
                .map(|idx| {
                    let shift = points - 1 - x;
                    (idx / jn.pow(shift as u32)) % jn
                })
                .collect();
            spectrum
                .binary_search_by(|h| h.map.cmp(&eval_map))
                .expect("evaluation at a point is a homomorphism over the base")
        })
        .collect();
    Ok((map, spectrum))
}

/// An algebra is quasi-coherent exactly when its counit is an isomorphism.
pub fn is_quasi_coherent(a: &PresentedAlgebra, budget: &Budget) -> Result<bool> {
    let (hom, _, _) = counit(a, budget)?;
    Ok(hom.is_bijective())
}

/// A finite set is affine exactly when its unit is a bijection.
pub fn is_affine(j: &FinDistLattice, points: usize, budget: &Budget) -> Result<bool> {
    let (map, spectrum) = unit(j, points, budget)?;
    let mut seen = vec![false; spectrum.len()];
    for &p in &map {
        if seen[p] {
            return Ok(false);
        }
        seen[p] = true;
    }
    Ok(map.len() == spectrum.len())
}

fn principal_congruence(l: &FinDistLattice, a: usize, b: usize) -> Vec<usize> {
    let n = l.size();
    let mut uf = UnionFind::new(n);
    let mut work = vec![(a, b)];
    while let Some((x, y)) = work.pop() {
        if uf.find(x) == uf.find(y) {
            continue;
        }
        uf.union(x, y);
        for c in 0..n {
            work.push((l.meet[x][c], l.meet[y][c]));
            work.push((l.join[x][c], l.join[y][c]));
        }
    }
    normalize_partition(&mut uf, n)
}

fn normalize_partition(uf: &mut UnionFind, n: usize) -> Vec<usize> {
    let mut class_of = vec![usize::MAX; n];
    let mut next = 0usize;
    for e in 0..n {
        let r = uf.find(e);
        if class_of[r] == usize::MAX {
            class_of[r] = next;
            next += 1;
        }
        class_of[e] = class_of[r];
    }
    class_of
}

fn join_partitions(p: &[usize], q: &[usize]) -> Vec<usize> {
    let n = p.len();
    let mut uf = UnionFind::new(n);
    for e in 1..n {
        for f in 0..e {
            if p[e] == p[f] || q[e] == q[f] {
                uf.union(e, f);
            }
        }
    }
    normalize_partition(&mut uf, n)
}

/// Every congruence of the lattice, as normalized class tables in ascending
/// order. Built from principal congruences closed under join; every
/// congruence of a finite lattice is a join of principal ones.
pub fn all_congruences(l: &FinDistLattice, budget: &Budget) -> Result<Vec<Vec<usize>>> {
    let n = l.size();
    budget.admit("congruence generation", n.saturating_mul(n))?;
    let mut set: std::collections::BTreeSet<Vec<usize>> = std::collections::BTreeSet::new();
    set.insert((0..n).collect()); // the discrete congruence
    for a in 0..n {
        for b in a + 1..n {
            set.insert(principal_congruence(l, a, b));
        }
    }
    loop {
        let snapshot: Vec<Vec<usize>> = set.iter().cloned().collect();
        budget.admit(
            "congruence closure",
            snapshot.len().saturating_mul(snapshot.len()),
        )?;
        let mut grew = false;
        for p in &snapshot {
            for q in &snapshot {
                let j = join_partitions(p, q);
                if set.insert(j) {
                    grew = true;
                }
            }
        }
        if !grew {
            return Ok(set.into_iter().collect());
        }
    }
}

/// Outcome of the stable quasi-coherence check: every congruence quotient is
/// tested; the first non-quasi-coherent quotient's congruence is reported.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StabilityReport {
    pub stable: bool,
    pub congruences_checked: usize,
    pub failing_congruence: Option<Vec<usize>>,
}

/// An algebra is stably quasi-coherent when every quotient by a finite set of
/// identifications is quasi-coherent; equivalently, every congruence quotient
/// is.
pub fn is_stably_quasi_coherent(a: &PresentedAlgebra, budget: &Budget) -> Result<StabilityReport> {
    let congs = all_congruences(&a.lattice, budget)?;
    let checked = congs.len();
    for cong in congs {
        // Generating pairs: identify every element with its class leader.
        let mut leader: Vec<Option<usize>> = vec![None; a.size()];
        let mut pairs = Vec::new();
        for (e, &k) in cong.iter().enumerate() {
            match leader[k] {
                None => leader[k] = Some(e),
                Some(l) => pairs.push((l, e)),
            }
        }
        let (q, _) = quotient(a, &pairs)?;
        if !is_quasi_coherent(&q, budget)? {
            return Ok(StabilityReport {
                stable: false,
                congruences_checked: checked,
                failing_congruence: Some(cong),
            });
        }
    }
    Ok(StabilityReport {
        stable: true,
        congruences_checked: checked,
        failing_congruence: None,
    })
}
