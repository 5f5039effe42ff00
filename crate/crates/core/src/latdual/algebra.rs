use std::collections::HashMap;

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::fincat::UnionFind;
use crate::latdual::lattice::{FinDistLattice, LatticeHom};

/// A finitely presented algebra over a coefficient lattice `base`: a bounded
/// distributive lattice `lattice` equipped with a structure homomorphism from
/// `base` and a chosen generator list.
///
/// Every element carries an evaluation vector `v: subsets of generators ->
/// base` (subsets indexed by bitmask). The vector is the element's normal
/// form as a join of meets, `\/_S (v_S /\ /\_{i in S} x_i)`, and it is an
/// evaluation certificate: for any point `h` (homomorphism to `base` over
/// `base`), `h(element) = eval(vector, h(x_1), ..., h(x_n))`. Together with
/// the fact that generators and constants generate everything, this makes
/// point enumeration a finite search over generator images.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PresentedAlgebra {
    pub base: FinDistLattice,
    pub lattice: FinDistLattice,
    pub n_generators: usize,
    /// Element index of each generator.
    pub generator_elem: Vec<usize>,
    /// Evaluation vector of each element, length `2^n_generators`.
    pub vectors: Vec<Vec<usize>>,
    /// The coefficient embedding, a homomorphism `base -> lattice`.
    pub structure: LatticeHom,
    /// Identified pairs of normal forms, accumulated by quotients.
    pub relations: Vec<(Vec<usize>, Vec<usize>)>,
}

/// Tables built pointwise from a validated lattice, or as a congruence
/// quotient of one, satisfy the axioms by construction; the exhaustive
/// triple check is re-run only below this size so large instances stay fast.
const REVALIDATE_LIMIT: usize = 128;

fn finish_lattice(
    meet: Vec<Vec<usize>>,
    join: Vec<Vec<usize>>,
    bottom: usize,
    top: usize,
) -> Result<FinDistLattice> {
    let l = FinDistLattice {
        meet,
        join,
        bottom,
        top,
    };
    if l.size() <= REVALIDATE_LIMIT {
        l.validate()?;
    }
    Ok(l)
}

/// Evaluates a normal-form vector at a tuple of generator images in `j`.
pub fn eval_vector(j: &FinDistLattice, vector: &[usize], images: &[usize]) -> usize {
    let mut acc = j.bottom;
    for (s, &coeff) in vector.iter().enumerate() {
        let mut term = coeff;
        for (i, &img) in images.iter().enumerate() {
            if s & (1 << i) != 0 {
                term = j.meet_of(term, img);
            }
        }
        acc = j.join_of(acc, term);
    }
    acc
}

impl PresentedAlgebra {
    pub fn size(&self) -> usize {
        self.lattice.size()
    }

    /// Interprets a normal-form vector inside the algebra itself, using the
    /// structure homomorphism for coefficients and the generator elements for
    /// variables.
    pub fn interpret_vector(&self, vector: &[usize]) -> usize {
        let mut acc = self.structure.apply(self.base.bottom);
        for (s, &coeff) in vector.iter().enumerate() {
            let mut term = self.structure.apply(coeff);
            for (i, &g) in self.generator_elem.iter().enumerate() {
                if s & (1 << i) != 0 {
                    term = self.lattice.meet_of(term, g);
                }
            }
            acc = self.lattice.join_of(acc, term);
        }
        acc
    }

    pub fn validate(&self) -> Result<()> {
        self.lattice.validate()?;
        self.structure.validate()?;
        if self.structure.source != self.base || self.structure.target != self.lattice {
            return Err(Error::InvalidModel {
                details: "structure homomorphism endpoints do not match the algebra".into(),
            });
        }
        let width = 1usize << self.n_generators;
        if self.generator_elem.len() != self.n_generators || self.vectors.len() != self.size() {
            return Err(Error::InvalidModel {
                details: "generator or vector tables have the wrong arity".into(),
            });
        }
        for v in &self.vectors {
            if v.len() != width || v.iter().any(|&c| c >= self.base.size()) {
                return Err(Error::InvalidModel {
                    details: "normal-form vector outside the coefficient lattice".into(),
                });
            }
        }
        for (l, r) in &self.relations {
            if self.interpret_vector(l) != self.interpret_vector(r) {
                return Err(Error::InvalidModel {
                    details: "a defining relation does not hold in the algebra".into(),
                });
            }
        }
        Ok(())
    }
}

/// The free algebra on `n` generators over `j`: elements are the monotone
/// maps from subsets of the generator set to `j`, with pointwise operations.
/// The generator `x_i` is the indicator of `i`-membership; coefficients embed
/// as constant maps. Elements are ordered lexicographically by their vector.
pub fn free_algebra(j: &FinDistLattice, n: usize, budget: &Budget) -> Result<PresentedAlgebra> {
    j.validate()?;
    let width = 1usize << n;
    let mut candidates = 1usize;
    for _ in 0..width {
        candidates = candidates.saturating_mul(j.size());
    }
    budget.admit("free algebra enumeration", candidates)?;

    // Enumerate all vectors in lexicographic order, keep the monotone ones.
    let mut vectors: Vec<Vec<usize>> = Vec::new();
    let mut v = vec![0usize; width];
    loop {
        let monotone = (0..width).all(|s| {
            (0..n).all(|i| {
                let t = s | (1 << i);
                t == s || j.leq(v[s], v[t])
            })
        });
        if monotone {
            vectors.push(v.clone());
        }
        // Odometer step over digit tuples, most significant position first.
        let mut pos = width;
        loop {
            if pos == 0 {
                break;
            }
            pos -= 1;
            v[pos] += 1;
            if v[pos] < j.size() {
                break;
            }
            v[pos] = 0;
        }
        if pos == 0 && v[0] == 0 {
            break;
        }
    }

    let index: HashMap<Vec<usize>, usize> = vectors
        .iter()
        .enumerate()
        .map(|(i, v)| (v.clone(), i))
        .collect();
    let m = vectors.len();
    let mut meet = vec![vec![0; m]; m];
    let mut join = vec![vec![0; m]; m];
    for a in 0..m {
        for b in 0..m {
            let mv: Vec<usize> = (0..width)
                .map(|s| j.meet_of(vectors[a][s], vectors[b][s]))
                .collect();
            let jv: Vec<usize> = (0..width)
                .map(|s| j.join_of(vectors[a][s], vectors[b][s]))
                .collect();
            meet[a][b] = index[&mv];
            join[a][b] = index[&jv];
        }
    }
    let bottom = index[&vec![j.bottom; width]];
    let top = index[&vec![j.top; width]];
    let lattice = finish_lattice(meet, join, bottom, top)?;
    let generator_elem: Vec<usize> = (0..n)
        .map(|i| {
            let gv: Vec<usize> = (0..width)
                .map(|s| if s & (1 << i) != 0 { j.top } else { j.bottom })
                .collect();
            index[&gv]
        })
        .collect();
    let structure = LatticeHom::new(
        j.clone(),
        lattice.clone(),
        (0..j.size()).map(|c| index[&vec![c; width]]).collect(),
    )?;
    let alg = PresentedAlgebra {
        base: j.clone(),
        lattice,
        n_generators: n,
        generator_elem,
        vectors,
        structure,
        relations: Vec::new(),
    };
    alg.validate()?;
    Ok(alg)
}

/// Quotient by the congruence generated by the given element pairs. Returns
/// the quotient algebra together with the projection on element indices.
/// Classes are numbered by least member, so the result is canonical.
pub fn quotient(a: &PresentedAlgebra, pairs: &[(usize, usize)]) -> Result<(PresentedAlgebra, Vec<usize>)> {
    let n = a.size();
    let mut uf = UnionFind::new(n);
    let mut work: Vec<(usize, usize)> = pairs.to_vec();
    while let Some((x, y)) = work.pop() {
        if uf.find(x) == uf.find(y) {
            continue;
        }
        uf.union(x, y);
        for c in 0..n {
            work.push((a.lattice.meet[x][c], a.lattice.meet[y][c]));
            work.push((a.lattice.join[x][c], a.lattice.join[y][c]));
        }
    }
    let mut class_of = vec![usize::MAX; n];
    let mut reps: Vec<usize> = Vec::new();
    for e in 0..n {
        let r = uf.find(e);
        if class_of[r] == usize::MAX {
            class_of[r] = reps.len();
            reps.push(r);
        }
        class_of[e] = class_of[r];
    }
    let m = reps.len();
    let mut meet = vec![vec![0; m]; m];
    let mut join = vec![vec![0; m]; m];
    for (ka, &ra) in reps.iter().enumerate() {
        for (kb, &rb) in reps.iter().enumerate() {
            meet[ka][kb] = class_of[a.lattice.meet[ra][rb]];
            join[ka][kb] = class_of[a.lattice.join[ra][rb]];
        }
    }
    let lattice = finish_lattice(
        meet,
        join,
        class_of[a.lattice.bottom],
        class_of[a.lattice.top],
    )?;
    let structure = LatticeHom::new(
        a.base.clone(),
        lattice.clone(),
        a.structure.map.iter().map(|&v| class_of[v]).collect(),
    )?;
    let mut relations = a.relations.clone();
    relations.extend(
        pairs
            .iter()
            .map(|&(x, y)| (a.vectors[x].clone(), a.vectors[y].clone())),
    );
    let q = PresentedAlgebra {
        base: a.base.clone(),
        lattice,
        n_generators: a.n_generators,
        generator_elem: a.generator_elem.iter().map(|&g| class_of[g]).collect(),
        vectors: reps.iter().map(|&r| a.vectors[r].clone()).collect(),
        structure,
        relations,
    };
    q.validate()?;
    Ok((q, class_of))
}

/// The algebra of observations of a finite set with `points` elements: the
/// `points`-fold power of `j` with pointwise operations. Element index is the
/// mixed-radix encoding of the value tuple, first coordinate most
/// significant. Generators are the coordinate indicators `e_x`.
pub fn opens_algebra(j: &FinDistLattice, points: usize, budget: &Budget) -> Result<PresentedAlgebra> {
    j.validate()?;
    let mut m = 1usize;
    for _ in 0..points {
        m = m.saturating_mul(j.size());
    }
    budget.admit("algebra of observations", m)?;
    let decode = |idx: usize| -> Vec<usize> {
        let mut w = vec![0usize; points];
        let mut rest = idx;
        for x in (0..points).rev() {
            w[x] = rest % j.size();
            rest /= j.size();
        }
        w
    };
    let encode = |w: &[usize]| -> usize { w.iter().fold(0, |acc, &v| acc * j.size() + v) };
    let mut meet = vec![vec![0; m]; m];
    let mut join = vec![vec![0; m]; m];
    for a in 0..m {
        let wa = decode(a);
        for b in 0..m {
            let wb = decode(b);
            let mv: Vec<usize> = (0..points).map(|x| j.meet_of(wa[x], wb[x])).collect();
            let jv: Vec<usize> = (0..points).map(|x| j.join_of(wa[x], wb[x])).collect();
            meet[a][b] = encode(&mv);
            join[a][b] = encode(&jv);
        }
    }
    let lattice = finish_lattice(
        meet,
        join,
        encode(&vec![j.bottom; points]),
        encode(&vec![j.top; points]),
    )?;
    let structure = LatticeHom::new(
        j.clone(),
        lattice.clone(),
        (0..j.size()).map(|c| encode(&vec![c; points])).collect(),
    )?;
    let width = 1usize << points;
    budget.admit("observation normal forms", m.saturating_mul(width))?;
    // Element w = \/_x (w(x) /\ e_x); its evaluation vector joins the values
    // over each subset of coordinates.
    let vectors: Vec<Vec<usize>> = (0..m)
        .map(|idx| {
            let w = decode(idx);
            (0..width)
                .map(|s| {
                    let mut acc = j.bottom;
                    for (x, &value) in w.iter().enumerate() {
                        if s & (1 << x) != 0 {
                            acc = j.join_of(acc, value);
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect();
    let generator_elem: Vec<usize> = (0..points)
        .map(|x| {
            let w: Vec<usize> = (0..points)
                .map(|y| if y == x { j.top } else { j.bottom })
                .collect();
            encode(&w)
        })
        .collect();
    // Coordinates are disjoint: e_x /\ e_y = 0 for x != y.
    let mut relations = Vec::new();
    for x in 0..points {
        for y in x + 1..points {
            let lhs: Vec<usize> = (0..width)
                .map(|s| {
                    if s & (1 << x) != 0 && s & (1 << y) != 0 {
                        j.top
                    } else {
                        j.bottom
                    }
                })
                .collect();
            relations.push((lhs, vec![j.bottom; width]));
        }
    }
    let alg = PresentedAlgebra {
        base: j.clone(),
        lattice,
        n_generators: points,
        generator_elem,
        vectors,
        structure,
        relations,
    };
    alg.validate()?;
    Ok(alg)
}

/// All points of the algebra: homomorphisms to the coefficient lattice that
/// restrict to the identity on coefficients. Enumeration runs over candidate
/// generator images; every returned map is validated, and the list is
/// duplicate-free in lexicographic order of value tables.
pub fn enum_homs(a: &PresentedAlgebra, budget: &Budget) -> Result<Vec<LatticeHom>> {
    let j = &a.base;
    let mut tuples = 1usize;
    for _ in 0..a.n_generators {
        tuples = tuples.saturating_mul(j.size());
    }
    budget.admit("point enumeration", tuples.saturating_mul(a.size().max(1)))?;
    let mut images = vec![0usize; a.n_generators];
    let mut found: Vec<Vec<usize>> = Vec::new();
    loop {
        let map: Vec<usize> = a
            .vectors
            .iter()
            .map(|v| eval_vector(j, v, &images))
            .collect();
        let hom = LatticeHom {
            source: a.lattice.clone(),
            target: j.clone(),
            map,
        };
        let over_base = (0..j.size()).all(|c| hom.map[a.structure.apply(c)] == c);
        if over_base && hom.validate().is_ok() {
            found.push(hom.map);
        }
        // Odometer over generator images.
        let mut pos = a.n_generators;
        loop {
            if pos == 0 {
                break;
            }
            pos -= 1;
            images[pos] += 1;
            if images[pos] < j.size() {
                break;
            }
            images[pos] = 0;
        }
        if pos == 0 && (a.n_generators == 0 || images[0] == 0) {
            break;
        }
    }
    found.sort();
    found.dedup();
    found
        .into_iter()
        .map(|map| LatticeHom::new(a.lattice.clone(), j.clone(), map))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain(n: usize) -> FinDistLattice {
        FinDistLattice::chain(n)
    }

    #[test]
    fn free_algebra_sizes_match_closure_oracle() {
        let b = Budget::default();
        let cases = [
            (chain(2), 1usize, 3usize),
            (chain(2), 0, 2),
            (chain(3), 1, 6),
            (FinDistLattice::diamond(), 1, 9),
            (chain(2), 2, 6),
        ];
        for (j, n, expect) in cases {
            let a = free_algebra(&j, n, &b).unwrap();
            assert_eq!(a.size(), expect, "free algebra on {n} gens");
            // Oracle: saturate constants and generators under the tables.
            let mut in_set = vec![false; a.size()];
            for &g in &a.generator_elem {
                in_set[g] = true;
            }
            for c in 0..j.size() {
                in_set[a.structure.apply(c)] = true;
            }
            loop {
                let mut grew = false;
                let now: Vec<usize> =
                    (0..a.size()).filter(|&e| in_set[e]).collect();
                for &x in &now {
                    for &y in &now {
                        for z in [a.lattice.meet[x][y], a.lattice.join[x][y]] {
                            if !in_set[z] {
                                in_set[z] = true;
                                grew = true;
                            }
                        }
                    }
                }
                if !grew {
                    break;
                }
            }
            assert!(
                in_set.iter().all(|&b| b),
                "constants and generators generate the free algebra"
            );
        }
    }

    #[test]
    fn free_algebra_evaluation_is_pointwise_on_zero_one_tuples() {
        let b = Budget::default();
        let j = chain(3);
        let a = free_algebra(&j, 2, &b).unwrap();
        // Evaluating at 0/1 generator images reads off vector entries.
        for (e, v) in a.vectors.iter().enumerate() {
            for s in 0..4usize {
                let images = [
                    if s & 1 != 0 { j.top } else { j.bottom },
                    if s & 2 != 0 { j.top } else { j.bottom },
                ];
                assert_eq!(eval_vector(&j, v, &images), v[s], "element {e} subset {s}");
            }
        }
    }

    #[test]
    fn quotient_by_nothing_is_identity() {
        let b = Budget::default();
        let a = free_algebra(&chain(3), 1, &b).unwrap();
        let (q, map) = quotient(&a, &[]).unwrap();
        assert_eq!(q.lattice, a.lattice);
        assert_eq!(map, (0..a.size()).collect::<Vec<_>>());
    }

    #[test]
    fn collapsing_the_generator_to_top_gives_the_base() {
        let b = Budget::default();
        let j = chain(2);
        let a = free_algebra(&j, 1, &b).unwrap();
        let x = a.generator_elem[0];
        let one = a.structure.apply(j.top);
        let (q, _) = quotient(&a, &[(x, one)]).unwrap();
        assert_eq!(q.size(), 2);
        assert!(q.structure.is_bijective());
    }

    #[test]
    fn triangle_relation_gives_the_four_element_chain() {
        let b = Budget::default();
        let j = chain(2);
        let a = free_algebra(&j, 2, &b).unwrap();
        let x = a.generator_elem[0];
        let y = a.generator_elem[1];
        // x >= y imposed as x /\ y = y.
        let (q, _) = quotient(&a, &[(a.lattice.meet[x][y], y)]).unwrap();
        assert_eq!(q.size(), 4);
        let points = enum_homs(&q, &b).unwrap();
        assert_eq!(points.len(), 3, "descending pairs over the two-chain");
    }

    #[test]
    fn spec_counts_for_one_variable_polynomials() {
        let b = Budget::default();
        for j in [chain(2), chain(3), FinDistLattice::diamond()] {
            let a = free_algebra(&j, 1, &b).unwrap();
            let points = enum_homs(&a, &b).unwrap();
            assert_eq!(points.len(), j.size(), "one point per interval element");
            for p in &points {
                p.validate().unwrap();
            }
        }
        // The base itself has exactly one point, the identity.
        let j = chain(3);
        let a = free_algebra(&j, 0, &b).unwrap();
        let points = enum_homs(&a, &b).unwrap();
        assert_eq!(points.len(), 1);
    }

    #[test]
    fn observation_algebra_of_two_points_over_two_chain_is_the_square() {
        let b = Budget::default();
        let o = opens_algebra(&chain(2), 2, &b).unwrap();
        assert_eq!(o.size(), 4);
        assert_eq!(o.lattice, FinDistLattice::diamond());
        o.validate().unwrap();
        let empty = opens_algebra(&chain(2), 0, &b).unwrap();
        assert_eq!(empty.size(), 1);
        let single = opens_algebra(&chain(3), 1, &b).unwrap();
        assert_eq!(single.lattice, chain(3));
    }

    #[test]
    fn points_of_observation_algebras_are_evaluations() {
        let b = Budget::default();
        for (j, pts) in [(chain(2), 2usize), (chain(3), 2), (chain(2), 3)] {
            let o = opens_algebra(&j, pts, &b).unwrap();
            let points = enum_homs(&o, &b).unwrap();
            assert_eq!(points.len(), pts, "spectrum recovers the finite set");
        }
    }
}
