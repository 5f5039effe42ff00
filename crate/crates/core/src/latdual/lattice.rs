use crate::error::{Error, Result};

/// A finite bounded distributive lattice on elements `0..size`, given by
/// explicit meet and join tables. Element indices carry no order meaning on
/// their own; the order is `a <= b` iff `a /\ b = a`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FinDistLattice {
    pub meet: Vec<Vec<usize>>,
    pub join: Vec<Vec<usize>>,
    pub bottom: usize,
    pub top: usize,
}

impl FinDistLattice {
    /// Validates every axiom exhaustively and returns the lattice.
    pub fn new(
        meet: Vec<Vec<usize>>,
        join: Vec<Vec<usize>>,
        bottom: usize,
        top: usize,
    ) -> Result<Self> {
        let l = FinDistLattice {
            meet,
            join,
            bottom,
            top,
        };
        l.validate()?;
        Ok(l)
    }

    pub fn size(&self) -> usize {
        self.meet.len()
    }

    pub fn meet_of(&self, a: usize, b: usize) -> usize {
        self.meet[a][b]
    }

    pub fn join_of(&self, a: usize, b: usize) -> usize {
        self.join[a][b]
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.meet[a][b] == a
    }

    fn check_table(&self, name: &str, table: &[Vec<usize>]) -> Result<()> {
        let n = self.size();
        if table.len() != n {
            return Err(Error::LatticeAxiomFailure {
                axiom: format!("{name} table has one row per element"),
                witness: format!("{} rows for {} elements", table.len(), n),
            });
        }
        for (a, row) in table.iter().enumerate() {
            if row.len() != n {
                return Err(Error::LatticeAxiomFailure {
                    axiom: format!("{name} table is square"),
                    witness: format!("row {a} has {} entries", row.len()),
                });
            }
            for (b, &v) in row.iter().enumerate() {
                if v >= n {
                    return Err(Error::LatticeAxiomFailure {
                        axiom: format!("{name} lands in the carrier"),
                        witness: format!("({a}, {b}) -> {v}"),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.size();
        if n == 0 {
            return Err(Error::LatticeAxiomFailure {
                axiom: "carrier is nonempty".into(),
                witness: "0 elements".into(),
            });
        }
        self.check_table("meet", &self.meet)?;
        self.check_table("join", &self.join)?;
        if self.bottom >= n || self.top >= n {
            return Err(Error::LatticeAxiomFailure {
                axiom: "bounds are elements".into(),
                witness: format!("bottom {} top {}", self.bottom, self.top),
            });
        }
        for a in 0..n {
            for b in 0..n {
                if self.meet[a][b] != self.meet[b][a] {
                    return Err(Error::LatticeAxiomFailure {
                        axiom: "meet commutes".into(),
                        witness: format!("({a}, {b})"),
                    });
                }
                if self.join[a][b] != self.join[b][a] {
                    return Err(Error::LatticeAxiomFailure {
                        axiom: "join commutes".into(),
                        witness: format!("({a}, {b})"),
                    });
                }
                if self.join[a][self.meet[a][b]] != a {
                    return Err(Error::LatticeAxiomFailure {
                        axiom: "absorption a \\/ (a /\\ b) = a".into(),
                        witness: format!("({a}, {b})"),
                    });
                }
                if self.meet[a][self.join[a][b]] != a {
                    return Err(Error::LatticeAxiomFailure {
                        axiom: "absorption a /\\ (a \\/ b) = a".into(),
                        witness: format!("({a}, {b})"),
                    });
                }
            }
            if self.meet[a][self.bottom] != self.bottom {
                return Err(Error::LatticeAxiomFailure {
                    axiom: "bottom is least".into(),
                    witness: format!("{a}"),
                });
            }
            if self.join[a][self.top] != self.top {
                return Err(Error::LatticeAxiomFailure {
                    axiom: "top is greatest".into(),
                    witness: format!("{a}"),
                });
            }
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if self.meet[a][self.meet[b][c]] != self.meet[self.meet[a][b]][c] {
                        return Err(Error::LatticeAxiomFailure {
                            axiom: "meet associates".into(),
                            witness: format!("({a}, {b}, {c})"),
                        });
                    }
                    if self.join[a][self.join[b][c]] != self.join[self.join[a][b]][c] {
                        return Err(Error::LatticeAxiomFailure {
                            axiom: "join associates".into(),
                            witness: format!("({a}, {b}, {c})"),
                        });
                    }
                    if self.meet[a][self.join[b][c]]
                        != self.join[self.meet[a][b]][self.meet[a][c]]
                    {
                        return Err(Error::LatticeAxiomFailure {
                            axiom: "meet distributes over join".into(),
                            witness: format!("({a}, {b}, {c})"),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    /// The chain `0 < 1 < ... < n-1`.
    pub fn chain(n: usize) -> Self {
        let meet = (0..n).map(|a| (0..n).map(|b| a.min(b)).collect()).collect();
        let join = (0..n).map(|a| (0..n).map(|b| a.max(b)).collect()).collect();
        FinDistLattice {
            meet,
            join,
            bottom: 0,
            top: n - 1,
        }
    }

    /// Componentwise product; element `(x, y)` has index `x * |B| + y`.
    pub fn product(a: &FinDistLattice, b: &FinDistLattice) -> Self {
        let (na, nb) = (a.size(), b.size());
        let n = na * nb;
        let mut meet = vec![vec![0; n]; n];
        let mut join = vec![vec![0; n]; n];
        for xa in 0..na {
            for ya in 0..nb {
                for xb in 0..na {
                    for yb in 0..nb {
                        let p = xa * nb + ya;
                        let q = xb * nb + yb;
                        meet[p][q] = a.meet[xa][xb] * nb + b.meet[ya][yb];
                        join[p][q] = a.join[xa][xb] * nb + b.join[ya][yb];
                    }
                }
            }
        }
        FinDistLattice {
            meet,
            join,
            bottom: a.bottom * nb + b.bottom,
            top: a.top * nb + b.top,
        }
    }

    /// The four-element Boolean square: two incomparable points between the
    /// bounds.
    pub fn diamond() -> Self {
        Self::product(&Self::chain(2), &Self::chain(2))
    }
}

/// A bound-preserving lattice homomorphism between finite lattices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeHom {
    pub source: FinDistLattice,
    pub target: FinDistLattice,
    pub map: Vec<usize>,
}

impl LatticeHom {
    pub fn new(source: FinDistLattice, target: FinDistLattice, map: Vec<usize>) -> Result<Self> {
        let h = LatticeHom {
            source,
            target,
            map,
        };
        h.validate()?;
        Ok(h)
    }

    pub fn apply(&self, a: usize) -> usize {
        self.map[a]
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.source.size();
        if self.map.len() != n {
            return Err(Error::NotAHomomorphism {
                details: format!("map has {} entries for {} elements", self.map.len(), n),
            });
        }
        if let Some(&v) = self.map.iter().find(|&&v| v >= self.target.size()) {
            return Err(Error::NotAHomomorphism {
                details: format!("value {v} outside the target carrier"),
            });
        }
        if self.map[self.source.bottom] != self.target.bottom {
            return Err(Error::NotAHomomorphism {
                details: "bottom is not preserved".into(),
            });
        }
        if self.map[self.source.top] != self.target.top {
            return Err(Error::NotAHomomorphism {
                details: "top is not preserved".into(),
            });
        }
        for a in 0..n {
            for b in 0..n {
                if self.map[self.source.meet[a][b]] != self.target.meet[self.map[a]][self.map[b]] {
                    return Err(Error::NotAHomomorphism {
                        details: format!("meet not preserved at ({a}, {b})"),
                    });
                }
                if self.map[self.source.join[a][b]] != self.target.join[self.map[a]][self.map[b]] {
                    return Err(Error::NotAHomomorphism {
                        details: format!("join not preserved at ({a}, {b})"),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn is_bijective(&self) -> bool {
        if self.source.size() != self.target.size() {
            return false;
        }
        let mut seen = vec![false; self.target.size()];
        for &v in &self.map {
            if seen[v] {
                return false;
            }
            seen[v] = true;
        }
        true
    }

    pub fn identity(l: &FinDistLattice) -> Self {
        LatticeHom {
            source: l.clone(),
            target: l.clone(),
            map: (0..l.size()).collect(),
        }
    }

    pub fn then(&self, other: &LatticeHom) -> Result<LatticeHom> {
        if self.target != other.source {
            return Err(Error::SourceMismatch {
                details: "lattice homs do not compose".into(),
            });
        }
        Ok(LatticeHom {
            source: self.source.clone(),
            target: other.target.clone(),
            map: self.map.iter().map(|&v| other.map[v]).collect(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chains_and_diamond_are_valid() {
        for n in 1..=4 {
            FinDistLattice::chain(n).validate().unwrap();
        }
        FinDistLattice::diamond().validate().unwrap();
    }

    #[test]
    fn pentagon_style_table_fails_distributivity() {
        // Corrupt the diamond by redirecting one join entry; some axiom
        // (absorption or distributivity) must fire.
        let mut l = FinDistLattice::diamond();
        l.join[1][2] = 2; // a \/ b should be top
        assert!(matches!(
            l.validate(),
            Err(Error::LatticeAxiomFailure { .. })
        ));
    }

    #[test]
    fn end_preserving_cut_maps_are_homs() {
        let three = FinDistLattice::chain(3);
        let two = FinDistLattice::chain(2);
        LatticeHom::new(three.clone(), two.clone(), vec![0, 0, 1]).unwrap();
        LatticeHom::new(three.clone(), two.clone(), vec![0, 1, 1]).unwrap();
        assert!(LatticeHom::new(three, two, vec![0, 1, 0]).is_err());
    }

    #[test]
    fn diamond_projections_are_homs() {
        let d = FinDistLattice::diamond();
        let two = FinDistLattice::chain(2);
        // left factor projection: index x*2+y -> x
        LatticeHom::new(d.clone(), two.clone(), vec![0, 0, 1, 1]).unwrap();
        // right factor projection
        LatticeHom::new(d, two, vec![0, 1, 0, 1]).unwrap();
    }
}
