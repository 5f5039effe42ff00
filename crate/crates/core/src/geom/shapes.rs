use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fincat::{product, NatTrans, Presheaf, Product, Subobject};
use crate::geom::model::Model;
use crate::kripke::{force, Formula, Term, TypeExpr};

/// A family presented as a map: the total object together with its
/// projection to the object it is fibered over.
#[derive(Debug, Clone)]
pub struct FiberedObject {
    pub total: Presheaf,
    pub projection: NatTrans,
}

impl FiberedObject {
    pub fn new(total: Presheaf, projection: NatTrans) -> Result<FiberedObject> {
        if projection.source() != &total {
            return Err(Error::SourceMismatch {
                details: "fibered object projection must start at the total object".into(),
            });
        }
        projection.validate()?;
        Ok(FiberedObject { total, projection })
    }
}

/// The `n`-cube `I^n` as an iterated binary product, with its coordinate
/// projections. The element numbering is the mixed-radix order with the
/// first coordinate most significant, matching the context numbering the
/// forcing engine uses.
#[derive(Debug, Clone)]
pub struct CubeData {
    pub object: Presheaf,
    pub coords: Vec<NatTrans>,
    /// factors[k] pairs the k-fold cube with one more interval factor.
    pub factors: Vec<Product>,
}

impl CubeData {
    /// Position of a coordinate tuple at stage `c`.
    pub fn index_of(&self, c: usize, xs: &[usize]) -> usize {
        assert_eq!(xs.len(), self.factors.len(), "one coordinate per factor");
        let mut idx = 0;
        for (k, &x) in xs.iter().enumerate() {
            idx = self.factors[k].pair_index(c, idx, x);
        }
        idx
    }
}

pub fn cube(m: &Model, n: usize) -> Result<CubeData> {
    let mut object = Presheaf::terminal(Arc::clone(m.base()));
    let mut coords: Vec<NatTrans> = Vec::new();
    let mut factors: Vec<Product> = Vec::new();
    for _ in 0..n {
        let prod = product(&object, m.interval(), m.budget())?;
        coords = coords
            .iter()
            .map(|old| prod.left.then(old))
            .collect::<Result<Vec<_>>>()?;
        coords.push(prod.right.clone());
        object = prod.object.clone();
        factors.push(prod);
    }
    Ok(CubeData {
        object,
        coords,
        factors,
    })
}

/// The `n`-simplex: the subobject of `I^n` cut out by the descending-chain
/// formula `x1 >= x2 >= ... >= xn`, realized as a presheaf with its
/// inclusion. The chain conditions are forced as actual formulas, so the
/// simplex is exactly the truth table of its defining sentence.
#[derive(Debug, Clone)]
pub struct SimplexData {
    pub ambient: CubeData,
    pub sub: Subobject,
    pub object: Presheaf,
    pub include: NatTrans,
    /// positions[c][p] locates ambient element `p` inside the realized
    /// simplex, when it is a member.
    pub positions: Vec<Vec<Option<usize>>>,
}

pub fn simplex(m: &Model, n: usize) -> Result<SimplexData> {
    let ambient = cube(m, n)?;
    let ctx: Vec<(String, TypeExpr)> = (1..=n)
        .map(|k| (format!("x{k}"), TypeExpr::named("J")))
        .collect();
    // x >= y is rendered as meet(x, y) = y.
    let mut phi = Formula::Top;
    for k in 1..n {
        let upper = Term::ident(&format!("x{k}"));
        let lower = Term::ident(&format!("x{}", k + 1));
        let cond = Formula::eq(Term::app2("meet", upper, lower.clone()), lower);
        phi = if k == 1 { cond } else { Formula::and(phi, cond) };
    }
    let verdict = force(m.signature(), &ctx, &phi)?;
    if verdict.truth.ambient().stages() != ambient.object.stages() {
        return Err(Error::ClauseDisagreement {
            what: "simplex carrier".into(),
            details: "forcing context disagrees with the cube construction".into(),
        });
    }
    let sub = Subobject::new(ambient.object.clone(), verdict.truth.members().to_vec())?;
    let (object, include, positions) = sub.as_presheaf();
    Ok(SimplexData {
        ambient,
        sub,
        object,
        include,
        positions,
    })
}

/// The generic slice of the interval: the subobject of `I x I` of pairs
/// `i >= j`, fibered over the first coordinate. The fiber over a point `i`
/// is the lower set of `i`.
pub fn slice(m: &Model) -> Result<FiberedObject> {
    let s = simplex(m, 2)?;
    let projection = s.include.then(&s.ambient.coords[0])?;
    FiberedObject::new(s.object, projection)
}

/// The inner horn: the part of the triangle where the second coordinate is
/// false or the first is true, as a union of the two indicator pullbacks.
#[derive(Debug, Clone)]
pub struct HornData {
    pub simplex: SimplexData,
    pub sub: Subobject,
    pub object: Presheaf,
    pub include: NatTrans,
    pub positions: Vec<Vec<Option<usize>>>,
}

pub fn horn(m: &Model) -> Result<HornData> {
    let simplex = simplex(m, 2)?;
    let i_map = simplex.include.then(&simplex.ambient.coords[0])?;
    let j_map = simplex.include.then(&simplex.ambient.coords[1])?;
    let sub = m.is_f_of(&j_map)?.union(&m.is_t_of(&i_map)?)?;
    let (object, include, positions) = sub.as_presheaf();
    Ok(HornData {
        simplex,
        sub,
        object,
        include,
        positions,
    })
}
