//! Cone data: the exact shape of a map off the cone on an object — a
//! vertex point together with a cylinder whose zero end collapses onto it.
//! Enumerating all such data, checking the one-to-one correspondence with
//! maps off the cone, and restricting maps off the partial-map object down
//! to a datum.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::fincat::{enum_nat_trans, global_points, NatTrans, Presheaf};
use crate::geom::{scone, sigma, Connectedness, Model, SconeData};

/// Where a map off the cone on `X` sends its pieces: the cone point goes to
/// `bottom` and the cylinder `I x X` to `cylinder`, subject to the end
/// equation that the zero end of the cylinder is constant at `bottom`. In
/// one-element-set semantics the gluing homotopy of such a datum is exactly
/// that equation, so the two fields carry all the data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SierpinskiConeDatum {
    /// `1 -> C`: the image of the cone point.
    pub bottom: NatTrans,
    /// `I x X -> C`: the image of the cylinder.
    pub cylinder: NatTrans,
}

/// Whether the zero end of `cylinder` lands on `bottom` at every stage.
fn end_equation_holds(m: &Model, sc: &SconeData, bottom: &NatTrans, cylinder: &NatTrans) -> bool {
    let base = m.base();
    base.objects().all(|c| {
        let bot = m.lattice().stages[c].bottom;
        let target = bottom.apply(c, 0);
        (0..sc.iota.source().stage(c))
            .all(|x0| cylinder.apply(c, sc.cyl.pair_index(c, bot, x0)) == target)
    })
}

impl SierpinskiConeDatum {
    /// Validate a vertex-cylinder pair against the cone `sc`: the sources
    /// and targets must line up and the end equation must hold.
    pub fn new(
        m: &Model,
        sc: &SconeData,
        bottom: NatTrans,
        cylinder: NatTrans,
    ) -> Result<SierpinskiConeDatum> {
        if bottom.source() != sc.bottom.source() {
            return Err(Error::SourceMismatch {
                details: "the vertex must be a global point".into(),
            });
        }
        if cylinder.source() != &sc.cyl.object {
            return Err(Error::SourceMismatch {
                details: "the cylinder must start at the product of the interval with the cone base"
                    .into(),
            });
        }
        if bottom.target() != cylinder.target() {
            return Err(Error::TargetMismatch {
                details: "the vertex and the cylinder must land in the same object".into(),
            });
        }
        if !end_equation_holds(m, sc, &bottom, &cylinder) {
            return Err(Error::IllTyped {
                details: "the zero end of the cylinder does not collapse onto the vertex".into(),
            });
        }
        Ok(SierpinskiConeDatum { bottom, cylinder })
    }

    /// The map off the cone carrying this datum, through the cone's own
    /// colimit description.
    pub fn as_map(&self, sc: &SconeData) -> Result<NatTrans> {
        sc.po.mediate(&self.bottom, &self.cylinder)
    }

    /// Stable identity for set membership: the raw components of both maps.
    fn key(&self) -> (Vec<Vec<usize>>, Vec<Vec<usize>>) {
        let grab = |f: &NatTrans| -> Vec<Vec<usize>> {
            f.source()
                .base()
                .objects()
                .map(|c| f.component(c).to_vec())
                .collect()
        };
        (grab(&self.bottom), grab(&self.cylinder))
    }
}

/// Every datum on `C` over the cone on `X`, with the verified one-to-one
/// correspondence against maps `X_bot -> C`.
#[derive(Debug)]
pub struct SconeDataEnum {
    pub scone: SconeData,
    /// All valid data; `data[k]` is the restriction of `maps[k]`.
    pub data: Vec<SierpinskiConeDatum>,
    /// All maps off the cone, one per datum.
    pub maps: Vec<NatTrans>,
}

/// Enumerate the cone data on `c` over `x` and verify the correspondence
/// with maps off the cone in both directions: each map restricts to a
/// distinct datum which mediates back to the same map, and an independent
/// enumeration of vertex-cylinder pairs finds exactly as many valid data as
/// there are maps.
pub fn scone_data_of(m: &Model, c: &Presheaf, x: &Presheaf) -> Result<SconeDataEnum> {
    if !c.same_base(x) || !c.same_base(m.interval()) {
        return Err(Error::BaseMismatch);
    }
    let sc = scone(m, x)?;
    let maps = enum_nat_trans(&sc.object, c, m.budget())?;
    let mut data = Vec::with_capacity(maps.len());
    let mut seen = BTreeSet::new();
    for g in &maps {
        let datum = SierpinskiConeDatum::new(m, &sc, sc.bottom.then(g)?, sc.gamma.then(g)?)?;
        if datum.as_map(&sc)? != *g {
            return Err(Error::ClauseDisagreement {
                what: "cone data correspondence".into(),
                details: "a map off the cone is not recovered from its own datum".into(),
            });
        }
        if !seen.insert(datum.key()) {
            return Err(Error::ClauseDisagreement {
                what: "cone data correspondence".into(),
                details: "two distinct maps off the cone restrict to the same datum".into(),
            });
        }
        data.push(datum);
    }
    let points = global_points(c, m.budget())?;
    let cylinders = enum_nat_trans(&sc.cyl.object, c, m.budget())?;
    let mut valid = 0usize;
    for p in &points {
        for cy in &cylinders {
            if end_equation_holds(m, &sc, p, cy) {
                valid += 1;
            }
        }
    }
    if valid != maps.len() {
        return Err(Error::ClauseDisagreement {
            what: "cone data correspondence".into(),
            details: format!(
                "{valid} vertex-cylinder pairs satisfy the end equation but there are {} maps off the cone",
                maps.len()
            ),
        });
    }
    Ok(SconeDataEnum { scone: sc, data, maps })
}

/// Restrict a map `f: Lift X -> C` to a cone datum: the vertex is the image
/// of the nowhere-defined point, the cylinder the image of interpolation.
/// The end equation is checked, not assumed. The witness must certify `x`
/// as connected along the zero extent, since the nowhere-defined point only
/// exists under that hypothesis.
pub fn restrict_scd(
    m: &Model,
    witness: &Connectedness,
    f: &NatTrans,
) -> Result<SierpinskiConeDatum> {
    let cmp = sigma(m, &witness.x, witness)?;
    if f.source() != &cmp.lift.object {
        return Err(Error::SourceMismatch {
            details: "the map must start at the partial-map object of the witnessed object".into(),
        });
    }
    SierpinskiConeDatum::new(m, &cmp.scone, cmp.undef.then(f)?, cmp.glue.then(f)?)
}
