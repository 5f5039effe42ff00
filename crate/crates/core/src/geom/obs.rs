use crate::error::Result;
use crate::fincat::{enum_nat_trans, global_points, NatTrans, Presheaf};
use crate::geom::model::Model;

/// The observational preorder on the global points of an object: one point
/// lies below another when every interval-valued observation says so at
/// every stage.
#[derive(Debug, Clone)]
pub struct ObsPreorder {
    /// The global points, in canonical order.
    pub points: Vec<NatTrans>,
    /// `le[a][b]` holds when point `a` observes below point `b`.
    pub le: Vec<Vec<bool>>,
    /// How many observations were consulted.
    pub observations: usize,
}

pub fn observational_preorder(m: &Model, x: &Presheaf) -> Result<ObsPreorder> {
    let points = global_points(x, m.budget())?;
    let obs = enum_nat_trans(x, m.interval(), m.budget())?;
    let base = m.base();
    let n = points.len();
    let mut le = vec![vec![true; n]; n];
    for (a, pa) in points.iter().enumerate() {
        for (b, pb) in points.iter().enumerate() {
            'probe: for phi in &obs {
                for c in base.objects() {
                    let va = phi.apply(c, pa.apply(c, 0));
                    let vb = phi.apply(c, pb.apply(c, 0));
                    if !m.lattice().leq_at(c, va, vb) {
                        le[a][b] = false;
                        break 'probe;
                    }
                }
            }
        }
    }
    Ok(ObsPreorder {
        points,
        le,
        observations: obs.len(),
    })
}

/// The first global point (in canonical order) lying observationally above
/// every other, if one exists.
pub fn has_obs_top(m: &Model, x: &Presheaf) -> Result<Option<NatTrans>> {
    let pre = observational_preorder(m, x)?;
    let n = pre.points.len();
    for t in 0..n {
        if (0..n).all(|a| pre.le[a][t]) {
            return Ok(Some(pre.points[t].clone()));
        }
    }
    Ok(None)
}
