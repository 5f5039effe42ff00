use std::sync::Arc;

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::fincat::{product, FinCategory, NatTrans, Presheaf, Product, Subobject};
use crate::latdual::lattice::{FinDistLattice, LatticeHom};

/// A lattice object internal to a presheaf model: a carrier presheaf whose
/// stages are bounded distributive lattices and whose restriction maps are
/// lattice homomorphisms. The structure maps are packaged as actual
/// transformations on the canonical product, so downstream constructions can
/// feed them to the forcing machinery directly.
#[derive(Debug, Clone)]
pub struct InternalLattice {
    pub carrier: Presheaf,
    /// The canonical product `carrier x carrier` the operations live on.
    pub pairs: Product,
    pub meet: NatTrans,
    pub join: NatTrans,
    pub bottom: NatTrans,
    pub top: NatTrans,
    pub stages: Vec<FinDistLattice>,
}

impl InternalLattice {
    /// Validates and packages stagewise lattice tables over a carrier.
    pub fn new(
        carrier: Presheaf,
        stages: Vec<FinDistLattice>,
        budget: &Budget,
    ) -> Result<InternalLattice> {
        let base = carrier.base();
        if stages.len() != base.object_count() {
            return Err(Error::InvalidModel {
                details: "one stage lattice per object is required".into(),
            });
        }
        for c in base.objects() {
            if stages[c].size() != carrier.stage(c) {
                return Err(Error::InvalidModel {
                    details: format!("stage {c} lattice size differs from the carrier"),
                });
            }
            stages[c].validate().map_err(|e| match e {
                Error::LatticeAxiomFailure { axiom, witness } => Error::StageAxiomFailure {
                    object: c,
                    axiom,
                    witness,
                },
                other => other,
            })?;
        }
        // Restrictions must be homomorphisms; this is exactly naturality of
        // the four structure maps.
        for m in base.morphisms() {
            let s = base.src(m);
            let t = base.tgt(m);
            LatticeHom::new(
                stages[t].clone(),
                stages[s].clone(),
                carrier.act_table(m).to_vec(),
            )
            .map_err(|e| Error::NaturalityFailure {
                morphism: m,
                details: format!("restriction is not a lattice homomorphism: {e}"),
            })?;
        }
        let pairs = product(&carrier, &carrier, budget)?;
        let meet_comps: Vec<Vec<usize>> = base
            .objects()
            .map(|c| {
                (0..pairs.object.stage(c))
                    .map(|p| {
                        let (a, b) = pairs.unpair(c, p);
                        stages[c].meet_of(a, b)
                    })
                    .collect()
            })
            .collect();
        let join_comps: Vec<Vec<usize>> = base
            .objects()
            .map(|c| {
                (0..pairs.object.stage(c))
                    .map(|p| {
                        let (a, b) = pairs.unpair(c, p);
                        stages[c].join_of(a, b)
                    })
                    .collect()
            })
            .collect();
        let meet = NatTrans::new(pairs.object.clone(), carrier.clone(), meet_comps)?;
        let join = NatTrans::new(pairs.object.clone(), carrier.clone(), join_comps)?;
        let one = Presheaf::terminal(Arc::clone(base));
        let bottom = NatTrans::new(
            one.clone(),
            carrier.clone(),
            base.objects().map(|c| vec![stages[c].bottom]).collect(),
        )?;
        let top = NatTrans::new(
            one,
            carrier.clone(),
            base.objects().map(|c| vec![stages[c].top]).collect(),
        )?;
        Ok(InternalLattice {
            carrier,
            pairs,
            meet,
            join,
            bottom,
            top,
            stages,
        })
    }

    /// The constant internal lattice on a base category.
    pub fn constant(
        base: Arc<FinCategory>,
        j: &FinDistLattice,
        budget: &Budget,
    ) -> Result<InternalLattice> {
        j.validate()?;
        let carrier = Presheaf::constant(base.clone(), j.size());
        let stages = vec![j.clone(); base.object_count()];
        InternalLattice::new(carrier, stages, budget)
    }

    pub fn stage_lattice(&self, c: usize) -> &FinDistLattice {
        &self.stages[c]
    }

    pub fn leq_at(&self, c: usize, a: usize, b: usize) -> bool {
        self.stages[c].leq(a, b)
    }

    /// The subobject of elements equal to top, stagewise. Stable because
    /// restrictions preserve top.
    pub fn top_subobject(&self) -> Result<Subobject> {
        let members = self
            .carrier
            .base()
            .objects()
            .map(|c| {
                (0..self.carrier.stage(c))
                    .map(|e| e == self.stages[c].top)
                    .collect()
            })
            .collect();
        Subobject::new(self.carrier.clone(), members)
    }

    /// The subobject of elements equal to bottom, stagewise.
    pub fn bottom_subobject(&self) -> Result<Subobject> {
        let members = self
            .carrier
            .base()
            .objects()
            .map(|c| {
                (0..self.carrier.stage(c))
                    .map(|e| e == self.stages[c].bottom)
                    .collect()
            })
            .collect();
        Subobject::new(self.carrier.clone(), members)
    }
}
