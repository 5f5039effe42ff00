//! Extending a cone datum to the whole partial-map object, and the
//! retraction of the restriction map. Both run only against codomains that
//! pass the little completeness check, and both re-verify everything the
//! verdict promises by independent exhaustive search.

use crate::complete::{is_orthogonal, is_orthogonal_to_family, little_sierp_class, ClassMembers};
use crate::error::{Error, Result};
use crate::fincat::{enum_nat_trans, exponential, inverse_of, precompose, ExpData, NatTrans, Presheaf};
use crate::geom::{sigma, Connectedness, Model};

use super::data::{scone_data_of, SierpinskiConeDatum};
use super::eval::eval_maps;

/// A map off the partial-map object together with the re-derived datum it
/// restricts to, verified equal to the datum it was built from.
#[derive(Debug)]
pub struct SierpinskiExtension {
    /// `Lift X -> C`.
    pub extension: NatTrans,
    /// The restriction of `extension`, recomputed and compared.
    pub restriction: SierpinskiConeDatum,
    /// How many candidate maps the search inspected.
    pub inspected: usize,
}

/// Check that `c` is orthogonal to the family of little comparison maps.
fn require_little_complete(m: &Model, c: &Presheaf) -> Result<()> {
    let class = little_sierp_class(m)?;
    let verdict = match &class.members {
        ClassMembers::Family(fam) => is_orthogonal_to_family(c, fam, m.budget())?,
        ClassMembers::Single(f) => is_orthogonal(c, f, m.budget())?,
    };
    if verdict {
        Ok(())
    } else {
        Err(Error::NotLittleComplete {
            details: "the codomain is not orthogonal to the little comparison family".into(),
        })
    }
}

/// Extend a cone datum on `c` over the witnessed object to a map off the
/// whole partial-map object.
///
/// The datum is first pushed through the upper evaluation, giving a map off
/// the open mapping cylinder of the unit; the unique map off the relative
/// partial-map object agreeing with it along the fiberwise comparison is
/// found by exhaustive search — existence and uniqueness are re-checked
/// rather than taken from the completeness verdict — and the extension is
/// that map evaluated at the tautological point of each element's extent,
/// i.e. composed with the diagonal. The restriction of the result is then
/// recomputed and must equal the input datum on the nose.
pub fn build_extension(
    m: &Model,
    witness: &Connectedness,
    c: &Presheaf,
    datum: &SierpinskiConeDatum,
) -> Result<SierpinskiExtension> {
    if !c.same_base(m.interval()) {
        return Err(Error::BaseMismatch);
    }
    require_little_complete(m, c)?;
    let ev = eval_maps(m, witness)?;
    if datum.cylinder.source() != &ev.comparison.scone.cyl.object {
        return Err(Error::SourceMismatch {
            details: "the datum is not over the witnessed object's cone".into(),
        });
    }
    if datum.bottom.target() != c || datum.cylinder.target() != c {
        return Err(Error::TargetMismatch {
            details: "the datum does not land in the requested codomain".into(),
        });
    }
    let g = datum.as_map(&ev.comparison.scone)?;
    let little_datum = ev.eval_cone.then(&g)?;
    let candidates = enum_nat_trans(&ev.inclusion.relative.sigma.total, c, m.budget())?;
    let inspected = candidates.len();
    let mut found = Vec::new();
    for h in candidates {
        if ev.inclusion.map.then(&h)? == little_datum {
            found.push(h);
        }
    }
    let h = match found.len() {
        0 => {
            return Err(Error::NotLittleComplete {
                details: format!(
                    "no map off the relative partial-map object restricts to the datum's \
                     cylinder image ({inspected} candidates inspected)"
                ),
            })
        }
        1 => found.pop().expect("one element"),
        n => {
            return Err(Error::ExtensionNotUnique {
                details: format!("{n} maps off the relative partial-map object restrict to the datum"),
            })
        }
    };
    let extension = ev.diagonal.then(&h)?;
    let bottom = ev.comparison.undef.then(&extension)?;
    let cylinder = ev.comparison.glue.then(&extension)?;
    if bottom != datum.bottom || cylinder != datum.cylinder {
        return Err(Error::ClauseDisagreement {
            what: "restriction agreement".into(),
            details: "the built extension does not restrict to the datum it extends".into(),
        });
    }
    let restriction = SierpinskiConeDatum::new(m, &ev.comparison.scone, bottom, cylinder)?;
    Ok(SierpinskiExtension {
        extension,
        restriction,
        inspected,
    })
}

/// The retraction of restriction along the comparison, in exponentials over
/// the base, with the pieces it was pasted from.
#[derive(Debug)]
pub struct RetractionData {
    /// `C^{X_bot} -> C^{Lift X}`, with `retraction . restriction = id`.
    pub retraction: NatTrans,
    /// `C^{Lift X} -> C^{X_bot}`: precomposition with the comparison.
    pub restriction: NatTrans,
    /// `C^{Lift X}`.
    pub exp_lift: ExpData,
    /// `C^{X_bot}`.
    pub exp_cone: ExpData,
}

/// Build the retraction of `C^{comparison}` for a codomain `c` for which
/// precomposition along the fiberwise comparison of the unit is invertible.
/// The retraction is pasted from precomposition along the upper evaluation,
/// the inverse of precomposition along the fiberwise comparison, and
/// precomposition along the diagonal; the retraction equation is then
/// checked exhaustively.
pub fn build_retraction(
    m: &Model,
    witness: &Connectedness,
    c: &Presheaf,
) -> Result<RetractionData> {
    if !c.same_base(m.interval()) {
        return Err(Error::BaseMismatch);
    }
    let ev = eval_maps(m, witness)?;
    let exp_lift = exponential(&ev.comparison.lift.object, c, m.budget())?;
    let exp_cone = exponential(&ev.comparison.scone.object, c, m.budget())?;
    let exp_cyl = exponential(&ev.inclusion.cylinder.object, c, m.budget())?;
    let exp_rel = exponential(&ev.inclusion.relative.sigma.total, c, m.budget())?;
    let along_eval = precompose(&exp_cone, &exp_cyl, &ev.eval_cone)?;
    let along_inclusion = precompose(&exp_rel, &exp_cyl, &ev.inclusion.map)?;
    let inverse = inverse_of(&along_inclusion).ok_or_else(|| Error::NotLittleComplete {
        details: "precomposition along the fiberwise comparison is not invertible for this codomain"
            .into(),
    })?;
    let along_diagonal = precompose(&exp_rel, &exp_lift, &ev.diagonal)?;
    let retraction = along_eval.then(&inverse)?.then(&along_diagonal)?;
    let restriction = precompose(&exp_lift, &exp_cone, &ev.comparison.map)?;
    if restriction.then(&retraction)? != NatTrans::identity(&exp_lift.object) {
        return Err(Error::ClauseDisagreement {
            what: "retraction equation".into(),
            details: "the pasted composite is not a retraction of the restriction".into(),
        });
    }
    Ok(RetractionData {
        retraction,
        restriction,
        exp_lift,
        exp_cone,
    })
}

/// What `verify_sierp_equivalence` certifies per sample.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivalenceReport {
    /// Direct orthogonality verdicts — all true on success.
    pub orthogonal: Vec<bool>,
    /// How many cone data (equivalently, maps off the cone) were extended.
    pub data_counts: Vec<usize>,
}

/// For each witnessed sample object: every cone datum on `c` extends, the
/// extension is the unique map restricting to the datum (found again by
/// brute force over all maps off the partial-map object), restriction has a
/// retraction, and therefore restriction is a bijection — which must agree
/// with the direct orthogonality check. Any mismatch between the
/// constructive route and the enumerations is an error, not a verdict.
pub fn verify_sierp_equivalence(
    m: &Model,
    c: &Presheaf,
    samples: &[Connectedness],
) -> Result<EquivalenceReport> {
    let mut orthogonal = Vec::with_capacity(samples.len());
    let mut data_counts = Vec::with_capacity(samples.len());
    for witness in samples {
        let enumeration = scone_data_of(m, c, &witness.x)?;
        let cmp = sigma(m, &witness.x, witness)?;
        let all_maps = enum_nat_trans(&cmp.lift.object, c, m.budget())?;
        for (k, datum) in enumeration.data.iter().enumerate() {
            let ext = build_extension(m, witness, c, datum)?;
            let mut hits = 0usize;
            let mut agree = false;
            for f in &all_maps {
                if cmp.undef.then(f)? == datum.bottom && cmp.glue.then(f)? == datum.cylinder {
                    hits += 1;
                    agree = *f == ext.extension;
                }
            }
            if hits != 1 || !agree {
                return Err(Error::ClauseDisagreement {
                    what: "extension algorithm".into(),
                    details: format!(
                        "brute force finds {hits} maps restricting to datum {k}; the built \
                         extension must be the single one"
                    ),
                });
            }
            if cmp.map.then(&ext.extension)? != enumeration.maps[k] {
                return Err(Error::ClauseDisagreement {
                    what: "extension algorithm".into(),
                    details: format!(
                        "restricting the extension of datum {k} along the comparison does not \
                         give back the map the datum came from"
                    ),
                });
            }
        }
        build_retraction(m, witness, c)?;
        let direct = is_orthogonal(c, &cmp.map, m.budget())?;
        if !direct {
            return Err(Error::ClauseDisagreement {
                what: "completeness comparison".into(),
                details: "every datum extends uniquely yet direct orthogonality fails".into(),
            });
        }
        orthogonal.push(direct);
        data_counts.push(enumeration.data.len());
    }
    Ok(EquivalenceReport {
        orthogonal,
        data_counts,
    })
}
