//! The check registry: the named checks a model supports, grouped into the
//! selectable batches `conditions`, `geometry`, `duality`, `complete`,
//! `extend`, and `file` (the invocations listed in the model file itself).
//! Every check is a pure function of the model and its element budget, so
//! repeated runs — sequential or parallel — produce identical records.

use std::sync::Arc;

use serde_json::{Map, Value};

use scone_core::complete::{
    check_closed_proper, check_condition, check_dominant, check_formula, check_phoa,
    check_quotient_initial, check_quotient_initial_core, check_strict, completeness_suite,
    is_orthogonal, is_orthogonal_to_family, little_sierp_class, ClassMembers, ConditionReport,
};
use scone_core::error::{Error, Result as CoreResult};
use scone_core::extend::verify_sierp_equivalence;
use scone_core::fincat::{
    elements_category, find_iso, global_points, reindex_fibered, sigma as sum_over, Presheaf,
    Subobject,
};
use scone_core::geom::{
    horn, is_p_connected, lift, observational_preorder, scone_family, sigma as sigma_comparison,
    simplex, slice, zero_truth_extent, Connectedness, Model,
};
use scone_core::latdual::{enum_homs, free_algebra, is_quasi_coherent, quotient, FinDistLattice};

use crate::model::{CliError, CliResult, ModelData, RawCheck};
use crate::report::{witness_value, CheckRecord, FLAG_TRUNCATED_SUMS};

/// The named condition checks run by the `conditions` group, in catalogue
/// order followed by the external-route checks.
pub const CONDITION_NAMES: [&str; 9] = [
    "strict",
    "disjunctive",
    "local",
    "conjunctive",
    "conservative",
    "phoa",
    "quotientInitial",
    "quotientInitialCore",
    "dominant",
];

/// Built-in objects usable as codomains and test objects, resolvable by
/// name alongside the model file's named presheaves.
pub const BUILTIN_OBJECTS: [&str; 4] = ["one", "empty", "interval", "triangle"];

const SUITE_CODOMAINS: [&str; 3] = ["one", "interval", "triangle"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CheckKind {
    Condition { condition: String },
    Degeneracy,
    Formula { src: String },
    ClosedProper { object: String },
    ObsTop { object: String },
    Simplex { n: usize },
    Horn,
    HornDecomposition,
    SliceSum,
    LiftContrast,
    SpecChain { n: usize, stage: usize },
    QuasiCoherent { stage: usize },
    Suite { codomain: String },
    Equivalence { codomain: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckSpec {
    pub name: String,
    pub group: &'static str,
    pub kind: CheckKind,
}

fn spec(name: String, group: &'static str, kind: CheckKind) -> CheckSpec {
    CheckSpec { name, group, kind }
}

/// All checks available for a model: the five built-in groups, the model
/// file's own check list, and the ad-hoc formula when one was passed on
/// the command line. Names are unique; the runner selects from this list.
pub fn registry(md: &ModelData, cli_formula: Option<&str>) -> CliResult<Vec<CheckSpec>> {
    let mut specs = Vec::new();

    for name in CONDITION_NAMES {
        specs.push(spec(
            format!("condition.{name}"),
            "conditions",
            CheckKind::Condition {
                condition: name.to_string(),
            },
        ));
    }
    specs.push(spec(
        "condition.degeneracy".into(),
        "conditions",
        CheckKind::Degeneracy,
    ));

    for n in 0..=3 {
        specs.push(spec(
            format!("geometry.simplex.{n}"),
            "geometry",
            CheckKind::Simplex { n },
        ));
    }
    specs.push(spec("geometry.horn".into(), "geometry", CheckKind::Horn));
    specs.push(spec(
        "geometry.hornDecomposition".into(),
        "geometry",
        CheckKind::HornDecomposition,
    ));
    specs.push(spec(
        "geometry.sliceSum".into(),
        "geometry",
        CheckKind::SliceSum,
    ));
    specs.push(spec(
        "geometry.liftContrast".into(),
        "geometry",
        CheckKind::LiftContrast,
    ));
    specs.push(spec(
        "geometry.obsTop.triangle".into(),
        "geometry",
        CheckKind::ObsTop {
            object: "triangle".into(),
        },
    ));

    let stage_count = md.model.base().object_count();
    for stage in 0..stage_count {
        for n in 0..=3 {
            specs.push(spec(
                format!("duality.spec.chain{n}.stage{stage}"),
                "duality",
                CheckKind::SpecChain { n, stage },
            ));
        }
        specs.push(spec(
            format!("duality.quasiCoherent.free1.stage{stage}"),
            "duality",
            CheckKind::QuasiCoherent { stage },
        ));
    }

    for codomain in SUITE_CODOMAINS {
        specs.push(spec(
            format!("complete.suite.{codomain}"),
            "complete",
            CheckKind::Suite {
                codomain: codomain.to_string(),
            },
        ));
        specs.push(spec(
            format!("extend.equivalence.{codomain}"),
            "extend",
            CheckKind::Equivalence {
                codomain: codomain.to_string(),
            },
        ));
    }

    for fc in &md.file_checks {
        let name = format!("file.{}", fc.label());
        let kind = match fc {
            RawCheck::Condition { condition, .. } => CheckKind::Condition {
                condition: condition.clone(),
            },
            RawCheck::Formula { formula, .. } => CheckKind::Formula {
                src: formula.clone(),
            },
            RawCheck::ClosedProper { object, .. } => CheckKind::ClosedProper {
                object: object.clone(),
            },
            RawCheck::ObsTop { object, .. } => CheckKind::ObsTop {
                object: object.clone(),
            },
            RawCheck::Suite { codomain, .. } => CheckKind::Suite {
                codomain: codomain.clone(),
            },
            RawCheck::Equivalence { codomain, .. } => CheckKind::Equivalence {
                codomain: codomain.clone(),
            },
        };
        specs.push(spec(name, "file", kind));
    }

    if let Some(src) = cli_formula {
        specs.push(spec(
            "formula.cli".into(),
            "formula",
            CheckKind::Formula {
                src: src.to_string(),
            },
        ));
    }

    let mut names: Vec<&str> = specs.iter().map(|s| s.name.as_str()).collect();
    names.sort_unstable();
    for pair in names.windows(2) {
        if pair[0] == pair[1] {
            return Err(CliError::Validation {
                message: format!("duplicate check name `{}` (file labels collide with a built-in)", pair[0]),
            });
        }
    }
    Ok(specs)
}

// ---- helpers ----

fn num(n: usize) -> Value {
    Value::from(n as u64)
}

fn num_array(xs: &[usize]) -> Value {
    Value::Array(xs.iter().map(|&x| num(x)).collect())
}

fn bool_array(xs: &[bool]) -> Value {
    Value::Array(xs.iter().map(|&b| Value::Bool(b)).collect())
}

fn str_array(xs: &[String]) -> Value {
    Value::Array(xs.iter().map(|s| Value::String(s.clone())).collect())
}

/// Resolve an object name to a presheaf: a built-in or a presheaf named in
/// the model file.
fn resolve_object(md: &ModelData, name: &str) -> CoreResult<Presheaf> {
    let m = &md.model;
    match name {
        "one" => Ok(Presheaf::terminal(Arc::clone(m.base()))),
        "empty" => Ok(Presheaf::initial(Arc::clone(m.base()))),
        "interval" => Ok(m.interval().clone()),
        "triangle" => Ok(simplex(m, 2)?.object),
        other => md
            .presheaves
            .iter()
            .find(|(n, _)| n == other)
            .map(|(_, p)| p.clone())
            .ok_or_else(|| Error::UnknownSymbol {
                name: other.to_string(),
            }),
    }
}

fn fill_condition(rec: &mut CheckRecord, report: ConditionReport) {
    rec.verdict = Some(report.holds);
    rec.witness = report
        .witness
        .map(|w| witness_value(w.stage, &w.environment));
    rec.details
        .insert("formula".into(), Value::String(report.formula));
}

fn interval_counts(rec: &mut CheckRecord, m: &Model) {
    rec.counts
        .insert("interval".into(), num_array(m.interval().stages()));
}

/// Descending `n`-tuples over a lattice, in lexicographic order: the
/// element lists of the chain-relation spectrum and of the simplex stages.
fn descending_tuples(j: &FinDistLattice, n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut tuple = vec![0usize; n];
    loop {
        let descending = (0..n.saturating_sub(1)).all(|k| j.leq(tuple[k + 1], tuple[k]));
        if descending {
            out.push(tuple.clone());
        }
        let mut pos = n;
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            tuple[pos] += 1;
            if tuple[pos] < j.size() {
                break;
            }
            tuple[pos] = 0;
        }
    }
}

// ---- execution ----

fn fill_inputs(rec: &mut CheckRecord, kind: &CheckKind) {
    match kind {
        CheckKind::Condition { condition } => {
            rec.inputs
                .insert("condition".into(), Value::String(condition.clone()));
        }
        CheckKind::Degeneracy => {}
        CheckKind::Formula { src } => {
            rec.inputs.insert("formula".into(), Value::String(src.clone()));
        }
        CheckKind::ClosedProper { object } | CheckKind::ObsTop { object } => {
            rec.inputs
                .insert("object".into(), Value::String(object.clone()));
        }
        CheckKind::Simplex { n } => {
            rec.inputs.insert("n".into(), num(*n));
        }
        CheckKind::Horn
        | CheckKind::HornDecomposition
        | CheckKind::SliceSum
        | CheckKind::LiftContrast => {}
        CheckKind::SpecChain { n, stage } => {
            rec.inputs.insert("n".into(), num(*n));
            rec.inputs.insert("stage".into(), num(*stage));
        }
        CheckKind::QuasiCoherent { stage } => {
            rec.inputs.insert("stage".into(), num(*stage));
        }
        CheckKind::Suite { codomain } | CheckKind::Equivalence { codomain } => {
            rec.inputs
                .insert("codomain".into(), Value::String(codomain.clone()));
        }
    }
}

fn execute(md: &ModelData, kind: &CheckKind, rec: &mut CheckRecord) -> CoreResult<()> {
    let m = &md.model;
    match kind {
        CheckKind::Condition { condition } => {
            let report = match condition.as_str() {
                "phoa" => check_phoa(m)?,
                "dominant" => check_dominant(m)?,
                "quotientInitialCore" => check_quotient_initial_core(m)?,
                name => check_condition(m, name)?,
            };
            fill_condition(rec, report);
            interval_counts(rec, m);
        }
        CheckKind::Degeneracy => {
            let strict = check_strict(m)?;
            let qi = check_quotient_initial(m)?;
            let points = global_points(m.interval(), m.budget())?;
            let antecedent = strict.holds && qi.holds;
            rec.verdict = Some(!antecedent || points.len() == 2);
            rec.details.insert("antecedent".into(), Value::Bool(antecedent));
            rec.details.insert("strict".into(), Value::Bool(strict.holds));
            rec.details
                .insert("quotientInitial".into(), Value::Bool(qi.holds));
            rec.counts.insert("globalPoints".into(), num(points.len()));
            interval_counts(rec, m);
        }
        CheckKind::Formula { src } => {
            let report = check_formula(m, "adhoc", src)?;
            fill_condition(rec, report);
            interval_counts(rec, m);
        }
        CheckKind::ClosedProper { object } => {
            let x = resolve_object(md, object)?;
            let report = check_closed_proper(m, &x)?;
            fill_condition(rec, report);
            rec.counts.insert("object".into(), num_array(x.stages()));
        }
        CheckKind::ObsTop { object } => {
            let x = resolve_object(md, object)?;
            let pre = observational_preorder(m, &x)?;
            let n = pre.points.len();
            let top = (0..n).find(|&t| (0..n).all(|a| pre.le[a][t]));
            rec.verdict = Some(top.is_some());
            rec.details.insert(
                "topPoint".into(),
                top.map(num).unwrap_or(Value::Null),
            );
            rec.counts.insert("points".into(), num(n));
            rec.counts
                .insert("observations".into(), num(pre.observations));
        }
        CheckKind::Simplex { n } => {
            let s = simplex(m, *n)?;
            rec.verdict = Some(true);
            rec.counts.insert("stages".into(), num_array(s.object.stages()));
            rec.counts
                .insert("total".into(), num(s.object.stages().iter().sum()));
        }
        CheckKind::Horn => {
            let h = horn(m)?;
            rec.verdict = Some(true);
            rec.counts.insert("stages".into(), num_array(h.object.stages()));
            rec.counts.insert(
                "simplex".into(),
                num_array(h.simplex.object.stages()),
            );
        }
        CheckKind::HornDecomposition => {
            rec.flags.push(FLAG_TRUNCATED_SUMS.into());
            match scone_family(m) {
                Ok(sf) => {
                    rec.verdict = Some(true);
                    rec.counts
                        .insert("horn".into(), num_array(sf.horn.object.stages()));
                    rec.counts
                        .insert("sum".into(), num_array(sf.sigma.total.stages()));
                    let fibers: Vec<usize> = (0..sf.el.objects.len())
                        .map(|o| sf.cones.object.stage(o))
                        .collect();
                    rec.counts.insert("fibers".into(), num_array(&fibers));
                }
                Err(Error::IsoNotFound { details }) => {
                    rec.verdict = Some(false);
                    rec.details.insert("failure".into(), Value::String(details));
                }
                Err(e) => return Err(e),
            }
        }
        CheckKind::SliceSum => {
            rec.flags.push(FLAG_TRUNCATED_SUMS.into());
            let sl = slice(m)?;
            let s2 = simplex(m, 2)?;
            let el = elements_category(m.interval())?;
            let (fam, fibers) = reindex_fibered(&el, &sl.projection)?;
            let back = sum_over(&el, &fam)?;
            let verdict = back.total == sl.total
                && back.proj == sl.projection
                && sl.total == s2.object;
            rec.verdict = Some(verdict);
            rec.counts
                .insert("triangle".into(), num_array(s2.object.stages()));
            rec.counts.insert("sum".into(), num_array(back.total.stages()));
            let sizes: Vec<usize> = fibers.iter().map(|f| f.len()).collect();
            rec.counts.insert("fibers".into(), num_array(&sizes));
        }
        CheckKind::LiftContrast => {
            rec.flags.push(FLAG_TRUNCATED_SUMS.into());
            let base = m.base();
            let points = global_points(m.interval(), m.budget())?;
            let mut all_iso = true;
            let mut per = Vec::new();
            for (k, p) in points.iter().enumerate() {
                let ext = m.is_t_of(p)?.as_presheaf().0;
                let ld = lift(m, &ext)?;
                let members: Vec<Vec<bool>> = base
                    .objects()
                    .map(|c| {
                        (0..m.interval().stage(c))
                            .map(|j| m.lattice().leq_at(c, j, p.apply(c, 0)))
                            .collect()
                    })
                    .collect();
                let lower = Subobject::new(m.interval().clone(), members)?
                    .as_presheaf()
                    .0;
                let iso = find_iso(&ld.object, &lower, m.budget())?.is_some();
                all_iso &= iso;
                let mut entry = Map::new();
                entry.insert("iso".into(), Value::Bool(iso));
                entry.insert("lift".into(), num_array(ld.object.stages()));
                entry.insert("lower".into(), num_array(lower.stages()));
                entry.insert("point".into(), num(k));
                let values: Vec<usize> = base.objects().map(|c| p.apply(c, 0)).collect();
                entry.insert("values".into(), num_array(&values));
                per.push(Value::Object(entry));
            }
            rec.verdict = Some(all_iso);
            rec.details.insert("perPoint".into(), Value::Array(per));
            rec.counts.insert("points".into(), num(points.len()));
        }
        CheckKind::SpecChain { n, stage } => {
            let j = m.lattice().stage_lattice(*stage);
            let a = free_algebra(j, *n, m.budget())?;
            let mut pairs = Vec::new();
            for k in 0..n.saturating_sub(1) {
                let x = a.generator_elem[k];
                let y = a.generator_elem[k + 1];
                pairs.push((a.lattice.meet_of(x, y), y));
            }
            let (q, _) = quotient(&a, &pairs)?;
            let points = enum_homs(&q, m.budget())?;
            let mut images: Vec<Vec<usize>> = points
                .iter()
                .map(|h| q.generator_elem.iter().map(|&g| h.apply(g)).collect())
                .collect();
            images.sort();
            images.dedup();
            let injective = images.len() == points.len();
            let mut expected = descending_tuples(j, *n);
            expected.sort();
            let s = simplex(m, *n)?;
            let stage_size = s.object.stage(*stage);
            let verdict = injective && images == expected && stage_size == expected.len();
            rec.verdict = Some(verdict);
            rec.counts.insert("homs".into(), num(points.len()));
            rec.counts.insert("tuples".into(), num(expected.len()));
            rec.counts.insert("simplexStage".into(), num(stage_size));
            rec.counts.insert("algebra".into(), num(q.size()));
        }
        CheckKind::QuasiCoherent { stage } => {
            let j = m.lattice().stage_lattice(*stage);
            let a = free_algebra(j, 1, m.budget())?;
            let qc = is_quasi_coherent(&a, m.budget())?;
            rec.verdict = Some(qc);
            rec.counts.insert("algebra".into(), num(a.size()));
            rec.counts.insert("lattice".into(), num(j.size()));
        }
        CheckKind::Suite { codomain } => {
            rec.flags.push(FLAG_TRUNCATED_SUMS.into());
            let c = resolve_object(md, codomain)?;
            let sv = completeness_suite(&c, m, &[])?;
            rec.verdict = Some(sv.sierp);
            rec.details.insert("segal".into(), Value::Bool(sv.segal));
            rec.details
                .insert("basedSegal".into(), Value::Bool(sv.based_segal));
            rec.details
                .insert("littleSierp".into(), Value::Bool(sv.little_sierp));
            rec.details.insert("sierp".into(), Value::Bool(sv.sierp));
            rec.details.insert("note".into(), Value::String(sv.note));
            rec.counts.insert("codomain".into(), num_array(c.stages()));
        }
        CheckKind::Equivalence { codomain } => {
            rec.flags.push(FLAG_TRUNCATED_SUMS.into());
            let c = resolve_object(md, codomain)?;
            let (names, witnesses, skipped) = connected_samples(m)?;
            let ClassMembers::Family(fam) = little_sierp_class(m)?.members else {
                unreachable!("the little cone class is a family");
            };
            let little = is_orthogonal_to_family(&c, &fam, m.budget())?;
            rec.details.insert("littleSierp".into(), Value::Bool(little));
            rec.details.insert("samples".into(), str_array(&names));
            rec.details.insert("skipped".into(), str_array(&skipped));
            rec.counts.insert("codomain".into(), num_array(c.stages()));
            rec.counts.insert("samples".into(), num(names.len()));
            if little {
                let report = verify_sierp_equivalence(m, &c, &witnesses)?;
                rec.verdict = Some(report.orthogonal.iter().all(|&b| b));
                rec.details
                    .insert("orthogonal".into(), bool_array(&report.orthogonal));
                rec.details
                    .insert("dataCounts".into(), num_array(&report.data_counts));
            } else {
                let mut direct = Vec::with_capacity(witnesses.len());
                for w in &witnesses {
                    let cmp = sigma_comparison(m, &w.x, w)?;
                    direct.push(is_orthogonal(&c, &cmp.map, m.budget())?);
                }
                rec.verdict = Some(false);
                rec.details
                    .insert("directOrthogonality".into(), bool_array(&direct));
                rec.details.insert(
                    "note".into(),
                    Value::String(
                        "the codomain is not orthogonal to the little cone family; \
                         no extension is attempted, the direct restriction verdicts \
                         per sample are reported instead"
                            .into(),
                    ),
                );
            }
        }
    }
    Ok(())
}

/// The connected sample objects used by the extension checks: the truth
/// extents of the interval's global points (deduplicated) plus the
/// terminal object, each with its connectedness witness. Samples whose
/// witness search reports a disconnected object are listed as skipped.
fn connected_samples(m: &Model) -> CoreResult<(Vec<String>, Vec<Connectedness>, Vec<String>)> {
    let points = global_points(m.interval(), m.budget())?;
    let mut samples: Vec<(String, Presheaf)> = Vec::new();
    for (k, p) in points.iter().enumerate() {
        let ext = m.is_t_of(p)?.as_presheaf().0;
        if samples.iter().any(|(_, e)| *e == ext) {
            continue;
        }
        samples.push((format!("isT.{k}"), ext));
    }
    samples.push((
        "one".to_string(),
        Presheaf::terminal(Arc::clone(m.base())),
    ));
    let p0 = zero_truth_extent(m.lattice())?;
    let mut names = Vec::new();
    let mut witnesses = Vec::new();
    let mut skipped = Vec::new();
    for (name, x) in samples {
        let w = is_p_connected(&p0, &x, m.budget())?;
        if w.connected {
            names.push(name);
            witnesses.push(w);
        } else {
            skipped.push(name);
        }
    }
    Ok((names, witnesses, skipped))
}

/// Run one check to a record. Budget overruns become budget records (the
/// batch continues); any other core error aborts the check as a
/// validation failure naming it.
pub fn run_check(md: &ModelData, spec: &CheckSpec) -> CliResult<CheckRecord> {
    let mut rec = CheckRecord::new(&spec.name);
    fill_inputs(&mut rec, &spec.kind);
    match execute(md, &spec.kind, &mut rec) {
        Ok(()) => Ok(rec),
        Err(e @ Error::BudgetExceeded { .. }) => {
            rec.verdict = None;
            rec.witness = None;
            rec.error = Some(e.to_string());
            Ok(rec)
        }
        Err(e) => Err(CliError::Validation {
            message: format!("check {} failed: {e}", spec.name),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_model, parse_model};
    use scone_core::Budget;

    fn tiny_model() -> ModelData {
        let text = r#"{
            "base": {"objects": 1, "morphisms": [{"src": 0, "tgt": 0}],
                     "identities": [0], "composition": []},
            "lattice": {"stages": [{"elements": 2, "bottom": 0, "top": 1,
                                    "meet": [[0,0],[0,1]], "join": [[0,1],[1,1]]}],
                        "restrictions": [[0, 1]]},
            "checks": [{"kind": "condition", "label": "extra", "condition": "strict"}]
        }"#;
        let raw = parse_model(text).unwrap();
        build_model(&raw, "tiny", Budget::new(1_000_000)).unwrap()
    }

    #[test]
    fn registry_names_are_unique_and_grouped() {
        let md = tiny_model();
        let specs = registry(&md, Some("top")).unwrap();
        let mut names: Vec<&str> = specs.iter().map(|s| s.name.as_str()).collect();
        let before = names.len();
        names.sort_unstable();
        names.dedup();
        assert_eq!(names.len(), before, "registry names are unique");
        for group in ["conditions", "geometry", "duality", "complete", "extend", "file", "formula"] {
            assert!(
                specs.iter().any(|s| s.group == group),
                "group {group} is populated"
            );
        }
        assert!(names.contains(&"file.extra"));
        assert!(names.contains(&"formula.cli"));
    }

    #[test]
    fn file_labels_colliding_with_builtins_are_rejected() {
        let text = r#"{
            "base": {"objects": 1, "morphisms": [{"src": 0, "tgt": 0}],
                     "identities": [0], "composition": []},
            "lattice": {"stages": [{"elements": 2, "bottom": 0, "top": 1,
                                    "meet": [[0,0],[0,1]], "join": [[0,1],[1,1]]}],
                        "restrictions": [[0, 1]]},
            "checks": [{"kind": "condition", "label": "x", "condition": "strict"},
                       {"kind": "formula", "label": "x2", "formula": "top"}]
        }"#;
        let raw = parse_model(text).unwrap();
        let mut md = build_model(&raw, "t", Budget::new(1_000_000)).unwrap();
        // Force a duplicate by giving a file check a reserved name shape.
        if let RawCheck::Condition { label, .. } = &mut md.file_checks[0] {
            *label = "x".into();
        }
        if let RawCheck::Formula { label, .. } = &mut md.file_checks[1] {
            *label = "x".into();
        }
        match registry(&md, None) {
            Err(CliError::Validation { message }) => {
                assert!(message.contains("duplicate check name"), "got: {message}")
            }
            other => panic!("expected duplicate-name error, got {:?}", other.map(|_| ())),
        }
    }

    #[test]
    fn objects_resolve_by_name() {
        let md = tiny_model();
        assert_eq!(resolve_object(&md, "one").unwrap().stages(), &[1]);
        assert_eq!(resolve_object(&md, "empty").unwrap().stages(), &[0]);
        assert_eq!(resolve_object(&md, "interval").unwrap().stages(), &[2]);
        assert_eq!(resolve_object(&md, "triangle").unwrap().stages(), &[3]);
        assert!(matches!(
            resolve_object(&md, "nope"),
            Err(Error::UnknownSymbol { .. })
        ));
    }

    #[test]
    fn descending_tuples_count_matches_the_simplices() {
        use scone_core::latdual::FinDistLattice;
        let chain3 = FinDistLattice::chain(3);
        assert_eq!(descending_tuples(&chain3, 0).len(), 1);
        assert_eq!(descending_tuples(&chain3, 1).len(), 3);
        assert_eq!(descending_tuples(&chain3, 2).len(), 6);
        assert_eq!(descending_tuples(&chain3, 3).len(), 10);
        let diamond = FinDistLattice::diamond();
        assert_eq!(descending_tuples(&diamond, 2).len(), 9);
    }

    #[test]
    fn budget_overruns_become_records_not_errors() {
        let md = tiny_model();
        let starved = build_model(
            &parse_model(r#"{
                "base": {"objects": 1, "morphisms": [{"src": 0, "tgt": 0}],
                         "identities": [0], "composition": []},
                "lattice": {"stages": [{"elements": 2, "bottom": 0, "top": 1,
                                        "meet": [[0,0],[0,1]], "join": [[0,1],[1,1]]}],
                            "restrictions": [[0, 1]]}
            }"#).unwrap(),
            "starved",
            Budget::new(4),
        )
        .unwrap();
        let spec = registry(&md, None)
            .unwrap()
            .into_iter()
            .find(|s| s.name == "complete.suite.triangle")
            .unwrap();
        let rec = run_check(&starved, &spec).unwrap();
        assert_eq!(rec.verdict, None);
        assert!(rec.error.unwrap().contains("budget exceeded"));
    }

    #[test]
    fn condition_checks_fill_witnesses() {
        let md = tiny_model();
        let specs = registry(&md, None).unwrap();
        let phoa = specs.iter().find(|s| s.name == "condition.phoa").unwrap();
        let rec = run_check(&md, phoa).unwrap();
        assert_eq!(rec.verdict, Some(false));
        assert!(rec.witness.is_some(), "failing conditions carry witnesses");
        let strict = specs.iter().find(|s| s.name == "condition.strict").unwrap();
        let rec = run_check(&md, strict).unwrap();
        assert_eq!(rec.verdict, Some(true));
        assert!(rec.witness.is_none());
    }
}
