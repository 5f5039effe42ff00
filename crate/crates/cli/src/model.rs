//! Model-file ingestion: JSON schema walking with precise error paths,
//! canonicalization, and construction of the in-memory model.
//!
//! A model file describes a finite base category (objects, morphisms with
//! src/tgt, composition triples), a stagewise bounded distributive lattice
//! over it (per-object element counts, meet/join tables, bottom/top
//! indices, per-morphism restriction arrays), and optionally named
//! auxiliary presheaves and a list of extra check invocations. The schema
//! walker reports the JSON path of the first offending field; deep
//! mathematical validation (lattice axioms, functor laws, naturality) is
//! delegated to the core builders, whose errors surface as validation
//! errors naming the failing law.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde_json::{Map, Value};

use scone_core::budget::Budget;
use scone_core::fincat::{FinCategory, Presheaf};
use scone_core::geom::Model;
use scone_core::latdual::{FinDistLattice, InternalLattice};

/// Errors at the CLI layer, ordered by exit-code mapping: schema and
/// validation problems exit 1, budget overruns exit 2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CliError {
    /// The file does not match the model schema; `path` locates the field.
    Schema { path: String, message: String },
    /// The file is schema-valid but mathematically broken, or a check
    /// failed in a way that is not a budget overrun.
    Validation { message: String },
    /// A check ran out of its element budget.
    Budget { check: String, message: String },
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Schema { path, message } => write!(f, "schema error at {path}: {message}"),
            CliError::Validation { message } => write!(f, "validation error: {message}"),
            CliError::Budget { check, message } => {
                write!(f, "budget exceeded in check {check}: {message}")
            }
        }
    }
}

impl std::error::Error for CliError {}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Schema { .. } | CliError::Validation { .. } => 1,
            CliError::Budget { .. } => 2,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

fn schema_err<T>(path: &str, message: impl Into<String>) -> CliResult<T> {
    Err(CliError::Schema {
        path: path.to_string(),
        message: message.into(),
    })
}

// ---- raw (schema-level) representation ----

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawStage {
    pub elements: usize,
    pub bottom: usize,
    pub top: usize,
    pub meet: Vec<Vec<usize>>,
    pub join: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawPresheaf {
    pub stages: Vec<usize>,
    pub act: Vec<Vec<usize>>,
}

/// One extra check invocation from the model file's optional `checks`
/// array. Labels name the resulting report records (`file.<label>`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RawCheck {
    Condition { label: String, condition: String },
    Formula { label: String, formula: String },
    ClosedProper { label: String, object: String },
    ObsTop { label: String, object: String },
    Suite { label: String, codomain: String },
    Equivalence { label: String, codomain: String },
}

impl RawCheck {
    pub fn label(&self) -> &str {
        match self {
            RawCheck::Condition { label, .. }
            | RawCheck::Formula { label, .. }
            | RawCheck::ClosedProper { label, .. }
            | RawCheck::ObsTop { label, .. }
            | RawCheck::Suite { label, .. }
            | RawCheck::Equivalence { label, .. } => label,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawModel {
    pub name: Option<String>,
    pub objects: usize,
    pub morphisms: Vec<(usize, usize)>,
    pub identities: Vec<usize>,
    pub composition: Vec<(usize, usize, usize)>,
    pub stages: Vec<RawStage>,
    pub restrictions: Vec<Vec<usize>>,
    pub presheaves: Vec<(String, RawPresheaf)>,
    pub checks: Vec<RawCheck>,
}

// ---- schema walking helpers ----

fn as_object<'a>(v: &'a Value, path: &str) -> CliResult<&'a Map<String, Value>> {
    v.as_object()
        .ok_or(())
        .or_else(|_| schema_err(path, "expected an object"))
}

fn as_array<'a>(v: &'a Value, path: &str) -> CliResult<&'a Vec<Value>> {
    v.as_array()
        .ok_or(())
        .or_else(|_| schema_err(path, "expected an array"))
}

fn as_uint(v: &Value, path: &str) -> CliResult<usize> {
    match v.as_u64() {
        Some(n) => usize::try_from(n)
            .map_err(|_| ())
            .or_else(|_| schema_err(path, "integer out of range")),
        None => schema_err(path, "expected a non-negative integer"),
    }
}

fn as_str<'a>(v: &'a Value, path: &str) -> CliResult<&'a str> {
    v.as_str()
        .ok_or(())
        .or_else(|_| schema_err(path, "expected a string"))
}

fn get<'a>(m: &'a Map<String, Value>, key: &str, path: &str) -> CliResult<&'a Value> {
    m.get(key)
        .ok_or(())
        .or_else(|_| schema_err(path, format!("missing required field `{key}`")))
}

fn reject_unknown(m: &Map<String, Value>, allowed: &[&str], path: &str) -> CliResult<()> {
    for key in m.keys() {
        if !allowed.contains(&key.as_str()) {
            return schema_err(&format!("{path}/{key}"), "unknown field");
        }
    }
    Ok(())
}

fn uint_array(v: &Value, path: &str) -> CliResult<Vec<usize>> {
    let items = as_array(v, path)?;
    items
        .iter()
        .enumerate()
        .map(|(k, item)| as_uint(item, &format!("{path}/{k}")))
        .collect()
}

fn uint_table(v: &Value, path: &str) -> CliResult<Vec<Vec<usize>>> {
    let items = as_array(v, path)?;
    items
        .iter()
        .enumerate()
        .map(|(k, item)| uint_array(item, &format!("{path}/{k}")))
        .collect()
}

fn square_table(
    v: &Value,
    path: &str,
    size: usize,
    entry_bound: usize,
) -> CliResult<Vec<Vec<usize>>> {
    let table = uint_table(v, path)?;
    if table.len() != size {
        return schema_err(path, format!("expected {size} rows, found {}", table.len()));
    }
    for (r, row) in table.iter().enumerate() {
        if row.len() != size {
            return schema_err(
                &format!("{path}/{r}"),
                format!("expected {size} entries, found {}", row.len()),
            );
        }
        for (cidx, &entry) in row.iter().enumerate() {
            if entry >= entry_bound {
                return schema_err(
                    &format!("{path}/{r}/{cidx}"),
                    format!("entry {entry} out of range (must be below {entry_bound})"),
                );
            }
        }
    }
    Ok(table)
}

fn valid_name(s: &str) -> bool {
    !s.is_empty()
        && s.chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

// ---- parsing ----

/// Parse and schema-validate a model file. Every reference is checked to
/// be in range so the builder below cannot panic; lattice axioms and
/// functor laws are left to `build`.
pub fn parse_model(text: &str) -> CliResult<RawModel> {
    let value: Value = serde_json::from_str(text).map_err(|e| CliError::Schema {
        path: format!("(line {}, column {})", e.line(), e.column()),
        message: e.to_string(),
    })?;
    let root = as_object(&value, "/")?;
    reject_unknown(
        root,
        &["name", "base", "lattice", "presheaves", "checks"],
        "",
    )?;

    let name = match root.get("name") {
        Some(v) => {
            let s = as_str(v, "/name")?;
            if !valid_name(s) {
                return schema_err(
                    "/name",
                    "model names use only ASCII letters, digits, `_`, and `-`",
                );
            }
            Some(s.to_string())
        }
        None => None,
    };

    // base
    let base = as_object(get(root, "base", "")?, "/base")?;
    reject_unknown(
        base,
        &["objects", "morphisms", "identities", "composition"],
        "/base",
    )?;
    let objects = as_uint(get(base, "objects", "/base")?, "/base/objects")?;
    let mor_items = as_array(get(base, "morphisms", "/base")?, "/base/morphisms")?;
    let mut morphisms = Vec::with_capacity(mor_items.len());
    for (k, item) in mor_items.iter().enumerate() {
        let path = format!("/base/morphisms/{k}");
        let entry = as_object(item, &path)?;
        reject_unknown(entry, &["src", "tgt"], &path)?;
        let src = as_uint(get(entry, "src", &path)?, &format!("{path}/src"))?;
        let tgt = as_uint(get(entry, "tgt", &path)?, &format!("{path}/tgt"))?;
        if src >= objects || tgt >= objects {
            return schema_err(&path, format!("endpoint out of range (objects = {objects})"));
        }
        morphisms.push((src, tgt));
    }
    let identities = uint_array(get(base, "identities", "/base")?, "/base/identities")?;
    if identities.len() != objects {
        return schema_err(
            "/base/identities",
            format!("expected one identity per object ({objects})"),
        );
    }
    for (c, &m) in identities.iter().enumerate() {
        if m >= morphisms.len() {
            return schema_err(
                &format!("/base/identities/{c}"),
                "identity index out of range",
            );
        }
    }
    let comp_items = as_array(get(base, "composition", "/base")?, "/base/composition")?;
    let mut composition = Vec::with_capacity(comp_items.len());
    for (k, item) in comp_items.iter().enumerate() {
        let path = format!("/base/composition/{k}");
        let triple = uint_array(item, &path)?;
        if triple.len() != 3 {
            return schema_err(&path, "expected a triple [first, second, composite]");
        }
        for &m in &triple {
            if m >= morphisms.len() {
                return schema_err(&path, "morphism index out of range");
            }
        }
        composition.push((triple[0], triple[1], triple[2]));
    }

    // lattice
    let lattice = as_object(get(root, "lattice", "")?, "/lattice")?;
    reject_unknown(lattice, &["stages", "restrictions"], "/lattice")?;
    let stage_items = as_array(get(lattice, "stages", "/lattice")?, "/lattice/stages")?;
    if stage_items.len() != objects {
        return schema_err(
            "/lattice/stages",
            format!("expected one stage per object ({objects})"),
        );
    }
    let mut stages = Vec::with_capacity(stage_items.len());
    for (c, item) in stage_items.iter().enumerate() {
        let path = format!("/lattice/stages/{c}");
        let st = as_object(item, &path)?;
        reject_unknown(st, &["elements", "bottom", "top", "meet", "join"], &path)?;
        let elements = as_uint(get(st, "elements", &path)?, &format!("{path}/elements"))?;
        if elements == 0 {
            return schema_err(
                &format!("{path}/elements"),
                "a bounded lattice needs at least one element",
            );
        }
        let bottom = as_uint(get(st, "bottom", &path)?, &format!("{path}/bottom"))?;
        let top = as_uint(get(st, "top", &path)?, &format!("{path}/top"))?;
        if bottom >= elements || top >= elements {
            return schema_err(&path, "bottom/top index out of range");
        }
        let meet = square_table(
            get(st, "meet", &path)?,
            &format!("{path}/meet"),
            elements,
            elements,
        )?;
        let join = square_table(
            get(st, "join", &path)?,
            &format!("{path}/join"),
            elements,
            elements,
        )?;
        stages.push(RawStage {
            elements,
            bottom,
            top,
            meet,
            join,
        });
    }
    let restr_items = as_array(
        get(lattice, "restrictions", "/lattice")?,
        "/lattice/restrictions",
    )?;
    if restr_items.len() != morphisms.len() {
        return schema_err(
            "/lattice/restrictions",
            format!("expected one restriction per morphism ({})", morphisms.len()),
        );
    }
    let mut restrictions = Vec::with_capacity(restr_items.len());
    for (k, item) in restr_items.iter().enumerate() {
        let path = format!("/lattice/restrictions/{k}");
        let row = uint_array(item, &path)?;
        let (src, tgt) = morphisms[k];
        if row.len() != stages[tgt].elements {
            return schema_err(
                &path,
                format!(
                    "restriction along a morphism into object {tgt} must list {} images",
                    stages[tgt].elements
                ),
            );
        }
        for (e, &img) in row.iter().enumerate() {
            if img >= stages[src].elements {
                return schema_err(
                    &format!("{path}/{e}"),
                    format!("image out of range at object {src}"),
                );
            }
        }
        restrictions.push(row);
    }

    // presheaves (optional)
    let mut presheaves = Vec::new();
    if let Some(v) = root.get("presheaves") {
        let map = as_object(v, "/presheaves")?;
        for (pname, pval) in map {
            let path = format!("/presheaves/{pname}");
            if !valid_name(pname) {
                return schema_err(
                    &path,
                    "presheaf names use only ASCII letters, digits, `_`, and `-`",
                );
            }
            let entry = as_object(pval, &path)?;
            reject_unknown(entry, &["stages", "act"], &path)?;
            let psh_stages = uint_array(get(entry, "stages", &path)?, &format!("{path}/stages"))?;
            if psh_stages.len() != objects {
                return schema_err(
                    &format!("{path}/stages"),
                    format!("expected one stage size per object ({objects})"),
                );
            }
            let act = uint_table(get(entry, "act", &path)?, &format!("{path}/act"))?;
            if act.len() != morphisms.len() {
                return schema_err(
                    &format!("{path}/act"),
                    format!("expected one action table per morphism ({})", morphisms.len()),
                );
            }
            for (k, row) in act.iter().enumerate() {
                let (src, tgt) = morphisms[k];
                if row.len() != psh_stages[tgt] {
                    return schema_err(
                        &format!("{path}/act/{k}"),
                        format!("action along a morphism into object {tgt} must list {} images", psh_stages[tgt]),
                    );
                }
                for (e, &img) in row.iter().enumerate() {
                    if img >= psh_stages[src] {
                        return schema_err(
                            &format!("{path}/act/{k}/{e}"),
                            format!("image out of range at object {src}"),
                        );
                    }
                }
            }
            presheaves.push((
                pname.clone(),
                RawPresheaf {
                    stages: psh_stages,
                    act,
                },
            ));
        }
    }

    // checks (optional)
    let mut checks = Vec::new();
    if let Some(v) = root.get("checks") {
        let items = as_array(v, "/checks")?;
        let mut seen = BTreeMap::new();
        for (k, item) in items.iter().enumerate() {
            let path = format!("/checks/{k}");
            let entry = as_object(item, &path)?;
            let kind = as_str(get(entry, "kind", &path)?, &format!("{path}/kind"))?;
            let label = as_str(get(entry, "label", &path)?, &format!("{path}/label"))?;
            if !valid_name(label) {
                return schema_err(
                    &format!("{path}/label"),
                    "labels use only ASCII letters, digits, `_`, and `-`",
                );
            }
            if let Some(prev) = seen.insert(label.to_string(), k) {
                return schema_err(
                    &format!("{path}/label"),
                    format!("duplicate label (also used by /checks/{prev})"),
                );
            }
            let field = |key: &str| -> CliResult<String> {
                Ok(as_str(get(entry, key, &path)?, &format!("{path}/{key}"))?.to_string())
            };
            let check = match kind {
                "condition" => {
                    reject_unknown(entry, &["kind", "label", "condition"], &path)?;
                    RawCheck::Condition {
                        label: label.to_string(),
                        condition: field("condition")?,
                    }
                }
                "formula" => {
                    reject_unknown(entry, &["kind", "label", "formula"], &path)?;
                    RawCheck::Formula {
                        label: label.to_string(),
                        formula: field("formula")?,
                    }
                }
                "closedProper" => {
                    reject_unknown(entry, &["kind", "label", "object"], &path)?;
                    RawCheck::ClosedProper {
                        label: label.to_string(),
                        object: field("object")?,
                    }
                }
                "obsTop" => {
                    reject_unknown(entry, &["kind", "label", "object"], &path)?;
                    RawCheck::ObsTop {
                        label: label.to_string(),
                        object: field("object")?,
                    }
                }
                "suite" => {
                    reject_unknown(entry, &["kind", "label", "codomain"], &path)?;
                    RawCheck::Suite {
                        label: label.to_string(),
                        codomain: field("codomain")?,
                    }
                }
                "equivalence" => {
                    reject_unknown(entry, &["kind", "label", "codomain"], &path)?;
                    RawCheck::Equivalence {
                        label: label.to_string(),
                        codomain: field("codomain")?,
                    }
                }
                other => {
                    return schema_err(
                        &format!("{path}/kind"),
                        format!("unknown check kind `{other}`"),
                    )
                }
            };
            checks.push(check);
        }
    }

    Ok(RawModel {
        name,
        objects,
        morphisms,
        identities,
        composition,
        stages,
        restrictions,
        presheaves,
        checks,
    })
}

// ---- canonicalization ----

fn num(n: usize) -> Value {
    Value::from(n as u64)
}

fn num_array(xs: &[usize]) -> Value {
    Value::Array(xs.iter().map(|&x| num(x)).collect())
}

fn num_table(t: &[Vec<usize>]) -> Value {
    Value::Array(t.iter().map(|row| num_array(row)).collect())
}

/// The canonical JSON value of a parsed model: sorted keys, no floats,
/// optional sections omitted when empty. Canonicalization is idempotent:
/// printing and re-parsing reproduces the same value.
pub fn canonical_value(raw: &RawModel) -> Value {
    let mut root = Map::new();
    if let Some(name) = &raw.name {
        root.insert("name".into(), Value::String(name.clone()));
    }

    let mut base = Map::new();
    base.insert("objects".into(), num(raw.objects));
    base.insert(
        "morphisms".into(),
        Value::Array(
            raw.morphisms
                .iter()
                .map(|&(src, tgt)| {
                    let mut m = Map::new();
                    m.insert("src".into(), num(src));
                    m.insert("tgt".into(), num(tgt));
                    Value::Object(m)
                })
                .collect(),
        ),
    );
    base.insert("identities".into(), num_array(&raw.identities));
    base.insert(
        "composition".into(),
        Value::Array(
            raw.composition
                .iter()
                .map(|&(f, g, h)| num_array(&[f, g, h]))
                .collect(),
        ),
    );
    root.insert("base".into(), Value::Object(base));

    let mut lattice = Map::new();
    lattice.insert(
        "stages".into(),
        Value::Array(
            raw.stages
                .iter()
                .map(|st| {
                    let mut m = Map::new();
                    m.insert("elements".into(), num(st.elements));
                    m.insert("bottom".into(), num(st.bottom));
                    m.insert("top".into(), num(st.top));
                    m.insert("meet".into(), num_table(&st.meet));
                    m.insert("join".into(), num_table(&st.join));
                    Value::Object(m)
                })
                .collect(),
        ),
    );
    lattice.insert(
        "restrictions".into(),
        Value::Array(raw.restrictions.iter().map(|r| num_array(r)).collect()),
    );
    root.insert("lattice".into(), Value::Object(lattice));

    if !raw.presheaves.is_empty() {
        let mut map = Map::new();
        for (pname, p) in &raw.presheaves {
            let mut m = Map::new();
            m.insert("stages".into(), num_array(&p.stages));
            m.insert("act".into(), num_table(&p.act));
            map.insert(pname.clone(), Value::Object(m));
        }
        root.insert("presheaves".into(), Value::Object(map));
    }

    if !raw.checks.is_empty() {
        let items = raw
            .checks
            .iter()
            .map(|c| {
                let mut m = Map::new();
                m.insert("label".into(), Value::String(c.label().to_string()));
                match c {
                    RawCheck::Condition { condition, .. } => {
                        m.insert("kind".into(), Value::String("condition".into()));
                        m.insert("condition".into(), Value::String(condition.clone()));
                    }
                    RawCheck::Formula { formula, .. } => {
                        m.insert("kind".into(), Value::String("formula".into()));
                        m.insert("formula".into(), Value::String(formula.clone()));
                    }
                    RawCheck::ClosedProper { object, .. } => {
                        m.insert("kind".into(), Value::String("closedProper".into()));
                        m.insert("object".into(), Value::String(object.clone()));
                    }
                    RawCheck::ObsTop { object, .. } => {
                        m.insert("kind".into(), Value::String("obsTop".into()));
                        m.insert("object".into(), Value::String(object.clone()));
                    }
                    RawCheck::Suite { codomain, .. } => {
                        m.insert("kind".into(), Value::String("suite".into()));
                        m.insert("codomain".into(), Value::String(codomain.clone()));
                    }
                    RawCheck::Equivalence { codomain, .. } => {
                        m.insert("kind".into(), Value::String("equivalence".into()));
                        m.insert("codomain".into(), Value::String(codomain.clone()));
                    }
                }
                Value::Object(m)
            })
            .collect();
        root.insert("checks".into(), Value::Array(items));
    }

    Value::Object(root)
}

/// Render a JSON value in the canonical text form: two-space indentation,
/// sorted keys (guaranteed by the BTreeMap-backed `serde_json::Map`), LF
/// line ends, and a trailing newline.
pub fn canonical_text(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("canonical values serialize");
    s.push('\n');
    s
}

/// Parse a model file and print it back canonically.
pub fn canonicalize(text: &str) -> CliResult<String> {
    let raw = parse_model(text)?;
    Ok(canonical_text(&canonical_value(&raw)))
}

// ---- building the in-memory model ----

/// A loaded model: the core `Model` plus the named presheaves and the extra
/// check invocations from the file.
pub struct ModelData {
    pub name: String,
    pub model: Model,
    pub presheaves: Vec<(String, Presheaf)>,
    pub file_checks: Vec<RawCheck>,
}

fn validation(message: impl fmt::Display) -> CliError {
    CliError::Validation {
        message: message.to_string(),
    }
}

/// Build the in-memory model from a schema-valid raw model. Deep laws are
/// checked here by the core constructors: category laws, lattice axioms
/// per stage, restriction naturality, and functor laws of any auxiliary
/// presheaves.
pub fn build_model(raw: &RawModel, fallback_name: &str, budget: Budget) -> CliResult<ModelData> {
    let base = FinCategory::new(
        raw.objects,
        &raw.morphisms,
        &raw.identities,
        &raw.composition,
    )
    .map_err(validation)?;

    let carrier_stages: Vec<usize> = raw.stages.iter().map(|s| s.elements).collect();
    let carrier = Presheaf::new(
        Arc::clone(&base),
        carrier_stages,
        raw.restrictions.clone(),
    )
    .map_err(validation)?;
    let stage_lattices: Vec<FinDistLattice> = raw
        .stages
        .iter()
        .map(|s| {
            FinDistLattice::new(s.meet.clone(), s.join.clone(), s.bottom, s.top)
                .map_err(validation)
        })
        .collect::<CliResult<_>>()?;
    let lattice = InternalLattice::new(carrier, stage_lattices, &budget).map_err(validation)?;
    let model = Model::new(lattice, budget).map_err(validation)?;

    let mut presheaves = Vec::with_capacity(raw.presheaves.len());
    for (pname, p) in &raw.presheaves {
        let presheaf = Presheaf::new(Arc::clone(&base), p.stages.clone(), p.act.clone())
            .map_err(|e| validation(format!("presheaf `{pname}`: {e}")))?;
        presheaves.push((pname.clone(), presheaf));
    }

    let name = raw
        .name
        .clone()
        .unwrap_or_else(|| fallback_name.to_string());

    Ok(ModelData {
        name,
        model,
        presheaves,
        file_checks: raw.checks.clone(),
    })
}

/// Load a model file from disk: read, parse, build.
pub fn load_model(path: &std::path::Path, budget: Budget) -> CliResult<(RawModel, ModelData)> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Validation {
        message: format!("cannot read {}: {e}", path.display()),
    })?;
    let raw = parse_model(&text)?;
    let stem = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("model")
        .to_string();
    let data = build_model(&raw, &stem, budget)?;
    Ok((raw, data))
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "base": {"objects": 1, "morphisms": [{"src": 0, "tgt": 0}],
                 "identities": [0], "composition": []},
        "lattice": {"stages": [{"elements": 2, "bottom": 0, "top": 1,
                                "meet": [[0,0],[0,1]], "join": [[0,1],[1,1]]}],
                    "restrictions": [[0, 1]]}
    }"#;

    #[test]
    fn minimal_model_parses_and_builds() {
        let raw = parse_model(MINIMAL).unwrap();
        assert_eq!(raw.objects, 1);
        assert_eq!(raw.stages[0].elements, 2);
        let md = build_model(&raw, "fallback", Budget::new(10_000)).unwrap();
        assert_eq!(md.name, "fallback");
        assert_eq!(md.model.interval().stages(), &[2]);
    }

    #[test]
    fn named_model_keeps_its_name() {
        let text = MINIMAL.replacen('{', r#"{"name": "tiny","#, 1);
        let raw = parse_model(&text).unwrap();
        let md = build_model(&raw, "fallback", Budget::new(10_000)).unwrap();
        assert_eq!(md.name, "tiny");
    }

    #[test]
    fn canonicalization_is_idempotent() {
        let once = canonicalize(MINIMAL).unwrap();
        let twice = canonicalize(&once).unwrap();
        assert_eq!(once, twice);
        assert!(once.ends_with('\n'));
    }

    fn schema_path(text: &str) -> String {
        match parse_model(text) {
            Err(CliError::Schema { path, .. }) => path,
            other => panic!("expected a schema error, got {other:?}"),
        }
    }

    #[test]
    fn schema_errors_point_into_the_document() {
        assert_eq!(schema_path(r#"{"lattice": {}}"#), "");
        assert_eq!(
            schema_path(r#"{"base": 3, "lattice": {}}"#),
            "/base"
        );
        let unknown = MINIMAL.replacen('{', r#"{"extra": 1,"#, 1);
        assert_eq!(schema_path(&unknown), "/extra");
        let bad_identity = MINIMAL.replace(r#""identities": [0]"#, r#""identities": [7]"#);
        assert_eq!(schema_path(&bad_identity), "/base/identities/0");
        let short_row = MINIMAL.replace("[[0,0],[0,1]]", "[[0,0]]");
        assert_eq!(schema_path(&short_row), "/lattice/stages/0/meet");
    }

    #[test]
    fn duplicate_check_labels_are_rejected() {
        let with_checks = MINIMAL.replacen(
            '{',
            r#"{"checks": [
                {"kind": "condition", "label": "x", "condition": "strict"},
                {"kind": "condition", "label": "x", "condition": "phoa"}],"#,
            1,
        );
        assert_eq!(schema_path(&with_checks), "/checks/1/label");
    }

    #[test]
    fn broken_lattice_fails_validation_with_the_axiom() {
        let broken = MINIMAL.replace("[[0,0],[0,1]]", "[[0,0],[0,0]]");
        let raw = parse_model(&broken).unwrap();
        match build_model(&raw, "broken", Budget::new(10_000)) {
            Err(CliError::Validation { message }) => {
                assert!(message.contains("absorption"), "got: {message}")
            }
            other => panic!("expected a validation error, got {:?}", other.map(|_| ())),
        }
    }

    #[test]
    fn exit_codes_follow_the_error_class() {
        let schema = CliError::Schema { path: "/x".into(), message: "m".into() };
        let validation = CliError::Validation { message: "m".into() };
        let budget = CliError::Budget { check: "c".into(), message: "m".into() };
        assert_eq!(schema.exit_code(), 1);
        assert_eq!(validation.exit_code(), 1);
        assert_eq!(budget.exit_code(), 2);
        assert!(schema.to_string().contains("schema error at /x"));
    }
}
