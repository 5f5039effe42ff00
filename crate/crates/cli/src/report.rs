//! Report records and emission. A report is a canonically ordered list of
//! per-check records plus run metadata, rendered either as canonical JSON
//! (sorted keys, integers only, LF line ends — the diff-stable golden
//! format) or as a markdown table. Wall-clock timings are measured by the
//! runner and printed to stderr only: keeping them out of the report body
//! is what makes reports byte-identical across repeated and parallel runs.

use serde_json::{Map, Value};

/// Advisory attached to every report: stagewise dependent sums are
/// 0-truncated, so checks built on them (flagged `zero-truncated-sums`)
/// decide only the set-level reading of their properties.
pub const SUM_ADVISORY: &str = "stagewise dependent sums are 0-truncated; \
    checks flagged `zero-truncated-sums` decide the set-level reading only, \
    higher-truncation behavior is out of scope";

/// The flag placed on records whose computation sums fibers stagewise.
pub const FLAG_TRUNCATED_SUMS: &str = "zero-truncated-sums";

/// Outcome of one check. `verdict` is the decided property value; it is
/// `None` exactly when the check could not run to completion within its
/// element budget, in which case `error` says what overflowed. A false
/// verdict is a completed check (the property fails), not an error.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckRecord {
    pub name: String,
    pub inputs: Map<String, Value>,
    pub verdict: Option<bool>,
    pub witness: Option<Value>,
    pub counts: Map<String, Value>,
    pub details: Map<String, Value>,
    pub flags: Vec<String>,
    pub error: Option<String>,
}

impl CheckRecord {
    pub fn new(name: impl Into<String>) -> Self {
        CheckRecord {
            name: name.into(),
            inputs: Map::new(),
            verdict: None,
            witness: None,
            counts: Map::new(),
            details: Map::new(),
            flags: Vec::new(),
            error: None,
        }
    }

    pub fn to_value(&self) -> Value {
        let mut m = Map::new();
        m.insert("name".into(), Value::String(self.name.clone()));
        m.insert("inputs".into(), Value::Object(self.inputs.clone()));
        m.insert(
            "verdict".into(),
            match self.verdict {
                Some(b) => Value::Bool(b),
                None => Value::Null,
            },
        );
        m.insert(
            "witness".into(),
            self.witness.clone().unwrap_or(Value::Null),
        );
        m.insert("counts".into(), Value::Object(self.counts.clone()));
        m.insert("details".into(), Value::Object(self.details.clone()));
        if !self.flags.is_empty() {
            m.insert(
                "flags".into(),
                Value::Array(
                    self.flags
                        .iter()
                        .map(|f| Value::String(f.clone()))
                        .collect(),
                ),
            );
        }
        if let Some(e) = &self.error {
            m.insert("error".into(), Value::String(e.clone()));
        }
        Value::Object(m)
    }
}

/// Witness rendering shared by record builders: the stage and the values
/// of the outer universally quantified variables there.
pub fn witness_value(stage: usize, environment: &[(String, usize)]) -> Value {
    let mut m = Map::new();
    m.insert("stage".into(), Value::from(stage as u64));
    m.insert(
        "environment".into(),
        Value::Array(
            environment
                .iter()
                .map(|(var, val)| {
                    let mut e = Map::new();
                    e.insert("value".into(), Value::from(*val as u64));
                    e.insert("var".into(), Value::String(var.clone()));
                    Value::Object(e)
                })
                .collect(),
        ),
    );
    Value::Object(m)
}

/// Assemble the canonical report value: records sorted by name, run
/// metadata, and the standing advisory.
pub fn report_value(model_name: &str, selection: &[String], records: &[CheckRecord]) -> Value {
    let mut sorted: Vec<&CheckRecord> = records.iter().collect();
    sorted.sort_by(|a, b| a.name.cmp(&b.name));
    let mut root = Map::new();
    root.insert(
        "advisories".into(),
        Value::Array(vec![Value::String(SUM_ADVISORY.to_string())]),
    );
    root.insert(
        "checks".into(),
        Value::Array(sorted.iter().map(|r| r.to_value()).collect()),
    );
    root.insert("model".into(), Value::String(model_name.to_string()));
    root.insert("schema".into(), Value::from(1u64));
    root.insert(
        "selection".into(),
        Value::Array(
            selection
                .iter()
                .map(|s| Value::String(s.clone()))
                .collect(),
        ),
    );
    Value::Object(root)
}

fn compact(v: &Value) -> String {
    serde_json::to_string(v).expect("report values serialize")
}

/// Render the report as a markdown document with one table row per check.
/// The same determinism rules apply: no timings, canonical record order.
pub fn report_markdown(model_name: &str, selection: &[String], records: &[CheckRecord]) -> String {
    let mut sorted: Vec<&CheckRecord> = records.iter().collect();
    sorted.sort_by(|a, b| a.name.cmp(&b.name));
    let mut out = String::new();
    out.push_str(&format!("# Check report for model `{model_name}`\n\n"));
    out.push_str(&format!("Selection: `{}`\n\n", selection.join(", ")));
    out.push_str("| check | verdict | witness | counts | notes |\n");
    out.push_str("|---|---|---|---|---|\n");
    for r in &sorted {
        let verdict = match (r.verdict, &r.error) {
            (Some(true), _) => "true".to_string(),
            (Some(false), _) => "false".to_string(),
            (None, Some(_)) => "budget".to_string(),
            (None, None) => "-".to_string(),
        };
        let witness = match &r.witness {
            Some(w) => format!("`{}`", compact(w)),
            None => "-".to_string(),
        };
        let counts = if r.counts.is_empty() {
            "-".to_string()
        } else {
            format!("`{}`", compact(&Value::Object(r.counts.clone())))
        };
        let mut notes = Vec::new();
        if let Some(e) = &r.error {
            notes.push(e.clone());
        }
        if !r.flags.is_empty() {
            notes.push(format!("flags: {}", r.flags.join(", ")));
        }
        let notes = if notes.is_empty() {
            "-".to_string()
        } else {
            notes.join("; ").replace('|', "\\|")
        };
        out.push_str(&format!(
            "| {} | {} | {} | {} | {} |\n",
            r.name, verdict, witness, counts, notes
        ));
    }
    out.push('\n');
    out.push_str(&format!("Advisory: {SUM_ADVISORY}\n"));
    out
}
