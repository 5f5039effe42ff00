//! Orchestration: resolve a check selection against the registry, run the
//! checks (optionally in parallel), assemble the canonical report, compare
//! against golden files, and re-verify previously emitted reports.
//!
//! Reports are deterministic: records are keyed and sorted by check name,
//! every map is emitted with sorted keys, and wall-clock timings go to
//! stderr only. Running with one worker or many produces identical bytes.

use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde_json::Value;

use scone_core::Budget;

use crate::checks::{registry, run_check, CheckSpec};
use crate::model::{canonical_text, load_model, CliError, CliResult, ModelData};
use crate::report::{report_markdown, report_value, CheckRecord};

/// The selectable check groups, besides `all` and exact check names.
pub const GROUPS: [&str; 7] = [
    "conditions",
    "geometry",
    "duality",
    "complete",
    "extend",
    "file",
    "formula",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Emit {
    Json,
    Md,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub model_path: PathBuf,
    pub selections: Vec<String>,
    pub budget: usize,
    pub jobs: usize,
    pub emit: Emit,
    pub golden: Option<PathBuf>,
    pub formula: Option<String>,
}

/// Normalize selection tokens: empty or containing `all` collapses to
/// `["all"]`, anything else is sorted and deduplicated.
pub fn normalized_selection(tokens: &[String]) -> Vec<String> {
    if tokens.is_empty() || tokens.iter().any(|t| t == "all") {
        return vec!["all".to_string()];
    }
    let mut out: Vec<String> = tokens.to_vec();
    out.sort();
    out.dedup();
    out
}

/// The golden-file key for a selection: the normalized tokens joined
/// with `+`.
pub fn selection_key(tokens: &[String]) -> String {
    normalized_selection(tokens).join("+")
}

/// Resolve tokens to registry entries. A token is `all`, a group name, or
/// an exact check name; anything else is a validation error.
pub fn resolve_selection<'a>(
    specs: &'a [CheckSpec],
    tokens: &[String],
) -> CliResult<Vec<&'a CheckSpec>> {
    let normalized = normalized_selection(tokens);
    let mut picked = vec![false; specs.len()];
    for token in &normalized {
        if token == "all" {
            picked.iter_mut().for_each(|p| *p = true);
            continue;
        }
        let mut hit = false;
        for (i, s) in specs.iter().enumerate() {
            if s.group == token || s.name == *token {
                picked[i] = true;
                hit = true;
            }
        }
        if !hit && GROUPS.contains(&token.as_str()) {
            // A known group with no registered checks (e.g. `file` on a
            // model without a check list) selects nothing, which is fine.
            hit = true;
        }
        if !hit {
            return Err(CliError::Validation {
                message: format!(
                    "unknown selection `{token}`; use `all`, a group ({}), or an exact check name",
                    GROUPS.join(", ")
                ),
            });
        }
    }
    Ok(specs
        .iter()
        .zip(&picked)
        .filter(|(_, &p)| p)
        .map(|(s, _)| s)
        .collect())
}

fn run_selected(md: &ModelData, selected: &[&CheckSpec], jobs: usize) -> CliResult<Vec<CheckRecord>> {
    let jobs = jobs.max(1);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| CliError::Validation {
            message: format!("could not build worker pool: {e}"),
        })?;
    pool.install(|| {
        selected
            .par_iter()
            .map(|s| {
                let start = Instant::now();
                let rec = run_check(md, s);
                eprintln!("[time] {} {:.3?}", s.name, start.elapsed());
                rec
            })
            .collect::<CliResult<Vec<CheckRecord>>>()
    })
}

fn model_stem(path: &Path) -> CliResult<String> {
    path.file_stem()
        .and_then(|s| s.to_str())
        .map(|s| s.to_string())
        .ok_or_else(|| CliError::Validation {
            message: format!("model path has no usable file stem: {}", path.display()),
        })
}

fn first_difference(a: &str, b: &str) -> String {
    for (k, (la, lb)) in a.lines().zip(b.lines()).enumerate() {
        if la != lb {
            return format!("line {}: got `{la}`, golden has `{lb}`", k + 1);
        }
    }
    format!(
        "lengths differ: got {} lines, golden has {} lines",
        a.lines().count(),
        b.lines().count()
    )
}

/// Run a selection and print the report; returns the process exit code
/// (0 = every selected check completed, 2 = at least one check hit its
/// element budget). Golden mismatches and unknown selections error out.
pub fn run(cfg: &RunConfig) -> CliResult<i32> {
    let budget = Budget::new(cfg.budget);
    let (_, md) = load_model(&cfg.model_path, budget)?;
    let specs = registry(&md, cfg.formula.as_deref())?;
    let selected = resolve_selection(&specs, &cfg.selections)?;
    let records = run_selected(&md, &selected, cfg.jobs)?;
    let selection = normalized_selection(&cfg.selections);
    let value = report_value(&md.name, &selection, &records);
    let json = canonical_text(&value);

    if let Some(dir) = &cfg.golden {
        let stem = model_stem(&cfg.model_path)?;
        let path = dir.join(format!("{stem}.{}.json", selection_key(&cfg.selections)));
        let golden = std::fs::read_to_string(&path).map_err(|e| CliError::Validation {
            message: format!("could not read golden file {}: {e}", path.display()),
        })?;
        if golden != json {
            return Err(CliError::Validation {
                message: format!(
                    "report differs from golden {}; {}",
                    path.display(),
                    first_difference(&json, &golden)
                ),
            });
        }
    }

    match cfg.emit {
        Emit::Json => print!("{json}"),
        Emit::Md => print!("{}", report_markdown(&md.name, &selection, &records)),
    }

    let budget_hit = records.iter().any(|r| r.error.is_some());
    Ok(if budget_hit { 2 } else { 0 })
}

/// Re-run every check named in a previously emitted JSON report and require
/// each record to reproduce byte-for-byte (after canonical ordering).
pub fn verify_report(model_path: &Path, report_path: &Path, budget: usize) -> CliResult<i32> {
    let (_, md) = load_model(model_path, Budget::new(budget))?;
    let text = std::fs::read_to_string(report_path).map_err(|e| CliError::Validation {
        message: format!("could not read report {}: {e}", report_path.display()),
    })?;
    let value: Value = serde_json::from_str(&text).map_err(|e| CliError::Validation {
        message: format!("report is not valid JSON: {e}"),
    })?;
    let root = value.as_object().ok_or_else(|| CliError::Validation {
        message: "report root must be an object".into(),
    })?;
    if root.get("schema").and_then(Value::as_u64) != Some(1) {
        return Err(CliError::Validation {
            message: "report schema version is not 1".into(),
        });
    }
    let reported_model = root.get("model").and_then(Value::as_str).unwrap_or("");
    if reported_model != md.name {
        return Err(CliError::Validation {
            message: format!(
                "report was produced for model `{reported_model}`, but the file names `{}`",
                md.name
            ),
        });
    }
    let checks = root
        .get("checks")
        .and_then(Value::as_array)
        .ok_or_else(|| CliError::Validation {
            message: "report has no `checks` array".into(),
        })?;

    // An ad-hoc formula check carries its source in its inputs, so the
    // registry can be rebuilt to include it.
    let formula = checks.iter().find_map(|c| {
        let obj = c.as_object()?;
        if obj.get("name")?.as_str()? != "formula.cli" {
            return None;
        }
        obj.get("inputs")?.get("formula")?.as_str().map(String::from)
    });
    let specs = registry(&md, formula.as_deref())?;

    let mut mismatched = Vec::new();
    let mut verified = 0usize;
    for stored in checks {
        let name = stored
            .get("name")
            .and_then(Value::as_str)
            .ok_or_else(|| CliError::Validation {
                message: "a report record has no `name`".into(),
            })?;
        let spec = specs
            .iter()
            .find(|s| s.name == name)
            .ok_or_else(|| CliError::Validation {
                message: format!("report names a check this model does not offer: {name}"),
            })?;
        let rec = run_check(&md, spec)?;
        if rec.to_value() == *stored {
            verified += 1;
        } else {
            mismatched.push(name.to_string());
        }
    }
    if mismatched.is_empty() {
        println!("report verified: {verified} checks reproduced");
        Ok(0)
    } else {
        Err(CliError::Validation {
            message: format!(
                "report verification failed; stale records: {}",
                mismatched.join(", ")
            ),
        })
    }
}
