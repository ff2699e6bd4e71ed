//! JSON Lines trial records: `{"params": {"c": 0.3, "x": null}, "value": -3.0}`.

use std::collections::BTreeMap;
use std::io::{BufRead, BufReader};
use std::path::Path;

use serde::Deserialize;
use serde_json::Value;

use super::{EvaluationSet, ParamValue, SearchSpace, Trial};
use crate::error::{Error, Result, Violation};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TrialDoc {
    params: BTreeMap<String, Value>,
    value: f64,
}

fn to_param_value(value: &Value) -> Option<ParamValue> {
    match value {
        Value::Null => Some(ParamValue::Inactive),
        Value::Number(n) => n.as_f64().map(ParamValue::Number),
        Value::String(s) => Some(ParamValue::Category(s.clone())),
        _ => None,
    }
}

fn from_param_value(value: &ParamValue) -> Value {
    match value {
        ParamValue::Number(v) => serde_json::Number::from_f64(*v)
            .map(Value::Number)
            .unwrap_or(Value::Null),
        ParamValue::Category(l) => Value::String(l.clone()),
        ParamValue::Inactive => Value::Null,
    }
}

fn parse_line(space: &SearchSpace, text: &str, line: usize) -> Result<Trial> {
    let doc: TrialDoc = serde_json::from_str(text).map_err(|e| Error::Parse {
        line,
        message: e.to_string(),
    })?;
    let mut violations = Vec::new();
    for name in doc.params.keys() {
        if space.position(name).is_err() {
            violations.push(Violation {
                param: name.clone(),
                reason: "not declared in the search space".into(),
            });
        }
    }
    let mut values = Vec::with_capacity(space.len());
    for p in space.parameters() {
        match doc.params.get(&p.name) {
            Some(v) => match to_param_value(v) {
                Some(pv) => values.push(pv),
                None => {
                    violations.push(Violation {
                        param: p.name.clone(),
                        reason: format!("expected number, string or null, got {v}"),
                    });
                    values.push(ParamValue::Inactive);
                }
            },
            None => {
                violations.push(Violation {
                    param: p.name.clone(),
                    reason: "missing".into(),
                });
                values.push(ParamValue::Inactive);
            }
        }
    }
    if violations.is_empty() {
        let trial = Trial::new(values, doc.value);
        violations = space.validate_trial(&trial);
        if violations.is_empty() {
            return Ok(trial);
        }
    }
    Err(Error::InvalidLine { line, violations })
}

/// Parses a JSON Lines trial log against `space`. Blank lines are skipped;
/// line numbers in errors are 1-based.
pub fn parse_trials(space: &SearchSpace, reader: impl std::io::Read) -> Result<EvaluationSet> {
    let reader = BufReader::new(reader);
    let mut trials = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(|e| Error::Parse {
            line: line_no,
            message: e.to_string(),
        })?;
        let text = line.trim();
        if text.is_empty() {
            continue;
        }
        trials.push(parse_line(space, text, line_no)?);
    }
    if trials.is_empty() {
        return Err(Error::EmptyEvaluationSet);
    }
    Ok(EvaluationSet::new_unchecked(space.clone(), trials))
}

pub fn load_trials(path: impl AsRef<Path>, space: &SearchSpace) -> Result<EvaluationSet> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    parse_trials(space, file)
}

/// Writes trials in the format [`parse_trials`] reads.
pub fn trials_to_jsonl(evalset: &EvaluationSet) -> String {
    let mut out = String::new();
    for trial in evalset.trials() {
        let params: serde_json::Map<String, Value> = evalset
            .space()
            .names()
            .zip(&trial.values)
            .map(|(name, v)| (name.to_string(), from_param_value(v)))
            .collect();
        let record = serde_json::json!({ "params": params, "value": trial.objective });
        out.push_str(&record.to_string());
        out.push('\n');
    }
    out
}
