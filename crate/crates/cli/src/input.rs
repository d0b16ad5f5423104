//! Input files: algebraic tuples, periodic specs, cubic specs, sequences.

use crate::CliError;
use mcf_core::exactnum::{parse_rational, AlgebraicReal, AlgebraicRealJson, FieldElement, FieldElementJson, Rational};
use mcf_core::jacobi_perron::InputTuple;
use serde::de::DeserializeOwned;
use serde::Deserialize;
use std::io::Read;
use std::path::Path;
use std::sync::Arc;

/// `{"generator": {"minpoly": [...], "interval": [lo, hi]}, "values": [{"coords": [...]}, ...]}`.
/// Without a generator the values are rationals with a single coordinate.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AlgebraicInputJson {
    generator: Option<AlgebraicRealJson>,
    values: Vec<FieldElementJson>,
}

pub fn read_source(path: &Path) -> Result<String, CliError> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| CliError::Input(format!("stdin: {e}")))?;
        return Ok(s);
    }
    std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

pub fn parse_json<T: DeserializeOwned>(path: &Path, text: &str) -> Result<T, CliError> {
    serde_json::from_str(text).map_err(|e| {
        CliError::Input(format!(
            "{}: line {}, column {}: {e}",
            path.display(),
            e.line(),
            e.column()
        ))
    })
}

pub fn algebraic_input(path: &Path) -> Result<InputTuple, CliError> {
    let raw: AlgebraicInputJson = parse_json(path, &read_source(path)?)?;
    let at = |field: String, e: &dyn std::fmt::Display| CliError::Input(format!("{}: {field}: {e}", path.display()));
    let field = match &raw.generator {
        Some(g) => AlgebraicReal::try_from(g).map_err(|e| at("generator".into(), &e))?,
        None => AlgebraicReal::rationals(),
    };
    let field = Arc::new(field);
    let values = raw
        .values
        .iter()
        .enumerate()
        .map(|(i, v)| FieldElement::from_json(field.clone(), v).map_err(|e| at(format!("values[{i}]"), &e)))
        .collect::<Result<Vec<_>, _>>()?;
    InputTuple::new(values).map_err(|e| at("values".into(), &e))
}

/// A JSON array of numbers or strings, or whitespace/comma separated terms.
pub fn sequence(path: &Path) -> Result<Vec<Rational>, CliError> {
    let text = read_source(path)?;
    let trimmed = text.trim_start();
    if trimmed.starts_with('[') {
        let items: Vec<serde_json::Value> = parse_json(path, &text)?;
        return items
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let s = match v {
                    serde_json::Value::String(s) => s.clone(),
                    serde_json::Value::Number(n) => n.to_string(),
                    other => {
                        return Err(CliError::Input(format!(
                            "{}: element {i}: expected a number or string, got {other}",
                            path.display()
                        )))
                    }
                };
                parse_rational(&s).map_err(|e| CliError::Input(format!("{}: element {i}: {e}", path.display())))
            })
            .collect();
    }
    let mut out = Vec::new();
    for (line_no, line) in text.lines().enumerate() {
        for token in line.split(|c: char| c == ',' || c.is_whitespace()).filter(|t| !t.is_empty()) {
            let value = parse_rational(token).map_err(|e| {
                CliError::Input(format!("{}: line {}: {e}", path.display(), line_no + 1))
            })?;
            out.push(value);
        }
    }
    Ok(out)
}
