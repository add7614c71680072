//! The interactive task form: one prompt per required field, validated as
//! entered, re-prompting until the entry passes. Prompts go to stderr so
//! stdout stays machine-readable.

use crate::errors::CliError;
use sketch_core::json::{parse_json, JsonObject, JsonValue};
use sketch_core::schema::{parse_schema, validate_lenient, SchemaDoc, SchemaKind};
use sketch_core::tasks::TaskSchema;
use std::io::{BufRead, Write};

/// Walks the schema's required fields in declaration order and returns the
/// collected fields object. `input` is the operator's line source; `out`
/// receives the prompts.
pub fn run_wizard(
    schema: &TaskSchema,
    input: &mut dyn BufRead,
    out: &mut dyn Write,
) -> Result<JsonObject, CliError> {
    writeln!(out, "Filling a {} task instance.", schema.name)?;
    writeln!(
        out,
        "Enter one value per line; structured fields take one-line JSON.\n"
    )?;
    let mut fields = JsonObject::new();
    // declaration order of the spec, restricted to required names
    let ordered: Vec<&(String, SchemaDoc)> = schema
        .spec
        .properties
        .iter()
        .filter(|(name, _)| schema.spec.is_required(name))
        .collect();
    for (name, sub) in ordered {
        let value = ask_field(name, sub, input, out)?;
        fields.insert(name.clone(), value);
    }
    Ok(fields)
}

fn ask_field(
    name: &str,
    sub: &SchemaDoc,
    input: &mut dyn BufRead,
    out: &mut dyn Write,
) -> Result<JsonValue, CliError> {
    loop {
        write!(out, "{name}")?;
        if let Some(desc) = &sub.description {
            write!(out, " — {desc}")?;
        }
        writeln!(out, " ({}):", hint(sub))?;
        write!(out, "> ")?;
        out.flush()?;

        let mut line = String::new();
        if input.read_line(&mut line)? == 0 {
            return Err(CliError::usage(format!(
                "input ended before the form was complete (at field {name:?})"
            )));
        }
        let entry = line.trim();
        if entry.is_empty() {
            writeln!(out, "  nothing entered; try again\n")?;
            continue;
        }

        let value = match interpret(entry, sub) {
            Ok(v) => v,
            Err(reason) => {
                writeln!(out, "  {reason}; try again\n")?;
                continue;
            }
        };
        let report = validate_lenient(&value, sub);
        if !report.valid() {
            for violation in report.violations() {
                writeln!(
                    out,
                    "  {} ({}): {}",
                    violation.path, violation.keyword, violation.message
                )?;
            }
            writeln!(out, "  try again\n")?;
            continue;
        }
        if name == "outputFormat" {
            if let Err(e) = parse_schema(&value) {
                writeln!(out, "  not a usable output schema: {e}; try again\n")?;
                continue;
            }
        }
        return Ok(value);
    }
}

/// Bare text is accepted for string fields; everything else must be JSON.
fn interpret(entry: &str, sub: &SchemaDoc) -> Result<JsonValue, String> {
    match parse_json(entry) {
        Ok(v) => Ok(v),
        Err(e) => {
            if sub.kind == SchemaKind::String && !entry.starts_with('"') {
                Ok(JsonValue::from(entry))
            } else {
                Err(format!("not valid JSON ({e})"))
            }
        }
    }
}

fn hint(sub: &SchemaDoc) -> String {
    if let Some(members) = &sub.enum_values {
        let spellings: Vec<String> = members
            .iter()
            .map(sketch_core::json::serialize_canonical)
            .collect();
        return format!("one of {}", spellings.join(", "));
    }
    match sub.kind {
        SchemaKind::String => "text".to_string(),
        SchemaKind::Object => "JSON object".to_string(),
        SchemaKind::Array => "JSON array".to_string(),
        other => format!("JSON {}", other.name()),
    }
}
