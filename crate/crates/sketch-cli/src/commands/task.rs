//! `sketch task new`: build a task instance file, either interactively or
//! by validating a provided document.

use crate::errors::CliError;
use crate::settings::Settings;
use crate::wizard::run_wizard;
use sketch_core::json::{parse_json, JsonValue};
use sketch_core::tasks::{save_instance, TaskInstance};
use std::path::Path;

use super::load_catalog;

pub fn new(
    settings: &Settings,
    schema_name: &str,
    from: Option<&Path>,
    out: &Path,
) -> Result<(), CliError> {
    let catalog = load_catalog(settings)?;
    let schema = catalog
        .get(schema_name)
        .ok_or_else(|| CliError::usage(format!("unknown task schema {schema_name:?}")))?;

    let instance: TaskInstance = match from {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| {
                CliError::usage(format!("cannot read {}: {e}", path.display()))
            })?;
            let doc = parse_json(&text)?;
            match doc.get("schemaName").and_then(JsonValue::as_str) {
                // a full instance document; its schema must be the named one
                Some(declared) => {
                    let instance = catalog.parse_instance(&text)?;
                    if instance.schema_name() != schema.name {
                        return Err(CliError::usage(format!(
                            "file declares schema {declared:?} but --schema names {:?}",
                            schema.name
                        )));
                    }
                    instance
                }
                // a bare fields object for the named schema
                None => catalog.instantiate(&schema.name, &doc)?,
            }
        }
        None => {
            let stdin = std::io::stdin();
            let mut input = stdin.lock();
            let mut prompts = std::io::stderr();
            let fields = run_wizard(schema, &mut input, &mut prompts)?;
            catalog.instantiate(&schema.name, &JsonValue::Object(fields))?
        }
    };

    save_instance(&instance, out)?;
    println!("{}", out.display());
    Ok(())
}
