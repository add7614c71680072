//! `sketch schemas list` and `sketch schemas show NAME`.

use crate::errors::CliError;
use crate::settings::Settings;
use sketch_core::json::serialize_pretty;

use super::load_catalog;

pub fn list(settings: &Settings) -> Result<(), CliError> {
    let catalog = load_catalog(settings)?;
    let name_width = catalog
        .list()
        .iter()
        .map(|s| s.name.len())
        .max()
        .unwrap_or(0);
    let category_width = catalog
        .list()
        .iter()
        .map(|s| s.category.name().len())
        .max()
        .unwrap_or(0);
    for schema in catalog.list() {
        println!(
            "{:name_width$}  {:category_width$}  required: {}",
            schema.name,
            schema.category.name(),
            schema.required_fields().join(", "),
        );
    }
    Ok(())
}

pub fn show(settings: &Settings, name: &str) -> Result<(), CliError> {
    let catalog = load_catalog(settings)?;
    let schema = catalog
        .get(name)
        .ok_or_else(|| CliError::usage(format!("unknown task schema {name:?}")))?;
    println!("name:     {}", schema.name);
    println!("category: {}", schema.category.name());
    if !schema.aliases.is_empty() {
        println!("aliases:  {}", schema.aliases.join(", "));
    }
    println!("required: {}", schema.required_fields().join(", "));
    println!("spec:");
    print!("{}", serialize_pretty(schema.spec.source()));
    Ok(())
}
