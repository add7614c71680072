pub mod dataset;
pub mod eval;
pub mod generate;
pub mod schemas;
pub mod task;

use crate::errors::CliError;
use crate::settings::Settings;
use sketch_core::compiler::Vocabulary;
use sketch_core::prompt::PromptOptions;
use sketch_core::tasks::Catalog;

/// Builtin catalog plus the configured overlay directory, if any.
pub fn load_catalog(settings: &Settings) -> Result<Catalog, CliError> {
    match &settings.schema_dir {
        Some(dir) => Ok(Catalog::with_dir(dir)?),
        None => Ok(Catalog::builtin()),
    }
}

pub fn load_vocab(settings: &Settings) -> Result<Vocabulary, CliError> {
    match &settings.vocab {
        Some(path) => Ok(Vocabulary::load(path)?),
        None => Ok(Vocabulary::byte_level()),
    }
}

pub fn prompt_options(settings: &Settings) -> Result<PromptOptions, CliError> {
    let custom_template = match &settings.template {
        Some(path) => Some(std::fs::read_to_string(path).map_err(|e| {
            CliError::usage(format!("cannot read template {}: {e}", path.display()))
        })?),
        None => None,
    };
    Ok(PromptOptions {
        pretty_format: false,
        custom_template,
    })
}
