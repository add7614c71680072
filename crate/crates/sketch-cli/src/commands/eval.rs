//! `sketch eval`: score a backend against an eval dataset, writing a JSON
//! report file and printing the aligned table.

use crate::backends::build_backend;
use crate::errors::CliError;
use crate::settings::{ModeArg, Settings};
use sketch_core::engine::{Engine, GenerationConfig};
use sketch_core::eval::{load_eval_dataset, run_eval, summarize, EvalConfig};
use sketch_core::json::serialize_pretty;
use std::path::Path;

use super::generate::effective_mode;
use super::{load_catalog, load_vocab, prompt_options};

pub struct EvalParams<'a> {
    pub dataset: &'a Path,
    pub workers: usize,
    pub mode: Option<ModeArg>,
    pub max_tokens: u32,
    pub attempts: u32,
    pub temperature: f64,
    pub lenient: bool,
    pub report: &'a Path,
}

pub fn run(settings: &Settings, params: &EvalParams) -> Result<(), CliError> {
    if !params.dataset.is_file() {
        return Err(CliError::usage(format!(
            "no such dataset file: {}",
            params.dataset.display()
        )));
    }
    let catalog = load_catalog(settings)?;
    let dataset = load_eval_dataset(params.dataset, &catalog)?;

    let vocab = load_vocab(settings)?;
    let engine = Engine::with_prompt_options(vocab, prompt_options(settings)?);
    let backend = build_backend(settings, engine.vocab().size())?;
    let config = EvalConfig {
        generation: GenerationConfig {
            mode: effective_mode(settings, params.mode),
            max_tokens: params.max_tokens,
            attempts: params.attempts,
            temperature: params.temperature,
            seed: settings.seed,
            lenient_parse: params.lenient,
        },
        workers: params.workers,
    };
    let report = run_eval(&engine, backend.as_ref(), &dataset, &config)?;
    let summary = summarize(vec![report])?;
    std::fs::write(params.report, serialize_pretty(&summary.to_json()))?;
    print!("{}", summary.render_table());
    Ok(())
}
