//! `sketch generate`: produce structured output for a task instance over
//! one or more inputs. One canonical JSON line per input on stdout.

use crate::backends::build_backend;
use crate::errors::CliError;
use crate::settings::{BackendKind, ModeArg, Settings};
use sketch_core::engine::{Engine, EngineError, GenerationConfig, GenerationMode};
use sketch_core::json::{serialize_canonical, serialize_pretty};
use sketch_core::util::derive_seed;
use std::path::Path;

use super::{load_catalog, load_vocab, prompt_options};

pub struct GenerateParams<'a> {
    pub task: &'a Path,
    pub input: Option<&'a str>,
    pub input_file: Option<&'a Path>,
    pub mode: Option<ModeArg>,
    pub max_tokens: u32,
    pub attempts: u32,
    pub temperature: f64,
    pub lenient: bool,
    pub pretty: bool,
}

/// Picks the effective mode: flag, else settings default, with the http
/// invariant (completion-only protocol) forcing free mode.
pub fn effective_mode(settings: &Settings, flag: Option<ModeArg>) -> GenerationMode {
    let requested = flag.unwrap_or(settings.mode);
    if settings.backend == BackendKind::Http {
        if requested == ModeArg::Strict {
            eprintln!("note: the http backend cannot score tokens; using free mode");
        }
        return GenerationMode::Free;
    }
    match requested {
        ModeArg::Strict => GenerationMode::Strict,
        ModeArg::Free => GenerationMode::Free,
    }
}

pub fn run(settings: &Settings, params: &GenerateParams) -> Result<(), CliError> {
    let catalog = load_catalog(settings)?;
    let instance = catalog.load_instance(params.task)?;

    let inputs: Vec<String> = match (params.input, params.input_file) {
        (Some(text), None) => vec![text.to_string()],
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path).map_err(|e| {
                CliError::usage(format!("cannot read {}: {e}", path.display()))
            })?;
            text.lines()
                .map(str::trim)
                .filter(|l| !l.is_empty())
                .map(String::from)
                .collect()
        }
        (Some(_), Some(_)) => {
            return Err(CliError::usage("--input and --input-file are exclusive"))
        }
        (None, None) => {
            return Err(CliError::usage("one of --input or --input-file is needed"))
        }
    };
    if inputs.is_empty() || inputs.iter().any(|i| i.trim().is_empty()) {
        return Err(CliError::usage("input is empty"));
    }

    let vocab = load_vocab(settings)?;
    let engine = Engine::with_prompt_options(vocab, prompt_options(settings)?);
    let backend = build_backend(settings, engine.vocab().size())?;
    let mode = effective_mode(settings, params.mode);

    for (index, input) in inputs.iter().enumerate() {
        let config = GenerationConfig {
            mode,
            max_tokens: params.max_tokens,
            attempts: params.attempts,
            temperature: params.temperature,
            seed: derive_seed(settings.seed, index as u64),
            lenient_parse: params.lenient,
        };
        let outcome = match engine.generate(backend.as_ref(), &instance, input, &config) {
            Ok(outcome) => outcome,
            Err(EngineError::FormatFailure(last)) => {
                eprintln!("{}", last.raw_text);
                return Err(CliError::format_failure(format!(
                    "input {}: output still invalid after {} attempt(s)",
                    index + 1,
                    last.attempts_used
                )));
            }
            Err(other) => return Err(other.into()),
        };
        let value = outcome
            .value
            .ok_or_else(|| CliError::format_failure("generation produced no value"))?;
        if params.pretty {
            print!("{}", serialize_pretty(&value));
        } else {
            println!("{}", serialize_canonical(&value));
        }
    }
    Ok(())
}
