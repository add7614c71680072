//! Effective configuration: defaults, overridden by a `sketch.toml` file,
//! overridden by command-line flags. Paths in the file resolve relative to
//! the file's directory.

use crate::errors::CliError;
use serde::Deserialize;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum BackendKind {
    #[value(name = "mock_uniform")]
    MockUniform,
    #[value(name = "scripted")]
    Scripted,
    #[value(name = "http")]
    Http,
}

impl BackendKind {
    fn parse(name: &str) -> Option<BackendKind> {
        match name {
            "mock_uniform" => Some(BackendKind::MockUniform),
            "scripted" => Some(BackendKind::Scripted),
            "http" => Some(BackendKind::Http),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ModeArg {
    Strict,
    Free,
}

/// The `sketch.toml` document; every key optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    schema_dir: Option<PathBuf>,
    backend: Option<String>,
    base_url: Option<String>,
    model: Option<String>,
    script: Option<PathBuf>,
    vocab: Option<PathBuf>,
    template: Option<PathBuf>,
    seed: Option<u64>,
    mode: Option<String>,
}

/// Settings every command works from, after merging.
#[derive(Debug, Clone)]
pub struct Settings {
    pub schema_dir: Option<PathBuf>,
    pub backend: BackendKind,
    pub base_url: Option<String>,
    pub model: String,
    pub script: Option<PathBuf>,
    pub vocab: Option<PathBuf>,
    pub template: Option<PathBuf>,
    pub seed: u64,
    /// True when the seed came from an explicit `--seed` flag (CI mode
    /// requires this on randomized commands).
    pub seed_from_flag: bool,
    pub mode: ModeArg,
}

/// The global flags, as clap hands them over.
#[derive(Debug, Clone, clap::Args)]
pub struct GlobalArgs {
    /// Config file (default: ./sketch.toml when present)
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Directory of extra task-schema files overlaying the builtin catalog
    #[arg(long, global = true, value_name = "DIR")]
    pub schema_dir: Option<PathBuf>,
    /// Model backend
    #[arg(long, global = true, value_enum)]
    pub backend: Option<BackendKind>,
    /// Chat-completions endpoint base URL (http backend)
    #[arg(long, global = true, value_name = "URL")]
    pub base_url: Option<String>,
    /// Model name sent to the http backend
    #[arg(long, global = true, value_name = "NAME")]
    pub model: Option<String>,
    /// Script file for the scripted backend
    #[arg(long, global = true, value_name = "PATH")]
    pub script: Option<PathBuf>,
    /// Vocabulary file (.json or .tsv); default is the byte-level vocabulary
    #[arg(long, global = true, value_name = "PATH")]
    pub vocab: Option<PathBuf>,
    /// Custom prompt template file
    #[arg(long, global = true, value_name = "PATH")]
    pub template: Option<PathBuf>,
    /// Root random seed
    #[arg(long, global = true, value_name = "N")]
    pub seed: Option<u64>,
}

fn resolve(base: &Path, p: PathBuf) -> PathBuf {
    if p.is_absolute() {
        p
    } else {
        base.join(p)
    }
}

pub fn load_settings(args: &GlobalArgs) -> Result<Settings, CliError> {
    let default_path = PathBuf::from("sketch.toml");
    let config_path = match &args.config {
        Some(p) => Some(p.clone()),
        None if default_path.is_file() => Some(default_path),
        None => None,
    };
    let (file, file_dir) = match config_path {
        Some(path) => {
            let text = std::fs::read_to_string(&path).map_err(|e| {
                CliError::usage(format!("cannot read config {}: {e}", path.display()))
            })?;
            let parsed: FileConfig = toml::from_str(&text).map_err(|e| {
                CliError::usage(format!("bad config {}: {e}", path.display()))
            })?;
            let dir = path
                .parent()
                .filter(|p| !p.as_os_str().is_empty())
                .unwrap_or_else(|| Path::new("."))
                .to_path_buf();
            (parsed, dir)
        }
        None => (FileConfig::default(), PathBuf::from(".")),
    };

    let backend = match &args.backend {
        Some(kind) => *kind,
        None => match &file.backend {
            Some(name) => BackendKind::parse(name).ok_or_else(|| {
                CliError::usage(format!(
                    "config backend {name:?} is not one of mock_uniform, scripted, http"
                ))
            })?,
            None => BackendKind::MockUniform,
        },
    };
    let mode = match &file.mode {
        Some(name) => match name.as_str() {
            "strict" => ModeArg::Strict,
            "free" => ModeArg::Free,
            other => {
                return Err(CliError::usage(format!(
                    "config mode {other:?} is not strict or free"
                )))
            }
        },
        None => ModeArg::Strict,
    };

    let from_file = |p: Option<PathBuf>| p.map(|p| resolve(&file_dir, p));
    Ok(Settings {
        schema_dir: args.schema_dir.clone().or_else(|| from_file(file.schema_dir)),
        backend,
        base_url: args.base_url.clone().or(file.base_url),
        model: args
            .model
            .clone()
            .or(file.model)
            .unwrap_or_else(|| "default".to_string()),
        script: args.script.clone().or_else(|| from_file(file.script)),
        vocab: args.vocab.clone().or_else(|| from_file(file.vocab)),
        template: args.template.clone().or_else(|| from_file(file.template)),
        seed: args.seed.or(file.seed).unwrap_or(0),
        seed_from_flag: args.seed.is_some(),
        mode,
    })
}

/// CI guard: randomized commands must pin their seed explicitly.
pub fn require_seed_in_ci(settings: &Settings) -> Result<(), CliError> {
    let ci = std::env::var("SKETCH_CI").is_ok_and(|v| v == "1");
    if ci && !settings.seed_from_flag {
        return Err(CliError::usage(
            "SKETCH_CI=1: randomized commands need an explicit --seed",
        ));
    }
    Ok(())
}
