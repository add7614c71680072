//! `sketch dataset schemas|samples|mix`: the training-data pipeline.
//! File outputs are JSONL plus a `*.manifest.json` sidecar; the manifest
//! is echoed to stdout as one canonical line.

use crate::errors::CliError;
use crate::settings::Settings;
use sketch_core::dataset::{
    build_corpus, build_task_samples, draw_distinct_schemas, manifest_for_corpus,
    manifest_for_mix, mix, read_jsonl, write_jsonl, MixConfig, SchemaGenConfig, TrainingSample,
};
use sketch_core::json::{serialize_canonical, JsonNumber, JsonObject, JsonValue};
use sketch_core::util::derive_seed;
use std::path::Path;

fn gen_config(settings: &Settings, max_depth: u32, max_width: u32) -> SchemaGenConfig {
    SchemaGenConfig {
        max_depth,
        max_width,
        seed: settings.seed,
        ..SchemaGenConfig::default()
    }
}

fn manifest_path(out: &Path) -> std::path::PathBuf {
    out.with_extension("manifest.json")
}

fn emit_manifest(out: &Path, manifest: &JsonValue) -> Result<(), CliError> {
    std::fs::write(manifest_path(out), serialize_canonical(manifest))?;
    println!("{}", serialize_canonical(manifest));
    Ok(())
}

pub fn schemas(
    settings: &Settings,
    count: usize,
    out: Option<&Path>,
    max_depth: u32,
    max_width: u32,
) -> Result<(), CliError> {
    let config = gen_config(settings, max_depth, max_width);
    let schemas = draw_distinct_schemas(count, &config)?;
    let lines: Vec<String> = schemas
        .iter()
        .map(|s| serialize_canonical(s.source()))
        .collect();
    match out {
        Some(path) => {
            std::fs::write(path, lines.join("\n") + "\n")?;
            let int = |v: usize| JsonValue::Number(JsonNumber::from_i64(v as i64));
            let mut manifest = JsonObject::new();
            manifest.insert("kind", JsonValue::from("schema_list"));
            manifest.insert("schemas", int(schemas.len()));
            manifest.insert(
                "seed",
                JsonValue::Number(JsonNumber::from_i64(config.seed as i64)),
            );
            manifest.insert("max_depth", int(config.max_depth as usize));
            manifest.insert("max_width", int(config.max_width as usize));
            emit_manifest(path, &JsonValue::Object(manifest))?;
        }
        None => {
            for line in lines {
                println!("{line}");
            }
        }
    }
    Ok(())
}

pub fn samples(
    settings: &Settings,
    schema_count: usize,
    per_schema: usize,
    out: &Path,
    max_depth: u32,
    max_width: u32,
) -> Result<(), CliError> {
    let config = gen_config(settings, max_depth, max_width);
    let samples = build_corpus(schema_count, per_schema, &config)?;
    write_jsonl(out, &samples)?;
    let manifest = manifest_for_corpus(schema_count, per_schema, &config, samples.len());
    emit_manifest(out, &manifest)
}

#[allow(clippy::too_many_arguments)]
pub fn mix_pools(
    settings: &Settings,
    task_count: usize,
    schema_following_count: usize,
    task_pool: Option<&Path>,
    schema_following_pool: Option<&Path>,
    out: &Path,
    max_depth: u32,
    max_width: u32,
) -> Result<(), CliError> {
    let task_samples: Vec<TrainingSample> = match task_pool {
        Some(path) => read_jsonl(path)?,
        None => build_task_samples(task_count, derive_seed(settings.seed, 11)),
    };
    let sf_samples: Vec<TrainingSample> = match schema_following_pool {
        Some(path) => read_jsonl(path)?,
        None if schema_following_count == 0 => Vec::new(),
        None => {
            let config = SchemaGenConfig {
                seed: derive_seed(settings.seed, 12),
                ..gen_config(settings, max_depth, max_width)
            };
            build_corpus(schema_following_count, 1, &config)?
        }
    };
    let config = MixConfig {
        task_count,
        schema_following_count,
        seed: settings.seed,
    };
    let mixed = mix(&task_samples, &sf_samples, &config)?;
    write_jsonl(out, &mixed)?;
    let manifest = manifest_for_mix(&config, mixed.len());
    emit_manifest(out, &manifest)
}
