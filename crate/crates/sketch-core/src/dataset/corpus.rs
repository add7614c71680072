//! Corpus assembly and mixing.
//!
//! Schemas are drawn sequentially (dedup needs global sight of the hashes);
//! sample construction then fans out across schemas with per-schema seeds
//! derived from the master seed, so the output is byte-identical whatever
//! the thread count.

use super::genschema::{random_schema, SchemaGenConfig};
use super::instance::{conforming_instance, mutate_values};
use super::select::value_selection_task;
use super::{DatasetError, SampleKind, TrainingSample};
use crate::json::{serialize_canonical, JsonNumber, JsonObject, JsonValue};
use crate::prompt::package;
use crate::tasks::fixtures;
use crate::util::derive_seed;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use std::collections::HashSet;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

/// Builds `schema_count` structurally distinct schemas with
/// `samples_per_schema` value-selection samples each. Sample 0 of a schema
/// uses a freshly drawn instance; later samples mutate that instance's
/// values, mirroring the generate-then-modify pipeline.
pub fn build_corpus(
    schema_count: usize,
    samples_per_schema: usize,
    config: &SchemaGenConfig,
) -> Result<Vec<TrainingSample>, DatasetError> {
    if schema_count == 0 || samples_per_schema == 0 {
        return Err(DatasetError::BadConfig(
            "schema and per-schema counts must be positive".into(),
        ));
    }
    config.check()?;
    let schemas = draw_distinct_schemas(schema_count, config)?;
    let per_schema: Vec<Vec<TrainingSample>> = schemas
        .par_iter()
        .enumerate()
        .map(|(i, schema)| {
            let mut rng = ChaCha12Rng::seed_from_u64(derive_seed(config.seed, 1 + i as u64));
            let base = conforming_instance(schema, &mut rng);
            (0..samples_per_schema)
                .map(|j| {
                    let instance = if j == 0 {
                        base.clone()
                    } else {
                        mutate_values(&base, schema, &mut rng).value
                    };
                    value_selection_task(schema, &instance, &mut rng)
                })
                .collect()
        })
        .collect();
    Ok(per_schema.into_iter().flatten().collect())
}

/// Draws random schemas until `count` distinct structural hashes are seen,
/// re-drawing on collision.
pub fn draw_distinct_schemas(
    count: usize,
    config: &SchemaGenConfig,
) -> Result<Vec<crate::schema::SchemaDoc>, DatasetError> {
    config.check()?;
    let mut rng = ChaCha12Rng::seed_from_u64(derive_seed(config.seed, 0));
    let mut seen = HashSet::with_capacity(count);
    let mut schemas = Vec::with_capacity(count);
    let budget = count.saturating_mul(100) + 10_000;
    for _ in 0..budget {
        if schemas.len() == count {
            break;
        }
        let schema = random_schema(config, &mut rng);
        if seen.insert(schema.hash_hex()) {
            schemas.push(schema);
        }
    }
    if schemas.len() < count {
        return Err(DatasetError::SchemaSpaceExhausted {
            distinct: schemas.len(),
            want: count,
        });
    }
    Ok(schemas)
}

/// Task-kind samples: packaged prompts for the bundled task instances over
/// synthetic inputs, answered with conforming outputs.
pub fn build_task_samples(count: usize, seed: u64) -> Vec<TrainingSample> {
    let instances = [
        fixtures::listing_ner(),
        fixtures::example_ner(),
        fixtures::example_topic(),
        fixtures::example_translation(),
    ];
    (0..count)
        .into_par_iter()
        .map(|i| {
            let instance = &instances[i % instances.len()];
            let mut rng = ChaCha12Rng::seed_from_u64(derive_seed(seed, i as u64));
            let mut words = Vec::new();
            for _ in 0..6 {
                words.push(super::genschema::random_word(&mut rng));
            }
            let input = format!("sample {} — {}", i + 1, words.join(" "));
            let prompt = package(instance, &input)
                .expect("synthetic input is never empty")
                .text;
            let response =
                serialize_canonical(&conforming_instance(instance.output_format(), &mut rng));
            TrainingSample {
                prompt,
                response,
                kind: SampleKind::Task,
                schema_hash: instance.output_format().hash_hex(),
            }
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct MixConfig {
    pub task_count: usize,
    pub schema_following_count: usize,
    pub seed: u64,
}

impl MixConfig {
    /// Ratio in lowest terms, e.g. 17500:2500 → "7:1".
    pub fn ratio(&self) -> String {
        let d = gcd(self.task_count, self.schema_following_count);
        if d == 0 {
            return "0:0".to_string();
        }
        format!("{}:{}", self.task_count / d, self.schema_following_count / d)
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Draws the configured counts from each pool without replacement and
/// shuffles the union, all seed-deterministically.
pub fn mix(
    task_pool: &[TrainingSample],
    schema_following_pool: &[TrainingSample],
    config: &MixConfig,
) -> Result<Vec<TrainingSample>, DatasetError> {
    if task_pool.len() < config.task_count {
        return Err(DatasetError::PoolTooSmall {
            pool: "task",
            have: task_pool.len(),
            want: config.task_count,
        });
    }
    if schema_following_pool.len() < config.schema_following_count {
        return Err(DatasetError::PoolTooSmall {
            pool: "schema-following",
            have: schema_following_pool.len(),
            want: config.schema_following_count,
        });
    }
    let mut rng = ChaCha12Rng::seed_from_u64(config.seed);
    let mut out = Vec::with_capacity(config.task_count + config.schema_following_count);
    for index in rand::seq::index::sample(&mut rng, task_pool.len(), config.task_count) {
        out.push(task_pool[index].clone());
    }
    for index in rand::seq::index::sample(
        &mut rng,
        schema_following_pool.len(),
        config.schema_following_count,
    ) {
        out.push(schema_following_pool[index].clone());
    }
    out.shuffle(&mut rng);
    Ok(out)
}

/// One canonical JSON object per line.
pub fn write_jsonl(path: &Path, samples: &[TrainingSample]) -> Result<(), DatasetError> {
    let mut file = BufWriter::new(std::fs::File::create(path)?);
    for sample in samples {
        file.write_all(serialize_canonical(&sample.to_json()).as_bytes())?;
        file.write_all(b"\n")?;
    }
    file.flush()?;
    Ok(())
}

pub fn read_jsonl(path: &Path) -> Result<Vec<TrainingSample>, DatasetError> {
    let file = BufReader::new(std::fs::File::open(path)?);
    let mut samples = Vec::new();
    for (i, line) in file.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        samples.push(
            TrainingSample::parse_line(&line).map_err(|reason| DatasetError::BadLine {
                line: i + 1,
                reason,
            })?,
        );
    }
    Ok(samples)
}

/// Sidecar manifest for a built corpus. No timestamps: manifests are part
/// of the byte-identical-rebuild contract.
pub fn manifest_for_corpus(
    schema_count: usize,
    samples_per_schema: usize,
    config: &SchemaGenConfig,
    sample_count: usize,
) -> JsonValue {
    let int = |v: usize| JsonValue::Number(JsonNumber::from_i64(v as i64));
    let mut o = JsonObject::new();
    o.insert("kind", JsonValue::from("schema_following_corpus"));
    o.insert("schemas", int(schema_count));
    o.insert("samples_per_schema", int(samples_per_schema));
    o.insert("samples", int(sample_count));
    o.insert("seed", JsonValue::Number(JsonNumber::from_i64(config.seed as i64)));
    o.insert("max_depth", int(config.max_depth as usize));
    o.insert("max_width", int(config.max_width as usize));
    JsonValue::Object(o)
}

pub fn manifest_for_mix(config: &MixConfig, sample_count: usize) -> JsonValue {
    let int = |v: usize| JsonValue::Number(JsonNumber::from_i64(v as i64));
    let mut o = JsonObject::new();
    o.insert("kind", JsonValue::from("mixed_corpus"));
    o.insert("task", int(config.task_count));
    o.insert("schema_following", int(config.schema_following_count));
    o.insert("ratio", JsonValue::from(config.ratio().as_str()));
    o.insert("samples", int(sample_count));
    o.insert("seed", JsonValue::Number(JsonNumber::from_i64(config.seed as i64)));
    JsonValue::Object(o)
}
