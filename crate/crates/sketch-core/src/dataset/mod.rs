//! Schema-following dataset pipeline: random schemas, conforming instances,
//! value-selection training samples, value mutation, corpus assembly, and
//! task/schema-following mixing.
//!
//! Everything here is a pure function of (config, seed): corpora rebuild
//! byte-identically, in parallel or not, because per-schema seeds are
//! derived from the master seed and output order is fixed by index.

mod corpus;
mod genschema;
mod instance;
mod select;

pub use corpus::{
    build_corpus, build_task_samples, draw_distinct_schemas, manifest_for_corpus,
    manifest_for_mix, mix, read_jsonl, write_jsonl, MixConfig,
};
pub use genschema::{random_schema, schema_depth, KindWeights, SchemaGenConfig};
pub use instance::{collect_leaves, conforming_instance, mutate_values, MutationOutcome};
pub use select::value_selection_task;

use crate::json::{parse_json, JsonObject, JsonValue};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("bad dataset configuration: {0}")]
    BadConfig(String),
    #[error("{pool} pool has {have} samples, {want} requested")]
    PoolTooSmall {
        pool: &'static str,
        have: usize,
        want: usize,
    },
    #[error("could not draw {want} structurally distinct schemas (got {distinct})")]
    SchemaSpaceExhausted { distinct: usize, want: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("line {line}: not a training sample: {reason}")]
    BadLine { line: usize, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleKind {
    Task,
    SchemaFollowing,
}

impl SampleKind {
    pub fn name(self) -> &'static str {
        match self {
            SampleKind::Task => "task",
            SampleKind::SchemaFollowing => "schema_following",
        }
    }

    pub fn parse(name: &str) -> Option<SampleKind> {
        match name {
            "task" => Some(SampleKind::Task),
            "schema_following" => Some(SampleKind::SchemaFollowing),
            _ => None,
        }
    }
}

/// One fine-tuning sample: prompt in, canonical-JSON response out.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingSample {
    pub prompt: String,
    pub response: String,
    pub kind: SampleKind,
    /// Hash of the schema the response conforms to.
    pub schema_hash: String,
}

impl TrainingSample {
    pub fn to_json(&self) -> JsonValue {
        let mut o = JsonObject::new();
        o.insert("prompt", JsonValue::from(self.prompt.as_str()));
        o.insert("response", JsonValue::from(self.response.as_str()));
        o.insert("kind", JsonValue::from(self.kind.name()));
        o.insert("schema_hash", JsonValue::from(self.schema_hash.as_str()));
        JsonValue::Object(o)
    }

    pub fn from_json(value: &JsonValue) -> Result<TrainingSample, String> {
        let member = |name: &str| {
            value
                .get(name)
                .and_then(JsonValue::as_str)
                .ok_or_else(|| format!("missing string member {name:?}"))
        };
        Ok(TrainingSample {
            prompt: member("prompt")?.to_string(),
            response: member("response")?.to_string(),
            kind: SampleKind::parse(member("kind")?)
                .ok_or_else(|| "unknown kind".to_string())?,
            schema_hash: member("schema_hash")?.to_string(),
        })
    }

    pub fn parse_line(line: &str) -> Result<TrainingSample, String> {
        let value = parse_json(line).map_err(|e| e.to_string())?;
        TrainingSample::from_json(&value)
    }
}
