//! Random schema generation bounded in depth and width.
//!
//! Depth counts nesting levels with the root at 1; width is the property
//! count per object and the ceiling for array bounds. Both default to 5.
//! Only keywords the validator and compiler support are ever emitted, so
//! every generated schema is compilable.

use super::DatasetError;
use crate::json::{JsonNumber, JsonObject, JsonValue};
use crate::schema::{parse_schema, SchemaDoc};
use rand::Rng;
use rand_chacha::ChaCha12Rng;

#[derive(Debug, Clone)]
pub struct KindWeights {
    pub object: f64,
    pub array: f64,
    pub string: f64,
    pub integer: f64,
    pub number: f64,
    pub boolean: f64,
    pub enumeration: f64,
}

impl Default for KindWeights {
    fn default() -> KindWeights {
        KindWeights {
            object: 0.3,
            array: 0.2,
            string: 0.15,
            integer: 0.1,
            number: 0.1,
            boolean: 0.05,
            enumeration: 0.1,
        }
    }
}

impl KindWeights {
    fn entries(&self) -> [(Kind, f64); 7] {
        [
            (Kind::Object, self.object),
            (Kind::Array, self.array),
            (Kind::String, self.string),
            (Kind::Integer, self.integer),
            (Kind::Number, self.number),
            (Kind::Boolean, self.boolean),
            (Kind::Enumeration, self.enumeration),
        ]
    }

    fn check(&self) -> Result<(), DatasetError> {
        let entries = self.entries();
        if entries.iter().any(|(_, w)| *w < 0.0 || !w.is_finite()) {
            return Err(DatasetError::BadConfig(
                "kind weights must be non-negative finite numbers".into(),
            ));
        }
        if entries.iter().map(|(_, w)| w).sum::<f64>() <= 0.0 {
            return Err(DatasetError::BadConfig(
                "kind weights must not all be zero".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Object,
    Array,
    String,
    Integer,
    Number,
    Boolean,
    Enumeration,
}

#[derive(Debug, Clone)]
pub struct SchemaGenConfig {
    /// Nesting bound; the root counts as depth 1.
    pub max_depth: u32,
    /// Properties per object; also bounds generated array sizes.
    pub max_width: u32,
    pub seed: u64,
    pub kind_weights: KindWeights,
    /// Upper bound on generated enum member counts.
    pub enum_pool_size: usize,
}

impl Default for SchemaGenConfig {
    fn default() -> SchemaGenConfig {
        SchemaGenConfig {
            max_depth: 5,
            max_width: 5,
            seed: 0,
            kind_weights: KindWeights::default(),
            enum_pool_size: 6,
        }
    }
}

impl SchemaGenConfig {
    pub fn check(&self) -> Result<(), DatasetError> {
        if self.max_depth < 1 {
            return Err(DatasetError::BadConfig("maxDepth must be at least 1".into()));
        }
        if self.max_width < 1 {
            return Err(DatasetError::BadConfig("maxWidth must be at least 1".into()));
        }
        if self.enum_pool_size < 1 {
            return Err(DatasetError::BadConfig(
                "enumPoolSize must be at least 1".into(),
            ));
        }
        self.kind_weights.check()
    }
}

/// Draws one random schema within the configured bounds. Deterministic in
/// the rng state; callers wanting seed determinism seed the rng themselves.
pub fn random_schema(config: &SchemaGenConfig, rng: &mut ChaCha12Rng) -> SchemaDoc {
    let source = gen_node(config, rng, 1);
    parse_schema(&source).expect("generator emits only supported schemas")
}

fn gen_node(config: &SchemaGenConfig, rng: &mut ChaCha12Rng, depth: u32) -> JsonValue {
    let kind = pick_kind(config, rng, depth < config.max_depth);
    match kind {
        Kind::String => leaf("string"),
        Kind::Integer => leaf("integer"),
        Kind::Number => leaf("number"),
        Kind::Boolean => leaf("boolean"),
        Kind::Enumeration => gen_enum(config, rng),
        Kind::Object => gen_object(config, rng, depth),
        Kind::Array => gen_array(config, rng, depth),
    }
}

fn leaf(type_name: &str) -> JsonValue {
    let mut o = JsonObject::new();
    o.insert("type", JsonValue::from(type_name));
    JsonValue::Object(o)
}

fn pick_kind(config: &SchemaGenConfig, rng: &mut ChaCha12Rng, containers_allowed: bool) -> Kind {
    let mut entries = config.kind_weights.entries();
    if !containers_allowed {
        for (kind, weight) in entries.iter_mut() {
            if matches!(kind, Kind::Object | Kind::Array) {
                *weight = 0.0;
            }
        }
    }
    let total: f64 = entries.iter().map(|(_, w)| w).sum();
    if total <= 0.0 {
        // all weight sat on containers and the depth bound removed them
        return Kind::String;
    }
    let mut draw = rng.random::<f64>() * total;
    for (kind, weight) in entries {
        draw -= weight;
        if draw <= 0.0 {
            return kind;
        }
    }
    Kind::String
}

fn gen_enum(config: &SchemaGenConfig, rng: &mut ChaCha12Rng) -> JsonValue {
    let want = rng.random_range(2..=config.enum_pool_size.max(2));
    let mut members: Vec<JsonValue> = Vec::new();
    let mut attempts = 0;
    while members.len() < want && attempts < want * 20 {
        attempts += 1;
        let candidate = if rng.random_bool(0.8) {
            JsonValue::from(random_word(rng).as_str())
        } else {
            JsonValue::Number(JsonNumber::from_i64(rng.random_range(0..100)))
        };
        if !members.contains(&candidate) {
            members.push(candidate);
        }
    }
    let mut o = JsonObject::new();
    o.insert("enum", JsonValue::Array(members));
    JsonValue::Object(o)
}

fn gen_object(config: &SchemaGenConfig, rng: &mut ChaCha12Rng, depth: u32) -> JsonValue {
    let width = rng.random_range(1..=config.max_width) as usize;
    let mut names: Vec<String> = Vec::new();
    while names.len() < width {
        let mut name = random_word(rng);
        if names.contains(&name) {
            name.push_str(&rng.random_range(0..100u32).to_string());
        }
        if !names.contains(&name) {
            names.push(name);
        }
    }
    let mut properties = JsonObject::new();
    let mut required: Vec<JsonValue> = Vec::new();
    for name in &names {
        let mut sub = gen_node(config, rng, depth + 1);
        if rng.random_bool(0.2) {
            if let JsonValue::Object(o) = &mut sub {
                o.insert(
                    "description",
                    JsonValue::from(format!("the {name} member").as_str()),
                );
            }
        }
        properties.insert(name.as_str(), sub);
        if rng.random_bool(0.6) {
            required.push(JsonValue::from(name.as_str()));
        }
    }
    let mut o = JsonObject::new();
    o.insert("type", JsonValue::from("object"));
    o.insert("properties", JsonValue::Object(properties));
    if !required.is_empty() {
        o.insert("required", JsonValue::Array(required));
    }
    JsonValue::Object(o)
}

fn gen_array(config: &SchemaGenConfig, rng: &mut ChaCha12Rng, depth: u32) -> JsonValue {
    let mut o = JsonObject::new();
    o.insert("type", JsonValue::from("array"));
    o.insert("items", gen_node(config, rng, depth + 1));
    if rng.random_bool(0.5) {
        let min = rng.random_range(0..=2u32.min(config.max_width));
        let max = rng.random_range(min..=config.max_width.max(min));
        o.insert("minItems", JsonValue::Number(JsonNumber::from_i64(min as i64)));
        o.insert("maxItems", JsonValue::Number(JsonNumber::from_i64(max as i64)));
    }
    JsonValue::Object(o)
}

const SYLLABLES: &[&str] = &[
    "ba", "co", "di", "fu", "ga", "hi", "jo", "ka", "lu", "me", "no", "pa", "qui", "ra", "so",
    "ta", "vu", "wi", "xa", "ze",
];

/// Short pronounceable word for names, enum members, and string values.
pub(crate) fn random_word(rng: &mut ChaCha12Rng) -> String {
    let syllables = rng.random_range(2..=4);
    let mut word = String::new();
    for _ in 0..syllables {
        word.push_str(SYLLABLES[rng.random_range(0..SYLLABLES.len())]);
    }
    word
}

/// Nesting depth of a schema source document, root = 1.
pub fn schema_depth(source: &JsonValue) -> u32 {
    let mut deepest = 0;
    if let Some(JsonValue::Object(properties)) = source.get("properties") {
        for (_, sub) in properties.iter() {
            deepest = deepest.max(schema_depth(sub));
        }
    }
    if let Some(items) = source.get("items") {
        deepest = deepest.max(schema_depth(items));
    }
    1 + deepest
}
