//! The value-selection training task: given a schema and a shuffled list of
//! candidate values, assemble the conforming instance. The response is the
//! instance's canonical serialization; the candidates are its leaves plus
//! type-plausible distractors.

use super::instance::collect_leaves;
use super::{SampleKind, TrainingSample};
use crate::json::{serialize_canonical, JsonNumber, JsonValue};
use crate::schema::SchemaDoc;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha12Rng;

/// Distractor count is the leaf count capped here.
pub const MAX_DISTRACTORS: usize = 20;

pub const SELECTION_INSTRUCTION: &str =
    "Construct one JSON value that conforms to the JSON Schema below, using the candidate values provided.";
pub const SELECTION_SCHEMA_HEAD: &str = "Schema:";
pub const SELECTION_CANDIDATES_HEAD: &str = "Candidates:";

/// Builds one schema-following sample from a schema and a conforming
/// instance. Candidate order is a seed-deterministic shuffle.
pub fn value_selection_task(
    schema: &SchemaDoc,
    instance: &JsonValue,
    rng: &mut ChaCha12Rng,
) -> TrainingSample {
    let leaves = collect_leaves(instance);
    let mut candidates = leaves.clone();
    candidates.extend(distractors(&leaves, rng));
    candidates.shuffle(rng);

    let mut prompt = String::new();
    prompt.push_str(SELECTION_INSTRUCTION);
    prompt.push('\n');
    prompt.push_str(SELECTION_SCHEMA_HEAD);
    prompt.push('\n');
    prompt.push_str(&serialize_canonical(schema.source()));
    prompt.push('\n');
    prompt.push_str(SELECTION_CANDIDATES_HEAD);
    prompt.push('\n');
    for candidate in &candidates {
        prompt.push_str("- ");
        prompt.push_str(&serialize_canonical(candidate));
        prompt.push('\n');
    }
    prompt.push_str(crate::prompt::template::FINAL_INSTRUCTION);

    TrainingSample {
        prompt,
        response: serialize_canonical(instance),
        kind: SampleKind::SchemaFollowing,
        schema_hash: schema.hash_hex(),
    }
}

/// Same-kind decoys, one per leaf up to the cap, each distinct from every
/// real leaf so the task has a unique intended reading.
fn distractors(leaves: &[JsonValue], rng: &mut ChaCha12Rng) -> Vec<JsonValue> {
    let want = leaves.len().min(MAX_DISTRACTORS);
    let mut out = Vec::new();
    for _ in 0..want {
        let base = &leaves[rng.random_range(0..leaves.len())];
        for _ in 0..8 {
            let candidate = same_kind_value(base, rng);
            if !leaves.contains(&candidate) && !out.contains(&candidate) {
                out.push(candidate);
                break;
            }
        }
    }
    out
}

fn same_kind_value(base: &JsonValue, rng: &mut ChaCha12Rng) -> JsonValue {
    match base {
        JsonValue::Bool(b) => JsonValue::Bool(!b),
        JsonValue::Number(n) if n.is_integer_valued() => {
            JsonValue::Number(JsonNumber::from_i64(rng.random_range(-1000..=1000)))
        }
        JsonValue::Number(_) => {
            let literal = format!(
                "{}.{}",
                rng.random_range(-1000..=1000i64),
                rng.random_range(0..100u32)
            );
            JsonValue::Number(JsonNumber::from_literal(&literal).expect("well-formed"))
        }
        _ => JsonValue::from(super::genschema::random_word(rng).as_str()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{conforming_instance, random_schema, SchemaGenConfig};
    use crate::json::parse_json;
    use crate::schema::{parse_schema, validate};
    use rand::SeedableRng;

    #[test]
    fn hand_example_candidates_contain_the_leaf() {
        let schema = parse_schema(
            &parse_json(r#"{"type":"object","properties":{"a":{"type":"integer"}},"required":["a"]}"#)
                .unwrap(),
        )
        .unwrap();
        let instance = parse_json(r#"{"a":7}"#).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(1);
        let sample = value_selection_task(&schema, &instance, &mut rng);
        assert!(sample.prompt.contains("- 7"));
        assert!(sample.prompt.contains(&serialize_canonical(schema.source())));
        assert_eq!(sample.response, r#"{"a":7}"#);
        assert_eq!(sample.kind, SampleKind::SchemaFollowing);
        assert_eq!(sample.schema_hash, schema.hash_hex());
    }

    #[test]
    fn response_always_validates_against_embedded_schema() {
        let config = SchemaGenConfig::default();
        let mut rng = ChaCha12Rng::seed_from_u64(2);
        for _ in 0..500 {
            let schema = random_schema(&config, &mut rng);
            let instance = conforming_instance(&schema, &mut rng);
            let sample = value_selection_task(&schema, &instance, &mut rng);
            let value = parse_json(&sample.response).unwrap();
            assert!(validate(&value, &schema).unwrap().valid());
        }
    }

    #[test]
    fn shuffle_and_distractors_are_seed_deterministic() {
        let config = SchemaGenConfig::default();
        let mut gen_rng = ChaCha12Rng::seed_from_u64(3);
        let schema = random_schema(&config, &mut gen_rng);
        let instance = conforming_instance(&schema, &mut gen_rng);
        let a = value_selection_task(&schema, &instance, &mut ChaCha12Rng::seed_from_u64(9));
        let b = value_selection_task(&schema, &instance, &mut ChaCha12Rng::seed_from_u64(9));
        assert_eq!(a, b);
    }

    #[test]
    fn distractor_count_tracks_leaves_with_cap() {
        let mut rng = ChaCha12Rng::seed_from_u64(4);
        let few = vec![JsonValue::from("x"), JsonValue::Bool(true)];
        assert!(distractors(&few, &mut rng).len() <= 2);
        let many: Vec<JsonValue> = (0..50)
            .map(|i| JsonValue::Number(JsonNumber::from_i64(i)))
            .collect();
        assert!(distractors(&many, &mut rng).len() <= MAX_DISTRACTORS);
        assert!(distractors(&[], &mut rng).is_empty());
    }

    #[test]
    fn distractors_never_duplicate_real_leaves() {
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        let leaves: Vec<JsonValue> = (0..10)
            .map(|i| JsonValue::Number(JsonNumber::from_i64(i)))
            .collect();
        for _ in 0..100 {
            for d in distractors(&leaves, &mut rng) {
                assert!(!leaves.contains(&d));
            }
        }
    }
}
