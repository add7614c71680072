//! Conforming-instance sampling and value mutation.
//!
//! Instances are synthesized directly from the schema rather than by a
//! model: the values are canonical-shaped (declared members in declared
//! order, integers spelled as plain digits), so their compact serialization
//! is accepted by the compiled automaton as well as the validator.

use super::genschema::random_word;
use crate::json::{JsonNumber, JsonObject, JsonValue};
use crate::schema::{SchemaDoc, SchemaKind};
use rand::Rng;
use rand_chacha::ChaCha12Rng;

/// Samples a JSON value that validates against the schema. Unbounded arrays
/// get 0..=3 items.
pub fn conforming_instance(schema: &SchemaDoc, rng: &mut ChaCha12Rng) -> JsonValue {
    match schema.kind {
        SchemaKind::Boolean => JsonValue::Bool(rng.random_bool(0.5)),
        SchemaKind::Null => JsonValue::Null,
        SchemaKind::String => JsonValue::from(random_string(rng).as_str()),
        SchemaKind::Integer => JsonValue::Number(JsonNumber::from_i64(random_int(rng))),
        SchemaKind::Number => JsonValue::Number(random_number(rng)),
        SchemaKind::EnumOnly => {
            let members = schema.enum_values.as_deref().unwrap_or_default();
            members[rng.random_range(0..members.len())].clone()
        }
        SchemaKind::Object => {
            let mut o = JsonObject::new();
            for (name, sub) in &schema.properties {
                if schema.is_required(name) || rng.random_bool(0.5) {
                    o.insert(name.as_str(), conforming_instance(sub, rng));
                }
            }
            JsonValue::Object(o)
        }
        SchemaKind::Array => {
            let Some(items) = &schema.items else {
                // no item schema: the compiler admits only the empty array
                return JsonValue::Array(Vec::new());
            };
            let lo = schema.min_items.unwrap_or(0);
            let hi = schema.max_items.unwrap_or(lo.max(3));
            let size = rng.random_range(lo..=hi);
            JsonValue::Array(
                (0..size)
                    .map(|_| conforming_instance(items, rng))
                    .collect(),
            )
        }
    }
}

fn random_int(rng: &mut ChaCha12Rng) -> i64 {
    rng.random_range(-1000..=1000)
}

fn random_number(rng: &mut ChaCha12Rng) -> JsonNumber {
    let mut literal = random_int(rng).to_string();
    if rng.random_bool(0.5) {
        literal.push('.');
        for _ in 0..rng.random_range(1..=3) {
            literal.push(char::from(b'0' + rng.random_range(0..10u8)));
        }
    }
    if rng.random_bool(0.25) {
        literal.push('e');
        if rng.random_bool(0.5) {
            literal.push('-');
        }
        literal.push(char::from(b'0' + rng.random_range(0..6u8)));
    }
    JsonNumber::from_literal(&literal).expect("constructed literal is well-formed")
}

fn random_string(rng: &mut ChaCha12Rng) -> String {
    let mut s = random_word(rng);
    // sprinkle in characters that exercise escaping and multi-byte UTF-8
    if rng.random_bool(0.15) {
        const SPICE: &[char] = &['é', 'ß', '中', '→', '"', '\\', '\n', '\t', ' '];
        s.push(SPICE[rng.random_range(0..SPICE.len())]);
        s.push_str(&random_word(rng));
    }
    s
}

/// Mutation result; `changed` is false only when the schema pins every leaf
/// to a single possible value (or the instance has no leaves to mutate).
#[derive(Debug, Clone, PartialEq)]
pub struct MutationOutcome {
    pub value: JsonValue,
    pub changed: bool,
}

/// Rewrites every mutable leaf to a different schema-conforming value while
/// keeping the structure (member sets, array lengths) intact.
pub fn mutate_values(
    instance: &JsonValue,
    schema: &SchemaDoc,
    rng: &mut ChaCha12Rng,
) -> MutationOutcome {
    let mut changed = false;
    let value = mutate_node(instance, schema, rng, &mut changed);
    MutationOutcome { value, changed }
}

fn mutate_node(
    instance: &JsonValue,
    schema: &SchemaDoc,
    rng: &mut ChaCha12Rng,
    changed: &mut bool,
) -> JsonValue {
    match (&schema.kind, instance) {
        (SchemaKind::EnumOnly, old) => {
            let members = schema.enum_values.as_deref().unwrap_or_default();
            let others: Vec<&JsonValue> = members.iter().filter(|m| *m != old).collect();
            if others.is_empty() {
                old.clone()
            } else {
                *changed = true;
                others[rng.random_range(0..others.len())].clone()
            }
        }
        (SchemaKind::Boolean, JsonValue::Bool(b)) => {
            *changed = true;
            JsonValue::Bool(!b)
        }
        (SchemaKind::String, JsonValue::String(old)) => {
            let mut fresh = random_string(rng);
            let mut tries = 0;
            while &fresh == old && tries < 8 {
                fresh = random_string(rng);
                tries += 1;
            }
            if &fresh == old {
                fresh.push('x');
            }
            *changed = true;
            JsonValue::String(fresh)
        }
        (SchemaKind::Integer, JsonValue::Number(old)) => {
            let fresh = match old.as_i64() {
                Some(v) => {
                    let mut delta = 0;
                    while delta == 0 {
                        delta = rng.random_range(-100..=100);
                    }
                    // overflow near the i64 edges: step the other way instead
                    let stepped = v.checked_add(delta).unwrap_or_else(|| v - delta);
                    JsonNumber::from_i64(stepped)
                }
                None => JsonNumber::from_i64(random_int(rng)),
            };
            if &fresh != old {
                *changed = true;
                JsonValue::Number(fresh)
            } else {
                JsonValue::Number(JsonNumber::from_i64(
                    old.as_i64().unwrap_or(0).saturating_add(1),
                ))
            }
        }
        (SchemaKind::Number, JsonValue::Number(old)) => {
            let mut fresh = random_number(rng);
            let mut tries = 0;
            while &fresh == old && tries < 8 {
                fresh = random_number(rng);
                tries += 1;
            }
            if &fresh == old {
                fresh = JsonNumber::from_i64(old.as_f64() as i64 + 1);
            }
            *changed = true;
            JsonValue::Number(fresh)
        }
        (SchemaKind::Object, JsonValue::Object(members)) => {
            let mut out = JsonObject::new();
            for (name, old) in members.iter() {
                match schema.properties.iter().find(|(n, _)| n == name) {
                    Some((_, sub)) => out.insert(name, mutate_node(old, sub, rng, changed)),
                    // member the schema does not describe: leave untouched
                    None => out.insert(name, old.clone()),
                }
            }
            JsonValue::Object(out)
        }
        (SchemaKind::Array, JsonValue::Array(items)) => match &schema.items {
            Some(sub) => JsonValue::Array(
                items
                    .iter()
                    .map(|item| mutate_node(item, sub, rng, changed))
                    .collect(),
            ),
            None => instance.clone(),
        },
        // kind mismatch (foreign instance) or null: nothing safe to do
        _ => instance.clone(),
    }
}

/// Scalar values of an instance, in serialization order. Objects and arrays
/// are descended; everything else is a leaf.
pub fn collect_leaves(instance: &JsonValue) -> Vec<JsonValue> {
    let mut leaves = Vec::new();
    walk_leaves(instance, &mut leaves);
    leaves
}

fn walk_leaves(value: &JsonValue, leaves: &mut Vec<JsonValue>) {
    match value {
        JsonValue::Object(members) => {
            for (_, v) in members.iter() {
                walk_leaves(v, leaves);
            }
        }
        JsonValue::Array(items) => {
            for v in items {
                walk_leaves(v, leaves);
            }
        }
        other => leaves.push(other.clone()),
    }
}
