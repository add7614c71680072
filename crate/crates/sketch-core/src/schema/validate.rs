use super::{SchemaDoc, SchemaError, SchemaKind, ValidationReport, Violation};
use crate::json::{serialize_canonical, JsonValue};

/// Checks `value` against `schema`. Refuses to answer if the schema (or any
/// descendant) carries keywords this validator does not model — a pass must
/// mean the whole schema was enforced, not just the understood parts.
pub fn validate(value: &JsonValue, schema: &SchemaDoc) -> Result<ValidationReport, SchemaError> {
    if schema.has_unsupported() {
        return Err(SchemaError::Unsupported(schema.collect_unsupported()));
    }
    Ok(validate_lenient(value, schema))
}

/// Checks `value` against the modeled keywords only, ignoring any
/// unsupported ones.
pub fn validate_lenient(value: &JsonValue, schema: &SchemaDoc) -> ValidationReport {
    let mut violations = Vec::new();
    walk(value, schema, "$", &mut violations);
    ValidationReport::new(violations)
}

fn walk(value: &JsonValue, schema: &SchemaDoc, path: &str, out: &mut Vec<Violation>) {
    let type_ok = match schema.kind {
        SchemaKind::Object => value.as_object().is_some(),
        SchemaKind::Array => value.as_array().is_some(),
        SchemaKind::String => value.as_str().is_some(),
        SchemaKind::Boolean => value.as_bool().is_some(),
        SchemaKind::Null => matches!(value, JsonValue::Null),
        SchemaKind::Number => value.as_number().is_some(),
        SchemaKind::Integer => value.as_number().is_some_and(|n| n.is_integer_valued()),
        SchemaKind::EnumOnly => true,
    };
    if !type_ok {
        out.push(Violation {
            path: path.to_string(),
            keyword: "type".to_string(),
            message: format!("expected {}, got {}", schema.kind.name(), value.type_name()),
        });
        // other keywords presuppose the right shape; report one cause
        return;
    }

    if let Some(members) = &schema.enum_values {
        if !members.contains(value) {
            out.push(Violation {
                path: path.to_string(),
                keyword: "enum".to_string(),
                message: format!(
                    "{} is not one of the permitted values",
                    serialize_canonical(value)
                ),
            });
            return;
        }
    }

    match schema.kind {
        SchemaKind::Object => {
            let obj = value.as_object().unwrap();
            for name in &schema.required {
                if !obj.contains(name) {
                    out.push(Violation {
                        path: path.to_string(),
                        keyword: "required".to_string(),
                        message: format!("missing required member {name:?}"),
                    });
                }
            }
            // members without a declared subschema are allowed as-is
            for (name, sub) in &schema.properties {
                if let Some(member) = obj.get(name) {
                    walk(member, sub, &format!("{path}.{name}"), out);
                }
            }
        }
        SchemaKind::Array => {
            let items = value.as_array().unwrap();
            if let Some(min) = schema.min_items {
                if items.len() < min {
                    out.push(Violation {
                        path: path.to_string(),
                        keyword: "minItems".to_string(),
                        message: format!("expected at least {min} items, got {}", items.len()),
                    });
                }
            }
            if let Some(max) = schema.max_items {
                if items.len() > max {
                    out.push(Violation {
                        path: path.to_string(),
                        keyword: "maxItems".to_string(),
                        message: format!("expected at most {max} items, got {}", items.len()),
                    });
                }
            }
            if let Some(item_schema) = &schema.items {
                for (i, item) in items.iter().enumerate() {
                    walk(item, item_schema, &format!("{path}[{i}]"), out);
                }
            }
        }
        _ => {}
    }
}
