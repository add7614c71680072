use super::{SchemaDoc, SchemaError, SchemaKind};
use crate::json::JsonValue;

/// Builds a [`SchemaDoc`] from a schema document. Structural invariants are
/// errors; keywords outside the modeled subset (or applied to the wrong
/// kind) are recorded in `unsupported_keywords` and surface later, when
/// strict validation or compilation is attempted.
pub fn parse_schema(value: &JsonValue) -> Result<SchemaDoc, SchemaError> {
    let obj = match value {
        JsonValue::Object(obj) => obj,
        other => return Err(SchemaError::NotAnObject(other.type_name())),
    };

    let kind = match obj.get("type") {
        Some(JsonValue::String(name)) => match name.as_str() {
            "object" => SchemaKind::Object,
            "array" => SchemaKind::Array,
            "string" => SchemaKind::String,
            "number" => SchemaKind::Number,
            "integer" => SchemaKind::Integer,
            "boolean" => SchemaKind::Boolean,
            "null" => SchemaKind::Null,
            other => return Err(SchemaError::UnknownType(other.to_string())),
        },
        Some(_) => return Err(SchemaError::BadTypeKeyword),
        None if obj.contains("enum") => SchemaKind::EnumOnly,
        None => return Err(SchemaError::MissingType),
    };

    let mut doc = SchemaDoc {
        kind,
        properties: Vec::new(),
        required: Vec::new(),
        items: None,
        enum_values: None,
        description: None,
        min_items: None,
        max_items: None,
        unsupported_keywords: Vec::new(),
        source: value.clone(),
    };

    for (keyword, kw_value) in obj.iter() {
        match keyword {
            "type" => {}
            "description" => {
                doc.description = Some(
                    kw_value
                        .as_str()
                        .ok_or_else(|| bad(keyword, "must be a string"))?
                        .to_string(),
                );
            }
            "enum" => {
                let members = kw_value
                    .as_array()
                    .ok_or_else(|| bad(keyword, "must be an array"))?;
                if members.is_empty() {
                    return Err(SchemaError::EmptyEnum);
                }
                for (i, m) in members.iter().enumerate() {
                    if members[..i].contains(m) {
                        return Err(SchemaError::DuplicateEnumMember);
                    }
                }
                doc.enum_values = Some(members.to_vec());
            }
            "properties" if kind == SchemaKind::Object => {
                let props = kw_value
                    .as_object()
                    .ok_or_else(|| bad(keyword, "must be an object"))?;
                for (name, sub) in props.iter() {
                    doc.properties.push((name.to_string(), parse_schema(sub)?));
                }
            }
            "required" if kind == SchemaKind::Object => {
                let names = kw_value
                    .as_array()
                    .ok_or_else(|| bad(keyword, "must be an array"))?;
                for name in names {
                    let name = name
                        .as_str()
                        .ok_or_else(|| bad(keyword, "members must be strings"))?;
                    if !doc.required.iter().any(|r| r == name) {
                        doc.required.push(name.to_string());
                    }
                }
            }
            "items" if kind == SchemaKind::Array => {
                doc.items = Some(Box::new(parse_schema(kw_value)?));
            }
            "minItems" if kind == SchemaKind::Array => {
                doc.min_items = Some(non_negative(keyword, kw_value)?);
            }
            "maxItems" if kind == SchemaKind::Array => {
                doc.max_items = Some(non_negative(keyword, kw_value)?);
            }
            _ => doc.unsupported_keywords.push(keyword.to_string()),
        }
    }

    for name in &doc.required {
        if !doc.properties.iter().any(|(p, _)| p == name) {
            return Err(SchemaError::RequiredNotInProperties(name.clone()));
        }
    }
    if let (Some(min), Some(max)) = (doc.min_items, doc.max_items) {
        if min > max {
            return Err(SchemaError::MinAboveMax { min, max });
        }
    }

    Ok(doc)
}

fn bad(keyword: &str, reason: &str) -> SchemaError {
    SchemaError::BadKeyword {
        keyword: keyword.to_string(),
        reason: reason.to_string(),
    }
}

fn non_negative(keyword: &str, value: &JsonValue) -> Result<usize, SchemaError> {
    value
        .as_number()
        .filter(|n| n.is_integer_valued())
        .and_then(|n| n.as_i64())
        .filter(|&n| n >= 0)
        .map(|n| n as usize)
        .ok_or_else(|| bad(keyword, "must be a non-negative integer"))
}
