//! Schema AST and validation for the JSON Schema subset the engine models:
//! `type`, `properties`/`required`, `items`, `enum`, `minItems`/`maxItems`,
//! `description`. Anything else a schema mentions is carried along in
//! `unsupported_keywords` and blocks strict validation instead of being
//! silently ignored.

mod parse;
mod validate;

use crate::json::{serialize_canonical, JsonValue};
use crate::util::sha256_hex;
use thiserror::Error;

pub use parse::parse_schema;
pub use validate::{validate, validate_lenient};

/// What a schema node constrains its value to be.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemaKind {
    Object,
    Array,
    String,
    Number,
    Integer,
    Boolean,
    Null,
    /// No `type` keyword, only `enum`: the value must equal one member.
    EnumOnly,
}

impl SchemaKind {
    pub fn name(&self) -> &'static str {
        match self {
            SchemaKind::Object => "object",
            SchemaKind::Array => "array",
            SchemaKind::String => "string",
            SchemaKind::Number => "number",
            SchemaKind::Integer => "integer",
            SchemaKind::Boolean => "boolean",
            SchemaKind::Null => "null",
            SchemaKind::EnumOnly => "enum",
        }
    }
}

/// Parsed schema node. Construction goes through [`parse_schema`], which
/// enforces the structural invariants (required ⊆ properties, enums non-empty
/// and distinct, minItems ≤ maxItems).
#[derive(Debug, Clone, PartialEq)]
pub struct SchemaDoc {
    pub kind: SchemaKind,
    /// Object members, in declaration order (order drives prompt rendering
    /// and the canonical member order the decoder enforces).
    pub properties: Vec<(String, SchemaDoc)>,
    pub required: Vec<String>,
    pub items: Option<Box<SchemaDoc>>,
    pub enum_values: Option<Vec<JsonValue>>,
    pub description: Option<String>,
    pub min_items: Option<usize>,
    pub max_items: Option<usize>,
    /// Keywords seen on this node but not modeled (including keywords that
    /// only apply to a different kind, e.g. `items` on an object schema).
    pub unsupported_keywords: Vec<String>,
    source: JsonValue,
}

impl SchemaDoc {
    /// The JSON document this node was parsed from.
    pub fn source(&self) -> &JsonValue {
        &self.source
    }

    /// Hash of the canonical serialization of the source document.
    /// Stable across runs; used to key mask caches and dataset records.
    pub fn hash_hex(&self) -> String {
        sha256_hex(serialize_canonical(&self.source).as_bytes())
    }

    pub fn is_required(&self, name: &str) -> bool {
        self.required.iter().any(|r| r == name)
    }

    /// All unsupported keywords in this node and its descendants, each
    /// prefixed with the path where it appeared.
    pub fn collect_unsupported(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.walk_unsupported("$", &mut out);
        out
    }

    pub fn has_unsupported(&self) -> bool {
        !self.unsupported_keywords.is_empty()
            || self.properties.iter().any(|(_, s)| s.has_unsupported())
            || self.items.as_ref().is_some_and(|s| s.has_unsupported())
    }

    fn walk_unsupported(&self, path: &str, out: &mut Vec<String>) {
        for kw in &self.unsupported_keywords {
            out.push(format!("{path}: {kw}"));
        }
        for (name, sub) in &self.properties {
            sub.walk_unsupported(&format!("{path}.{name}"), out);
        }
        if let Some(items) = &self.items {
            items.walk_unsupported(&format!("{path}[]"), out);
        }
    }
}

/// One failed check: where, which keyword, and a human-readable message.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    /// JSONPath-style location, e.g. `$.items[2].name`.
    pub path: String,
    pub keyword: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    violations: Vec<Violation>,
}

impl ValidationReport {
    pub(crate) fn new(violations: Vec<Violation>) -> ValidationReport {
        ValidationReport { violations }
    }

    pub fn valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn violations(&self) -> &[Violation] {
        &self.violations
    }
}

impl std::fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.valid() {
            write!(f, "valid")
        } else {
            for (i, v) in self.violations.iter().enumerate() {
                if i > 0 {
                    writeln!(f)?;
                }
                write!(f, "{} ({}): {}", v.path, v.keyword, v.message)?;
            }
            Ok(())
        }
    }
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum SchemaError {
    #[error("schema must be a JSON object, got {0}")]
    NotAnObject(&'static str),
    #[error("schema has neither \"type\" nor \"enum\"")]
    MissingType,
    #[error("\"type\" must be a string")]
    BadTypeKeyword,
    #[error("unknown type {0:?}")]
    UnknownType(String),
    #[error("keyword {keyword:?}: {reason}")]
    BadKeyword { keyword: String, reason: String },
    #[error("required name {0:?} is not declared in properties")]
    RequiredNotInProperties(String),
    #[error("enum must be a non-empty array")]
    EmptyEnum,
    #[error("enum members must be distinct")]
    DuplicateEnumMember,
    #[error("minItems {min} exceeds maxItems {max}")]
    MinAboveMax { min: usize, max: usize },
    #[error("schema uses unmodeled keywords: {}", .0.join(", "))]
    Unsupported(Vec<String>),
}
