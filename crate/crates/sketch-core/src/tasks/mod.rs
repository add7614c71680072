//! The task catalog and task instantiation.
//!
//! A *task schema* describes a whole family of tasks (all topic
//! classification tasks, say) and pins down which fields an instance must
//! provide. A *task instance* fills those fields for one concrete task: its
//! description, label architecture, and the output format the model must
//! follow. The builtin catalog ships thirteen schemas across three
//! categories; users can add or override schemas from a directory.

pub mod fixtures;

use crate::json::{parse_json, serialize_pretty, JsonObject, JsonValue, ParseError};
use crate::schema::{parse_schema, validate, SchemaDoc, SchemaError, ValidationReport};
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TaskCategory {
    TextClassification,
    TextGeneration,
    InformationExtraction,
}

impl TaskCategory {
    pub fn name(&self) -> &'static str {
        match self {
            TaskCategory::TextClassification => "text_classification",
            TaskCategory::TextGeneration => "text_generation",
            TaskCategory::InformationExtraction => "information_extraction",
        }
    }

    fn parse(s: &str) -> Option<TaskCategory> {
        match s {
            "text_classification" => Some(TaskCategory::TextClassification),
            "text_generation" => Some(TaskCategory::TextGeneration),
            "information_extraction" => Some(TaskCategory::InformationExtraction),
            _ => None,
        }
    }
}

/// One catalog entry: a named, categorized schema for task instances.
#[derive(Debug, Clone)]
pub struct TaskSchema {
    pub name: String,
    pub category: TaskCategory,
    pub aliases: Vec<String>,
    pub spec: SchemaDoc,
}

impl TaskSchema {
    /// The instance fields the schema makes mandatory.
    pub fn required_fields(&self) -> &[String] {
        &self.spec.required
    }
}

/// A concrete task: validated fields plus the parsed output format.
#[derive(Debug, Clone)]
pub struct TaskInstance {
    schema_name: String,
    fields: JsonObject,
    output_format: SchemaDoc,
}

impl TaskInstance {
    pub fn schema_name(&self) -> &str {
        &self.schema_name
    }

    pub fn fields(&self) -> &JsonObject {
        &self.fields
    }

    pub fn field(&self, name: &str) -> Option<&JsonValue> {
        self.fields.get(name)
    }

    pub fn task_desc(&self) -> &str {
        // guaranteed by catalog invariant: taskDesc is always required
        self.fields
            .get("taskDesc")
            .and_then(JsonValue::as_str)
            .unwrap_or_default()
    }

    /// The parsed `outputFormat` member.
    pub fn output_format(&self) -> &SchemaDoc {
        &self.output_format
    }

    /// The instance-file document: `{"schemaName": ..., "fields": {...}}`.
    pub fn to_file_value(&self) -> JsonValue {
        let mut doc = JsonObject::new();
        doc.insert("schemaName".to_string(), JsonValue::from(self.schema_name.clone()));
        doc.insert("fields".to_string(), JsonValue::Object(self.fields.clone()));
        JsonValue::Object(doc)
    }
}

impl PartialEq for TaskInstance {
    fn eq(&self, other: &Self) -> bool {
        self.schema_name == other.schema_name && self.fields == other.fields
    }
}

#[derive(Debug, Error)]
pub enum TaskError {
    #[error("unknown task schema {0:?}")]
    UnknownSchema(String),
    #[error("task fields do not satisfy the schema:\n{0}")]
    InstanceInvalid(ValidationReport),
    #[error("outputFormat is not a usable schema: {0}")]
    BadOutputFormat(SchemaError),
    #[error("malformed instance file: {0}")]
    BadFile(String),
    #[error("instance file is not valid JSON: {0}")]
    Parse(#[from] ParseError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("catalog entry {name:?}: {reason}")]
    BadEntry { name: String, reason: String },
    #[error("catalog file {path}: {reason}")]
    BadFile { path: String, reason: String },
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

const BUILTIN_SCHEMAS: &[&str] = &[
    include_str!("../../assets/schemas/topic_classification.json"),
    include_str!("../../assets/schemas/sentiment_analysis.json"),
    include_str!("../../assets/schemas/sentence_similarity.json"),
    include_str!("../../assets/schemas/intent_recognition.json"),
    include_str!("../../assets/schemas/natural_language_inference.json"),
    include_str!("../../assets/schemas/summarization.json"),
    include_str!("../../assets/schemas/dialog.json"),
    include_str!("../../assets/schemas/translation.json"),
    include_str!("../../assets/schemas/relation_extraction.json"),
    include_str!("../../assets/schemas/named_entity_recognition.json"),
    include_str!("../../assets/schemas/keyword_extraction.json"),
    include_str!("../../assets/schemas/event_extraction.json"),
    include_str!("../../assets/schemas/aspect_level_sentiment_analysis.json"),
];

/// The set of known task schemas, looked up by name or alias.
#[derive(Debug, Clone)]
pub struct Catalog {
    schemas: Vec<TaskSchema>,
}

impl Catalog {
    /// The thirteen builtin schemas.
    pub fn builtin() -> Catalog {
        let mut catalog = Catalog { schemas: Vec::new() };
        for text in BUILTIN_SCHEMAS {
            let entry = parse_entry(text).expect("builtin catalog entries are valid");
            catalog.upsert(entry);
        }
        catalog
    }

    /// Builtins plus every `*.json` entry in `dir`; a directory entry with a
    /// builtin's name replaces the builtin.
    pub fn with_dir(dir: &Path) -> Result<Catalog, CatalogError> {
        let mut catalog = Catalog::builtin();
        let mut paths: Vec<_> = std::fs::read_dir(dir)?
            .collect::<Result<Vec<_>, _>>()?
            .into_iter()
            .map(|e| e.path())
            .filter(|p| p.extension().is_some_and(|e| e == "json"))
            .collect();
        paths.sort();
        for path in paths {
            let text = std::fs::read_to_string(&path)?;
            let entry = parse_entry(&text).map_err(|e| CatalogError::BadFile {
                path: path.display().to_string(),
                reason: e.to_string(),
            })?;
            catalog.upsert(entry);
        }
        Ok(catalog)
    }

    fn upsert(&mut self, entry: TaskSchema) {
        match self.schemas.iter_mut().find(|s| s.name == entry.name) {
            Some(existing) => *existing = entry,
            None => self.schemas.push(entry),
        }
    }

    /// All schemas, in catalog order.
    pub fn list(&self) -> &[TaskSchema] {
        &self.schemas
    }

    /// Lookup by canonical name or alias.
    pub fn get(&self, name: &str) -> Option<&TaskSchema> {
        self.schemas
            .iter()
            .find(|s| s.name == name || s.aliases.iter().any(|a| a == name))
    }

    /// Builds a validated [`TaskInstance`].
    pub fn instantiate(&self, schema_name: &str, fields: &JsonValue) -> Result<TaskInstance, TaskError> {
        let schema = self
            .get(schema_name)
            .ok_or_else(|| TaskError::UnknownSchema(schema_name.to_string()))?;
        let report = validate(fields, &schema.spec)
            .expect("catalog specs contain no unsupported keywords");
        if !report.valid() {
            return Err(TaskError::InstanceInvalid(report));
        }
        let fields_obj = fields.as_object().expect("validated as object").clone();
        let output_format = parse_schema(
            fields_obj
                .get("outputFormat")
                .expect("outputFormat is required by every catalog schema"),
        )
        .map_err(TaskError::BadOutputFormat)?;
        Ok(TaskInstance {
            schema_name: schema.name.clone(),
            fields: fields_obj,
            output_format,
        })
    }

    /// Reads an instance file (`{"schemaName": ..., "fields": {...}}`).
    pub fn load_instance(&self, path: &Path) -> Result<TaskInstance, TaskError> {
        let text = std::fs::read_to_string(path)?;
        self.parse_instance(&text)
    }

    /// Parses instance-file text.
    pub fn parse_instance(&self, text: &str) -> Result<TaskInstance, TaskError> {
        let doc = parse_json(text)?;
        let obj = doc
            .as_object()
            .ok_or_else(|| TaskError::BadFile("top level must be an object".to_string()))?;
        let name = obj
            .get("schemaName")
            .and_then(JsonValue::as_str)
            .ok_or_else(|| TaskError::BadFile("missing string member schemaName".to_string()))?;
        let fields = obj
            .get("fields")
            .ok_or_else(|| TaskError::BadFile("missing member fields".to_string()))?;
        self.instantiate(name, fields)
    }
}

/// Writes the instance file; `save` then `load` round-trips.
pub fn save_instance(instance: &TaskInstance, path: &Path) -> Result<(), TaskError> {
    std::fs::write(path, serialize_pretty(&instance.to_file_value()))?;
    Ok(())
}

fn parse_entry(text: &str) -> Result<TaskSchema, CatalogError> {
    let doc = parse_json(text).map_err(|e| CatalogError::BadEntry {
        name: "?".to_string(),
        reason: e.to_string(),
    })?;
    let name = doc
        .get("name")
        .and_then(JsonValue::as_str)
        .ok_or_else(|| CatalogError::BadEntry {
            name: "?".to_string(),
            reason: "missing string member name".to_string(),
        })?
        .to_string();
    let bad = |reason: &str| CatalogError::BadEntry {
        name: name.clone(),
        reason: reason.to_string(),
    };
    let category = doc
        .get("category")
        .and_then(JsonValue::as_str)
        .and_then(TaskCategory::parse)
        .ok_or_else(|| bad("missing or unknown category"))?;
    let aliases = match doc.get("aliases") {
        None => Vec::new(),
        Some(JsonValue::Array(items)) => items
            .iter()
            .map(|a| a.as_str().map(String::from))
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| bad("aliases must be strings"))?,
        Some(_) => return Err(bad("aliases must be an array")),
    };
    let spec_value = doc.get("spec").ok_or_else(|| bad("missing member spec"))?;
    let spec = parse_schema(spec_value).map_err(|e| bad(&format!("bad spec: {e}")))?;
    if spec.has_unsupported() {
        return Err(bad(&format!(
            "spec uses unmodeled keywords: {}",
            spec.collect_unsupported().join(", ")
        )));
    }
    for field in ["taskDesc", "outputFormat"] {
        if !spec.is_required(field) {
            return Err(bad(&format!("spec must require {field}")));
        }
    }
    Ok(TaskSchema {
        name,
        category,
        aliases,
        spec,
    })
}
