//! Prompt packaging: a task instance plus one input text becomes the exact
//! string the model sees. Deterministic by construction — same instance,
//! same input, same bytes.

pub mod template;

use crate::json::{parse_json, serialize_canonical, serialize_pretty, JsonValue};
use crate::tasks::TaskInstance;
use template::*;
use thiserror::Error;

/// Instance fields rendered into the label-architecture section, with the
/// member that names each entry. Order is fixed so prompts are stable.
const LABEL_FIELDS: &[(&str, &str)] = &[
    ("labelSet", "tag"),
    ("entityTypes", "name"),
    ("relationTypes", "name"),
    ("eventTypes", "name"),
    ("sentimentTypes", "name"),
];

#[derive(Debug, Clone, PartialEq)]
pub struct PackagedPrompt {
    /// The full prompt text handed to the model.
    pub text: String,
    /// `(section label, section content)` in render order. Content is the
    /// payload only — headers and input fences live in `text`.
    pub sections: Vec<(String, String)>,
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum PromptError {
    #[error("input is empty")]
    EmptyInput,
    #[error("template placeholder {0:?} is unknown")]
    BadPlaceholder(String),
}

#[derive(Debug, Clone, Default)]
pub struct PromptOptions {
    /// Pretty-print the output format schema instead of the compact form.
    /// Either spelling re-parses to the identical schema document.
    pub pretty_format: bool,
    /// Custom template with `{taskDesc}`, `{labelArchitecture}`,
    /// `{outputFormat}`, `{input}` placeholders replacing the builtin layout.
    pub custom_template: Option<String>,
}

/// Packages with default options (compact schema, builtin template).
pub fn package(instance: &TaskInstance, input: &str) -> Result<PackagedPrompt, PromptError> {
    package_with(instance, input, &PromptOptions::default())
}

pub fn package_with(
    instance: &TaskInstance,
    input: &str,
    options: &PromptOptions,
) -> Result<PackagedPrompt, PromptError> {
    if input.trim().is_empty() {
        return Err(PromptError::EmptyInput);
    }

    let task_desc = render_task_desc(instance);
    let label_architecture = render_label_architecture(instance);
    let output_format = if options.pretty_format {
        // serialize_pretty ends with a newline; sections carry bare payloads
        serialize_pretty(instance.output_format().source())
            .trim_end()
            .to_string()
    } else {
        serialize_canonical(instance.output_format().source())
    };

    let mut sections = vec![(SECTION_TASK_DESCRIPTION.to_string(), task_desc)];
    if let Some(labels) = &label_architecture {
        sections.push((SECTION_LABEL_ARCHITECTURE.to_string(), labels.clone()));
    }
    sections.push((SECTION_OUTPUT_FORMAT.to_string(), output_format));
    sections.push((SECTION_INPUT_DATA.to_string(), input.to_string()));

    let text = match &options.custom_template {
        Some(template) => fill_template(template, &sections, input)?,
        None => render_builtin(&sections),
    };
    Ok(PackagedPrompt { text, sections })
}

fn render_task_desc(instance: &TaskInstance) -> String {
    let mut out = instance.task_desc().to_string();
    let lang = |key: &str| instance.field(key).and_then(JsonValue::as_str);
    if let Some(sentence) = language_sentence(lang("sourceLang"), lang("targetLang")) {
        if !out.ends_with(' ') && !out.is_empty() {
            out.push(' ');
        }
        out.push_str(&sentence);
    }
    out
}

/// Lines for every label-like field present, plus the choice sentence.
/// `None` when the instance has no label-like field at all.
fn render_label_architecture(instance: &TaskInstance) -> Option<String> {
    let mut lines: Vec<String> = Vec::new();
    for (field, name_key) in LABEL_FIELDS {
        let Some(JsonValue::Array(entries)) = instance.field(field) else {
            continue;
        };
        for entry in entries {
            let Some(name) = entry.get(name_key).and_then(JsonValue::as_str) else {
                continue;
            };
            let description = entry.get("description").and_then(JsonValue::as_str);
            lines.push(label_line(name, description));
        }
    }
    if lines.is_empty() {
        return None;
    }
    if let Some(sentence) = instance
        .field("choiceType")
        .and_then(JsonValue::as_str)
        .and_then(choice_sentence)
    {
        lines.push(sentence.to_string());
    }
    Some(lines.join("\n"))
}

fn render_builtin(sections: &[(String, String)]) -> String {
    let mut text = String::new();
    for (label, content) in sections {
        text.push_str(label);
        text.push('\n');
        if label == SECTION_INPUT_DATA {
            text.push_str(INPUT_BEGIN);
            text.push('\n');
            text.push_str(content);
            text.push('\n');
            text.push_str(INPUT_END);
        } else if label == SECTION_OUTPUT_FORMAT {
            text.push_str(OUTPUT_FORMAT_LEAD);
            text.push('\n');
            text.push_str(content);
        } else {
            text.push_str(content);
        }
        text.push_str("\n\n");
    }
    text.push_str(FINAL_INSTRUCTION);
    text.push('\n');
    text
}

fn fill_template(
    template: &str,
    sections: &[(String, String)],
    input: &str,
) -> Result<String, PromptError> {
    let lookup = |name: &str| -> Result<String, PromptError> {
        let section = |label: &str| {
            sections
                .iter()
                .find(|(l, _)| l == label)
                .map(|(_, c)| c.clone())
                .unwrap_or_default()
        };
        match name {
            "taskDesc" => Ok(section(SECTION_TASK_DESCRIPTION)),
            "labelArchitecture" => Ok(section(SECTION_LABEL_ARCHITECTURE)),
            "outputFormat" => Ok(section(SECTION_OUTPUT_FORMAT)),
            "input" => Ok(input.to_string()),
            other => Err(PromptError::BadPlaceholder(other.to_string())),
        }
    };
    let mut out = String::new();
    let mut rest = template;
    while let Some(open) = rest.find('{') {
        out.push_str(&rest[..open]);
        let after = &rest[open + 1..];
        match after.find('}') {
            Some(close) => {
                out.push_str(&lookup(&after[..close])?);
                rest = &after[close + 1..];
            }
            None => {
                out.push('{');
                rest = after;
            }
        }
    }
    out.push_str(rest);
    Ok(out)
}

/// Re-parses a rendered output-format section; used to check the
/// "section re-parses to the identical schema" invariant.
pub fn reparse_output_format(section: &str) -> Option<JsonValue> {
    parse_json(section).ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schema::parse_schema;
    use crate::tasks::fixtures;

    #[test]
    fn ner_prompt_has_four_sections_and_all_entity_names() {
        let prompt = package(&fixtures::listing_ner(), fixtures::NER_SAMPLE_INPUT).unwrap();
        let labels: Vec<&str> = prompt.sections.iter().map(|(l, _)| l.as_str()).collect();
        assert_eq!(
            labels,
            vec![
                SECTION_TASK_DESCRIPTION,
                SECTION_LABEL_ARCHITECTURE,
                SECTION_OUTPUT_FORMAT,
                SECTION_INPUT_DATA
            ]
        );
        let arch = &prompt.sections[1].1;
        for name in ["person", "organization", "location"] {
            assert!(arch.contains(name), "{name} missing from {arch}");
        }
        assert!(prompt.text.contains(fixtures::NER_SAMPLE_INPUT));
        assert!(prompt.text.contains(INPUT_BEGIN));
        assert!(prompt.text.contains(INPUT_END));
    }

    #[test]
    fn translation_prompt_has_three_sections() {
        let prompt = package(&fixtures::example_translation(), "Guten Morgen").unwrap();
        let labels: Vec<&str> = prompt.sections.iter().map(|(l, _)| l.as_str()).collect();
        assert_eq!(
            labels,
            vec![SECTION_TASK_DESCRIPTION, SECTION_OUTPUT_FORMAT, SECTION_INPUT_DATA]
        );
        assert!(!prompt.text.contains(SECTION_LABEL_ARCHITECTURE));
    }

    #[test]
    fn deterministic_bytes() {
        let a = package(&fixtures::example_topic(), "Stocks rallied today.").unwrap();
        let b = package(&fixtures::example_topic(), "Stocks rallied today.").unwrap();
        assert_eq!(a, b);
        assert_eq!(a.text.as_bytes(), b.text.as_bytes());
    }

    #[test]
    fn inputs_differ_only_in_input_section() {
        let a = package(&fixtures::example_topic(), "first input").unwrap();
        let b = package(&fixtures::example_topic(), "second input").unwrap();
        let head = |p: &PackagedPrompt| p.text.split(INPUT_BEGIN).next().unwrap().to_string();
        let tail = |p: &PackagedPrompt| p.text.split(INPUT_END).last().unwrap().to_string();
        assert_eq!(head(&a), head(&b));
        assert_eq!(tail(&a), tail(&b));
        assert_ne!(a.text, b.text);
    }

    #[test]
    fn output_format_section_reparses_identically() {
        for pretty in [false, true] {
            let options = PromptOptions {
                pretty_format: pretty,
                custom_template: None,
            };
            let instance = fixtures::example_ner();
            let prompt = package_with(&instance, "x", &options).unwrap();
            let section = &prompt.sections[2].1;
            if !pretty {
                assert_eq!(section, &serialize_canonical(instance.output_format().source()));
            }
            let reparsed = parse_schema(&reparse_output_format(section).unwrap()).unwrap();
            assert_eq!(&reparsed, instance.output_format());
        }
    }

    #[test]
    fn empty_input_rejected() {
        assert_eq!(
            package(&fixtures::example_topic(), "  \n\t "),
            Err(PromptError::EmptyInput)
        );
    }

    #[test]
    fn choice_sentence_rendered() {
        let prompt = package(&fixtures::example_topic(), "text").unwrap();
        assert!(prompt.sections[1].1.contains("exactly one"));
    }

    #[test]
    fn custom_template() {
        let options = PromptOptions {
            pretty_format: false,
            custom_template: Some("T={taskDesc} L={labelArchitecture} F={outputFormat} I={input}".to_string()),
        };
        let prompt = package_with(&fixtures::example_topic(), "news text", &options).unwrap();
        assert!(prompt.text.starts_with("T=Select a topic tag"));
        assert!(prompt.text.contains("I=news text"));
        assert!(prompt.text.contains("L=- World"));

        let bad = PromptOptions {
            pretty_format: false,
            custom_template: Some("{nope}".to_string()),
        };
        assert_eq!(
            package_with(&fixtures::example_topic(), "x", &bad),
            Err(PromptError::BadPlaceholder("nope".to_string()))
        );
    }

    #[test]
    fn translation_languages_enter_task_description() {
        let catalog = crate::tasks::Catalog::builtin();
        let mut fields = fixtures::example_translation().fields().clone();
        fields.insert("sourceLang".to_string(), JsonValue::from("German"));
        fields.insert("targetLang".to_string(), JsonValue::from("English"));
        let instance = catalog
            .instantiate("translation", &JsonValue::Object(fields))
            .unwrap();
        let prompt = package(&instance, "Guten Morgen").unwrap();
        assert!(prompt.sections[0].1.contains("Translate from German to English."));
    }
}
