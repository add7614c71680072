//! The prompt template, versioned as data.
//!
//! Wording lives here and nowhere else: bumping `TEMPLATE_VERSION` together
//! with any string below keeps packaged prompts reproducible per version.

pub const TEMPLATE_VERSION: &str = "v1";

pub const SECTION_TASK_DESCRIPTION: &str = "[Task Description]";
pub const SECTION_LABEL_ARCHITECTURE: &str = "[Label Architecture]";
pub const SECTION_OUTPUT_FORMAT: &str = "[Output Format (Json Schema)]";
pub const SECTION_INPUT_DATA: &str = "[Input Data]";

/// Line preceding the output-format schema.
pub const OUTPUT_FORMAT_LEAD: &str =
    "Respond with a single JSON value that conforms to this JSON Schema:";

/// Markers bracketing the raw input text. The input is inserted verbatim —
/// no escaping — so explicit fences keep inputs containing JSON or section
/// brackets from being misread.
pub const INPUT_BEGIN: &str = "<<<BEGIN INPUT>>>";
pub const INPUT_END: &str = "<<<END INPUT>>>";

/// Instruction tail asking for the answer, nothing else.
pub const FINAL_INSTRUCTION: &str = "Answer with the JSON value only.";

/// Rendering of one labeled option in the label architecture.
pub fn label_line(name: &str, description: Option<&str>) -> String {
    match description {
        Some(d) => format!("- {name}: {d}"),
        None => format!("- {name}"),
    }
}

/// Sentence describing how many labels may be chosen.
pub fn choice_sentence(choice_type: &str) -> Option<&'static str> {
    match choice_type {
        "single" => Some("Choose exactly one of the listed options."),
        "multiple" => Some("Choose one or more of the listed options."),
        _ => None,
    }
}

/// Sentence describing a translation direction, when declared.
pub fn language_sentence(source: Option<&str>, target: Option<&str>) -> Option<String> {
    match (source, target) {
        (Some(s), Some(t)) => Some(format!("Translate from {s} to {t}.")),
        (None, Some(t)) => Some(format!("Translate into {t}.")),
        (Some(s), None) => Some(format!("The source language is {s}.")),
        (None, None) => None,
    }
}
