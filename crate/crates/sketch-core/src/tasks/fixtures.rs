//! Ready-made task instances used in documentation, demos, and tests.

use super::{Catalog, TaskInstance};

/// Named entity recognition with three entity types (person, organization,
/// location).
pub const LISTING_NER_INSTANCE: &str = include_str!("../../assets/tasks/listing_ner.json");

/// Named entity recognition with four entity types (adds "others").
pub const EXAMPLE_NER_INSTANCE: &str = include_str!("../../assets/tasks/example_ner.json");

/// Single-choice topic classification over four news topics.
pub const EXAMPLE_TOPIC_INSTANCE: &str = include_str!("../../assets/tasks/example_topic.json");

/// Translation into a `{"translation": ...}` object.
pub const EXAMPLE_TRANSLATION_INSTANCE: &str =
    include_str!("../../assets/tasks/example_translation.json");

/// Sample input for the NER instances.
pub const NER_SAMPLE_INPUT: &str =
    "Kamala Harris pledges 'new way forward' in historic convention speech";

/// The output the NER task yields on [`NER_SAMPLE_INPUT`].
pub const NER_SAMPLE_OUTPUT: &str = r#"[{"name":"Kamala Harris","entity_type":"person"}]"#;

fn instance(text: &str) -> TaskInstance {
    Catalog::builtin()
        .parse_instance(text)
        .expect("fixture instances are valid")
}

pub fn listing_ner() -> TaskInstance {
    instance(LISTING_NER_INSTANCE)
}

pub fn example_ner() -> TaskInstance {
    instance(EXAMPLE_NER_INSTANCE)
}

pub fn example_topic() -> TaskInstance {
    instance(EXAMPLE_TOPIC_INSTANCE)
}

pub fn example_translation() -> TaskInstance {
    instance(EXAMPLE_TRANSLATION_INSTANCE)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compiler::compile_schema;
    use crate::json::parse_json;
    use crate::schema::validate;

    #[test]
    fn all_fixtures_instantiate() {
        assert_eq!(listing_ner().schema_name(), "named_entity_recognition");
        assert_eq!(example_ner().schema_name(), "named_entity_recognition");
        assert_eq!(example_topic().schema_name(), "topic_classification");
        assert_eq!(example_translation().schema_name(), "translation");
    }

    #[test]
    fn ner_sample_output_conforms_and_compiles() {
        let instance = listing_ner();
        let value = parse_json(NER_SAMPLE_OUTPUT).unwrap();
        assert!(validate(&value, instance.output_format()).unwrap().valid());
        let dfa = compile_schema(instance.output_format()).unwrap();
        assert!(dfa.accepts(NER_SAMPLE_OUTPUT.as_bytes()));
    }
}
