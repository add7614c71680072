//! Schema → regular expression → byte DFA → per-state token masks.
//!
//! The chain turns a schema into a decoding-time gate: at every step of
//! generation the mask says which tokens keep the output inside the
//! language of canonical serializations of conforming values, and EOS is
//! permitted exactly when the bytes so far form a complete conforming
//! document.

mod dfa;
mod mask;
mod regex;
mod vocab;

use thiserror::Error;

pub use dfa::{compile_regex, compile_regex_capped, Dfa, DEFAULT_STATE_CAP};
pub use mask::{index_vocabulary, MaskError, TokenMaskIndex, TERMINAL_STATE};
pub use regex::{integer_regex, number_regex, schema_to_regex, string_regex, ByteSet, RegexAst};
pub use vocab::{decode_token_spelling, VocabError, Vocabulary};

use crate::schema::SchemaDoc;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum CompilerError {
    #[error("schema uses keywords the compiler does not model: {}", .0.join(", "))]
    Unsupported(Vec<String>),
    #[error("automaton exceeded the state cap of {cap}")]
    StateBlowup { cap: usize },
    #[error("schema admits no output: {0}")]
    EmptyLanguage(String),
}

/// Convenience: schema all the way to a DFA with the default state cap.
pub fn compile_schema(schema: &SchemaDoc) -> Result<Dfa, CompilerError> {
    compile_regex(&schema_to_regex(schema)?)
}
