//! A small self-contained JSON model.
//!
//! The engine needs properties serde_json does not promise: object member
//! order must survive round trips (prompts and datasets are byte-reproducible
//! across runs), numbers must keep their exact source spelling (the decoding
//! automaton can emit literals outside f64 range and they must still parse),
//! and duplicate object keys must be a hard parse error. So values, parsing,
//! and writing live here.

mod number;
mod parse;
mod value;
mod write;

pub use number::JsonNumber;
pub use parse::{find_embedded_value, parse_json, parse_value_prefix, ParseError, ParseErrorKind};
pub use value::{JsonObject, JsonValue};
pub use write::{serialize_canonical, serialize_pretty};
