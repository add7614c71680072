//! Schema-driven structured output for language models.
//!
//! The crate covers the full loop: declare an output schema, turn it into a
//! prompt, compile it into a token-level decoding mask so a model physically
//! cannot emit an out-of-format byte, validate whatever comes back, and
//! measure how often unconstrained generations would have been legal. A
//! dataset builder synthesizes schema-following training corpora from random
//! schemas, and an eval harness scores outputs with task metrics.

pub mod compiler;
pub mod dataset;
pub mod engine;
pub mod eval;
pub mod json;
pub mod prompt;
pub mod schema;
pub mod tasks;
pub mod util;
