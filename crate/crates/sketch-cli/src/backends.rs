//! Backend construction from settings, including the scripted-backend
//! script file format:
//!
//! ```json
//! {"mode": "sequence", "responses": ["first reply", "second reply"]}
//! {"mode": "keyed",
//!  "pairs": [{"needle": "substring of prompt", "response": "reply"}],
//!  "fallback": "reply when nothing matches"}
//! ```

use crate::errors::CliError;
use crate::settings::{BackendKind, Settings};
use sketch_core::engine::http::HttpConfig;
use sketch_core::engine::{HttpBackend, MockUniformBackend, ModelBackend, ScriptedBackend};
use sketch_core::json::{parse_json, JsonValue};
use std::path::Path;

pub fn build_backend(
    settings: &Settings,
    vocab_size: usize,
) -> Result<Box<dyn ModelBackend + Sync>, CliError> {
    match settings.backend {
        BackendKind::MockUniform => Ok(Box::new(MockUniformBackend::with_seed(
            vocab_size,
            settings.seed,
        ))),
        BackendKind::Scripted => {
            let path = settings.script.as_ref().ok_or_else(|| {
                CliError::usage("the scripted backend needs --script FILE")
            })?;
            Ok(Box::new(load_script(path)?))
        }
        BackendKind::Http => {
            let base_url = settings.base_url.as_ref().ok_or_else(|| {
                CliError::usage("the http backend needs --base-url URL")
            })?;
            let config = HttpConfig::new(base_url.clone(), settings.model.clone());
            Ok(Box::new(HttpBackend::new(config)?))
        }
    }
}

pub fn load_script(path: &Path) -> Result<ScriptedBackend, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::usage(format!("cannot read script {}: {e}", path.display())))?;
    let doc = parse_json(&text)
        .map_err(|e| CliError::usage(format!("script {}: {e}", path.display())))?;
    let bad = |reason: &str| CliError::usage(format!("script {}: {reason}", path.display()));
    let mode = doc
        .get("mode")
        .and_then(JsonValue::as_str)
        .ok_or_else(|| bad("missing string member \"mode\""))?;
    match mode {
        "sequence" => {
            let responses = doc
                .get("responses")
                .and_then(JsonValue::as_array)
                .ok_or_else(|| bad("sequence mode needs an array member \"responses\""))?
                .iter()
                .map(|r| r.as_str().map(String::from))
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| bad("responses must be strings"))?;
            if responses.is_empty() {
                return Err(bad("responses must not be empty"));
            }
            Ok(ScriptedBackend::sequence(responses))
        }
        "keyed" => {
            let pairs = doc
                .get("pairs")
                .and_then(JsonValue::as_array)
                .ok_or_else(|| bad("keyed mode needs an array member \"pairs\""))?
                .iter()
                .map(|entry| {
                    let needle = entry.get("needle").and_then(JsonValue::as_str)?;
                    let response = entry.get("response").and_then(JsonValue::as_str)?;
                    Some((needle.to_string(), response.to_string()))
                })
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| bad("pairs must be objects with string needle and response"))?;
            let fallback = match doc.get("fallback") {
                None => None,
                Some(JsonValue::String(s)) => Some(s.clone()),
                Some(_) => return Err(bad("fallback must be a string")),
            };
            if pairs.is_empty() && fallback.is_none() {
                return Err(bad("keyed mode needs pairs or a fallback"));
            }
            Ok(ScriptedBackend::keyed(pairs, fallback))
        }
        other => Err(bad(&format!(
            "unknown mode {other:?} (expected sequence or keyed)"
        ))),
    }
}
