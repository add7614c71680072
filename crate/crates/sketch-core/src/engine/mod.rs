//! Generation engine: run a backend in strict (automaton-masked) or free
//! mode, validate what comes back, and resample bounded times before
//! giving up.
//!
//! Strict mode guarantees a valid output by construction: every emitted
//! token is drawn from the mask index, so the finished text is in the
//! automaton's language and therefore validates. Free mode trusts the
//! backend and checks afterwards: parse, then validate, resampling up to
//! the configured attempt budget.

pub mod backend;
#[cfg(feature = "http")]
pub mod http;

pub use backend::{BackendError, MockUniformBackend, ModelBackend, ScriptedBackend};
#[cfg(feature = "http")]
pub use http::HttpBackend;

use crate::compiler::{compile_schema, index_vocabulary, CompilerError, MaskError, TokenMaskIndex, Vocabulary};
use crate::json::{find_embedded_value, parse_json, JsonValue};
use crate::prompt::{package_with, PromptError, PromptOptions};
use crate::schema::{validate_lenient, SchemaDoc, ValidationReport, Violation};
use crate::tasks::TaskInstance;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use std::collections::HashMap;
use std::sync::{Arc, Mutex};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GenerationMode {
    /// Token masking against the compiled schema automaton; output is
    /// valid by construction.
    Strict,
    /// Plain completion, checked afterwards, resampled on failure.
    Free,
}

impl GenerationMode {
    pub fn name(self) -> &'static str {
        match self {
            GenerationMode::Strict => "strict",
            GenerationMode::Free => "free",
        }
    }
}

#[derive(Debug, Clone)]
pub struct GenerationConfig {
    pub mode: GenerationMode,
    pub max_tokens: u32,
    /// Free-mode resampling budget before `FormatFailure`.
    pub attempts: u32,
    pub temperature: f64,
    pub seed: u64,
    /// Free mode only: also accept the first JSON value embedded in
    /// surrounding prose.
    pub lenient_parse: bool,
}

impl Default for GenerationConfig {
    fn default() -> GenerationConfig {
        GenerationConfig {
            mode: GenerationMode::Strict,
            max_tokens: 512,
            attempts: 3,
            temperature: 1.0,
            seed: 0,
            lenient_parse: false,
        }
    }
}

impl GenerationConfig {
    fn check(&self) -> Result<(), EngineError> {
        if self.max_tokens == 0 {
            return Err(EngineError::BadConfig("maxTokens must be positive".into()));
        }
        if self.attempts == 0 {
            return Err(EngineError::BadConfig("attempts must be positive".into()));
        }
        if !self.temperature.is_finite() || self.temperature < 0.0 {
            return Err(EngineError::BadConfig(
                "temperature must be a non-negative finite number".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenerationOutcome {
    pub raw_text: String,
    /// Present exactly when `raw_text` parsed as JSON.
    pub value: Option<JsonValue>,
    pub report: ValidationReport,
    pub attempts_used: u32,
    pub mode_used: GenerationMode,
}

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("{0}")]
    Prompt(#[from] PromptError),
    #[error("schema not supported in strict mode: {0}")]
    UnsupportedSchema(#[from] CompilerError),
    #[error("output still invalid after {} attempt(s)", .0.attempts_used)]
    FormatFailure(Box<GenerationOutcome>),
    #[error(transparent)]
    Backend(#[from] BackendError),
    #[error("no accepting output within {max_tokens} tokens")]
    LengthExceeded { max_tokens: u32 },
    #[error("backend {backend:?} cannot score tokens; strict mode needs a scored-capable backend")]
    ScoringUnsupported { backend: String },
    #[error("backend {backend:?} cannot complete text; free mode needs a completion-capable backend")]
    CompletionUnsupported { backend: String },
    #[error("vocabulary covers no legal continuation from automaton state {state}")]
    VocabularyDeadEnd { state: u32 },
    #[error("bad configuration: {0}")]
    BadConfig(String),
    #[error(transparent)]
    Mask(#[from] MaskError),
    #[error("internal error: {0}")]
    Internal(&'static str),
}

/// Generation engine bound to one vocabulary. Mask indexes are cached by
/// (schema hash, vocabulary hash) because building them dominates latency
/// and one task instance serves many inputs.
pub struct Engine {
    vocab: Arc<Vocabulary>,
    prompt_options: PromptOptions,
    cache: Mutex<HashMap<(String, String), Arc<TokenMaskIndex>>>,
}

impl Engine {
    pub fn new(vocab: Vocabulary) -> Engine {
        Engine::with_prompt_options(vocab, PromptOptions::default())
    }

    /// An engine whose prompts are packaged with the given options (custom
    /// template, pretty-printed format section).
    pub fn with_prompt_options(vocab: Vocabulary, prompt_options: PromptOptions) -> Engine {
        Engine {
            vocab: Arc::new(vocab),
            prompt_options,
            cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    /// Compiles (or fetches from cache) the token mask index for a schema.
    pub fn mask_index(&self, schema: &SchemaDoc) -> Result<Arc<TokenMaskIndex>, CompilerError> {
        let key = (schema.hash_hex(), self.vocab.hash_hex());
        if let Some(hit) = self.cache.lock().unwrap().get(&key) {
            return Ok(Arc::clone(hit));
        }
        let dfa = compile_schema(schema)?;
        let index = Arc::new(index_vocabulary(&dfa, &self.vocab));
        self.cache
            .lock()
            .unwrap()
            .insert(key, Arc::clone(&index));
        Ok(index)
    }

    /// Number of cached mask indexes (observability for tests and stats).
    pub fn cached_indexes(&self) -> usize {
        self.cache.lock().unwrap().len()
    }

    pub fn generate(
        &self,
        backend: &dyn ModelBackend,
        instance: &TaskInstance,
        input: &str,
        config: &GenerationConfig,
    ) -> Result<GenerationOutcome, EngineError> {
        config.check()?;
        let prompt = package_with(instance, input, &self.prompt_options)?;
        match config.mode {
            GenerationMode::Strict => {
                if !backend.supports_scoring() {
                    return Err(EngineError::ScoringUnsupported {
                        backend: backend.name().to_string(),
                    });
                }
                let index = self.mask_index(instance.output_format())?;
                // Local mock backends ignore the prefix; a vocabulary that
                // cannot cover the prompt text gets an empty prefix rather
                // than a hard error.
                let prompt_tokens = self
                    .vocab
                    .greedy_tokenize(prompt.text.as_bytes())
                    .unwrap_or_default();
                let tokens = constrained_decode(backend, &index, &prompt_tokens, config)?;
                let mut bytes = Vec::new();
                for &token in &tokens {
                    if token != index.eos_id() {
                        bytes.extend_from_slice(self.vocab.bytes(token));
                    }
                }
                let raw_text = String::from_utf8(bytes)
                    .map_err(|_| EngineError::Internal("masked output was not UTF-8"))?;
                let mut outcome = validate_outcome(&raw_text, instance.output_format(), false);
                outcome.attempts_used = 1;
                outcome.mode_used = GenerationMode::Strict;
                debug_assert!(outcome.report.valid(), "strict-mode guarantee violated");
                Ok(outcome)
            }
            GenerationMode::Free => {
                if !backend.supports_completion() {
                    return Err(EngineError::CompletionUnsupported {
                        backend: backend.name().to_string(),
                    });
                }
                let mut last = None;
                for attempt in 1..=config.attempts {
                    let raw = backend.complete(&prompt.text)?;
                    let mut outcome =
                        validate_outcome(&raw, instance.output_format(), config.lenient_parse);
                    outcome.attempts_used = attempt;
                    outcome.mode_used = GenerationMode::Free;
                    if outcome.report.valid() {
                        return Ok(outcome);
                    }
                    last = Some(outcome);
                }
                Err(EngineError::FormatFailure(Box::new(
                    last.expect("attempts checked positive"),
                )))
            }
        }
    }
}

/// Masked sampling against a token mask index.
///
/// Each emitted token is allowed at its state. Sampling is softmax over the
/// backend's scores restricted to allowed tokens at the given temperature;
/// temperature 0 is argmax with ties broken by lowest token id. Masking
/// renormalizes only — relative scores of allowed tokens are untouched.
/// Stops at EOS in an accepting state; `LengthExceeded` if `max_tokens`
/// tokens (EOS included) were emitted without reaching one.
pub fn constrained_decode(
    backend: &dyn ModelBackend,
    index: &TokenMaskIndex,
    prompt_tokens: &[u32],
    config: &GenerationConfig,
) -> Result<Vec<u32>, EngineError> {
    config.check()?;
    let mut rng = ChaCha12Rng::seed_from_u64(config.seed);
    let mut context: Vec<u32> = prompt_tokens.to_vec();
    let mut out: Vec<u32> = Vec::new();
    let mut state = index.start();
    for _ in 0..config.max_tokens {
        let scores = backend.scored(&context)?;
        if scores.len() != index.num_tokens() {
            return Err(BackendError::WrongScoreCount {
                got: scores.len(),
                want: index.num_tokens(),
            }
            .into());
        }
        let allowed: Vec<u32> = index.allowed_tokens(state).collect();
        if allowed.is_empty() {
            return Err(EngineError::VocabularyDeadEnd { state });
        }
        let token = if config.temperature == 0.0 {
            // allowed iterates in ascending id order, so strict `>` keeps
            // the lowest id among ties
            let mut best = allowed[0];
            for &t in &allowed[1..] {
                if scores[t as usize] > scores[best as usize] {
                    best = t;
                }
            }
            best
        } else {
            let max_score = allowed
                .iter()
                .map(|&t| scores[t as usize])
                .fold(f64::NEG_INFINITY, f64::max);
            let weights: Vec<f64> = allowed
                .iter()
                .map(|&t| ((scores[t as usize] - max_score) / config.temperature).exp())
                .collect();
            let total: f64 = weights.iter().sum();
            let mut draw = rng.random::<f64>() * total;
            let mut picked = allowed[allowed.len() - 1];
            for (&t, &w) in allowed.iter().zip(&weights) {
                draw -= w;
                if draw <= 0.0 {
                    picked = t;
                    break;
                }
            }
            picked
        };
        out.push(token);
        context.push(token);
        state = index.advance(state, token)?;
        if token == index.eos_id() {
            return Ok(out);
        }
    }
    Err(EngineError::LengthExceeded {
        max_tokens: config.max_tokens,
    })
}

/// The two-step legality check as a verdict, never an exception: can the
/// text be read as a JSON value, and does that value conform to the schema?
/// With `lenient_parse`, a JSON value embedded in surrounding prose counts
/// as readable. Bookkeeping fields (`attempts_used`, `mode_used`) are
/// defaults for the caller to overwrite.
pub fn validate_outcome(
    raw_text: &str,
    output_format: &SchemaDoc,
    lenient_parse: bool,
) -> GenerationOutcome {
    let value = match parse_json(raw_text) {
        Ok(v) => Some(v),
        Err(_) if lenient_parse => find_embedded_value(raw_text),
        Err(_) => None,
    };
    let report = match &value {
        Some(v) => validate_lenient(v, output_format),
        None => ValidationReport::new(vec![Violation {
            path: "$".to_string(),
            keyword: "parse".to_string(),
            message: "output is not a JSON value".to_string(),
        }]),
    };
    GenerationOutcome {
        raw_text: raw_text.to_string(),
        value,
        report,
        attempts_used: 1,
        mode_used: GenerationMode::Free,
    }
}
