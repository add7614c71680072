//! Model backends: the two capabilities a model can offer.
//!
//! A backend either exposes per-token scores over the vocabulary given a
//! token prefix (`scored`) — what constrained decoding needs — or produces a
//! free-text completion for a prompt (`complete`), which is all a remote
//! chat API offers. A backend declares what it supports; the engine checks
//! before use.

use std::sync::Mutex;
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum BackendError {
    #[error("backend {backend:?} does not support {capability}")]
    Unsupported {
        backend: String,
        capability: &'static str,
    },
    #[error("backend returned {got} scores for a vocabulary of {want}")]
    WrongScoreCount { got: usize, want: usize },
    #[error("scripted backend ran out of responses")]
    ScriptExhausted,
    #[error("scripted backend has no response matching the prompt")]
    NoScriptMatch,
    #[error("request failed: {0}")]
    Transport(String),
    #[error("server answered {status}: {body}")]
    Http { status: u16, body: String },
    #[error("response not understood: {0}")]
    BadResponse(String),
}

/// Contract between the engine and a model.
///
/// Implementations must be safe to call from several sessions at once;
/// backends with single-session state guard it internally.
pub trait ModelBackend: Send + Sync {
    fn name(&self) -> &str;

    fn supports_scoring(&self) -> bool {
        false
    }

    fn supports_completion(&self) -> bool {
        false
    }

    /// Scores for every vocabulary token given the token prefix so far.
    /// Must return exactly vocabulary-size entries.
    fn scored(&self, _prefix: &[u32]) -> Result<Vec<f64>, BackendError> {
        Err(BackendError::Unsupported {
            backend: self.name().to_string(),
            capability: "scored",
        })
    }

    /// One free-text completion for the prompt. Called again to resample.
    fn complete(&self, _prompt: &str) -> Result<String, BackendError> {
        Err(BackendError::Unsupported {
            backend: self.name().to_string(),
            capability: "complete",
        })
    }
}

/// Backend with no preferences at all. Scores every token equally, so
/// masked sampling walks the automaton uniformly at random; free-mode
/// completions are uniform printable noise. Useful for exercising the
/// strict-mode guarantee (and its absence in free mode) without a model.
#[derive(Debug, Clone)]
pub struct MockUniformBackend {
    vocab_size: usize,
    completion_seed: u64,
}

impl MockUniformBackend {
    pub fn new(vocab_size: usize) -> MockUniformBackend {
        MockUniformBackend::with_seed(vocab_size, 0)
    }

    pub fn with_seed(vocab_size: usize, completion_seed: u64) -> MockUniformBackend {
        MockUniformBackend {
            vocab_size,
            completion_seed,
        }
    }
}

impl ModelBackend for MockUniformBackend {
    fn name(&self) -> &str {
        "mock-uniform"
    }

    fn supports_scoring(&self) -> bool {
        true
    }

    fn supports_completion(&self) -> bool {
        true
    }

    fn scored(&self, _prefix: &[u32]) -> Result<Vec<f64>, BackendError> {
        Ok(vec![0.0; self.vocab_size])
    }

    /// Uniform printable noise, a pure function of (prompt, seed): calls
    /// from parallel sessions and repeat runs agree byte for byte. A
    /// resample with the same prompt returns the same text — attempt
    /// budgets only help against genuinely stochastic backends.
    fn complete(&self, prompt: &str) -> Result<String, BackendError> {
        use rand::{Rng, SeedableRng};
        let digest = crate::util::sha256_hex(prompt.as_bytes());
        let prompt_hash = u64::from_str_radix(&digest[..16], 16).unwrap_or(0);
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(crate::util::derive_seed(
            self.completion_seed,
            prompt_hash,
        ));
        let len = rng.random_range(1..=120);
        let mut text = String::with_capacity(len);
        for _ in 0..len {
            text.push(char::from(rng.random_range(0x20..0x7fu8)));
        }
        Ok(text)
    }
}

enum Script {
    /// Responses handed out in order, one per `complete` call.
    Sequence(Vec<String>),
    /// First response whose key occurs in the prompt text wins.
    Keyed {
        pairs: Vec<(String, String)>,
        fallback: Option<String>,
    },
}

/// Completion backend that replays canned responses. Deterministic stand-in
/// for a remote model in tests and offline runs.
pub struct ScriptedBackend {
    script: Script,
    cursor: Mutex<usize>,
}

impl ScriptedBackend {
    pub fn sequence(responses: Vec<String>) -> ScriptedBackend {
        ScriptedBackend {
            script: Script::Sequence(responses),
            cursor: Mutex::new(0),
        }
    }

    /// `pairs` are `(needle, response)`: a prompt containing `needle` gets
    /// `response`. Prompts matching nothing get `fallback` if present.
    pub fn keyed(pairs: Vec<(String, String)>, fallback: Option<String>) -> ScriptedBackend {
        ScriptedBackend {
            script: Script::Keyed { pairs, fallback },
            cursor: Mutex::new(0),
        }
    }
}

impl ModelBackend for ScriptedBackend {
    fn name(&self) -> &str {
        "scripted"
    }

    fn supports_completion(&self) -> bool {
        true
    }

    fn complete(&self, prompt: &str) -> Result<String, BackendError> {
        match &self.script {
            Script::Sequence(responses) => {
                let mut cursor = self.cursor.lock().unwrap();
                let response = responses.get(*cursor).ok_or(BackendError::ScriptExhausted)?;
                *cursor += 1;
                Ok(response.clone())
            }
            Script::Keyed { pairs, fallback } => pairs
                .iter()
                .find(|(needle, _)| prompt.contains(needle))
                .map(|(_, response)| response.clone())
                .or_else(|| fallback.clone())
                .ok_or(BackendError::NoScriptMatch),
        }
    }
}
