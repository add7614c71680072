//! Remote completion backend for OpenAI-compatible chat-completions
//! endpoints.
//!
//! Completion-only: chat APIs expose no per-token scores, so strict mode is
//! off the table here — pair this backend with free mode. The prompt goes
//! out as a single user message; the reply is the first choice's message
//! content.

use super::backend::{BackendError, ModelBackend};
use crate::json::{parse_json, serialize_canonical, JsonObject, JsonValue};
use std::time::Duration;

/// Environment variable holding the bearer token.
pub const API_KEY_ENV: &str = "SKETCH_API_KEY";

#[derive(Debug, Clone)]
pub struct HttpConfig {
    /// Base URL up to but not including `/chat/completions`,
    /// e.g. `https://api.example.com/v1`.
    pub base_url: String,
    pub model: String,
    /// Bearer token; `None` falls back to `SKETCH_API_KEY`, and requests go
    /// out unauthenticated if that is unset too.
    pub api_key: Option<String>,
    pub timeout: Duration,
    /// Extra attempts after a 5xx answer. 4xx answers never retry.
    pub retries_5xx: u32,
}

impl HttpConfig {
    pub fn new(base_url: impl Into<String>, model: impl Into<String>) -> HttpConfig {
        HttpConfig {
            base_url: base_url.into(),
            model: model.into(),
            api_key: None,
            timeout: Duration::from_secs(60),
            retries_5xx: 2,
        }
    }
}

pub struct HttpBackend {
    config: HttpConfig,
    api_key: Option<String>,
    client: reqwest::blocking::Client,
}

impl HttpBackend {
    pub fn new(config: HttpConfig) -> Result<HttpBackend, BackendError> {
        let api_key = config
            .api_key
            .clone()
            .or_else(|| std::env::var(API_KEY_ENV).ok());
        let client = reqwest::blocking::Client::builder()
            .timeout(config.timeout)
            .build()
            .map_err(|e| BackendError::Transport(e.to_string()))?;
        Ok(HttpBackend {
            config,
            api_key,
            client,
        })
    }

    fn endpoint(&self) -> String {
        format!(
            "{}/chat/completions",
            self.config.base_url.trim_end_matches('/')
        )
    }

    fn request_body(&self, prompt: &str) -> String {
        let mut message = JsonObject::new();
        message.insert("role", JsonValue::from("user"));
        message.insert("content", JsonValue::from(prompt));
        let mut body = JsonObject::new();
        body.insert("model", JsonValue::from(self.config.model.as_str()));
        body.insert("messages", JsonValue::Array(vec![JsonValue::Object(message)]));
        serialize_canonical(&JsonValue::Object(body))
    }

    fn post_once(&self, body: &str) -> Result<(u16, String), BackendError> {
        let mut request = self
            .client
            .post(self.endpoint())
            .header("content-type", "application/json")
            .body(body.to_string());
        if let Some(key) = &self.api_key {
            request = request.header("authorization", format!("Bearer {key}"));
        }
        let response = request
            .send()
            .map_err(|e| BackendError::Transport(e.to_string()))?;
        let status = response.status().as_u16();
        let text = response
            .text()
            .map_err(|e| BackendError::Transport(e.to_string()))?;
        Ok((status, text))
    }
}

/// Pulls `choices[0].message.content` out of a chat-completions response.
fn extract_content(body: &str) -> Result<String, BackendError> {
    let snippet = || body.chars().take(200).collect::<String>();
    let value = parse_json(body).map_err(|_| BackendError::BadResponse(snippet()))?;
    value
        .get("choices")
        .and_then(JsonValue::as_array)
        .and_then(|choices| choices.first())
        .and_then(|choice| choice.get("message"))
        .and_then(|message| message.get("content"))
        .and_then(JsonValue::as_str)
        .map(str::to_string)
        .ok_or_else(|| BackendError::BadResponse(snippet()))
}

impl ModelBackend for HttpBackend {
    fn name(&self) -> &str {
        "http"
    }

    fn supports_completion(&self) -> bool {
        true
    }

    fn complete(&self, prompt: &str) -> Result<String, BackendError> {
        let body = self.request_body(prompt);
        let mut last: Option<(u16, String)> = None;
        for attempt in 0..=self.config.retries_5xx {
            if attempt > 0 {
                std::thread::sleep(Duration::from_millis(50 * attempt as u64));
            }
            let (status, text) = self.post_once(&body)?;
            match status {
                200..=299 => return extract_content(&text),
                500..=599 => last = Some((status, text)),
                _ => {
                    return Err(BackendError::Http {
                        status,
                        body: text.chars().take(200).collect(),
                    })
                }
            }
        }
        let (status, text) = last.expect("loop ran at least once");
        Err(BackendError::Http {
            status,
            body: text.chars().take(200).collect(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::{Read, Write};
    use std::net::TcpListener;
    use std::thread;

    /// Serves the listed responses one connection each, collecting the raw
    /// requests for assertions.
    fn serve(responses: Vec<(u16, String)>) -> (String, thread::JoinHandle<Vec<String>>) {
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let addr = listener.local_addr().unwrap();
        let handle = thread::spawn(move || {
            let mut seen = Vec::new();
            for (status, body) in responses {
                let (mut stream, _) = listener.accept().unwrap();
                seen.push(read_request(&mut stream));
                let reason = if status < 400 { "OK" } else { "NO" };
                let head = format!(
                    "HTTP/1.1 {status} {reason}\r\ncontent-type: application/json\r\ncontent-length: {}\r\nconnection: close\r\n\r\n",
                    body.len()
                );
                stream.write_all(head.as_bytes()).unwrap();
                stream.write_all(body.as_bytes()).unwrap();
            }
            seen
        });
        (format!("http://{addr}"), handle)
    }

    fn read_request(stream: &mut std::net::TcpStream) -> String {
        let mut buf = Vec::new();
        let mut chunk = [0u8; 1024];
        loop {
            let n = stream.read(&mut chunk).unwrap();
            buf.extend_from_slice(&chunk[..n]);
            if let Some(split) = find_blank_line(&buf) {
                let head = String::from_utf8_lossy(&buf[..split]).to_ascii_lowercase();
                let want = content_length(&head);
                while buf.len() < split + 4 + want {
                    let n = stream.read(&mut chunk).unwrap();
                    if n == 0 {
                        break;
                    }
                    buf.extend_from_slice(&chunk[..n]);
                }
                return String::from_utf8_lossy(&buf).to_string();
            }
            if n == 0 {
                return String::from_utf8_lossy(&buf).to_string();
            }
        }
    }

    fn find_blank_line(buf: &[u8]) -> Option<usize> {
        buf.windows(4).position(|w| w == b"\r\n\r\n")
    }

    fn content_length(head: &str) -> usize {
        head.lines()
            .find_map(|l| l.strip_prefix("content-length:"))
            .and_then(|v| v.trim().parse().ok())
            .unwrap_or(0)
    }

    fn chat_body(content: &str) -> String {
        let message = format!(
            r#"{{"role":"assistant","content":{}}}"#,
            serialize_canonical(&JsonValue::from(content))
        );
        format!(r#"{{"choices":[{{"message":{message}}}]}}"#)
    }

    fn backend(base_url: &str, retries: u32) -> HttpBackend {
        let mut config = HttpConfig::new(base_url, "test-model");
        config.api_key = Some("test-key".to_string());
        config.timeout = Duration::from_secs(5);
        config.retries_5xx = retries;
        HttpBackend::new(config).unwrap()
    }

    #[test]
    fn sends_prompt_as_user_message_with_bearer_key() {
        let (url, server) = serve(vec![(200, chat_body(r#"{"tag":"Sports"}"#))]);
        let reply = backend(&url, 0).complete("classify this").unwrap();
        assert_eq!(reply, r#"{"tag":"Sports"}"#);
        let requests = server.join().unwrap();
        assert_eq!(requests.len(), 1);
        let request = &requests[0];
        assert!(request.starts_with("POST /chat/completions HTTP/1.1"));
        assert!(request.contains("authorization: Bearer test-key"));
        assert!(request.contains(r#""model":"classify this""#) == false);
        assert!(request.contains(r#""model":"test-model""#));
        assert!(request.contains(r#"{"role":"user","content":"classify this"}"#));
    }

    #[test]
    fn retries_after_5xx_then_succeeds() {
        let (url, server) = serve(vec![
            (503, "busy".to_string()),
            (200, chat_body("ok")),
        ]);
        let reply = backend(&url, 1).complete("p").unwrap();
        assert_eq!(reply, "ok");
        assert_eq!(server.join().unwrap().len(), 2);
    }

    #[test]
    fn gives_up_after_retry_budget() {
        let (url, server) = serve(vec![(500, "a".to_string()), (500, "b".to_string())]);
        let err = backend(&url, 1).complete("p").unwrap_err();
        match err {
            BackendError::Http { status: 500, body } => assert_eq!(body, "b"),
            other => panic!("expected Http 500, got {other:?}"),
        }
        server.join().unwrap();
    }

    #[test]
    fn client_errors_do_not_retry() {
        let (url, server) = serve(vec![(401, "who are you".to_string())]);
        let err = backend(&url, 3).complete("p").unwrap_err();
        assert!(matches!(err, BackendError::Http { status: 401, .. }));
        assert_eq!(server.join().unwrap().len(), 1);
    }

    #[test]
    fn malformed_response_reported() {
        let (url, server) = serve(vec![(200, r#"{"unexpected":true}"#.to_string())]);
        let err = backend(&url, 0).complete("p").unwrap_err();
        assert!(matches!(err, BackendError::BadResponse(_)));
        server.join().unwrap();
    }
}
