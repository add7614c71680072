use crate::json::{parse_json, JsonValue};
use crate::util::sha256_hex;
use std::collections::HashMap;
use std::path::Path;
use thiserror::Error;

/// A tokenizer vocabulary: dense token ids, each mapping to the byte
/// sequence the token emits. The end-of-sequence id emits no bytes.
#[derive(Debug, Clone)]
pub struct Vocabulary {
    tokens: Vec<Vec<u8>>,
    eos_id: u32,
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum VocabError {
    #[error("vocabulary file is not valid JSON: {0}")]
    BadJson(String),
    #[error("vocabulary must be a JSON object of token -> id plus eos_token_id")]
    BadShape,
    #[error("missing or non-integer eos_token_id")]
    MissingEos,
    #[error("token {spelling:?}: {reason}")]
    BadToken { spelling: String, reason: String },
    #[error("token ids must be dense in 0..{size}: id {id} {problem}")]
    NotDense { size: usize, id: i64, problem: String },
    #[error("TSV line {line}: {reason}")]
    BadTsv { line: usize, reason: String },
}

impl Vocabulary {
    /// The bundled fallback vocabulary: one token per byte value (id = byte)
    /// plus an end-of-sequence token with id 256. Covers every byte, so any
    /// automaton can be driven with it.
    pub fn byte_level() -> Vocabulary {
        let mut tokens: Vec<Vec<u8>> = (0..=255u8).map(|b| vec![b]).collect();
        tokens.push(Vec::new());
        Vocabulary {
            tokens,
            eos_id: 256,
        }
    }

    pub fn new(tokens: Vec<Vec<u8>>, eos_id: u32) -> Result<Vocabulary, VocabError> {
        if eos_id as usize >= tokens.len() {
            return Err(VocabError::NotDense {
                size: tokens.len(),
                id: eos_id as i64,
                problem: "eos_token_id out of range".to_string(),
            });
        }
        if !tokens[eos_id as usize].is_empty() {
            return Err(VocabError::BadToken {
                spelling: format!("id {eos_id}"),
                reason: "eos token must map to the empty byte sequence".to_string(),
            });
        }
        Ok(Vocabulary { tokens, eos_id })
    }

    /// Parses the JSON vocabulary format: an object whose `eos_token_id`
    /// member declares the EOS id and whose remaining members map a token
    /// spelling to its id. Spellings use the byte-escape convention decoded
    /// by [`decode_token_spelling`].
    pub fn from_json(text: &str) -> Result<Vocabulary, VocabError> {
        let doc = parse_json(text).map_err(|e| VocabError::BadJson(e.to_string()))?;
        let obj = doc.as_object().ok_or(VocabError::BadShape)?;
        let eos_id = obj
            .get("eos_token_id")
            .and_then(JsonValue::as_number)
            .filter(|n| n.is_integer_valued())
            .and_then(|n| n.as_i64())
            .filter(|&n| n >= 0)
            .ok_or(VocabError::MissingEos)?;

        let mut by_id: HashMap<i64, Vec<u8>> = HashMap::new();
        by_id.insert(eos_id, Vec::new());
        let mut size = eos_id + 1;
        for (spelling, id) in obj.iter() {
            if spelling == "eos_token_id" {
                continue;
            }
            let id = id
                .as_number()
                .filter(|n| n.is_integer_valued())
                .and_then(|n| n.as_i64())
                .filter(|&n| n >= 0)
                .ok_or_else(|| VocabError::BadToken {
                    spelling: spelling.to_string(),
                    reason: "id must be a non-negative integer".to_string(),
                })?;
            let bytes = decode_token_spelling(spelling).map_err(|reason| VocabError::BadToken {
                spelling: spelling.to_string(),
                reason,
            })?;
            if by_id.insert(id, bytes).is_some() {
                return Err(VocabError::NotDense {
                    size: by_id.len(),
                    id,
                    problem: "appears twice".to_string(),
                });
            }
            size = size.max(id + 1);
        }
        Self::from_id_map(by_id, size, eos_id)
    }

    /// Parses the TSV vocabulary format: one `id<TAB>hex-bytes` line per
    /// token. The single line with an empty byte column is the EOS token.
    pub fn from_tsv(text: &str) -> Result<Vocabulary, VocabError> {
        let mut by_id: HashMap<i64, Vec<u8>> = HashMap::new();
        let mut eos: Option<i64> = None;
        let mut size = 0i64;
        for (lineno, line) in text.lines().enumerate() {
            let line_at = lineno + 1;
            if line.trim().is_empty() {
                continue;
            }
            let (id_field, hex_field) = line.split_once('\t').ok_or(VocabError::BadTsv {
                line: line_at,
                reason: "expected id<TAB>hex".to_string(),
            })?;
            let id: i64 = id_field.trim().parse().map_err(|_| VocabError::BadTsv {
                line: line_at,
                reason: format!("bad id {id_field:?}"),
            })?;
            let hex = hex_field.trim();
            let bytes = decode_hex(hex).map_err(|reason| VocabError::BadTsv {
                line: line_at,
                reason,
            })?;
            if bytes.is_empty() {
                if eos.replace(id).is_some() {
                    return Err(VocabError::BadTsv {
                        line: line_at,
                        reason: "second empty-byte (EOS) row".to_string(),
                    });
                }
            }
            if by_id.insert(id, bytes).is_some() {
                return Err(VocabError::NotDense {
                    size: by_id.len(),
                    id,
                    problem: "appears twice".to_string(),
                });
            }
            size = size.max(id + 1);
        }
        let eos_id = eos.ok_or(VocabError::MissingEos)?;
        Self::from_id_map(by_id, size, eos_id)
    }

    /// Loads from a path, picking the format by extension (`.tsv` vs JSON).
    pub fn load(path: &Path) -> Result<Vocabulary, VocabError> {
        let text = std::fs::read_to_string(path).map_err(|e| VocabError::BadJson(e.to_string()))?;
        if path.extension().is_some_and(|e| e == "tsv") {
            Self::from_tsv(&text)
        } else {
            Self::from_json(&text)
        }
    }

    fn from_id_map(
        by_id: HashMap<i64, Vec<u8>>,
        size: i64,
        eos_id: i64,
    ) -> Result<Vocabulary, VocabError> {
        let mut tokens = Vec::with_capacity(size as usize);
        for id in 0..size {
            match by_id.get(&id) {
                Some(bytes) => tokens.push(bytes.clone()),
                None => {
                    return Err(VocabError::NotDense {
                        size: size as usize,
                        id,
                        problem: "missing".to_string(),
                    })
                }
            }
        }
        Self::new(tokens, eos_id as u32)
    }

    pub fn size(&self) -> usize {
        self.tokens.len()
    }

    pub fn eos_id(&self) -> u32 {
        self.eos_id
    }

    /// Bytes emitted by a token; empty for EOS.
    pub fn bytes(&self, id: u32) -> &[u8] {
        &self.tokens[id as usize]
    }

    /// Stable digest of the full token table, for cache keys.
    pub fn hash_hex(&self) -> String {
        let mut dump = Vec::new();
        dump.extend_from_slice(&self.eos_id.to_le_bytes());
        for t in &self.tokens {
            dump.extend_from_slice(&(t.len() as u32).to_le_bytes());
            dump.extend_from_slice(t);
        }
        sha256_hex(&dump)
    }

    /// Longest-match tokenization (ties broken by lowest id). Returns
    /// `None` if some position cannot be covered by any token.
    pub fn greedy_tokenize(&self, bytes: &[u8]) -> Option<Vec<u32>> {
        let mut out = Vec::new();
        let mut at = 0;
        while at < bytes.len() {
            let mut best: Option<(usize, u32)> = None;
            for (id, tok) in self.tokens.iter().enumerate() {
                if !tok.is_empty() && bytes[at..].starts_with(tok) {
                    let better = match best {
                        None => true,
                        Some((len, _)) => tok.len() > len,
                    };
                    if better {
                        best = Some((tok.len(), id as u32));
                    }
                }
            }
            let (len, id) = best?;
            out.push(id);
            at += len;
        }
        Some(out)
    }
}

/// Decodes a token spelling into bytes. The convention: `\xHH` (backslash,
/// `x`, two hex digits) denotes the byte 0xHH; every other character
/// contributes its UTF-8 bytes. A literal backslash is spelled `\x5c`.
pub fn decode_token_spelling(spelling: &str) -> Result<Vec<u8>, String> {
    let mut out = Vec::new();
    let mut chars = spelling.chars().peekable();
    while let Some(c) = chars.next() {
        if c != '\\' {
            let mut buf = [0u8; 4];
            out.extend_from_slice(c.encode_utf8(&mut buf).as_bytes());
            continue;
        }
        match chars.next() {
            Some('x') => {
                let hi = chars.next().and_then(|c| c.to_digit(16));
                let lo = chars.next().and_then(|c| c.to_digit(16));
                match (hi, lo) {
                    (Some(hi), Some(lo)) => out.push((hi * 16 + lo) as u8),
                    _ => return Err("\\x must be followed by two hex digits".to_string()),
                }
            }
            _ => {
                return Err(
                    "backslash must start a \\xHH escape (spell a literal one as \\x5c)"
                        .to_string(),
                )
            }
        }
    }
    Ok(out)
}

fn decode_hex(hex: &str) -> Result<Vec<u8>, String> {
    if hex.len() % 2 != 0 {
        return Err("odd number of hex digits".to_string());
    }
    let digits: Option<Vec<u32>> = hex.chars().map(|c| c.to_digit(16)).collect();
    let digits = digits.ok_or_else(|| format!("non-hex characters in {hex:?}"))?;
    Ok(digits.chunks(2).map(|p| (p[0] * 16 + p[1]) as u8).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn byte_level_covers_everything() {
        let v = Vocabulary::byte_level();
        assert_eq!(v.size(), 257);
        assert_eq!(v.eos_id(), 256);
        assert_eq!(v.bytes(b'a' as u32), b"a");
        assert!(v.bytes(256).is_empty());
        let toks = v.greedy_tokenize(b"hi!").unwrap();
        assert_eq!(toks, vec![b'h' as u32, b'i' as u32, b'!' as u32]);
    }

    #[test]
    fn json_format_round_trip() {
        let v = Vocabulary::from_json(
            r#"{"eos_token_id": 3, "tr": 0, "ue": 1, "false": 2, "\\x00\\xff": 4}"#,
        )
        .unwrap();
        assert_eq!(v.size(), 5);
        assert_eq!(v.eos_id(), 3);
        assert_eq!(v.bytes(0), b"tr");
        assert_eq!(v.bytes(2), b"false");
        assert_eq!(v.bytes(3), b"");
        assert_eq!(v.bytes(4), &[0x00, 0xff]);
        assert_eq!(v.greedy_tokenize(b"true").unwrap(), vec![0, 1]);
    }

    #[test]
    fn greedy_prefers_longest() {
        let v = Vocabulary::from_json(
            r#"{"eos_token_id": 0, "a": 1, "ab": 2, "b": 3}"#,
        )
        .unwrap();
        assert_eq!(v.greedy_tokenize(b"ab").unwrap(), vec![2]);
        assert_eq!(v.greedy_tokenize(b"aab").unwrap(), vec![1, 2]);
        assert_eq!(v.greedy_tokenize(b"abc"), None);
    }

    #[test]
    fn dense_ids_required() {
        let err = Vocabulary::from_json(r#"{"eos_token_id": 0, "a": 2}"#).unwrap_err();
        assert!(matches!(err, VocabError::NotDense { id: 1, .. }));
        let err = Vocabulary::from_json(r#"{"a": 0}"#).unwrap_err();
        assert_eq!(err, VocabError::MissingEos);
        let err = Vocabulary::from_json(r#"{"eos_token_id": 0, "a": 0}"#).unwrap_err();
        assert!(matches!(err, VocabError::NotDense { id: 0, .. }));
    }

    #[test]
    fn tsv_format() {
        let v = Vocabulary::from_tsv("0\t74720a\n1\t7565\n2\t\n").unwrap();
        assert_eq!(v.bytes(0), &[0x74, 0x72, 0x0a]);
        assert_eq!(v.bytes(1), b"ue");
        assert_eq!(v.eos_id(), 2);
        assert!(matches!(
            Vocabulary::from_tsv("0\tzz\n1\t\n"),
            Err(VocabError::BadTsv { line: 1, .. })
        ));
        assert!(matches!(
            Vocabulary::from_tsv("0\t\n1\t\n"),
            Err(VocabError::BadTsv { line: 2, .. })
        ));
    }

    #[test]
    fn spelling_escapes() {
        assert_eq!(decode_token_spelling("abc").unwrap(), b"abc");
        assert_eq!(decode_token_spelling("\\x00a\\xFF").unwrap(), vec![0, b'a', 0xff]);
        assert_eq!(decode_token_spelling("\\x5c").unwrap(), b"\\");
        assert!(decode_token_spelling("\\n").is_err());
        assert!(decode_token_spelling("\\x5").is_err());
        // non-ASCII characters contribute their UTF-8 bytes
        assert_eq!(decode_token_spelling("é").unwrap(), vec![0xc3, 0xa9]);
    }

    #[test]
    fn hash_changes_with_content() {
        let a = Vocabulary::byte_level();
        let b = Vocabulary::from_json(r#"{"eos_token_id": 1, "a": 0}"#).unwrap();
        assert_ne!(a.hash_hex(), b.hash_hex());
        assert_eq!(a.hash_hex(), Vocabulary::byte_level().hash_hex());
    }
}
