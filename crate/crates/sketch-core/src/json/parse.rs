use super::number::{is_number_literal, JsonNumber};
use super::value::{JsonObject, JsonValue};
use thiserror::Error;

/// Parse failure with the byte offset where it was detected.
#[derive(Debug, Clone, Error, PartialEq)]
#[error("{kind} at byte {offset}")]
pub struct ParseError {
    pub offset: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ParseErrorKind {
    #[error("unexpected end of input")]
    UnexpectedEof,
    #[error("unexpected byte 0x{0:02x}")]
    UnexpectedByte(u8),
    #[error("duplicate object member {0:?}")]
    DuplicateKey(String),
    #[error("trailing data after document")]
    TrailingData,
    #[error("malformed number literal")]
    BadNumber,
    #[error("invalid escape sequence")]
    BadEscape,
    #[error("invalid \\u escape")]
    BadUnicodeEscape,
    #[error("unpaired surrogate in \\u escape")]
    LoneSurrogate,
    #[error("unescaped control character in string")]
    ControlInString,
}

/// Parses a complete JSON document. Leading and trailing whitespace is
/// tolerated; anything else after the value is an error.
pub fn parse_json(text: &str) -> Result<JsonValue, ParseError> {
    let mut p = Parser::new(text);
    p.skip_ws();
    let value = p.parse_value()?;
    p.skip_ws();
    if p.pos < p.bytes.len() {
        return Err(p.err(ParseErrorKind::TrailingData));
    }
    Ok(value)
}

/// Parses one JSON value starting at byte `start`, returning the value and
/// the offset one past its end. Used for extracting values embedded in prose.
pub fn parse_value_prefix(text: &str, start: usize) -> Result<(JsonValue, usize), ParseError> {
    let mut p = Parser::new(text);
    p.pos = start;
    p.skip_ws();
    let value = p.parse_value()?;
    Ok((value, p.pos))
}

/// Finds the first balanced JSON object or array embedded in `text`.
/// A scan for `{` / `[` start bytes; the first position that parses wins.
pub fn find_embedded_value(text: &str) -> Option<JsonValue> {
    for (i, b) in text.bytes().enumerate() {
        if b == b'{' || b == b'[' {
            if let Ok((value, _)) = parse_value_prefix(text, i) {
                return Some(value);
            }
        }
    }
    None
}

struct Parser<'a> {
    text: &'a str,
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Parser<'a> {
        Parser {
            text,
            bytes: text.as_bytes(),
            pos: 0,
        }
    }

    fn err(&self, kind: ParseErrorKind) -> ParseError {
        ParseError {
            offset: self.pos,
            kind,
        }
    }

    fn err_at(&self, offset: usize, kind: ParseErrorKind) -> ParseError {
        ParseError { offset, kind }
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(b' ' | b'\t' | b'\n' | b'\r')) {
            self.pos += 1;
        }
    }

    fn expect(&mut self, b: u8) -> Result<(), ParseError> {
        match self.peek() {
            Some(got) if got == b => {
                self.pos += 1;
                Ok(())
            }
            Some(got) => Err(self.err(ParseErrorKind::UnexpectedByte(got))),
            None => Err(self.err(ParseErrorKind::UnexpectedEof)),
        }
    }

    fn parse_value(&mut self) -> Result<JsonValue, ParseError> {
        match self.peek() {
            None => Err(self.err(ParseErrorKind::UnexpectedEof)),
            Some(b'{') => self.parse_object(),
            Some(b'[') => self.parse_array(),
            Some(b'"') => Ok(JsonValue::String(self.parse_string()?)),
            Some(b't') => self.parse_keyword("true", JsonValue::Bool(true)),
            Some(b'f') => self.parse_keyword("false", JsonValue::Bool(false)),
            Some(b'n') => self.parse_keyword("null", JsonValue::Null),
            Some(b'-' | b'0'..=b'9') => self.parse_number(),
            Some(b) => Err(self.err(ParseErrorKind::UnexpectedByte(b))),
        }
    }

    fn parse_keyword(&mut self, word: &str, value: JsonValue) -> Result<JsonValue, ParseError> {
        if self.bytes[self.pos..].starts_with(word.as_bytes()) {
            self.pos += word.len();
            Ok(value)
        } else {
            Err(self.err(ParseErrorKind::UnexpectedByte(self.bytes[self.pos])))
        }
    }

    fn parse_number(&mut self) -> Result<JsonValue, ParseError> {
        let start = self.pos;
        if self.peek() == Some(b'-') {
            self.pos += 1;
        }
        while matches!(
            self.peek(),
            Some(b'0'..=b'9' | b'.' | b'e' | b'E' | b'+' | b'-')
        ) {
            self.pos += 1;
        }
        let literal = &self.text[start..self.pos];
        if !is_number_literal(literal.as_bytes()) {
            return Err(self.err_at(start, ParseErrorKind::BadNumber));
        }
        Ok(JsonValue::Number(JsonNumber::from_literal(literal).unwrap()))
    }

    fn parse_string(&mut self) -> Result<String, ParseError> {
        self.expect(b'"')?;
        let mut out = String::new();
        loop {
            let b = self.peek().ok_or_else(|| self.err(ParseErrorKind::UnexpectedEof))?;
            match b {
                b'"' => {
                    self.pos += 1;
                    return Ok(out);
                }
                b'\\' => {
                    self.pos += 1;
                    self.parse_escape(&mut out)?;
                }
                0x00..=0x1f => return Err(self.err(ParseErrorKind::ControlInString)),
                _ => {
                    // copy one UTF-8 scalar; input is a str so boundaries are sound
                    let ch_len = utf8_len(b);
                    out.push_str(&self.text[self.pos..self.pos + ch_len]);
                    self.pos += ch_len;
                }
            }
        }
    }

    fn parse_escape(&mut self, out: &mut String) -> Result<(), ParseError> {
        let b = self.peek().ok_or_else(|| self.err(ParseErrorKind::UnexpectedEof))?;
        self.pos += 1;
        match b {
            b'"' => out.push('"'),
            b'\\' => out.push('\\'),
            b'/' => out.push('/'),
            b'b' => out.push('\u{0008}'),
            b'f' => out.push('\u{000c}'),
            b'n' => out.push('\n'),
            b'r' => out.push('\r'),
            b't' => out.push('\t'),
            b'u' => {
                let unit = self.parse_hex4()?;
                if (0xd800..0xdc00).contains(&unit) {
                    // high surrogate: a \uXXXX low surrogate must follow
                    let at = self.pos;
                    if self.peek() == Some(b'\\') {
                        self.pos += 1;
                        if self.peek() == Some(b'u') {
                            self.pos += 1;
                            let low = self.parse_hex4()?;
                            if (0xdc00..0xe000).contains(&low) {
                                let c = 0x10000
                                    + ((unit as u32 - 0xd800) << 10)
                                    + (low as u32 - 0xdc00);
                                out.push(char::from_u32(c).unwrap());
                                return Ok(());
                            }
                        }
                    }
                    return Err(self.err_at(at, ParseErrorKind::LoneSurrogate));
                }
                if (0xdc00..0xe000).contains(&unit) {
                    return Err(self.err(ParseErrorKind::LoneSurrogate));
                }
                out.push(char::from_u32(unit as u32).unwrap());
            }
            _ => return Err(self.err_at(self.pos - 1, ParseErrorKind::BadEscape)),
        }
        Ok(())
    }

    fn parse_hex4(&mut self) -> Result<u16, ParseError> {
        let mut v: u16 = 0;
        for _ in 0..4 {
            let b = self.peek().ok_or_else(|| self.err(ParseErrorKind::UnexpectedEof))?;
            let d = match b {
                b'0'..=b'9' => b - b'0',
                b'a'..=b'f' => b - b'a' + 10,
                b'A'..=b'F' => b - b'A' + 10,
                _ => return Err(self.err(ParseErrorKind::BadUnicodeEscape)),
            };
            v = v << 4 | d as u16;
            self.pos += 1;
        }
        Ok(v)
    }

    fn parse_array(&mut self) -> Result<JsonValue, ParseError> {
        self.expect(b'[')?;
        let mut items = Vec::new();
        self.skip_ws();
        if self.peek() == Some(b']') {
            self.pos += 1;
            return Ok(JsonValue::Array(items));
        }
        loop {
            items.push(self.parse_value()?);
            self.skip_ws();
            match self.peek() {
                Some(b',') => {
                    self.pos += 1;
                    self.skip_ws();
                }
                Some(b']') => {
                    self.pos += 1;
                    return Ok(JsonValue::Array(items));
                }
                Some(b) => return Err(self.err(ParseErrorKind::UnexpectedByte(b))),
                None => return Err(self.err(ParseErrorKind::UnexpectedEof)),
            }
        }
    }

    fn parse_object(&mut self) -> Result<JsonValue, ParseError> {
        self.expect(b'{')?;
        let mut obj = JsonObject::new();
        self.skip_ws();
        if self.peek() == Some(b'}') {
            self.pos += 1;
            return Ok(JsonValue::Object(obj));
        }
        loop {
            self.skip_ws();
            let key_at = self.pos;
            let key = self.parse_string()?;
            if obj.contains(&key) {
                return Err(self.err_at(key_at, ParseErrorKind::DuplicateKey(key)));
            }
            self.skip_ws();
            self.expect(b':')?;
            self.skip_ws();
            let value = self.parse_value()?;
            obj.insert(key, value);
            self.skip_ws();
            match self.peek() {
                Some(b',') => {
                    self.pos += 1;
                }
                Some(b'}') => {
                    self.pos += 1;
                    return Ok(JsonValue::Object(obj));
                }
                Some(b) => return Err(self.err(ParseErrorKind::UnexpectedByte(b))),
                None => return Err(self.err(ParseErrorKind::UnexpectedEof)),
            }
        }
    }
}

fn utf8_len(first: u8) -> usize {
    match first {
        0x00..=0x7f => 1,
        0xc0..=0xdf => 2,
        0xe0..=0xef => 3,
        _ => 4,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_entity_array() {
        let v = parse_json(r#"[{"name": "Kamala Harris", "entity_type": "person"}]"#).unwrap();
        let items = v.as_array().unwrap();
        assert_eq!(items.len(), 1);
        assert_eq!(
            items[0].get("name").and_then(JsonValue::as_str),
            Some("Kamala Harris")
        );
        assert_eq!(
            items[0].get("entity_type").and_then(JsonValue::as_str),
            Some("person")
        );
    }

    #[test]
    fn parses_null_document() {
        assert_eq!(parse_json("null").unwrap(), JsonValue::Null);
        assert_eq!(parse_json("  null\n").unwrap(), JsonValue::Null);
    }

    #[test]
    fn rejects_trailing_comma() {
        let err = parse_json(r#"{"a":1,} "#).unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::UnexpectedByte(b'}'));
        assert_eq!(err.offset, 7);
    }

    #[test]
    fn rejects_duplicate_keys() {
        let err = parse_json(r#"{"a":1,"a":2}"#).unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::DuplicateKey(ref k) if k == "a"));
        assert_eq!(err.offset, 7);
    }

    #[test]
    fn rejects_trailing_data() {
        let err = parse_json("1 2").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::TrailingData);
    }

    #[test]
    fn string_escapes() {
        let v = parse_json(r#""a\"b\\c\nAé😀""#).unwrap();
        assert_eq!(v.as_str(), Some("a\"b\\c\nAé😀"));
        assert!(matches!(
            parse_json(r#""\ud800""#).unwrap_err().kind,
            ParseErrorKind::LoneSurrogate
        ));
        assert!(matches!(
            parse_json("\"a\nb\"").unwrap_err().kind,
            ParseErrorKind::ControlInString
        ));
        assert!(matches!(
            parse_json(r#""\x41""#).unwrap_err().kind,
            ParseErrorKind::BadEscape
        ));
    }

    #[test]
    fn number_literals_survive() {
        let v = parse_json("[0, -1, 2.50, 1e9, 123456789012345678901234567890]").unwrap();
        let raw: Vec<&str> = v
            .as_array()
            .unwrap()
            .iter()
            .map(|n| n.as_number().unwrap().as_str())
            .collect();
        assert_eq!(raw, vec!["0", "-1", "2.50", "1e9", "123456789012345678901234567890"]);
        assert!(matches!(
            parse_json("01").unwrap_err().kind,
            ParseErrorKind::BadNumber | ParseErrorKind::TrailingData
        ));
    }

    #[test]
    fn embedded_extraction() {
        let v = find_embedded_value(r#"Sure! {"tag":"Sports"} there you go"#).unwrap();
        assert_eq!(v.get("tag").and_then(JsonValue::as_str), Some("Sports"));
        assert!(find_embedded_value("no json here {oops").is_none());
        let arr = find_embedded_value("answer: [1,2] trailing").unwrap();
        assert_eq!(arr.as_array().unwrap().len(), 2);
    }

    #[test]
    fn object_member_order_kept() {
        let v = parse_json(r#"{"z":1,"a":2,"m":3}"#).unwrap();
        let keys: Vec<&str> = v.as_object().unwrap().keys().collect();
        assert_eq!(keys, vec!["z", "a", "m"]);
    }
}
