use std::fmt;

/// A JSON number kept as its decimal literal.
///
/// The literal is preserved verbatim, so serialization reproduces the input
/// spelling exactly and no magnitude limit applies. Equality compares the
/// decimal value, not the spelling: `1e2 == 100`.
#[derive(Debug, Clone)]
pub struct JsonNumber {
    raw: String,
}

/// Exponents are clamped to this magnitude before value comparison. Two
/// finite literals that differ only beyond it compare equal, which is
/// acceptable for any digit string this crate will ever see.
const EXP_CLAMP: i128 = 1 << 50;

impl JsonNumber {
    /// Parses a decimal literal (`-?(0|[1-9][0-9]*)(\.[0-9]+)?([eE][+-]?[0-9]+)?`).
    pub fn from_literal(s: &str) -> Option<JsonNumber> {
        if is_number_literal(s.as_bytes()) {
            Some(JsonNumber { raw: s.to_string() })
        } else {
            None
        }
    }

    pub fn from_i64(v: i64) -> JsonNumber {
        JsonNumber { raw: v.to_string() }
    }

    /// Finite floats only. The spelling is the shortest round-tripping
    /// decimal, with `.0` appended when integral so the literal stays
    /// distinguishable from an integer literal.
    pub fn from_f64(v: f64) -> Option<JsonNumber> {
        if !v.is_finite() {
            return None;
        }
        let mut raw = format!("{v}");
        if !raw.contains('.') && !raw.contains('e') && !raw.contains('E') {
            raw.push_str(".0");
        }
        debug_assert!(is_number_literal(raw.as_bytes()), "bad float spelling {raw}");
        Some(JsonNumber { raw })
    }

    pub fn as_str(&self) -> &str {
        &self.raw
    }

    /// True when the fractional part is zero, e.g. `7`, `7.0`, `70e-1`.
    pub fn is_integer_valued(&self) -> bool {
        let (_, digits, exp) = self.normalized();
        digits.is_empty() || exp >= 0
    }

    pub fn as_i64(&self) -> Option<i64> {
        let (sign, digits, exp) = self.normalized();
        if !digits.is_empty() && exp < 0 {
            return None;
        }
        let mut acc: i64 = 0;
        for b in digits.bytes() {
            acc = acc.checked_mul(10)?.checked_add((b - b'0') as i64)?;
        }
        for _ in 0..exp.min(40) {
            acc = acc.checked_mul(10)?;
        }
        if sign < 0 {
            acc = acc.checked_neg()?;
        }
        Some(acc)
    }

    /// Nearest double; approximate for wide literals. Only used for display
    /// and metric math, never for validation or serialization.
    pub fn as_f64(&self) -> f64 {
        self.raw.parse::<f64>().unwrap_or(0.0)
    }

    /// Canonical (sign, significant digits, base-10 exponent) triple.
    /// Zero is (0, "", 0) regardless of sign or spelling.
    fn normalized(&self) -> (i8, String, i128) {
        let bytes = self.raw.as_bytes();
        let mut i = 0;
        let mut sign: i8 = 1;
        if bytes[0] == b'-' {
            sign = -1;
            i = 1;
        }
        let int_start = i;
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            i += 1;
        }
        let int_part = &self.raw[int_start..i];
        let mut frac_part = "";
        if i < bytes.len() && bytes[i] == b'.' {
            let fs = i + 1;
            i += 1;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            frac_part = &self.raw[fs..i];
        }
        let mut exp: i128 = 0;
        if i < bytes.len() {
            // must be e/E per the literal grammar
            i += 1;
            let mut esign: i128 = 1;
            if bytes[i] == b'+' {
                i += 1;
            } else if bytes[i] == b'-' {
                esign = -1;
                i += 1;
            }
            for &b in &bytes[i..] {
                exp = (exp * 10 + (b - b'0') as i128).min(EXP_CLAMP);
            }
            exp *= esign;
        }
        exp -= frac_part.len() as i128;

        let mut digits = String::with_capacity(int_part.len() + frac_part.len());
        digits.push_str(int_part);
        digits.push_str(frac_part);
        let lead = digits.bytes().take_while(|&b| b == b'0').count();
        if lead == digits.len() {
            return (0, String::new(), 0);
        }
        let trail = digits.bytes().rev().take_while(|&b| b == b'0').count();
        exp += trail as i128;
        let norm = digits[lead..digits.len() - trail].to_string();
        (sign, norm, exp)
    }
}

impl PartialEq for JsonNumber {
    fn eq(&self, other: &Self) -> bool {
        self.normalized() == other.normalized()
    }
}

impl Eq for JsonNumber {}

impl fmt::Display for JsonNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.raw)
    }
}

/// Byte-level check against the JSON number grammar.
pub(crate) fn is_number_literal(bytes: &[u8]) -> bool {
    let mut i = 0;
    if i < bytes.len() && bytes[i] == b'-' {
        i += 1;
    }
    match bytes.get(i) {
        Some(b'0') => i += 1,
        Some(b'1'..=b'9') => {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
        }
        _ => return false,
    }
    if bytes.get(i) == Some(&b'.') {
        i += 1;
        let ds = i;
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            i += 1;
        }
        if i == ds {
            return false;
        }
    }
    if matches!(bytes.get(i), Some(b'e') | Some(b'E')) {
        i += 1;
        if matches!(bytes.get(i), Some(b'+') | Some(b'-')) {
            i += 1;
        }
        let ds = i;
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            i += 1;
        }
        if i == ds {
            return false;
        }
    }
    i == bytes.len()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literal_grammar() {
        for ok in ["0", "-0", "7", "-13", "1.5", "0.001", "1e9", "2.5E-3", "1e+2"] {
            assert!(JsonNumber::from_literal(ok).is_some(), "{ok}");
        }
        for bad in ["", "01", "+1", ".5", "1.", "1e", "1e+", "--1", "1 ", "NaN"] {
            assert!(JsonNumber::from_literal(bad).is_none(), "{bad}");
        }
    }

    #[test]
    fn value_equality_ignores_spelling() {
        let a = JsonNumber::from_literal("100").unwrap();
        let b = JsonNumber::from_literal("1e2").unwrap();
        let c = JsonNumber::from_literal("100.00").unwrap();
        assert_eq!(a, b);
        assert_eq!(a, c);
        assert_ne!(a, JsonNumber::from_literal("100.5").unwrap());
        assert_eq!(
            JsonNumber::from_literal("0").unwrap(),
            JsonNumber::from_literal("-0.0e5").unwrap()
        );
    }

    #[test]
    fn integer_valuedness() {
        assert!(JsonNumber::from_literal("7").unwrap().is_integer_valued());
        assert!(JsonNumber::from_literal("7.0").unwrap().is_integer_valued());
        assert!(JsonNumber::from_literal("70e-1").unwrap().is_integer_valued());
        assert!(!JsonNumber::from_literal("7.5").unwrap().is_integer_valued());
        assert!(!JsonNumber::from_literal("1e-3").unwrap().is_integer_valued());
    }

    #[test]
    fn i64_round_trip() {
        for v in [0i64, 1, -1, 42, i64::MAX, i64::MIN + 1] {
            assert_eq!(JsonNumber::from_i64(v).as_i64(), Some(v));
        }
        assert_eq!(JsonNumber::from_literal("1.5").unwrap().as_i64(), None);
        assert_eq!(JsonNumber::from_literal("2e3").unwrap().as_i64(), Some(2000));
    }

    #[test]
    fn float_spelling_keeps_a_dot() {
        assert_eq!(JsonNumber::from_f64(1.0).unwrap().as_str(), "1.0");
        assert_eq!(JsonNumber::from_f64(-2.5).unwrap().as_str(), "-2.5");
        assert!(JsonNumber::from_f64(f64::INFINITY).is_none());
    }

    #[test]
    fn huge_literals_do_not_overflow() {
        let n = JsonNumber::from_literal("1e999999999999999999999").unwrap();
        assert!(n.is_integer_valued());
        let m = JsonNumber::from_literal("123456789012345678901234567890").unwrap();
        assert_eq!(m.as_i64(), None);
        assert_eq!(m, m.clone());
    }
}
