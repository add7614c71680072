//! Cross-checks the regex→DFA pipeline against an independent matcher and
//! against the validator, so a bug in the subset construction cannot hide
//! behind an identical bug in the thing checking it.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use sketch_core::compiler::{compile_regex, schema_to_regex, RegexAst};
use sketch_core::json::{parse_json, JsonValue};
use sketch_core::schema::{parse_schema, validate, SchemaDoc};
use std::collections::BTreeSet;

/// Set-of-positions regex matcher: no NFA, no DFA, no byte classes. Slow and
/// obviously correct, which is the point.
fn oracle_matches(ast: &RegexAst, text: &[u8]) -> bool {
    let starts: BTreeSet<usize> = [0usize].into();
    advance(ast, text, &starts).contains(&text.len())
}

fn advance(ast: &RegexAst, text: &[u8], starts: &BTreeSet<usize>) -> BTreeSet<usize> {
    match ast {
        RegexAst::Empty => starts.clone(),
        RegexAst::Literal(lit) => starts
            .iter()
            .filter(|&&p| text[p..].starts_with(lit))
            .map(|&p| p + lit.len())
            .collect(),
        RegexAst::Class(set) => starts
            .iter()
            .filter(|&&p| p < text.len() && set.contains(text[p]))
            .map(|&p| p + 1)
            .collect(),
        RegexAst::Concat(parts) => parts
            .iter()
            .fold(starts.clone(), |acc, part| advance(part, text, &acc)),
        RegexAst::Alt(parts) => parts
            .iter()
            .flat_map(|part| advance(part, text, starts))
            .collect(),
        RegexAst::Repeat { node, min, max } => {
            let mut acc = starts.clone();
            for _ in 0..*min {
                acc = advance(node, text, &acc);
                if acc.is_empty() {
                    return acc;
                }
            }
            let mut result = acc.clone();
            let mut reps = *min;
            loop {
                if max.is_some_and(|m| reps >= m) {
                    break;
                }
                let next = advance(node, text, &acc);
                // fixpoint guard: no new positions means further repetitions
                // cannot add anything
                if next.is_subset(&result) {
                    break;
                }
                result.extend(next.iter().copied());
                acc = next;
                reps += 1;
            }
            result
        }
    }
}

fn schema_from(text: &str) -> SchemaDoc {
    parse_schema(&parse_json(text).unwrap()).unwrap()
}

const TOPIC_FORMAT: &str = r#"{
  "type": "object",
  "properties": {
    "tag": {"type": "string", "enum": ["World", "Sports", "Business", "Sci/Tech"]}
  },
  "required": ["tag"]
}"#;

const NER_FORMAT: &str = r#"{
  "type": "array",
  "items": {
    "type": "object",
    "properties": {
      "name": {"type": "string"},
      "entity_type": {"type": "string", "enum": ["person", "organization", "location", "others"]}
    },
    "required": ["name", "entity_type"]
  }
}"#;

#[test]
fn topic_language_is_exactly_four_strings() {
    let dfa = compile_regex(&schema_to_regex(&schema_from(TOPIC_FORMAT)).unwrap()).unwrap();
    let got: BTreeSet<String> = dfa
        .accepted_strings(20, 100)
        .into_iter()
        .map(|b| String::from_utf8(b).unwrap())
        .collect();
    let want: BTreeSet<String> = [
        r#"{"tag":"World"}"#,
        r#"{"tag":"Sports"}"#,
        r#"{"tag":"Business"}"#,
        r#"{"tag":"Sci/Tech"}"#,
    ]
    .into_iter()
    .map(String::from)
    .collect();
    assert_eq!(got, want);
}

#[test]
fn ner_format_accepts_empty_and_example_output() {
    let dfa = compile_regex(&schema_to_regex(&schema_from(NER_FORMAT)).unwrap()).unwrap();
    assert!(dfa.accepts(b"[]"));
    assert!(dfa.accepts(br#"[{"name":"Kamala Harris","entity_type":"person"}]"#));
    assert!(!dfa.accepts(br#"[{"name":"Kamala Harris"}]"#));
    assert!(!dfa.accepts(br#"[{"entity_type":"person","name":"x"}]"#));
    assert!(!dfa.accepts(b"[] "));
}

#[test]
fn fuzzed_accepted_strings_parse_and_validate() {
    let schema = schema_from(NER_FORMAT);
    let dfa = compile_regex(&schema_to_regex(&schema).unwrap()).unwrap();
    let mut rng = ChaCha12Rng::seed_from_u64(0x5eed);
    for i in 0..1000 {
        let target = rng.random_range(2..120);
        let bytes = dfa.sample_accepted(&mut rng, target);
        let text = String::from_utf8(bytes.clone())
            .unwrap_or_else(|_| panic!("sample {i} is not UTF-8: {bytes:?}"));
        let value = parse_json(&text).unwrap_or_else(|e| panic!("sample {i} {text:?}: {e}"));
        let report = validate(&value, &schema).unwrap();
        assert!(report.valid(), "sample {i} {text:?}: {report}");
    }
}

#[test]
fn dfa_agrees_with_oracle_on_ten_thousand_samples() {
    let ast = schema_to_regex(&schema_from(NER_FORMAT)).unwrap();
    let dfa = compile_regex(&ast).unwrap();
    let mut rng = ChaCha12Rng::seed_from_u64(0xfeed);
    let mut positives = 0usize;
    for i in 0..10_000 {
        let target = rng.random_range(2..60);
        let mut bytes = dfa.sample_accepted(&mut rng, target);
        // half the samples get mutated: flips, inserts, deletes, truncations
        if i % 2 == 1 {
            match rng.random_range(0..4) {
                0 if !bytes.is_empty() => {
                    let at = rng.random_range(0..bytes.len());
                    bytes[at] = rng.random();
                }
                1 => {
                    let at = rng.random_range(0..=bytes.len());
                    bytes.insert(at, rng.random());
                }
                2 if !bytes.is_empty() => {
                    let at = rng.random_range(0..bytes.len());
                    bytes.remove(at);
                }
                _ => {
                    bytes.truncate(rng.random_range(0..=bytes.len()));
                }
            }
        }
        let expect = oracle_matches(&ast, &bytes);
        positives += expect as usize;
        assert_eq!(
            dfa.accepts(&bytes),
            expect,
            "sample {i}: {:?}",
            String::from_utf8_lossy(&bytes)
        );
    }
    // the sample mix must actually exercise both answers
    assert!(positives > 2000, "only {positives} positive samples");
    assert!(positives < 9000, "only {} negative samples", 10_000 - positives);
}

#[test]
fn number_language_matches_the_parser_exactly() {
    let schema = schema_from(r#"{"type":"number"}"#);
    let dfa = compile_regex(&schema_to_regex(&schema).unwrap()).unwrap();
    let mut rng = ChaCha12Rng::seed_from_u64(0xabc);
    let alphabet = b"0123456789.eE+-x ";
    for _ in 0..20_000 {
        let len = rng.random_range(1..10);
        let bytes: Vec<u8> = (0..len)
            .map(|_| alphabet[rng.random_range(0..alphabet.len())])
            .collect();
        let text = String::from_utf8(bytes.clone()).unwrap();
        // the number language is exactly the JSON number grammar: a string
        // is accepted iff it parses as a lone JSON number (modulo the edge
        // whitespace the parser tolerates but the automaton never emits)
        let parses = matches!(parse_json(&text), Ok(JsonValue::Number(_)))
            && text.trim() == text;
        assert_eq!(dfa.accepts(&bytes), parses, "on {text:?}");
    }
}

#[test]
fn integer_language_is_sound_for_validation() {
    let schema = schema_from(r#"{"type":"integer"}"#);
    let dfa = compile_regex(&schema_to_regex(&schema).unwrap()).unwrap();
    assert!(dfa.accepts(b"0"));
    assert!(dfa.accepts(b"-17"));
    assert!(dfa.accepts(b"123456789012345678901234567890"));
    // spellings that denote integers but are not plain are not emitted...
    assert!(!dfa.accepts(b"2.0"));
    assert!(!dfa.accepts(b"1e3"));
    // ...which is what keeps fractional spellings like 1e-2 out
    assert!(!dfa.accepts(b"1e-2"));
    assert!(!dfa.accepts(b"01"));
    let mut rng = ChaCha12Rng::seed_from_u64(9);
    for _ in 0..500 {
        let s = dfa.sample_accepted(&mut rng, 8);
        let v = parse_json(std::str::from_utf8(&s).unwrap()).unwrap();
        assert!(validate(&v, &schema).unwrap().valid(), "{s:?}");
    }
}

#[test]
fn string_language_samples_are_valid_json_strings() {
    let schema = schema_from(r#"{"type":"string"}"#);
    let dfa = compile_regex(&schema_to_regex(&schema).unwrap()).unwrap();
    let mut rng = ChaCha12Rng::seed_from_u64(77);
    for i in 0..2000 {
        let target = rng.random_range(2..40);
        let bytes = dfa.sample_accepted(&mut rng, target);
        let text = String::from_utf8(bytes.clone())
            .unwrap_or_else(|_| panic!("sample {i} not UTF-8: {bytes:?}"));
        match parse_json(&text) {
            Ok(JsonValue::String(_)) => {}
            other => panic!("sample {i} {text:?} parsed to {other:?}"),
        }
    }
}

#[test]
fn object_optional_members_chain_correctly() {
    // b required, a and c optional: the four legal emissions and nothing else
    let schema = schema_from(
        r#"{"type":"object","properties":{
          "a":{"type":"boolean"},"b":{"type":"null"},"c":{"type":"boolean"}},
          "required":["b"]}"#,
    );
    let ast = schema_to_regex(&schema).unwrap();
    let dfa = compile_regex(&ast).unwrap();
    for ok in [
        r#"{"b":null}"#,
        r#"{"a":true,"b":null}"#,
        r#"{"b":null,"c":false}"#,
        r#"{"a":false,"b":null,"c":true}"#,
    ] {
        assert!(dfa.accepts(ok.as_bytes()), "{ok}");
        assert!(oracle_matches(&ast, ok.as_bytes()), "oracle {ok}");
    }
    for bad in [
        r#"{}"#,
        r#"{"a":true}"#,
        r#"{"c":true,"b":null}"#,
        r#"{"a":true,"c":false}"#,
        r#"{"b":null,}"#,
    ] {
        assert!(!dfa.accepts(bad.as_bytes()), "{bad}");
        assert!(!oracle_matches(&ast, bad.as_bytes()), "oracle {bad}");
    }
    // all-optional objects admit the empty object
    let schema = schema_from(
        r#"{"type":"object","properties":{"a":{"type":"boolean"},"c":{"type":"null"}}}"#,
    );
    let dfa = compile_regex(&schema_to_regex(&schema).unwrap()).unwrap();
    let got: BTreeSet<Vec<u8>> = dfa.accepted_strings(30, 1000).into_iter().collect();
    let want: BTreeSet<Vec<u8>> = [
        "{}",
        r#"{"a":true}"#,
        r#"{"a":false}"#,
        r#"{"c":null}"#,
        r#"{"a":true,"c":null}"#,
        r#"{"a":false,"c":null}"#,
    ]
    .into_iter()
    .map(|s| s.as_bytes().to_vec())
    .collect();
    assert_eq!(got, want);
}

#[test]
fn array_bounds_compile_to_counted_repetition() {
    let schema = schema_from(
        r#"{"type":"array","items":{"type":"boolean"},"minItems":1,"maxItems":3}"#,
    );
    let ast = schema_to_regex(&schema).unwrap();
    let dfa = compile_regex(&ast).unwrap();
    let mut rng = ChaCha12Rng::seed_from_u64(3);
    for _ in 0..300 {
        let n = rng.random_range(0..6);
        let body: Vec<String> = (0..n)
            .map(|_| if rng.random() { "true" } else { "false" }.to_string())
            .collect();
        let text = format!("[{}]", body.join(","));
        let want = (1..=3).contains(&n);
        assert_eq!(dfa.accepts(text.as_bytes()), want, "{text}");
        assert_eq!(oracle_matches(&ast, text.as_bytes()), want, "oracle {text}");
    }
}

#[test]
fn escaped_strings_round_trip_through_the_automaton() {
    let schema = schema_from(r#"{"type":"string"}"#);
    let dfa = compile_regex(&schema_to_regex(&schema).unwrap()).unwrap();
    // canonical serializations of strings with every escape class
    for s in [
        "plain",
        "with \"quotes\" and \\backslash\\",
        "tab\there",
        "newline\nand bell\u{0007}",
        "unicode: éλ中😀",
        "",
    ] {
        let canon =
            sketch_core::json::serialize_canonical(&JsonValue::String(s.to_string()));
        assert!(dfa.accepts(canon.as_bytes()), "{canon:?}");
        let back = parse_json(&canon).unwrap();
        assert_eq!(back.as_str(), Some(s));
    }
    // surrogate escapes must be rejected even though they are 6 hex-ish
    // bytes; adjacent non-surrogate escapes pass
    let quoted_escape = |hex: &str| format!("{q}{b}u{hex}{q}", q = '"', b = '\\').into_bytes();
    assert!(!dfa.accepts(&quoted_escape("d800")));
    assert!(!dfa.accepts(&quoted_escape("DC00")));
    assert!(dfa.accepts(&quoted_escape("d7ff")));
    assert!(dfa.accepts(&quoted_escape("e000")));
}
