use super::CompilerError;
use crate::json::serialize_canonical;
use crate::schema::{validate_lenient, SchemaDoc, SchemaKind};

/// Set of byte values, as a 256-bit mask.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ByteSet {
    bits: [u64; 4],
}

impl ByteSet {
    pub const fn empty() -> ByteSet {
        ByteSet { bits: [0; 4] }
    }

    pub fn single(b: u8) -> ByteSet {
        let mut s = ByteSet::empty();
        s.insert(b);
        s
    }

    /// Inclusive byte range.
    pub fn range(lo: u8, hi: u8) -> ByteSet {
        let mut s = ByteSet::empty();
        for b in lo..=hi {
            s.insert(b);
        }
        s
    }

    pub fn insert(&mut self, b: u8) {
        self.bits[(b >> 6) as usize] |= 1 << (b & 63);
    }

    pub fn remove(&mut self, b: u8) {
        self.bits[(b >> 6) as usize] &= !(1 << (b & 63));
    }

    pub fn contains(&self, b: u8) -> bool {
        self.bits[(b >> 6) as usize] >> (b & 63) & 1 == 1
    }

    pub fn union(mut self, other: ByteSet) -> ByteSet {
        for i in 0..4 {
            self.bits[i] |= other.bits[i];
        }
        self
    }

    pub fn is_empty(&self) -> bool {
        self.bits == [0; 4]
    }

    pub fn iter(&self) -> impl Iterator<Item = u8> + '_ {
        (0..=255u8).filter(|&b| self.contains(b))
    }

    pub fn len(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }
}

/// Regular expression over bytes. Only the constructs the schema lowering
/// emits: no backreferences, no lookaround.
#[derive(Debug, Clone, PartialEq)]
pub enum RegexAst {
    /// Matches the empty string.
    Empty,
    /// Matches this exact byte sequence.
    Literal(Vec<u8>),
    /// Matches one byte from the set.
    Class(ByteSet),
    Concat(Vec<RegexAst>),
    Alt(Vec<RegexAst>),
    /// min ≤ max when max is present.
    Repeat {
        node: Box<RegexAst>,
        min: u32,
        max: Option<u32>,
    },
}

impl RegexAst {
    pub fn lit(s: &str) -> RegexAst {
        RegexAst::Literal(s.as_bytes().to_vec())
    }

    pub fn concat(parts: Vec<RegexAst>) -> RegexAst {
        RegexAst::Concat(parts)
    }

    pub fn alt(parts: Vec<RegexAst>) -> RegexAst {
        RegexAst::Alt(parts)
    }

    pub fn opt(node: RegexAst) -> RegexAst {
        RegexAst::Repeat {
            node: Box::new(node),
            min: 0,
            max: Some(1),
        }
    }

    pub fn star(node: RegexAst) -> RegexAst {
        RegexAst::Repeat {
            node: Box::new(node),
            min: 0,
            max: None,
        }
    }

    pub fn plus(node: RegexAst) -> RegexAst {
        RegexAst::Repeat {
            node: Box::new(node),
            min: 1,
            max: None,
        }
    }

    pub fn repeat(node: RegexAst, min: u32, max: Option<u32>) -> RegexAst {
        debug_assert!(max.map_or(true, |m| min <= m));
        RegexAst::Repeat {
            node: Box::new(node),
            min,
            max,
        }
    }
}

/// Lowers a schema to the regular language of canonical serializations of
/// conforming values. Emission is deliberately narrower than validation:
/// object members appear in declaration order with no undeclared extras,
/// numbers use plain spellings, and strings use the canonical escape set —
/// everything the automaton can emit validates, not the other way around.
pub fn schema_to_regex(schema: &SchemaDoc) -> Result<RegexAst, CompilerError> {
    if schema.has_unsupported() {
        return Err(CompilerError::Unsupported(schema.collect_unsupported()));
    }
    lower(schema)
}

fn lower(schema: &SchemaDoc) -> Result<RegexAst, CompilerError> {
    if let Some(members) = &schema.enum_values {
        return enum_regex(schema, members);
    }
    match schema.kind {
        SchemaKind::Null => Ok(RegexAst::lit("null")),
        SchemaKind::Boolean => Ok(RegexAst::alt(vec![
            RegexAst::lit("true"),
            RegexAst::lit("false"),
        ])),
        SchemaKind::Integer => Ok(integer_regex()),
        SchemaKind::Number => Ok(number_regex()),
        SchemaKind::String => Ok(string_regex()),
        SchemaKind::Array => array_regex(schema),
        SchemaKind::Object => object_regex(schema),
        // enum_values is always present for EnumOnly (parser invariant)
        SchemaKind::EnumOnly => unreachable!("enum-only schema without members"),
    }
}

/// Alternation over the canonical spellings of the enum members that
/// actually satisfy the rest of the schema. A member that fails its own
/// schema's type check must never be emitted.
fn enum_regex(schema: &SchemaDoc, members: &[crate::json::JsonValue]) -> Result<RegexAst, CompilerError> {
    let mut sans_enum = schema.clone();
    sans_enum.enum_values = None;
    let mut arms = Vec::new();
    for member in members {
        let keep = match schema.kind {
            SchemaKind::EnumOnly => true,
            _ => validate_lenient(member, &sans_enum).valid(),
        };
        if keep {
            arms.push(RegexAst::Literal(
                serialize_canonical(member).into_bytes(),
            ));
        }
    }
    if arms.is_empty() {
        return Err(CompilerError::EmptyLanguage(
            "no enum member satisfies the schema's type".to_string(),
        ));
    }
    Ok(RegexAst::alt(arms))
}

/// `-?(0|[1-9][0-9]*)(\.[0-9]+)?([eE][+-]?[0-9]+)?` — the JSON number grammar.
pub fn number_regex() -> RegexAst {
    RegexAst::concat(vec![
        RegexAst::opt(RegexAst::lit("-")),
        int_part(),
        RegexAst::opt(RegexAst::concat(vec![
            RegexAst::lit("."),
            RegexAst::plus(RegexAst::Class(ByteSet::range(b'0', b'9'))),
        ])),
        RegexAst::opt(RegexAst::concat(vec![
            RegexAst::Class(ByteSet::single(b'e').union(ByteSet::single(b'E'))),
            RegexAst::opt(RegexAst::Class(
                ByteSet::single(b'+').union(ByteSet::single(b'-')),
            )),
            RegexAst::plus(RegexAst::Class(ByteSet::range(b'0', b'9'))),
        ])),
    ])
}

/// `-?(0|[1-9][0-9]*)`. Integer emission drops the fraction *and* exponent
/// groups: a spelling like `1e-2` matches the grammar's integer-less groups
/// but denotes a fractional value, and everything the automaton emits must
/// validate as an integer.
pub fn integer_regex() -> RegexAst {
    RegexAst::concat(vec![RegexAst::opt(RegexAst::lit("-")), int_part()])
}

fn int_part() -> RegexAst {
    RegexAst::alt(vec![
        RegexAst::lit("0"),
        RegexAst::concat(vec![
            RegexAst::Class(ByteSet::range(b'1', b'9')),
            RegexAst::star(RegexAst::Class(ByteSet::range(b'0', b'9'))),
        ]),
    ])
}

/// The language of JSON string literals whose contents are well-formed
/// UTF-8. Byte classes follow the UTF-8 structure (RFC 3629 table), so
/// overlong encodings and encoded surrogates are unreachable; `\uXXXX`
/// escapes in the surrogate range are likewise excluded so that every
/// accepted literal parses as a JSON string.
pub fn string_regex() -> RegexAst {
    RegexAst::concat(vec![
        RegexAst::lit("\""),
        RegexAst::star(string_char()),
        RegexAst::lit("\""),
    ])
}

fn string_char() -> RegexAst {
    // printable single bytes minus quote and backslash
    let mut ascii = ByteSet::range(0x20, 0x7f);
    ascii.remove(b'"');
    ascii.remove(b'\\');
    let cont = || RegexAst::Class(ByteSet::range(0x80, 0xbf));

    let two = RegexAst::concat(vec![RegexAst::Class(ByteSet::range(0xc2, 0xdf)), cont()]);
    let three = RegexAst::alt(vec![
        RegexAst::concat(vec![
            RegexAst::Class(ByteSet::single(0xe0)),
            RegexAst::Class(ByteSet::range(0xa0, 0xbf)),
            cont(),
        ]),
        RegexAst::concat(vec![
            RegexAst::Class(ByteSet::range(0xe1, 0xec)),
            cont(),
            cont(),
        ]),
        RegexAst::concat(vec![
            RegexAst::Class(ByteSet::single(0xed)),
            RegexAst::Class(ByteSet::range(0x80, 0x9f)),
            cont(),
        ]),
        RegexAst::concat(vec![
            RegexAst::Class(ByteSet::range(0xee, 0xef)),
            cont(),
            cont(),
        ]),
    ]);
    let four = RegexAst::alt(vec![
        RegexAst::concat(vec![
            RegexAst::Class(ByteSet::single(0xf0)),
            RegexAst::Class(ByteSet::range(0x90, 0xbf)),
            cont(),
            cont(),
        ]),
        RegexAst::concat(vec![
            RegexAst::Class(ByteSet::range(0xf1, 0xf3)),
            cont(),
            cont(),
            cont(),
        ]),
        RegexAst::concat(vec![
            RegexAst::Class(ByteSet::single(0xf4)),
            RegexAst::Class(ByteSet::range(0x80, 0x8f)),
            cont(),
            cont(),
        ]),
    ]);

    let hex = || {
        RegexAst::Class(
            ByteSet::range(b'0', b'9')
                .union(ByteSet::range(b'a', b'f'))
                .union(ByteSet::range(b'A', b'F')),
        )
    };
    // \uXXXX with the surrogate block carved out: first hex digit not d/D,
    // or d/D followed by 0-7 (U+D000..U+D7FF)
    let mut hex_not_d = ByteSet::range(b'0', b'9')
        .union(ByteSet::range(b'a', b'f'))
        .union(ByteSet::range(b'A', b'F'));
    hex_not_d.remove(b'd');
    hex_not_d.remove(b'D');
    let unicode_escape = RegexAst::concat(vec![
        RegexAst::lit("u"),
        RegexAst::alt(vec![
            RegexAst::concat(vec![RegexAst::Class(hex_not_d), hex(), hex(), hex()]),
            RegexAst::concat(vec![
                RegexAst::Class(ByteSet::single(b'd').union(ByteSet::single(b'D'))),
                RegexAst::Class(ByteSet::range(b'0', b'7')),
                hex(),
                hex(),
            ]),
        ]),
    ]);

    let mut simple_escapes = ByteSet::empty();
    for b in [b'"', b'\\', b'/', b'b', b'f', b'n', b'r', b't'] {
        simple_escapes.insert(b);
    }
    let escape = RegexAst::concat(vec![
        RegexAst::lit("\\"),
        RegexAst::alt(vec![RegexAst::Class(simple_escapes), unicode_escape]),
    ]);

    RegexAst::alt(vec![RegexAst::Class(ascii), two, three, four, escape])
}

fn array_regex(schema: &SchemaDoc) -> Result<RegexAst, CompilerError> {
    let min = schema.min_items.unwrap_or(0);
    let max = schema.max_items;
    let Some(items) = &schema.items else {
        // without an item schema the only emission that is always safe is
        // the empty array
        if min > 0 {
            return Err(CompilerError::EmptyLanguage(
                "array requires items but declares no item schema".to_string(),
            ));
        }
        return Ok(RegexAst::lit("[]"));
    };
    if max == Some(0) {
        return Ok(RegexAst::lit("[]"));
    }
    let item = lower(items)?;
    let more = RegexAst::concat(vec![RegexAst::lit(","), item.clone()]);
    let rest_max = max.map(|m| (m - 1) as u32);
    let non_empty = RegexAst::concat(vec![
        item,
        RegexAst::repeat(more, min.saturating_sub(1) as u32, rest_max),
    ]);
    let inner = if min == 0 {
        RegexAst::opt(non_empty)
    } else {
        non_empty
    };
    Ok(RegexAst::concat(vec![
        RegexAst::lit("["),
        inner,
        RegexAst::lit("]"),
    ]))
}

/// Members in declaration order; required members always present, optional
/// ones skippable. The first emitted member determines the branch (it is the
/// smallest declared index present), which keeps the automaton unambiguous:
/// a required member bounds how far the first emission can sit, and every
/// later member is a `(,member)?` group or a mandatory `,member`.
fn object_regex(schema: &SchemaDoc) -> Result<RegexAst, CompilerError> {
    if schema.properties.is_empty() {
        return Ok(RegexAst::lit("{}"));
    }
    let members: Vec<(RegexAst, bool)> = schema
        .properties
        .iter()
        .map(|(name, sub)| {
            let value = lower(sub)?;
            let mut key = String::new();
            key.push('"');
            // property names in the catalog and generator are escape-free;
            // serialize through the writer so exotic names still round-trip
            let quoted = serialize_canonical(&crate::json::JsonValue::String(name.clone()));
            key.push_str(&quoted[1..quoted.len() - 1]);
            key.push_str("\":");
            Ok((
                RegexAst::concat(vec![RegexAst::Literal(key.into_bytes()), value]),
                schema.is_required(name),
            ))
        })
        .collect::<Result<_, CompilerError>>()?;

    let rest = |from: usize| -> RegexAst {
        let mut parts = Vec::new();
        for (member, required) in &members[from..] {
            let with_comma = RegexAst::concat(vec![RegexAst::lit(","), member.clone()]);
            parts.push(if *required {
                with_comma
            } else {
                RegexAst::opt(with_comma)
            });
        }
        RegexAst::concat(parts)
    };

    let first_required = members.iter().position(|(_, req)| *req);
    let mut arms = Vec::new();
    let last_candidate = first_required.unwrap_or(members.len() - 1);
    for i in 0..=last_candidate {
        arms.push(RegexAst::concat(vec![members[i].0.clone(), rest(i + 1)]));
    }
    if first_required.is_none() {
        arms.push(RegexAst::Empty);
    }
    Ok(RegexAst::concat(vec![
        RegexAst::lit("{"),
        RegexAst::alt(arms),
        RegexAst::lit("}"),
    ]))
}
