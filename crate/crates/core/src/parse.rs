//! Text formats: the JSON tree schema, the one-line chain notation and the
//! product grammar.
//!
//! Chain notation: `a:1>b:2>r:4 | c:2>r`. Chains are separated by `|`,
//! each written from a leaf toward the root. A name may carry its label as
//! `name:label`; a purely numeric name without a label is its own label.
//! Repeated names refer to the same vertex.
//!
//! Product grammar: `F(k1,...,kr;n)`, `G(k;n)`, joined by `*`, with `^m`
//! for repetition.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::product::{FlagProduct, ProductError};
use crate::tree::{validate_tree, LabeledTree, RawTree, TreeError, MAX_LABEL};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("at line {line}, column {column}: {error}")]
    Positioned {
        line: usize,
        column: usize,
        error: TreeError,
    },
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error("bounds error: {0}")]
    Bounds(String),
}

impl ParseError {
    fn syntax(column: usize, message: impl Into<String>) -> Self {
        ParseError::Syntax {
            line: 1,
            column,
            message: message.into(),
        }
    }

    /// The tree validation error, if this is one.
    pub fn tree_error(&self) -> Option<&TreeError> {
        match self {
            ParseError::Positioned { error, .. } | ParseError::Tree(error) => Some(error),
            _ => None,
        }
    }
}

impl From<ProductError> for ParseError {
    fn from(e: ProductError) -> Self {
        ParseError::Bounds(e.to_string())
    }
}

/// Parses either format; input starting with `{` is JSON.
pub fn parse_tree_spec(text: &str) -> Result<LabeledTree, ParseError> {
    if text.trim_start().starts_with('{') {
        parse_tree_json(text)
    } else {
        parse_tree_dsl(text)
    }
}

pub fn parse_tree_json(text: &str) -> Result<LabeledTree, ParseError> {
    let raw: RawTree = serde_json::from_str(text).map_err(|e| ParseError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    Ok(validate_tree(&raw)?)
}

struct Token {
    name: String,
    label: Option<u64>,
    column: usize,
}

fn is_name_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || matches!(c, '_' | '.' | '-')
}

/// Splits one chain into vertex tokens, reporting 1-based columns relative
/// to the whole input line.
fn chain_tokens(chain: &str, offset: usize) -> Result<(Vec<Token>, Vec<usize>), ParseError> {
    let chars: Vec<(usize, char)> = chain.char_indices().collect();
    let mut tokens = Vec::new();
    let mut arrows = Vec::new();
    let mut i = 0;
    let col = |i: usize| offset + chars.get(i).map_or(chain.len(), |c| c.0) + 1;
    let skip_ws = |i: &mut usize| {
        while *i < chars.len() && chars[*i].1.is_whitespace() {
            *i += 1;
        }
    };
    loop {
        skip_ws(&mut i);
        let start = i;
        while i < chars.len() && is_name_char(chars[i].1) {
            i += 1;
        }
        if start == i {
            return Err(ParseError::syntax(col(i), "expected a vertex name"));
        }
        let name: String = chars[start..i].iter().map(|c| c.1).collect();
        let mut label = None;
        skip_ws(&mut i);
        if i < chars.len() && chars[i].1 == ':' {
            i += 1;
            skip_ws(&mut i);
            let digits_start = i;
            while i < chars.len() && chars[i].1.is_ascii_digit() {
                i += 1;
            }
            if digits_start == i {
                return Err(ParseError::syntax(col(i), "expected a label after ':'"));
            }
            let digits: String = chars[digits_start..i].iter().map(|c| c.1).collect();
            label = Some(parse_label(&digits, col(digits_start))?);
            skip_ws(&mut i);
        }
        tokens.push(Token {
            name,
            label,
            column: col(start),
        });
        if i == chars.len() {
            break;
        }
        if chars[i].1 != '>' {
            return Err(ParseError::syntax(
                col(i),
                format!("unexpected character '{}'", chars[i].1),
            ));
        }
        arrows.push(col(i));
        i += 1;
    }
    Ok((tokens, arrows))
}

fn parse_label(digits: &str, column: usize) -> Result<u64, ParseError> {
    match digits.parse::<u64>() {
        Ok(v) if (1..=MAX_LABEL).contains(&v) => Ok(v),
        _ => Err(ParseError::Positioned {
            line: 1,
            column,
            error: TreeError::LabelOutOfRange {
                vertex: digits.to_string(),
                label: digits.parse::<i64>().unwrap_or(i64::MAX),
            },
        }),
    }
}

pub fn parse_tree_dsl(text: &str) -> Result<LabeledTree, ParseError> {
    if text.contains('\n') && text.trim().contains('\n') {
        return Err(ParseError::syntax(
            text.find('\n').unwrap_or(0) + 1,
            "chain notation must fit on one line",
        ));
    }
    if text.trim().is_empty() {
        return Err(ParseError::Tree(TreeError::EmptyInput));
    }
    let mut chains = Vec::new();
    let mut offset = 0;
    for piece in text.split('|') {
        chains.push(chain_tokens(piece, offset)?);
        offset += piece.len() + 1;
    }

    // first pass: settle labels
    let mut labels: BTreeMap<String, u64> = BTreeMap::new();
    for (tokens, _) in &chains {
        for t in tokens {
            let label = match t.label {
                Some(l) => l,
                None => continue,
            };
            match labels.get(&t.name) {
                Some(&old) if old != label => {
                    return Err(ParseError::syntax(
                        t.column,
                        format!("vertex {} labeled both {old} and {label}", t.name),
                    ))
                }
                _ => {
                    labels.insert(t.name.clone(), label);
                }
            }
        }
    }
    for (tokens, _) in &chains {
        for t in tokens {
            if labels.contains_key(&t.name) {
                continue;
            }
            if t.name.bytes().all(|b| b.is_ascii_digit()) {
                let label = parse_label(&t.name, t.column)?;
                labels.insert(t.name.clone(), label);
            } else {
                return Err(ParseError::syntax(
                    t.column,
                    format!("vertex {} has no label", t.name),
                ));
            }
        }
    }

    // second pass: edges, with label checks at each arrow
    let mut edges = Vec::new();
    for (tokens, arrows) in &chains {
        for (pair, &column) in tokens.windows(2).zip(arrows) {
            let (s, t) = (&pair[0].name, &pair[1].name);
            let (ls, lt) = (labels[s], labels[t]);
            if ls >= lt {
                return Err(ParseError::Positioned {
                    line: 1,
                    column,
                    error: TreeError::LabelViolation {
                        from: s.clone(),
                        to: t.clone(),
                        source_label: ls,
                        target_label: lt,
                    },
                });
            }
            edges.push((s.clone(), t.clone()));
        }
    }
    let raw = RawTree {
        labels: labels.into_iter().map(|(k, v)| (k, v as i64)).collect(),
        edges,
        root: None,
    };
    Ok(validate_tree(&raw)?)
}

struct Cursor<'a> {
    text: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.text.len() && self.text[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.text.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<(), ParseError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(format!("expected '{}'", c as char)))
        }
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError::syntax(self.pos + 1, message)
    }

    fn number(&mut self) -> Result<u64, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.text.len() && self.text[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected a number"));
        }
        std::str::from_utf8(&self.text[start..self.pos])
            .expect("digits are ascii")
            .parse()
            .map_err(|_| ParseError::Bounds(format!("number at column {} is too large", start + 1)))
    }
}

/// Parses the product grammar and validates every factor.
pub fn parse_product_spec(text: &str) -> Result<FlagProduct, ParseError> {
    let mut cur = Cursor {
        text: text.as_bytes(),
        pos: 0,
    };
    let mut factors = Vec::new();
    let mut ambient: Option<u64> = None;
    loop {
        let column = cur.pos + 1;
        let kind = match cur.peek() {
            Some(c @ (b'F' | b'G')) => c,
            _ => return Err(cur.error("expected 'F(' or 'G('")),
        };
        cur.pos += 1;
        cur.expect(b'(')?;
        let mut entries = vec![cur.number()?];
        while cur.peek() == Some(b',') {
            cur.pos += 1;
            entries.push(cur.number()?);
        }
        if kind == b'G' && entries.len() != 1 {
            return Err(ParseError::syntax(
                column,
                "G(k;n) takes exactly one dimension",
            ));
        }
        cur.expect(b';')?;
        let n = cur.number()?;
        cur.expect(b')')?;
        match ambient {
            Some(a) if a != n => {
                return Err(ParseError::Bounds(format!(
                    "factor at column {column} has ambient {n}, expected {a}"
                )))
            }
            _ => ambient = Some(n),
        }
        let mut count = 1;
        if cur.peek() == Some(b'^') {
            cur.pos += 1;
            let m = cur.number()?;
            if m == 0 || m > 1024 {
                return Err(ParseError::Bounds(format!("exponent {m} outside 1..=1024")));
            }
            count = m as usize;
        }
        for _ in 0..count {
            factors.push(entries.clone());
        }
        match cur.peek() {
            None => break,
            Some(b'*') => cur.pos += 1,
            Some(c) => return Err(cur.error(format!("unexpected character '{}'", c as char))),
        }
    }
    Ok(FlagProduct::new(
        factors,
        ambient.expect("at least one factor"),
    )?)
}
