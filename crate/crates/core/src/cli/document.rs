//! Sequence files.
//!
//! ```text
//! # the running example
//! vars x y z
//! lex: y
//! nat: !x
//! ? !z
//! ```
//!
//! `#` starts a comment anywhere on a line. The first non-blank line must
//! declare the alphabet; every other line is an operator application
//! `<keyword>: <formula>` or a query `? <formula>`.

use std::path::Path;

use crate::error::{Error, Result};
use crate::formula::{parse_formula, Alphabet, Formula};
use crate::preorder::{ChangeOp, ChangeSequence, OpKind};

#[derive(Debug, Clone)]
pub struct Query {
    pub text: String,
    pub formula: Formula,
    pub line: usize,
}

#[derive(Debug, Clone)]
pub struct SequenceDocument {
    pub sequence: ChangeSequence,
    /// 1-based source line of each operator.
    pub op_lines: Vec<usize>,
    pub queries: Vec<Query>,
}

impl SequenceDocument {
    pub fn alphabet(&self) -> &Alphabet {
        &self.sequence.alphabet
    }
}

fn doc_error(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Document {
        line,
        column,
        message: message.into(),
    }
}

/// Number of characters before byte offset `byte` in `s`.
fn char_col(s: &str, byte: usize) -> usize {
    s[..byte].chars().count()
}

/// Parses `text` as a formula that starts at 0-based character column
/// `start` of line `line`.
fn formula_at(text: &str, alphabet: &Alphabet, line: usize, start: usize) -> Result<Formula> {
    parse_formula(text, alphabet).map_err(|e| match e {
        Error::Syntax { offset, message } => doc_error(line, start + offset + 1, message),
        Error::UndeclaredVariable { name, offset } => {
            doc_error(line, start + offset + 1, format!("undeclared variable `{name}`"))
        }
        other => other,
    })
}

pub fn parse_document(source: &str) -> Result<SequenceDocument> {
    let mut alphabet: Option<Alphabet> = None;
    let mut ops = Vec::new();
    let mut op_lines = Vec::new();
    let mut queries = Vec::new();

    for (index, raw) in source.lines().enumerate() {
        let line = index + 1;
        let content = raw.split('#').next().unwrap_or("");
        let trimmed = content.trim_start();
        if trimmed.trim().is_empty() {
            continue;
        }
        let indent = char_col(content, content.len() - trimmed.len());
        let trimmed = trimmed.trim_end();

        let Some(alphabet) = alphabet.as_ref() else {
            let mut words = trimmed.split_whitespace();
            if words.next() != Some("vars") {
                return Err(doc_error(line, indent + 1, "expected `vars` declaration first"));
            }
            let names: Vec<&str> = words.collect();
            alphabet = Some(Alphabet::new(names).map_err(|e| doc_error(line, indent + 1, e.to_string()))?);
            continue;
        };

        if let Some(rest) = trimmed.strip_prefix('?') {
            let start = indent + 1 + char_col(rest, rest.len() - rest.trim_start().len());
            let text = rest.trim();
            let formula = formula_at(text, alphabet, line, start)?;
            queries.push(Query {
                text: text.to_string(),
                formula,
                line,
            });
            continue;
        }

        let Some(colon) = trimmed.find(':') else {
            let word = trimmed.split_whitespace().next().unwrap_or("");
            if word == "vars" {
                return Err(doc_error(line, indent + 1, "alphabet declared twice"));
            }
            return Err(doc_error(line, indent + 1, "expected `<operator>: <formula>` or `? <formula>`"));
        };
        let keyword = trimmed[..colon].trim();
        let Some(kind) = OpKind::from_keyword(keyword) else {
            return Err(doc_error(line, indent + 1, format!("unknown operator `{keyword}`")));
        };
        let rest = &trimmed[colon + 1..];
        let start = indent + char_col(trimmed, colon + 1) + char_col(rest, rest.len() - rest.trim_start().len());
        let formula = formula_at(rest.trim(), alphabet, line, start)?;
        ops.push(ChangeOp::new(kind, formula));
        op_lines.push(line);
    }

    let Some(alphabet) = alphabet else {
        return Err(doc_error(1, 1, "missing `vars` declaration"));
    };
    Ok(SequenceDocument {
        sequence: ChangeSequence::new(alphabet, ops)?,
        op_lines,
        queries,
    })
}

pub fn load(path: &Path) -> Result<SequenceDocument> {
    let source = std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_document(&source)
}

/// A document listing `alphabet` and `ops`, parseable by [`parse_document`].
pub fn render_document(alphabet: &Alphabet, ops: &[ChangeOp]) -> String {
    let mut out = format!("vars {}\n", alphabet.names().join(" "));
    for op in ops {
        out.push_str(&format!("{}: {}\n", op.kind, op.formula.render(alphabet)));
    }
    out
}
