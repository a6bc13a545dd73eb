//! Concrete syntax for blocks: Structured Text and Instruction List
//! parsers, canonical emitters, and translation between the two.

mod emit;
mod il;
mod lexer;
mod parser;

use std::fmt;

use thiserror::Error;

use crate::model::{Block, BlockInterface, BoolExpr, Lang};

pub use emit::{emit, emit_il_expr};

/// Position of a token in source text (1-based line and column).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SourceSpan {
    pub line: usize,
    pub column: usize,
    pub length: usize,
}

impl SourceSpan {
    pub fn new(line: usize, column: usize, length: usize) -> Self {
        debug_assert!(line >= 1 && column >= 1);
        SourceSpan { line, column, length }
    }
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub span: SourceSpan,
    pub message: String,
    pub expected: Vec<String>,
}

impl ParseError {
    pub(crate) fn new(span: SourceSpan, message: impl Into<String>, expected: Vec<String>) -> Self {
        let message = message.into();
        debug_assert!(!message.is_empty());
        ParseError { span, message, expected }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.span, self.message)?;
        if !self.expected.is_empty() {
            write!(f, " (expected {})", self.expected.join(", "))?;
        }
        Ok(())
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LangError {
    #[error("parse error at {0}")]
    Parse(ParseError),
    #[error("type error at {span}: {message}")]
    Type { span: SourceSpan, message: String },
    #[error("accumulator undefined at {span}: `{instruction}` needs a preceding load")]
    AccumulatorUndefined { span: SourceSpan, instruction: String },
    #[error("unbalanced parenthesis at {span}")]
    UnbalancedParen { span: SourceSpan },
}

impl LangError {
    pub fn span(&self) -> SourceSpan {
        match self {
            LangError::Parse(e) => e.span,
            LangError::Type { span, .. }
            | LangError::AccumulatorUndefined { span, .. }
            | LangError::UnbalancedParen { span } => *span,
        }
    }
}

impl From<ParseError> for LangError {
    fn from(e: ParseError) -> Self {
        LangError::Parse(e)
    }
}

/// Parses a Structured Text function block.
pub fn parse_st(text: &str) -> Result<Block, LangError> {
    parser::parse_st_block(text)
}

/// Parses an Instruction List function block.
pub fn parse_il(text: &str) -> Result<Block, LangError> {
    il::parse_il_block(text)
}

pub fn parse(text: &str, lang: Lang) -> Result<Block, LangError> {
    match lang {
        Lang::St => parse_st(text),
        Lang::Il => parse_il(text),
    }
}

/// Parses a standalone ST expression checked against `interface`.
pub fn parse_expr(text: &str, interface: &BlockInterface) -> Result<BoolExpr, LangError> {
    parser::parse_standalone_expr(text, interface)
}

/// Re-expresses `block` in `target` by emitting and re-parsing it.
pub fn translate(block: &Block, target: Lang) -> Result<Block, LangError> {
    parse(&emit(block, target), target)
}
