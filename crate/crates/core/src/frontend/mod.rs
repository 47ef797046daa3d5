//! Lexing and parsing of the C-like input language, plus import/export of
//! parse trees produced by external tools.

mod lexer;
mod parser;
mod tree;

use thiserror::Error;

pub use lexer::{tokenize, LexError, Token, TokenKind, KEYWORDS, TYPE_KEYWORDS};
pub use parser::{parse, ParseError};
pub use tree::{import_parse_tree, Category, ParseTree, SchemaError, SyntaxNode, Walk};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FrontendError {
    #[error("lex error at {0}")]
    Lex(#[from] LexError),
    #[error("parse error at {0}")]
    Parse(#[from] ParseError),
}

/// Tokenizes and parses source text in one step.
pub fn parse_source(source: &str) -> Result<ParseTree, FrontendError> {
    let tokens = tokenize(source)?;
    Ok(parse(&tokens)?)
}
