use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const KEYWORDS: &[&str] = &["if", "else", "while", "return", "int", "double", "void"];
pub const TYPE_KEYWORDS: &[&str] = &["int", "double", "void"];

const TWO_CHAR_OPERATORS: &[&str] = &["<=", ">=", "==", "!=", "&&", "||"];
const ONE_CHAR_OPERATORS: &str = "+-*/%<>=!";
const PUNCTUATION: &str = "(){},;";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TokenKind {
    Keyword,
    Identifier,
    IntLiteral,
    FloatLiteral,
    Operator,
    Punctuation,
}

impl TokenKind {
    pub const ALL: [TokenKind; 6] = [
        TokenKind::Keyword,
        TokenKind::Identifier,
        TokenKind::IntLiteral,
        TokenKind::FloatLiteral,
        TokenKind::Operator,
        TokenKind::Punctuation,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TokenKind::Keyword => "keyword",
            TokenKind::Identifier => "identifier",
            TokenKind::IntLiteral => "int-literal",
            TokenKind::FloatLiteral => "float-literal",
            TokenKind::Operator => "operator",
            TokenKind::Punctuation => "punctuation",
        }
    }

    pub fn from_name(name: &str) -> Option<TokenKind> {
        TokenKind::ALL.into_iter().find(|kind| kind.as_str() == name)
    }
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub text: String,
    /// 1-based; 0 when the token was imported without a position.
    pub line: u32,
    pub column: u32,
}

impl Token {
    pub fn is_type_keyword(&self) -> bool {
        self.kind == TokenKind::Keyword && TYPE_KEYWORDS.contains(&self.text.as_str())
    }

    pub fn is(&self, kind: TokenKind, text: &str) -> bool {
        self.kind == kind && self.text == text
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {message}")]
pub struct LexError {
    pub line: u32,
    pub column: u32,
    pub message: String,
}

struct Cursor<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    rest: &'a str,
    line: u32,
    column: u32,
}

impl<'a> Cursor<'a> {
    fn new(source: &'a str) -> Self {
        Cursor {
            chars: source.chars().peekable(),
            rest: source,
            line: 1,
            column: 1,
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.chars.peek().copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        self.rest = &self.rest[c.len_utf8()..];
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn eat_while(&mut self, mut pred: impl FnMut(char) -> bool) -> &'a str {
        let start = self.rest;
        let mut len = 0;
        while let Some(c) = self.peek() {
            if !pred(c) {
                break;
            }
            len += c.len_utf8();
            self.bump();
        }
        &start[..len]
    }
}

/// Splits source text into tokens. Whitespace and comments are discarded.
pub fn tokenize(source: &str) -> Result<Vec<Token>, LexError> {
    let mut cursor = Cursor::new(source);
    let mut tokens = Vec::new();

    while let Some(c) = cursor.peek() {
        let (line, column) = (cursor.line, cursor.column);
        let error = |message: String| LexError {
            line,
            column,
            message,
        };

        if c.is_whitespace() {
            cursor.bump();
            continue;
        }

        if cursor.rest.starts_with("//") {
            cursor.eat_while(|c| c != '\n');
            continue;
        }
        if cursor.rest.starts_with("/*") {
            cursor.bump();
            cursor.bump();
            loop {
                if cursor.rest.starts_with("*/") {
                    cursor.bump();
                    cursor.bump();
                    break;
                }
                if cursor.bump().is_none() {
                    return Err(error("unterminated block comment".into()));
                }
            }
            continue;
        }

        let (kind, text) = if c.is_ascii_alphabetic() || c == '_' {
            let word = cursor.eat_while(|c| c.is_ascii_alphanumeric() || c == '_');
            let kind = if KEYWORDS.contains(&word) {
                TokenKind::Keyword
            } else {
                TokenKind::Identifier
            };
            (kind, word.to_string())
        } else if c.is_ascii_digit() || (c == '.' && starts_with_fraction(cursor.rest)) {
            let mut text = cursor.eat_while(|c| c.is_ascii_digit()).to_string();
            let mut kind = TokenKind::IntLiteral;
            if cursor.peek() == Some('.') {
                cursor.bump();
                text.push('.');
                text.push_str(cursor.eat_while(|c| c.is_ascii_digit()));
                kind = TokenKind::FloatLiteral;
            }
            if let Some(c) = cursor.peek() {
                if c.is_ascii_alphabetic() || c == '_' {
                    return Err(error(format!("malformed number literal `{text}{c}`")));
                }
            }
            (kind, text)
        } else if let Some(op) = TWO_CHAR_OPERATORS.iter().find(|op| cursor.rest.starts_with(**op)) {
            cursor.bump();
            cursor.bump();
            (TokenKind::Operator, op.to_string())
        } else if ONE_CHAR_OPERATORS.contains(c) {
            cursor.bump();
            (TokenKind::Operator, c.to_string())
        } else if PUNCTUATION.contains(c) {
            cursor.bump();
            (TokenKind::Punctuation, c.to_string())
        } else {
            return Err(error(format!("unrecognized character `{c}`")));
        };

        tokens.push(Token {
            kind,
            text,
            line,
            column,
        });
    }

    Ok(tokens)
}

fn starts_with_fraction(rest: &str) -> bool {
    rest[1..].starts_with(|c: char| c.is_ascii_digit())
}
