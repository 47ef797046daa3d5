//! Recursive-descent parser with precedence climbing for expressions.
//!
//! ```text
//! translation-unit := (function-definition | statement)*
//! function-definition := TYPE IDENT parameter-list block
//! parameter-list := "(" [TYPE IDENT ("," TYPE IDENT)*] ")"
//! statement := block | declaration | if | while | return | assignment | expression-statement
//! declaration := TYPE IDENT ["=" expr] ";"
//! assignment := IDENT "=" expr ";"
//! ```

use std::fmt;

use thiserror::Error;

use super::lexer::{Token, TokenKind};
use super::tree::{Category, ParseTree, SyntaxNode};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ParseError {
    pub line: u32,
    pub column: u32,
    pub expected: Vec<String>,
    pub found: Option<String>,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: expected {}", self.line, self.column, self.expected.join(" or "))?;
        match &self.found {
            Some(found) => write!(f, ", found `{found}`"),
            None => write!(f, ", found end of input"),
        }
    }
}

/// Binary operator tiers, lowest precedence first.
const BINARY_TIERS: &[&[&str]] = &[
    &["||"],
    &["&&"],
    &["==", "!="],
    &["<", ">", "<=", ">="],
    &["+", "-"],
    &["*", "/", "%"],
];

pub fn parse(tokens: &[Token]) -> Result<ParseTree, ParseError> {
    let mut parser = Parser { tokens, pos: 0 };
    let mut items = Vec::new();
    while !parser.at_end() {
        let item = if parser.at_function_definition() {
            parser.function_definition()?
        } else {
            parser.statement()?
        };
        items.push(item);
    }
    Ok(ParseTree::new(items))
}

struct Parser<'t> {
    tokens: &'t [Token],
    pos: usize,
}

impl<'t> Parser<'t> {
    fn at_end(&self) -> bool {
        self.pos >= self.tokens.len()
    }

    fn peek(&self) -> Option<&'t Token> {
        self.tokens.get(self.pos)
    }

    fn peek_nth(&self, n: usize) -> Option<&'t Token> {
        self.tokens.get(self.pos + n)
    }

    fn check(&self, kind: TokenKind, text: &str) -> bool {
        self.peek().is_some_and(|t| t.is(kind, text))
    }

    fn check_type(&self) -> bool {
        self.peek().is_some_and(Token::is_type_keyword)
    }

    fn error(&self, expected: &[&str]) -> ParseError {
        let (line, column) = match self.peek() {
            Some(token) => (token.line, token.column),
            None => self
                .tokens
                .last()
                .map(|t| (t.line, t.column + t.text.chars().count() as u32))
                .unwrap_or((1, 1)),
        };
        ParseError {
            line,
            column,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: self.peek().map(|t| t.text.clone()),
        }
    }

    fn bump(&mut self) -> SyntaxNode {
        let token = self.tokens[self.pos].clone();
        self.pos += 1;
        SyntaxNode::Token(token)
    }

    fn expect(&mut self, kind: TokenKind, text: &str) -> Result<SyntaxNode, ParseError> {
        if self.check(kind, text) {
            Ok(self.bump())
        } else {
            Err(self.error(&[&format!("`{text}`")]))
        }
    }

    fn expect_kind(&mut self, kind: TokenKind, what: &str) -> Result<SyntaxNode, ParseError> {
        if self.peek().is_some_and(|t| t.kind == kind) {
            Ok(self.bump())
        } else {
            Err(self.error(&[what]))
        }
    }

    fn expect_type(&mut self) -> Result<SyntaxNode, ParseError> {
        if self.check_type() {
            Ok(self.bump())
        } else {
            Err(self.error(&["type"]))
        }
    }

    fn at_function_definition(&self) -> bool {
        self.check_type()
            && self.peek_nth(1).is_some_and(|t| t.kind == TokenKind::Identifier)
            && self.peek_nth(2).is_some_and(|t| t.is(TokenKind::Punctuation, "("))
    }

    fn function_definition(&mut self) -> Result<SyntaxNode, ParseError> {
        let return_type = self.expect_type()?;
        let name = self.expect_kind(TokenKind::Identifier, "function name")?;
        let parameters = self.parameter_list()?;
        let body = self.block()?;
        Ok(SyntaxNode::production(
            Category::FunctionDefinition,
            vec![return_type, name, parameters, body],
        ))
    }

    fn parameter_list(&mut self) -> Result<SyntaxNode, ParseError> {
        let mut children = vec![self.expect(TokenKind::Punctuation, "(")?];
        if !self.check(TokenKind::Punctuation, ")") {
            loop {
                children.push(self.expect_type()?);
                children.push(self.expect_kind(TokenKind::Identifier, "parameter name")?);
                if self.check(TokenKind::Punctuation, ",") {
                    children.push(self.bump());
                } else {
                    break;
                }
            }
        }
        children.push(self.expect(TokenKind::Punctuation, ")")?);
        Ok(SyntaxNode::production(Category::ParameterList, children))
    }

    fn block(&mut self) -> Result<SyntaxNode, ParseError> {
        let mut children = vec![self.expect(TokenKind::Punctuation, "{")?];
        while !self.check(TokenKind::Punctuation, "}") {
            if self.at_end() {
                return Err(self.error(&["statement", "`}`"]));
            }
            children.push(self.statement()?);
        }
        children.push(self.bump());
        Ok(SyntaxNode::production(Category::Block, children))
    }

    fn statement(&mut self) -> Result<SyntaxNode, ParseError> {
        let Some(token) = self.peek() else {
            return Err(self.error(&["statement"]));
        };
        match (token.kind, token.text.as_str()) {
            (TokenKind::Punctuation, "{") => self.block(),
            (TokenKind::Keyword, "if") => self.if_statement(),
            (TokenKind::Keyword, "while") => self.while_statement(),
            (TokenKind::Keyword, "return") => self.return_statement(),
            _ if token.is_type_keyword() => self.declaration(),
            (TokenKind::Identifier, _)
                if self.peek_nth(1).is_some_and(|t| t.is(TokenKind::Operator, "=")) =>
            {
                self.assignment()
            }
            _ => {
                let expr = self.expression()?;
                let semi = self.expect(TokenKind::Punctuation, ";")?;
                Ok(SyntaxNode::production(Category::ExpressionStatement, vec![expr, semi]))
            }
        }
    }

    fn declaration(&mut self) -> Result<SyntaxNode, ParseError> {
        let mut children = vec![
            self.expect_type()?,
            self.expect_kind(TokenKind::Identifier, "variable name")?,
        ];
        if self.check(TokenKind::Operator, "=") {
            children.push(self.bump());
            children.push(self.expression()?);
        }
        children.push(self.expect(TokenKind::Punctuation, ";")?);
        Ok(SyntaxNode::production(Category::DeclarationStatement, children))
    }

    fn assignment(&mut self) -> Result<SyntaxNode, ParseError> {
        let target = self.bump();
        let equals = self.bump();
        let value = self.expression()?;
        let semi = self.expect(TokenKind::Punctuation, ";")?;
        Ok(SyntaxNode::production(
            Category::AssignmentStatement,
            vec![target, equals, value, semi],
        ))
    }

    fn condition(&mut self, children: &mut Vec<SyntaxNode>) -> Result<(), ParseError> {
        children.push(self.expect(TokenKind::Punctuation, "(")?);
        children.push(self.expression()?);
        children.push(self.expect(TokenKind::Punctuation, ")")?);
        Ok(())
    }

    fn if_statement(&mut self) -> Result<SyntaxNode, ParseError> {
        let mut children = vec![self.bump()];
        self.condition(&mut children)?;
        children.push(self.statement()?);
        if self.check(TokenKind::Keyword, "else") {
            children.push(self.bump());
            children.push(self.statement()?);
        }
        Ok(SyntaxNode::production(Category::IfStatement, children))
    }

    fn while_statement(&mut self) -> Result<SyntaxNode, ParseError> {
        let mut children = vec![self.bump()];
        self.condition(&mut children)?;
        children.push(self.statement()?);
        Ok(SyntaxNode::production(Category::WhileStatement, children))
    }

    fn return_statement(&mut self) -> Result<SyntaxNode, ParseError> {
        let mut children = vec![self.bump()];
        if !self.check(TokenKind::Punctuation, ";") {
            children.push(self.expression()?);
        }
        children.push(self.expect(TokenKind::Punctuation, ";")?);
        Ok(SyntaxNode::production(Category::ReturnStatement, children))
    }

    fn expression(&mut self) -> Result<SyntaxNode, ParseError> {
        self.binary(0)
    }

    fn binary(&mut self, tier: usize) -> Result<SyntaxNode, ParseError> {
        let Some(operators) = BINARY_TIERS.get(tier) else {
            return self.unary();
        };
        let mut lhs = self.binary(tier + 1)?;
        while self
            .peek()
            .is_some_and(|t| t.kind == TokenKind::Operator && operators.contains(&t.text.as_str()))
        {
            let op = self.bump();
            let rhs = self.binary(tier + 1)?;
            lhs = SyntaxNode::production(Category::BinaryExpression, vec![lhs, op, rhs]);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<SyntaxNode, ParseError> {
        if self.check(TokenKind::Operator, "-") || self.check(TokenKind::Operator, "!") {
            let op = self.bump();
            let operand = self.unary()?;
            return Ok(SyntaxNode::production(Category::UnaryExpression, vec![op, operand]));
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<SyntaxNode, ParseError> {
        let Some(token) = self.peek() else {
            return Err(self.error(&["expression"]));
        };
        match token.kind {
            TokenKind::IntLiteral | TokenKind::FloatLiteral => {
                let literal = self.bump();
                Ok(SyntaxNode::production(Category::LiteralExpression, vec![literal]))
            }
            TokenKind::Identifier if self.peek_nth(1).is_some_and(|t| t.is(TokenKind::Punctuation, "(")) => {
                self.call()
            }
            TokenKind::Identifier => {
                let name = self.bump();
                Ok(SyntaxNode::production(Category::IdentifierExpression, vec![name]))
            }
            TokenKind::Punctuation if token.text == "(" => {
                let open = self.bump();
                let inner = self.expression()?;
                let close = self.expect(TokenKind::Punctuation, ")")?;
                Ok(SyntaxNode::production(
                    Category::ParenthesizedExpression,
                    vec![open, inner, close],
                ))
            }
            _ => Err(self.error(&["expression"])),
        }
    }

    fn call(&mut self) -> Result<SyntaxNode, ParseError> {
        let mut children = vec![self.bump(), self.bump()];
        if !self.check(TokenKind::Punctuation, ")") {
            loop {
                children.push(self.expression()?);
                if self.check(TokenKind::Punctuation, ",") {
                    children.push(self.bump());
                } else {
                    break;
                }
            }
        }
        children.push(self.expect(TokenKind::Punctuation, ")")?);
        Ok(SyntaxNode::production(Category::CallExpression, children))
    }
}
