use std::fmt;

use serde_json::{json, Map, Value};
use thiserror::Error;

use super::lexer::{tokenize, Token, TokenKind};

/// Grammar productions of the accepted C-like subset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Category {
    TranslationUnit,
    FunctionDefinition,
    ParameterList,
    Block,
    DeclarationStatement,
    AssignmentStatement,
    IfStatement,
    WhileStatement,
    ReturnStatement,
    ExpressionStatement,
    BinaryExpression,
    UnaryExpression,
    CallExpression,
    IdentifierExpression,
    LiteralExpression,
    ParenthesizedExpression,
}

impl Category {
    pub const ALL: [Category; 16] = [
        Category::TranslationUnit,
        Category::FunctionDefinition,
        Category::ParameterList,
        Category::Block,
        Category::DeclarationStatement,
        Category::AssignmentStatement,
        Category::IfStatement,
        Category::WhileStatement,
        Category::ReturnStatement,
        Category::ExpressionStatement,
        Category::BinaryExpression,
        Category::UnaryExpression,
        Category::CallExpression,
        Category::IdentifierExpression,
        Category::LiteralExpression,
        Category::ParenthesizedExpression,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Category::TranslationUnit => "translation-unit",
            Category::FunctionDefinition => "function-definition",
            Category::ParameterList => "parameter-list",
            Category::Block => "block",
            Category::DeclarationStatement => "declaration-statement",
            Category::AssignmentStatement => "assignment-statement",
            Category::IfStatement => "if-statement",
            Category::WhileStatement => "while-statement",
            Category::ReturnStatement => "return-statement",
            Category::ExpressionStatement => "expression-statement",
            Category::BinaryExpression => "binary-expression",
            Category::UnaryExpression => "unary-expression",
            Category::CallExpression => "call-expression",
            Category::IdentifierExpression => "identifier-expression",
            Category::LiteralExpression => "literal-expression",
            Category::ParenthesizedExpression => "parenthesized-expression",
        }
    }

    pub fn from_name(name: &str) -> Option<Category> {
        Category::ALL.into_iter().find(|c| c.as_str() == name)
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A node of the concrete parse tree: either a production with ordered
/// children or a token leaf.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SyntaxNode {
    Production {
        category: Category,
        children: Vec<SyntaxNode>,
    },
    Token(Token),
}

impl SyntaxNode {
    pub fn production(category: Category, children: Vec<SyntaxNode>) -> Self {
        SyntaxNode::Production { category, children }
    }

    pub fn category(&self) -> Option<Category> {
        match self {
            SyntaxNode::Production { category, .. } => Some(*category),
            SyntaxNode::Token(_) => None,
        }
    }

    pub fn children(&self) -> &[SyntaxNode] {
        match self {
            SyntaxNode::Production { children, .. } => children,
            SyntaxNode::Token(_) => &[],
        }
    }

    pub fn token(&self) -> Option<&Token> {
        match self {
            SyntaxNode::Token(token) => Some(token),
            SyntaxNode::Production { .. } => None,
        }
    }

    /// First direct child token of the given kind.
    pub fn child_token(&self, kind: TokenKind) -> Option<&Token> {
        self.children()
            .iter()
            .filter_map(SyntaxNode::token)
            .find(|t| t.kind == kind)
    }

    /// Pre-order traversal of this subtree.
    pub fn walk(&self) -> Walk<'_> {
        Walk { stack: vec![self] }
    }

    /// First and last token positions covered by this subtree.
    pub fn span(&self) -> Option<((u32, u32), (u32, u32))> {
        let mut tokens = self.walk().filter_map(SyntaxNode::token);
        let first = tokens.next()?;
        let last = tokens.last().unwrap_or(first);
        Some(((first.line, first.column), (last.line, last.column)))
    }
}

pub struct Walk<'a> {
    stack: Vec<&'a SyntaxNode>,
}

impl<'a> Iterator for Walk<'a> {
    type Item = &'a SyntaxNode;

    fn next(&mut self) -> Option<Self::Item> {
        let node = self.stack.pop()?;
        self.stack.extend(node.children().iter().rev());
        Some(node)
    }
}

/// Concrete parse tree rooted at a translation unit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseTree {
    root: SyntaxNode,
}

impl ParseTree {
    /// Wraps top-level items in a translation unit.
    pub fn new(items: Vec<SyntaxNode>) -> Self {
        ParseTree {
            root: SyntaxNode::production(Category::TranslationUnit, items),
        }
    }

    pub fn root(&self) -> &SyntaxNode {
        &self.root
    }

    pub fn walk(&self) -> Walk<'_> {
        self.root.walk()
    }

    /// Number of production nodes.
    pub fn production_count(&self) -> usize {
        self.walk().filter(|n| n.category().is_some()).count()
    }

    pub fn token_count(&self) -> usize {
        self.walk().filter(|n| n.token().is_some()).count()
    }

    /// Serializes to the external parse-tree document format.
    pub fn to_json_value(&self) -> Value {
        node_to_value(&self.root)
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(&self.to_json_value())
            .expect("parse tree values always serialize");
        text.push('\n');
        text
    }
}

fn node_to_value(node: &SyntaxNode) -> Value {
    match node {
        SyntaxNode::Production { category, children } => json!({
            "category": category.as_str(),
            "children": children.iter().map(node_to_value).collect::<Vec<_>>(),
        }),
        SyntaxNode::Token(token) => json!({
            "category": token.kind.as_str(),
            "token": token.text,
            "line": token.line,
            "column": token.column,
        }),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("schema error at {path}: {message}")]
pub struct SchemaError {
    pub path: String,
    pub message: String,
}

fn schema_error(path: &str, message: impl Into<String>) -> SchemaError {
    SchemaError {
        path: path.to_string(),
        message: message.into(),
    }
}

fn allowed_categories() -> String {
    Category::ALL
        .iter()
        .map(|c| c.as_str())
        .chain(TokenKind::ALL.iter().map(|k| k.as_str()))
        .collect::<Vec<_>>()
        .join(", ")
}

/// Reads a parse tree from its external JSON document form.
///
/// Production nodes carry `category` and `children`; token leaves carry a
/// token-class `category` and the `token` text, optionally with `line` and
/// `column`.
pub fn import_parse_tree(document: &str) -> Result<ParseTree, SchemaError> {
    let value: Value =
        serde_json::from_str(document).map_err(|e| schema_error("$", format!("invalid JSON: {e}")))?;
    let root = value_to_node(&value, "$")?;
    match root.category() {
        Some(Category::TranslationUnit) => Ok(ParseTree { root }),
        _ => Err(schema_error("$.category", "root must be a translation-unit")),
    }
}

fn value_to_node(value: &Value, path: &str) -> Result<SyntaxNode, SchemaError> {
    let object = value
        .as_object()
        .ok_or_else(|| schema_error(path, "expected an object"))?;
    let category = object
        .get("category")
        .ok_or_else(|| schema_error(path, "missing field `category`"))?
        .as_str()
        .ok_or_else(|| schema_error(&format!("{path}.category"), "expected a string"))?;

    if let Some(category) = Category::from_name(category) {
        if object.contains_key("token") {
            return Err(schema_error(
                &format!("{path}.token"),
                format!("production `{category}` cannot carry a token"),
            ));
        }
        let children = match object.get("children") {
            None => Vec::new(),
            Some(Value::Array(items)) => items
                .iter()
                .enumerate()
                .map(|(i, item)| value_to_node(item, &format!("{path}.children[{i}]")))
                .collect::<Result<_, _>>()?,
            Some(_) => return Err(schema_error(&format!("{path}.children"), "expected an array")),
        };
        return Ok(SyntaxNode::Production { category, children });
    }

    let Some(kind) = TokenKind::from_name(category) else {
        return Err(schema_error(
            &format!("{path}.category"),
            format!("unknown category `{category}`; allowed: {}", allowed_categories()),
        ));
    };
    token_from_object(object, kind, path).map(SyntaxNode::Token)
}

fn token_from_object(object: &Map<String, Value>, kind: TokenKind, path: &str) -> Result<Token, SchemaError> {
    let text = object
        .get("token")
        .ok_or_else(|| schema_error(path, format!("`{kind}` leaf is missing field `token`")))?
        .as_str()
        .ok_or_else(|| schema_error(&format!("{path}.token"), "expected a string"))?;
    match object.get("children") {
        Some(Value::Array(items)) if items.is_empty() => {}
        None => {}
        Some(_) => {
            return Err(schema_error(
                &format!("{path}.children"),
                "token leaves cannot have children",
            ))
        }
    }

    let lexed = tokenize(text).map_err(|e| schema_error(&format!("{path}.token"), e.message))?;
    match lexed.as_slice() {
        [single] if single.kind == kind && single.text == text => {}
        _ => {
            return Err(schema_error(
                &format!("{path}.token"),
                format!("`{text}` is not a single {kind} token"),
            ))
        }
    }

    let position = |field: &str| -> Result<u32, SchemaError> {
        match object.get(field) {
            None => Ok(0),
            Some(v) => v
                .as_u64()
                .and_then(|n| u32::try_from(n).ok())
                .ok_or_else(|| schema_error(&format!("{path}.{field}"), "expected a non-negative integer")),
        }
    };

    Ok(Token {
        kind,
        text: text.to_string(),
        line: position("line")?,
        column: position("column")?,
    })
}
