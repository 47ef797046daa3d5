//! Aroma-style simplified parse trees.
//!
//! Every production becomes an internal node whose label concatenates its
//! children's summaries: keyword, operator, and punctuation tokens keep their
//! text; every other child (sub-productions, names, literals, type names)
//! contributes `%`. Names, literals, and type names become placeholder leaves.
//! By default wrapper productions around a lone name or literal are elided,
//! as in Aroma; [`LeafMode::All`] keeps one node per parse-tree node and
//! adds a leaf for every token.

use std::fmt;
use std::str::FromStr;

use crate::frontend::{ParseTree, SyntaxNode, Token, TokenKind};
use crate::graph::{EdgeKind, GraphEdge, GraphNode, Label, LabeledGraph, NodeId};

pub const VAR: &str = "#VAR";
pub const LIT: &str = "#LIT";
pub const TYPE: &str = "#TYPE";
const HOLE: &str = "%";

/// How many placeholder classes name-bearing leaves collapse into.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum PlaceholderMode {
    /// Identifiers, literals, and type names all become `#VAR`.
    Coarse,
    /// `#VAR`, `#LIT`, and `#TYPE` respectively.
    #[default]
    Fine,
}

/// Which tokens become leaf nodes of their own.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum LeafMode {
    /// Only placeholder tokens (names, literals, types) become leaves;
    /// keyword, operator, and punctuation text survives in parent labels.
    /// A production wrapping a single placeholder token is replaced by
    /// that leaf.
    #[default]
    Placeholders,
    /// Every token becomes a leaf.
    All,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SptOptions {
    pub placeholders: PlaceholderMode,
    pub leaves: LeafMode,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownMode(pub String);

impl fmt::Display for UnknownMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unknown mode `{}`", self.0)
    }
}

impl std::error::Error for UnknownMode {}

impl FromStr for PlaceholderMode {
    type Err = UnknownMode;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "coarse" => Ok(PlaceholderMode::Coarse),
            "fine" => Ok(PlaceholderMode::Fine),
            other => Err(UnknownMode(other.to_string())),
        }
    }
}

impl FromStr for LeafMode {
    type Err = UnknownMode;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "placeholders" => Ok(LeafMode::Placeholders),
            "all" => Ok(LeafMode::All),
            other => Err(UnknownMode(other.to_string())),
        }
    }
}

/// Simplified parse tree. Node ids are dense and assigned in pre-order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Spt {
    nodes: Vec<GraphNode>,
    edges: Vec<GraphEdge>,
    root: NodeId,
}

impl Spt {
    /// Assembles a tree from raw parts, checking it is a single rooted tree
    /// with dense ids, child edges only, and level-free nodes.
    pub fn from_parts(nodes: Vec<GraphNode>, edges: Vec<GraphEdge>, root: NodeId) -> Result<Self, String> {
        for (index, node) in nodes.iter().enumerate() {
            if node.id != index {
                return Err(format!("node ids must be dense: position {index} holds id {}", node.id));
            }
            if node.level.is_some() {
                return Err(format!("node {} carries a level", node.id));
            }
            if node.occurrences == 0 {
                return Err(format!("node {} has zero occurrences", node.id));
            }
        }
        if nodes.is_empty() {
            return if edges.is_empty() {
                Ok(Spt { nodes, edges, root: 0 })
            } else {
                Err("edges without nodes".into())
            };
        }
        if root >= nodes.len() {
            return Err(format!("root {root} does not exist"));
        }
        if edges.len() + 1 != nodes.len() {
            return Err(format!("{} nodes need {} edges, found {}", nodes.len(), nodes.len() - 1, edges.len()));
        }
        let mut parent = vec![None; nodes.len()];
        for edge in &edges {
            if edge.kind != EdgeKind::Child {
                return Err(format!("edge {}->{} is not a child edge", edge.from, edge.to));
            }
            if edge.from >= nodes.len() || edge.to >= nodes.len() {
                return Err(format!("edge {}->{} has a dangling endpoint", edge.from, edge.to));
            }
            if edge.to == root || parent[edge.to].replace(edge.from).is_some() {
                return Err(format!("node {} has more than one parent", edge.to));
            }
        }
        // Every node must reach the root through parent links.
        for start in 0..nodes.len() {
            let mut current = start;
            let mut steps = 0;
            while current != root {
                current = parent[current].ok_or_else(|| format!("node {start} is disconnected"))?;
                steps += 1;
                if steps > nodes.len() {
                    return Err(format!("cycle through node {start}"));
                }
            }
        }
        Ok(Spt { nodes, edges, root })
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn node(&self, id: NodeId) -> &GraphNode {
        &self.nodes[id]
    }

    pub fn children(&self, id: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.edges.iter().filter(move |e| e.from == id).map(|e| e.to)
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

impl LabeledGraph for Spt {
    fn nodes(&self) -> &[GraphNode] {
        &self.nodes
    }

    fn edges(&self) -> &[GraphEdge] {
        &self.edges
    }
}

fn keeps_text(token: &Token) -> bool {
    match token.kind {
        TokenKind::Keyword => !token.is_type_keyword(),
        TokenKind::Operator | TokenKind::Punctuation => true,
        TokenKind::Identifier | TokenKind::IntLiteral | TokenKind::FloatLiteral => false,
    }
}

fn leaf_text(token: &Token, mode: PlaceholderMode) -> &str {
    if keeps_text(token) {
        return &token.text;
    }
    match (mode, token.kind) {
        (PlaceholderMode::Coarse, _) => VAR,
        (PlaceholderMode::Fine, TokenKind::Identifier) => VAR,
        (PlaceholderMode::Fine, TokenKind::IntLiteral | TokenKind::FloatLiteral) => LIT,
        (PlaceholderMode::Fine, _) => TYPE,
    }
}

/// Label of a production: child summaries joined by single spaces.
fn production_label(category: &str, children: &[SyntaxNode]) -> String {
    let parts: Vec<&str> = children
        .iter()
        .map(|child| match child {
            SyntaxNode::Token(token) if keeps_text(token) => token.text.as_str(),
            _ => HOLE,
        })
        .collect();
    if parts.is_empty() {
        // An empty production still needs a non-empty label.
        category.to_string()
    } else {
        parts.join(" ")
    }
}

struct Builder {
    options: SptOptions,
    nodes: Vec<GraphNode>,
    edges: Vec<GraphEdge>,
}

impl Builder {
    fn push(&mut self, text: &str, parent: Option<NodeId>) -> NodeId {
        let id = self.nodes.len();
        self.nodes.push(GraphNode {
            id,
            label: Label::new(text).expect("SPT labels are never empty"),
            level: None,
            occurrences: 1,
        });
        if let Some(from) = parent {
            self.edges.push(GraphEdge {
                from,
                to: id,
                kind: EdgeKind::Child,
            });
        }
        id
    }

    fn visit(&mut self, node: &SyntaxNode, parent: Option<NodeId>) {
        match node {
            SyntaxNode::Production { children, .. }
                if self.options.leaves == LeafMode::Placeholders
                    && matches!(children.as_slice(), [SyntaxNode::Token(t)] if !keeps_text(t)) =>
            {
                // Wrappers around a single name or literal collapse into the leaf.
                self.visit(&children[0], parent);
            }
            SyntaxNode::Production { category, children } => {
                let id = self.push(&production_label(category.as_str(), children), parent);
                for child in children {
                    self.visit(child, Some(id));
                }
            }
            SyntaxNode::Token(token) => {
                if self.options.leaves == LeafMode::All || !keeps_text(token) {
                    let text = leaf_text(token, self.options.placeholders);
                    self.push(text, parent);
                }
            }
        }
    }
}

pub fn build_spt(tree: &ParseTree, options: SptOptions) -> Spt {
    let mut builder = Builder {
        options,
        nodes: Vec::new(),
        edges: Vec::new(),
    };
    builder.visit(tree.root(), None);
    Spt {
        nodes: builder.nodes,
        edges: builder.edges,
        root: 0,
    }
}
