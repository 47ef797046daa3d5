//! Shared data model: labels, label multisets, and the node/edge records
//! used by both simplified parse trees and semantics graphs.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("labels must be non-empty")]
pub struct EmptyLabel;

/// Opaque, case-sensitive node label. Comparison is exact text equality.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Label(String);

impl Label {
    pub fn new(text: impl Into<String>) -> Result<Self, EmptyLabel> {
        let text = text.into();
        if text.is_empty() {
            return Err(EmptyLabel);
        }
        Ok(Label(text))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl TryFrom<String> for Label {
    type Error = EmptyLabel;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        Label::new(value)
    }
}

impl From<Label> for String {
    fn from(label: Label) -> String {
        label.0
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Multiset of labels. Every stored multiplicity is at least one.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LabelMultiset {
    entries: BTreeMap<Label, u64>,
}

impl LabelMultiset {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `count` copies of `label`. Adding zero copies is a no-op.
    pub fn insert(&mut self, label: Label, count: u64) {
        if count == 0 {
            return;
        }
        *self.entries.entry(label).or_insert(0) += count;
    }

    pub fn multiplicity(&self, label: &Label) -> u64 {
        self.entries.get(label).copied().unwrap_or(0)
    }

    pub fn contains(&self, label: &Label) -> bool {
        self.entries.contains_key(label)
    }

    /// |N|: the sum of all multiplicities.
    pub fn cardinality(&self) -> u64 {
        self.entries.values().sum()
    }

    /// Number of distinct labels.
    pub fn support_len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Label, u64)> {
        self.entries.iter().map(|(label, count)| (label, *count))
    }
}

impl FromIterator<Label> for LabelMultiset {
    fn from_iter<I: IntoIterator<Item = Label>>(iter: I) -> Self {
        let mut multiset = LabelMultiset::new();
        for label in iter {
            multiset.insert(label, 1);
        }
        multiset
    }
}

impl FromIterator<(Label, u64)> for LabelMultiset {
    fn from_iter<I: IntoIterator<Item = (Label, u64)>>(iter: I) -> Self {
        let mut multiset = LabelMultiset::new();
        for (label, count) in iter {
            multiset.insert(label, count);
        }
        multiset
    }
}

pub type NodeId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphNode {
    pub id: NodeId,
    pub label: Label,
    /// Abstraction level; present for semantics-graph nodes only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level: Option<u32>,
    /// Number of source constructs folded into this node.
    pub occurrences: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EdgeKind {
    /// Tree containment (parent to child).
    Child,
    /// Required dependency from a level-k concept to a level-(k-1) concept.
    DependencyMinimum,
    /// Optional dependency; may cross levels or form cycles.
    DependencyPotential,
}

impl EdgeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EdgeKind::Child => "child",
            EdgeKind::DependencyMinimum => "dependency-minimum",
            EdgeKind::DependencyPotential => "dependency-potential",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct GraphEdge {
    pub from: NodeId,
    pub to: NodeId,
    pub kind: EdgeKind,
}

/// Anything exposing labeled nodes whose multiset can be compared.
pub trait LabeledGraph {
    fn nodes(&self) -> &[GraphNode];
    fn edges(&self) -> &[GraphEdge];
}

/// The multiset N of a graph: one copy of a label per node bearing it.
///
/// Semantics-graph labels are unique per graph, so every multiplicity there
/// is one; repeated constructs live in `occurrences`, which is not counted.
pub fn node_multiset<G: LabeledGraph + ?Sized>(graph: &G) -> LabelMultiset {
    graph.nodes().iter().map(|node| node.label.clone()).collect()
}
