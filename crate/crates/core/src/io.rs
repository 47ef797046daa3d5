//! JSON graph documents, DOT rendering, and report formatting.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::frontend::SchemaError;
use crate::graph::{EdgeKind, GraphEdge, GraphNode, LabeledGraph, NodeId};
use crate::metric::{Rational, SimilarityReport};
use crate::ontology::{AbstractionLevel, LevelKind};
use crate::psg::Psg;
use crate::spt::Spt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Representation {
    Spt,
    Psg,
}

impl Representation {
    pub fn as_str(self) -> &'static str {
        match self {
            Representation::Spt => "spt",
            Representation::Psg => "psg",
        }
    }
}

/// Either kind of graph, as read back from a document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Graph {
    Spt(Spt),
    Psg(Psg),
}

impl Graph {
    pub fn representation(&self) -> Representation {
        match self {
            Graph::Spt(_) => Representation::Spt,
            Graph::Psg(_) => Representation::Psg,
        }
    }

    pub fn as_labeled(&self) -> &dyn LabeledGraph {
        match self {
            Graph::Spt(g) => g,
            Graph::Psg(g) => g,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphStats {
    pub nodes: usize,
    pub edges: usize,
}

/// On-disk form of a graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphDocument {
    pub representation: Representation,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub root: Option<NodeId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ontology: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub levels: Vec<AbstractionLevel>,
    pub nodes: Vec<GraphNode>,
    pub edges: Vec<GraphEdge>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stats: Option<GraphStats>,
}

impl GraphDocument {
    pub fn from_spt(spt: &Spt) -> Self {
        GraphDocument {
            representation: Representation::Spt,
            root: (!spt.is_empty()).then(|| spt.root()),
            ontology: None,
            levels: Vec::new(),
            nodes: spt.nodes().to_vec(),
            edges: spt.edges().to_vec(),
            stats: Some(stats(spt)),
        }
    }

    pub fn from_psg(psg: &Psg) -> Self {
        GraphDocument {
            representation: Representation::Psg,
            root: None,
            ontology: Some(psg.ontology_id().to_string()),
            levels: psg.levels().to_vec(),
            nodes: psg.nodes().to_vec(),
            edges: psg.edges().to_vec(),
            stats: Some(stats(psg)),
        }
    }

    pub fn from_graph(graph: &Graph) -> Self {
        match graph {
            Graph::Spt(g) => Self::from_spt(g),
            Graph::Psg(g) => Self::from_psg(g),
        }
    }

    pub fn into_graph(self) -> Result<Graph, SchemaError> {
        if let Some(s) = &self.stats {
            if s.nodes != self.nodes.len() || s.edges != self.edges.len() {
                return Err(err("stats", format!(
                    "stats say {} nodes and {} edges, document has {} and {}",
                    s.nodes, s.edges, self.nodes.len(), self.edges.len()
                )));
            }
        }
        match self.representation {
            Representation::Spt => {
                if self.ontology.is_some() || !self.levels.is_empty() {
                    return Err(err("representation", "an spt document carries no ontology or levels"));
                }
                let root = match self.root {
                    Some(r) => r,
                    None if self.nodes.is_empty() => 0,
                    None => return Err(err("root", "missing root")),
                };
                Spt::from_parts(self.nodes, self.edges, root)
                    .map(Graph::Spt)
                    .map_err(|m| err("nodes", m))
            }
            Representation::Psg => {
                if self.root.is_some() {
                    return Err(err("root", "a psg document has no root"));
                }
                let ontology = self.ontology.ok_or_else(|| err("ontology", "missing ontology id"))?;
                Psg::from_parts(self.nodes, self.edges, ontology, self.levels)
                    .map(Graph::Psg)
                    .map_err(|problems| err("nodes", problems.join("; ")))
            }
        }
    }
}

fn stats(g: &dyn LabeledGraph) -> GraphStats {
    GraphStats {
        nodes: g.nodes().len(),
        edges: g.edges().len(),
    }
}

fn err(path: &str, message: impl Into<String>) -> SchemaError {
    SchemaError {
        path: path.to_string(),
        message: message.into(),
    }
}

/// Pretty JSON with a trailing newline.
pub fn to_json(graph: &Graph) -> String {
    document_json(&GraphDocument::from_graph(graph))
}

pub fn document_json(doc: &GraphDocument) -> String {
    let mut text = serde_json::to_string_pretty(doc).expect("graph documents always serialize");
    text.push('\n');
    text
}

pub fn from_json(text: &str) -> Result<Graph, SchemaError> {
    let doc: GraphDocument = serde_json::from_str(text).map_err(|e| err("$", e.to_string()))?;
    doc.into_graph()
}

fn quote(text: &str) -> String {
    let mut out = String::with_capacity(text.len() + 2);
    out.push('"');
    for c in text.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            _ => out.push(c),
        }
    }
    out.push('"');
    out
}

fn node_line(out: &mut String, indent: &str, node: &GraphNode) {
    let _ = writeln!(out, "{indent}n{} [label={}];", node.id, quote(node.label.as_str()));
}

fn edge_line(out: &mut String, edge: &GraphEdge) {
    let style = match edge.kind {
        EdgeKind::Child | EdgeKind::DependencyMinimum => "solid",
        EdgeKind::DependencyPotential => "dashed",
    };
    let _ = writeln!(out, "  n{} -> n{} [style={style}];", edge.from, edge.to);
}

pub fn spt_to_dot(spt: &Spt) -> String {
    let mut out = String::from("digraph spt {\n  node [shape=box];\n");
    for node in spt.nodes() {
        node_line(&mut out, "  ", node);
    }
    for edge in spt.edges() {
        edge_line(&mut out, edge);
    }
    out.push_str("}\n");
    out
}

/// One cluster per abstraction level, most abstract first.
pub fn psg_to_dot(psg: &Psg) -> String {
    let mut out = String::from("digraph psg {\n  rankdir=BT;\n  node [shape=ellipse];\n");
    for level in psg.levels() {
        let syntactic = level.kind == LevelKind::Syntactic;
        let _ = writeln!(out, "  subgraph cluster_{} {{", level.k);
        let kind = if syntactic { "syntactic" } else { "semantic" };
        let _ = writeln!(out, "    label={};", quote(&format!("{} ({kind})", level.name)));
        if syntactic {
            out.push_str("    style=filled;\n    fillcolor=lightgrey;\n");
        }
        for node in psg.nodes_at_level(level.k) {
            node_line(&mut out, "    ", node);
        }
        out.push_str("  }\n");
    }
    for edge in psg.edges() {
        edge_line(&mut out, edge);
    }
    out.push_str("}\n");
    out
}

pub fn to_dot(graph: &Graph) -> String {
    match graph {
        Graph::Spt(g) => spt_to_dot(g),
        Graph::Psg(g) => psg_to_dot(g),
    }
}

/// `i/n`, followed by the reduced fraction when that differs.
fn quotient(i: u64, n: u64, reduced: &Rational) -> String {
    let raw = format!("{i}/{n}");
    if raw == reduced.to_string() {
        raw
    } else {
        format!("{raw} = {reduced}")
    }
}

/// Step-by-step report with exact fractions and two-decimal percentages.
pub fn report_to_text(r: &SimilarityReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "|N1| = {}, |N2| = {}", r.n1_card, r.n2_card);
    let _ = writeln!(out, "1. intersections: |I1| = {}, |I2| = {}", r.i1_card, r.i2_card);
    let _ = writeln!(
        out,
        "2. percentages: P1 = {} ({}%), P2 = {} ({}%)",
        quotient(r.i1_card, r.n1_card, &r.p1),
        r.p1_percent(),
        quotient(r.i2_card, r.n2_card, &r.p2),
        r.p2_percent()
    );
    let _ = writeln!(out, "3. distance: eta = |P1 - P2| = {} ({}%)", r.eta, r.eta_percent());
    let _ = writeln!(out, "4. lower bound: L = |min(P1, P2) - eta| = {} ({}%)", r.lower, r.lower_percent());
    let _ = writeln!(
        out,
        "5. range: R = [{}, {}] = [{}%, {}%]",
        r.range_lo, r.range_hi, r.range_lo_percent(), r.range_hi_percent()
    );
    let _ = writeln!(out, "   average: A = {} = {}%", r.average, r.average_percent());
    out
}

pub const CSV_HEADER: &str = "n1,n2,i1,i2,p1,p2,eta,lower,range_lo,range_hi,average";

pub fn report_csv_row(r: &SimilarityReport) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{},{},{}",
        r.n1_card,
        r.n2_card,
        r.i1_card,
        r.i2_card,
        r.p1_percent(),
        r.p2_percent(),
        r.eta_percent(),
        r.lower_percent(),
        r.range_lo_percent(),
        r.range_hi_percent(),
        r.average_percent()
    )
}

/// Header plus one row.
pub fn report_to_csv(r: &SimilarityReport) -> String {
    format!("{CSV_HEADER}\n{}\n", report_csv_row(r))
}
