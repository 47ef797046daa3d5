//! Program-derived semantics graph construction.
//!
//! Each production in the parse tree (other than the translation-unit root)
//! is classified into a syntactic concept plus one or more concepts on the
//! level above it, chosen by the ontology mapping and refined by a variant
//! (operator, literal class, self-call, accumulating assignment). The graph
//! holds the classified syntactic concepts and the minimum-dependency closure
//! of the selected upper concepts. Each concept appears once; repetition is
//! recorded in `occurrences`.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use thiserror::Error;

use crate::frontend::{Category, ParseTree, SyntaxNode, TokenKind};
use crate::graph::{EdgeKind, GraphEdge, GraphNode, Label, LabeledGraph, NodeId};
use crate::ontology::{AbstractionLevel, LevelKind, OntologyError, PslOntology, Strength};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PsgError {
    #[error("category `{0}` has no mapping in the ontology")]
    UnmappedCategory(String),
    #[error(transparent)]
    Ontology(#[from] OntologyError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Psg {
    nodes: Vec<GraphNode>,
    edges: Vec<GraphEdge>,
    ontology_id: String,
    levels: Vec<AbstractionLevel>,
}

impl Psg {
    /// Assembles a graph from raw parts and checks its invariants.
    pub fn from_parts(
        nodes: Vec<GraphNode>,
        edges: Vec<GraphEdge>,
        ontology_id: String,
        levels: Vec<AbstractionLevel>,
    ) -> Result<Self, Vec<String>> {
        let psg = Psg {
            nodes,
            edges,
            ontology_id,
            levels,
        };
        let problems = psg.check_invariants();
        if problems.is_empty() {
            Ok(psg)
        } else {
            Err(problems)
        }
    }

    pub fn ontology_id(&self) -> &str {
        &self.ontology_id
    }

    pub fn levels(&self) -> &[AbstractionLevel] {
        &self.levels
    }

    pub fn node_by_label(&self, label: &str) -> Option<&GraphNode> {
        self.nodes.iter().find(|n| n.label.as_str() == label)
    }

    pub fn contains(&self, label: &str) -> bool {
        self.node_by_label(label).is_some()
    }

    pub fn nodes_at_level(&self, k: u32) -> impl Iterator<Item = &GraphNode> {
        self.nodes.iter().filter(move |n| n.level == Some(k))
    }

    pub fn syntactic_level(&self) -> Option<u32> {
        self.levels
            .iter()
            .find(|l| l.kind == LevelKind::Syntactic)
            .map(|l| l.k)
    }

    /// Lists every broken structural invariant; empty when the graph is sound.
    pub fn check_invariants(&self) -> Vec<String> {
        let mut problems = Vec::new();
        let syntactic = self.levels.iter().filter(|l| l.kind == LevelKind::Syntactic).count();
        if syntactic != 1 {
            problems.push(format!("exactly one syntactic level required, found {syntactic}"));
        }
        let known_levels: BTreeSet<u32> = self.levels.iter().map(|l| l.k).collect();
        let mut labels = BTreeSet::new();
        for (index, node) in self.nodes.iter().enumerate() {
            if node.id != index {
                problems.push(format!("node ids must be dense: position {index} holds id {}", node.id));
            }
            if !labels.insert(node.label.as_str()) {
                problems.push(format!("duplicate label `{}`", node.label));
            }
            match node.level {
                None => problems.push(format!("node `{}` has no level", node.label)),
                Some(k) if !known_levels.contains(&k) => {
                    problems.push(format!("node `{}` is at unknown level {k}", node.label))
                }
                Some(_) => {}
            }
            if node.occurrences == 0 {
                problems.push(format!("node `{}` has zero occurrences", node.label));
            }
        }
        let level_of = |id: NodeId| self.nodes.get(id).and_then(|n| n.level);
        let mut has_minimum_parent = vec![false; self.nodes.len()];
        for edge in &self.edges {
            let (Some(from), Some(to)) = (level_of(edge.from), level_of(edge.to)) else {
                problems.push(format!("edge {}->{} has a dangling endpoint", edge.from, edge.to));
                continue;
            };
            match edge.kind {
                EdgeKind::Child => problems.push(format!("edge {}->{} is a tree edge", edge.from, edge.to)),
                EdgeKind::DependencyMinimum if from != to + 1 => problems.push(format!(
                    "minimum edge {}->{} does not go up exactly one level",
                    edge.from, edge.to
                )),
                EdgeKind::DependencyMinimum => has_minimum_parent[edge.from] = true,
                EdgeKind::DependencyPotential => {}
            }
        }
        for node in &self.nodes {
            if node.level.is_some_and(|k| k > 0) && !has_minimum_parent.get(node.id).copied().unwrap_or(true) {
                problems.push(format!("node `{}` has no minimum edge to the level above", node.label));
            }
        }
        problems
    }
}

impl LabeledGraph for Psg {
    fn nodes(&self) -> &[GraphNode] {
        &self.nodes
    }

    fn edges(&self) -> &[GraphEdge] {
        &self.edges
    }
}

fn function_name(function: &SyntaxNode) -> Option<&str> {
    function.child_token(TokenKind::Identifier).map(|t| t.text.as_str())
}

fn callee(call: &SyntaxNode) -> Option<&str> {
    call.child_token(TokenKind::Identifier).map(|t| t.text.as_str())
}

/// Names of functions whose own body contains a call to themselves.
pub fn detect_recursion(tree: &ParseTree) -> BTreeSet<String> {
    tree.walk()
        .filter(|n| n.category() == Some(Category::FunctionDefinition))
        .filter_map(|function| {
            let name = function_name(function)?;
            function
                .walk()
                .skip(1)
                .any(|n| n.category() == Some(Category::CallExpression) && callee(n) == Some(name))
                .then(|| name.to_string())
        })
        .collect()
}

/// Whether the assignment's target is read on its right-hand side.
fn is_accumulating(assignment: &SyntaxNode) -> bool {
    let Some(target) = assignment.child_token(TokenKind::Identifier) else {
        return false;
    };
    assignment
        .children()
        .iter()
        .filter(|c| c.category().is_some())
        .flat_map(SyntaxNode::walk)
        .filter(|n| n.category() == Some(Category::IdentifierExpression))
        .any(|n| n.child_token(TokenKind::Identifier).map(|t| &t.text) == Some(&target.text))
}

fn variant<'t>(node: &'t SyntaxNode, category: Category, function: Option<&str>, recursive: &BTreeSet<String>) -> Option<&'t str> {
    match category {
        Category::BinaryExpression | Category::UnaryExpression => {
            node.child_token(TokenKind::Operator).map(|t| t.text.as_str())
        }
        Category::LiteralExpression => node
            .children()
            .iter()
            .filter_map(SyntaxNode::token)
            .map(|t| t.kind.as_str())
            .next(),
        Category::CallExpression => {
            let name = function.filter(|f| recursive.contains(*f))?;
            (callee(node) == Some(name)).then_some("self")
        }
        Category::AssignmentStatement => is_accumulating(node).then_some("accumulate"),
        _ => None,
    }
}

/// One classified construct: its syntactic concept and selected upper concepts.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Construct<'o> {
    syntactic: &'o str,
    upper: Vec<&'o str>,
}

fn classify<'o>(tree: &ParseTree, o: &'o PslOntology) -> Result<Vec<Construct<'o>>, PsgError> {
    let recursive = detect_recursion(tree);
    let mut constructs = Vec::new();
    // Explicit stack of (node, enclosing function name).
    let mut stack: Vec<(&SyntaxNode, Option<&str>)> =
        tree.root().children().iter().rev().map(|c| (c, None)).collect();
    while let Some((node, function)) = stack.pop() {
        let Some(category) = node.category() else {
            continue;
        };
        let function = if category == Category::FunctionDefinition {
            function_name(node)
        } else {
            function
        };
        let resolved = o
            .resolve(category, variant(node, category, function, &recursive))
            .ok_or_else(|| PsgError::UnmappedCategory(category.as_str().to_string()))?;
        constructs.push(Construct {
            syntactic: resolved.syntactic,
            upper: resolved.upper,
        });
        stack.extend(node.children().iter().rev().map(|c| (c, function)));
    }
    Ok(constructs)
}

/// Occurrence counts of syntactic-level concepts. The translation-unit root
/// is a container and is not counted; tokens are absorbed by their production.
pub fn classify_syntax(tree: &ParseTree, o: &PslOntology) -> Result<BTreeMap<String, u64>, PsgError> {
    let mut counts = BTreeMap::new();
    for construct in classify(tree, o)? {
        *counts.entry(construct.syntactic.to_string()).or_insert(0) += 1;
    }
    Ok(counts)
}

pub fn build_psg(tree: &ParseTree, o: &PslOntology) -> Result<Psg, PsgError> {
    let constructs = classify(tree, o)?;

    let mut occurrences: HashMap<&str, u64> = HashMap::new();
    let mut syntactic_targets: HashMap<&str, BTreeSet<&str>> = HashMap::new();
    for construct in &constructs {
        *occurrences.entry(construct.syntactic).or_insert(0) += 1;
        syntactic_targets
            .entry(construct.syntactic)
            .or_default()
            .extend(construct.upper.iter().copied());
        for id in o.minimum_closure(&construct.upper)? {
            let id = o.concept(&id).map(|c| c.id.as_str()).expect("closure yields known concepts");
            *occurrences.entry(id).or_insert(0) += 1;
        }
    }

    // Ontology order within each level, most abstract level first.
    let mut ordered: Vec<(u32, usize, &str)> = o
        .concepts
        .iter()
        .enumerate()
        .filter(|(_, c)| occurrences.contains_key(c.id.as_str()))
        .map(|(index, c)| (c.level, index, c.id.as_str()))
        .collect();
    ordered.sort_unstable();

    let mut ids: HashMap<&str, NodeId> = HashMap::new();
    let nodes: Vec<GraphNode> = ordered
        .iter()
        .enumerate()
        .map(|(id, (level, _, concept))| {
            ids.insert(concept, id);
            GraphNode {
                id,
                label: Label::new(*concept).expect("concept ids are non-empty"),
                level: Some(*level),
                occurrences: occurrences[concept],
            }
        })
        .collect();

    let n = o.syntactic_level();
    let mut edges = BTreeSet::new();
    for (level, _, concept) in &ordered {
        let from = ids[concept];
        if *level == n {
            for target in &syntactic_targets[concept] {
                if let Some(&to) = ids.get(target) {
                    edges.insert(GraphEdge { from, to, kind: EdgeKind::DependencyMinimum });
                }
            }
            continue;
        }
        for rule in o.rules_from(concept, Strength::Minimum) {
            if let Some(&to) = ids.get(rule.to.as_str()) {
                edges.insert(GraphEdge { from, to, kind: EdgeKind::DependencyMinimum });
            }
        }
    }
    for rule in o.rules.iter().filter(|r| r.strength == Strength::Potential) {
        if let (Some(&from), Some(&to)) = (ids.get(rule.from.as_str()), ids.get(rule.to.as_str())) {
            edges.insert(GraphEdge { from, to, kind: EdgeKind::DependencyPotential });
        }
    }

    let mut levels = o.levels.clone();
    levels.sort_by_key(|l| l.k);
    Ok(Psg {
        nodes,
        edges: edges.into_iter().collect(),
        ontology_id: o.id.clone(),
        levels,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::parse_source;
    use crate::graph::node_multiset;
    use crate::ontology::base_ontology;

    const RECURSIVE: &str = include_str!("../corpus/power_recursive.c");
    const ITERATIVE: &str = include_str!("../corpus/power_iterative.c");

    fn psg_of(source: &str) -> Psg {
        build_psg(&parse_source(source).unwrap(), &base_ontology()).unwrap()
    }

    #[test]
    fn classify_return_literal() {
        let tree = parse_source("return 1;").unwrap();
        let counts = classify_syntax(&tree, &base_ontology()).unwrap();
        let expected: BTreeMap<String, u64> =
            [("return-statement".to_string(), 1), ("literal-int".to_string(), 1)].into();
        assert_eq!(counts, expected);
    }

    #[test]
    fn classify_empty_unit() {
        let tree = parse_source("").unwrap();
        assert!(classify_syntax(&tree, &base_ontology()).unwrap().is_empty());
        let psg = build_psg(&tree, &base_ontology()).unwrap();
        assert!(psg.nodes().is_empty());
    }

    #[test]
    fn classify_counts_repeats() {
        let tree = parse_source("x = x + 1; y = y + x;").unwrap();
        let counts = classify_syntax(&tree, &base_ontology()).unwrap();
        assert_eq!(counts["assignment-statement"], 2);
        assert_eq!(counts["identifier-expression"], 3);
        assert_eq!(counts["binary-expression"], 2);
    }

    #[test]
    fn unmapped_category_reported() {
        let mut o = base_ontology();
        o.mapping.retain(|m| m.category != "return-statement");
        let tree = parse_source("return 1;").unwrap();
        assert_eq!(
            classify_syntax(&tree, &o),
            Err(PsgError::UnmappedCategory("return-statement".into()))
        );
        assert!(build_psg(&tree, &o).is_err());
    }

    #[test]
    fn recursion_detection() {
        let recursive = detect_recursion(&parse_source(RECURSIVE).unwrap());
        assert_eq!(recursive, BTreeSet::from(["power".to_string()]));
        assert!(detect_recursion(&parse_source(ITERATIVE).unwrap()).is_empty());
        let other = parse_source("int g(int a) { return a; } int f(int a) { return g(a); }").unwrap();
        assert!(detect_recursion(&other).is_empty());
    }

    #[test]
    fn return_inside_function() {
        let psg = psg_of("int f() { return 1; }");
        for concept in ["Function Exit", "Constant Data", "Integer Value", "Value Return", "Control Flow", "Data Organization"] {
            assert!(psg.contains(concept), "missing {concept}");
        }
        assert!(psg.contains("return-statement"));
        assert!(psg.contains("literal-int"));
        assert!(psg.check_invariants().is_empty());

        // every semantic node is reachable from a syntactic node
        let n = psg.syntactic_level().unwrap();
        let mut reached: BTreeSet<NodeId> = psg.nodes_at_level(n).map(|node| node.id).collect();
        let mut frontier: Vec<NodeId> = reached.iter().copied().collect();
        while let Some(id) = frontier.pop() {
            for edge in psg.edges().iter().filter(|e| e.from == id && e.kind == EdgeKind::DependencyMinimum) {
                if reached.insert(edge.to) {
                    frontier.push(edge.to);
                }
            }
        }
        assert_eq!(reached.len(), psg.nodes().len());
    }

    #[test]
    fn recursive_and_iterative_concepts() {
        let recursive = psg_of(RECURSIVE);
        assert!(recursive.contains("Recursion"));
        assert!(recursive.contains("Self-Invocation"));
        assert!(!recursive.contains("Iteration"));

        let iterative = psg_of(ITERATIVE);
        assert!(iterative.contains("Iteration"));
        assert!(iterative.contains("Loop With Counter"));
        assert!(!iterative.contains("Recursion"));
        assert!(!iterative.contains("Self-Invocation"));
    }

    #[test]
    fn concepts_appear_once_with_summed_occurrences() {
        let psg = psg_of("int f(int a) { return a * a * a; }");
        let multiset = node_multiset(&psg);
        assert_eq!(multiset.cardinality() as usize, psg.nodes().len());
        assert_eq!(psg.node_by_label("Multiplication").unwrap().occurrences, 2);
        assert_eq!(psg.node_by_label("identifier-expression").unwrap().occurrences, 3);
    }

    #[test]
    fn potential_edges_need_both_endpoints() {
        let psg = psg_of(ITERATIVE);
        let id = |label: &str| psg.node_by_label(label).unwrap().id;
        let potential: Vec<_> = psg
            .edges()
            .iter()
            .filter(|e| e.kind == EdgeKind::DependencyPotential)
            .collect();
        assert!(potential
            .iter()
            .any(|e| e.from == id("Loop With Counter") && e.to == id("Ordering Test")));
        assert!(potential.iter().all(|e| e.from < psg.nodes().len() && e.to < psg.nodes().len()));
        // Recursion is absent, so the Iteration <-> Recursion cycle is not drawn.
        assert!(!psg.contains("Recursion"));
    }

    #[test]
    fn accumulating_assignment_variant() {
        let plain = psg_of("int f() { int r = 0; r = 5; return r; }");
        assert!(!plain.contains("Accumulator Update"));
        let accumulating = psg_of("int f() { int r = 0; r = r + 5; return r; }");
        assert!(accumulating.contains("Accumulator Update"));
    }

    #[test]
    fn deterministic() {
        assert_eq!(psg_of(RECURSIVE), psg_of(RECURSIVE));
    }

    #[test]
    fn invariant_checker_catches_duplicates_and_orphans() {
        let psg = psg_of("int f() { return 1; }");
        let mut nodes = psg.nodes().to_vec();
        let last = nodes.len() - 1;
        nodes[last].label = nodes[0].label.clone();
        let problems = Psg::from_parts(nodes, psg.edges().to_vec(), "x".into(), psg.levels().to_vec()).unwrap_err();
        assert!(problems.iter().any(|p| p.contains("duplicate label")));

        let edges: Vec<GraphEdge> = psg
            .edges()
            .iter()
            .filter(|e| e.kind != EdgeKind::DependencyMinimum)
            .copied()
            .collect();
        let problems = Psg::from_parts(psg.nodes().to_vec(), edges, "x".into(), psg.levels().to_vec()).unwrap_err();
        assert!(problems.iter().any(|p| p.contains("no minimum edge")));
    }
}
