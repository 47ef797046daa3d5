//! The abstraction-level ontology: levels, concepts, dependency rules, and
//! the mapping from syntactic categories to concepts.
//!
//! Level 0 is the most abstract. The highest index is the single syntactic
//! level; every other level is semantic.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::frontend::{Category, SchemaError};

/// The ontology shipped with the crate.
pub const BASE_ONTOLOGY: &str = include_str!("../ontology/base_psl.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LevelKind {
    Semantic,
    Syntactic,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbstractionLevel {
    pub k: u32,
    pub kind: LevelKind,
    pub name: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Concept {
    pub id: String,
    pub level: u32,
    pub display: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strength {
    Minimum,
    Potential,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DependencyRule {
    pub from: String,
    pub to: String,
    pub strength: Strength,
}

/// Maps one grammar category to its syntactic concept and the concepts one
/// level up. `variants` refine the upper concepts (and optionally the
/// syntactic concept) by operator, literal class, or structural pattern.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SyntacticMapping {
    pub category: String,
    pub concepts: Vec<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub variants: BTreeMap<String, Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PslOntology {
    #[serde(default = "default_id")]
    pub id: String,
    pub levels: Vec<AbstractionLevel>,
    pub concepts: Vec<Concept>,
    pub rules: Vec<DependencyRule>,
    pub mapping: Vec<SyntacticMapping>,
}

fn default_id() -> String {
    "unnamed".to_string()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    NoLevels,
    NonContiguousLevels { expected: u32, found: u32 },
    SyntacticLevelCount { found: usize },
    SyntacticLevelNotLowest { k: u32 },
    DuplicateConcept { id: String },
    UnknownLevel { concept: String, level: u32 },
    UnknownRuleEndpoint { from: String, to: String, missing: String },
    NonAdjacentMinimum { from: String, to: String },
    OrphanConcept { concept: String, level: u32 },
    NonMonotoneLevelSizes { upper: u32, upper_size: usize, lower: u32, lower_size: usize },
    UnmappedCategory { category: String },
    DuplicateMapping { category: String },
    UnknownMappingCategory { category: String },
    BadMappingConcept { category: String, variant: Option<String>, reason: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoLevels => write!(f, "ontology defines no levels"),
            Violation::NonContiguousLevels { expected, found } => {
                write!(f, "level indices must be contiguous: expected {expected}, found {found}")
            }
            Violation::SyntacticLevelCount { found } => {
                write!(f, "exactly one syntactic level required, found {found}")
            }
            Violation::SyntacticLevelNotLowest { k } => {
                write!(f, "syntactic level {k} must be the lowest (highest index) level")
            }
            Violation::DuplicateConcept { id } => write!(f, "duplicate concept `{id}`"),
            Violation::UnknownLevel { concept, level } => {
                write!(f, "concept `{concept}` refers to unknown level {level}")
            }
            Violation::UnknownRuleEndpoint { from, to, missing } => {
                write!(f, "rule `{from}` -> `{to}` refers to unknown concept `{missing}`")
            }
            Violation::NonAdjacentMinimum { from, to } => write!(
                f,
                "minimum dependency `{from}` -> `{to}` must go from level k to level k-1"
            ),
            Violation::OrphanConcept { concept, level } => write!(
                f,
                "orphan concept `{concept}` at level {level} has no minimum dependency on level {}",
                level - 1
            ),
            Violation::NonMonotoneLevelSizes { upper, upper_size, lower, lower_size } => write!(
                f,
                "level sizes must not shrink downward: level {upper} has {upper_size} concepts but level {lower} has {lower_size}"
            ),
            Violation::UnmappedCategory { category } => write!(f, "category `{category}` has no mapping entry"),
            Violation::DuplicateMapping { category } => {
                write!(f, "category `{category}` appears in more than one mapping entry")
            }
            Violation::UnknownMappingCategory { category } => {
                write!(f, "mapping entry for unknown category `{category}`")
            }
            Violation::BadMappingConcept { category, variant, reason } => match variant {
                Some(v) => write!(f, "mapping `{category}` variant `{v}`: {reason}"),
                None => write!(f, "mapping `{category}`: {reason}"),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OntologyError {
    #[error(transparent)]
    Schema(#[from] SchemaError),
    #[error("invalid ontology: {}", join_violations(.0))]
    Invalid(Vec<Violation>),
    #[error("unknown concept `{0}`")]
    UnknownConcept(String),
}

fn join_violations(violations: &[Violation]) -> String {
    violations.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; ")
}

/// Parses and validates an ontology document.
pub fn load_ontology(document: &str) -> Result<PslOntology, OntologyError> {
    let ontology: PslOntology = serde_json::from_str(document).map_err(|e| SchemaError {
        path: format!("line {} column {}", e.line(), e.column()),
        message: e.to_string(),
    })?;
    let violations = validate_ontology(&ontology);
    if violations.is_empty() {
        Ok(ontology)
    } else {
        Err(OntologyError::Invalid(violations))
    }
}

pub fn base_ontology() -> PslOntology {
    load_ontology(BASE_ONTOLOGY).expect("shipped ontology is valid")
}

/// Reports every invariant violation; an empty list means the ontology is valid.
pub fn validate_ontology(o: &PslOntology) -> Vec<Violation> {
    let mut violations = Vec::new();

    if o.levels.is_empty() {
        violations.push(Violation::NoLevels);
    }
    let mut ks: Vec<u32> = o.levels.iter().map(|l| l.k).collect();
    ks.sort_unstable();
    for (expected, found) in (0u32..).zip(&ks) {
        if expected != *found {
            violations.push(Violation::NonContiguousLevels { expected, found: *found });
            break;
        }
    }
    let syntactic: Vec<&AbstractionLevel> =
        o.levels.iter().filter(|l| l.kind == LevelKind::Syntactic).collect();
    if syntactic.len() != 1 {
        violations.push(Violation::SyntacticLevelCount { found: syntactic.len() });
    }
    let lowest = ks.last().copied();
    for level in &syntactic {
        if Some(level.k) != lowest {
            violations.push(Violation::SyntacticLevelNotLowest { k: level.k });
        }
    }

    let known_levels: BTreeSet<u32> = ks.iter().copied().collect();
    let mut concept_levels: HashMap<&str, u32> = HashMap::new();
    for concept in &o.concepts {
        if concept_levels.insert(&concept.id, concept.level).is_some() {
            violations.push(Violation::DuplicateConcept { id: concept.id.clone() });
        }
        if !known_levels.contains(&concept.level) {
            violations.push(Violation::UnknownLevel {
                concept: concept.id.clone(),
                level: concept.level,
            });
        }
    }

    let mut has_minimum_parent: BTreeSet<&str> = BTreeSet::new();
    for rule in &o.rules {
        let (Some(&from_level), Some(&to_level)) =
            (concept_levels.get(rule.from.as_str()), concept_levels.get(rule.to.as_str()))
        else {
            let missing = if concept_levels.contains_key(rule.from.as_str()) { &rule.to } else { &rule.from };
            violations.push(Violation::UnknownRuleEndpoint {
                from: rule.from.clone(),
                to: rule.to.clone(),
                missing: missing.clone(),
            });
            continue;
        };
        if rule.strength == Strength::Minimum {
            if from_level == to_level + 1 {
                has_minimum_parent.insert(&rule.from);
            } else {
                violations.push(Violation::NonAdjacentMinimum {
                    from: rule.from.clone(),
                    to: rule.to.clone(),
                });
            }
        }
    }
    for concept in &o.concepts {
        if concept.level > 0 && !has_minimum_parent.contains(concept.id.as_str()) {
            violations.push(Violation::OrphanConcept {
                concept: concept.id.clone(),
                level: concept.level,
            });
        }
    }

    let mut sizes: BTreeMap<u32, usize> = ks.iter().map(|k| (*k, 0)).collect();
    for concept in &o.concepts {
        if let Some(size) = sizes.get_mut(&concept.level) {
            *size += 1;
        }
    }
    let sizes: Vec<(u32, usize)> = sizes.into_iter().collect();
    for pair in sizes.windows(2) {
        let ((upper, upper_size), (lower, lower_size)) = (pair[0], pair[1]);
        if upper_size > lower_size {
            violations.push(Violation::NonMonotoneLevelSizes {
                upper,
                upper_size,
                lower,
                lower_size,
            });
        }
    }

    if let Some(n) = lowest.filter(|n| *n > 0) {
        validate_mapping(o, n, &concept_levels, &mut violations);
    }

    violations
}

fn validate_mapping(o: &PslOntology, n: u32, concept_levels: &HashMap<&str, u32>, violations: &mut Vec<Violation>) {
    let mut seen: BTreeSet<&str> = BTreeSet::new();
    for entry in &o.mapping {
        if Category::from_name(&entry.category).is_none() {
            violations.push(Violation::UnknownMappingCategory { category: entry.category.clone() });
        }
        if !seen.insert(&entry.category) {
            violations.push(Violation::DuplicateMapping { category: entry.category.clone() });
        }
        let lists = std::iter::once((None, &entry.concepts, true))
            .chain(entry.variants.iter().map(|(v, list)| (Some(v.clone()), list, false)));
        for (variant, list, is_base) in lists {
            let bad = |reason: String| Violation::BadMappingConcept {
                category: entry.category.clone(),
                variant: variant.clone(),
                reason,
            };
            let mut syntactic = 0;
            let mut upper = 0;
            for id in list {
                match concept_levels.get(id.as_str()) {
                    None => violations.push(bad(format!("unknown concept `{id}`"))),
                    Some(&level) if level == n => syntactic += 1,
                    Some(&level) if level + 1 == n => upper += 1,
                    Some(&level) => violations.push(bad(format!(
                        "concept `{id}` is at level {level}; expected level {n} or {}",
                        n - 1
                    ))),
                }
            }
            if upper == 0 {
                violations.push(bad(format!("needs at least one level-{} concept", n - 1)));
            }
            match (is_base, syntactic) {
                (true, 1) | (false, 0) | (false, 1) => {}
                (true, found) => violations.push(bad(format!(
                    "needs exactly one level-{n} concept, found {found}"
                ))),
                (false, found) => violations.push(bad(format!(
                    "may override at most one level-{n} concept, found {found}"
                ))),
            }
        }
    }
    for category in Category::ALL {
        if !seen.contains(category.as_str()) {
            violations.push(Violation::UnmappedCategory { category: category.as_str().to_string() });
        }
    }
}

/// Resolved mapping for one syntactic construct.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResolvedMapping<'o> {
    pub syntactic: &'o str,
    pub upper: Vec<&'o str>,
}

impl PslOntology {
    /// Index of the syntactic level, n.
    pub fn syntactic_level(&self) -> u32 {
        self.levels
            .iter()
            .find(|l| l.kind == LevelKind::Syntactic)
            .map(|l| l.k)
            .unwrap_or(0)
    }

    pub fn concept(&self, id: &str) -> Option<&Concept> {
        self.concepts.iter().find(|c| c.id == id)
    }

    pub fn level(&self, k: u32) -> Option<&AbstractionLevel> {
        self.levels.iter().find(|l| l.k == k)
    }

    /// m_k: number of concepts at level k.
    pub fn level_size(&self, k: u32) -> usize {
        self.concepts.iter().filter(|c| c.level == k).count()
    }

    pub fn rules_from<'a>(&'a self, id: &'a str, strength: Strength) -> impl Iterator<Item = &'a DependencyRule> + 'a {
        self.rules
            .iter()
            .filter(move |r| r.from == id && r.strength == strength)
    }

    fn mapping_for(&self, category: Category) -> Option<&SyntacticMapping> {
        self.mapping.iter().find(|m| m.category == category.as_str())
    }

    /// Looks up the syntactic concept and level-(n-1) concepts for a category,
    /// applying a variant override when one matches.
    pub fn resolve(&self, category: Category, variant: Option<&str>) -> Option<ResolvedMapping<'_>> {
        let entry = self.mapping_for(category)?;
        let n = self.syntactic_level();
        let (base_syntactic, base_upper) = self.split_mapping(&entry.concepts, n);
        let Some(list) = variant.and_then(|v| entry.variants.get(v)) else {
            return Some(ResolvedMapping {
                syntactic: base_syntactic?,
                upper: base_upper,
            });
        };
        let (syntactic, upper) = self.split_mapping(list, n);
        Some(ResolvedMapping {
            syntactic: syntactic.or(base_syntactic)?,
            upper,
        })
    }

    fn split_mapping<'a>(&'a self, list: &'a [String], n: u32) -> (Option<&'a str>, Vec<&'a str>) {
        let mut syntactic = None;
        let mut upper = Vec::new();
        for id in list {
            match self.concept(id) {
                Some(c) if c.level == n => syntactic = Some(id.as_str()),
                Some(_) => upper.push(id.as_str()),
                None => {}
            }
        }
        (syntactic, upper)
    }

    /// Seeds plus everything reachable along minimum dependencies, sorted.
    pub fn minimum_closure<S: AsRef<str>>(&self, seed: &[S]) -> Result<Vec<String>, OntologyError> {
        let mut closed: BTreeSet<&str> = BTreeSet::new();
        let mut stack: Vec<&str> = Vec::new();
        for id in seed {
            let concept = self
                .concept(id.as_ref())
                .ok_or_else(|| OntologyError::UnknownConcept(id.as_ref().to_string()))?;
            stack.push(&concept.id);
        }
        while let Some(id) = stack.pop() {
            if !closed.insert(id) {
                continue;
            }
            for rule in self.rules_from(id, Strength::Minimum) {
                if !closed.contains(rule.to.as_str()) {
                    stack.push(&rule.to);
                }
            }
        }
        Ok(closed.into_iter().map(str::to_string).collect())
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("ontology always serializes");
        text.push('\n');
        text
    }
}

/// Free-function form of [`PslOntology::minimum_closure`].
pub fn minimum_closure<S: AsRef<str>>(o: &PslOntology, seed: &[S]) -> Result<Vec<String>, OntologyError> {
    o.minimum_closure(seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn base_ontology_is_valid() {
        let o = base_ontology();
        assert_eq!(validate_ontology(&o), Vec::new());
        assert_eq!(o.levels.len(), 4);
        assert_eq!(o.syntactic_level(), 3);
        assert_eq!(o.level(3).unwrap().kind, LevelKind::Syntactic);
    }

    #[test]
    fn base_level_sizes_grow_downward() {
        let o = base_ontology();
        let sizes: Vec<usize> = (0..4).map(|k| o.level_size(k)).collect();
        assert_eq!(sizes[0], 4);
        assert_eq!(sizes[1], 12);
        assert!(sizes.windows(2).all(|w| w[0] <= w[1]), "{sizes:?}");
    }

    #[test]
    fn removing_a_minimum_edge_orphans_one_concept() {
        let mut o = base_ontology();
        let index = o
            .rules
            .iter()
            .position(|r| r.from == "Recursion" && r.strength == Strength::Minimum)
            .unwrap();
        o.rules.remove(index);
        let violations = validate_ontology(&o);
        assert_eq!(
            violations,
            vec![Violation::OrphanConcept {
                concept: "Recursion".into(),
                level: 1
            }]
        );
        assert!(violations[0].to_string().contains("orphan concept"));
    }

    #[test]
    fn two_syntactic_levels_rejected() {
        let mut o = base_ontology();
        o.levels[2].kind = LevelKind::Syntactic;
        let violations = validate_ontology(&o);
        assert!(violations.contains(&Violation::SyntacticLevelCount { found: 2 }));
        let message = OntologyError::Invalid(violations).to_string();
        assert!(message.contains("exactly one syntactic level"), "{message}");
    }

    #[test]
    fn non_monotone_sizes_rejected() {
        let mut o = base_ontology();
        // Move every level-1 concept up to level 0, so m_0 > m_1.
        for concept in o.concepts.iter_mut().filter(|c| c.level == 1) {
            concept.level = 0;
        }
        let violations = validate_ontology(&o);
        assert!(violations
            .iter()
            .any(|v| matches!(v, Violation::NonMonotoneLevelSizes { upper: 0, lower: 1, .. })));
    }

    #[test]
    fn skipping_minimum_edge_rejected() {
        let mut o = base_ontology();
        o.rules.push(DependencyRule {
            from: "Multiplication".into(),
            to: "Computation".into(),
            strength: Strength::Minimum,
        });
        assert!(validate_ontology(&o).contains(&Violation::NonAdjacentMinimum {
            from: "Multiplication".into(),
            to: "Computation".into()
        }));
    }

    #[test]
    fn missing_category_mapping_rejected() {
        let mut o = base_ontology();
        o.mapping.retain(|m| m.category != "while-statement");
        assert_eq!(
            validate_ontology(&o),
            vec![Violation::UnmappedCategory {
                category: "while-statement".into()
            }]
        );
    }

    #[test]
    fn malformed_document_is_schema_error() {
        assert!(matches!(load_ontology("{\"levels\": 3}"), Err(OntologyError::Schema(_))));
        assert!(matches!(load_ontology("not json"), Err(OntologyError::Schema(_))));
    }

    #[test]
    fn closure_of_loop_and_recursion_shares_control_flow() {
        let o = base_ontology();
        let closed = o.minimum_closure(&["Iteration", "Recursion"]).unwrap();
        assert_eq!(closed, ["Control Flow", "Iteration", "Recursion"]);
    }

    #[test]
    fn closure_walks_to_level_zero() {
        let o = base_ontology();
        let closed = o.minimum_closure(&["Loop With Counter"]).unwrap();
        assert_eq!(closed, ["Control Flow", "Iteration", "Loop With Counter"]);
        assert!(o.minimum_closure::<&str>(&[]).unwrap().is_empty());
    }

    #[test]
    fn closure_rejects_unknown_seed() {
        let o = base_ontology();
        assert_eq!(
            o.minimum_closure(&["Teleportation"]),
            Err(OntologyError::UnknownConcept("Teleportation".into()))
        );
    }

    #[test]
    fn resolve_applies_variants() {
        let o = base_ontology();
        let product = o.resolve(Category::BinaryExpression, Some("*")).unwrap();
        assert_eq!(product.syntactic, "binary-expression");
        assert_eq!(product.upper, ["Multiplication"]);
        let literal = o.resolve(Category::LiteralExpression, Some("int-literal")).unwrap();
        assert_eq!(literal.syntactic, "literal-int");
        let fallback = o.resolve(Category::CallExpression, Some("no-such-variant")).unwrap();
        assert_eq!(fallback, o.resolve(Category::CallExpression, None).unwrap());
    }

    #[test]
    fn json_round_trip() {
        let o = base_ontology();
        assert_eq!(load_ontology(&o.to_json()).unwrap(), o);
    }
}
