//! Structural AST patterns.
//!
//! Patterns are written in a small S-expression language:
//!
//! ```text
//! pattern    := node | "(or" pattern pattern+ ")" | "(and" pattern pattern+ ")"
//! node       := "(" kind attr* role-child* free-child* ")"
//! kind       := any AST node kind (loop, if, assign, array-access, ...) | any
//! attr       := key "=" ( "string" | atom | /regex/ | @name | "[" @name ("," @name)* "]" )
//! role-child := ("target" | "source" | "condition" | "body") "=" pattern
//! free-child := pattern
//! ```
//!
//! `@name` binds the attribute's text to a capture; `idx=[@i,@j]` binds the
//! canonical index texts of an array access in order. A capture name used at
//! several binding sites must bind identical text everywhere, and `#equal: a b`
//! header lines add explicit equalities. Regexes must match the whole
//! attribute value.
//!
//! A pattern embeds into an AST when its node patterns can be mapped
//! injectively onto AST nodes such that kinds and attributes agree, free
//! children land on proper descendants of their parent's image and role
//! children land in the subtree of a child carrying that role. `or` and `and`
//! take their anchoring scope from where they appear. The root may map to any
//! node.

mod dsl;
mod embed;

use std::fmt;
use std::path::Path;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::algorithm::Algorithm;
use crate::code_model::{MethodRecord, NodeKind, Role};
use crate::filter::{Partition, PassReason};
use crate::par::Execution;

pub use dsl::{parse_dsl, parse_pattern_expr, DslError};
pub use embed::{embed, FlatAst};

pub type PatternId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PatternFamily {
    ProminentFeature,
    Standalone,
}

impl PatternFamily {
    pub fn from_name(s: &str) -> Option<Self> {
        match s.trim() {
            "prominent_feature" | "prominent-feature" => Some(PatternFamily::ProminentFeature),
            "standalone" => Some(PatternFamily::Standalone),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            PatternFamily::ProminentFeature => "prominent_feature",
            PatternFamily::Standalone => "standalone",
        }
    }
}

#[derive(Debug, Clone)]
pub enum AttrMatcher {
    Exact(String),
    Regex(Regex),
    Capture(String),
    /// Ordered captures over a list-valued attribute (`idx=[@i,@j]`).
    Captures(Vec<String>),
}

#[derive(Debug, Clone)]
pub struct AttrConstraint {
    /// Attribute name as stored on the AST (`idx` is normalised to `indices`).
    pub key: String,
    pub matcher: AttrMatcher,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChildSlot {
    pub role: Option<Role>,
    pub node: PatternId,
}

#[derive(Debug, Clone)]
pub struct NodePattern {
    /// `None` stands for `any`.
    pub kind: Option<NodeKind>,
    pub attrs: Vec<AttrConstraint>,
    pub children: Vec<ChildSlot>,
}

#[derive(Debug, Clone)]
pub enum PatternNode {
    Node(NodePattern),
    Or(Vec<PatternId>),
    And(Vec<PatternId>),
}

/// Parsed pattern. Nodes live in an arena in pre-order, so `root == 0`.
#[derive(Debug, Clone)]
pub struct StructuralPattern {
    pub name: String,
    pub algorithm: Algorithm,
    pub family: PatternFamily,
    pub reconstructed: bool,
    pub nodes: Vec<PatternNode>,
    pub root: PatternId,
    pub equalities: Vec<(String, String)>,
}

impl StructuralPattern {
    pub fn node(&self, id: PatternId) -> &PatternNode {
        &self.nodes[id]
    }

    /// Ids of the `Node` entries (combinators excluded).
    pub fn node_pattern_ids(&self) -> impl Iterator<Item = PatternId> + '_ {
        (0..self.nodes.len()).filter(|&i| matches!(self.nodes[i], PatternNode::Node(_)))
    }

    /// Capture names in binding order, without duplicates.
    pub fn capture_names(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for n in &self.nodes {
            if let PatternNode::Node(np) = n {
                for a in &np.attrs {
                    let names: &[String] = match &a.matcher {
                        AttrMatcher::Capture(c) => std::slice::from_ref(c),
                        AttrMatcher::Captures(cs) => cs,
                        _ => &[],
                    };
                    for c in names {
                        if !out.contains(c) {
                            out.push(c.clone());
                        }
                    }
                }
            }
        }
        out
    }

    /// Copy of the pattern with one child slot of `parent` removed; for `and`
    /// at least one branch stays. `or` branches are never removed since that
    /// narrows the pattern. Returns `None` if nothing can be removed.
    pub fn without_child(&self, parent: PatternId, index: usize) -> Option<StructuralPattern> {
        let mut p = self.clone();
        match &mut p.nodes[parent] {
            PatternNode::Node(np) if index < np.children.len() => {
                np.children.remove(index);
            }
            PatternNode::And(bs) if index < bs.len() && bs.len() > 1 => {
                bs.remove(index);
            }
            _ => return None,
        }
        Some(p)
    }

    /// Child references of `id` with their slot role (combinator branches inherit
    /// none of their own).
    pub fn children_of(&self, id: PatternId) -> Vec<ChildSlot> {
        match &self.nodes[id] {
            PatternNode::Node(np) => np.children.clone(),
            PatternNode::Or(bs) | PatternNode::And(bs) => bs.iter().map(|&b| ChildSlot { role: None, node: b }).collect(),
        }
    }
}

impl fmt::Display for StructuralPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn go(p: &StructuralPattern, id: PatternId, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            match &p.nodes[id] {
                PatternNode::Or(bs) | PatternNode::And(bs) => {
                    let op = if matches!(p.nodes[id], PatternNode::Or(_)) { "or" } else { "and" };
                    write!(f, "({op}")?;
                    for &b in bs {
                        write!(f, " ")?;
                        go(p, b, f)?;
                    }
                    write!(f, ")")
                }
                PatternNode::Node(np) => {
                    write!(f, "({}", np.kind.map_or("any", NodeKind::name))?;
                    for a in &np.attrs {
                        let key = if a.key == "indices" { "idx" } else { a.key.as_str() };
                        match &a.matcher {
                            AttrMatcher::Exact(s) => write!(f, " {key}={s:?}")?,
                            AttrMatcher::Regex(r) => {
                                let inner = r
                                    .as_str()
                                    .strip_prefix("^(?:")
                                    .and_then(|s| s.strip_suffix(")$"))
                                    .unwrap_or(r.as_str());
                                write!(f, " {key}=/{}/", inner.replace('/', "\\/"))?
                            }
                            AttrMatcher::Capture(c) => write!(f, " {key}=@{c}")?,
                            AttrMatcher::Captures(cs) => {
                                let list: Vec<String> = cs.iter().map(|c| format!("@{c}")).collect();
                                write!(f, " {key}=[{}]", list.join(","))?
                            }
                        }
                    }
                    for slot in &np.children {
                        write!(f, " ")?;
                        if let Some(r) = slot.role {
                            write!(f, "{}=", role_name(r))?;
                        }
                        go(p, slot.node, f)?;
                    }
                    write!(f, ")")
                }
            }
        }
        go(self, self.root, f)
    }
}

pub(crate) fn role_name(r: Role) -> &'static str {
    match r {
        Role::Target => "target",
        Role::Source => "source",
        Role::Condition => "condition",
        Role::Body => "body",
    }
}

/// One mapped node of a successful match.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessEntry {
    pub pattern_node: PatternId,
    /// Pre-order index of the AST node.
    pub ast_node: usize,
    pub kind: NodeKind,
    pub span: std::ops::Range<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Witness {
    pub mapping: Vec<WitnessEntry>,
    pub env: std::collections::BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchResult {
    pub matched: bool,
    pub witness: Option<Witness>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructuralDecision {
    pub passed: bool,
    pub pass_reason: Option<PassReason>,
}

#[derive(Debug, Clone)]
pub struct StructuralFilterRun<'a> {
    pub partition: Partition<'a>,
    pub decisions: Vec<StructuralDecision>,
}

impl StructuralPattern {
    pub fn decide(&self, record: &MethodRecord) -> StructuralDecision {
        match &record.ast {
            None => StructuralDecision {
                passed: true,
                pass_reason: Some(PassReason::ParseFailure),
            },
            Some(ast) => {
                let matched = embed(self, ast).matched;
                StructuralDecision {
                    passed: matched,
                    pass_reason: matched.then_some(PassReason::Matched),
                }
            }
        }
    }
}

/// Partitions a corpus; methods without an AST are passed on.
pub fn filter_corpus<'a>(pattern: &StructuralPattern, records: &'a [MethodRecord], exec: Execution) -> StructuralFilterRun<'a> {
    let decisions = exec.map(records, |r| pattern.decide(r));
    let flags: Vec<bool> = decisions.iter().map(|d| d.passed).collect();
    StructuralFilterRun {
        partition: Partition::from_flags(records, &flags),
        decisions,
    }
}

/// Reads a `.pat` file; the pattern name defaults to the file stem.
pub fn load_pattern(path: &Path) -> Result<StructuralPattern, DslError> {
    let text = std::fs::read_to_string(path).map_err(|e| DslError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    let mut p = parse_dsl(&text)?;
    if let Some(stem) = path.file_stem().and_then(|s| s.to_str()) {
        if p.name.is_empty() {
            p.name = stem.to_string();
        }
    }
    Ok(p)
}
