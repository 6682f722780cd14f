use std::collections::BTreeMap;
use std::fmt;
use std::ops::Range;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NodeKind {
    Method,
    Block,
    Loop,
    If,
    Assign,
    VarDecl,
    ArrayAccess,
    Call,
    Return,
    BinaryOp,
    UnaryOp,
    IdentifierRef,
    Literal,
    Other,
}

impl NodeKind {
    pub const ALL: [NodeKind; 14] = [
        NodeKind::Method,
        NodeKind::Block,
        NodeKind::Loop,
        NodeKind::If,
        NodeKind::Assign,
        NodeKind::VarDecl,
        NodeKind::ArrayAccess,
        NodeKind::Call,
        NodeKind::Return,
        NodeKind::BinaryOp,
        NodeKind::UnaryOp,
        NodeKind::IdentifierRef,
        NodeKind::Literal,
        NodeKind::Other,
    ];

    pub fn name(self) -> &'static str {
        match self {
            NodeKind::Method => "method",
            NodeKind::Block => "block",
            NodeKind::Loop => "loop",
            NodeKind::If => "if",
            NodeKind::Assign => "assign",
            NodeKind::VarDecl => "var-decl",
            NodeKind::ArrayAccess => "array-access",
            NodeKind::Call => "call",
            NodeKind::Return => "return",
            NodeKind::BinaryOp => "binary-op",
            NodeKind::UnaryOp => "unary-op",
            NodeKind::IdentifierRef => "identifier-ref",
            NodeKind::Literal => "literal",
            NodeKind::Other => "other",
        }
    }

    pub fn from_name(name: &str) -> Option<NodeKind> {
        NodeKind::ALL.into_iter().find(|k| k.name() == name)
    }
}

impl fmt::Display for NodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Structural role of a node relative to its parent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    /// Left-hand side of an assignment.
    Target,
    /// Right-hand side of an assignment or initializer of a declaration.
    Source,
    /// Guard of an `if` or a loop.
    Condition,
    /// Branch of an `if` or body of a loop.
    Body,
}

impl Role {
    pub fn from_name(name: &str) -> Option<Role> {
        match name {
            "target" => Some(Role::Target),
            "source" => Some(Role::Source),
            "condition" => Some(Role::Condition),
            "body" => Some(Role::Body),
            _ => None,
        }
    }
}

/// Attribute value. `indices` on array accesses is a list; everything else is
/// a plain string.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AttrValue {
    Text(String),
    List(Vec<String>),
}

impl AttrValue {
    pub fn as_text(&self) -> Option<&str> {
        match self {
            AttrValue::Text(s) => Some(s),
            AttrValue::List(_) => None,
        }
    }

    pub fn as_list(&self) -> Option<&[String]> {
        match self {
            AttrValue::List(v) => Some(v),
            AttrValue::Text(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AstNode {
    pub kind: NodeKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub role: Option<Role>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub attrs: BTreeMap<String, AttrValue>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<AstNode>,
    pub span: Range<usize>,
}

impl AstNode {
    pub fn new(kind: NodeKind, span: Range<usize>) -> Self {
        AstNode {
            kind,
            role: None,
            attrs: BTreeMap::new(),
            children: Vec::new(),
            span,
        }
    }

    pub fn with_attr(mut self, key: &str, value: impl Into<String>) -> Self {
        self.attrs.insert(key.to_string(), AttrValue::Text(value.into()));
        self
    }

    pub fn with_role(mut self, role: Role) -> Self {
        self.role = Some(role);
        self
    }

    pub fn with_child(mut self, child: AstNode) -> Self {
        self.children.push(child);
        self
    }

    pub fn attr(&self, key: &str) -> Option<&str> {
        self.attrs.get(key).and_then(AttrValue::as_text)
    }

    pub fn indices(&self) -> Option<&[String]> {
        self.attrs.get("indices").and_then(AttrValue::as_list)
    }

    /// Number of nodes in this subtree, including `self`.
    pub fn node_count(&self) -> usize {
        1 + self.children.iter().map(AstNode::node_count).sum::<usize>()
    }

    /// Pre-order traversal.
    pub fn preorder(&self) -> Vec<&AstNode> {
        let mut out = Vec::with_capacity(self.node_count());
        fn walk<'a>(n: &'a AstNode, out: &mut Vec<&'a AstNode>) {
            out.push(n);
            for c in &n.children {
                walk(c, out);
            }
        }
        walk(self, &mut out);
        out
    }

    /// Kind-and-shape skeleton used for isomorphism checks: the tree with
    /// names, spans and attributes dropped.
    pub fn shape(&self) -> Shape {
        Shape {
            kind: self.kind,
            role: self.role,
            children: self.children.iter().map(AstNode::shape).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Shape {
    pub kind: NodeKind,
    pub role: Option<Role>,
    pub children: Vec<Shape>,
}

/// Compact S-expression dump, handy in test failures.
impl fmt::Display for AstNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.kind)?;
        if let Some(role) = self.role {
            write!(f, ":{role:?}")?;
        }
        for (k, v) in &self.attrs {
            match v {
                AttrValue::Text(s) => write!(f, " {k}={s:?}")?,
                AttrValue::List(l) => write!(f, " {k}={l:?}")?,
            }
        }
        for c in &self.children {
            write!(f, " {c}")?;
        }
        write!(f, ")")
    }
}
