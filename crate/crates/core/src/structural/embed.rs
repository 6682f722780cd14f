use std::collections::{BTreeMap, HashMap};

use super::{AttrMatcher, MatchResult, NodePattern, PatternId, PatternNode, StructuralPattern, Witness, WitnessEntry};
use crate::code_model::{AstNode, AttrValue, Role};

/// Pre-order flattening of an AST. Node `i`'s proper descendants are exactly
/// the indices in `i + 1 .. end[i]`.
#[derive(Debug)]
pub struct FlatAst<'a> {
    pub nodes: Vec<&'a AstNode>,
    pub end: Vec<usize>,
    pub children: Vec<Vec<usize>>,
}

impl<'a> FlatAst<'a> {
    pub fn new(root: &'a AstNode) -> Self {
        let mut flat = FlatAst {
            nodes: Vec::new(),
            end: Vec::new(),
            children: Vec::new(),
        };
        // explicit stack: deep expression chains must not overflow
        enum Step<'b> {
            Enter(&'b AstNode, Option<usize>),
            Exit(usize),
        }
        let mut stack = vec![Step::Enter(root, None)];
        while let Some(step) = stack.pop() {
            match step {
                Step::Enter(n, parent) => {
                    let id = flat.nodes.len();
                    flat.nodes.push(n);
                    flat.end.push(id + 1);
                    flat.children.push(Vec::new());
                    if let Some(p) = parent {
                        flat.children[p].push(id);
                    }
                    stack.push(Step::Exit(id));
                    for c in n.children.iter().rev() {
                        stack.push(Step::Enter(c, Some(id)));
                    }
                }
                Step::Exit(id) => flat.end[id] = flat.nodes.len(),
            }
        }
        flat
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn is_proper_descendant(&self, ancestor: usize, node: usize) -> bool {
        ancestor < node && node < self.end[ancestor]
    }

    /// Whether `node` lies in the subtree of a child of `parent` that carries `role`.
    pub fn in_role_subtree(&self, parent: usize, role: Role, node: usize) -> bool {
        self.children[parent]
            .iter()
            .any(|&c| self.nodes[c].role == Some(role) && c <= node && node < self.end[c])
    }
}

fn attr_text(node: &AstNode, key: &str) -> Option<String> {
    match node.attrs.get(key)? {
        AttrValue::Text(s) => Some(s.clone()),
        AttrValue::List(l) => Some(l.join(",")),
    }
}

/// Kind and attribute constraints, ignoring the capture environment.
fn local_match(np: &NodePattern, node: &AstNode) -> bool {
    if np.kind.is_some_and(|k| k != node.kind) {
        return false;
    }
    np.attrs.iter().all(|a| match &a.matcher {
        AttrMatcher::Exact(v) => attr_text(node, &a.key).is_some_and(|t| &t == v),
        AttrMatcher::Regex(re) => attr_text(node, &a.key).is_some_and(|t| re.is_match(&t)),
        AttrMatcher::Capture(_) => matches!(node.attrs.get(&a.key), Some(AttrValue::Text(_))),
        AttrMatcher::Captures(names) => matches!(node.attrs.get(&a.key), Some(AttrValue::List(l)) if l.len() == names.len()),
    })
}

fn bindings(np: &NodePattern, node: &AstNode) -> Vec<(String, String)> {
    let mut out = Vec::new();
    for a in &np.attrs {
        match (&a.matcher, node.attrs.get(&a.key)) {
            (AttrMatcher::Capture(c), Some(AttrValue::Text(t))) => out.push((c.clone(), t.clone())),
            (AttrMatcher::Captures(cs), Some(AttrValue::List(l))) => {
                out.extend(cs.iter().cloned().zip(l.iter().cloned()));
            }
            _ => {}
        }
    }
    out
}

#[derive(Debug, Clone, Copy)]
enum Scope {
    Anywhere,
    Below(usize),
    InRole(usize, Role),
}

struct Search<'p, 'a> {
    pat: &'p StructuralPattern,
    ast: &'p FlatAst<'a>,
    /// Relaxed feasibility of mapping a node pattern to an AST node, ignoring
    /// injectivity and captures. Never rules out a real embedding.
    memo: HashMap<(PatternId, usize), bool>,
    used: Vec<bool>,
    env: BTreeMap<String, String>,
    mapping: Vec<(PatternId, usize)>,
}

impl Search<'_, '_> {
    fn candidates(&self, scope: Scope) -> Vec<usize> {
        match scope {
            Scope::Anywhere => (0..self.ast.len()).collect(),
            Scope::Below(a) => (a + 1..self.ast.end[a]).collect(),
            Scope::InRole(a, role) => self.ast.children[a]
                .iter()
                .filter(|&&c| self.ast.nodes[c].role == Some(role))
                .flat_map(|&c| c..self.ast.end[c])
                .collect(),
        }
    }

    fn child_scope(a: usize, role: Option<Role>) -> Scope {
        match role {
            Some(r) => Scope::InRole(a, r),
            None => Scope::Below(a),
        }
    }

    fn feasible(&mut self, pid: PatternId, a: usize) -> bool {
        if let Some(&v) = self.memo.get(&(pid, a)) {
            return v;
        }
        let PatternNode::Node(np) = self.pat.node(pid) else {
            unreachable!("feasible() on a combinator")
        };
        let ok = local_match(np, self.ast.nodes[a])
            && np
                .children
                .iter()
                .all(|slot| self.feasible_in(slot.node, Self::child_scope(a, slot.role)));
        self.memo.insert((pid, a), ok);
        ok
    }

    fn feasible_in(&mut self, pid: PatternId, scope: Scope) -> bool {
        match self.pat.node(pid) {
            PatternNode::Or(bs) => bs.clone().into_iter().any(|b| self.feasible_in(b, scope)),
            PatternNode::And(bs) => bs.clone().into_iter().all(|b| self.feasible_in(b, scope)),
            PatternNode::Node(_) => self.candidates(scope).into_iter().any(|c| self.feasible(pid, c)),
        }
    }

    fn equalities_hold(&self) -> bool {
        self.pat.equalities.iter().all(|(x, y)| match (self.env.get(x), self.env.get(y)) {
            (Some(a), Some(b)) => a == b,
            _ => true,
        })
    }

    fn solve(&mut self, mut goals: Vec<(PatternId, Scope)>) -> bool {
        let Some((pid, scope)) = goals.pop() else { return true };
        match self.pat.node(pid) {
            PatternNode::Or(bs) => {
                for &b in bs {
                    let mut next = goals.clone();
                    next.push((b, scope));
                    if self.solve(next) {
                        return true;
                    }
                }
                false
            }
            PatternNode::And(bs) => {
                goals.extend(bs.iter().rev().map(|&b| (b, scope)));
                self.solve(goals)
            }
            PatternNode::Node(np) => {
                for c in self.candidates(scope) {
                    if self.used[c] || !self.feasible(pid, c) {
                        continue;
                    }
                    let mut fresh = Vec::new();
                    let mut consistent = true;
                    for (k, v) in bindings(np, self.ast.nodes[c]) {
                        match self.env.get(&k) {
                            Some(old) if *old != v => {
                                consistent = false;
                                break;
                            }
                            Some(_) => {}
                            None => {
                                self.env.insert(k.clone(), v);
                                fresh.push(k);
                            }
                        }
                    }
                    if consistent && self.equalities_hold() {
                        self.used[c] = true;
                        self.mapping.push((pid, c));
                        let mut next = goals.clone();
                        next.extend(np.children.iter().rev().map(|s| (s.node, Self::child_scope(c, s.role))));
                        if self.solve(next) {
                            return true;
                        }
                        self.mapping.pop();
                        self.used[c] = false;
                    }
                    for k in fresh {
                        self.env.remove(&k);
                    }
                }
                false
            }
        }
    }
}

/// Decides whether `pattern` embeds into `ast`, returning one witness if so.
pub fn embed(pattern: &StructuralPattern, ast: &AstNode) -> MatchResult {
    let flat = FlatAst::new(ast);
    embed_flat(pattern, &flat)
}

pub(crate) fn embed_flat(pattern: &StructuralPattern, flat: &FlatAst<'_>) -> MatchResult {
    let mut s = Search {
        pat: pattern,
        ast: flat,
        memo: HashMap::new(),
        used: vec![false; flat.len()],
        env: BTreeMap::new(),
        mapping: Vec::new(),
    };
    if !s.feasible_in(pattern.root, Scope::Anywhere) || !s.solve(vec![(pattern.root, Scope::Anywhere)]) {
        return MatchResult {
            matched: false,
            witness: None,
        };
    }
    let mut mapping: Vec<WitnessEntry> = s
        .mapping
        .iter()
        .map(|&(p, a)| WitnessEntry {
            pattern_node: p,
            ast_node: a,
            kind: flat.nodes[a].kind,
            span: flat.nodes[a].span.clone(),
        })
        .collect();
    mapping.sort_by_key(|e| e.pattern_node);
    MatchResult {
        matched: true,
        witness: Some(Witness { mapping, env: s.env }),
    }
}
