//! Identifier renaming for name ablations.
//!
//! Only names declared inside a method are renamed: the method's own name,
//! parameters, locals, loop and catch variables and lambda parameters.
//! Library calls, types and foreign fields keep their text.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::code_model::{is_keyword, tokenize, MethodRecord, NodeKind, Token, TokenKind};

pub const FRESH_NAME_LEN: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RenamePlan {
    pub seed: u64,
    /// Original name to fresh name; keys are exactly the declared scope.
    pub mapping: BTreeMap<String, String>,
}

impl RenamePlan {
    pub fn scope(&self) -> impl Iterator<Item = &str> {
        self.mapping.keys().map(String::as_str)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ApplyOptions {
    pub strip_comments: bool,
}

/// Names declared within the method, from the AST when there is one and from
/// a token heuristic otherwise.
pub fn declared_names(record: &MethodRecord) -> BTreeSet<String> {
    match &record.ast {
        Some(ast) => ast
            .preorder()
            .into_iter()
            .filter(|n| matches!(n.kind, NodeKind::Method | NodeKind::VarDecl))
            .filter_map(|n| n.attr("name"))
            .filter(|name| !is_keyword(name))
            .map(str::to_string)
            .collect(),
        None => declared_names_from_tokens(&record.tokens),
    }
}

const PRIMITIVES: &[&str] = &["int", "long", "short", "byte", "char", "boolean", "float", "double", "void"];

/// Identifier preceded by something type-like and followed by a declarator
/// terminator. The identifier before the first `(` is the method name.
fn declared_names_from_tokens(tokens: &[Token]) -> BTreeSet<String> {
    let sig: Vec<&Token> = tokens.iter().filter(|t| !t.is_trivia()).collect();
    let mut out = BTreeSet::new();
    if let Some(i) = sig.iter().position(|t| t.is(TokenKind::Punctuation, "(")) {
        if i > 0 && sig[i - 1].kind == TokenKind::Identifier {
            out.insert(sig[i - 1].text.clone());
        }
    }
    for w in sig.windows(3) {
        let (prev, cur, next) = (w[0], w[1], w[2]);
        if cur.kind != TokenKind::Identifier {
            continue;
        }
        let type_like = prev.kind == TokenKind::Identifier
            || (prev.kind == TokenKind::Keyword && PRIMITIVES.contains(&prev.text.as_str()))
            || prev.is(TokenKind::Operator, ">")
            || prev.is(TokenKind::Operator, ">>")
            || prev.is(TokenKind::Punctuation, "]")
            || prev.is(TokenKind::Punctuation, "...");
        let terminator = matches!(next.text.as_str(), "=" | ";" | "," | ")" | ":");
        if type_like && terminator {
            out.insert(cur.text.clone());
        }
    }
    out
}

/// Builds a seeded plan for `record`.
///
/// Fresh names are drawn in the sorted order of the scope, so the mapping
/// depends only on the source text and the seed.
pub fn plan(record: &MethodRecord, seed: u64) -> RenamePlan {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut taken = BTreeSet::new();
    let mut mapping = BTreeMap::new();
    for name in declared_names(record) {
        let fresh = loop {
            let candidate: String = (0..FRESH_NAME_LEN).map(|_| rng.gen_range(b'a'..=b'z') as char).collect();
            if !is_keyword(&candidate) && !record.source.contains(&candidate) && !taken.contains(&candidate) {
                break candidate;
            }
        };
        taken.insert(fresh.clone());
        mapping.insert(name, fresh);
    }
    RenamePlan { seed, mapping }
}

/// Rewrites every in-scope identifier token. Literals are untouched and
/// comments are kept unless `strip_comments` is set.
pub fn apply(record: &MethodRecord, plan: &RenamePlan, opts: ApplyOptions) -> MethodRecord {
    let fresh: BTreeSet<&str> = plan.mapping.values().map(String::as_str).collect();
    assert_eq!(fresh.len(), plan.mapping.len(), "rename plan is not injective");

    let toks = &record.tokens;
    let mut out = String::with_capacity(record.source.len());
    for (i, t) in toks.iter().enumerate() {
        match t.kind {
            TokenKind::Identifier => match plan.mapping.get(&t.text) {
                Some(new) => out.push_str(new),
                None => {
                    assert!(!fresh.contains(t.text.as_str()), "fresh name {} collides with source", t.text);
                    out.push_str(&t.text);
                }
            },
            TokenKind::Comment if opts.strip_comments => {
                let glued = |t: Option<&Token>| t.is_some_and(|t| t.kind != TokenKind::Whitespace);
                let before = i.checked_sub(1).and_then(|j| toks.get(j));
                if glued(before) && glued(toks.get(i + 1)) {
                    out.push(' ');
                }
            }
            _ => out.push_str(&t.text),
        }
    }

    let name = plan.mapping.get(&record.name).cloned().unwrap_or_else(|| record.name.clone());
    let mut rec = MethodRecord::new(record.method_id.clone(), record.file_path.clone(), name, out);
    rec.obfuscation_seed = Some(plan.seed);
    rec
}

/// `plan` followed by `apply`.
pub fn obfuscate(record: &MethodRecord, seed: u64, opts: ApplyOptions) -> MethodRecord {
    apply(record, &plan(record, seed), opts)
}

/// In-scope names that still appear as identifier tokens in `obfuscated`.
pub fn survivors(original_scope: &BTreeSet<String>, obfuscated: &str) -> Vec<String> {
    let lexed = tokenize(obfuscated);
    let found: BTreeSet<&str> = lexed
        .tokens
        .iter()
        .filter(|t| t.kind == TokenKind::Identifier)
        .map(|t| t.text.as_str())
        .collect();
    original_scope.iter().filter(|n| found.contains(n.as_str())).cloned().collect()
}
