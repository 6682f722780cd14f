//! Recursive-descent parser for the Java subset that structural patterns
//! look at: declarations, statements, loops, conditionals, assignments,
//! calls, array accesses, unary and binary expressions, returns and
//! literals. Anything else becomes a `NodeKind::Other` node with a `form`
//! attribute and whatever children could be recognised.
//!
//! Recovery works at statement granularity: an unparseable statement is
//! skipped up to the next `;` (or the `}` that closes the enclosing block)
//! and kept as an `other` node with `form="error"`.

use std::ops::Range;

use thiserror::Error;

use super::ast::{AstNode, AttrValue, NodeKind, Role};
use super::canonical::canonical_token_text;
use super::token::{tokenize, Token, TokenKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseFailure {
    #[error("no method signature found")]
    NoSignature,
    #[error("method has no body")]
    NoBody,
    #[error("unterminated method body")]
    UnterminatedBody,
    #[error("nesting too deep")]
    TooDeep,
}

#[derive(Debug, Clone)]
pub struct ParseOutcome {
    pub ast: AstNode,
    /// Statements that had to be skipped during recovery.
    pub recovered_statements: usize,
}

/// Parses one method (or constructor) from its source text.
pub fn parse_method_source(source: &str) -> Result<ParseOutcome, ParseFailure> {
    let lexed = tokenize(source);
    parse_method_tokens(source, &lexed.tokens)
}

/// Parses a method from an existing lossless token stream of `source`.
pub fn parse_method_tokens(source: &str, tokens: &[Token]) -> Result<ParseOutcome, ParseFailure> {
    let toks: Vec<&Token> = tokens.iter().filter(|t| !t.is_trivia()).collect();
    let header = find_method_header(&toks, 0, toks.len()).ok_or(ParseFailure::NoSignature)?;
    let name = toks[header.name].text.clone();
    let mut p = Parser {
        src: source,
        toks,
        pos: 0,
        method_name: name,
        recovered: 0,
        depth: 0,
    };
    let ast = p.method_at(header.start, &header)?;
    Ok(ParseOutcome {
        ast,
        recovered_statements: p.recovered,
    })
}

/// Location of a method header within a significant-token slice.
#[derive(Debug, Clone, Copy)]
pub(crate) struct MethodHeader {
    /// First token of the member (after leading annotations are included).
    pub start: usize,
    /// Index of the method-name identifier.
    pub name: usize,
    /// Index of the `(` opening the parameter list.
    pub lparen: usize,
}

/// Finds `name (` in `toks[from..to]` with no `=` before it at depth zero.
pub(crate) fn find_method_header(toks: &[&Token], from: usize, to: usize) -> Option<MethodHeader> {
    let mut i = from;
    let mut angle = 0i32;
    while i < to {
        let t = toks[i];
        if t.is(TokenKind::Punctuation, "@") && !toks.get(i + 1).is_some_and(|n| n.is(TokenKind::Keyword, "interface")) {
            // annotation: @Name(.Name)* (args)?
            i += 1;
            while i < to && (toks[i].kind == TokenKind::Identifier || toks[i].is(TokenKind::Punctuation, ".")) {
                i += 1;
            }
            if i < to && toks[i].is(TokenKind::Punctuation, "(") {
                i = matching(toks, i, "(", ")").map(|j| j + 1).unwrap_or(to);
            }
            continue;
        }
        match (t.kind, t.text.as_str()) {
            (TokenKind::Operator, "<") => angle += 1,
            (TokenKind::Operator, ">") => angle -= 1,
            (TokenKind::Operator, ">>") => angle -= 2,
            (TokenKind::Operator, ">>>") => angle -= 3,
            (TokenKind::Operator, "=") if angle <= 0 => return None,
            (TokenKind::Punctuation, "(") if angle <= 0 => {
                if i > from && toks[i - 1].kind == TokenKind::Identifier {
                    return Some(MethodHeader {
                        start: from,
                        name: i - 1,
                        lparen: i,
                    });
                }
                return None;
            }
            (TokenKind::Punctuation, "{") | (TokenKind::Punctuation, ";") => return None,
            _ => {}
        }
        i += 1;
    }
    None
}

/// Index of the token closing the bracket opened at `open`.
pub(crate) fn matching(toks: &[&Token], open: usize, l: &str, r: &str) -> Option<usize> {
    let mut depth = 0usize;
    for (i, t) in toks.iter().enumerate().skip(open) {
        if t.kind == TokenKind::Punctuation {
            if t.text == l {
                depth += 1;
            } else if t.text == r {
                depth -= 1;
                if depth == 0 {
                    return Some(i);
                }
            }
        }
    }
    None
}

const MAX_DEPTH: usize = 400;

const PRIMITIVES: &[&str] = &["boolean", "byte", "char", "short", "int", "long", "float", "double", "void"];

const ASSIGN_OPS: &[&str] = &["=", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<=", ">>=", ">>>="];

fn binary_precedence(t: &Token) -> Option<u8> {
    if t.is(TokenKind::Keyword, "instanceof") {
        return Some(7);
    }
    if t.kind != TokenKind::Operator {
        return None;
    }
    Some(match t.text.as_str() {
        "||" => 1,
        "&&" => 2,
        "|" => 3,
        "^" => 4,
        "&" => 5,
        "==" | "!=" => 6,
        "<" | ">" | "<=" | ">=" => 7,
        "<<" | ">>" | ">>>" => 8,
        "+" | "-" => 9,
        "*" | "/" | "%" => 10,
        _ => return None,
    })
}

type PResult<T> = Result<T, ()>;

struct Parser<'a> {
    src: &'a str,
    toks: Vec<&'a Token>,
    pos: usize,
    method_name: String,
    recovered: usize,
    depth: usize,
}

impl<'a> Parser<'a> {
    // ---- token helpers -------------------------------------------------

    fn peek(&self) -> Option<&'a Token> {
        self.toks.get(self.pos).copied()
    }

    fn peek_at(&self, n: usize) -> Option<&'a Token> {
        self.toks.get(self.pos + n).copied()
    }

    fn at(&self, kind: TokenKind, text: &str) -> bool {
        self.peek().is_some_and(|t| t.is(kind, text))
    }

    fn at_punct(&self, text: &str) -> bool {
        self.at(TokenKind::Punctuation, text)
    }

    fn at_op(&self, text: &str) -> bool {
        self.at(TokenKind::Operator, text)
    }

    fn at_kw(&self, text: &str) -> bool {
        self.at(TokenKind::Keyword, text)
    }

    fn eat_punct(&mut self, text: &str) -> bool {
        if self.at_punct(text) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_punct(&mut self, text: &str) -> PResult<()> {
        if self.eat_punct(text) {
            Ok(())
        } else {
            Err(())
        }
    }

    fn eat_op(&mut self, text: &str) -> bool {
        if self.at_op(text) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn bump(&mut self) -> PResult<&'a Token> {
        let t = self.peek().ok_or(())?;
        self.pos += 1;
        Ok(t)
    }

    /// Byte span covering tokens `from..to` (exclusive).
    fn span(&self, from: usize, to: usize) -> Range<usize> {
        if to <= from || from >= self.toks.len() {
            let at = self.toks.get(from).map(|t| t.offset).unwrap_or(self.src.len());
            return at..at;
        }
        self.toks[from].offset..self.toks[to - 1].end()
    }

    fn node(&self, kind: NodeKind, from: usize) -> AstNode {
        AstNode::new(kind, self.span(from, self.pos))
    }

    fn other(&self, form: &str, from: usize) -> AstNode {
        self.node(NodeKind::Other, from).with_attr("form", form)
    }

    fn enter(&mut self) -> PResult<()> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            Err(())
        } else {
            Ok(())
        }
    }

    fn leave(&mut self) {
        self.depth -= 1;
    }

    // ---- declarations --------------------------------------------------

    fn method_at(&mut self, start: usize, header: &MethodHeader) -> Result<AstNode, ParseFailure> {
        let name = self.toks[header.name].text.clone();
        let rparen = matching(&self.toks, header.lparen, "(", ")").ok_or(ParseFailure::NoBody)?;
        let mut method = AstNode::new(NodeKind::Method, 0..0).with_attr("name", name);
        for (from, to) in split_params(&self.toks, header.lparen + 1, rparen) {
            if let Some(p) = self.param(from, to) {
                method.children.push(p);
            }
        }
        // skip `throws ...` and legacy array dims up to the body
        let mut i = rparen + 1;
        while i < self.toks.len() && !self.toks[i].is(TokenKind::Punctuation, "{") {
            if self.toks[i].is(TokenKind::Punctuation, ";") {
                return Err(ParseFailure::NoBody);
            }
            i += 1;
        }
        if i >= self.toks.len() {
            return Err(ParseFailure::NoBody);
        }
        self.pos = i;
        let body = self.block().map_err(|_| ParseFailure::UnterminatedBody)?;
        if self.depth > MAX_DEPTH {
            return Err(ParseFailure::TooDeep);
        }
        method.children.push(body.with_role(Role::Body));
        method.span = self.span(start, self.pos);
        Ok(method)
    }

    fn param(&self, from: usize, to: usize) -> Option<AstNode> {
        // name is the last identifier, ignoring trailing `[]`
        let mut end = to;
        while end > from && self.toks[end - 1].kind == TokenKind::Punctuation && matches!(self.toks[end - 1].text.as_str(), "[" | "]") {
            end -= 1;
        }
        if end == from || self.toks[end - 1].kind != TokenKind::Identifier {
            return None;
        }
        let name = &self.toks[end - 1].text;
        let type_text = canonical_token_text(
            self.toks[from..end - 1]
                .iter()
                .filter(|t| !t.is(TokenKind::Keyword, "final"))
                .map(|t| (t.kind, t.text.as_str())),
        );
        Some(
            AstNode::new(NodeKind::VarDecl, self.span(from, to))
                .with_attr("name", name.clone())
                .with_attr("type", type_text),
        )
    }

    /// Tries to read a type starting at `i`; returns the index after it.
    fn scan_type(&self, mut i: usize) -> Option<usize> {
        let t = self.toks.get(i)?;
        let is_prim = t.kind == TokenKind::Keyword && PRIMITIVES.contains(&t.text.as_str());
        if !is_prim && t.kind != TokenKind::Identifier {
            return None;
        }
        i += 1;
        if !is_prim {
            loop {
                if self.toks.get(i).is_some_and(|t| t.is(TokenKind::Operator, "<")) {
                    i = self.scan_type_args(i)?;
                }
                if self.toks.get(i).is_some_and(|t| t.is(TokenKind::Punctuation, "."))
                    && self.toks.get(i + 1).is_some_and(|t| t.kind == TokenKind::Identifier)
                {
                    i += 2;
                    continue;
                }
                break;
            }
        }
        while self.toks.get(i).is_some_and(|t| t.is(TokenKind::Punctuation, "["))
            && self.toks.get(i + 1).is_some_and(|t| t.is(TokenKind::Punctuation, "]"))
        {
            i += 2;
        }
        if self.toks.get(i).is_some_and(|t| t.is(TokenKind::Punctuation, "...")) {
            i += 1;
        }
        Some(i)
    }

    fn scan_type_args(&self, mut i: usize) -> Option<usize> {
        let mut depth = 0i32;
        loop {
            let t = self.toks.get(i)?;
            match (t.kind, t.text.as_str()) {
                (TokenKind::Operator, "<") => depth += 1,
                (TokenKind::Operator, ">") => depth -= 1,
                (TokenKind::Operator, ">>") => depth -= 2,
                (TokenKind::Operator, ">>>") => depth -= 3,
                (TokenKind::Identifier, _)
                | (TokenKind::Punctuation, "," | "." | "[" | "]")
                | (TokenKind::Operator, "?" | "&")
                | (TokenKind::Keyword, "extends" | "super") => {}
                (TokenKind::Keyword, k) if PRIMITIVES.contains(&k) => {}
                _ => return None,
            }
            i += 1;
            if depth <= 0 {
                return (depth == 0).then_some(i);
            }
        }
    }

    fn skip_modifiers(&mut self) {
        loop {
            if self.at_kw("final") || self.at_kw("static") || self.at_kw("abstract") || self.at_kw("strictfp") {
                self.pos += 1;
            } else if self.at_punct("@") && !self.peek_at(1).is_some_and(|t| t.is(TokenKind::Keyword, "interface")) {
                self.pos += 1;
                while self
                    .peek()
                    .is_some_and(|t| t.kind == TokenKind::Identifier || t.is(TokenKind::Punctuation, "."))
                {
                    self.pos += 1;
                }
                if self.at_punct("(") {
                    match matching(&self.toks, self.pos, "(", ")") {
                        Some(j) => self.pos = j + 1,
                        None => return,
                    }
                }
            } else {
                return;
            }
        }
    }

    /// Looks ahead for `Type name (= | ; | , | [ | : | ))`.
    fn looks_like_local_decl(&self, allow_colon: bool) -> bool {
        let mut i = self.pos;
        // modifiers
        loop {
            match self.toks.get(i) {
                Some(t) if t.is(TokenKind::Keyword, "final") => i += 1,
                Some(t) if t.is(TokenKind::Punctuation, "@") => {
                    i += 1;
                    while self
                        .toks
                        .get(i)
                        .is_some_and(|t| t.kind == TokenKind::Identifier || t.is(TokenKind::Punctuation, "."))
                    {
                        i += 1;
                    }
                    if self.toks.get(i).is_some_and(|t| t.is(TokenKind::Punctuation, "(")) {
                        match matching(&self.toks, i, "(", ")") {
                            Some(j) => i = j + 1,
                            None => return false,
                        }
                    }
                }
                _ => break,
            }
        }
        if self.toks.get(i).is_some_and(|t| t.is(TokenKind::Keyword, "void")) {
            return false;
        }
        let Some(after_type) = self.scan_type(i) else { return false };
        let Some(name) = self.toks.get(after_type) else { return false };
        if name.kind != TokenKind::Identifier {
            return false;
        }
        match self.toks.get(after_type + 1) {
            Some(t) if t.kind == TokenKind::Operator && t.text == "=" => true,
            Some(t) if t.kind == TokenKind::Punctuation && matches!(t.text.as_str(), ";" | "," | "[") => true,
            Some(t) if t.is(TokenKind::Operator, ":") => allow_colon,
            _ => false,
        }
    }

    /// Parses `Type a = x, b[] = {..}` up to (not including) the terminator.
    fn local_decl(&mut self) -> PResult<Vec<AstNode>> {
        let start = self.pos;
        self.skip_modifiers();
        let type_start = self.pos;
        let type_end = self.scan_type(self.pos).ok_or(())?;
        let type_text = canonical_token_text(self.toks[type_start..type_end].iter().map(|t| (t.kind, t.text.as_str())));
        self.pos = type_end;
        let mut out = Vec::new();
        let mut decl_start = start;
        loop {
            let name = self.bump()?;
            if name.kind != TokenKind::Identifier {
                return Err(());
            }
            while self.at_punct("[") && self.peek_at(1).is_some_and(|t| t.is(TokenKind::Punctuation, "]")) {
                self.pos += 2;
            }
            let mut decl = AstNode::new(NodeKind::VarDecl, 0..0)
                .with_attr("name", name.text.clone())
                .with_attr("type", type_text.clone());
            if self.eat_op("=") {
                let init = if self.at_punct("{") { self.array_init()? } else { self.expr()? };
                decl.children.push(init.with_role(Role::Source));
            }
            decl.span = self.span(decl_start, self.pos);
            out.push(decl);
            if self.eat_punct(",") {
                decl_start = self.pos;
                continue;
            }
            return Ok(out);
        }
    }

    // ---- statements ----------------------------------------------------

    fn block(&mut self) -> PResult<AstNode> {
        let start = self.pos;
        self.expect_punct("{")?;
        let mut block = AstNode::new(NodeKind::Block, 0..0);
        loop {
            match self.peek() {
                None => return Err(()),
                Some(t) if t.is(TokenKind::Punctuation, "}") => {
                    self.pos += 1;
                    break;
                }
                Some(_) => {
                    let nodes = self.statement_recovering();
                    block.children.extend(nodes);
                }
            }
        }
        block.span = self.span(start, self.pos);
        Ok(block)
    }

    /// Parses one statement; on failure skips to a safe point and returns an
    /// `other(form=error)` node covering the skipped tokens.
    fn statement_recovering(&mut self) -> Vec<AstNode> {
        let start = self.pos;
        let saved_depth = self.depth;
        match self.statement() {
            Ok(nodes) => nodes,
            Err(()) => {
                self.depth = saved_depth;
                self.pos = start;
                self.recover();
                self.recovered += 1;
                if self.pos == start {
                    // never loop without progress
                    self.pos += 1;
                }
                vec![self.other("error", start)]
            }
        }
    }

    fn recover(&mut self) {
        let mut depth = 0i32;
        while let Some(t) = self.peek() {
            if t.kind == TokenKind::Punctuation {
                match t.text.as_str() {
                    "{" | "(" | "[" => depth += 1,
                    ")" | "]" => depth -= 1,
                    "}" => {
                        if depth <= 0 {
                            return;
                        }
                        depth -= 1;
                        if depth == 0 {
                            self.pos += 1;
                            // a closed brace group ends the statement unless `;` follows
                            if !self.at_punct(";") && !self.at_punct(")") && !self.at_punct(",") && !self.at_punct(".") {
                                return;
                            }
                            continue;
                        }
                    }
                    ";" if depth <= 0 => {
                        self.pos += 1;
                        return;
                    }
                    _ => {}
                }
            }
            self.pos += 1;
        }
    }

    /// Statement that must produce exactly one node (if/loop bodies).
    fn sub_statement(&mut self, role: Role) -> PResult<Option<AstNode>> {
        let start = self.pos;
        let mut nodes = self.statement()?;
        Ok(match nodes.len() {
            0 => None,
            1 => Some(nodes.remove(0).with_role(role)),
            _ => {
                let mut block = AstNode::new(NodeKind::Block, self.span(start, self.pos));
                block.children = nodes;
                Some(block.with_role(role))
            }
        })
    }

    fn statement(&mut self) -> PResult<Vec<AstNode>> {
        self.enter()?;
        let r = self.statement_inner();
        self.leave();
        r
    }

    fn statement_inner(&mut self) -> PResult<Vec<AstNode>> {
        let start = self.pos;
        let t = self.peek().ok_or(())?;
        match (t.kind, t.text.as_str()) {
            (TokenKind::Punctuation, "{") => return Ok(vec![self.block()?]),
            (TokenKind::Punctuation, ";") => {
                self.pos += 1;
                return Ok(vec![]);
            }
            (TokenKind::Keyword, "if") => return Ok(vec![self.if_stmt()?]),
            (TokenKind::Keyword, "for") => return Ok(vec![self.for_stmt()?]),
            (TokenKind::Keyword, "while") => {
                self.pos += 1;
                self.expect_punct("(")?;
                let cond = self.expr()?.with_role(Role::Condition);
                self.expect_punct(")")?;
                let body = self.sub_statement(Role::Body)?;
                let mut node = AstNode::new(NodeKind::Loop, 0..0).with_attr("form", "while").with_child(cond);
                node.children.extend(body);
                node.span = self.span(start, self.pos);
                return Ok(vec![node]);
            }
            (TokenKind::Keyword, "do") => {
                self.pos += 1;
                let body = self.sub_statement(Role::Body)?;
                if !self.at_kw("while") {
                    return Err(());
                }
                self.pos += 1;
                self.expect_punct("(")?;
                let cond = self.expr()?.with_role(Role::Condition);
                self.expect_punct(")")?;
                self.expect_punct(";")?;
                let mut node = AstNode::new(NodeKind::Loop, 0..0).with_attr("form", "do");
                node.children.extend(body);
                node.children.push(cond);
                node.span = self.span(start, self.pos);
                return Ok(vec![node]);
            }
            (TokenKind::Keyword, "return") => {
                self.pos += 1;
                let mut node = AstNode::new(NodeKind::Return, 0..0);
                if !self.at_punct(";") {
                    node.children.push(self.expr()?);
                }
                self.expect_punct(";")?;
                node.span = self.span(start, self.pos);
                return Ok(vec![node]);
            }
            (TokenKind::Keyword, kw @ ("break" | "continue")) => {
                self.pos += 1;
                let mut node = AstNode::new(NodeKind::Other, 0..0).with_attr("form", kw);
                if self.peek().is_some_and(|t| t.kind == TokenKind::Identifier) {
                    let label = self.bump()?;
                    node = node.with_attr("label", label.text.clone());
                }
                self.expect_punct(";")?;
                node.span = self.span(start, self.pos);
                return Ok(vec![node]);
            }
            (TokenKind::Keyword, "throw") => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect_punct(";")?;
                return Ok(vec![self.other("throw", start).with_child(e)]);
            }
            (TokenKind::Keyword, "try") => return Ok(vec![self.try_stmt()?]),
            (TokenKind::Keyword, "switch") => {
                let node = self.switch()?;
                self.eat_punct(";");
                return Ok(vec![node]);
            }
            (TokenKind::Keyword, "synchronized") => {
                self.pos += 1;
                self.expect_punct("(")?;
                let e = self.expr()?;
                self.expect_punct(")")?;
                let b = self.block()?;
                return Ok(vec![self.other("synchronized", start).with_child(e).with_child(b)]);
            }
            (TokenKind::Keyword, "assert") => {
                self.pos += 1;
                let mut node = AstNode::new(NodeKind::Other, 0..0).with_attr("form", "assert");
                node.children.push(self.expr()?);
                if self.eat_op(":") {
                    node.children.push(self.expr()?);
                }
                self.expect_punct(";")?;
                node.span = self.span(start, self.pos);
                return Ok(vec![node]);
            }
            (TokenKind::Keyword, "class" | "interface" | "enum") => return Ok(vec![self.local_type()?]),
            (TokenKind::Keyword, "abstract" | "static" | "strictfp")
                if self.toks[self.pos..].iter().take(4).any(|t| t.is(TokenKind::Keyword, "class")) =>
            {
                return Ok(vec![self.local_type()?])
            }
            (TokenKind::Keyword, "final") if self.peek_at(1).is_some_and(|t| t.is(TokenKind::Keyword, "class")) => {
                return Ok(vec![self.local_type()?])
            }
            (TokenKind::Identifier, "yield")
                if self.peek_at(1).is_some_and(|n| {
                    !(n.kind == TokenKind::Operator && ASSIGN_OPS.contains(&n.text.as_str()))
                        && !n.is(TokenKind::Punctuation, "(")
                        && !n.is(TokenKind::Punctuation, ".")
                        && !n.is(TokenKind::Punctuation, "[")
                        && !n.is(TokenKind::Punctuation, ";")
                }) =>
            {
                self.pos += 1;
                let e = self.expr()?;
                self.expect_punct(";")?;
                return Ok(vec![self.other("yield", start).with_child(e)]);
            }
            (TokenKind::Identifier, "record")
                if self.peek_at(1).is_some_and(|t| t.kind == TokenKind::Identifier)
                    && self.peek_at(2).is_some_and(|t| t.is(TokenKind::Punctuation, "(")) =>
            {
                return Ok(vec![self.local_type()?])
            }
            (TokenKind::Identifier, _) if self.peek_at(1).is_some_and(|t| t.is(TokenKind::Operator, ":")) => {
                let label = self.bump()?.text.clone();
                self.pos += 1;
                let inner = self.sub_statement(Role::Body)?;
                let mut node = AstNode::new(NodeKind::Other, 0..0)
                    .with_attr("form", "label")
                    .with_attr("label", label);
                node.children.extend(inner.map(|n| AstNode { role: None, ..n }));
                node.span = self.span(start, self.pos);
                return Ok(vec![node]);
            }
            _ => {}
        }
        if self.looks_like_local_decl(false) {
            let decls = self.local_decl()?;
            self.expect_punct(";")?;
            return Ok(decls);
        }
        let e = self.expr()?;
        self.expect_punct(";")?;
        Ok(vec![e])
    }

    fn if_stmt(&mut self) -> PResult<AstNode> {
        let start = self.pos;
        self.pos += 1;
        self.expect_punct("(")?;
        let cond = self.expr()?.with_role(Role::Condition);
        self.expect_punct(")")?;
        let mut node = AstNode::new(NodeKind::If, 0..0).with_child(cond);
        node.children.extend(self.sub_statement(Role::Body)?);
        if self.at_kw("else") {
            self.pos += 1;
            node.children.extend(self.sub_statement(Role::Body)?);
        }
        node.span = self.span(start, self.pos);
        Ok(node)
    }

    fn for_stmt(&mut self) -> PResult<AstNode> {
        let start = self.pos;
        self.pos += 1;
        self.expect_punct("(")?;
        let mut node = AstNode::new(NodeKind::Loop, 0..0);
        if self.looks_like_local_decl(true) && self.is_foreach_header() {
            let decl_start = self.pos;
            self.skip_modifiers();
            let type_start = self.pos;
            let type_end = self.scan_type(self.pos).ok_or(())?;
            let type_text = canonical_token_text(self.toks[type_start..type_end].iter().map(|t| (t.kind, t.text.as_str())));
            self.pos = type_end;
            let name = self.bump()?.text.clone();
            let decl = AstNode::new(NodeKind::VarDecl, self.span(decl_start, self.pos))
                .with_attr("name", name)
                .with_attr("type", type_text);
            if !self.eat_op(":") {
                return Err(());
            }
            let iterable = self.expr()?;
            self.expect_punct(")")?;
            node = node.with_attr("form", "foreach").with_child(decl).with_child(iterable);
        } else {
            node = node.with_attr("form", "for");
            if !self.at_punct(";") {
                if self.looks_like_local_decl(false) {
                    node.children.extend(self.local_decl()?);
                } else {
                    node.children.push(self.expr()?);
                    while self.eat_punct(",") {
                        node.children.push(self.expr()?);
                    }
                }
            }
            self.expect_punct(";")?;
            if !self.at_punct(";") {
                node.children.push(self.expr()?.with_role(Role::Condition));
            }
            self.expect_punct(";")?;
            if !self.at_punct(")") {
                node.children.push(self.expr()?);
                while self.eat_punct(",") {
                    node.children.push(self.expr()?);
                }
            }
            self.expect_punct(")")?;
        }
        node.children.extend(self.sub_statement(Role::Body)?);
        node.span = self.span(start, self.pos);
        Ok(node)
    }

    fn is_foreach_header(&self) -> bool {
        // a ':' at paren depth 0 before the closing ')'
        let mut depth = 0i32;
        for t in &self.toks[self.pos..] {
            match (t.kind, t.text.as_str()) {
                (TokenKind::Punctuation, "(") => depth += 1,
                (TokenKind::Punctuation, ")") => {
                    if depth == 0 {
                        return false;
                    }
                    depth -= 1;
                }
                (TokenKind::Punctuation, ";") => return false,
                (TokenKind::Operator, ":") if depth == 0 => return true,
                _ => {}
            }
        }
        false
    }

    fn try_stmt(&mut self) -> PResult<AstNode> {
        let start = self.pos;
        self.pos += 1;
        let mut node = AstNode::new(NodeKind::Other, 0..0).with_attr("form", "try");
        if self.eat_punct("(") {
            loop {
                if self.at_punct(")") {
                    break;
                }
                if self.looks_like_local_decl(false) {
                    node.children.extend(self.local_decl()?);
                } else {
                    node.children.push(self.expr()?);
                }
                if !self.eat_punct(";") {
                    break;
                }
            }
            self.expect_punct(")")?;
        }
        node.children.push(self.block()?);
        while self.at_kw("catch") {
            let catch_start = self.pos;
            self.pos += 1;
            self.expect_punct("(")?;
            let decl_start = self.pos;
            self.skip_modifiers();
            let type_start = self.pos;
            let mut type_end = self.scan_type(self.pos).ok_or(())?;
            while self.toks.get(type_end).is_some_and(|t| t.is(TokenKind::Operator, "|")) {
                type_end = self.scan_type(type_end + 1).ok_or(())?;
            }
            let type_text = canonical_token_text(self.toks[type_start..type_end].iter().map(|t| (t.kind, t.text.as_str())));
            self.pos = type_end;
            let name = self.bump()?;
            if name.kind != TokenKind::Identifier {
                return Err(());
            }
            let decl = AstNode::new(NodeKind::VarDecl, self.span(decl_start, self.pos))
                .with_attr("name", name.text.clone())
                .with_attr("type", type_text);
            self.expect_punct(")")?;
            let body = self.block()?;
            node.children
                .push(self.other("catch", catch_start).with_child(decl).with_child(body));
        }
        if self.at_kw("finally") {
            let fin_start = self.pos;
            self.pos += 1;
            let body = self.block()?;
            node.children.push(self.other("finally", fin_start).with_child(body));
        }
        node.span = self.span(start, self.pos);
        Ok(node)
    }

    fn switch(&mut self) -> PResult<AstNode> {
        let start = self.pos;
        self.pos += 1;
        self.expect_punct("(")?;
        let selector = self.expr()?.with_role(Role::Condition);
        self.expect_punct(")")?;
        self.expect_punct("{")?;
        let mut node = AstNode::new(NodeKind::Other, 0..0).with_attr("form", "switch").with_child(selector);
        loop {
            match self.peek() {
                None => return Err(()),
                Some(t) if t.is(TokenKind::Punctuation, "}") => {
                    self.pos += 1;
                    break;
                }
                Some(t) if t.is(TokenKind::Keyword, "case") || t.is(TokenKind::Keyword, "default") => {
                    let label_start = self.pos;
                    let is_default = t.text == "default";
                    self.pos += 1;
                    let mut label = AstNode::new(NodeKind::Other, 0..0).with_attr("form", if is_default { "default" } else { "case" });
                    if !is_default {
                        loop {
                            label.children.push(self.ternary()?);
                            if !self.eat_punct(",") {
                                break;
                            }
                        }
                    }
                    let arrow = if self.eat_op("->") {
                        true
                    } else if self.eat_op(":") {
                        false
                    } else {
                        return Err(());
                    };
                    label.span = self.span(label_start, self.pos);
                    node.children.push(label);
                    if arrow {
                        let nodes = self.statement()?;
                        node.children.extend(nodes);
                    }
                }
                Some(_) => {
                    let nodes = self.statement_recovering();
                    node.children.extend(nodes);
                }
            }
        }
        node.span = self.span(start, self.pos);
        Ok(node)
    }

    fn local_type(&mut self) -> PResult<AstNode> {
        let start = self.pos;
        while self.peek().is_some_and(|t| !t.is(TokenKind::Punctuation, "{")) {
            if self.at_punct(";") || self.at_punct("}") {
                return Err(());
            }
            self.pos += 1;
        }
        let body = self.class_body()?;
        let mut node = self.other("local-class", start);
        node.children.push(body);
        node.span = self.span(start, self.pos);
        Ok(node)
    }

    /// `{ members }` of an anonymous or local class. Member methods become
    /// `method` nodes; other members are skipped.
    fn class_body(&mut self) -> PResult<AstNode> {
        let start = self.pos;
        let close = matching(&self.toks, self.pos, "{", "}").ok_or(())?;
        self.pos += 1;
        let mut node = AstNode::new(NodeKind::Other, 0..0).with_attr("form", "class-body");
        while self.pos < close {
            let member_start = self.pos;
            // member extends to `;` or a `{...}` group
            let mut j = self.pos;
            let mut brace_open = None;
            let mut depth = 0i32;
            while j < close {
                let t = self.toks[j];
                if t.kind == TokenKind::Punctuation {
                    match t.text.as_str() {
                        "(" => depth += 1,
                        ")" => depth -= 1,
                        ";" if depth == 0 => break,
                        "{" if depth == 0 => {
                            brace_open = Some(j);
                            break;
                        }
                        _ => {}
                    }
                }
                j += 1;
            }
            match brace_open {
                Some(open) => {
                    let end = matching(&self.toks, open, "{", "}").ok_or(())?;
                    if let Some(h) = find_method_header(&self.toks, member_start, open) {
                        self.enter()?;
                        let m = self.method_at(member_start, &h).map_err(|_| ());
                        self.leave();
                        node.children.push(m?);
                    }
                    self.pos = end + 1;
                }
                None => self.pos = (j + 1).min(close),
            }
        }
        self.pos = close + 1;
        node.span = self.span(start, self.pos);
        Ok(node)
    }

    // ---- expressions ---------------------------------------------------

    fn expr(&mut self) -> PResult<AstNode> {
        self.enter()?;
        let r = self.assignment();
        self.leave();
        r
    }

    fn assignment(&mut self) -> PResult<AstNode> {
        if self.at_lambda() {
            return self.lambda();
        }
        let start = self.pos;
        let lhs = self.ternary()?;
        if let Some(t) = self.peek() {
            if t.kind == TokenKind::Operator && ASSIGN_OPS.contains(&t.text.as_str()) {
                self.pos += 1;
                let rhs = if self.at_punct("{") { self.array_init()? } else { self.expr()? };
                let node = self
                    .node(NodeKind::Assign, start)
                    .with_attr("op", t.text.clone())
                    .with_child(lhs.with_role(Role::Target))
                    .with_child(rhs.with_role(Role::Source));
                return Ok(node);
            }
        }
        Ok(lhs)
    }

    fn at_lambda(&self) -> bool {
        match self.peek() {
            Some(t) if t.kind == TokenKind::Identifier => self.peek_at(1).is_some_and(|n| n.is(TokenKind::Operator, "->")),
            Some(t) if t.is(TokenKind::Punctuation, "(") => matching(&self.toks, self.pos, "(", ")")
                .and_then(|j| self.toks.get(j + 1))
                .is_some_and(|n| n.is(TokenKind::Operator, "->")),
            _ => false,
        }
    }

    fn lambda(&mut self) -> PResult<AstNode> {
        let start = self.pos;
        let mut node = AstNode::new(NodeKind::Other, 0..0).with_attr("form", "lambda");
        if self.at_punct("(") {
            let close = matching(&self.toks, self.pos, "(", ")").ok_or(())?;
            for (from, to) in split_params(&self.toks, self.pos + 1, close) {
                if let Some(p) = self.param(from, to) {
                    node.children.push(p);
                }
            }
            self.pos = close + 1;
        } else {
            let name = self.bump()?;
            node.children
                .push(AstNode::new(NodeKind::VarDecl, self.span(self.pos - 1, self.pos)).with_attr("name", name.text.clone()));
        }
        if !self.eat_op("->") {
            return Err(());
        }
        let body = if self.at_punct("{") { self.block()? } else { self.expr()? };
        node.children.push(body.with_role(Role::Body));
        node.span = self.span(start, self.pos);
        Ok(node)
    }

    fn ternary(&mut self) -> PResult<AstNode> {
        let start = self.pos;
        let cond = self.binary(1)?;
        if self.eat_op("?") {
            let a = self.ternary_branch()?;
            if !self.eat_op(":") {
                return Err(());
            }
            let b = self.ternary_branch()?;
            return Ok(self
                .other("ternary", start)
                .with_child(cond.with_role(Role::Condition))
                .with_child(a)
                .with_child(b));
        }
        Ok(cond)
    }

    fn ternary_branch(&mut self) -> PResult<AstNode> {
        if self.at_lambda() {
            self.lambda()
        } else {
            self.enter()?;
            let r = self.ternary();
            self.leave();
            r
        }
    }

    fn binary(&mut self, min_prec: u8) -> PResult<AstNode> {
        let start = self.pos;
        let mut lhs = self.unary()?;
        while let Some(t) = self.peek() {
            let Some(prec) = binary_precedence(t) else { break };
            if prec < min_prec {
                break;
            }
            self.pos += 1;
            let rhs = if t.text == "instanceof" {
                let type_start = self.pos;
                if self.at_kw("final") {
                    self.pos += 1;
                }
                let end = self.scan_type(self.pos).ok_or(())?;
                self.pos = end;
                let mut ty = self.other("type", type_start);
                if self.peek().is_some_and(|n| n.kind == TokenKind::Identifier) {
                    let name = self.bump()?;
                    ty.children
                        .push(AstNode::new(NodeKind::VarDecl, self.span(self.pos - 1, self.pos)).with_attr("name", name.text.clone()));
                    ty.span = self.span(type_start, self.pos);
                }
                ty
            } else {
                self.enter()?;
                let r = self.binary(prec + 1);
                self.leave();
                r?
            };
            lhs = self
                .node(NodeKind::BinaryOp, start)
                .with_attr("op", t.text.clone())
                .with_child(lhs)
                .with_child(rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> PResult<AstNode> {
        let start = self.pos;
        let t = self.peek().ok_or(())?;
        if t.kind == TokenKind::Operator && matches!(t.text.as_str(), "+" | "-" | "!" | "~" | "++" | "--") {
            self.pos += 1;
            self.enter()?;
            let operand = self.unary();
            self.leave();
            let operand = operand?;
            return Ok(self
                .node(NodeKind::UnaryOp, start)
                .with_attr("op", t.text.clone())
                .with_child(operand));
        }
        if t.is(TokenKind::Punctuation, "(") {
            if let Some(after) = self.cast_end() {
                self.pos = after;
                self.enter()?;
                let operand = self.unary();
                self.leave();
                let operand = operand?;
                let type_text = canonical_token_text(self.toks[start + 1..after - 1].iter().map(|t| (t.kind, t.text.as_str())));
                return Ok(self.other("cast", start).with_attr("type", type_text).with_child(operand));
            }
        }
        self.postfix()
    }

    /// If a cast `(Type)` starts here, the index after its `)`.
    fn cast_end(&self) -> Option<usize> {
        let type_end = self.scan_type(self.pos + 1)?;
        let mut end = type_end;
        // intersection casts: (A & B)
        while self.toks.get(end).is_some_and(|t| t.is(TokenKind::Operator, "&")) {
            end = self.scan_type(end + 1)?;
        }
        if !self.toks.get(end)?.is(TokenKind::Punctuation, ")") {
            return None;
        }
        let first = self.toks[self.pos + 1];
        let primitive = first.kind == TokenKind::Keyword && type_end == self.pos + 2;
        let next = self.toks.get(end + 1)?;
        let operand_start = match next.kind {
            TokenKind::Identifier | TokenKind::LiteralNumber | TokenKind::LiteralString | TokenKind::LiteralChar => true,
            TokenKind::Keyword => {
                matches!(next.text.as_str(), "this" | "new" | "super" | "true" | "false" | "null" | "switch")
                    || PRIMITIVES.contains(&next.text.as_str())
            }
            TokenKind::Punctuation => next.text == "(",
            TokenKind::Operator => {
                matches!(next.text.as_str(), "!" | "~") || (primitive && matches!(next.text.as_str(), "+" | "-" | "++" | "--"))
            }
            _ => false,
        };
        operand_start.then_some(end + 1)
    }

    fn postfix(&mut self) -> PResult<AstNode> {
        let start = self.pos;
        let mut node = self.primary()?;
        loop {
            if self.at_punct(".") {
                self.pos += 1;
                if self.at_op("<") {
                    // explicit generic call: recv.<T>foo()
                    self.pos = self.scan_type_args(self.pos).ok_or(())?;
                }
                let t = self.bump()?;
                match t.kind {
                    TokenKind::Identifier => {
                        if self.at_punct("(") {
                            let mut call = AstNode::new(NodeKind::Call, 0..0).with_attr("name", t.text.clone());
                            if t.text == self.method_name {
                                call = call.with_attr("recursive", "true");
                            }
                            call.children.push(node);
                            call.children.extend(self.arguments()?);
                            call.span = self.span(start, self.pos);
                            node = call;
                        } else {
                            node = self
                                .node(NodeKind::IdentifierRef, start)
                                .with_attr("name", t.text.clone())
                                .with_child(node);
                        }
                    }
                    TokenKind::Keyword if matches!(t.text.as_str(), "class" | "this" | "super") => {
                        node = self.other(&format!("qualified-{}", t.text), start).with_child(node);
                    }
                    TokenKind::Keyword if t.text == "new" => {
                        // inner class creation: outer.new Inner()
                        self.pos -= 1;
                        let created = self.creation()?;
                        node = self.other("qualified-new", start).with_child(node).with_child(created);
                    }
                    _ => return Err(()),
                }
            } else if self.at_punct("[") {
                self.pos += 1;
                let index = self.expr()?;
                self.expect_punct("]")?;
                let canon = self.canonical(&index);
                if node.kind == NodeKind::ArrayAccess && node_is_chain_head(&node) {
                    if let Some(AttrValue::List(ix)) = node.attrs.get_mut("indices") {
                        ix.push(canon);
                    }
                    node.children.push(index);
                    node.span = self.span(start, self.pos);
                } else {
                    let mut access = AstNode::new(NodeKind::ArrayAccess, 0..0);
                    access.attrs.insert("indices".into(), AttrValue::List(vec![canon]));
                    access.children.push(node);
                    access.children.push(index);
                    access.span = self.span(start, self.pos);
                    node = access;
                }
            } else if self.at_op("++") || self.at_op("--") {
                let op = self.bump()?.text.clone();
                node = self
                    .node(NodeKind::UnaryOp, start)
                    .with_attr("op", op)
                    .with_attr("fix", "postfix")
                    .with_child(node);
            } else if self.at_punct("::") {
                self.pos += 1;
                let t = self.bump()?;
                node = self.other("method-ref", start).with_attr("name", t.text.clone()).with_child(node);
            } else {
                break;
            }
        }
        Ok(node)
    }

    fn canonical(&self, expr: &AstNode) -> String {
        canonical_token_text(
            self.toks
                .iter()
                .filter(|t| t.offset >= expr.span.start && t.end() <= expr.span.end)
                .map(|t| (t.kind, t.text.as_str())),
        )
    }

    fn arguments(&mut self) -> PResult<Vec<AstNode>> {
        self.expect_punct("(")?;
        let mut args = Vec::new();
        if self.eat_punct(")") {
            return Ok(args);
        }
        loop {
            args.push(self.expr()?);
            if self.eat_punct(",") {
                continue;
            }
            self.expect_punct(")")?;
            return Ok(args);
        }
    }

    fn primary(&mut self) -> PResult<AstNode> {
        let start = self.pos;
        let t = self.bump()?;
        match t.kind {
            TokenKind::LiteralNumber | TokenKind::LiteralString | TokenKind::LiteralChar => {
                Ok(self.node(NodeKind::Literal, start).with_attr("value", t.text.clone()))
            }
            TokenKind::Identifier => {
                if self.at_punct("(") {
                    let mut call = AstNode::new(NodeKind::Call, 0..0).with_attr("name", t.text.clone());
                    if t.text == self.method_name {
                        call = call.with_attr("recursive", "true");
                    }
                    call.children = self.arguments()?;
                    call.span = self.span(start, self.pos);
                    Ok(call)
                } else {
                    Ok(self.node(NodeKind::IdentifierRef, start).with_attr("name", t.text.clone()))
                }
            }
            TokenKind::Keyword => match t.text.as_str() {
                "true" | "false" | "null" => Ok(self.node(NodeKind::Literal, start).with_attr("value", t.text.clone())),
                "this" | "super" => {
                    if self.at_punct("(") {
                        let mut call = AstNode::new(NodeKind::Call, 0..0).with_attr("name", t.text.clone());
                        call.children = self.arguments()?;
                        call.span = self.span(start, self.pos);
                        Ok(call)
                    } else {
                        Ok(self.node(NodeKind::IdentifierRef, start).with_attr("name", t.text.clone()))
                    }
                }
                "new" => {
                    self.pos -= 1;
                    self.creation()
                }
                "switch" => {
                    self.pos -= 1;
                    self.switch()
                }
                k if PRIMITIVES.contains(&k) => {
                    // int.class, int[].class, int[]::new
                    while self.at_punct("[") && self.peek_at(1).is_some_and(|t| t.is(TokenKind::Punctuation, "]")) {
                        self.pos += 2;
                    }
                    if self.at_punct(".") && self.peek_at(1).is_some_and(|t| t.is(TokenKind::Keyword, "class")) {
                        self.pos += 2;
                        return Ok(self.other("class-literal", start));
                    }
                    if self.at_punct("::") {
                        return Ok(self.other("type", start));
                    }
                    Err(())
                }
                _ => Err(()),
            },
            TokenKind::Punctuation if t.text == "(" => {
                let mut inner = self.expr()?;
                self.expect_punct(")")?;
                // parentheses widen the span; canonical text strips them
                inner.span = self.span(start, self.pos);
                Ok(inner)
            }
            _ => Err(()),
        }
    }

    fn creation(&mut self) -> PResult<AstNode> {
        let start = self.pos;
        self.pos += 1; // new
        let type_start = self.pos;
        let first = self.peek().ok_or(())?;
        if first.kind != TokenKind::Identifier && !(first.kind == TokenKind::Keyword && PRIMITIVES.contains(&first.text.as_str())) {
            return Err(());
        }
        self.pos += 1;
        loop {
            if self.at_op("<") {
                self.pos = self.scan_type_args(self.pos).ok_or(())?;
            } else if self.at_punct(".") && self.peek_at(1).is_some_and(|t| t.kind == TokenKind::Identifier) {
                self.pos += 2;
            } else {
                break;
            }
        }
        let type_text = canonical_token_text(self.toks[type_start..self.pos].iter().map(|t| (t.kind, t.text.as_str())));
        let mut node = AstNode::new(NodeKind::Other, 0..0).with_attr("type", type_text);
        if self.at_punct("[") {
            node = node.with_attr("form", "new-array");
            while self.at_punct("[") {
                self.pos += 1;
                if self.eat_punct("]") {
                    continue;
                }
                node.children.push(self.expr()?);
                self.expect_punct("]")?;
            }
            if self.at_punct("{") {
                node.children.push(self.array_init()?);
            }
        } else {
            node = node.with_attr("form", "new");
            node.children.extend(self.arguments()?);
            if self.at_punct("{") {
                node.children.push(self.class_body()?);
            }
        }
        node.span = self.span(start, self.pos);
        Ok(node)
    }

    fn array_init(&mut self) -> PResult<AstNode> {
        let start = self.pos;
        self.expect_punct("{")?;
        let mut node = AstNode::new(NodeKind::Other, 0..0).with_attr("form", "array-init");
        loop {
            if self.eat_punct("}") {
                break;
            }
            let e = if self.at_punct("{") { self.array_init()? } else { self.expr()? };
            node.children.push(e);
            if !self.eat_punct(",") {
                self.expect_punct("}")?;
                break;
            }
        }
        node.span = self.span(start, self.pos);
        Ok(node)
    }
}

/// An array-access node that can absorb another `[index]`.
fn node_is_chain_head(node: &AstNode) -> bool {
    node.kind == NodeKind::ArrayAccess && node.indices().is_some()
}

/// Splits a parameter list at depth-0 commas (generic-aware).
pub(crate) fn split_params(toks: &[&Token], from: usize, to: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut seg = from;
    for (i, t) in toks.iter().enumerate().take(to).skip(from) {
        match (t.kind, t.text.as_str()) {
            (TokenKind::Operator, "<") | (TokenKind::Punctuation, "(") => depth += 1,
            (TokenKind::Operator, ">") | (TokenKind::Punctuation, ")") => depth -= 1,
            (TokenKind::Operator, ">>") => depth -= 2,
            (TokenKind::Operator, ">>>") => depth -= 3,
            (TokenKind::Punctuation, ",") if depth == 0 => {
                out.push((seg, i));
                seg = i + 1;
            }
            _ => {}
        }
    }
    if seg < to {
        out.push((seg, to));
    }
    out
}
