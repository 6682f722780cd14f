use thiserror::Error;

use super::{AttrConstraint, AttrMatcher, ChildSlot, NodePattern, PatternFamily, PatternId, PatternNode, StructuralPattern};
use crate::algorithm::Algorithm;
use crate::code_model::{NodeKind, Role};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DslError {
    #[error("{line}:{column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("{line}:{column}: unknown node kind `{kind}`")]
    UnknownKind { line: usize, column: usize, kind: String },
    #[error("line {line}: {message}")]
    Header { line: usize, message: String },
    #[error("equality refers to unbound capture `@{name}`")]
    UnboundCapture { name: String },
    #[error("cannot read pattern {path}: {message}")]
    Io { path: String, message: String },
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    LParen,
    RParen,
    Eq,
    LBrack,
    RBrack,
    Comma,
    Capture(String),
    Str(String),
    Regex(String),
    Atom(String),
}

struct Lexed {
    tok: Tok,
    line: usize,
    column: usize,
}

fn is_atom_char(c: char) -> bool {
    c.is_alphanumeric() || "_-.+*<>!%&|^~?:".contains(c)
}

fn lex(text: &str) -> Result<Vec<Lexed>, DslError> {
    let mut out = Vec::new();
    let mut chars = text.char_indices().peekable();
    let mut line = 1;
    let mut line_start = 0;
    while let Some(&(i, c)) = chars.peek() {
        let column = text[line_start..i].chars().count() + 1;
        let err = |message: String| DslError::Syntax { line, column, message };
        let single = match c {
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '=' => Some(Tok::Eq),
            '[' => Some(Tok::LBrack),
            ']' => Some(Tok::RBrack),
            ',' => Some(Tok::Comma),
            _ => None,
        };
        if let Some(tok) = single {
            chars.next();
            out.push(Lexed { tok, line, column });
            continue;
        }
        if c == '\n' {
            chars.next();
            line += 1;
            line_start = i + 1;
            continue;
        }
        if c.is_whitespace() {
            chars.next();
            continue;
        }
        if c == ';' {
            // comment to end of line
            while chars.peek().is_some_and(|&(_, c)| c != '\n') {
                chars.next();
            }
            continue;
        }
        let tok = match c {
            '"' | '/' => {
                chars.next();
                let mut s = String::new();
                let mut closed = false;
                while let Some((_, d)) = chars.next() {
                    if d == '\n' {
                        break;
                    }
                    if d == '\\' {
                        match chars.next() {
                            Some((_, e)) if e == c || (c == '"' && e == '\\') => s.push(e),
                            Some((_, e)) => {
                                s.push('\\');
                                s.push(e);
                            }
                            None => break,
                        }
                        continue;
                    }
                    if d == c {
                        closed = true;
                        break;
                    }
                    s.push(d);
                }
                if !closed {
                    let what = if c == '"' { "string" } else { "regex" };
                    return Err(err(format!("unterminated {what}")));
                }
                if c == '"' {
                    Tok::Str(s)
                } else {
                    Tok::Regex(s)
                }
            }
            '@' => {
                chars.next();
                let mut s = String::new();
                while let Some(&(_, d)) = chars.peek() {
                    if d.is_alphanumeric() || d == '_' || d == '\'' {
                        s.push(d);
                        chars.next();
                    } else {
                        break;
                    }
                }
                if s.is_empty() {
                    return Err(err("empty capture name".into()));
                }
                Tok::Capture(s)
            }
            c if is_atom_char(c) => {
                let mut s = String::new();
                while let Some(&(_, d)) = chars.peek() {
                    if is_atom_char(d) {
                        s.push(d);
                        chars.next();
                    } else {
                        break;
                    }
                }
                Tok::Atom(s)
            }
            other => return Err(err(format!("unexpected character `{other}`"))),
        };
        out.push(Lexed { tok, line, column });
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Lexed>,
    pos: usize,
    nodes: Vec<PatternNode>,
    end: (usize, usize),
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|l| &l.tok)
    }

    fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.toks.get(self.pos + k).map(|l| &l.tok)
    }

    fn here(&self) -> (usize, usize) {
        self.toks.get(self.pos).map_or(self.end, |l| (l.line, l.column))
    }

    fn error(&self, message: impl Into<String>) -> DslError {
        let (line, column) = self.here();
        DslError::Syntax {
            line,
            column,
            message: message.into(),
        }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), DslError> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(format!("expected {what}")))
        }
    }

    fn pattern(&mut self) -> Result<PatternId, DslError> {
        self.expect(Tok::LParen, "`(`")?;
        let (line, column) = self.here();
        let head = match self.peek() {
            Some(Tok::Atom(a)) => a.clone(),
            _ => return Err(self.error("expected a node kind, `or` or `and`")),
        };
        self.pos += 1;
        let id = self.nodes.len();
        if head == "or" || head == "and" {
            self.nodes.push(PatternNode::Or(Vec::new()));
            let mut branches = Vec::new();
            while self.peek() == Some(&Tok::LParen) {
                branches.push(self.pattern()?);
            }
            if branches.len() < 2 {
                return Err(DslError::Syntax {
                    line,
                    column,
                    message: format!("`{head}` needs at least two branches"),
                });
            }
            self.expect(Tok::RParen, "`)` or another branch")?;
            self.nodes[id] = if head == "or" {
                PatternNode::Or(branches)
            } else {
                PatternNode::And(branches)
            };
            return Ok(id);
        }
        let kind = if head == "any" {
            None
        } else {
            Some(NodeKind::from_name(&head).ok_or(DslError::UnknownKind {
                line,
                column,
                kind: head.clone(),
            })?)
        };
        self.nodes.push(PatternNode::Or(Vec::new()));
        let mut np = NodePattern {
            kind,
            attrs: Vec::new(),
            children: Vec::new(),
        };
        // 0 = attributes, 1 = role children, 2 = free children
        let mut phase = 0;
        loop {
            match self.peek() {
                Some(Tok::RParen) => {
                    self.pos += 1;
                    break;
                }
                Some(Tok::LParen) => {
                    phase = 2;
                    let child = self.pattern()?;
                    np.children.push(ChildSlot { role: None, node: child });
                }
                Some(Tok::Atom(key)) if self.peek_at(1) == Some(&Tok::Eq) => {
                    let key = key.clone();
                    if self.peek_at(2) == Some(&Tok::LParen) {
                        let role = Role::from_name(&key).ok_or_else(|| self.error(format!("`{key}` is not a role")))?;
                        if phase > 1 {
                            return Err(self.error("role child after a free child"));
                        }
                        phase = 1;
                        self.pos += 2;
                        let child = self.pattern()?;
                        np.children.push(ChildSlot {
                            role: Some(role),
                            node: child,
                        });
                    } else {
                        if phase > 0 {
                            return Err(self.error("attribute after a child pattern"));
                        }
                        self.pos += 2;
                        let matcher = self.attr_value()?;
                        let key = if key == "idx" { "indices".to_string() } else { key };
                        np.attrs.push(AttrConstraint { key, matcher });
                    }
                }
                None => return Err(self.error("unexpected end of pattern")),
                Some(_) => return Err(self.error("expected attribute, child pattern or `)`")),
            }
        }
        self.nodes[id] = PatternNode::Node(np);
        Ok(id)
    }

    fn attr_value(&mut self) -> Result<AttrMatcher, DslError> {
        let tok = self.peek().cloned();
        match tok {
            Some(Tok::Str(s)) | Some(Tok::Atom(s)) => {
                self.pos += 1;
                Ok(AttrMatcher::Exact(s))
            }
            Some(Tok::Regex(r)) => {
                let re = regex::Regex::new(&format!("^(?:{r})$")).map_err(|e| self.error(format!("bad regex: {e}")))?;
                self.pos += 1;
                Ok(AttrMatcher::Regex(re))
            }
            Some(Tok::Capture(c)) => {
                self.pos += 1;
                Ok(AttrMatcher::Capture(c))
            }
            Some(Tok::LBrack) => {
                self.pos += 1;
                let mut names: Vec<String> = Vec::new();
                loop {
                    match self.peek().cloned() {
                        Some(Tok::Capture(c)) => {
                            if names.contains(&c) {
                                return Err(self.error(format!("capture `@{c}` bound twice in one list")));
                            }
                            names.push(c);
                            self.pos += 1;
                        }
                        _ => return Err(self.error("expected `@name`")),
                    }
                    match self.peek() {
                        Some(Tok::Comma) => self.pos += 1,
                        Some(Tok::RBrack) => {
                            self.pos += 1;
                            break;
                        }
                        _ => return Err(self.error("expected `,` or `]`")),
                    }
                }
                Ok(AttrMatcher::Captures(names))
            }
            _ => Err(self.error("expected attribute value")),
        }
    }
}

/// Parses a bare pattern expression with no header.
pub fn parse_pattern_expr(text: &str) -> Result<StructuralPattern, DslError> {
    build(text, Headers::default())
}

#[derive(Default)]
struct Headers {
    name: String,
    algorithm: Option<Algorithm>,
    family: Option<PatternFamily>,
    reconstructed: bool,
    equalities: Vec<(String, String)>,
}

/// Parses a pattern file: `#key: value` header lines followed by one pattern.
pub fn parse_dsl(text: &str) -> Result<StructuralPattern, DslError> {
    let mut headers = Headers::default();
    let mut body = String::with_capacity(text.len());
    for (n, raw) in text.split_inclusive('\n').enumerate() {
        let line = n + 1;
        let trimmed = raw.trim();
        if let Some(rest) = trimmed.strip_prefix('#') {
            if let Some((key, value)) = rest.split_once(':') {
                let value = value.trim();
                let herr = |message: String| DslError::Header { line, message };
                match key.trim() {
                    "algorithm" => {
                        headers.algorithm = Some(value.parse().map_err(|e: crate::algorithm::UnknownAlgorithm| herr(e.to_string()))?)
                    }
                    "family" => {
                        headers.family = Some(PatternFamily::from_name(value).ok_or_else(|| herr(format!("unknown family `{value}`")))?)
                    }
                    "reconstructed" => {
                        headers.reconstructed = value.parse().map_err(|_| herr(format!("expected true or false, got `{value}`")))?
                    }
                    "name" => headers.name = value.to_string(),
                    "equal" => {
                        let parts: Vec<&str> = value.split_whitespace().map(|s| s.trim_start_matches('@')).collect();
                        match parts.as_slice() {
                            [a, b] => headers.equalities.push((a.to_string(), b.to_string())),
                            _ => return Err(herr("`#equal` takes two capture names".into())),
                        }
                    }
                    _ => {}
                }
            }
            // keep line numbering intact for the body
            body.push_str(&" ".repeat(raw.trim_end_matches('\n').len()));
            if raw.ends_with('\n') {
                body.push('\n');
            }
        } else {
            body.push_str(raw);
        }
    }
    build(&body, headers)
}

fn build(text: &str, headers: Headers) -> Result<StructuralPattern, DslError> {
    let toks = lex(text)?;
    let lines = text.lines().count().max(1);
    let end = (lines, text.lines().last().map_or(0, |l| l.chars().count()) + 1);
    let mut p = Parser {
        toks,
        pos: 0,
        nodes: Vec::new(),
        end,
    };
    if p.toks.is_empty() {
        return Err(p.error("empty pattern"));
    }
    let root = p.pattern()?;
    if p.pos < p.toks.len() {
        return Err(p.error("trailing input after pattern"));
    }
    let pattern = StructuralPattern {
        name: headers.name,
        algorithm: headers.algorithm.unwrap_or(Algorithm::BubbleSort),
        family: headers.family.unwrap_or(PatternFamily::ProminentFeature),
        reconstructed: headers.reconstructed,
        nodes: p.nodes,
        root,
        equalities: headers.equalities,
    };
    let bound = pattern.capture_names();
    for (a, b) in &pattern.equalities {
        for n in [a, b] {
            if !bound.contains(n) {
                return Err(DslError::UnboundCapture { name: n.clone() });
            }
        }
    }
    Ok(pattern)
}
