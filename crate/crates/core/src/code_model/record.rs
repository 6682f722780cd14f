use serde::{Deserialize, Serialize};

use super::ast::AstNode;
use super::parser::{parse_method_tokens, ParseFailure};
use super::token::{tokenize, LexWarning, Token};

/// One method unit of a corpus.
///
/// Tokens and AST are derived from `source` on construction and are not
/// serialised; [`RecordLine`] is the on-disk form.
#[derive(Debug, Clone)]
pub struct MethodRecord {
    pub method_id: String,
    pub file_path: String,
    pub name: String,
    pub source: String,
    pub tokens: Vec<Token>,
    pub ast: Option<AstNode>,
    pub ast_element_count: usize,
    pub parse_error: Option<ParseFailure>,
    pub lex_warnings: Vec<LexWarning>,
    pub recovered_statements: usize,
    /// Set on records produced by the obfuscator.
    pub obfuscation_seed: Option<u64>,
}

impl MethodRecord {
    pub fn new(method_id: impl Into<String>, file_path: impl Into<String>, name: impl Into<String>, source: impl Into<String>) -> Self {
        let source = source.into();
        let lexed = tokenize(&source);
        let (ast, parse_error, recovered) = match parse_method_tokens(&source, &lexed.tokens) {
            Ok(out) => (Some(out.ast), None, out.recovered_statements),
            Err(e) => (None, Some(e), 0),
        };
        MethodRecord {
            method_id: method_id.into(),
            file_path: file_path.into(),
            name: name.into(),
            ast_element_count: ast.as_ref().map_or(0, AstNode::node_count),
            source,
            tokens: lexed.tokens,
            ast,
            parse_error,
            lex_warnings: lexed.warnings,
            recovered_statements: recovered,
            obfuscation_seed: None,
        }
    }

    /// Convenience constructor for snippets: the id and name are derived from
    /// the parsed signature when available.
    pub fn from_snippet(id: impl Into<String>, source: impl Into<String>) -> Self {
        let id = id.into();
        let mut rec = MethodRecord::new(id.clone(), "", "", source);
        if let Some(name) = rec.ast.as_ref().and_then(|a| a.attr("name")) {
            rec.name = name.to_string();
        }
        rec
    }

    pub fn to_line(&self) -> RecordLine {
        RecordLine {
            method_id: self.method_id.clone(),
            file_path: self.file_path.clone(),
            name: self.name.clone(),
            source: self.source.clone(),
            ast_element_count: Some(self.ast_element_count),
            obfuscated: self.obfuscation_seed.map(|_| true),
            seed: self.obfuscation_seed,
        }
    }
}

/// JSONL shape of a corpus record.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecordLine {
    pub method_id: String,
    pub file_path: String,
    pub name: String,
    pub source: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ast_element_count: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub obfuscated: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl From<RecordLine> for MethodRecord {
    fn from(line: RecordLine) -> Self {
        let mut rec = MethodRecord::new(line.method_id, line.file_path, line.name, line.source);
        if line.obfuscated == Some(true) {
            rec.obfuscation_seed = line.seed;
        }
        rec
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn element_count_matches_ast() {
        let r = MethodRecord::new("f.java:1:f", "f.java", "f", "void f(){ a[i] = b; }");
        assert_eq!(r.ast_element_count, r.ast.as_ref().unwrap().node_count());
        let bad = MethodRecord::new("x", "x", "x", "not a method");
        assert!(bad.ast.is_none());
        assert_eq!(bad.ast_element_count, 0);
    }

    #[test]
    fn line_round_trip_keeps_count() {
        let r = MethodRecord::new("f.java:1:f", "f.java", "f", "int f(int n){ return n * 2; }");
        let json = serde_json::to_string(&r.to_line()).unwrap();
        let back: MethodRecord = serde_json::from_str::<RecordLine>(&json).unwrap().into();
        assert_eq!(back.ast_element_count, r.ast_element_count);
        assert_eq!(back.ast, r.ast);
    }
}
