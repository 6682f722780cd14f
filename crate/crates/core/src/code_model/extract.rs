//! Method extraction from Java files and corpus loading.

use std::collections::HashSet;
use std::fs;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};

use thiserror::Error;

use super::parser::{find_method_header, matching};
use super::record::{MethodRecord, RecordLine};
use super::token::{tokenize, Token, TokenKind};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: invalid record: {source}")]
    Json {
        path: PathBuf,
        line: usize,
        #[source]
        source: serde_json::Error,
    },
    #[error("duplicate method_id `{0}`")]
    DuplicateId(String),
    #[error("corpus path {0} does not exist")]
    Missing(PathBuf),
}

/// Result of extracting or loading methods.
#[derive(Debug, Default)]
pub struct Extraction {
    pub records: Vec<MethodRecord>,
    /// Regions dropped because their braces never balanced.
    pub skipped_regions: usize,
    /// Human-readable notes (undecodable files, lexer warnings, ...).
    pub diagnostics: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Scope {
    Members,
    EnumConstants,
}

/// Extracts one record per method or constructor body in `file_text`.
///
/// Methods are found by brace-balanced scanning from a signature match.
/// Initializer blocks and bodiless (abstract or interface) methods are
/// skipped. Methods of anonymous or local classes stay inside the record of
/// the enclosing method. Top-level methods outside any type are accepted,
/// which suits snippet corpora.
pub fn extract_methods(file_text: &str, file_path: &str) -> Extraction {
    let lexed = tokenize(file_text);
    let toks: Vec<&Token> = lexed.tokens.iter().filter(|t| !t.is_trivia()).collect();
    let line_starts: Vec<usize> = std::iter::once(0)
        .chain(file_text.match_indices('\n').map(|(i, _)| i + 1))
        .collect();
    let line_of = |offset: usize| line_starts.partition_point(|&s| s <= offset);

    let mut out = Extraction::default();
    for w in &lexed.warnings {
        out.diagnostics.push(format!("{file_path}: lexer warning {w:?}"));
    }
    let mut stack = vec![Scope::Members];
    let mut member_start = 0usize;
    let mut i = 0usize;
    let mut paren = 0i32;

    while i < toks.len() {
        let t = toks[i];
        let scope = *stack.last().unwrap_or(&Scope::Members);
        if t.kind != TokenKind::Punctuation {
            i += 1;
            continue;
        }
        match t.text.as_str() {
            "(" => paren += 1,
            ")" => paren -= 1,
            ";" if paren <= 0 => {
                if scope == Scope::EnumConstants {
                    *stack.last_mut().unwrap() = Scope::Members;
                }
                member_start = i + 1;
                paren = 0;
            }
            "}" if paren <= 0 => {
                if stack.len() > 1 {
                    stack.pop();
                } else {
                    out.skipped_regions += 1;
                    out.diagnostics.push(format!("{file_path}:{}: stray '}}'", line_of(t.offset)));
                }
                member_start = i + 1;
            }
            "{" if paren <= 0 => {
                let member = &toks[member_start..i];
                let declares_type = member.iter().enumerate().any(|(k, m)| {
                    m.is(TokenKind::Keyword, "class")
                        || m.is(TokenKind::Keyword, "interface")
                        || m.is(TokenKind::Keyword, "enum")
                        || (m.is(TokenKind::Identifier, "record") && member.get(k + 1).is_some_and(|n| n.kind == TokenKind::Identifier))
                }) && !member.iter().any(|m| m.is(TokenKind::Operator, "="));
                if scope == Scope::Members && declares_type {
                    let is_enum = member.iter().any(|m| m.is(TokenKind::Keyword, "enum"));
                    stack.push(if is_enum { Scope::EnumConstants } else { Scope::Members });
                    member_start = i + 1;
                    i += 1;
                    continue;
                }
                let Some(close) = matching(&toks, i, "{", "}") else {
                    out.skipped_regions += 1;
                    out.diagnostics.push(format!(
                        "{file_path}:{}: unbalanced braces, skipping rest of file",
                        line_of(t.offset)
                    ));
                    break;
                };
                let has_assign = member.iter().any(|m| m.is(TokenKind::Operator, "="));
                if scope == Scope::Members && !has_assign {
                    if let Some(h) = find_method_header(&toks, member_start, i) {
                        let start = toks[member_start].offset;
                        let end = toks[close].end();
                        let name = toks[h.name].text.clone();
                        let line = line_of(start);
                        let method_id = format!("{file_path}:{line}:{name}");
                        out.records
                            .push(MethodRecord::new(method_id, file_path, name, &file_text[start..end]));
                        member_start = close + 1;
                        i = close + 1;
                        continue;
                    }
                    // initializer block or compact constructor: skip
                    member_start = close + 1;
                }
                // field initializer or enum constant body: skip the group, the
                // member continues to its ';'
                i = close + 1;
                continue;
            }
            _ => {}
        }
        i += 1;
    }
    out
}

/// Loads a corpus from a directory of `.java` files, a single `.java` file,
/// or a JSONL file of [`RecordLine`]s.
pub fn load_corpus(path: &Path) -> Result<Extraction, CorpusError> {
    if !path.exists() {
        return Err(CorpusError::Missing(path.to_path_buf()));
    }
    let mut out = Extraction::default();
    if path.is_dir() {
        let mut files: Vec<PathBuf> = walkdir::WalkDir::new(path)
            .sort_by_file_name()
            .into_iter()
            .filter_map(Result::ok)
            .filter(|e| e.file_type().is_file() && e.path().extension().is_some_and(|x| x == "java"))
            .map(|e| e.into_path())
            .collect();
        files.sort();
        for file in files {
            let rel = file.strip_prefix(path).unwrap_or(&file).to_string_lossy().replace('\\', "/");
            read_java(&file, &rel, &mut out)?;
        }
    } else if path.extension().is_some_and(|x| x == "java") {
        let rel = path.file_name().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default();
        read_java(path, &rel, &mut out)?;
    } else {
        let file = fs::File::open(path).map_err(|source| CorpusError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        for (n, line) in BufReader::new(file).lines().enumerate() {
            let line = line.map_err(|source| CorpusError::Io {
                path: path.to_path_buf(),
                source,
            })?;
            if line.trim().is_empty() {
                continue;
            }
            let rec: RecordLine = serde_json::from_str(&line).map_err(|source| CorpusError::Json {
                path: path.to_path_buf(),
                line: n + 1,
                source,
            })?;
            out.records.push(rec.into());
        }
    }
    let mut seen = HashSet::new();
    for r in &out.records {
        if !seen.insert(r.method_id.as_str()) {
            return Err(CorpusError::DuplicateId(r.method_id.clone()));
        }
    }
    Ok(out)
}

fn read_java(file: &Path, rel: &str, out: &mut Extraction) -> Result<(), CorpusError> {
    let bytes = fs::read(file).map_err(|source| CorpusError::Io {
        path: file.to_path_buf(),
        source,
    })?;
    match String::from_utf8(bytes) {
        Ok(text) => {
            let ex = extract_methods(&text, rel);
            out.records.extend(ex.records);
            out.skipped_regions += ex.skipped_regions;
            out.diagnostics.extend(ex.diagnostics);
        }
        Err(e) => out.diagnostics.push(format!("{rel}: rejected, not UTF-8 ({})", e.utf8_error())),
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_methods_two_records() {
        let src = "class A {\n  int x = 1;\n  void f() { x++; }\n  static int g(int a) { return a; }\n}\n";
        let ex = extract_methods(src, "A.java");
        let ids: Vec<_> = ex.records.iter().map(|r| r.method_id.as_str()).collect();
        assert_eq!(ids, vec!["A.java:3:f", "A.java:4:g"]);
        assert_eq!(ex.records[1].source, "static int g(int a) { return a; }");
    }

    #[test]
    fn interface_without_bodies_is_empty() {
        let src = "interface Shape { double area(); default void noop(); int SIDES = 4; }";
        assert!(extract_methods(src, "S.java").records.is_empty());
    }

    #[test]
    fn anonymous_class_methods_stay_inside() {
        let src = r#"class A {
    void outer() {
        Runnable r = new Runnable() {
            public void run() { System.out.println("x"); }
        };
        r.run();
    }
}"#;
        let ex = extract_methods(src, "A.java");
        assert_eq!(ex.records.len(), 1);
        assert_eq!(ex.records[0].name, "outer");
        assert!(ex.records[0].source.contains("public void run()"));
    }

    #[test]
    fn nested_types_initializers_and_enums() {
        let src = r#"package p;
import java.util.*;
@SuppressWarnings("x")
public class Outer {
    static { init(); }
    { inst(); }
    private int[] xs = { 1, 2, 3 };
    private Runnable r = new Runnable() { public void run() {} };
    public Outer(int n) { this.n = n; }
    static class Inner {
        @Override
        public String toString() { return "i"; }
    }
    enum Color { RED, GREEN { int v() { return 2; } }; int v() { return 1; } }
    record P(int x, int y) { int sum() { return x + y; } }
}"#;
        let ex = extract_methods(src, "Outer.java");
        let names: Vec<_> = ex.records.iter().map(|r| r.name.as_str()).collect();
        assert_eq!(names, vec!["Outer", "toString", "v", "sum"]);
        assert!(ex.records[1].source.starts_with("@Override"));
        assert_eq!(ex.skipped_regions, 0);
    }

    #[test]
    fn unbalanced_braces_skip_rest() {
        let src = "class A { void f() { if (x) { } void g() { } ";
        let ex = extract_methods(src, "A.java");
        assert!(ex.records.is_empty());
        assert_eq!(ex.skipped_regions, 1);
    }

    #[test]
    fn top_level_snippets() {
        let src = "int gcd(int a, int b) { return b == 0 ? a : gcd(b, a % b); }\n\nvoid p() {}\n";
        let ex = extract_methods(src, "snip.java");
        assert_eq!(ex.records.len(), 2);
        assert_eq!(ex.records[1].method_id, "snip.java:3:p");
    }

    #[test]
    fn corpus_from_dir_and_jsonl() {
        let dir = tempfile::tempdir().unwrap();
        fs::create_dir(dir.path().join("sub")).unwrap();
        fs::write(dir.path().join("sub/A.java"), "class A { void f() {} }").unwrap();
        fs::write(dir.path().join("B.java"), "class B { void g() {} void h() {} }").unwrap();
        fs::write(dir.path().join("bad.java"), [0xffu8, 0xfe, 0x00]).unwrap();
        let ex = load_corpus(dir.path()).unwrap();
        let ids: Vec<_> = ex.records.iter().map(|r| r.method_id.as_str()).collect();
        assert_eq!(ids, vec!["B.java:1:g", "B.java:1:h", "sub/A.java:1:f"]);
        assert!(ex.diagnostics.iter().any(|d| d.contains("bad.java")));

        let jsonl = dir.path().join("c.jsonl");
        let lines: Vec<String> = ex.records.iter().map(|r| serde_json::to_string(&r.to_line()).unwrap()).collect();
        fs::write(&jsonl, lines.join("\n")).unwrap();
        let back = load_corpus(&jsonl).unwrap();
        assert_eq!(back.records.len(), 3);

        let dup = dir.path().join("dup.jsonl");
        fs::write(&dup, format!("{}\n{}\n", lines[0], lines[0])).unwrap();
        assert!(matches!(load_corpus(&dup), Err(CorpusError::DuplicateId(_))));
        assert!(matches!(load_corpus(&dir.path().join("nope")), Err(CorpusError::Missing(_))));
    }
}
