//! Canonical text for index expressions, used for capture equality.
//!
//! Whitespace and comments are dropped, redundant parentheses around the
//! whole expression or around a single token are removed, and a single
//! space is kept only between adjacent word-like tokens. There is no
//! algebraic normalisation: `i+1` and `1+i` stay different.

use super::ast::AstNode;
use super::token::{tokenize, TokenKind};

/// Canonical text of an expression node, read back from `source`.
pub fn canonical_index_text(expr: &AstNode, source: &str) -> String {
    let slice = source.get(expr.span.clone()).unwrap_or_default();
    let lexed = tokenize(slice);
    canonical_token_text(lexed.tokens.iter().map(|t| (t.kind, t.text.as_str())))
}

/// Canonical text of a token sequence (trivia is ignored).
pub fn canonical_token_text<'a>(tokens: impl IntoIterator<Item = (TokenKind, &'a str)>) -> String {
    let mut toks: Vec<(TokenKind, &str)> = tokens
        .into_iter()
        .filter(|(k, _)| !matches!(k, TokenKind::Whitespace | TokenKind::Comment))
        .collect();

    loop {
        let before = toks.len();
        strip_outer_parens(&mut toks);
        strip_atom_parens(&mut toks);
        if toks.len() == before {
            break;
        }
    }

    let mut out = String::new();
    let mut prev_word = false;
    for (kind, text) in toks {
        let word = matches!(kind, TokenKind::Identifier | TokenKind::Keyword | TokenKind::LiteralNumber);
        if word && prev_word {
            out.push(' ');
        }
        out.push_str(text);
        prev_word = word;
    }
    out
}

fn is_open(t: &(TokenKind, &str)) -> bool {
    t.0 == TokenKind::Punctuation && t.1 == "("
}

fn is_close(t: &(TokenKind, &str)) -> bool {
    t.0 == TokenKind::Punctuation && t.1 == ")"
}

fn strip_outer_parens(toks: &mut Vec<(TokenKind, &str)>) {
    while toks.len() >= 2 && is_open(&toks[0]) && is_close(&toks[toks.len() - 1]) {
        // the first '(' must close at the very end
        let mut depth = 0i32;
        let mut closes_at_end = false;
        for (i, t) in toks.iter().enumerate() {
            if is_open(t) {
                depth += 1;
            } else if is_close(t) {
                depth -= 1;
                if depth == 0 {
                    closes_at_end = i == toks.len() - 1;
                    break;
                }
            }
        }
        if !closes_at_end {
            return;
        }
        toks.remove(0);
        toks.pop();
    }
}

/// `( x )` → `x` unless the parens belong to a call or cast-like position.
fn strip_atom_parens(toks: &mut Vec<(TokenKind, &str)>) {
    let mut i = 0;
    while i + 2 < toks.len() {
        if is_open(&toks[i]) && is_close(&toks[i + 2]) && !is_open(&toks[i + 1]) && !is_close(&toks[i + 1]) {
            let call_like = i > 0
                && (matches!(toks[i - 1].0, TokenKind::Identifier | TokenKind::Keyword)
                    || is_close(&toks[i - 1])
                    || (toks[i - 1].0 == TokenKind::Punctuation && toks[i - 1].1 == "]")
                    || (toks[i - 1].0 == TokenKind::Operator && toks[i - 1].1 == ">"));
            // `(int) x`: a type in parens followed by an operand is a cast
            let cast_like = toks
                .get(i + 3)
                .is_some_and(|n| matches!(n.0, TokenKind::Identifier | TokenKind::LiteralNumber) || is_open(n));
            if !call_like && !cast_like {
                toks.remove(i + 2);
                toks.remove(i);
                continue;
            }
        }
        i += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn canon(s: &str) -> String {
        let lexed = tokenize(s);
        canonical_token_text(lexed.tokens.iter().map(|t| (t.kind, t.text.as_str())))
    }

    #[test]
    fn whitespace_insensitive() {
        assert_eq!(canon("i+1"), canon("i + 1"));
        assert_eq!(canon("i+1"), "i+1");
    }

    #[test]
    fn strips_parens() {
        assert_eq!(canon("(j)"), "j");
        assert_eq!(canon("( i )"), "i");
        assert_eq!(canon("((i + 1))"), "i+1");
        assert_eq!(canon("(i) + (j)"), "i+j");
        assert_eq!(canon("(i+1)*(j+1)"), "(i+1)*(j+1)");
        assert_eq!(canon("f(i)"), "f(i)");
    }

    #[test]
    fn no_algebra() {
        assert_ne!(canon("i+1"), canon("1+i"));
    }

    #[test]
    fn words_stay_separated() {
        assert_eq!(canon("new   int"), "new int");
    }
}
