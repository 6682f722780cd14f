//! Lossless Java lexer.
//!
//! Every byte of the input ends up in exactly one token, whitespace and
//! comments included, so concatenating token texts reproduces the source.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TokenKind {
    Identifier,
    Keyword,
    Operator,
    LiteralNumber,
    LiteralString,
    LiteralChar,
    Punctuation,
    Comment,
    Whitespace,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub kind: TokenKind,
    pub text: String,
    /// Byte offset into the lexed source.
    pub offset: usize,
}

impl Token {
    pub fn end(&self) -> usize {
        self.offset + self.text.len()
    }

    pub fn is_trivia(&self) -> bool {
        matches!(self.kind, TokenKind::Whitespace | TokenKind::Comment)
    }

    pub fn is(&self, kind: TokenKind, text: &str) -> bool {
        self.kind == kind && self.text == text
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LexWarning {
    UnterminatedComment { offset: usize },
    UnterminatedString { offset: usize },
    UnterminatedChar { offset: usize },
}

#[derive(Debug, Clone, Default)]
pub struct Lexed {
    pub tokens: Vec<Token>,
    pub warnings: Vec<LexWarning>,
}

/// Java reserved words, plus the literal words `true`, `false` and `null`.
/// Contextual keywords (`var`, `record`, `yield`, ...) lex as identifiers.
pub const JAVA_KEYWORDS: &[&str] = &[
    "abstract",
    "assert",
    "boolean",
    "break",
    "byte",
    "case",
    "catch",
    "char",
    "class",
    "const",
    "continue",
    "default",
    "do",
    "double",
    "else",
    "enum",
    "extends",
    "final",
    "finally",
    "float",
    "for",
    "goto",
    "if",
    "implements",
    "import",
    "instanceof",
    "int",
    "interface",
    "long",
    "native",
    "new",
    "package",
    "private",
    "protected",
    "public",
    "return",
    "short",
    "static",
    "strictfp",
    "super",
    "switch",
    "synchronized",
    "this",
    "throw",
    "throws",
    "transient",
    "try",
    "void",
    "volatile",
    "while",
    "true",
    "false",
    "null",
    "_",
];

pub fn is_keyword(word: &str) -> bool {
    JAVA_KEYWORDS.contains(&word)
}

// Longest first.
const OPERATORS: &[&str] = &[
    ">>>=", "<<=", ">>=", ">>>", "->", "==", ">=", "<=", "!=", "&&", "||", "++", "--", "<<", ">>", "+=", "-=", "*=", "/=", "&=", "|=",
    "^=", "%=", "=", ">", "<", "!", "~", "?", ":", "+", "-", "*", "/", "&", "|", "^", "%",
];

const PUNCTUATION: &[&str] = &["...", "::", "(", ")", "{", "}", "[", "]", ";", ",", ".", "@"];

fn is_ident_start(c: char) -> bool {
    c == '_' || c == '$' || c.is_alphabetic()
}

fn is_ident_part(c: char) -> bool {
    c == '_' || c == '$' || c.is_alphanumeric()
}

/// Lexes `source` into a lossless token stream.
///
/// Unterminated comments and string or char literals become a single token
/// running to the end of the input, and a warning is recorded.
pub fn tokenize(source: &str) -> Lexed {
    let mut lexer = Lexer {
        src: source,
        pos: 0,
        out: Lexed::default(),
    };
    lexer.run();
    lexer.out
}

/// Byte-level entry point: rejects input that is not UTF-8.
pub fn tokenize_bytes(bytes: &[u8]) -> Result<Lexed, std::str::Utf8Error> {
    std::str::from_utf8(bytes).map(tokenize)
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
    out: Lexed,
}

impl<'a> Lexer<'a> {
    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn peek_at(&self, n: usize) -> Option<char> {
        self.rest().chars().nth(n)
    }

    fn push(&mut self, kind: TokenKind, end: usize) {
        self.out.tokens.push(Token {
            kind,
            text: self.src[self.pos..end].to_string(),
            offset: self.pos,
        });
        self.pos = end;
    }

    fn run(&mut self) {
        while let Some(c) = self.peek() {
            let start = self.pos;
            if c.is_whitespace() {
                let len: usize = self.rest().chars().take_while(|c| c.is_whitespace()).map(char::len_utf8).sum();
                self.push(TokenKind::Whitespace, start + len);
            } else if self.rest().starts_with("//") {
                let len = self.rest().find('\n').unwrap_or(self.rest().len());
                // keep a trailing '\r' with the newline, not the comment
                let len = if self.rest()[..len].ends_with('\r') { len - 1 } else { len };
                self.push(TokenKind::Comment, start + len);
            } else if self.rest().starts_with("/*") {
                match self.rest()[2..].find("*/") {
                    Some(i) => self.push(TokenKind::Comment, start + 2 + i + 2),
                    None => {
                        self.out.warnings.push(LexWarning::UnterminatedComment { offset: start });
                        self.push(TokenKind::Comment, self.src.len());
                    }
                }
            } else if self.rest().starts_with("\"\"\"") {
                match self.rest()[3..].find("\"\"\"") {
                    Some(i) => self.push(TokenKind::LiteralString, start + 3 + i + 3),
                    None => {
                        self.out.warnings.push(LexWarning::UnterminatedString { offset: start });
                        self.push(TokenKind::LiteralString, self.src.len());
                    }
                }
            } else if c == '"' || c == '\'' {
                self.quoted(c);
            } else if c.is_ascii_digit() || (c == '.' && self.peek_at(1).is_some_and(|d| d.is_ascii_digit())) {
                let len = number_len(self.rest());
                self.push(TokenKind::LiteralNumber, start + len);
            } else if is_ident_start(c) {
                let len: usize = self.rest().chars().take_while(|c| is_ident_part(*c)).map(char::len_utf8).sum();
                let kind = if is_keyword(&self.src[start..start + len]) {
                    TokenKind::Keyword
                } else {
                    TokenKind::Identifier
                };
                self.push(kind, start + len);
            } else if let Some(p) = PUNCTUATION.iter().find(|p| self.rest().starts_with(**p)) {
                self.push(TokenKind::Punctuation, start + p.len());
            } else if let Some(op) = OPERATORS.iter().find(|op| self.rest().starts_with(**op)) {
                self.push(TokenKind::Operator, start + op.len());
            } else {
                // Stray character (e.g. '#', '\\' outside literals); keep it lossless.
                self.push(TokenKind::Punctuation, start + c.len_utf8());
            }
        }
    }

    fn quoted(&mut self, quote: char) {
        let start = self.pos;
        let mut chars = self.rest().char_indices().skip(1);
        let mut end = None;
        while let Some((i, c)) = chars.next() {
            match c {
                '\\' => {
                    chars.next();
                }
                c if c == quote => {
                    end = Some(start + i + 1);
                    break;
                }
                _ => {}
            }
        }
        let kind = if quote == '"' {
            TokenKind::LiteralString
        } else {
            TokenKind::LiteralChar
        };
        match end {
            Some(end) => self.push(kind, end),
            None => {
                self.out.warnings.push(if quote == '"' {
                    LexWarning::UnterminatedString { offset: start }
                } else {
                    LexWarning::UnterminatedChar { offset: start }
                });
                self.push(kind, self.src.len());
            }
        }
    }
}

fn number_len(s: &str) -> usize {
    let b = s.as_bytes();
    let mut i = 0;
    if b.len() > 1 && b[0] == b'0' && matches!(b[1], b'x' | b'X' | b'b' | b'B') {
        i = 2;
        while i < b.len() && (b[i].is_ascii_hexdigit() || b[i] == b'_') {
            i += 1;
        }
        if i < b.len() && matches!(b[i], b'l' | b'L') {
            i += 1;
        }
        return i;
    }
    while i < b.len() && (b[i].is_ascii_digit() || b[i] == b'_') {
        i += 1;
    }
    if i < b.len()
        && b[i] == b'.'
        && b.get(i + 1)
            .is_none_or(|c| c.is_ascii_digit() || !c.is_ascii_alphabetic() && *c != b'.')
    {
        i += 1;
        while i < b.len() && (b[i].is_ascii_digit() || b[i] == b'_') {
            i += 1;
        }
    }
    if i < b.len() && matches!(b[i], b'e' | b'E') {
        let mut j = i + 1;
        if j < b.len() && matches!(b[j], b'+' | b'-') {
            j += 1;
        }
        if j < b.len() && b[j].is_ascii_digit() {
            i = j;
            while i < b.len() && b[i].is_ascii_digit() {
                i += 1;
            }
        }
    }
    if i < b.len() && matches!(b[i], b'l' | b'L' | b'f' | b'F' | b'd' | b'D') {
        i += 1;
    }
    i
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(src: &str) -> Vec<(TokenKind, String)> {
        tokenize(src).tokens.into_iter().map(|t| (t.kind, t.text)).collect()
    }

    #[test]
    fn simple_declaration() {
        use TokenKind::*;
        let got = kinds("int i = 0;");
        let want = vec![
            (Keyword, "int"),
            (Whitespace, " "),
            (Identifier, "i"),
            (Whitespace, " "),
            (Operator, "="),
            (Whitespace, " "),
            (LiteralNumber, "0"),
            (Punctuation, ";"),
        ];
        let want: Vec<_> = want.into_iter().map(|(k, s)| (k, s.to_string())).collect();
        assert_eq!(got, want);
    }

    #[test]
    fn comments_are_atomic() {
        let lexed = tokenize("// sort\nx++;");
        assert_eq!(lexed.tokens[0].kind, TokenKind::Comment);
        assert_eq!(lexed.tokens[0].text, "// sort");
        let idents: Vec<_> = lexed
            .tokens
            .iter()
            .filter(|t| t.kind == TokenKind::Identifier)
            .map(|t| t.text.as_str())
            .collect();
        assert_eq!(idents, vec!["x"]);
    }

    #[test]
    fn strings_hide_identifiers() {
        let lexed = tokenize(r#"s = "a \"quoted\" sort"; c = '\'';"#);
        let idents: Vec<_> = lexed
            .tokens
            .iter()
            .filter(|t| t.kind == TokenKind::Identifier)
            .map(|t| t.text.as_str())
            .collect();
        assert_eq!(idents, vec!["s", "c"]);
        assert!(lexed.warnings.is_empty());
    }

    #[test]
    fn unterminated_literals_are_lenient() {
        let src = "a = \"oops\nb = 1;";
        let lexed = tokenize(src);
        assert_eq!(lexed.warnings, vec![LexWarning::UnterminatedString { offset: 4 }]);
        assert_eq!(lexed.tokens.last().unwrap().text, "\"oops\nb = 1;");

        let lexed = tokenize("x /* never closed");
        assert_eq!(lexed.warnings, vec![LexWarning::UnterminatedComment { offset: 2 }]);
        assert_eq!(lexed.tokens.last().unwrap().kind, TokenKind::Comment);
    }

    #[test]
    fn numbers_and_operators() {
        use TokenKind::*;
        let got = kinds("x>>>=0x1F+1.5e3f-a.length>>1");
        let texts: Vec<_> = got.iter().map(|(_, t)| t.as_str()).collect();
        assert_eq!(texts, vec!["x", ">>>=", "0x1F", "+", "1.5e3f", "-", "a", ".", "length", ">>", "1"]);
        assert_eq!(got[2].0, LiteralNumber);
        assert_eq!(got[4].0, LiteralNumber);
    }

    #[test]
    fn method_reference_and_varargs() {
        let texts: Vec<_> = kinds("f(int... xs) { list.forEach(System.out::println); }")
            .into_iter()
            .map(|(_, t)| t)
            .collect();
        assert!(texts.contains(&"...".to_string()));
        assert!(texts.contains(&"::".to_string()));
    }

    #[test]
    fn keywords_are_exact() {
        let lexed = tokenize("interface interfaces var record");
        let ks: Vec<_> = lexed.tokens.iter().filter(|t| !t.is_trivia()).map(|t| t.kind).collect();
        assert_eq!(
            ks,
            vec![
                TokenKind::Keyword,
                TokenKind::Identifier,
                TokenKind::Identifier,
                TokenKind::Identifier
            ]
        );
    }

    #[test]
    fn rejects_invalid_utf8() {
        assert!(tokenize_bytes(&[0x66, 0xff, 0x66]).is_err());
    }
}
