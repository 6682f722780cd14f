//! Tokens, method extraction and the lightweight Java AST.

mod ast;
mod canonical;
mod extract;
mod parser;
mod record;
mod token;

pub use ast::{AstNode, AttrValue, NodeKind, Role, Shape};
pub use canonical::{canonical_index_text, canonical_token_text};
pub use extract::{extract_methods, load_corpus, CorpusError, Extraction};
pub use parser::{parse_method_source, parse_method_tokens, ParseFailure, ParseOutcome};
pub use record::{MethodRecord, RecordLine};
pub use token::{is_keyword, tokenize, tokenize_bytes, LexWarning, Lexed, Token, TokenKind, JAVA_KEYWORDS};
