//! Algorithm recognition for Java method corpora.
//!
//! The crate is organised as a pipeline:
//!
//! - [`code_model`] lexes Java files, extracts method units and parses each
//!   method into a small AST.
//! - [`keyword`] and [`structural`] are the two pre-filter families. A method
//!   excluded by a filter is predicted negative and never sent to a model.
//! - [`llm`] builds prompts, talks to a chat-completion backend and decodes
//!   0–4 scores from log-probabilities or generated text.
//! - [`obfuscate`] renames method-declared identifiers for name ablations.
//! - [`eval`] holds ground truth, splits, the pipeline driver, metrics and
//!   reports.
//!
//! Corpus-level loops go through [`par`], which uses rayon when the
//! `parallel` feature is enabled and plain iterators otherwise.

pub mod algorithm;
pub mod code_model;
pub mod eval;
pub mod filter;
pub mod keyword;
pub mod llm;
pub mod obfuscate;
pub mod par;
pub mod shipped;
pub mod structural;

pub use algorithm::Algorithm;
pub use code_model::{AstNode, MethodRecord, NodeKind, Token, TokenKind};
pub use par::Execution;

/// Version of this crate, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
