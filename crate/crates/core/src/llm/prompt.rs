use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use super::examples::{ExampleLibrary, NegativeKind};
use crate::algorithm::Algorithm;

/// Highest score on the rubric. Only the 0..=4 scale is supported.
pub const SCORE_SCALE_MAX: u8 = 4;

pub const SCORE_RUBRIC: &str = "Score the snippet from '0' to '4', where:\n\
0: The code does not implement the algorithm.\n\
1: The code shares similarities with the algorithm but most likely does not implement the algorithm.\n\
2: The code appears to implement the algorithm, but may not fully match the algorithm's specification.\n\
3: The code most likely implements the algorithm with minor variations.\n\
4: The code implements the algorithm.";

pub const SCORE_INSTRUCTION: &str = "Strictly respond with a number from the choices above.";
pub const COT_INSTRUCTION: &str = "Lets think step-by-step, then answer with a number from the choices above.";

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PromptError {
    #[error("unknown prompt style `{0}` (expected yesno, score, cot or icl:<n>p<m>n)")]
    UnknownStyle(String),
    #[error("unsupported ICL combination `{0}` (expected 0p2n, 2p0n, 2p2n or 4p4n)")]
    UnsupportedCombination(String),
    #[error("example library has {have} {what} for {algorithm}, {need} needed")]
    MissingExamples {
        algorithm: Algorithm,
        what: &'static str,
        have: usize,
        need: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecodingParams {
    pub temperature: f64,
    pub top_k: u32,
    pub top_p: f64,
    pub max_tokens: u32,
}

impl DecodingParams {
    pub const COT: DecodingParams = DecodingParams {
        temperature: 0.5,
        top_k: 50,
        top_p: 0.9,
        max_tokens: 300,
    };

    /// Single-token answers are read off the log-probabilities; sampling
    /// settings have no influence on the decision.
    pub const SINGLE_TOKEN: DecodingParams = DecodingParams {
        temperature: 0.0,
        top_k: 50,
        top_p: 1.0,
        max_tokens: 1,
    };
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IclCombination {
    #[serde(rename = "0p2n")]
    ZeroPosTwoNeg,
    #[serde(rename = "2p0n")]
    TwoPosZeroNeg,
    #[serde(rename = "2p2n")]
    TwoPosTwoNeg,
    #[serde(rename = "4p4n")]
    FourPosFourNeg,
}

impl IclCombination {
    pub const ALL: [IclCombination; 4] = [
        IclCombination::ZeroPosTwoNeg,
        IclCombination::TwoPosZeroNeg,
        IclCombination::TwoPosTwoNeg,
        IclCombination::FourPosFourNeg,
    ];

    pub fn counts(self) -> (usize, usize) {
        match self {
            IclCombination::ZeroPosTwoNeg => (0, 2),
            IclCombination::TwoPosZeroNeg => (2, 0),
            IclCombination::TwoPosTwoNeg => (2, 2),
            IclCombination::FourPosFourNeg => (4, 4),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            IclCombination::ZeroPosTwoNeg => "0p2n",
            IclCombination::TwoPosZeroNeg => "2p0n",
            IclCombination::TwoPosTwoNeg => "2p2n",
            IclCombination::FourPosFourNeg => "4p4n",
        }
    }
}

impl FromStr for IclCombination {
    type Err = PromptError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.to_ascii_lowercase();
        IclCombination::ALL
            .into_iter()
            .find(|c| c.name() == lower)
            .ok_or_else(|| PromptError::UnsupportedCombination(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StyleKind {
    YesNo,
    Score,
    Icl(IclCombination),
    Cot,
}

impl StyleKind {
    pub fn single_token(self) -> bool {
        !matches!(self, StyleKind::Cot)
    }
}

impl fmt::Display for StyleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StyleKind::YesNo => f.write_str("yesno"),
            StyleKind::Score => f.write_str("score"),
            StyleKind::Cot => f.write_str("cot"),
            StyleKind::Icl(c) => write!(f, "icl:{}", c.name()),
        }
    }
}

impl FromStr for StyleKind {
    type Err = PromptError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.trim().to_ascii_lowercase();
        match lower.as_str() {
            "yesno" | "yes_no" | "yes-no" => Ok(StyleKind::YesNo),
            "score" => Ok(StyleKind::Score),
            "cot" => Ok(StyleKind::Cot),
            other => match other.strip_prefix("icl:") {
                Some(c) => Ok(StyleKind::Icl(c.parse()?)),
                None => Err(PromptError::UnknownStyle(s.to_string())),
            },
        }
    }
}

/// A style as named on the command line, before ICL examples are resolved
/// for a particular algorithm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StyleSpec {
    pub kind: StyleKind,
    #[serde(default)]
    pub negatives: NegativeKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decoding: Option<DecodingParams>,
}

impl StyleSpec {
    pub fn new(kind: StyleKind) -> Self {
        StyleSpec {
            kind,
            negatives: NegativeKind::Similar,
            decoding: None,
        }
    }

    pub fn resolve(&self, algorithm: Algorithm, library: &ExampleLibrary) -> Result<PromptStyle, PromptError> {
        let decoding = self.decoding.unwrap_or(if self.kind.single_token() {
            DecodingParams::SINGLE_TOKEN
        } else {
            DecodingParams::COT
        });
        let icl_examples = match self.kind {
            StyleKind::Icl(c) => library.select(algorithm, c, self.negatives)?,
            _ => Vec::new(),
        };
        Ok(PromptStyle {
            kind: self.kind,
            icl_examples,
            decoding,
        })
    }
}

impl StyleSpec {
    /// Short label used in reports; random-negative ICL runs get a `+random`
    /// suffix.
    pub fn label(&self) -> String {
        match (self.kind, self.negatives) {
            (StyleKind::Icl(_), NegativeKind::Random) => format!("{}+random", self.kind),
            _ => self.kind.to_string(),
        }
    }
}

impl FromStr for StyleSpec {
    type Err = PromptError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let trimmed = s.trim();
        match trimmed.strip_suffix("+random") {
            Some(kind) => Ok(StyleSpec {
                negatives: NegativeKind::Random,
                ..StyleSpec::new(kind.parse()?)
            }),
            None => Ok(StyleSpec::new(trimmed.parse()?)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IclExample {
    pub source: String,
    pub score: u8,
}

/// A fully resolved prompt style.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PromptStyle {
    pub kind: StyleKind,
    pub icl_examples: Vec<IclExample>,
    pub decoding: DecodingParams,
}

impl PromptStyle {
    pub fn simple(kind: StyleKind) -> Self {
        StyleSpec::new(kind)
            .resolve(Algorithm::BubbleSort, &ExampleLibrary::default())
            .expect("non-ICL styles need no examples")
    }

    /// Stable digest of everything that shapes the prompt and its decoding.
    pub fn style_hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("style serialises");
        let digest = Sha256::digest(canonical.as_bytes());
        hex::encode(&digest[..8])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChatRole {
    User,
    Assistant,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChatMessage {
    pub role: ChatRole,
    pub content: String,
}

impl ChatMessage {
    pub fn user(content: impl Into<String>) -> Self {
        ChatMessage {
            role: ChatRole::User,
            content: content.into(),
        }
    }

    pub fn assistant(content: impl Into<String>) -> Self {
        ChatMessage {
            role: ChatRole::Assistant,
            content: content.into(),
        }
    }
}

pub fn yes_no_prompt(method: &str, algorithm: &str) -> String {
    format!("SNIPPET: {method} Does the snippet implement {algorithm}, only answer with 'Yes' or 'No'?")
}

pub fn score_prompt(method: &str, algorithm: &str) -> String {
    format!("SNIPPET: {method} Does the code snippet implement the algorithm {algorithm}?\n{SCORE_RUBRIC}\n{SCORE_INSTRUCTION}")
}

pub fn cot_prompt(method: &str, algorithm: &str) -> String {
    format!("SNIPPET: {method} Does the code snippet implement the algorithm {algorithm}?\n{SCORE_RUBRIC}\n{COT_INSTRUCTION}")
}

/// Message sequence for one method. Only user and assistant turns are used.
pub fn build_prompt(style: &PromptStyle, algorithm: Algorithm, method_source: &str) -> Vec<ChatMessage> {
    let name = algorithm.display_name();
    match style.kind {
        StyleKind::YesNo => vec![ChatMessage::user(yes_no_prompt(method_source, name))],
        StyleKind::Score => vec![ChatMessage::user(score_prompt(method_source, name))],
        StyleKind::Cot => vec![ChatMessage::user(cot_prompt(method_source, name))],
        StyleKind::Icl(_) => {
            let mut msgs = Vec::with_capacity(style.icl_examples.len() * 2 + 1);
            for ex in &style.icl_examples {
                msgs.push(ChatMessage::user(score_prompt(&ex.source, name)));
                msgs.push(ChatMessage::assistant(ex.score.to_string()));
            }
            msgs.push(ChatMessage::user(score_prompt(method_source, name)));
            msgs
        }
    }
}

/// Rough token estimate (4 characters per token) used for the context check.
pub fn estimate_tokens(messages: &[ChatMessage]) -> usize {
    messages.iter().map(|m| m.content.chars().count().div_ceil(4) + 4).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn score_prompt_ends_with_instruction() {
        let p = score_prompt("int f(){return 1;}", "Bubble Sort");
        assert!(p.starts_with("SNIPPET: int f(){return 1;} Does the code snippet implement the algorithm Bubble Sort?\n"));
        assert!(p.ends_with("Strictly respond with a number from the choices above."));
        assert_eq!(p.lines().count(), 8);
    }

    #[test]
    fn cot_swaps_last_sentence() {
        let p = cot_prompt("m", "GCD");
        assert!(p.ends_with("\nLets think step-by-step, then answer with a number from the choices above."));
        assert!(!p.contains("Strictly"));
        assert_eq!(
            p.rsplit_once('\n').unwrap().0,
            score_prompt("m", "GCD").rsplit_once('\n').unwrap().0
        );
    }

    #[test]
    fn style_names() {
        for s in ["yesno", "score", "cot", "icl:0p2n", "icl:2p0n", "icl:2p2n", "icl:4p4n"] {
            let k: StyleKind = s.parse().unwrap();
            assert_eq!(k.to_string(), s);
        }
        assert_eq!(
            "icl:1p1n".parse::<StyleKind>(),
            Err(PromptError::UnsupportedCombination("1p1n".into()))
        );
        assert!(matches!("chat".parse::<StyleKind>(), Err(PromptError::UnknownStyle(_))));
    }

    #[test]
    fn decoding_defaults() {
        let cot = PromptStyle::simple(StyleKind::Cot);
        assert_eq!(cot.decoding, DecodingParams::COT);
        assert_eq!(cot.decoding.max_tokens, 300);
        assert_ne!(cot.style_hash(), PromptStyle::simple(StyleKind::Score).style_hash());
    }
}
