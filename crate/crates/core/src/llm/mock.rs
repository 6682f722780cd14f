//! Deterministic stand-in for a real model.
//!
//! Score 4 when the method contains the algorithm's signature substring;
//! otherwise the number of distinct Recall Focused keyword hits, capped at 3.

use std::sync::atomic::{AtomicUsize, Ordering};

use super::backend::{Backend, BackendError, ChatRequest, ChatResponse, TokenLogprob};
use super::prompt::ChatRole;
use crate::algorithm::Algorithm;
use crate::keyword::{KeywordFamily, KeywordPattern};
use crate::shipped;

pub const MOCK_MODEL: &str = "mock-heuristic-1";

/// Substring that makes the mock answer 4.
pub fn signature(algorithm: Algorithm) -> &'static str {
    match algorithm {
        Algorithm::PrimeFactors => "primeFactors(",
        Algorithm::Gcd => "gcd(",
        Algorithm::Fibonacci => "fibonacci(",
        Algorithm::Palindrome => "isPalindrome(",
        Algorithm::BubbleSort => "bubbleSort(",
        Algorithm::BinarySearch => "binarySearch(",
        Algorithm::TransposeMatrix => "transpose(",
    }
}

pub struct MockBackend {
    patterns: Vec<KeywordPattern>,
    calls: AtomicUsize,
    context_window: usize,
}

impl Default for MockBackend {
    fn default() -> Self {
        MockBackend::new()
    }
}

impl MockBackend {
    pub fn new() -> Self {
        MockBackend {
            patterns: shipped::keyword_patterns(KeywordFamily::RecallFocused),
            calls: AtomicUsize::new(0),
            context_window: 16_384,
        }
    }

    pub fn with_context_window(mut self, tokens: usize) -> Self {
        self.context_window = tokens;
        self
    }

    pub fn calls(&self) -> usize {
        self.calls.load(Ordering::SeqCst)
    }

    pub fn score(&self, source: &str, algorithm: Algorithm) -> u8 {
        if source.contains(signature(algorithm)) {
            return 4;
        }
        let pattern = self
            .patterns
            .iter()
            .find(|p| p.algorithm == algorithm)
            .expect("pattern per algorithm");
        pattern.total_distinct_hits(source).min(3) as u8
    }
}

/// Pulls method and algorithm back out of the final user turn.
fn parse_query(content: &str) -> Option<(&str, Algorithm)> {
    let rest = content.strip_prefix("SNIPPET: ")?;
    const SCORE_MARK: &str = " Does the code snippet implement the algorithm ";
    const YES_NO_MARK: &str = " Does the snippet implement ";
    if let Some(i) = rest.rfind(SCORE_MARK) {
        let tail = &rest[i + SCORE_MARK.len()..];
        let name = &tail[..tail.find("?\n")?];
        return Some((&rest[..i], name.parse().ok()?));
    }
    let i = rest.rfind(YES_NO_MARK)?;
    let tail = &rest[i + YES_NO_MARK.len()..];
    let name = &tail[..tail.find(", only answer")?];
    Some((&rest[..i], name.parse().ok()?))
}

fn synthetic_logprobs(candidates: &[&str], pick: usize) -> Vec<TokenLogprob> {
    let mut out: Vec<TokenLogprob> = candidates
        .iter()
        .enumerate()
        .map(|(i, t)| TokenLogprob {
            token: t.to_string(),
            logprob: -0.05 - 1.5 * (i as f64 - pick as f64).abs(),
        })
        .collect();
    out.push(TokenLogprob {
        token: " The".into(),
        logprob: -7.5,
    });
    out.sort_by(|a, b| b.logprob.total_cmp(&a.logprob));
    out
}

impl Backend for MockBackend {
    fn id(&self) -> String {
        format!("mock:{MOCK_MODEL}")
    }

    fn context_window(&self) -> usize {
        self.context_window
    }

    fn complete(&self, request: &ChatRequest) -> Result<ChatResponse, BackendError> {
        self.calls.fetch_add(1, Ordering::SeqCst);
        let last = request
            .messages
            .iter()
            .rev()
            .find(|m| m.role == ChatRole::User)
            .ok_or_else(|| BackendError::Protocol("no user turn".into()))?;
        let (method, algorithm) = parse_query(&last.content).ok_or_else(|| BackendError::Protocol("unrecognised prompt".into()))?;
        let score = self.score(method, algorithm);
        let yes_no = last.content.ends_with("only answer with 'Yes' or 'No'?");
        let (text, logprobs) = if yes_no {
            let yes = score >= 3;
            let text = if yes { "Yes" } else { "No" };
            (text.to_string(), synthetic_logprobs(&["Yes", "No"], if yes { 0 } else { 1 }))
        } else if request.decoding.max_tokens > 1 {
            let text = format!(
                "The snippet is compared with the usual structure of {}. Loops, conditions and names were inspected.\nFinal score: {score}",
                algorithm.display_name()
            );
            (text, Vec::new())
        } else {
            let digits = ["0", "1", "2", "3", "4"];
            (score.to_string(), synthetic_logprobs(&digits, score as usize))
        };
        Ok(ChatResponse {
            text,
            first_token_logprobs: (request.logprobs && !logprobs.is_empty()).then_some(logprobs),
            model: MOCK_MODEL.to_string(),
            latency_ms: None,
        })
    }
}
