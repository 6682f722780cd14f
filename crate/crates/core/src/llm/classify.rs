use std::collections::BTreeMap;
use std::sync::atomic::{AtomicBool, Ordering};
use std::time::Duration;

use regex::Regex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::backend::{Backend, BackendError, ChatRequest, ChatResponse};
use super::prompt::{build_prompt, estimate_tokens, PromptStyle, StyleKind, SCORE_SCALE_MAX};
use crate::algorithm::Algorithm;
use crate::code_model::MethodRecord;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecodeFailure {
    /// No candidate answer token among the returned alternatives.
    Undecodable,
    /// Free text without a usable score digit.
    Unparsable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub method_id: String,
    pub algorithm: Algorithm,
    pub raw_score: u8,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub answer_logprobs: Option<BTreeMap<String, f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cot_text: Option<String>,
    pub backend: String,
    pub model: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub latency_ms: Option<u64>,
    /// Set when lenient mode scored an undecodable answer as 0.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decode_failure: Option<DecodeFailure>,
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ClassifyError {
    #[error("undecodable: no candidate answer token in the returned log-probabilities")]
    Undecodable,
    #[error("unparsable: no score digit in the generated text")]
    Unparsable,
    #[error("prompt needs about {needed} tokens but the context window is {window}")]
    ContextOverflow { needed: usize, window: usize },
    #[error("backend failed after {attempts} attempt(s): {source}")]
    Backend {
        attempts: u32,
        #[source]
        source: BackendError,
    },
}

impl ClassifyError {
    pub fn kind(&self) -> &'static str {
        match self {
            ClassifyError::Undecodable => "undecodable",
            ClassifyError::Unparsable => "unparsable",
            ClassifyError::ContextOverflow { .. } => "context_overflow",
            ClassifyError::Backend { .. } => "backend",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RetryPolicy {
    pub max_retries: u32,
    pub base_delay_ms: u64,
    pub factor: f64,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        RetryPolicy {
            max_retries: 3,
            base_delay_ms: 500,
            factor: 2.0,
        }
    }
}

impl RetryPolicy {
    pub fn none() -> Self {
        RetryPolicy {
            max_retries: 0,
            base_delay_ms: 0,
            factor: 1.0,
        }
    }

    pub fn delay(&self, retry: u32) -> Duration {
        Duration::from_millis((self.base_delay_ms as f64 * self.factor.powi(retry as i32)) as u64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassifyOptions {
    pub retry: RetryPolicy,
    /// Score undecodable or unparsable answers as 0 instead of failing.
    pub lenient: bool,
    pub top_logprobs: u32,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions {
            retry: RetryPolicy::default(),
            lenient: false,
            top_logprobs: 10,
        }
    }
}

fn candidate_score(kind: StyleKind, token: &str) -> Option<u8> {
    let t = token.trim();
    match kind {
        StyleKind::YesNo => {
            if t.eq_ignore_ascii_case("yes") {
                Some(SCORE_SCALE_MAX)
            } else if t.eq_ignore_ascii_case("no") {
                Some(0)
            } else {
                None
            }
        }
        _ => t.parse::<u8>().ok().filter(|s| *s <= SCORE_SCALE_MAX && t.len() == 1),
    }
}

static NO_LOGPROBS_WARNED: AtomicBool = AtomicBool::new(false);

/// Score of a single-token answer: argmax over the candidate tokens, or the
/// first word of the text when the backend returns no log-probabilities.
pub fn decode_single_token(kind: StyleKind, response: &ChatResponse) -> Result<(u8, Option<BTreeMap<String, f64>>), DecodeFailure> {
    let Some(alts) = &response.first_token_logprobs else {
        if !NO_LOGPROBS_WARNED.swap(true, Ordering::Relaxed) {
            log::warn!("backend returned no logprobs; falling back to parsing the answer text");
        }
        let first = response
            .text
            .split(|c: char| !c.is_ascii_alphanumeric())
            .find(|w| !w.is_empty())
            .unwrap_or("");
        return candidate_score(kind, first).map(|s| (s, None)).ok_or(DecodeFailure::Undecodable);
    };
    let mut best: BTreeMap<String, f64> = BTreeMap::new();
    for a in alts {
        if candidate_score(kind, &a.token).is_some() {
            let key = a.token.trim().to_string();
            let e = best.entry(key).or_insert(f64::NEG_INFINITY);
            *e = e.max(a.logprob);
        }
    }
    let (token, _) = best.iter().max_by(|a, b| a.1.total_cmp(b.1)).ok_or(DecodeFailure::Undecodable)?;
    let score = candidate_score(kind, token).expect("filtered above");
    Ok((score, Some(best)))
}

/// Last standalone digit 0-4 in `text`.
pub fn last_score_digit(text: &str) -> Option<u8> {
    static RE: std::sync::OnceLock<Regex> = std::sync::OnceLock::new();
    let re = RE.get_or_init(|| Regex::new(r"\b[0-4]\b").expect("valid"));
    re.find_iter(text).last().map(|m| m.as_str().parse().expect("digit"))
}

pub fn request_for(style: &PromptStyle, algorithm: Algorithm, source: &str, opts: &ClassifyOptions) -> ChatRequest {
    ChatRequest {
        messages: build_prompt(style, algorithm, source),
        decoding: style.decoding,
        logprobs: style.kind.single_token(),
        top_logprobs: opts.top_logprobs,
    }
}

fn call_with_retries(backend: &dyn Backend, req: &ChatRequest, policy: &RetryPolicy) -> Result<ChatResponse, ClassifyError> {
    let mut attempt = 0;
    loop {
        match backend.complete(req) {
            Ok(r) => return Ok(r),
            Err(e) if e.is_retryable() && attempt < policy.max_retries => {
                let wait = policy.delay(attempt);
                log::debug!("retrying after {e} in {wait:?}");
                if !wait.is_zero() {
                    std::thread::sleep(wait);
                }
                attempt += 1;
            }
            Err(source) => {
                return Err(ClassifyError::Backend {
                    attempts: attempt + 1,
                    source,
                })
            }
        }
    }
}

pub fn classify(
    style: &PromptStyle,
    algorithm: Algorithm,
    method: &MethodRecord,
    backend: &dyn Backend,
    opts: &ClassifyOptions,
) -> Result<Verdict, ClassifyError> {
    let req = request_for(style, algorithm, &method.source, opts);
    let needed = estimate_tokens(&req.messages) + req.decoding.max_tokens as usize;
    let window = backend.context_window();
    if needed > window {
        return Err(ClassifyError::ContextOverflow { needed, window });
    }
    let resp = call_with_retries(backend, &req, &opts.retry)?;
    let mut verdict = Verdict {
        method_id: method.method_id.clone(),
        algorithm,
        raw_score: 0,
        answer_logprobs: None,
        cot_text: None,
        backend: backend.id(),
        model: resp.model.clone(),
        latency_ms: resp.latency_ms,
        decode_failure: None,
    };
    let decoded = if style.kind.single_token() {
        decode_single_token(style.kind, &resp).map(|(s, lp)| {
            verdict.answer_logprobs = lp;
            s
        })
    } else {
        verdict.cot_text = Some(resp.text.clone());
        last_score_digit(&resp.text).ok_or(DecodeFailure::Unparsable)
    };
    match decoded {
        Ok(s) => verdict.raw_score = s,
        Err(f) if opts.lenient => verdict.decode_failure = Some(f),
        Err(DecodeFailure::Undecodable) => return Err(ClassifyError::Undecodable),
        Err(DecodeFailure::Unparsable) => return Err(ClassifyError::Unparsable),
    }
    Ok(verdict)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::llm::backend::TokenLogprob;

    fn resp(alts: &[(&str, f64)]) -> ChatResponse {
        ChatResponse {
            text: String::new(),
            first_token_logprobs: Some(
                alts.iter()
                    .map(|(t, l)| TokenLogprob {
                        token: t.to_string(),
                        logprob: *l,
                    })
                    .collect(),
            ),
            model: "m".into(),
            latency_ms: None,
        }
    }

    #[test]
    fn argmax_over_candidates() {
        let r = resp(&[("4", -0.1), ("0", -2.3), ("Yes", -9.0)]);
        assert_eq!(decode_single_token(StyleKind::Score, &r).unwrap().0, 4);
        let r = resp(&[("Yes", -3.0), (" no", -0.2), ("4", -0.01)]);
        assert_eq!(decode_single_token(StyleKind::YesNo, &r).unwrap().0, 0);
        let r = resp(&[("The", -0.1), ("5", -0.2), ("10", -0.3)]);
        assert_eq!(decode_single_token(StyleKind::Score, &r), Err(DecodeFailure::Undecodable));
    }

    #[test]
    fn text_fallback_without_logprobs() {
        let mut r = resp(&[]);
        r.first_token_logprobs = None;
        r.text = " Yes.".into();
        assert_eq!(decode_single_token(StyleKind::YesNo, &r).unwrap().0, 4);
        r.text = "3".into();
        assert_eq!(decode_single_token(StyleKind::Score, &r).unwrap().0, 3);
    }

    #[test]
    fn last_digit_rule() {
        assert_eq!(last_score_digit("…the midpoint halves the range. Therefore: 3"), Some(3));
        assert_eq!(last_score_digit("Scores 0 to 4 exist. I pick 2, not 7."), Some(2));
        assert_eq!(last_score_digit("O(n2) loops; score 10"), None);
        assert_eq!(last_score_digit("no digits"), None);
    }

    #[test]
    fn backoff_grows() {
        let p = RetryPolicy::default();
        assert_eq!(p.delay(0), Duration::from_millis(500));
        assert_eq!(p.delay(2), Duration::from_millis(2000));
    }
}
