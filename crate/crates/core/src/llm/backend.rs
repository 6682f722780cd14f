use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::prompt::{ChatMessage, DecodingParams};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChatRequest {
    pub messages: Vec<ChatMessage>,
    pub decoding: DecodingParams,
    /// Ask for the top alternatives at each generated position.
    pub logprobs: bool,
    pub top_logprobs: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TokenLogprob {
    pub token: String,
    pub logprob: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChatResponse {
    pub text: String,
    /// Alternatives at the first generated position, when the backend supplies them.
    pub first_token_logprobs: Option<Vec<TokenLogprob>>,
    pub model: String,
    pub latency_ms: Option<u64>,
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum BackendError {
    #[error("transport error: {0}")]
    Transport(String),
    #[error("HTTP {status}: {body}")]
    Http { status: u16, body: String },
    #[error("malformed response: {0}")]
    Protocol(String),
    #[error("backend misconfigured: {0}")]
    Config(String),
}

impl BackendError {
    pub fn is_retryable(&self) -> bool {
        match self {
            BackendError::Transport(_) => true,
            BackendError::Http { status, .. } => *status == 429 || *status >= 500,
            BackendError::Protocol(_) | BackendError::Config(_) => false,
        }
    }
}

/// A chat-completion endpoint.
pub trait Backend: Send + Sync {
    /// Identifies backend and model in cache keys and reports.
    fn id(&self) -> String;
    /// Context window in tokens.
    fn context_window(&self) -> usize;
    fn complete(&self, request: &ChatRequest) -> Result<ChatResponse, BackendError>;
}
