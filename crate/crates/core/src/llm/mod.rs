//! Prompting, decoding and batching against chat-completion backends.

mod backend;
mod batch;
mod classify;
mod examples;
mod http;
mod mock;
mod prompt;

pub use backend::{Backend, BackendError, ChatRequest, ChatResponse, TokenLogprob};
pub use batch::{run_batch, BatchOptions, BatchOutcome, BatchSummary, RecordError, VerdictCache};
pub use classify::{
    classify, decode_single_token, last_score_digit, request_for, ClassifyError, ClassifyOptions, DecodeFailure, RetryPolicy, Verdict,
};
pub use examples::{
    AlgorithmExamples, ExampleLibrary, LibraryExample, NegativeKind, POSITIVE_SCORE, RANDOM_NEGATIVE_SCORE, SIMILAR_NEGATIVE_SCORE,
};
pub use http::{parse_response, HttpBackend, HttpConfig, ENV_API_BASE, ENV_API_KEY, ENV_CONTEXT_TOKENS, ENV_MODEL, ENV_TIMEOUT_SECS};
pub use mock::{signature as mock_signature, MockBackend, MOCK_MODEL};
pub use prompt::{
    build_prompt, cot_prompt, estimate_tokens, score_prompt, yes_no_prompt, ChatMessage, ChatRole, DecodingParams, IclCombination,
    IclExample, PromptError, PromptStyle, StyleKind, StyleSpec, COT_INSTRUCTION, SCORE_INSTRUCTION, SCORE_RUBRIC, SCORE_SCALE_MAX,
};
