//! OpenAI-compatible chat-completion backend.

use std::time::{Duration, Instant};

use serde_json::{json, Value};

use super::backend::{Backend, BackendError, ChatRequest, ChatResponse, TokenLogprob};
use super::prompt::ChatRole;

pub const ENV_API_BASE: &str = "ALGOREC_API_BASE";
pub const ENV_API_KEY: &str = "ALGOREC_API_KEY";
pub const ENV_MODEL: &str = "ALGOREC_MODEL";
pub const ENV_TIMEOUT_SECS: &str = "ALGOREC_TIMEOUT_SECS";
pub const ENV_CONTEXT_TOKENS: &str = "ALGOREC_CONTEXT_TOKENS";

#[derive(Debug, Clone)]
pub struct HttpConfig {
    pub api_base: String,
    pub api_key: Option<String>,
    pub model: String,
    pub timeout: Duration,
    pub context_window: usize,
    /// Send `top_k`; not every server accepts it.
    pub send_top_k: bool,
}

impl HttpConfig {
    pub fn from_env() -> Result<Self, BackendError> {
        let var = |k: &str| std::env::var(k).ok().filter(|v| !v.is_empty());
        let api_base = var(ENV_API_BASE).unwrap_or_else(|| "https://api.openai.com/v1".into());
        let model = var(ENV_MODEL).ok_or_else(|| BackendError::Config(format!("{ENV_MODEL} is not set")))?;
        let parse = |k: &str, default: u64| -> Result<u64, BackendError> {
            match var(k) {
                None => Ok(default),
                Some(v) => v.parse().map_err(|_| BackendError::Config(format!("{k}={v} is not a number"))),
            }
        };
        Ok(HttpConfig {
            api_base,
            api_key: var(ENV_API_KEY),
            model,
            timeout: Duration::from_secs(parse(ENV_TIMEOUT_SECS, 60)?),
            context_window: parse(ENV_CONTEXT_TOKENS, 128_000)? as usize,
            send_top_k: false,
        })
    }
}

pub struct HttpBackend {
    config: HttpConfig,
    agent: ureq::Agent,
}

impl HttpBackend {
    pub fn new(config: HttpConfig) -> Self {
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(config.timeout))
            .http_status_as_error(false)
            .build()
            .into();
        HttpBackend { config, agent }
    }

    pub fn request_body(&self, request: &ChatRequest) -> Value {
        let messages: Vec<Value> = request
            .messages
            .iter()
            .map(|m| {
                let role = match m.role {
                    ChatRole::User => "user",
                    ChatRole::Assistant => "assistant",
                };
                json!({"role": role, "content": m.content})
            })
            .collect();
        let mut body = json!({
            "model": self.config.model,
            "messages": messages,
            "temperature": request.decoding.temperature,
            "top_p": request.decoding.top_p,
            "max_tokens": request.decoding.max_tokens,
        });
        if self.config.send_top_k {
            body["top_k"] = json!(request.decoding.top_k);
        }
        if request.logprobs {
            body["logprobs"] = json!(true);
            body["top_logprobs"] = json!(request.top_logprobs);
        }
        body
    }
}

/// Extracts text and first-position alternatives from a response body.
pub fn parse_response(body: &Value) -> Result<(String, Option<Vec<TokenLogprob>>), BackendError> {
    let choice = body
        .get("choices")
        .and_then(|c| c.get(0))
        .ok_or_else(|| BackendError::Protocol("no choices".into()))?;
    let text = choice
        .pointer("/message/content")
        .and_then(Value::as_str)
        .unwrap_or_default()
        .to_string();
    let logprobs = choice
        .pointer("/logprobs/content/0/top_logprobs")
        .and_then(Value::as_array)
        .map(|alts| {
            alts.iter()
                .filter_map(|a| {
                    Some(TokenLogprob {
                        token: a.get("token")?.as_str()?.to_string(),
                        logprob: a.get("logprob")?.as_f64()?,
                    })
                })
                .collect()
        });
    Ok((text, logprobs))
}

impl Backend for HttpBackend {
    fn id(&self) -> String {
        format!("openai:{}", self.config.model)
    }

    fn context_window(&self) -> usize {
        self.config.context_window
    }

    fn complete(&self, request: &ChatRequest) -> Result<ChatResponse, BackendError> {
        let url = format!("{}/chat/completions", self.config.api_base.trim_end_matches('/'));
        let started = Instant::now();
        let mut req = self.agent.post(&url).header("Content-Type", "application/json");
        if let Some(key) = &self.config.api_key {
            req = req.header("Authorization", &format!("Bearer {key}"));
        }
        let mut resp = req
            .send_json(self.request_body(request))
            .map_err(|e| BackendError::Transport(e.to_string()))?;
        let status = resp.status().as_u16();
        let text = resp
            .body_mut()
            .read_to_string()
            .map_err(|e| BackendError::Transport(e.to_string()))?;
        if status >= 400 {
            return Err(BackendError::Http { status, body: text });
        }
        let body: Value = serde_json::from_str(&text).map_err(|e| BackendError::Protocol(e.to_string()))?;
        let (content, logprobs) = parse_response(&body)?;
        Ok(ChatResponse {
            text: content,
            first_token_logprobs: logprobs,
            model: body.get("model").and_then(Value::as_str).unwrap_or(&self.config.model).to_string(),
            latency_ms: Some(started.elapsed().as_millis() as u64),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::llm::prompt::{ChatMessage, DecodingParams};

    #[test]
    fn wire_shape() {
        let b = HttpBackend::new(HttpConfig {
            api_base: "http://localhost:1".into(),
            api_key: None,
            model: "m".into(),
            timeout: Duration::from_secs(1),
            context_window: 1000,
            send_top_k: true,
        });
        let body = b.request_body(&ChatRequest {
            messages: vec![ChatMessage::user("hi"), ChatMessage::assistant("4")],
            decoding: DecodingParams::COT,
            logprobs: true,
            top_logprobs: 10,
        });
        assert_eq!(body["messages"][1]["role"], "assistant");
        assert_eq!(body["top_k"], 50);
        assert_eq!(body["max_tokens"], 300);
        assert_eq!(body["top_logprobs"], 10);
        assert_eq!(body["logprobs"], true);
    }

    #[test]
    fn response_parsing() {
        let body = json!({"model":"x","choices":[{"message":{"content":"4"},
            "logprobs":{"content":[{"token":"4","logprob":-0.1,"top_logprobs":[{"token":"4","logprob":-0.1},{"token":"0","logprob":-2.3}]}]}}]});
        let (text, lp) = parse_response(&body).unwrap();
        assert_eq!(text, "4");
        assert_eq!(lp.unwrap().len(), 2);
        assert!(parse_response(&json!({})).is_err());
    }

    #[test]
    fn unreachable_server_is_a_transport_error() {
        let b = HttpBackend::new(HttpConfig {
            api_base: "http://127.0.0.1:9".into(),
            api_key: Some("k".into()),
            model: "m".into(),
            timeout: Duration::from_secs(2),
            context_window: 1000,
            send_top_k: false,
        });
        let err = b
            .complete(&ChatRequest {
                messages: vec![ChatMessage::user("x")],
                decoding: DecodingParams::SINGLE_TOKEN,
                logprobs: true,
                top_logprobs: 10,
            })
            .unwrap_err();
        assert!(err.is_retryable(), "{err}");
    }
}
