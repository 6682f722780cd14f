use std::fmt::Display;

use algorec_core::code_model::CorpusError;
use algorec_core::eval::{PipelineError, ReportError, SplitError, TruthError};
use algorec_core::keyword::KeywordPatternError;
use algorec_core::llm::{BackendError, PromptError};
use algorec_core::structural::DslError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error("{0}")]
    Backend(String),
}

impl CliError {
    pub fn usage(msg: impl Display) -> Self {
        CliError::Usage(msg.to_string())
    }

    pub fn data(msg: impl Display) -> Self {
        CliError::Data(msg.to_string())
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Backend(_) => 3,
        }
    }
}

macro_rules! data_errors {
    ($($t:ty),*) => {
        $(impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::data(e)
            }
        })*
    };
}

data_errors!(
    CorpusError,
    TruthError,
    ReportError,
    SplitError,
    KeywordPatternError,
    DslError,
    PromptError,
    std::io::Error
);

impl From<BackendError> for CliError {
    fn from(e: BackendError) -> Self {
        CliError::Backend(e.to_string())
    }
}

impl From<PipelineError> for CliError {
    fn from(e: PipelineError) -> Self {
        match e {
            PipelineError::SplitRequired(_) => CliError::usage(e),
            other => CliError::data(other),
        }
    }
}
