//! Error-to-exit-code mapping. The contract: 0 ok, 2 usage or input
//! trouble, 3 validation failure, 4 format failure (the model never
//! produced a legal output), 5 schema outside the strict-mode subset.

use sketch_core::compiler::VocabError;
use sketch_core::dataset::DatasetError;
use sketch_core::engine::{BackendError, EngineError};
use sketch_core::eval::EvalError;
use sketch_core::json::ParseError;
use sketch_core::prompt::PromptError;
use sketch_core::tasks::{CatalogError, TaskError};

pub const EXIT_USAGE: i32 = 2;
pub const EXIT_VALIDATION: i32 = 3;
pub const EXIT_FORMAT_FAILURE: i32 = 4;
pub const EXIT_UNSUPPORTED: i32 = 5;

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> CliError {
        CliError {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    pub fn validation(message: impl Into<String>) -> CliError {
        CliError {
            code: EXIT_VALIDATION,
            message: message.into(),
        }
    }

    pub fn format_failure(message: impl Into<String>) -> CliError {
        CliError {
            code: EXIT_FORMAT_FAILURE,
            message: message.into(),
        }
    }

    pub fn unsupported(message: impl Into<String>) -> CliError {
        CliError {
            code: EXIT_UNSUPPORTED,
            message: message.into(),
        }
    }
}

impl From<TaskError> for CliError {
    fn from(e: TaskError) -> CliError {
        match &e {
            TaskError::UnknownSchema(_) => CliError::usage(e.to_string()),
            TaskError::InstanceInvalid(_) | TaskError::BadOutputFormat(_) => {
                CliError::validation(e.to_string())
            }
            TaskError::BadFile(_) | TaskError::Parse(_) | TaskError::Io(_) => {
                CliError::usage(e.to_string())
            }
        }
    }
}

impl From<EngineError> for CliError {
    fn from(e: EngineError) -> CliError {
        match &e {
            EngineError::UnsupportedSchema(_) => CliError::unsupported(e.to_string()),
            EngineError::FormatFailure(_) | EngineError::LengthExceeded { .. } => {
                CliError::format_failure(e.to_string())
            }
            EngineError::VocabularyDeadEnd { .. } => CliError::unsupported(e.to_string()),
            _ => CliError::usage(e.to_string()),
        }
    }
}

impl From<DatasetError> for CliError {
    fn from(e: DatasetError) -> CliError {
        match &e {
            DatasetError::PoolTooSmall { .. } | DatasetError::SchemaSpaceExhausted { .. } => {
                CliError::validation(e.to_string())
            }
            _ => CliError::usage(e.to_string()),
        }
    }
}

impl From<EvalError> for CliError {
    fn from(e: EvalError) -> CliError {
        match e {
            EvalError::GoldInvalid { .. } => CliError::validation(e.to_string()),
            EvalError::Task(inner) => inner.into(),
            other => CliError::usage(other.to_string()),
        }
    }
}

impl From<CatalogError> for CliError {
    fn from(e: CatalogError) -> CliError {
        CliError::usage(e.to_string())
    }
}

impl From<VocabError> for CliError {
    fn from(e: VocabError) -> CliError {
        CliError::usage(e.to_string())
    }
}

impl From<BackendError> for CliError {
    fn from(e: BackendError) -> CliError {
        CliError::usage(e.to_string())
    }
}

impl From<PromptError> for CliError {
    fn from(e: PromptError) -> CliError {
        CliError::usage(e.to_string())
    }
}

impl From<ParseError> for CliError {
    fn from(e: ParseError) -> CliError {
        CliError::usage(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> CliError {
        CliError::usage(e.to_string())
    }
}
