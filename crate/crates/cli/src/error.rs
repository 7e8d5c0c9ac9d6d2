use std::io;

use thiserror::Error;

/// Process exit status; the only three codes the binary ever returns.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exit {
    Success = 0,
    CheckFailed = 1,
    Usage = 2,
}

impl Exit {
    pub fn code(self) -> u8 {
        self as u8
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Library(#[from] matbeta::Error),
    #[error("output error: {0}")]
    Io(#[from] io::Error),
    #[error("json encoding failed: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    /// Library errors here all come from rejected arguments.
    pub fn exit(&self) -> Exit {
        match self {
            CliError::Io(e) if e.kind() == io::ErrorKind::BrokenPipe => Exit::Success,
            _ => Exit::Usage,
        }
    }
}
