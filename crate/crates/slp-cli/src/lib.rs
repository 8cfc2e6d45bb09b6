//! Command-line companion to `slp-core`: argument parsing, sweep execution,
//! and the CSV/JSON/SVG file formats, plus the acceptance harness behind
//! `slp verify`.

pub mod commands;
pub mod config;
pub mod formats;
pub mod output;
pub mod svg;
pub mod verify;

/// Exit code for configuration errors (bad flags, invalid parameters).
pub const EXIT_BAD_CONFIG: i32 = 2;
/// Exit code when independent methods disagree beyond tolerance, which
/// signals a defect in the numerics rather than in the invocation.
pub const EXIT_DISAGREEMENT: i32 = 3;
/// Exit code for acceptance-check failures from `slp verify`.
pub const EXIT_VERIFY_FAILED: i32 = 1;

/// Failure carrying the process exit code it should map to.
#[derive(Debug)]
pub struct CmdFail {
    pub code: i32,
    pub message: String,
}

impl std::fmt::Display for CmdFail {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.message)
    }
}

impl std::error::Error for CmdFail {}

impl CmdFail {
    pub fn config(message: impl Into<String>) -> Self {
        CmdFail { code: EXIT_BAD_CONFIG, message: message.into() }
    }

    pub fn disagreement(message: impl Into<String>) -> Self {
        CmdFail { code: EXIT_DISAGREEMENT, message: message.into() }
    }
}

impl From<slp_core::SlpError> for CmdFail {
    fn from(e: slp_core::SlpError) -> Self {
        let code = match &e {
            slp_core::SlpError::NumericsFailed { .. } => EXIT_DISAGREEMENT,
            _ => EXIT_BAD_CONFIG,
        };
        CmdFail { code, message: e.to_string() }
    }
}

impl From<std::io::Error> for CmdFail {
    fn from(e: std::io::Error) -> Self {
        CmdFail { code: EXIT_BAD_CONFIG, message: format!("io error: {e}") }
    }
}

pub type CmdResult<T> = std::result::Result<T, CmdFail>;
