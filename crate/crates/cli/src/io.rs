//! File IO and error classification for the CLI.
//!
//! Usage and malformed-input errors exit 2; budget and semantic validation
//! errors exit 3; a failing experiment verdict exits 1.

use std::path::Path;

use probrobust_core::Error as CoreError;
use serde::de::DeserializeOwned;
use serde::Serialize;

pub struct CliError {
    pub code: u8,
    pub message: String,
}

pub const EXIT_USAGE: u8 = 2;
pub const EXIT_VALIDATION: u8 = 3;

pub type CliResult<T> = Result<T, CliError>;

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

/// Core errors are semantic validation / budget problems (exit 3); file and
/// parse problems are reported separately as usage errors (exit 2).
pub fn from_core(err: CoreError) -> CliError {
    validation(err.to_string())
}

pub trait CoreResultExt<T> {
    fn or_exit3(self) -> CliResult<T>;
}

impl<T> CoreResultExt<T> for Result<T, CoreError> {
    fn or_exit3(self) -> CliResult<T> {
        self.map_err(from_core)
    }
}

pub fn read_text(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))
}

pub fn read_json<T: DeserializeOwned>(path: &Path, what: &str) -> CliResult<T> {
    let text = read_text(path)?;
    serde_json::from_str(&text)
        .map_err(|e| usage(format!("malformed {what} file {}: {e}", path.display())))
}

pub fn write_text(path: &Path, text: &str) -> CliResult<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)
                .map_err(|e| usage(format!("cannot create {}: {e}", parent.display())))?;
        }
    }
    std::fs::write(path, text).map_err(|e| usage(format!("cannot write {}: {e}", path.display())))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let text = serde_json::to_string_pretty(value).expect("artifact serializes");
    write_text(path, &text)
}

/// Enumeration budget: the default unless PROBROBUST_BUDGET overrides it.
pub fn budget_from_env() -> CliResult<u64> {
    match std::env::var("PROBROBUST_BUDGET") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| usage(format!("PROBROBUST_BUDGET must be an integer, got `{v}`"))),
        Err(_) => Ok(probrobust_core::learners::DEFAULT_BUDGET),
    }
}
