//! Machine-readable diagnostics: single-line JSON objects on standard
//! error. Human-facing text goes to standard output only.

use patchwarp::Error;
use serde_json::json;

pub fn emit_error(code: &str, message: &str) {
    eprintln!("{}", json!({ "error": code, "message": message }));
}

pub fn emit_warning(code: &str, message: &str) {
    eprintln!("{}", json!({ "warning": code, "message": message }));
}

/// Emits a library error with its stable code and returns the validation
/// exit status.
pub fn report(err: &Error) -> std::process::ExitCode {
    emit_error(err.code(), &err.to_string());
    std::process::ExitCode::from(2)
}

/// Emits any error, using the library code when available.
pub fn report_anyhow(err: &anyhow::Error) -> std::process::ExitCode {
    if let Some(lib) = err.downcast_ref::<Error>() {
        return report(lib);
    }
    emit_error("InvalidArguments", &format!("{err:#}"));
    std::process::ExitCode::from(2)
}
