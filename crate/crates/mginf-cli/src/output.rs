//! Payload emission: JSON reports and CSV tables, to stdout or `--out`.

use std::io::Write;
use std::path::PathBuf;

use serde::Serialize;

use crate::UsageError;

/// Scientific notation with 13 significant digits; applied to every numeric
/// CSV field.
pub fn sig(x: f64) -> String {
    format!("{x:.12e}")
}

pub fn emit(out: &Option<PathBuf>, payload: &str) -> Result<(), UsageError> {
    match out {
        Some(path) => std::fs::write(path, payload)
            .map_err(|e| UsageError(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(payload.as_bytes())
                .map_err(UsageError::new)
        }
    }
}

pub fn emit_json<T: Serialize>(out: &Option<PathBuf>, report: &T) -> Result<(), UsageError> {
    let mut text = serde_json::to_string_pretty(report).map_err(UsageError::new)?;
    text.push('\n');
    emit(out, &text)
}

pub fn emit_csv(
    out: &Option<PathBuf>,
    header: &str,
    rows: Vec<Vec<f64>>,
) -> Result<(), UsageError> {
    let mut text = String::with_capacity(rows.len() * 80 + header.len() + 1);
    text.push_str(header);
    text.push('\n');
    for row in rows {
        let line: Vec<String> = row.into_iter().map(sig).collect();
        text.push_str(&line.join(","));
        text.push('\n');
    }
    emit(out, &text)
}
