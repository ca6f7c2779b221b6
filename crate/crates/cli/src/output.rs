//! CSV and JSON emission.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::config::Format;
use crate::error::Result;

/// A row type that can be written as CSV as well as JSON.
pub trait Record: Serialize {
    fn header() -> &'static [&'static str];
    fn fields(&self) -> Vec<String>;
    /// `false` marks the row for `--strict`.
    fn converged(&self) -> bool;
}

/// `x` rounded to 9 significant digits, printed without trailing zeros.
pub fn fmt_float(x: f64) -> String {
    if !x.is_finite() {
        return "nan".into();
    }
    if x == 0.0 {
        return "0".into();
    }
    let rounded: f64 = format!("{x:.8e}").parse().unwrap_or(x);
    let mag = rounded.abs();
    if (1e-4..1e9).contains(&mag) {
        format!("{rounded}")
    } else {
        format!("{rounded:e}")
    }
}

pub fn fmt_opt(x: Option<f64>) -> String {
    x.map_or_else(|| "nan".into(), fmt_float)
}

pub fn to_csv<R: Record>(rows: &[R]) -> String {
    let mut out = R::header().join(",");
    out.push('\n');
    for row in rows {
        out.push_str(&row.fields().join(","));
        out.push('\n');
    }
    out
}

pub fn to_json<R: Record>(rows: &[R]) -> Result<String> {
    let mut s = serde_json::to_string_pretty(rows)?;
    s.push('\n');
    Ok(s)
}

/// Writes `rows` to `path`, or stdout when `None`.
pub fn emit<R: Record>(rows: &[R], format: Format, path: Option<&Path>) -> Result<()> {
    let text = match format {
        Format::Csv => to_csv(rows),
        Format::Json => to_json(rows)?,
    };
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
        }
    }
    Ok(())
}
