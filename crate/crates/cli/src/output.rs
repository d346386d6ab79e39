//! CSV emission and parsing.
//!
//! Result files start with `#` comment lines (tool version, timestamp,
//! resolved config) followed by the header
//! `experiment,path_id,n,estimator,value,status`. Only the timestamp line
//! varies between runs of the same config.

use crate::error::{CliError, CliResult};
use outlab::walk::{Record, Status};
use std::fmt::Write;

pub const RESULT_HEADER: &str = "experiment,path_id,n,estimator,value,status";
pub const SUMMARY_HEADER: &str = "experiment,estimator,n,mean,median,ci_halfwidth,paths";

/// Shortest representation that parses back to the same `f64`; `NaN` is
/// written as an empty field.
pub fn fmt_float(x: f64) -> String {
    if x.is_nan() {
        String::new()
    } else {
        format!("{x}")
    }
}

pub fn parse_float(field: &str) -> Result<f64, std::num::ParseFloatError> {
    if field.is_empty() {
        Ok(f64::NAN)
    } else {
        field.parse()
    }
}

/// Header row and records, without comment lines.
pub fn csv_body(experiment: &str, records: &[Record]) -> String {
    let mut out = String::with_capacity(48 * (records.len() + 1));
    out.push_str(RESULT_HEADER);
    out.push('\n');
    for r in records {
        let _ = writeln!(
            out,
            "{experiment},{},{},{},{},{}",
            r.path_id,
            r.n,
            r.estimator,
            fmt_float(r.value),
            r.status
        );
    }
    out
}

/// `# ` prefixed copy of `text`, one comment per line.
pub fn comment_block(text: &str) -> String {
    text.lines()
        .map(|l| if l.is_empty() { "#\n".to_string() } else { format!("# {l}\n") })
        .collect()
}

/// Strips comment lines and returns the CSV part.
pub fn strip_comments(text: &str) -> String {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .flat_map(|l| [l, "\n"])
        .collect()
}

/// Parses a result file into `(experiment, record)` pairs.
pub fn parse_results(text: &str) -> CliResult<Vec<(String, Record)>> {
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.starts_with('#') && !l.trim().is_empty());
    match lines.next() {
        Some((_, h)) if h.trim_end() == RESULT_HEADER => {}
        Some((i, h)) => {
            return Err(CliError::Schema(format!(
                "line {}: expected header `{RESULT_HEADER}`, got `{h}`",
                i + 1
            )))
        }
        None => return Err(CliError::Schema("no header row".into())),
    }
    lines
        .map(|(i, line)| {
            let bad = |m: &str| CliError::Schema(format!("line {}: {m}", i + 1));
            let f: Vec<&str> = line.trim_end().split(',').collect();
            if f.len() != 6 {
                return Err(bad(&format!("expected 6 fields, got {}", f.len())));
            }
            let record = Record {
                path_id: f[1].parse().map_err(|_| bad("path_id is not an integer"))?,
                n: f[2].parse().map_err(|_| bad("n is not an integer"))?,
                estimator: f[3].to_string(),
                value: parse_float(f[4]).map_err(|_| bad("value is not a number"))?,
                status: Status::parse(f[5]).ok_or_else(|| bad("status must be ok, truncated or downgraded"))?,
            };
            Ok((f[0].to_string(), record))
        })
        .collect()
}
