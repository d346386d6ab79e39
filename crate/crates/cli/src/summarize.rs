//! Aggregates of a result file: per `(experiment, estimator, n)` mean,
//! median, batch-means 95% half-width over paths, and the number of paths
//! with a usable value. The half-width uses `B = min(P, 20)` contiguous
//! batches in `path_id` order and `t_{0.975, B-1} s_B / sqrt(B)`, where
//! `s_B` is the standard deviation of the batch means; it is left empty for
//! a single path.

use crate::error::CliResult;
use crate::output::{fmt_float, parse_results, SUMMARY_HEADER};
use outlab::walk::{summarize, Record};
use std::collections::BTreeMap;
use std::fmt::Write;

pub fn summarize_text(input: &str) -> CliResult<String> {
    let mut by_experiment: BTreeMap<String, Vec<Record>> = BTreeMap::new();
    for (experiment, record) in parse_results(input)? {
        by_experiment.entry(experiment).or_default().push(record);
    }
    let mut out = String::new();
    out.push_str(SUMMARY_HEADER);
    out.push('\n');
    for (experiment, records) in &by_experiment {
        for row in summarize(records) {
            let _ = writeln!(
                out,
                "{experiment},{},{},{},{},{},{}",
                row.estimator,
                row.n,
                fmt_float(row.mean),
                fmt_float(row.median),
                row.ci_halfwidth.map(fmt_float).unwrap_or_default(),
                row.paths
            );
        }
    }
    Ok(out)
}
