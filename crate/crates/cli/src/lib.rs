//! Experiment runner around the `outlab` library: config files, validation,
//! CSV output and summaries.

pub mod config;
pub mod error;
pub mod output;
pub mod run;
pub mod summarize;

pub use config::{ExperimentConfig, GenEntry, Kind};
pub use error::{CliError, CliResult};
pub use run::{execute, resolve, Overrides, RunOutput};

/// Full text of a result file: comment header (version, timestamp,
/// resolved config) followed by the CSV body.
pub fn render_results(out: &RunOutput, timestamp_unix: u64) -> String {
    let mut text = format!("# outlab {}\n# timestamp_unix = {timestamp_unix}\n", env!("CARGO_PKG_VERSION"));
    text.push_str(&output::comment_block(&out.resolved.to_string()));
    text.push_str(&output::csv_body(out.resolved.kind.as_str(), &out.records));
    text
}

/// Runs `cfg` on a pool of `threads` workers (rayon's default when `None`).
pub fn run_with_threads(cfg: &ExperimentConfig, overrides: &Overrides, threads: Option<usize>) -> CliResult<RunOutput> {
    let resolved = resolve(cfg, overrides);
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        if t == 0 {
            return Err(CliError::field("--threads", "must be positive"));
        }
        builder = builder.num_threads(t);
    }
    let pool = builder.build().map_err(|e| CliError::Threads(e.to_string()))?;
    pool.install(|| execute(&resolved))
}
