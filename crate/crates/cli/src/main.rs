use clap::{Parser, Subcommand};
use outlab_cli::{render_results, run_with_threads, summarize::summarize_text, CliError, ExperimentConfig, Overrides};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

#[derive(Parser)]
#[command(name = "outlab", version, about = "Random walk experiments on Out(F_N) and integer matrix groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a config file.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output CSV (overrides `out` in the config; stdout if neither is set).
        #[arg(long)]
        out: Option<String>,
        /// Master seed (overrides `master_seed`).
        #[arg(long)]
        seed: Option<u64>,
        /// Number of paths (overrides `paths`).
        #[arg(long)]
        paths: Option<u64>,
        /// Worker threads; does not affect the output.
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Aggregate a result CSV per estimator and time.
    Summarize {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn write_or_print(target: Option<&str>, text: &str) -> Result<(), CliError> {
    match target {
        Some(path) if path != "-" => Ok(std::fs::write(path, text)?),
        _ => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main_inner(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Run {
            config,
            out,
            seed,
            paths,
            threads,
        } => {
            let text = std::fs::read_to_string(&config)?;
            let cfg: ExperimentConfig = text.parse()?;
            let overrides = Overrides {
                master_seed: seed,
                paths,
                out,
            };
            let result = run_with_threads(&cfg, &overrides, threads)?;
            for line in &result.report {
                eprintln!("{line}");
            }
            let ts = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
            write_or_print(result.resolved.out.as_deref(), &render_results(&result, ts))?;
            if result.budget_exhausted {
                eprintln!("error: every path exhausted its budget");
                return Ok(3);
            }
            Ok(0)
        }
        Command::Summarize { input, out } => {
            let text = std::fs::read_to_string(&input)?;
            std::fs::write(out, summarize_text(&text)?)?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match main_inner(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
