use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use permanence_cli::report::render_many;
use permanence_cli::{
    run, sweep, verify, Axis, ConfigError, Format, ScenarioConfig, ScenarioReport, ToleranceParams,
    DEFAULT_SEED, EXIT_CONFIG_ERROR, EXIT_PASS, EXIT_VERDICT_FAILURE,
};

#[derive(Parser)]
#[command(
    name = "permanence",
    version,
    about = "Cloning, deletion and signalling checks on finite-dimensional pure states"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Output {
    /// table, csv or json-like
    #[arg(long, value_parser = parse_format)]
    format: Option<Format>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario file.
    Run {
        file: PathBuf,
        #[command(flatten)]
        output: Output,
    },
    /// Run a scenario over a parameter grid.
    Sweep {
        file: PathBuf,
        /// Axis as `key=lo:hi:step` (or `key=value`); repeatable, first axis varies slowest.
        #[arg(long, num_args = 1.., required = true)]
        grid: Vec<String>,
        /// Worker threads (0 = one per core).
        #[arg(long, default_value_t = 0)]
        jobs: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Run every invariant suite with a fixed seed.
    Verify {
        /// Overrides every tolerance; defaults to $PERMANENCE_TOLERANCE when set.
        #[arg(long)]
        tolerance: Option<f64>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
}

fn parse_format(s: &str) -> Result<Format, String> {
    s.parse()
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<(), String> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| format!("{}: {e}", path.display())),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| e.to_string()),
    }
}

fn status(reports: &[ScenarioReport]) -> i32 {
    if reports.iter().all(ScenarioReport::all_pass) {
        EXIT_PASS
    } else {
        EXIT_VERDICT_FAILURE
    }
}

fn execute(cli: Cli) -> Result<i32, String> {
    let (reports, text, out) = match cli.command {
        Command::Run { file, output } => {
            let config = ScenarioConfig::from_file(&file).map_err(|e| e.to_string())?;
            let report = run(&config).map_err(|e| e.to_string())?;
            let text = report.render(output.format.or(config.format).unwrap_or(Format::Table));
            (vec![report], text, output.out)
        }
        Command::Sweep {
            file,
            grid,
            jobs,
            output,
        } => {
            let config = ScenarioConfig::from_file(&file).map_err(|e| e.to_string())?;
            let axes = grid
                .iter()
                .map(|g| Axis::parse(g))
                .collect::<Result<Vec<_>, ConfigError>>()
                .map_err(|e| e.to_string())?;
            let reports = sweep(&config, &axes, jobs).map_err(|e| e.to_string())?;
            let format = output.format.or(config.format).unwrap_or(Format::Csv);
            let text = render_many(&reports, format);
            (reports, text, output.out)
        }
        Command::Verify {
            tolerance,
            seed,
            output,
        } => {
            let tol = match tolerance {
                Some(t) if t > 0.0 => ToleranceParams::uniform(t),
                Some(t) => return Err(format!("tolerance must be positive, got {t}")),
                None => ToleranceParams::from_env().map_err(|e| e.to_string())?,
            };
            let report = verify(tol, seed);
            let text = report.render(output.format.unwrap_or(Format::Table));
            (vec![report], text, output.out)
        }
    };
    emit(&text, out.as_ref())?;
    Ok(status(&reports))
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_CONFIG_ERROR as u8)
        }
    }
}
