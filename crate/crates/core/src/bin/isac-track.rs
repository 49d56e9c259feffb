//! Command-line entry point: `isac-track run <config> [--key value ...]`.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use isac_track::pipeline::{export_report, load_config, parse_overrides, run_pipeline};

#[derive(Parser)]
#[command(name = "isac-track", version, about = "Bistatic OFDM sensing and multi-person tracking")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full pipeline on a TOML configuration.
    Run {
        config: PathBuf,
        /// Overrides named after config keys, e.g. `--scenario.snr_db 20`.
        #[arg(trailing_var_arg = true, allow_hyphen_values = true, value_name = "--KEY VALUE")]
        overrides: Vec<String>,
    },
}

fn run(config: PathBuf, overrides: Vec<String>) -> isac_track::Result<()> {
    let overrides = parse_overrides(&overrides).map_err(|e| e.at_stage("config"))?;
    let config = load_config(&config, &overrides).map_err(|e| e.at_stage("config"))?;
    let report = run_pipeline(&config)?;
    let files = export_report(&report, &config.output_dir).map_err(|e| e.at_stage("export"))?;
    let m = &report.metrics;
    let fmt = |v: Option<f64>| v.map_or("n/a".to_string(), |x| format!("{x:.3} m"));
    let summary = format!(
        "epochs          {}\nconfirmed       {}\nmedian error    {}\np90 error       {}\nidentity swaps  {}\nruntime         {:.1} ms\noutput          {}\n",
        report.epochs.len(),
        report.tracks.len(),
        fmt(m.median_m),
        fmt(m.p90_m),
        m.swaps,
        report.timings.total_ms(),
        files.tracks.parent().unwrap_or(&config.output_dir).display()
    );
    // A closed stdout (e.g. piped into `head`) is not a pipeline failure.
    let _ = std::io::stdout().write_all(summary.as_bytes());
    Ok(())
}

fn main() -> ExitCode {
    let Cli { command } = Cli::parse();
    let result = match command {
        Command::Run { config, overrides } => run(config, overrides),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
