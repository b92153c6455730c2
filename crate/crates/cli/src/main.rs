use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use photonsim_cli::{run_to_dir, Experiment, ExperimentConfig, RunError};

/// Runs one photonic lattice simulation experiment and writes its tables,
/// summary and manifest.
#[derive(Debug, Parser)]
#[command(name = "photonsim", version)]
struct Args {
    /// quench | spectrum | steady_state | incoherent | subtraction | compile
    experiment: String,
    /// Flat TOML file; omitted keys take the experiment's defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Worker threads for scans.
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Overrides a config key, e.g. `--set u=0`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("photonsim: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn execute(args: &Args) -> Result<(), RunError> {
    let experiment: Experiment = args.experiment.parse()?;
    let text = args.config.as_ref().map(std::fs::read_to_string).transpose()?;
    let cfg = ExperimentConfig::resolve(experiment, text.as_deref(), &args.overrides)?;
    let out = run_to_dir(&cfg, &args.out, args.threads)?;
    println!("{}: wrote {} file(s) to {}", experiment.name(), out.tables.len() + out.files.len(), args.out.display());
    Ok(())
}
