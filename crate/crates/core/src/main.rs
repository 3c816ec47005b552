use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use photon_switch::sweep::{self, Command, Config, OutputFormat, RunError, RunOptions, Table};
use photon_switch::UnitSystem;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Units {
    Paper,
    Si,
}

#[derive(Parser, Debug)]
#[command(name = "photon-switch", version, about = "Flux-controlled single-photon switch in a coupled resonator array")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Key-value or JSON config file
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Write the table here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value = "csv")]
    format: OutputFormat,

    /// How circuit energies in the config are read: angular frequencies (paper) or joules (si)
    #[arg(long, global = true, value_enum, default_value = "paper")]
    units: Units,

    /// Seed for random sampling
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

fn emit(table: &Table, cli: &Cli) -> Result<(), RunError> {
    let text = table.render(cli.format);
    match &cli.out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    if cli.format == OutputFormat::Csv && !table.summary.is_empty() {
        eprint!("{}", table.summary_text());
    }
    Ok(())
}

fn execute(cli: &Cli) -> Result<(), RunError> {
    let cfg = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::empty(),
    };
    let opts = RunOptions {
        units: match cli.units {
            Units::Paper => UnitSystem::Paper,
            Units::Si => UnitSystem::Si,
        },
        seed: cli.seed,
    };
    match sweep::run(cli.command, &cfg, &opts) {
        Ok(table) => emit(&table, cli),
        Err(RunError::Contract { message, table }) => {
            emit(&table, cli)?;
            Err(RunError::Contract { message, table })
        }
        Err(e) => Err(e),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("{}", err.report());
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
