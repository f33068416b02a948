use std::process::ExitCode;

use clap::{Parser, Subcommand};

use dvr_qchem::cli::{self, OutputFormat};
use dvr_qchem::Error;

/// DVR-based electronic structure for one-dimensional chains:
/// Hartree-Fock, CASCI (determinant and spin-chain routes), and DMRG.
#[derive(Parser)]
#[command(name = "dvr-qchem", version, about)]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the pipeline described by a JSON config.
    Run {
        /// Path to the JSON run config.
        #[arg(long)]
        config: std::path::PathBuf,
        /// Comma-separated subset of hf,casci,jwci,dmrg; or "all" / "none".
        #[arg(long, default_value = "all")]
        methods: String,
        /// Write the report here instead of the config's output path/stdout.
        #[arg(long)]
        out: Option<std::path::PathBuf>,
        /// Override the config's output format.
        #[arg(long, value_enum)]
        format: Option<Format>,
        /// Run DMRG concurrently with the orbital-based methods.
        #[arg(long)]
        parallel: bool,
    },
    /// Run the built-in cross-method oracle checks.
    Selftest,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum Format {
    Table,
    Json,
    Csv,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Table => OutputFormat::Table,
            Format::Json => OutputFormat::Json,
            Format::Csv => OutputFormat::Csv,
        }
    }
}

fn main() -> ExitCode {
    match Args::parse().command {
        Command::Run {
            config,
            methods,
            out,
            format,
            parallel,
        } => run_command(&config, &methods, out.as_deref(), format, parallel),
        Command::Selftest => {
            if cli::selftest() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(4)
            }
        }
    }
}

fn run_command(
    config_path: &std::path::Path,
    methods: &str,
    out: Option<&std::path::Path>,
    format: Option<Format>,
    parallel: bool,
) -> ExitCode {
    let config = match cli::load_config(config_path) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("config error: {e}");
            return ExitCode::from(2);
        }
    };
    let methods = match cli::parse_methods(methods) {
        Ok(m) => m,
        Err(e) => {
            eprintln!("config error: {e}");
            return ExitCode::from(2);
        }
    };

    let (report, errors) = if parallel {
        cli::run_parallel(&config, &methods)
    } else {
        cli::run(&config, &methods)
    };
    let format = format.map(OutputFormat::from).unwrap_or(config.output.format);
    let rendered = cli::render(&report, format);

    let target = out
        .map(|p| p.to_path_buf())
        .or_else(|| config.output.path.as_ref().map(std::path::PathBuf::from));
    match target {
        Some(path) => {
            if let Err(e) = std::fs::write(&path, &rendered) {
                eprintln!("cannot write {}: {e}", path.display());
                return ExitCode::from(Error::Io(e).exit_code());
            }
        }
        None => print!("{rendered}"),
    }

    for err in &errors {
        eprintln!("[{}] {}", err.method, err.message);
    }
    if errors.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(3)
    }
}
