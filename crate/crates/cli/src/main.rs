use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qrunes_cli::Outcome;

#[derive(Parser)]
#[command(name = "qrunes", version, about = "QRunes compiler, simulator and language server")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Report diagnostics for a source file
    Check {
        file: PathBuf,
        /// One line per diagnostic instead of JSON
        #[arg(long)]
        pretty: bool,
    },
    /// Emit host-language sources
    Compile {
        file: PathBuf,
        #[arg(long)]
        target: Option<String>,
        /// Output directory (defaults to the source's directory)
        #[arg(short, long)]
        out_dir: Option<PathBuf>,
        /// Run config naming the entry and its arguments
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Simulate the entry named in a run config
    Run {
        file: PathBuf,
        #[arg(long)]
        config: PathBuf,
        /// Histogram as text bars instead of JSON
        #[arg(long)]
        pretty: bool,
    },
    /// List code generation targets
    Targets,
    /// Serve the language server protocol over stdio
    Lsp,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Check { file, pretty } => qrunes_cli::check(&file, pretty),
        Command::Compile {
            file,
            target,
            out_dir,
            config,
        } => qrunes_cli::compile(&file, target.as_deref(), out_dir.as_deref(), config.as_deref()),
        Command::Run { file, config, pretty } => qrunes_cli::run(&file, &config, pretty),
        Command::Targets => qrunes_cli::targets(),
        Command::Lsp => match qrunes_lsp::run_stdio() {
            Ok(()) => Outcome {
                code: 0,
                stdout: String::new(),
                stderr: String::new(),
            },
            Err(e) => Outcome {
                code: 2,
                stdout: String::new(),
                stderr: format!("qrunes lsp: {e}\n"),
            },
        },
    };
    let _ = std::io::stdout().write_all(outcome.stdout.as_bytes());
    let _ = std::io::stderr().write_all(outcome.stderr.as_bytes());
    ExitCode::from(outcome.code as u8)
}
