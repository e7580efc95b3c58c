use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use modcomp::{run, RunConfig};
use modcomp_core::Mode;

/// Irreducible components of genus-0 stable map and quasimap spaces to a
/// smooth projective toric variety.
///
/// Set MODCOMP_THREADS to cap the number of worker threads.
#[derive(Parser, Debug)]
#[command(name = "modcomp", version)]
struct Args {
    /// Fan file (`.toml` for TOML, JSON otherwise).
    #[arg(long)]
    fan: PathBuf,
    /// Curve class: comma-separated coordinates (e.g. `2,0`) or named classes (e.g. `2s+2e`).
    #[arg(long, allow_hyphen_values = true)]
    beta: String,
    #[arg(long, default_value_t = 0)]
    marks: usize,
    #[arg(long, default_value_t = Mode::Maps)]
    mode: Mode,
    /// Write the JSON report here (`-` for standard output).
    #[arg(long)]
    json: Option<PathBuf>,
    /// Write one DOT file per tree and `poset.dot` into this directory.
    #[arg(long)]
    dot: Option<PathBuf>,
    /// Print the table (default).
    #[arg(long, overrides_with = "no_table")]
    table: bool,
    #[arg(long, overrides_with = "table")]
    no_table: bool,
    /// Override the bound on the number of nonzero vertices.
    #[arg(long)]
    max_parts: Option<usize>,
    /// Irreducible curve classes to use instead of the built-in or fan-file list.
    #[arg(long)]
    classes: Option<PathBuf>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let mut config = RunConfig::new(args.fan, args.beta, args.marks, args.mode);
    config.table = !args.no_table;
    config.json = args.json;
    config.dot_dir = args.dot;
    config.max_parts = args.max_parts;
    config.classes = args.classes;

    let stdout = io::stdout();
    let mut out = stdout.lock();
    match run(&config, &mut out) {
        Ok(outcome) => {
            let _ = out.flush();
            if outcome.report.irreducible_classes == "unknown" {
                eprintln!("warning: irreducible classes unknown for this fan; every effective class was allowed");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            let _ = out.flush();
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
