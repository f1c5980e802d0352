mod args;
mod commands;
mod error;
mod output;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;
use serde_json::Value;

use args::{Cli, Command, Format, OutputArgs};
use error::CliError;
use output::{sidecar_path, write_report, Report};

const THREADS_VAR: &str = "CURVESCAT_THREADS";

fn init_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Config(format!("{THREADS_VAR} must be a positive integer, got '{raw}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(format!("cannot size the thread pool: {e}")))
}

fn default_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Xsec(_) => "xsec",
        Command::Scan(_) => "scan",
        Command::PhaseTable(_) => "phase-table",
        Command::Trajectory(_) => "trajectory",
        Command::Compare(_) => "compare",
        Command::Rerun(_) => "rerun",
    }
}

fn output_args(cmd: &mut Command) -> Option<&mut OutputArgs> {
    match cmd {
        Command::Xsec(a) => Some(&mut a.output),
        Command::Scan(a) => Some(&mut a.output),
        Command::PhaseTable(a) => Some(&mut a.output),
        Command::Trajectory(a) => Some(&mut a.output),
        Command::Compare(a) => Some(&mut a.output),
        Command::Rerun(_) => None,
    }
}

fn compute(cmd: &Command) -> Result<Report, CliError> {
    match cmd {
        Command::Xsec(a) => commands::xsec(a),
        Command::Scan(a) => commands::scan(a),
        Command::PhaseTable(a) => commands::phase_table_cmd(a),
        Command::Trajectory(a) => commands::trajectory(a),
        Command::Compare(a) => commands::compare(a),
        Command::Rerun(_) => unreachable!("rerun is resolved before computing"),
    }
}

/// Reads the recorded command back, pointing it at `out` or at the
/// recorded data file beside the sidecar.
fn load_sidecar(path: &Path, out: Option<PathBuf>) -> Result<Command, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let meta: Value =
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let mut cmd: Command = serde_json::from_value(meta["command"].clone())
        .map_err(|e| CliError::Config(format!("{}: no usable command record: {e}", path.display())))?;
    let recorded = meta["data_file"].as_str().map(|name| path.with_file_name(name));
    if let Some(o) = output_args(&mut cmd) {
        o.out = out.or(recorded);
    }
    Ok(cmd)
}

fn run(cli: Cli) -> Result<(), CliError> {
    init_threads()?;
    let mut cmd = match cli.command {
        Command::Rerun(r) => load_sidecar(&r.sidecar, r.out)?,
        c => c,
    };
    let name = default_name(&cmd);
    let report = compute(&cmd)?;
    let out = output_args(&mut cmd).expect("runnable command has output args");
    let ext = match out.format {
        Format::Csv => "csv",
        Format::Json => "json",
    };
    let path = out.out.clone().unwrap_or_else(|| PathBuf::from(format!("{name}.{ext}")));
    // the record names the data file relative to the sidecar
    out.out = path.file_name().map(PathBuf::from);
    let format = out.format;
    let record = serde_json::to_value(&cmd).expect("commands serialise");
    let side = write_report(&report, &path, format, record)?;
    debug_assert_eq!(side, sidecar_path(&path));
    for line in &report.summary {
        println!("{line}");
    }
    println!("wrote {} ({} rows) and {}", path.display(), report.table.rows(), side.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("curvescat: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
