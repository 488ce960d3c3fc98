//! `wigner-qkd`: batch front end for the security workbench.
//!
//! Subcommands: `analyze` (closed-form report), `scan` (grid over the
//! attack angles, CSV out), `optimize` (global minimum of an attack
//! objective), `simulate` (seeded protocol session plus sifting).
//!
//! Exit codes: 0 success, 2 input error, 3 I/O error, 4 numerical error.

mod input;
mod manifest;

use std::fmt;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use wigner_qkd::{
    export, grid_scan, refine, run_session, security_report, sift, sift_with_transcript,
    AttackObjective, OptimizationResult, ProtocolVariant, SourceModel,
};

use crate::input::{build_simulation, load_attack_file, load_simulate_spec};
use crate::manifest::RunManifest;

#[derive(Debug)]
pub enum CliError {
    Input(String),
    Io { path: PathBuf, source: io::Error },
    Numerical(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Io { .. } => 3,
            CliError::Numerical(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(message) => write!(f, "{message}"),
            CliError::Io { path, source } => write!(f, "{}: {source}", path.display()),
            CliError::Numerical(message) => write!(f, "{message}"),
        }
    }
}

impl From<wigner_qkd::Error> for CliError {
    fn from(error: wigner_qkd::Error) -> Self {
        if error.is_numerical() {
            CliError::Numerical(error.to_string())
        } else {
            CliError::Input(error.to_string())
        }
    }
}

#[derive(Parser)]
#[command(
    name = "wigner-qkd",
    version,
    about = "Wigner-inequality QKD security workbench"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form security report for a source (JSON on stdout)
    Analyze(AnalyzeArgs),
    /// Evaluate an attack objective over [0,π)² and write the grid as CSV
    Scan(ScanArgs),
    /// Locate the global minimum of an attack objective (JSON on stdout)
    Optimize(OptimizeArgs),
    /// Run a seeded protocol session, sift it, and report the estimates
    Simulate(SimulateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SourceArg {
    /// Ideal entangled pair source
    Singlet,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ProtocolArg {
    Original4,
    Extended9,
}

impl From<ProtocolArg> for ProtocolVariant {
    fn from(arg: ProtocolArg) -> Self {
        match arg {
            ProtocolArg::Original4 => ProtocolVariant::Original4,
            ProtocolArg::Extended9 => ProtocolVariant::Extended9,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ObjectiveArg {
    /// Wigner-parameter integrand W_eve
    W,
    /// Modified-parameter integrand W̃_eve
    Wtilde,
    /// Intercept-resend value over Eve's basis
    Ir,
}

impl ObjectiveArg {
    fn objective(self) -> AttackObjective {
        match self {
            ObjectiveArg::W => AttackObjective::W,
            ObjectiveArg::Wtilde => AttackObjective::WTilde,
            ObjectiveArg::Ir => AttackObjective::InterceptResend,
        }
    }

    fn name(self) -> &'static str {
        match self {
            ObjectiveArg::W => "w",
            ObjectiveArg::Wtilde => "wtilde",
            ObjectiveArg::Ir => "ir",
        }
    }
}

#[derive(Args)]
#[command(group = clap::ArgGroup::new("source_spec").required(true).multiple(false))]
struct AnalyzeArgs {
    /// Built-in source
    #[arg(long, value_enum, group = "source_spec")]
    source: Option<SourceArg>,
    /// JSON attack file: array of {phi_a, phi_b, weight}
    #[arg(long, group = "source_spec")]
    attack: Option<PathBuf>,
    /// Which protocol's report layout to produce
    #[arg(long, value_enum, default_value_t = ProtocolArg::Original4)]
    protocol: ProtocolArg,
}

#[derive(Args)]
struct ScanArgs {
    #[arg(long, value_enum)]
    objective: ObjectiveArg,
    /// Nodes per axis over [0,π)
    #[arg(long)]
    resolution: usize,
    /// CSV destination
    #[arg(long, default_value = "scan.csv")]
    output: PathBuf,
}

#[derive(Args)]
struct OptimizeArgs {
    #[arg(long, value_enum)]
    objective: ObjectiveArg,
}

#[derive(Args)]
struct SimulateArgs {
    /// JSON config: protocol parameters plus the source under test
    #[arg(long)]
    config: PathBuf,
    /// Write the sifting result JSON here instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
    /// Export the per-round session records as CSV
    #[arg(long)]
    records: Option<PathBuf>,
    /// Export the sifting transcript as JSON lines
    #[arg(long)]
    transcript: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(error) => {
            eprintln!("error: {error}");
            ExitCode::from(error.exit_code())
        }
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Analyze(args) => cmd_analyze(args),
        Command::Scan(args) => cmd_scan(args),
        Command::Optimize(args) => cmd_optimize(args),
        Command::Simulate(args) => cmd_simulate(args),
    }
}

fn print_json<T: Serialize>(value: &T) -> Result<(), CliError> {
    let json = export::to_json_17sig(value)
        .map_err(|error| CliError::Input(format!("serialization: {error}")))?;
    println!("{json}");
    Ok(())
}

fn cmd_analyze(args: AnalyzeArgs) -> Result<(), CliError> {
    let source = match (&args.source, &args.attack) {
        (Some(SourceArg::Singlet), None) => SourceModel::Singlet,
        (None, Some(path)) => SourceModel::ProductAttack(load_attack_file(path)?),
        _ => unreachable!("clap enforces exactly one of --source/--attack"),
    };
    let report = security_report(&source, args.protocol.into());
    print_json(&report)
}

#[derive(Serialize)]
struct ScanSummary<'a> {
    objective: &'a str,
    resolution: usize,
    output: String,
    phi_a: f64,
    phi_b: f64,
    min_value: f64,
}

fn create_output(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })
}

fn cmd_scan(args: ScanArgs) -> Result<(), CliError> {
    let objective = args.objective.objective();
    let grid = grid_scan(|a, b| objective.eval(a, b), args.resolution)?;

    let mut writer = create_output(&args.output)?;
    export::write_scan_csv(&grid, &mut writer)
        .and_then(|()| writer.flush())
        .map_err(|source| CliError::Io {
            path: args.output.clone(),
            source,
        })?;

    let mut manifest = RunManifest::new(
        "scan",
        None,
        serde_json::json!({
            "objective": args.objective.name(),
            "resolution": args.resolution,
            "output": args.output.display().to_string(),
        }),
    );
    manifest.record_output(&args.output);
    manifest.write_alongside(&args.output)?;

    let (phi_a, phi_b) = grid.min_node();
    print_json(&ScanSummary {
        objective: args.objective.name(),
        resolution: args.resolution,
        output: args.output.display().to_string(),
        phi_a: phi_a.radians(),
        phi_b: phi_b.radians(),
        min_value: grid.min_value(),
    })
}

#[derive(Serialize)]
struct OptimizeSummary<'a> {
    objective: &'a str,
    #[serde(flatten)]
    result: OptimizationResult,
}

fn cmd_optimize(args: OptimizeArgs) -> Result<(), CliError> {
    let objective = args.objective.objective();
    let grid = grid_scan(
        |a, b| objective.eval(a, b),
        wigner_qkd::optimizer::DEFAULT_SCAN_RESOLUTION,
    )?;
    let result = refine(
        |a, b| objective.eval(a, b),
        grid.min_node(),
        wigner_qkd::optimizer::DEFAULT_REFINE_TOLERANCE,
    )?;
    print_json(&OptimizeSummary {
        objective: args.objective.name(),
        result,
    })
}

fn cmd_simulate(args: SimulateArgs) -> Result<(), CliError> {
    let spec = load_simulate_spec(&args.config)?;
    let (config, source) = build_simulation(&spec)?;

    let records = run_session(&config, &source)?;
    let (result, transcript) = if args.transcript.is_some() {
        let (result, transcript) = sift_with_transcript(&records, &config)?;
        (result, Some(transcript))
    } else {
        (sift(&records, &config)?, None)
    };

    let mut manifest = RunManifest::new(
        "simulate",
        Some(config.seed),
        serde_json::json!({
            "config": config,
            "source": match &source {
                SourceModel::Singlet => serde_json::json!("singlet"),
                SourceModel::ProductAttack(distribution) => serde_json::json!(distribution
                    .atoms()
                    .iter()
                    .map(|atom| serde_json::json!({
                        "phi_a": atom.phi_a.radians(),
                        "phi_b": atom.phi_b.radians(),
                        "weight": atom.weight,
                    }))
                    .collect::<Vec<_>>()),
            },
        }),
    );

    if let Some(path) = &args.records {
        let mut writer = create_output(path)?;
        export::write_records_csv(&records, &mut writer)
            .and_then(|()| writer.flush())
            .map_err(|source| CliError::Io {
                path: path.clone(),
                source,
            })?;
        manifest.record_output(path);
    }
    if let Some(path) = &args.transcript {
        let messages = transcript.expect("transcript was produced");
        let mut writer = create_output(path)?;
        export::write_transcript_jsonl(&messages, &mut writer)
            .and_then(|()| writer.flush())
            .map_err(|source| CliError::Io {
                path: path.clone(),
                source,
            })?;
        manifest.record_output(path);
    }

    let result_json = export::to_json_17sig(&result)
        .map_err(|error| CliError::Input(format!("serialization: {error}")))?;
    if let Some(path) = &args.output {
        std::fs::write(path, result_json + "\n").map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        })?;
        manifest.record_output(path);
    } else {
        println!("{result_json}");
    }

    // one manifest per run, anchored at the first file written
    let primary = args
        .output
        .as_ref()
        .or(args.records.as_ref())
        .or(args.transcript.as_ref());
    if let Some(primary) = primary {
        manifest.write_alongside(primary)?;
    }
    Ok(())
}
