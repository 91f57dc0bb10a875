use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use eit_cli::scenario::{OutputFormat, Scenario};
use eit_cli::{presets, runner, verify, CliError};

#[derive(Parser)]
#[command(
    name = "eit",
    version,
    about = "Transparency-window spectra for coupled oscillators and RLC loops"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate a sweep and write the spectrum, dip report, and run metadata
    Run(RunArgs),
    /// Recompute every preset through its independent routes and compare
    Verify,
}

#[derive(Args)]
struct RunArgs {
    /// Scenario JSON file (alternative to --preset)
    scenario: Option<PathBuf>,
    /// Built-in preset name
    #[arg(long, conflicts_with = "scenario")]
    preset: Option<String>,
    /// Output directory (default: scenario's output.dir, else ".")
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the sweep's point count
    #[arg(long)]
    points: Option<usize>,
    /// Override the dip-detection prominence threshold
    #[arg(long)]
    prominence: Option<f64>,
    /// Spectrum file format
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let ok = matches!(
                e.kind(),
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion
            );
            let _ = e.print();
            return if ok { ExitCode::SUCCESS } else { ExitCode::from(1) };
        }
    };
    let result = match cli.cmd {
        Cmd::Run(args) => run_cmd(args),
        Cmd::Verify => verify_cmd(),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run_cmd(args: RunArgs) -> Result<(), CliError> {
    let (scenario, name) = match (&args.scenario, &args.preset) {
        (Some(path), None) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            let stem = path
                .file_stem()
                .and_then(|s| s.to_str())
                .unwrap_or("scenario")
                .to_string();
            (Scenario::from_json(&text)?, stem)
        }
        (None, Some(p)) => {
            let preset = presets::find(p).ok_or_else(|| {
                CliError::Invalid(format!(
                    "unknown preset '{p}'; available: {}",
                    presets::names().join(", ")
                ))
            })?;
            (preset.scenario, p.clone())
        }
        (None, None) => {
            return Err(CliError::Invalid(
                "provide a scenario file or --preset".into(),
            ))
        }
        (Some(_), Some(_)) => unreachable!("rejected by clap"),
    };

    let out_dir = args
        .out
        .or_else(|| scenario.output.as_ref().and_then(|o| o.dir.clone()))
        .unwrap_or_else(|| PathBuf::from("."));
    let format = args
        .format
        .or_else(|| scenario.output.as_ref().and_then(|o| o.format))
        .unwrap_or(OutputFormat::Csv);

    let outcome = runner::execute(
        &scenario,
        &name,
        &out_dir,
        format,
        args.points,
        args.prominence,
    )?;

    println!(
        "{name}: {} points, classification {}",
        outcome.points,
        outcome.report.classification.label()
    );
    for d in &outcome.report.dips {
        println!(
            "  dip at omega = {} (depth {:.4}, fwhm {:.6e})",
            d.omega, d.depth, d.fwhm
        );
    }
    for w in &outcome.report.warnings {
        println!("  warning: {w}");
    }
    println!("artifacts:");
    for p in [
        &outcome.artifacts.spectrum,
        &outcome.artifacts.report,
        &outcome.artifacts.metadata,
    ] {
        println!("  {}", p.display());
    }
    Ok(())
}

fn verify_cmd() -> Result<(), CliError> {
    let rows = verify::run_verify()?;
    print!("{}", verify::render_table(&rows));
    if rows.iter().any(|r| !r.passed()) {
        return Err(CliError::Numerical(
            "oracle matrix disagreement, see table above".into(),
        ));
    }
    Ok(())
}
