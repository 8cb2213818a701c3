//! `extremal` — command-line front end for the exact-arithmetic toolkit.
//!
//! Inputs come from flags, an optional TOML/JSON config file (flags win),
//! or both. Reports print to stdout as JSON (default), CSV, or text; plot
//! data lands as CSV files in the output directory when one is configured.
//! Exit status: 0 on success, 2 on invalid input, 3 on a violated internal
//! invariant.

mod commands;
mod config;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use extremal::rat::Rat;

use crate::config::FileConfig;
use crate::report::{CliError, Ctx, OutputFormat};

/// Exact analysis of extremal momentum profiles on fibre bundles:
/// regime classification, angle thresholds, profile splits, properness
/// constants, energy degeneration demos, and the one-factor case study.
#[derive(Parser)]
#[command(name = "extremal", version)]
struct Cli {
    /// Config file (TOML, or JSON such as a previously emitted report);
    /// flags override file values.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Stdout format.
    #[arg(long, global = true, value_enum)]
    format: Option<OutputFormat>,
    /// Directory for plot-data CSV files (default: $EXTREMAL_OUT_DIR).
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Recorded in the report and otherwise unused: every computation is
    /// deterministic.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Decide the energy regime of a class.
    Classify(ClassArgs),
    /// Build the extremal polynomial and its angle decomposition.
    ExtremalPoly(ExtremalPolyArgs),
    /// Search for the minimal positive cone parameter of a factor set.
    Threshold(ThresholdArgs),
    /// Split the profile at its interior roots and label every end.
    Split(ClassArgs),
    /// Certified properness constant (existence regime only).
    Delta(ClassArgs),
    /// Run an energy degeneration sequence.
    EnergyDemo(EnergyDemoArgs),
    /// Sweep the one-factor family across its phase boundary at kappa = 1.
    TfSweep(TfSweepArgs),
    /// Enclose the phase-boundary parameter x_s of the one-factor family.
    TfXs(TfXsArgs),
}

#[derive(Args, Default)]
pub struct ClassArgs {
    /// Base factor `d=<int>,s=<rat>,x=<rat>`; repeat for several factors.
    #[arg(long = "factor", value_name = "SPEC")]
    pub factors: Vec<String>,
    /// Cone parameter kappa, as `num/den` or an integer.
    #[arg(long, allow_hyphen_values = true)]
    pub kappa: Option<Rat>,
}

#[derive(Args, Default)]
pub struct ExtremalPolyArgs {
    #[command(flatten)]
    pub class: ClassArgs,
    /// Number of profile sample points for the plot CSV (>= 2).
    #[arg(long)]
    pub grid: Option<usize>,
}

#[derive(Args, Default)]
pub struct ThresholdArgs {
    /// Base factor `d=<int>,s=<rat>,x=<rat>`; repeat for several factors.
    #[arg(long = "factor", value_name = "SPEC")]
    pub factors: Vec<String>,
    /// Width of the returned threshold enclosure.
    #[arg(long)]
    pub width: Option<Rat>,
}

/// Which degeneration sequence `energy-demo` runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum DemoKind {
    /// Linear growth of the linear functional on convex bump potentials
    /// (existence regime).
    Growth,
    /// Properness breaker on the built-in double-root fixture.
    Breaker,
    /// Calabi-energy minimizing sequence on the built-in fixture.
    Calabi,
    /// Decreasing energy ray along a certified negative direction
    /// (unbounded regime).
    Unbounded,
}

#[derive(Args, Default)]
pub struct EnergyDemoArgs {
    #[command(flatten)]
    pub class: ClassArgs,
    /// Which sequence to run.
    #[arg(long, value_enum)]
    pub demo: Option<DemoKind>,
    /// Ladder length; indices double from row to row.
    #[arg(long)]
    pub steps: Option<u32>,
    /// Bump center for the growth demo (rational in (-1, 1)).
    #[arg(long, allow_hyphen_values = true)]
    pub center: Option<Rat>,
    /// Direction amplitude for the unbounded demo.
    #[arg(long)]
    pub amplitude: Option<Rat>,
}

#[derive(Args, Default)]
pub struct TfSweepArgs {
    /// Base curvature parameter s (negative rational).
    #[arg(long, allow_hyphen_values = true)]
    pub s: Option<Rat>,
    /// Number of interior sample points (sweep rows).
    #[arg(long)]
    pub grid: Option<usize>,
    /// Width of the phase-boundary enclosure.
    #[arg(long)]
    pub width: Option<Rat>,
}

#[derive(Args, Default)]
pub struct TfXsArgs {
    /// Base curvature parameter s (negative rational).
    #[arg(long, allow_hyphen_values = true)]
    pub s: Option<Rat>,
    /// Width of the returned enclosure.
    #[arg(long)]
    pub width: Option<Rat>,
}

fn dispatch(cmd: Command, file: &FileConfig, ctx: &Ctx) -> Result<report::Output, CliError> {
    match cmd {
        Command::Classify(a) => commands::classify_cmd(&a, file, ctx),
        Command::ExtremalPoly(a) => commands::extremal_poly_cmd(&a, file, ctx),
        Command::Threshold(a) => commands::threshold_cmd(&a, file, ctx),
        Command::Split(a) => commands::split_cmd(&a, file, ctx),
        Command::Delta(a) => commands::delta_cmd(&a, file, ctx),
        Command::EnergyDemo(a) => commands::energy_demo_cmd(&a, file, ctx),
        Command::TfSweep(a) => commands::tf_sweep_cmd(&a, file, ctx),
        Command::TfXs(a) => commands::tf_xs_cmd(&a, file, ctx),
    }
}

fn dispatch_named(name: &str, file: &FileConfig, ctx: &Ctx) -> Result<report::Output, CliError> {
    match name {
        "classify" => commands::classify_cmd(&ClassArgs::default(), file, ctx),
        "extremal-poly" => commands::extremal_poly_cmd(&ExtremalPolyArgs::default(), file, ctx),
        "threshold" => commands::threshold_cmd(&ThresholdArgs::default(), file, ctx),
        "split" => commands::split_cmd(&ClassArgs::default(), file, ctx),
        "delta" => commands::delta_cmd(&ClassArgs::default(), file, ctx),
        "energy-demo" => commands::energy_demo_cmd(&EnergyDemoArgs::default(), file, ctx),
        "tf-sweep" => commands::tf_sweep_cmd(&TfSweepArgs::default(), file, ctx),
        "tf-xs" => commands::tf_xs_cmd(&TfXsArgs::default(), file, ctx),
        other => Err(CliError::Input(format!("unknown command {other:?}"))),
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let file = match &cli.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    let format = match (cli.format, file.format.as_deref()) {
        (Some(f), _) => f,
        (None, Some(s)) => <OutputFormat as clap::ValueEnum>::from_str(s, true)
            .map_err(|e| CliError::Input(format!("format: {e}")))?,
        (None, None) => OutputFormat::Json,
    };
    let out_dir = cli
        .out
        .clone()
        .or_else(|| file.out.clone())
        .or_else(|| std::env::var_os("EXTREMAL_OUT_DIR").map(PathBuf::from));
    let seed = cli.seed.or(file.seed);
    let quad = file.quadrature.unwrap_or_default().into();
    let ctx = Ctx {
        format,
        out_dir,
        seed,
        quad,
    };
    let output = match cli.command {
        Some(cmd) => dispatch(cmd, &file, &ctx)?,
        None => match file.command.as_deref() {
            Some(name) => dispatch_named(name, &file, &ctx)?,
            None => {
                return Err(CliError::Input(
                    "no command given: pass a subcommand or a config file with a `command` key"
                        .into(),
                ))
            }
        },
    };
    println!("{}", output.stdout);
    if let Some(dir) = &ctx.out_dir {
        for (name, rows) in &output.plots {
            report::write_plot(dir, name, rows)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
