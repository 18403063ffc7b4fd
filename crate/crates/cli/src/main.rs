mod commands;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::CliError;

/// Simulate dynamic networks, compute monitoring statistics and run
/// control-chart experiments.
#[derive(Debug, Parser)]
#[command(name = "netmon", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a dynamic network and write it as an edge list.
    Generate(GenerateArgs),
    /// Compute statistic series from an edge list.
    Stats(StatsArgs),
    /// Apply a control chart to a statistic series.
    Monitor(MonitorArgs),
    /// Calibrate the control-limit multiplier on null replicates.
    Calibrate(CalibrateArgs),
    /// Run every scenario in a file and write results, summaries and calibrations.
    Run(RunArgs),
    /// Pivot a run summary into a scenario-by-statistic table.
    Report(ReportArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModelArg {
    Dlsm,
    Ddcsbm,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum KindArg {
    Binary,
    Count,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum GridArg {
    /// The density grid if it has the target, otherwise the fixed-density sweep.
    Auto,
    Density,
    PhiSweep,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum PriorArg {
    Var1,
    RandomWalk,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FamilyArg {
    OddsRatio,
    DegreeParam,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ProfileArg {
    Sustained,
    Gradual,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StatArg {
    Density,
    MaxDegree,
    Diff,
    Sum,
    Scan,
    All,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum EstimatorArg {
    Amr,
    Mmr,
    CorrSd,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum TableArg {
    Dr,
    Auc,
    Far,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// Generate replicate `--replicate` of a scenario instead of using the model flags.
    #[arg(long, conflicts_with_all = [
        "model", "kind", "phi", "density", "grid", "a_scale", "n", "len", "t1", "prior", "seed", "anomaly",
    ])]
    pub scenario: Option<PathBuf>,
    /// Scenario id; defaults to the first scenario in the file.
    #[arg(long, requires = "scenario")]
    pub id: Option<String>,
    /// Replicate index within the scenario (seed = base_seed + replicate).
    #[arg(long, requires = "scenario", default_value_t = 0)]
    pub replicate: usize,

    /// Generator family.
    #[arg(long, value_enum, required_unless_present = "scenario")]
    pub model: Option<ModelArg>,
    /// Binary edges or Poisson counts.
    #[arg(long, value_enum, required_unless_present = "scenario")]
    pub kind: Option<KindArg>,
    /// Temporal correlation of the latent process.
    #[arg(long, allow_negative_numbers = true, required_unless_present = "scenario")]
    pub phi: Option<f64>,
    /// Target expected density.
    #[arg(long, required_unless_present = "scenario")]
    pub density: Option<f64>,
    /// Which table of scaling constants to read the target from.
    #[arg(long, value_enum, default_value = "auto")]
    pub grid: GridArg,
    /// Overrides the catalog scaling constant.
    #[arg(long)]
    pub a_scale: Option<f64>,
    /// Number of nodes.
    #[arg(long, default_value_t = 100)]
    pub n: usize,
    /// Number of snapshots.
    #[arg(long = "len", visible_alias = "T", default_value_t = 110)]
    pub len: usize,
    /// Phase I cutoff recorded in the output header.
    #[arg(long, default_value_t = 50)]
    pub t1: usize,
    /// Latent prior (latent space model only).
    #[arg(long, value_enum)]
    pub prior: Option<PriorArg>,
    /// Overridden by NETMON_SEED.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Plant an anomaly on nodes `0..affected`.
    #[arg(long, value_enum, requires_all = ["affected", "magnitude"])]
    pub anomaly: Option<FamilyArg>,
    /// Sustained shift, or a linear ramp over the window.
    #[arg(long, value_enum, default_value = "sustained")]
    pub profile: ProfileArg,
    /// Number of affected nodes.
    #[arg(long)]
    pub affected: Option<usize>,
    /// First anomalous time.
    #[arg(long, default_value_t = 61)]
    pub t_start: usize,
    /// Number of anomalous snapshots.
    #[arg(long, default_value_t = 10)]
    pub cpl: usize,
    /// Odds ratio, propensity multiplier or new radius, depending on family and model.
    #[arg(long)]
    pub magnitude: Option<f64>,

    /// Catalog of scaling constants; defaults to the bundled one.
    #[arg(long)]
    pub catalog: Option<PathBuf>,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    /// Edge-list file.
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Statistic to compute.
    #[arg(long, value_enum, default_value = "all")]
    pub stat: StatArg,
    /// Scan window.
    #[arg(long, default_value_t = 20)]
    pub m: usize,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MonitorArgs {
    /// Edge list, or a statistics CSV written by `stats`.
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Statistic to monitor; may be omitted when the CSV holds a single one.
    #[arg(long, value_enum)]
    pub stat: Option<StatArg>,
    /// Phase I sigma estimator.
    #[arg(long, value_enum, default_value = "corr-sd")]
    pub estimator: EstimatorArg,
    /// Control-limit multiplier.
    #[arg(
        long,
        allow_negative_numbers = true,
        required_unless_present = "p",
        conflicts_with = "p"
    )]
    pub q: Option<f64>,
    /// Nominal false-alarm rate; `q` is the matching normal quantile.
    #[arg(long)]
    pub p: Option<f64>,
    /// Phase I cutoff; an edge list supplies its own.
    #[arg(long)]
    pub t1: Option<usize>,
    /// Scan window, when computing the scan from an edge list.
    #[arg(long, default_value_t = 20)]
    pub m: usize,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CalibrateArgs {
    /// Scenario file (TOML).
    #[arg(long)]
    pub scenario: PathBuf,
    /// Scenario id; defaults to every scenario in the file.
    #[arg(long)]
    pub id: Option<String>,
    /// Target false-alarm rate; overrides the scenario.
    #[arg(long)]
    pub p: Option<f64>,
    /// Number of null replicates; overrides the scenario.
    #[arg(long)]
    pub reps: Option<usize>,
    /// Also write the false-alarm rate at every grid `q`, one row per scenario, statistic and `q`.
    #[arg(long)]
    pub curve: Option<PathBuf>,
    /// Catalog of scaling constants; defaults to the bundled one.
    #[arg(long)]
    pub catalog: Option<PathBuf>,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Scenario file (TOML).
    #[arg(long)]
    pub scenarios: PathBuf,
    /// Output directory; created if missing.
    #[arg(long)]
    pub out: PathBuf,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Expand each scenario over the full correlation and density grids.
    #[arg(long)]
    pub full: bool,
    /// Catalog of scaling constants; defaults to the bundled one.
    #[arg(long)]
    pub catalog: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Run directory, or its summary.csv.
    #[arg(long)]
    pub results: PathBuf,
    /// Metric to tabulate.
    #[arg(long, value_enum)]
    pub table: TableArg,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn threads(n: usize) -> Result<(), CliError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Runtime(e.to_string()))
}

fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Run(args) => {
            threads(args.jobs.unwrap_or(0))?;
            commands::run(args)
        }
        other => {
            threads(1)?;
            match other {
                Command::Generate(args) => commands::generate(args),
                Command::Stats(args) => commands::stats(args),
                Command::Monitor(args) => commands::monitor(args),
                Command::Calibrate(args) => commands::calibrate(args),
                Command::Report(args) => commands::report(args),
                Command::Run(_) => unreachable!(),
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => return CliError::Usage(e.render().to_string()).report(),
    };
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => e.report(),
    }
}
