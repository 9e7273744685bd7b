use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "ltr",
    version,
    about = "Transience and recurrence of symmetric Lévy processes and random walks"
)]
pub struct Cli {
    /// Run configuration (TOML, or JSON with a .json extension).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Seed for every random draw [default: 0, or the config's seed].
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Directory for `<command>.json` and `<command>.csv`; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Law as inline JSON, e.g. '{"family":"stable","alpha":0.5}'.
    #[arg(long, global = true)]
    pub law: Option<String>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify a law with every applicable criterion.
    Analyze(AnalyzeArgs),
    /// Verify the dyadic unit flow and the energy-bound chain.
    Flow(FlowArgs),
    /// Effective resistance profile over radii.
    Resistance(ResistanceArgs),
    /// Convergence of δ-binned walks to a continuous law.
    Discretize(DiscretizeArgs),
    /// Monte Carlo sojourn diagnostics.
    Simulate(SimulateArgs),
    /// Canned scenarios with a pass/fail table.
    Demo(DemoArgs),
}

#[derive(Debug, Default, Args)]
pub struct AnalyzeArgs {
    /// Assert that the Lévy measure is unimodal.
    #[arg(long)]
    pub unimodal: bool,
}

#[derive(Debug, Default, Args)]
pub struct FlowArgs {
    /// Window exponent of the exact flow verification.
    #[arg(long)]
    pub i_max: Option<u32>,
    #[arg(long, value_delimiter = ',')]
    pub radii: Option<Vec<u64>>,
}

#[derive(Debug, Default, Args)]
pub struct ResistanceArgs {
    #[arg(long, value_delimiter = ',')]
    pub radii: Option<Vec<u64>>,
    #[arg(long)]
    pub flat_tol: Option<f64>,
}

#[derive(Debug, Default, Args)]
pub struct DiscretizeArgs {
    #[arg(long, value_delimiter = ',')]
    pub deltas: Option<Vec<f64>>,
    /// Test function ids, e.g. bump-1,damped-cos-2,cos-0.5.
    #[arg(long, value_delimiter = ',')]
    pub tests: Option<Vec<String>>,
}

#[derive(Debug, Default, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub replicas: Option<u64>,
    /// Horizon in steps of the random walk.
    #[arg(long, conflicts_with = "time")]
    pub steps: Option<u64>,
    /// Horizon in time for the Poisson-clock walk.
    #[arg(long)]
    pub time: Option<f64>,
    /// Rate of the Poisson clock.
    #[arg(long, default_value_t = 1.0, requires = "time")]
    pub rate: f64,
    /// Half-width of the window.
    #[arg(long)]
    pub window: Option<f64>,
    /// Keep per-replica records in the JSON report.
    #[arg(long)]
    pub records: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DemoName {
    StableSweep,
    MultiIndex,
}

#[derive(Debug, Args)]
pub struct DemoArgs {
    pub name: DemoName,
    /// Even-chain samples per pair in the multi-index demo.
    #[arg(long)]
    pub samples: Option<u64>,
}
