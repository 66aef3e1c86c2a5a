use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "semistable", version, about = "Semi-stable laws, Levy process sampling and AR(1) checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the functional equation and compare the two exponent evaluators.
    VerifyCf(RunArgs),
    /// Write simulated data as CSV.
    Simulate {
        #[arg(value_enum)]
        what: SimulateKind,
        #[command(flatten)]
        args: RunArgs,
    },
    /// Run statistical checks and write JSON reports.
    Check {
        #[arg(value_enum)]
        which: CheckKind,
        #[command(flatten)]
        args: RunArgs,
    },
    /// Write CSV data for plots of the CF, the SSD factor, a histogram and the modulation trace.
    Plotdata(RunArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SimulateKind {
    Path,
    Ar1,
    Innovation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CheckKind {
    Stationarity,
    Selfsimilar,
    Ssd,
    All,
}

/// Flags shared by every command; each overrides the config file.
#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub b: Option<f64>,
    #[arg(long = "eps-pert")]
    pub eps_pert: Option<f64>,
    #[arg(long)]
    pub c: Option<f64>,
    /// Jump truncation level.
    #[arg(long)]
    pub delta: Option<f64>,
    /// Sample count; its meaning depends on the command.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Frequency grid `min:max:count[:log|lin]`.
    #[arg(long)]
    pub grid: Option<String>,
    /// Time grid `start:end:steps` for `simulate path`.
    #[arg(long)]
    pub times: Option<String>,
    /// Output directory (default: $SEMISTABLE_OUT, then `semistable-out`).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub threads: Option<usize>,
    /// Epoch for the self-similarity check instead of `a`.
    #[arg(long = "epoch-override")]
    pub epoch_override: Option<f64>,
    /// Additional epoch at which `verify-cf` checks the scaling equation.
    #[arg(long = "extra-epoch")]
    pub extra_epoch: Option<f64>,
    /// Base time of the self-similarity check.
    #[arg(long)]
    pub t0: Option<f64>,
    /// Also compare joint laws in the self-similarity check.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub joint: Option<bool>,
    /// Flat TOML config file, or a JSON sidecar from an earlier run.
    #[arg(long)]
    pub config: Option<PathBuf>,
}
