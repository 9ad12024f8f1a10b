use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "mginf",
    version,
    about = "M|G|infinity busy-period analytics for a four-parameter service-time family"
)]
pub struct Cli {
    #[command(subcommand)]
    pub cmd: Cmd,
}

#[derive(Subcommand)]
pub enum Cmd {
    /// Run the analytic identity battery at one parameter point (or over the
    /// default 500-point grid with --grid) and report each check as JSON
    Validate(ValidateArgs),
    /// Evaluate cdf/pdf/survival on a t-list, or the quantile on a u-list (CSV)
    Eval(EvalArgs),
    /// Compute E[T^n] by the chosen method with its error bound (JSON)
    Moments(MomentsArgs),
    /// Peakedness report and renewal-function curves (JSON report, CSV curve)
    Busy(BusyArgs),
    /// Seeded Monte Carlo campaign with pass/fail verdicts against the
    /// analytic targets (JSON report, CSV renewal comparison)
    Simulate(SimulateArgs),
    /// Cartesian parameter sweep driven by a JSON config file (CSV)
    Sweep(SweepArgs),
}

/// Flags shared by every subcommand. Values given here override the config
/// file; `beta` wins over `beta-fraction` when both are present.
#[derive(Args, Debug, Clone)]
pub struct CommonArgs {
    /// Arrival rate lambda (> 0)
    #[arg(long, allow_negative_numbers = true)]
    pub lambda: Option<f64>,

    /// Traffic intensity rho = lambda * mean service time (> 0)
    #[arg(long, allow_negative_numbers = true)]
    pub rho: Option<f64>,

    /// Mixing parameter p in [0, 1); defaults to 0
    #[arg(long, allow_negative_numbers = true)]
    pub p: Option<f64>,

    /// Riccati constant beta in [-lambda, beta_max]; defaults to 0
    #[arg(long, allow_negative_numbers = true)]
    pub beta: Option<f64>,

    /// beta as a fraction of the admissible interval [-lambda, beta_max]
    #[arg(long, conflicts_with = "beta")]
    pub beta_fraction: Option<f64>,

    /// UTF-8 JSON config file; flags override its values
    #[arg(long)]
    pub config: Option<PathBuf>,

    /// Write the payload to this file instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Payload format; each subcommand has a natural default (reports are
    /// JSON, tables are CSV) and rejects formats it cannot produce
    #[arg(long, value_enum)]
    pub format: Option<Format>,

    /// RNG master seed (simulation commands); defaults to 42
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

impl CommonArgs {
    /// The resolved format when a command supports only one.
    pub fn fixed_format(&self, only: Format, command: &str) -> Result<Format, crate::UsageError> {
        match self.format {
            None => Ok(only),
            Some(f) if f == only => Ok(only),
            Some(_) => Err(crate::UsageError(format!(
                "{command} emits {} only",
                match only {
                    Format::Json => "json",
                    Format::Csv => "csv",
                }
            ))),
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Series,
    Grid,
    Quadrature,
    Bounds,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum OriginArg {
    BusyStart,
    IdleStart,
}

#[derive(Args)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub common: CommonArgs,

    /// Sweep the identity battery over the default 500-point parameter grid
    /// instead of a single point
    #[arg(long)]
    pub grid: bool,
}

#[derive(Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub common: CommonArgs,

    /// Comma-separated times; emits CSV columns t,cdf,pdf,survival
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub t: Option<Vec<f64>>,

    /// Comma-separated probabilities; emits CSV columns u,quantile
    #[arg(long, value_delimiter = ',', conflicts_with = "t")]
    pub u: Option<Vec<f64>>,
}

#[derive(Args)]
pub struct MomentsArgs {
    #[command(flatten)]
    pub common: CommonArgs,

    /// Moment order (>= 1)
    #[arg(long, default_value_t = 1)]
    pub n: u32,

    /// Estimation route
    #[arg(long, value_enum, default_value_t = MethodArg::Quadrature)]
    pub method: MethodArg,

    /// Absolute tolerance for the series route
    #[arg(long, default_value_t = 1e-8)]
    pub eps: f64,

    /// Grid density for the grid route (points per unit time)
    #[arg(long, default_value_t = 64)]
    pub m: u32,

    /// Survival mass below which the grid sum is truncated
    #[arg(long, default_value_t = 1e-9)]
    pub tail_tol: f64,
}

#[derive(Args)]
pub struct BusyArgs {
    #[command(flatten)]
    pub common: CommonArgs,

    /// Largest time on the renewal curve grid
    #[arg(long, default_value_t = 20.0)]
    pub t_max: f64,

    /// Number of renewal curve grid points
    #[arg(long, default_value_t = 50)]
    pub points: usize,
}

#[derive(Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub common: CommonArgs,

    /// Busy cycles per replication
    #[arg(long)]
    pub cycles: Option<usize>,

    /// Independent replications (each owns a derived RNG stream)
    #[arg(long)]
    pub replications: Option<usize>,

    /// Origin convention for the empirical renewal curve
    #[arg(long, value_enum)]
    pub renewal_origin: Option<OriginArg>,

    /// Request the empirical renewal curve up to this time
    #[arg(long)]
    pub t_max: Option<f64>,

    /// Renewal curve grid points
    #[arg(long)]
    pub points: Option<usize>,

    /// Worker threads for replications (0 = library default). The output is
    /// bit-identical for any setting
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
}

#[derive(Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: CommonArgs,
}
