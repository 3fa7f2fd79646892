use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rbfbvp::{FluxExponent, KernelSpec64, Method, DEFAULT_ETA_INFINITY};

#[derive(Parser, Debug)]
#[command(name = "rbfbvp", version, about = "RBF collocation for the porous-medium cone boundary layer")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Solve once with DRBF or IRBF and write the report
    Solve(SolveArgs),
    /// Regenerate a results table or figure data set
    Table(TableArgs),
    /// Sweep the shape parameter and mark the best value
    ScanC(ScanArgs),
    /// Runge-Kutta shooting reference
    Oracle(OracleArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Drbf,
    Irbf,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Drbf => Method::Drbf,
            MethodArg::Irbf => Method::Irbf,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KernelArg {
    Imq,
    Mq,
    Ga,
}

impl KernelArg {
    pub fn default_for(method: MethodArg) -> Self {
        match method {
            MethodArg::Drbf => Self::Imq,
            MethodArg::Irbf => Self::Mq,
        }
    }

    pub fn build(self, c: f64) -> rbfbvp::Result<KernelSpec64> {
        match self {
            Self::Imq => KernelSpec64::imq(c),
            Self::Mq => KernelSpec64::mq(c),
            Self::Ga => KernelSpec64::ga(c),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TableId {
    T3,
    T4,
    T5,
    T6,
    T7,
    Fig2,
    Fig3,
    Fig4,
}

fn parse_lam(s: &str) -> Result<FluxExponent, String> {
    s.parse().map_err(|e: rbfbvp::RbfError| e.to_string())
}

#[derive(Args, Debug, Clone)]
pub struct ProblemArgs {
    /// Heat-flux exponent, exact rational ("1/4") or decimal
    #[arg(long, value_parser = parse_lam)]
    pub lam: FluxExponent,
    /// Truncated domain length
    #[arg(long, default_value_t = DEFAULT_ETA_INFINITY)]
    pub eta_inf: f64,
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    /// Output file; stdout when omitted
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Args, Debug, Clone)]
pub struct SolveArgs {
    #[arg(long, value_enum)]
    pub method: MethodArg,
    #[command(flatten)]
    pub problem: ProblemArgs,
    /// Number of centers
    #[arg(long)]
    pub n: usize,
    /// Shape parameter
    #[arg(long)]
    pub c: f64,
    /// Defaults to imq for drbf and mq for irbf
    #[arg(long, value_enum)]
    pub kernel: Option<KernelArg>,
    #[arg(long, default_value_t = rbfbvp::report::DEFAULT_GRID_POINTS)]
    pub grid_points: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Clone)]
pub struct TableArgs {
    #[arg(value_enum)]
    pub id: TableId,
    #[arg(long, default_value_t = rbfbvp::report::DEFAULT_GRID_POINTS)]
    pub grid_points: usize,
    /// Shooting integration length for the reference column
    #[arg(long, default_value_t = 15.0)]
    pub eta_max: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Clone)]
pub struct ScanArgs {
    #[arg(long, value_enum)]
    pub method: MethodArg,
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub c_min: f64,
    #[arg(long)]
    pub c_max: f64,
    #[arg(long, default_value_t = 21)]
    pub steps: usize,
    #[arg(long, value_enum)]
    pub kernel: Option<KernelArg>,
    #[arg(long, default_value_t = rbfbvp::report::DEFAULT_GRID_POINTS)]
    pub grid_points: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Clone)]
pub struct OracleArgs {
    #[arg(long, value_parser = parse_lam)]
    pub lam: FluxExponent,
    #[arg(long, default_value_t = 15.0)]
    pub eta_max: f64,
    /// Write the trajectory as CSV instead of the JSON summary
    #[arg(long)]
    pub emit_profile: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}
