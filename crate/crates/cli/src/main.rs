//! `treecut` command-line driver.
//!
//! Exit codes: 0 on success, 1 when a check fails, 2 on usage or input
//! errors.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};

mod commands;
mod config;
mod output;

#[derive(Parser, Debug)]
#[command(name = "treecut", version, about = "Random tree cutting experiments and exact checks")]
#[command(arg_required_else_help = true)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct GlobalOpts {
    /// Base seed; replicate `r` uses stream `r`.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads (default: all cores). Output does not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Output file; a `.manifest.json` is written next to it.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Key-value file presetting flags; explicit flags win.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Sample random trees as tree lines.
    Sample(SampleArgs),
    /// Run a cutting procedure, one CSV row per replicate.
    Cut(CutArgs),
    /// Run the modified Aldous-Broder dynamics.
    Dynamics(DynamicsArgs),
    /// Run the continuous-time cut process.
    Fragment(FragmentArgs),
    /// Contour concatenation of the pieces removed by the cut process.
    Excursion(ExcursionArgs),
    /// Exact small-n check with rational arithmetic.
    Oracle(OracleArgs),
    /// Monte Carlo check against a limit law.
    Verify(VerifyArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Model {
    Cayley,
    Gw,
}

#[derive(Args, Debug)]
pub struct SampleArgs {
    #[arg(long, value_enum, default_value_t = Model::Cayley)]
    pub model: Model,
    /// Offspring law for `--model gw`: poisson1, geom:P, binary:P, table:FILE or table:P0,P1,..
    #[arg(long, default_value = "poisson1")]
    pub law: String,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub count: u64,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum CutMode {
    Planted,
    Ordered,
    Records,
}

#[derive(Args, Debug)]
pub struct CutArgs {
    #[arg(long, value_enum, default_value_t = CutMode::Planted)]
    pub mode: CutMode,
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub count: u64,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum DynamicsEmit {
    Kappa,
    Forest,
    That,
    Roundtrip,
}

#[derive(Args, Debug)]
pub struct DynamicsArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub count: u64,
    #[arg(long, value_enum, default_value_t = DynamicsEmit::Kappa)]
    pub emit: DynamicsEmit,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum FragmentEmit {
    Kappa,
    Trace,
    That,
}

#[derive(Args, Debug)]
pub struct FragmentArgs {
    #[arg(long)]
    pub n: usize,
    /// `cayley` or an offspring law as for `sample`.
    #[arg(long, default_value = "cayley")]
    pub law: String,
    /// `auto` (the law's standard deviation) or a positive number.
    #[arg(long, default_value = "auto")]
    pub sigma: String,
    /// Stop at this time instead of running until the root is cut.
    #[arg(long)]
    pub horizon: Option<f64>,
    #[arg(long, default_value_t = 1)]
    pub count: u64,
    #[arg(long, value_enum, default_value_t = FragmentEmit::Kappa)]
    pub emit: FragmentEmit,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExcursionEmit {
    Path,
    Marks,
}

#[derive(Args, Debug)]
pub struct ExcursionArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value = "cayley")]
    pub law: String,
    #[arg(long, default_value_t = 1)]
    pub count: u64,
    #[arg(long, value_enum, default_value_t = ExcursionEmit::Path)]
    pub emit: ExcursionEmit,
}

#[derive(Args, Debug)]
pub struct OracleArgs {
    /// One of key, forest, reverse, kcoup, records, reorder.
    #[arg(long)]
    pub check: String,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub k: usize,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Claim {
    Kcoup,
    Rayleigh,
    Gw,
    Chik,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    pub claim: Claim,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    #[arg(long, default_value_t = 1000)]
    pub count: u64,
    /// Offspring law for `--claim gw`.
    #[arg(long, default_value = "geom:1/2")]
    pub law: String,
}

/// What a successful run reports.
pub enum Status {
    Ok,
    CheckFailed,
}

fn main() -> ExitCode {
    let raw: Vec<String> = std::env::args().collect();
    let argv = match config::merge(&raw, &Cli::command()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if let Some(t) = cli.global.threads {
        if t == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match commands::run(&cli, &raw, &argv) {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::CheckFailed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
