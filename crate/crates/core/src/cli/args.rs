use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "compton-ledger",
    version,
    about = "Check order-of-magnitude relations, gamma-matrix algebra and a particle-creation cosmology"
)]
pub struct Cli {
    /// Constants file; the embedded defaults are used when neither this nor
    /// the environment variable is set.
    #[arg(
        long,
        global = true,
        env = "COMPTON_LEDGER_CONSTANTS",
        value_name = "PATH"
    )]
    pub constants: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,

    /// Write output here instead of standard output.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate the relation registry.
    Check(CheckArgs),
    /// Integrate the particle-creation law.
    Simulate(SimulateArgs),
    /// Run the matrix-algebra suites.
    Algebra(AlgebraArgs),
    /// Print the loaded constants table.
    Constants,
    /// Relations, algebra and a short deterministic run in one document.
    Report,
    /// Potential table and particle-sector values.
    Particles(ParticlesArgs),
}

#[derive(Debug, Args, Default)]
pub struct CheckArgs {
    /// Only these relation ids.
    #[arg(long, value_delimiter = ',', value_name = "ID[,ID...]")]
    pub rel: Vec<String>,

    /// Tolerance overrides in decades.
    #[arg(long, value_delimiter = ',', value_name = "ID=REAL[,...]")]
    pub tol: Vec<String>,

    /// Check relations from this file instead of the built-in registry.
    #[arg(long, value_name = "PATH")]
    pub relations: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Number of integration steps (accepts forms like 1e4).
    #[arg(long, conflicts_with = "t_end")]
    pub steps: Option<String>,

    /// Step size in seconds, or a multiple of the Compton time with `tau`.
    #[arg(long, default_value = "0.1tau", value_name = "VALUE[tau]")]
    pub dt: String,

    #[arg(long, value_name = "VALUE[tau]")]
    pub t_end: Option<String>,

    #[arg(long, value_enum, default_value_t = ModeArg::Deterministic)]
    pub mode: ModeArg,

    #[arg(long, default_value_t = 1)]
    pub ensemble: usize,

    #[arg(long)]
    pub seed: Option<u64>,

    /// Record every Nth step.
    #[arg(long, default_value_t = 1)]
    pub stride: usize,

    #[arg(long, default_value_t = 1.0)]
    pub n0: f64,

    #[arg(long, value_enum, default_value_t = ClockArg::Pion)]
    pub clock: ClockArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Deterministic,
    Stochastic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ClockArg {
    Pion,
    Planck,
}

#[derive(Debug, Args)]
pub struct AlgebraArgs {
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "clifford,onshell,snyder",
        value_name = "NAME[,NAME]"
    )]
    pub suite: Vec<String>,

    #[arg(long, default_value_t = 1000)]
    pub trials: usize,

    #[arg(long, default_value_t = 7)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct ParticlesArgs {
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,

    /// Confining coefficient in units of the pion mass squared.
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,

    /// Smallest radius, in units of the pion Compton wavelength.
    #[arg(long, default_value_t = 0.1)]
    pub r_min: f64,

    #[arg(long, default_value_t = 10.0)]
    pub r_max: f64,

    #[arg(long, default_value_t = 25)]
    pub points: usize,
}
