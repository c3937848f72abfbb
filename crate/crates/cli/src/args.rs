use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "relcoulomb", version, about = "Relativistic Coulomb Green's matrices and bound-state energies")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOptions,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalOptions {
    /// Fine-structure constant [default: 1/137.04]
    #[arg(long, global = true)]
    pub alpha: Option<f64>,
    /// Particle mass in units of the electron mass
    #[arg(long, global = true, default_value_t = 1.0)]
    pub mass: f64,
    /// Sturmian scale parameter
    #[arg(long, global = true, default_value_t = 1.0)]
    pub eta: f64,
    /// Rank of the Green's matrix block
    #[arg(long, global = true, default_value_t = 2)]
    pub rank: usize,
    /// Convergence tolerance of the continued fraction
    #[arg(long, global = true, default_value_t = 1e-15)]
    pub tol: f64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    /// Write output here instead of stdout
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Hydrogen and uranium fine-structure table against the Dirac and Schrödinger energies
    Table1,
    /// Bound-state energies of one channel, or of one spectroscopic level
    Spectrum(SpectrumArgs),
    /// Rank-N Green's matrix at one energy
    Green(GreenArgs),
    /// Sampled Sturmian function
    Basis(BasisArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Equation {
    Dirac,
    Kg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BranchArg {
    Plus,
    Minus,
}

/// Channel selection shared by `spectrum`, `green` and `basis`.
#[derive(Debug, Clone, Args)]
pub struct ChannelArgs {
    /// Nuclear charge
    #[arg(long = "Z", visible_alias = "z", default_value_t = 1.0)]
    pub z: f64,
    #[arg(long, value_enum, default_value_t = Equation::Dirac)]
    pub equation: Equation,
    /// Twice the total angular momentum (Dirac)
    #[arg(long = "two-j", default_value_t = 1)]
    pub two_j: u32,
    /// Sign branch of the second-order Dirac equation
    #[arg(long, value_enum, default_value_t = BranchArg::Plus)]
    pub branch: BranchArg,
    /// Orbital angular momentum (Klein-Gordon)
    #[arg(long, default_value_t = 0)]
    pub l: u32,
}

#[derive(Debug, Clone, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub channel: ChannelArgs,
    /// Binding-energy window `lower:upper` for the blind scan
    #[arg(long, allow_hyphen_values = true, default_value = "-0.6:-0.01")]
    pub window: String,
    /// Number of scan samples
    #[arg(long, default_value_t = 1000)]
    pub points: usize,
    /// Solve a single level such as `2P3/2` instead of scanning
    #[arg(long)]
    pub level: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct GreenArgs {
    #[command(flatten)]
    pub channel: ChannelArgs,
    /// Binding energy E - mc² (Hartree)
    #[arg(long, allow_hyphen_values = true)]
    pub binding: f64,
    /// Imaginary part of the energy
    #[arg(long, allow_hyphen_values = true)]
    pub imag: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct BasisArgs {
    #[command(flatten)]
    pub channel: ChannelArgs,
    /// Radial index of the Sturmian
    #[arg(long, default_value_t = 0)]
    pub n: usize,
    /// Angular parameter; overrides the channel flags
    #[arg(long, allow_hyphen_values = true)]
    pub u: Option<f64>,
    #[arg(long = "r-min", default_value_t = 0.1)]
    pub r_min: f64,
    #[arg(long = "r-max", default_value_t = 20.0)]
    pub r_max: f64,
    #[arg(long, default_value_t = 200)]
    pub points: usize,
    /// Also check biorthogonality of S_0..S_max(n,10) by quadrature
    #[arg(long)]
    pub check: bool,
}
