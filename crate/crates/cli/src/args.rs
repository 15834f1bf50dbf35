use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use euler_spectra::spectra::DEFAULT_TOL_REL;
use euler_spectra::{LatticeVector, TruncationKind};
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(name = "euler-spectra", version, about = "Linear stability spectra of truncated 2D Euler shear flows")]
pub struct Cli {
    /// Worker threads for ensemble and convergence sweeps.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Result file; the manifest goes next to it as `<stem>.manifest.json`.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Spectrum of the single class led by `a`.
    Class(ClassArgs),
    /// Every class of the equilibrium `cos(p·x)`.
    Ensemble(EnsembleArgs),
    /// Largest real eigenvalue of one class against the domain size.
    Convergence(ConvergenceArgs),
    /// Histogram of the imaginary parts of one class against the limit density.
    Density(DensityArgs),
    /// Run the acceptance checks.
    Verify(VerifyArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Class(_) => "class",
            Command::Ensemble(_) => "ensemble",
            Command::Convergence(_) => "convergence",
            Command::Density(_) => "density",
            Command::Verify(_) => "verify",
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Galerkin,
    Zeitlin,
}

impl From<Kind> for TruncationKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Galerkin => TruncationKind::Galerkin,
            Kind::Zeitlin => TruncationKind::Zeitlin,
        }
    }
}

fn vector(s: &str) -> Result<LatticeVector, String> {
    s.parse()
}

/// Domain size, given directly or through `ñ`.
#[derive(Args, Debug, Clone, Serialize)]
pub struct Grid {
    /// Domain half-width `N`.
    #[arg(long = "N", conflicts_with = "n_tilde")]
    pub n: Option<i64>,
    /// Reduced size `ñ`; the domain is the admissible `N` it generates.
    #[arg(long = "n-tilde")]
    pub n_tilde: Option<i64>,
    /// Reject Zeitlin domains that no `ñ` generates.
    #[arg(long)]
    pub strict_admissible: bool,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct Physics {
    /// Wave vector of the equilibrium, as `X,Y`.
    #[arg(long, value_parser = vector, allow_hyphen_values = true)]
    pub p: Option<LatticeVector>,
    /// Equilibrium amplitude.
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long, value_enum, default_value = "zeitlin")]
    pub kind: Kind,
    /// Classification tolerance relative to the spectral radius.
    #[arg(long, default_value_t = DEFAULT_TOL_REL)]
    pub tol: f64,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ClassArgs {
    #[command(flatten)]
    pub physics: Physics,
    #[command(flatten)]
    pub grid: Grid,
    /// Class leader, as `X,Y`.
    #[arg(long, value_parser = vector, allow_hyphen_values = true)]
    pub a: LatticeVector,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct EnsembleArgs {
    #[command(flatten)]
    pub physics: Physics,
    #[command(flatten)]
    pub grid: Grid,
    /// Skip dense solves of stable and zero-α classes.
    #[arg(long)]
    pub fast: bool,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ConvergenceArgs {
    /// Wave vector of the equilibrium, as `X,Y`.
    #[arg(long, value_parser = vector, allow_hyphen_values = true)]
    pub p: LatticeVector,
    /// Classification tolerance relative to the spectral radius.
    #[arg(long, default_value_t = DEFAULT_TOL_REL)]
    pub tol: f64,
    /// Class leader, as `X,Y`.
    #[arg(long, value_parser = vector, allow_hyphen_values = true)]
    pub a: LatticeVector,
    /// Domain sizes, comma separated.
    #[arg(long, value_delimiter = ',', required_unless_present = "n_tilde_values", conflicts_with = "n_tilde_values")]
    pub n_values: Vec<i64>,
    /// Reduced sizes `ñ`, comma separated; each maps to its admissible `N`.
    #[arg(long, value_delimiter = ',')]
    pub n_tilde_values: Vec<i64>,
    /// Keep Zeitlin points only at admissible `N`.
    #[arg(long)]
    pub strict_admissible: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    /// p = (3,1), a = (1,-2), N = 1000, Γ = 0.5.
    #[value(name = "p3-1")]
    #[serde(rename = "p3-1")]
    P31,
    /// p = (7,5), a = (-4,7), N = 1000, Γ = 0.5.
    #[value(name = "p7-5")]
    #[serde(rename = "p7-5")]
    P75,
}

impl Preset {
    pub fn values(self) -> (LatticeVector, LatticeVector, i64, f64) {
        match self {
            Preset::P31 => (LatticeVector::new(3, 1), LatticeVector::new(1, -2), 1000, 0.5),
            Preset::P75 => (LatticeVector::new(7, 5), LatticeVector::new(-4, 7), 1000, 0.5),
        }
    }
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct DensityArgs {
    #[command(flatten)]
    pub physics: Physics,
    #[command(flatten)]
    pub grid: Grid,
    /// Class leader, as `X,Y`.
    #[arg(long, value_parser = vector, allow_hyphen_values = true)]
    pub a: Option<LatticeVector>,
    #[arg(long, default_value_t = 40)]
    pub bins: usize,
    /// Defaults for `p`, `a`, `N` and `Γ`; explicit flags take precedence.
    #[arg(long, value_enum, default_value = "p3-1")]
    pub preset: Preset,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LevelArg {
    Quick,
    Full,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value = "quick")]
    pub level: LevelArg,
}
