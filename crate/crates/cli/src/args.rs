use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "causal-probe",
    version,
    about = "Signaling diagnostics for nonlocal measurements on spins, oscillators and lattice fields"
)]
pub struct Cli {
    /// Write CSV tables and a run manifest into DIR instead of printing the tables.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,

    /// Set ħ = 1, overriding any value from the scenario or flags.
    #[arg(long, global = true)]
    pub natural_units: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Two spin-1/2 particles, Alice rotates spin A.
    Spin(SpinArgs),
    /// Two coupled oscillators, Alice kicks oscillator A.
    Ho(HoArgs),
    /// Free scalar field on a periodic lattice, Alice kicks site x.
    Field(FieldArgs),
    /// Cutoff sweep with scaling fits.
    Sweep(SweepArgs),
    /// Side-by-side comparison of measurement schemes.
    Compare(CompareArgs),
    /// Check scenario files without running them.
    Validate(ValidateArgs),
}

/// Flags shared by the system subcommands; they override scenario fields.
#[derive(Debug, Args)]
pub struct Common {
    /// Scenario file to start from.
    #[arg(long, value_name = "FILE")]
    pub scenario: Option<PathBuf>,

    /// Bob observables, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub obs: Vec<String>,

    /// Parameter grid: `v1,v2,...` or `start:stop:count`.
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<String>,

    /// Reduced Planck constant.
    #[arg(long)]
    pub hbar: Option<f64>,

    /// Parameter for single-point comparisons.
    #[arg(long, allow_hyphen_values = true)]
    pub lambda_ref: Option<f64>,

    /// Schemes to compare at `lambda_ref`, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub compare: Vec<String>,
}

#[derive(Debug, Args)]
pub struct SpinArgs {
    /// none, qndsv, s2, sz, or a full scheme id such as `s2-bell`.
    pub scheme: Option<String>,

    /// Verified product state for qndsv, `a,b` (e.g. `up,right`).
    #[arg(long)]
    pub target: Option<String>,

    /// Basis inside degenerate eigenspaces for s2/sz: standard, bell, luders.
    #[arg(long)]
    pub basis: Option<String>,

    /// Pre-measurement product state `a,b` (default `up,up`).
    #[arg(long)]
    pub prestate: Option<String>,

    /// Alice's rotation: `rotate-x|y|z[:angle]` or `rotate:nx;ny;nz[:angle]`.
    #[arg(long, allow_hyphen_values = true)]
    pub alice: Option<String>,

    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct HoArgs {
    /// none, naive or phase.
    pub scheme: Option<String>,

    /// Oscillator mass.
    #[arg(long)]
    pub mass: Option<f64>,

    /// Oscillator frequency.
    #[arg(long)]
    pub omega: Option<f64>,

    #[arg(long, allow_hyphen_values = true)]
    pub p_a: Option<f64>,

    #[arg(long, allow_hyphen_values = true)]
    pub p_b: Option<f64>,

    /// Single kick strength (sets the grid and `lambda_ref`).
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: Option<f64>,

    /// Fock levels per mode.
    #[arg(long)]
    pub trunc: Option<usize>,

    /// Phase-state cutoff S.
    #[arg(long)]
    pub s_cut: Option<usize>,

    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct FieldArgs {
    /// none, naive or qndsv.
    pub scheme: Option<String>,

    /// Spatial dimension.
    #[arg(long)]
    pub d: Option<usize>,

    /// Sites per axis.
    #[arg(long = "N")]
    pub sites: Option<usize>,

    /// Lattice spacing.
    #[arg(long)]
    pub a: Option<f64>,

    /// Field mass, 0 allowed.
    #[arg(long)]
    pub mass: Option<f64>,

    /// lattice or continuum.
    #[arg(long)]
    pub dispersion: Option<String>,

    /// Zero-mode regulator mass for massless fields.
    #[arg(long)]
    pub regulator: Option<f64>,

    /// Alice's site, comma separated per axis.
    #[arg(long, value_delimiter = ',')]
    pub x: Vec<usize>,

    /// Bob's site, comma separated per axis.
    #[arg(long, value_delimiter = ',')]
    pub y: Vec<usize>,

    /// Verified mode index, comma separated per axis.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub p_index: Vec<i64>,

    /// Single kick strength (sets the grid and `lambda_ref`).
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: Option<f64>,

    /// Verification time for wave packets.
    #[arg(long, allow_hyphen_values = true)]
    pub t1: Option<f64>,

    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    pub scenario: PathBuf,

    /// volume, spacing, s_cut or trunc.
    #[arg(long)]
    pub axis: Option<String>,

    /// Cutoff values, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub values: Vec<f64>,

    /// signaling_derivative, max_deviation, expectation or max_signaling_amplitude.
    #[arg(long)]
    pub metric: Option<String>,

    #[arg(long)]
    pub observable: Option<String>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    pub scenario: PathBuf,

    /// Scheme ids, comma separated (default: the scenario's list).
    #[arg(long, value_delimiter = ',')]
    pub schemes: Vec<String>,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[arg(required = true)]
    pub files: Vec<PathBuf>,
}
