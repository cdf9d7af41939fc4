use crate::output::Format;
use clap::builder::PossibleValuesParser;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use std::path::PathBuf;

#[derive(Parser, Debug)]
#[command(name = "metrobound", version, about = "Quantum Fisher information bounds for spin ensembles")]
pub struct Cli {
    /// JSON job file with "command", "inputs" and optional "output", "format", "seed", "threads".
    #[arg(long, global = true, value_name = "FILE")]
    pub input: Option<PathBuf>,
    /// Write the result to FILE instead of standard output.
    #[arg(long, global = true, value_name = "FILE")]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Seed for every random draw (default 0).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads, 0 for all cores. METROBOUND_THREADS takes precedence.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Only print warnings and errors on standard error.
    #[arg(short, long, global = true)]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Subcommand, Debug, Clone, Deserialize)]
#[serde(tag = "command", content = "inputs", rename_all = "kebab-case")]
pub enum Command {
    /// Quantum Fisher information of a named state.
    Qfi(QfiArgs),
    /// Error-propagation bounds for states near unpolarized Dicke states.
    DickeBound(DickeBoundArgs),
    /// Optimal QFI lower bound from measured expectation values.
    LegendreBound(LegendreBoundArgs),
    /// Gradient magnetometry bound for a named state and spatial model.
    GradientBound(GradientBoundArgs),
    /// Reproduce a figure or table into CSV files.
    Reproduce(ReproduceArgs),
    /// Gaussian resampling of the Dicke-experiment inputs.
    Resample(ResampleArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StateKind {
    /// Dicke state with --excitations excitations along --axis.
    Dicke,
    Ghz,
    /// All spins along --axis.
    Polarized,
    /// Permutationally invariant singlet (full basis).
    Singlet,
    /// Ground state of J_x² - λJ_y.
    Squeezed,
    /// Gaussian mixture of x-Dicke states at --temperature.
    Thermal,
    /// Maximally mixed state.
    Mixed,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AxisArg {
    X,
    Y,
    Z,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
pub enum Generator {
    #[value(name = "Jx", alias = "jx")]
    #[serde(alias = "jx")]
    Jx,
    #[value(name = "Jy", alias = "jy")]
    #[serde(alias = "jy")]
    Jy,
    #[value(name = "Jz", alias = "jz")]
    #[serde(alias = "jz")]
    Jz,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BasisArg {
    Symmetric,
    Full,
}

#[derive(Args, Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QfiArgs {
    #[arg(long, value_enum)]
    pub state: StateKind,
    /// Number of particles.
    #[arg(long)]
    pub n: usize,
    /// Single-particle spin (default 1/2).
    #[arg(long)]
    pub j: Option<f64>,
    /// Orientation of Dicke and polarized states (default x).
    #[arg(long, value_enum)]
    pub axis: Option<AxisArg>,
    /// Excitations of the Dicke state (default N/2).
    #[arg(long)]
    pub excitations: Option<usize>,
    /// Collective generator (default Jz).
    #[arg(long, value_enum)]
    pub generator: Option<Generator>,
    /// Basis (default symmetric; full for the singlet).
    #[arg(long, value_enum)]
    pub basis: Option<BasisArg>,
    /// λ of the squeezed ground state (default 1).
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Temperature of the thermal state (default 1).
    #[arg(long)]
    pub temperature: Option<f64>,
}

#[derive(Args, Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DickeBoundArgs {
    /// Use the measured moments of the N = 7900 experiment.
    #[arg(long)]
    pub experimental: bool,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub jx2: Option<f64>,
    #[arg(long)]
    pub jx4: Option<f64>,
    #[arg(long)]
    pub jy2: Option<f64>,
    #[arg(long)]
    pub jy4: Option<f64>,
    /// ⟨J_z²⟩ (default ⟨J_y²⟩).
    #[arg(long)]
    pub jz2: Option<f64>,
    /// ⟨J_x J_y² J_x⟩ (default: its upper bound).
    #[arg(long)]
    pub jxjy2jx: Option<f64>,
    /// Ratio ⟨J_x⁴⟩/⟨J_x²⟩² assumed by the second-moment bound (default 3).
    #[arg(long)]
    pub beta: Option<f64>,
    /// Also report the precision at this angle.
    #[arg(long)]
    pub theta: Option<f64>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    /// Fidelity with the GHZ state (--n, --fidelity).
    GhzFidelity,
    /// Fidelity with the unpolarized x-Dicke state (--n, --fidelity).
    DickeFidelity,
    /// ⟨J_y⟩ and Var(J_x) of N qubits (--n, --mean-jy, --var-jx).
    Squeezing,
    /// Squeezed state rescaled to N' qubits (--n-prime, --alpha, --xi2), bound per particle.
    SqueezingScaled,
    /// ⟨J_y²⟩ and ⟨J_x²⟩ = ⟨J_z²⟩ of N qubits extrapolated from N' symmetric qubits.
    DickeExperiment,
}

#[derive(Args, Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LegendreBoundArgs {
    #[arg(long, value_enum)]
    pub scenario: Scenario,
    #[serde(default)]
    #[arg(long)]
    pub n: Option<usize>,
    #[serde(default)]
    #[arg(long)]
    pub fidelity: Option<f64>,
    #[serde(default)]
    #[arg(long)]
    pub mean_jy: Option<f64>,
    #[serde(default)]
    #[arg(long)]
    pub var_jx: Option<f64>,
    /// Additional measured ⟨J_x⁴⟩ (squeezing).
    #[serde(default)]
    #[arg(long)]
    pub jx4: Option<f64>,
    /// Add the constraint ⟨J_x⟩ = 0 (squeezing).
    #[serde(default)]
    #[arg(long)]
    pub jx_zero: bool,
    #[serde(default)]
    #[arg(long)]
    pub n_prime: Option<usize>,
    #[serde(default)]
    #[arg(long)]
    pub alpha: Option<f64>,
    #[serde(default)]
    #[arg(long)]
    pub xi2: Option<f64>,
    /// Measured ⟨J_y²⟩ (dicke-experiment, default 112).
    #[serde(default)]
    #[arg(long)]
    pub jy2: Option<f64>,
    /// Measured ⟨J_x²⟩ = ⟨J_z²⟩ (dicke-experiment, default 6e6).
    #[serde(default)]
    #[arg(long)]
    pub jx2: Option<f64>,
    /// Largest N' of the sweep (dicke-experiment, default 400).
    #[serde(default)]
    #[arg(long)]
    pub n_prime_max: Option<usize>,
    /// μ grid size (default 201).
    #[serde(default)]
    #[arg(long)]
    pub mu_grid: Option<usize>,
}

pub const TABLE_STATES: [&str; 6] = ["singlet", "polarized", "best-separable", "dicke-z", "dicke-x", "ghz"];

#[derive(Args, Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GradientBoundArgs {
    #[arg(long, value_parser = PossibleValuesParser::new(TABLE_STATES))]
    pub state: String,
    #[arg(long)]
    pub n: usize,
    /// Single-particle spin (default 1/2).
    #[serde(default)]
    #[arg(long)]
    pub j: Option<f64>,
    /// Position variance σ² of the moment model.
    #[serde(default)]
    #[arg(long)]
    pub sigma2: Option<f64>,
    /// Inter-particle position covariance η (default 0).
    #[serde(default)]
    #[arg(long)]
    pub eta: Option<f64>,
    /// Mean position μ (default 0).
    #[serde(default)]
    #[arg(long)]
    pub mu: Option<f64>,
    /// Explicit particle positions instead of the moment model.
    #[serde(default)]
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub positions: Option<Vec<f64>>,
}

#[derive(Args, Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReproduceArgs {
    /// Figure or table key, or "all" (needs --out-dir).
    pub key: Option<String>,
    /// List the available keys.
    #[arg(long)]
    pub list: bool,
    /// Write one CSV per panel and a JSON sidecar into DIR.
    #[arg(long, value_name = "DIR")]
    pub out_dir: Option<PathBuf>,
    /// Largest N' of the rescaled-symmetric sweeps.
    #[arg(long)]
    pub n_prime_max: Option<usize>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ResampleTarget {
    /// Optimal precision from the four moments.
    #[default]
    OptimalPrecision,
    /// Bound from ⟨J_x²⟩ and ⟨J_y²⟩ only.
    SecondMoment,
}

#[derive(Args, Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResampleArgs {
    /// Standard deviations of ⟨J_x²⟩, ⟨J_x⁴⟩, ⟨J_y²⟩, ⟨J_y⁴⟩ (default: the measured ones).
    #[serde(default)]
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub sigmas: Option<Vec<f64>>,
    /// Means of ⟨J_x²⟩, ⟨J_x⁴⟩, ⟨J_y²⟩, ⟨J_y⁴⟩ (default: the N = 7900 experiment).
    #[serde(default)]
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub means: Option<Vec<f64>>,
    #[serde(default)]
    #[arg(long, value_enum)]
    pub target: Option<ResampleTarget>,
    /// Number of particles (default 7900).
    #[serde(default)]
    #[arg(long)]
    pub n: Option<usize>,
    /// Number of draws (default 10000).
    #[serde(default)]
    #[arg(long)]
    pub draws: Option<usize>,
    /// β of the second-moment bound (default 3).
    #[serde(default)]
    #[arg(long)]
    pub beta: Option<f64>,
}
