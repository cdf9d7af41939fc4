//! Versioned tolerance manifest.
//!
//! Every numerical threshold used by the library, the acceptance suite and
//! the reproduction sidecars lives here so that changes are reviewable in
//! one place. Bump [`MANIFEST_VERSION`] whenever a value changes.

pub const MANIFEST_VERSION: &str = "1.1.0";

// Representation invariants.
pub const HERMITIAN_REL: f64 = 1e-12;
pub const STATE_NORM: f64 = 1e-12;
pub const STATE_TRACE: f64 = 1e-12;
pub const STATE_MIN_EIGENVALUE: f64 = -1e-10;
pub const DEFAULT_FULL_DIM_CAP: usize = 4096;
pub const SINGLET_EIGENVALUE: f64 = 1e-8;
/// Relative spectral gap below which a ground state is reported degenerate.
pub const DEGENERACY_REL_GAP: f64 = 1e-8;

// Quantum Fisher information.
pub const QFI_PAIR_SKIP: f64 = 1e-12;
pub const EIGEN_CLIP: f64 = -1e-10;
pub const QFI_CROSS_IMAG: f64 = 1e-8;
pub const COMMUTE_TOL: f64 = 1e-10;
pub const POVM_COMPLETENESS: f64 = 1e-10;
pub const CFI_STEP: f64 = 1e-5;
pub const CFI_PROB_FLOOR: f64 = 1e-12;

// Dicke-state closed forms.
pub const VARIANCE_CLIP: f64 = 1e-10;
pub const PARITY_TOL: f64 = 1e-10;
pub const DEFAULT_BETA: f64 = 3.0;

// Legendre-transform engine.
pub const DEFAULT_MU_GRID: usize = 201;
pub const MU_GOLDEN_TOL: f64 = 1e-10;
/// Relative tolerance of the certified supremum over mu.
pub const MU_CERT_REL: f64 = 1e-10;
/// Relative bracket width for the largest-eigenvalue search.
pub const LAMBDA_MAX_REL: f64 = 1e-13;
pub const R_STEP_REL: f64 = 1e-8;
pub const R_MAX_EVALS: usize = 10_000;
pub const R_RANDOM_STARTS: usize = 4;
pub const R_SEED: u64 = 0x5eed_1e6e;
pub const FEASIBILITY_REL: f64 = 1e-9;
pub const SYMMETRY_TOL: f64 = 1e-10;

// Gradient magnetometry.
pub const INSENSITIVE_F00: f64 = 1e-10;
pub const GRADIENT_FD_STEP: f64 = 1e-4;

/// Thresholds the acceptance suite checks against. Each pairs a target with
/// the allowed deviation.
pub mod acceptance {
    pub const DICKE_QFI_ABS: f64 = 1e-9;
    pub const DICKE_QFI_SECONDS: f64 = 1.0;
    pub const EXPERIMENT_SECONDS: f64 = 1.0;
    pub const LEGENDRE_1D_SECONDS: f64 = 1.0;
    pub const GHZ_SECONDS: f64 = 10.0;
    pub const FIDELITY_TABLE_SECONDS: f64 = 120.0;
    pub const DICKE_EXPERIMENT_SECONDS: f64 = 600.0;
    pub const GRADIENT_SECONDS: f64 = 30.0;
    pub const PROPERTY_SECONDS: f64 = 300.0;

    pub const EXPERIMENT_OPTIMAL_PER_N: f64 = 3.3;
    pub const EXPERIMENT_SECOND_MOMENT_PER_N: f64 = 2.9;
    pub const EXPERIMENT_PER_N_ABS: f64 = 0.05;

    pub const LEGENDRE_1D_ABS: f64 = 1e-9;

    pub const GHZ_NUMERIC_VS_ANALYTIC: f64 = 1e-4;
    pub const GHZ_ENDPOINT_ABS: f64 = 1e-6;

    pub const SQUEEZING_PER_N: f64 = 6.605;
    pub const SQUEEZING_REL: f64 = 0.005;
    pub const PEZZE_GAP_REL: f64 = 0.026;
    pub const SQUEEZING_ALPHA: f64 = 0.85;
    pub const SQUEEZING_XI2: f64 = 0.1514;

    pub const GAMMA: f64 = 1.301;
    pub const GAMMA_ABS: f64 = 0.001;
    pub const DICKE_EXPERIMENT_PER_N: f64 = 2.94;
    pub const DICKE_EXPERIMENT_ABS: f64 = 0.15;
    pub const DICKE_EXPERIMENT_NPRIME_MAX: usize = 400;
    /// Slack allowed when checking that the extrapolated curve never decreases.
    pub const MONOTONE_SLACK_REL: f64 = 1e-9;

    pub const GRADIENT_TABLE_ABS: f64 = 1e-8;

    pub const SOUNDNESS_CASES: usize = 50;
    pub const COMMUTATOR_ABS: f64 = 1e-12;
    pub const QFI_PROPERTY_ABS: f64 = 1e-8;
    pub const SOUNDNESS_ABS: f64 = 1e-6;
    pub const TRANSLATION_ABS: f64 = 1e-8;
    pub const HUSIMI_NORM_ABS: f64 = 1e-6;
    pub const OVERLAP_ABS: f64 = 1e-12;
}
