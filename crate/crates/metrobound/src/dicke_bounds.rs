//! Error-propagation bounds for estimating θ from ⟨J_x²⟩ on states close to
//! the unpolarized Dicke state, with the evolution e^{-iθJ_z}.

use crate::error::{MetroError, Result};
use crate::linalg::c;
use crate::spin_algebra::{collective_operators, Axis, Basis, BasisKind, QuantumState};
use crate::tolerances as tol;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_2;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DickeMoments {
    pub n: usize,
    pub jx2: f64,
    pub jx4: f64,
    pub jy2: f64,
    pub jy4: f64,
    pub jz2: f64,
    pub jxjy2jx: f64,
    /// ⟨J_x J_y² J_x⟩ was replaced by its upper bound.
    #[serde(default)]
    pub jxjy2jx_is_bounded: bool,
    /// All odd-parity expectation values vanished.
    #[serde(default = "yes")]
    pub parity_ok: bool,
}

fn yes() -> bool {
    true
}

impl DickeMoments {
    /// Moments of a state invariant under rotations about x, where
    /// ⟨J_z²⟩ = ⟨J_y²⟩ and ⟨J_x J_y² J_x⟩ is replaced by its bound.
    pub fn x_invariant(n: usize, jx2: f64, jx4: f64, jy2: f64, jy4: f64) -> Result<Self> {
        let m = DickeMoments {
            n,
            jx2,
            jx4,
            jy2,
            jy4,
            jz2: jy2,
            jxjy2jx: 0.0,
            jxjy2jx_is_bounded: false,
            parity_ok: true,
        };
        m.validate()?;
        Ok(m.with_bounded_cross())
    }

    pub fn with_bounded_cross(mut self) -> Self {
        self.jxjy2jx = fourth_moment_bound(&self, self.n);
        self.jxjy2jx_is_bounded = true;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let vals = [self.jx2, self.jx4, self.jy2, self.jy4, self.jz2];
        if vals.iter().any(|v| !v.is_finite() || *v < -tol::VARIANCE_CLIP) {
            return Err(MetroError::InvalidInput("moments must be finite and non-negative".into()));
        }
        if self.jx4 < self.jx2 * self.jx2 * (1.0 - 1e-12) - tol::VARIANCE_CLIP
            || self.jy4 < self.jy2 * self.jy2 * (1.0 - 1e-12) - tol::VARIANCE_CLIP
        {
            return Err(MetroError::InvalidInput("fourth moment below squared second moment".into()));
        }
        Ok(())
    }

    pub fn var_jx2(&self) -> f64 {
        clip(self.jx4 - self.jx2 * self.jx2)
    }

    pub fn var_jy2(&self) -> f64 {
        clip(self.jy4 - self.jy2 * self.jy2)
    }

    /// θ-independent part of the numerator.
    pub fn cross_term(&self) -> f64 {
        4.0 * self.jy2 - 3.0 * self.jz2 - 2.0 * self.jx2 * (1.0 + self.jy2) + 6.0 * self.jxjy2jx
    }

    /// Var(J_x²) and Var(J_y²) with values below round-off of the fourth
    /// moments set to zero.
    pub fn effective_variances(&self) -> (f64, f64) {
        let floor = tol::VARIANCE_CLIP * (1.0 + self.jx2 * self.jx2 + self.jy2 * self.jy2);
        let cut = |v: f64| if v < floor { 0.0 } else { v };
        (cut(self.var_jx2()), cut(self.var_jy2()))
    }

    fn signal(&self) -> f64 {
        4.0 * (self.jy2 - self.jx2).powi(2)
    }
}

fn clip(v: f64) -> f64 {
    if v < 0.0 && v > -tol::VARIANCE_CLIP * (1.0 + v.abs()) {
        0.0
    } else {
        v.max(0.0)
    }
}

/// Evaluates every moment by trace and checks the parity conditions.
pub fn moments_from_state(state: &QuantumState) -> Result<DickeMoments> {
    let basis = state.basis();
    let [x, y, z] = collective_operators(basis)?;
    let (x2, y2) = (x.square(), y.square());
    let e = |m: &crate::linalg::CMat| state.expect_matrix(m).re;
    let jx2 = e(x2.matrix());
    let jy2 = e(y2.matrix());
    let jz2 = e(z.square().matrix());
    let jx4 = e(&(x2.matrix() * x2.matrix()));
    let jy4 = e(&(y2.matrix() * y2.matrix()));
    let jxjy2jx = e(&(x.matrix() * y2.matrix() * x.matrix()));
    let anti = x.anticommutator(&y)?;
    let parity = [
        e(anti.matrix()),
        e(x2.anticommutator(&anti)?.matrix()),
        e(y2.anticommutator(&anti)?.matrix()),
    ];
    let parity_ok = parity.iter().all(|p| p.abs() < tol::PARITY_TOL);
    if !parity_ok {
        log::warn!("parity conditions violated: {parity:?}");
    }
    Ok(DickeMoments {
        n: basis.n_particles,
        jx2,
        jx4,
        jy2,
        jy4,
        jz2,
        jxjy2jx,
        jxjy2jx_is_bounded: false,
        parity_ok,
    })
}

/// Optional replacements for the variances and the cross term.
#[derive(Clone, Copy, Debug, Default)]
pub struct PrecisionExtras {
    pub var_jx2: Option<f64>,
    pub var_jy2: Option<f64>,
    pub cross_term: Option<f64>,
}

/// (Δθ)^{-2} at angle θ.
pub fn precision_vs_theta(m: &DickeMoments, theta: f64) -> f64 {
    precision_vs_theta_with(m, PrecisionExtras::default(), theta)
}

pub fn precision_vs_theta_with(m: &DickeMoments, extras: PrecisionExtras, theta: f64) -> f64 {
    let (evx, evy) = m.effective_variances();
    let vx = extras.var_jx2.unwrap_or(evx);
    let vy = extras.var_jy2.unwrap_or(evy);
    let rest = extras.cross_term.unwrap_or_else(|| m.cross_term());
    let (s, cth) = theta.sin_cos();
    let (s2, c2) = (s * s, cth * cth);
    let signal = m.signal();
    let cs = c2 * s2;
    if cs < 1e-300 {
        // θ at a multiple of π/2: finite only if the diverging variance vanishes.
        let diverging = if s2 < c2 { vx } else { vy };
        if diverging > 0.0 || rest <= 0.0 {
            return 0.0;
        }
        return signal / rest;
    }
    let denom = vx * c2 * c2 + vy * s2 * s2 + rest * cs;
    if denom <= 0.0 {
        return f64::INFINITY;
    }
    signal * cs / denom
}

/// Optimal (Δθ)^{-2} and the angle where it is reached.
pub fn optimal_precision(m: &DickeMoments) -> Result<(f64, f64)> {
    let (vx, vy) = m.effective_variances();
    let rest = m.cross_term();
    let (theta, noise) = if vx == 0.0 {
        (0.0, rest)
    } else if vy == 0.0 {
        (FRAC_PI_2, rest)
    } else {
        let t2 = (vx / vy).sqrt();
        (t2.sqrt().atan(), 2.0 * (vx * vy).sqrt() + rest)
    };
    if !(noise > 0.0) {
        return Err(MetroError::OutOfRange(format!("optimal noise term {noise} is not positive")));
    }
    Ok((m.signal() / noise, theta))
}

/// Upper bound N(N+2)/8 ⟨J_x²⟩ - ⟨J_x⁴⟩/2 on ⟨J_x J_y² J_x⟩.
pub fn fourth_moment_bound(m: &DickeMoments, n: usize) -> f64 {
    let nf = n as f64;
    nf * (nf + 2.0) / 8.0 * m.jx2 - m.jx4 / 2.0
}

/// Optimal-precision lower bound from ⟨J_x²⟩ and ⟨J_y²⟩ only, using
/// ⟨J_y⁴⟩ ≤ N²/4 ⟨J_y²⟩ and ⟨J_x⁴⟩ ≈ β⟨J_x²⟩².
pub fn second_moment_bound(jx2: f64, jy2: f64, n: usize, beta: f64) -> Result<f64> {
    if jy2 <= jx2 {
        return Err(MetroError::InvalidInput(format!("need jy2 > jx2, got {jy2} <= {jx2}")));
    }
    if beta < 1.0 {
        return Err(MetroError::InvalidInput(format!("beta = {beta} must be at least 1")));
    }
    let nf = n as f64;
    let vx = (beta - 1.0) * jx2 * jx2;
    let vy = clip(nf * nf / 4.0 * jy2 - jy2 * jy2);
    let noise = 2.0 * (vx * vy).sqrt() + jy2 + (3.0 * nf * (nf + 2.0) - 8.0) / 4.0 * jx2
        - 2.0 * jx2 * jy2
        - 3.0 * beta * jx2 * jx2;
    if !(noise > 0.0) {
        return Err(MetroError::OutOfRange(format!("noise term {noise} is not positive")));
    }
    Ok(4.0 * (jy2 - jx2).powi(2) / noise)
}

/// Gaussian mixture of x-Dicke states, weights e^{-(n-N/2)²/T}.
pub fn thermal_dicke_state(n_particles: usize, temperature: f64, basis: Basis) -> Result<QuantumState> {
    if n_particles % 2 != 0 {
        return Err(MetroError::InvalidInput("N must be even".into()));
    }
    if !(temperature >= 0.0) {
        return Err(MetroError::OutOfRange(format!("T = {temperature}")));
    }
    let half = n_particles / 2;
    let weights: Vec<f64> = (0..=n_particles)
        .map(|k| {
            let d = k as f64 - half as f64;
            if temperature == 0.0 {
                if k == half { 1.0 } else { 0.0 }
            } else {
                (-d * d / temperature).exp()
            }
        })
        .collect();
    let total: f64 = weights.iter().sum();
    let mut probs = Vec::new();
    let mut cols = Vec::new();
    for (k, w) in weights.iter().enumerate() {
        if *w / total > 0.0 {
            probs.push(w / total);
            let s = crate::spin_algebra::dicke_state(n_particles, k, Axis::X, basis)?;
            cols.push(s.as_pure().unwrap().clone());
        }
    }
    let vectors = crate::linalg::CMat::from_columns(&cols);
    let sum: f64 = probs.iter().sum();
    let probs = probs.iter().map(|p| p / sum).collect();
    QuantumState::spectral(probs, vectors, basis)
}

/// ⟨J_x^m(θ)⟩ with J_x(θ) = J_x cos θ - J_y sin θ.
pub fn evolved_moment(state: &QuantumState, power: u32, theta: f64) -> Result<f64> {
    let [x, y, _] = collective_operators(state.basis())?;
    let jt = x.matrix() * c(theta.cos()) - y.matrix() * c(theta.sin());
    let mut m = crate::linalg::CMat::identity(jt.nrows(), jt.nrows());
    for _ in 0..power {
        m = &m * &jt;
    }
    Ok(state.expect_matrix(&m).re)
}

/// (Δθ)^{-2} from direct simulation: |∂_θ⟨J_x²(θ)⟩|² / Var(J_x²(θ)), with
/// the derivative taken analytically from the evolved operators.
pub fn simulated_precision(state: &QuantumState, theta: f64) -> Result<f64> {
    let [x, y, _] = collective_operators(state.basis())?;
    let jt = x.matrix() * c(theta.cos()) - y.matrix() * c(theta.sin());
    let djt = x.matrix() * c(-theta.sin()) - y.matrix() * c(theta.cos());
    let jt2 = &jt * &jt;
    let d = state.expect_matrix(&(&djt * &jt + &jt * &djt)).re;
    let var = state.expect_matrix(&(&jt2 * &jt2)).re - state.expect_matrix(&jt2).re.powi(2);
    if var <= 0.0 {
        return Ok(if d.abs() > 0.0 { f64::INFINITY } else { 0.0 });
    }
    Ok(d * d / var)
}

/// Symmetric-basis ground state of J_x² + J_y, used for the θ-curve check.
pub fn reference_ground_state(n_particles: usize) -> Result<QuantumState> {
    let basis = Basis::symmetric(n_particles, 0.5)?;
    let [x, y, _] = collective_operators(basis)?;
    let h = x.square().plus(&y)?;
    Ok(crate::spin_algebra::ground_state_of(&h, false)?.state)
}

/// Summary of a Gaussian resampling run.
#[derive(Clone, Debug, Serialize)]
pub struct ResampleSummary {
    pub draws: usize,
    pub failures: usize,
    pub mean: f64,
    pub std: f64,
    pub p16: f64,
    pub p50: f64,
    pub p84: f64,
}

/// Resamples each input from N(mean, σ) and summarizes f over the draws.
/// Draws where f fails are counted and skipped.
pub fn gaussian_resample<F>(
    means: &[f64],
    sigmas: &[f64],
    draws: usize,
    seed: u64,
    f: F,
) -> Result<ResampleSummary>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    if means.len() != sigmas.len() {
        return Err(MetroError::InvalidInput("means and sigmas differ in length".into()));
    }
    let dists = means
        .iter()
        .zip(sigmas)
        .map(|(&m, &s)| {
            if !(s >= 0.0) || !s.is_finite() {
                return Err(MetroError::InvalidInput(format!("sigma {s} must be non-negative")));
            }
            Normal::new(m, s).map_err(|_| MetroError::InvalidInput(format!("sigma {s} is invalid")))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut values = Vec::with_capacity(draws);
    let mut buf = vec![0.0; means.len()];
    let mut failures = 0;
    for _ in 0..draws {
        for (b, d) in buf.iter_mut().zip(&dists) {
            *b = d.sample(&mut rng);
        }
        match f(&buf) {
            Ok(v) if v.is_finite() => values.push(v),
            _ => failures += 1,
        }
    }
    if values.is_empty() {
        return Err(MetroError::Numerical("every resampled draw failed".into()));
    }
    values.sort_by(f64::total_cmp);
    let n = values.len() as f64;
    // Welford update.
    let (mut mean, mut m2) = (0.0, 0.0);
    for (k, v) in values.iter().enumerate() {
        let d = v - mean;
        mean += d / (k + 1) as f64;
        m2 += d * (v - mean);
    }
    let std = (m2 / (n - 1.0).max(1.0)).sqrt();
    let q = |p: f64| values[((p * (n - 1.0)).round() as usize).min(values.len() - 1)];
    Ok(ResampleSummary { draws, failures, mean, std, p16: q(0.16), p50: q(0.5), p84: q(0.84) })
}

/// The measured moments of the N = 7900 Dicke experiment.
pub fn experimental_moments() -> DickeMoments {
    DickeMoments::x_invariant(7900, 112.0, 40e3, 6e6, 6.2e13).expect("valid constants")
}

/// Symmetric basis for N qubits, a convenience for the curves.
pub fn qubit_symmetric(n: usize) -> Result<Basis> {
    Basis::qubits(n, BasisKind::Symmetric)
}
