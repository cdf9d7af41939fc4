//! Two-parameter Cramér-Rao bounds for estimating a field gradient.
//!
//! Particle n sits at x_n and feels B(x_n) = b₀ + x_n b₁ along z, so the
//! state picks up exp(-i(b₀H₀ + b₁H₁)) with H₀ = J_z and H₁ = Σ x_n j_z⁽ⁿ⁾.
//! Positions are either fixed or described by their first two moments.
//! The bound on (Δb₁)⁻² is F₁₁ - F₀₁²/F₀₀, or F₁₁ when the state does not
//! respond to the homogeneous field at all.

use crate::error::{MetroError, Result};
use crate::linalg::{c, CMat, CVec};
use crate::qfi_core::{QfiMatrix, Spectrum};
use crate::spin_algebra::{
    collective_operator, dicke_state, ghz_state, particle_spin_operator, pi_singlet,
    polarized_state, Axis, Basis, BasisKind, QuantumState, StateRepr,
};
use crate::tolerances as tol;
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_1_SQRT_2;

/// Where the particles are.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SpatialModel {
    Deterministic { positions: Vec<f64> },
    /// Permutation-invariant distribution with mean `mu`, single-particle
    /// variance `sigma2` and pair covariance `eta`.
    MomentModel {
        #[serde(default)]
        mu: f64,
        sigma2: f64,
        #[serde(default)]
        eta: f64,
    },
}

impl SpatialModel {
    pub fn deterministic(positions: Vec<f64>) -> Result<Self> {
        if positions.iter().any(|x| !x.is_finite()) {
            return Err(MetroError::InvalidInput("positions must be finite".into()));
        }
        Ok(SpatialModel::Deterministic { positions })
    }

    /// Atoms at a, 2a, ..., Na.
    pub fn chain(n: usize, a: f64) -> Result<Self> {
        Self::deterministic((1..=n).map(|k| k as f64 * a).collect())
    }

    pub fn moments(mu: f64, sigma2: f64, eta: f64) -> Result<Self> {
        if !(mu.is_finite() && sigma2.is_finite() && eta.is_finite()) {
            return Err(MetroError::InvalidInput("moments must be finite".into()));
        }
        if sigma2 < 0.0 {
            return Err(MetroError::OutOfRange(format!("sigma2 = {sigma2} < 0")));
        }
        if eta > sigma2 {
            return Err(MetroError::OutOfRange(format!("eta = {eta} exceeds sigma2 = {sigma2}")));
        }
        Ok(SpatialModel::MomentModel { mu, sigma2, eta })
    }

    /// Checks the model against a particle number.
    pub fn validate(&self, n: usize) -> Result<()> {
        match self {
            SpatialModel::Deterministic { positions } => {
                if positions.len() != n {
                    return Err(MetroError::BasisMismatch(format!(
                        "{} positions for {n} particles",
                        positions.len()
                    )));
                }
                if positions.iter().any(|x| !x.is_finite()) {
                    return Err(MetroError::InvalidInput("positions must be finite".into()));
                }
            }
            &SpatialModel::MomentModel { mu, sigma2, eta } => {
                Self::moments(mu, sigma2, eta)?;
                if n > 1 && eta < -sigma2 / (n as f64 - 1.0) - 1e-15 {
                    return Err(MetroError::OutOfRange(format!(
                        "eta = {eta} below -sigma2/(N-1) for N = {n}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// ⟨x_n⟩.
    pub fn mean(&self, n: usize) -> f64 {
        match self {
            SpatialModel::Deterministic { positions } => positions[n],
            SpatialModel::MomentModel { mu, .. } => *mu,
        }
    }

    /// ⟨x_n x_m⟩.
    pub fn second_moment(&self, n: usize, m: usize) -> f64 {
        match self {
            SpatialModel::Deterministic { positions } => positions[n] * positions[m],
            &SpatialModel::MomentModel { mu, sigma2, eta } => {
                if n == m {
                    sigma2 + mu * mu
                } else {
                    eta + mu * mu
                }
            }
        }
    }

    /// Every position moved by d.
    pub fn shifted(&self, d: f64) -> SpatialModel {
        match self {
            SpatialModel::Deterministic { positions } => {
                SpatialModel::Deterministic { positions: positions.iter().map(|x| x + d).collect() }
            }
            &SpatialModel::MomentModel { mu, sigma2, eta } => {
                SpatialModel::MomentModel { mu: mu + d, sigma2, eta }
            }
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct GradientBound {
    pub value: f64,
    /// True when the state commutes with J_z, making the problem single-parameter.
    pub saturable: bool,
    pub qfi_matrix: QfiMatrix,
}

fn full_state(state: &QuantumState) -> Result<QuantumState> {
    match state.basis().kind {
        BasisKind::Full => Ok(state.clone()),
        BasisKind::Symmetric => {
            let b = state.basis();
            Basis::full(b.n_particles, b.spin())?;
            state.to_full()
        }
    }
}

/// QFI matrix for (b₀, b₁). Symmetric-basis states are embedded in the full
/// basis first, so N is limited by the full-basis cap.
pub fn qfi_matrix(spin_state: &QuantumState, spatial: &SpatialModel) -> Result<QfiMatrix> {
    let n = spin_state.basis().n_particles;
    spatial.validate(n)?;
    let state = full_state(spin_state)?;
    let basis = state.basis();
    let s = Spectrum::new(&state);
    let jz = collective_operator(Axis::Z, basis)?;
    let pz = s.project(jz.matrix());
    let f00 = s.cross_projected(&pz, &pz).re;
    match spatial {
        SpatialModel::Deterministic { .. } => {
            let mut local = Vec::with_capacity(n);
            for k in 0..n {
                local.push(s.project(particle_spin_operator(Axis::Z, k, basis)?.matrix()));
            }
            let mut f01 = 0.0;
            let mut f11 = 0.0;
            for a in 0..n {
                f01 += spatial.mean(a) * s.cross_projected(&local[a], &pz).re;
                for b in a..n {
                    let v = s.cross_projected(&local[a], &local[b]).re;
                    let w = spatial.second_moment(a, b) * v;
                    f11 += if a == b { w } else { 2.0 * w };
                }
            }
            Ok(QfiMatrix([[f00, f01], [f01, f11]]))
        }
        &SpatialModel::MomentModel { mu, sigma2, eta } => {
            let (diag, off) = pi_kernel(&s, basis)?;
            let nf = n as f64;
            let f01 = mu * f00;
            let f11 = (sigma2 + mu * mu) * nf * diag + (eta + mu * mu) * nf * (nf - 1.0) * off;
            Ok(QfiMatrix([[f00, f01], [f01, f11]]))
        }
    }
}

/// F_Q[ρ, j_z⁽¹⁾] and F_Q[ρ, j_z⁽¹⁾, j_z⁽²⁾], checked against the last pair.
fn pi_kernel(s: &Spectrum, basis: Basis) -> Result<(f64, f64)> {
    let n = basis.n_particles;
    let op = |k: usize| -> Result<_> { Ok(s.project(particle_spin_operator(Axis::Z, k, basis)?.matrix())) };
    let p0 = op(0)?;
    let diag = s.cross_projected(&p0, &p0).re;
    if n == 1 {
        return Ok((diag, 0.0));
    }
    let p1 = op(1)?;
    let off = s.cross_projected(&p0, &p1).re;
    let last = op(n - 1)?;
    let prev = if n > 2 { op(n - 2)? } else { op(0)? };
    let diag_check = s.cross_projected(&last, &last).re;
    let off_check = s.cross_projected(&prev, &last).re;
    let scale = 1.0 + diag.abs();
    if (diag - diag_check).abs() > 1e-9 * scale || (off - off_check).abs() > 1e-9 * scale {
        return Err(MetroError::InvalidInput(
            "moment model needs a permutationally invariant spin state".into(),
        ));
    }
    Ok((diag, off))
}

fn bound_from(m: QfiMatrix) -> GradientBound {
    let [[f00, f01], [_, f11]] = m.0;
    if f00 < tol::INSENSITIVE_F00 {
        GradientBound { value: f11.max(0.0), saturable: true, qfi_matrix: m }
    } else {
        GradientBound { value: (f11 - f01 * f01 / f00).max(0.0), saturable: false, qfi_matrix: m }
    }
}

pub fn gradient_bound(spin_state: &QuantumState, spatial: &SpatialModel) -> Result<GradientBound> {
    Ok(bound_from(qfi_matrix(spin_state, spatial)?))
}

/// QFI matrix after translating every particle by d.
pub fn shift_qfi_matrix(m: &QfiMatrix, d: f64) -> QfiMatrix {
    let [[f00, f01], [_, f11]] = m.0;
    let g01 = f01 + d * f00;
    QfiMatrix([[f00, g01], [g01, f11 + 2.0 * d * f01 + d * d * f00]])
}

/// |bound(shifted by d) - bound|, recomputed from scratch.
pub fn translation_check(spin_state: &QuantumState, spatial: &SpatialModel, d: f64) -> Result<f64> {
    let a = gradient_bound(spin_state, spatial)?.value;
    let b = gradient_bound(spin_state, &spatial.shifted(d))?.value;
    Ok((a - b).abs())
}

/// ρ_L ⊗ ρ_R in the full basis of the joint ensemble.
pub fn product_state(left: &QuantumState, right: &QuantumState) -> Result<QuantumState> {
    let (l, r) = (full_state(left)?, full_state(right)?);
    if l.basis().two_j() != r.basis().two_j() {
        return Err(MetroError::BasisMismatch("ensembles have different spin".into()));
    }
    let basis = Basis::full(l.basis().n_particles + r.basis().n_particles, l.basis().spin())?;
    match (l.repr(), r.repr()) {
        (StateRepr::Pure(a), StateRepr::Pure(b)) => QuantumState::pure_normalized(a.kronecker(b), basis),
        _ => {
            let rho = l.density_matrix().kronecker(&r.density_matrix());
            QuantumState::mixed((&rho + rho.adjoint()) * c(0.5), basis)
        }
    }
}

/// (|+j⟩ + |-j⟩)/√2 on every particle.
pub fn best_separable_state(n: usize, j: f64) -> Result<QuantumState> {
    let basis = Basis::full(n, j)?;
    let d = basis.local_dim();
    let mut one = CVec::zeros(d);
    one[0] = c(FRAC_1_SQRT_2);
    one[d - 1] = c(FRAC_1_SQRT_2);
    let mut v = CVec::from_element(1, c(1.0));
    for _ in 0..n {
        v = v.kronecker(&one);
    }
    QuantumState::pure(v, basis)
}

/// (|+j..+j⟩_L|-j..-j⟩_R + |-j..-j⟩_L|+j..+j⟩_R)/√2 with `n_half` particles
/// per ensemble.
pub fn two_ensemble_best_state(n_half: usize, j: f64) -> Result<QuantumState> {
    let basis = Basis::full(2 * n_half, j)?;
    let d = basis.local_dim();
    let half = d.pow(n_half as u32);
    let top = half - 1;
    let mut v = CVec::zeros(basis.dim());
    v[top * half] = c(FRAC_1_SQRT_2);
    v[top] = c(FRAC_1_SQRT_2);
    QuantumState::pure(v, basis)
}

/// Positions -a for the left ensemble and +a for the right one.
pub fn two_ensemble_positions(n_left: usize, n_right: usize, a: f64) -> Result<SpatialModel> {
    let mut x = vec![-a; n_left];
    x.extend(std::iter::repeat_n(a, n_right));
    SpatialModel::deterministic(x)
}

/// Bound for two ensembles at ±a. For a product |ψ⟩_L⊗|ψ⟩_R this is
/// 2a²F_Q[ρ_L, J_z]; `entangled_best` returns the value of the best state,
/// 4a²N²j² with N the total particle number.
pub fn two_ensemble_bound(left_state: &QuantumState, spatial_a: f64, entangled_best: bool) -> Result<f64> {
    let b = left_state.basis();
    let a2 = spatial_a * spatial_a;
    if entangled_best {
        let n = 2.0 * b.n_particles as f64;
        let j = b.spin();
        return Ok(4.0 * a2 * n * n * j * j);
    }
    let jz = collective_operator(Axis::Z, b)?;
    Ok(2.0 * a2 * crate::qfi_core::qfi(left_state, &jz)?)
}

/// Spin states of the single-ensemble table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TableState {
    Singlet,
    Polarized,
    BestSeparable,
    DickeZ,
    DickeX,
    Ghz,
}

impl TableState {
    pub const ALL: [TableState; 6] = [
        TableState::Singlet,
        TableState::Polarized,
        TableState::BestSeparable,
        TableState::DickeZ,
        TableState::DickeX,
        TableState::Ghz,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TableState::Singlet => "singlet",
            TableState::Polarized => "polarized",
            TableState::BestSeparable => "best-separable",
            TableState::DickeZ => "dicke-z",
            TableState::DickeX => "dicke-x",
            TableState::Ghz => "ghz",
        }
    }

    /// Whether the closed form holds with equality.
    pub fn saturable(self) -> bool {
        matches!(self, TableState::Singlet | TableState::DickeZ)
    }

    /// Dicke and GHZ rows are defined for qubits with even N only (GHZ for any N).
    pub fn applies(self, n: usize, j: f64) -> bool {
        let qubits = (j - 0.5).abs() < 1e-12;
        match self {
            TableState::Singlet => (2.0 * n as f64 * j).round() as usize % 2 == 0 && n >= 2,
            TableState::Polarized | TableState::BestSeparable => true,
            TableState::DickeZ | TableState::DickeX => qubits && n % 2 == 0,
            TableState::Ghz => qubits,
        }
    }

    pub fn closed_form(self, sigma2: f64, eta: f64, n: usize, j: f64) -> f64 {
        let nf = n as f64;
        match self {
            TableState::Singlet => (sigma2 - eta) * 4.0 * nf * j * (j + 1.0) / 3.0,
            TableState::Polarized => sigma2 * 2.0 * nf * j,
            TableState::BestSeparable => sigma2 * 4.0 * nf * j * j,
            TableState::DickeZ => (sigma2 - eta) * nf,
            TableState::DickeX => (sigma2 - eta) * nf + eta * nf * (nf + 2.0) / 2.0,
            TableState::Ghz => (sigma2 - eta) * nf + eta * nf * nf,
        }
    }

    pub fn state(self, n: usize, j: f64) -> Result<QuantumState> {
        let full = || Basis::full(n, j);
        match self {
            TableState::Singlet => pi_singlet(n, j),
            TableState::Polarized => polarized_state(n, j, Axis::Y, full()?),
            TableState::BestSeparable => best_separable_state(n, j),
            TableState::DickeZ => dicke_state(n, n / 2, Axis::Z, full()?),
            TableState::DickeX => dicke_state(n, n / 2, Axis::X, full()?),
            TableState::Ghz => ghz_state(n, full()?),
        }
    }
}

impl std::str::FromStr for TableState {
    type Err = MetroError;
    fn from_str(s: &str) -> Result<Self> {
        TableState::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| MetroError::InvalidInput(format!("unknown state '{s}'")))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TableRow {
    pub state: TableState,
    pub closed_form: f64,
    pub saturable: bool,
    /// Numeric value from the QFI-matrix pipeline, when it was evaluated.
    pub numeric: Option<f64>,
}

impl TableRow {
    pub fn deviation(&self) -> Option<f64> {
        self.numeric.map(|v| (v - self.closed_form).abs())
    }
}

/// Largest N for which table rows are cross-checked numerically.
pub const TABLE_NUMERIC_MAX_N: usize = 8;

/// Closed-form rows for a moment model, each cross-checked numerically when
/// N is small enough and the full basis fits.
pub fn state_table(spatial: &SpatialModel, n: usize, j: f64) -> Result<Vec<TableRow>> {
    let SpatialModel::MomentModel { sigma2, eta, .. } = *spatial else {
        return Err(MetroError::InvalidInput("state table needs a moment model".into()));
    };
    spatial.validate(n)?;
    Basis::symmetric(n, j)?;
    let numeric_ok = n <= TABLE_NUMERIC_MAX_N && Basis::full(n, j).is_ok();
    let mut rows = Vec::new();
    for t in TableState::ALL {
        if !t.applies(n, j) {
            continue;
        }
        let numeric = if numeric_ok {
            Some(gradient_bound(&t.state(n, j)?, spatial)?.value)
        } else {
            None
        };
        rows.push(TableRow { state: t, closed_form: t.closed_form(sigma2, eta, n, j), saturable: t.saturable(), numeric });
    }
    Ok(rows)
}

/// Product states used in the two-ensemble table, one per half.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TwoEnsembleState {
    Polarized,
    BestSeparable,
    Dicke,
    Ghz,
    Entangled,
}

impl TwoEnsembleState {
    pub const ALL: [TwoEnsembleState; 5] = [
        TwoEnsembleState::Polarized,
        TwoEnsembleState::BestSeparable,
        TwoEnsembleState::Dicke,
        TwoEnsembleState::Ghz,
        TwoEnsembleState::Entangled,
    ];

    /// Closed form with N the total particle number.
    pub fn closed_form(self, a: f64, n: usize, j: f64) -> f64 {
        let (a2, nf) = (a * a, n as f64);
        match self {
            TwoEnsembleState::Polarized => a2 * nf * j * 2.0,
            TwoEnsembleState::BestSeparable => 4.0 * a2 * nf * j * j,
            TwoEnsembleState::Dicke => a2 * nf * (nf + 4.0) / 4.0,
            TwoEnsembleState::Ghz => a2 * nf * nf / 2.0,
            TwoEnsembleState::Entangled => 4.0 * a2 * nf * nf * j * j,
        }
    }

    pub fn applies(self, n: usize, j: f64) -> bool {
        let qubits = (j - 0.5).abs() < 1e-12;
        match self {
            TwoEnsembleState::Dicke => qubits && n % 4 == 0,
            TwoEnsembleState::Ghz => qubits && n % 2 == 0,
            _ => n % 2 == 0,
        }
    }

    /// State of one half; None for the entangled state, which is not a product.
    pub fn half_state(self, n_half: usize, j: f64) -> Result<Option<QuantumState>> {
        let full = || Basis::full(n_half, j);
        Ok(Some(match self {
            TwoEnsembleState::Polarized => polarized_state(n_half, j, Axis::Y, full()?)?,
            TwoEnsembleState::BestSeparable => best_separable_state(n_half, j)?,
            TwoEnsembleState::Dicke => dicke_state(n_half, n_half / 2, Axis::X, full()?)?,
            TwoEnsembleState::Ghz => ghz_state(n_half, full()?)?,
            TwoEnsembleState::Entangled => return Ok(None),
        }))
    }

    /// Bound from the full QFI-matrix pipeline on the joint state.
    pub fn numeric(self, a: f64, n: usize, j: f64) -> Result<f64> {
        let n_half = n / 2;
        let joint = match self.half_state(n_half, j)? {
            Some(h) => product_state(&h, &h)?,
            None => two_ensemble_best_state(n_half, j)?,
        };
        Ok(gradient_bound(&joint, &two_ensemble_positions(n_half, n_half, a)?)?.value)
    }
}

/// One point of the J_x² readout curve.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ReadoutPoint {
    pub b1: f64,
    pub precision: f64,
}

/// Error-propagation precision of a J_x² measurement on the PI singlet
/// after exp(-i b₁H₁), derivative by central differences. Points where the
/// signal vanishes report 0.
pub fn singlet_jx2_estimation(n: usize, spatial: &SpatialModel, b1_grid: &[f64]) -> Result<Vec<ReadoutPoint>> {
    let SpatialModel::Deterministic { positions } = spatial else {
        return Err(MetroError::InvalidInput("readout curve needs explicit positions".into()));
    };
    spatial.validate(n)?;
    let state = pi_singlet(n, 0.5)?;
    let basis = state.basis();
    let mut h1 = CMat::zeros(basis.dim(), basis.dim());
    for (k, &x) in positions.iter().enumerate() {
        h1 += particle_spin_operator(Axis::Z, k, basis)?.matrix() * c(x);
    }
    let jx = collective_operator(Axis::X, basis)?;
    let jx2 = jx.square();
    let jx4 = jx2.square();
    let moments = |b: f64| -> (f64, f64) {
        let u = CMat::from_diagonal(&h1.diagonal().map(|h| num_complex::Complex64::from_polar(1.0, -b * h.re)));
        let s = state.evolve(&u);
        (s.expect_matrix(jx2.matrix()).re, s.expect_matrix(jx4.matrix()).re)
    };
    let step = tol::GRADIENT_FD_STEP;
    let mut out = Vec::with_capacity(b1_grid.len());
    for &b in b1_grid {
        let (m2, m4) = moments(b);
        let d = (moments(b + step).0 - moments(b - step).0) / (2.0 * step);
        let var = m4 - m2 * m2;
        let precision = if d * d < 1e-20 || var <= 0.0 { 0.0 } else { d * d / var };
        out.push(ReadoutPoint { b1: b, precision });
    }
    Ok(out)
}
