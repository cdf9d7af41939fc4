//! Spin operators, collective operators and quantum states.
//!
//! Two representations are supported. The full tensor-product basis orders
//! each particle's levels from m = -j to m = +j with the last particle
//! varying fastest. The symmetric basis is the maximal-spin multiplet
//! J = Nj, ordered M = +Nj, ..., -Nj like the single-spin matrices.

mod states;

pub use states::*;

use crate::error::{MetroError, Result};
use crate::linalg::{self, c, CMat, CVec, I};
use crate::tolerances as tol;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BasisKind {
    Full,
    Symmetric,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Basis {
    pub kind: BasisKind,
    pub n_particles: usize,
    two_j: u32,
}

pub(crate) fn two_j_from(j: f64) -> Result<u32> {
    let tj = 2.0 * j;
    if !tj.is_finite() || tj < 0.5 || (tj - tj.round()).abs() > 1e-12 {
        return Err(MetroError::InvalidSpin(tj));
    }
    Ok(tj.round() as u32)
}

impl Basis {
    pub fn full(n_particles: usize, j: f64) -> Result<Self> {
        Self::full_with_cap(n_particles, j, tol::DEFAULT_FULL_DIM_CAP)
    }

    pub fn full_with_cap(n_particles: usize, j: f64, cap: usize) -> Result<Self> {
        let two_j = two_j_from(j)?;
        if n_particles == 0 {
            return Err(MetroError::InvalidInput("N must be positive".into()));
        }
        let local = two_j as usize + 1;
        let mut dim: usize = 1;
        for _ in 0..n_particles {
            dim = dim.saturating_mul(local);
            if dim > cap {
                return Err(MetroError::DimensionCap { dim, cap });
            }
        }
        Ok(Basis { kind: BasisKind::Full, n_particles, two_j })
    }

    pub fn symmetric(n_particles: usize, j: f64) -> Result<Self> {
        let two_j = two_j_from(j)?;
        if n_particles == 0 {
            return Err(MetroError::InvalidInput("N must be positive".into()));
        }
        Ok(Basis { kind: BasisKind::Symmetric, n_particles, two_j })
    }

    pub fn qubits(n_particles: usize, kind: BasisKind) -> Result<Self> {
        match kind {
            BasisKind::Full => Self::full(n_particles, 0.5),
            BasisKind::Symmetric => Self::symmetric(n_particles, 0.5),
        }
    }

    pub fn spin(&self) -> f64 {
        self.two_j as f64 / 2.0
    }

    pub fn two_j(&self) -> u32 {
        self.two_j
    }

    pub fn local_dim(&self) -> usize {
        self.two_j as usize + 1
    }

    /// Total spin of the symmetric multiplet, Nj.
    pub fn max_spin(&self) -> f64 {
        self.n_particles as f64 * self.spin()
    }

    pub fn dim(&self) -> usize {
        match self.kind {
            BasisKind::Full => self.local_dim().pow(self.n_particles as u32),
            BasisKind::Symmetric => self.n_particles * self.two_j as usize + 1,
        }
    }

    /// The same ensemble in the other representation.
    pub fn with_kind(&self, kind: BasisKind) -> Result<Self> {
        match kind {
            BasisKind::Full => Self::full(self.n_particles, self.spin()),
            BasisKind::Symmetric => Self::symmetric(self.n_particles, self.spin()),
        }
    }

    pub(crate) fn require_same(&self, other: &Basis) -> Result<()> {
        if self != other {
            return Err(MetroError::BasisMismatch(format!("{self:?} vs {other:?}")));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub fn unit(self) -> [f64; 3] {
        match self {
            Axis::X => [1.0, 0.0, 0.0],
            Axis::Y => [0.0, 1.0, 0.0],
            Axis::Z => [0.0, 0.0, 1.0],
        }
    }
}

impl std::str::FromStr for Axis {
    type Err = MetroError;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "x" | "jx" => Ok(Axis::X),
            "y" | "jy" => Ok(Axis::Y),
            "z" | "jz" => Ok(Axis::Z),
            other => Err(MetroError::InvalidInput(format!("unknown axis {other:?}"))),
        }
    }
}

/// Hermitian matrix tagged with its basis.
#[derive(Clone, Debug)]
pub struct Operator {
    matrix: CMat,
    basis: Basis,
}

impl Operator {
    pub fn new(matrix: CMat, basis: Basis) -> Result<Self> {
        if matrix.nrows() != basis.dim() || matrix.ncols() != basis.dim() {
            return Err(MetroError::BasisMismatch(format!(
                "matrix is {}x{}, basis dimension is {}",
                matrix.nrows(),
                matrix.ncols(),
                basis.dim()
            )));
        }
        if !linalg::is_hermitian(&matrix, tol::HERMITIAN_REL) {
            return Err(MetroError::InvalidInput("operator is not Hermitian".into()));
        }
        Ok(Operator { matrix, basis })
    }

    /// Hermitian part of `matrix`, used where round-off may break symmetry.
    pub fn hermitize(matrix: CMat, basis: Basis) -> Self {
        let h = (&matrix + matrix.adjoint()) * c(0.5);
        Operator { matrix: h, basis }
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMat {
        self.matrix
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn scale(&self, s: f64) -> Operator {
        Operator { matrix: &self.matrix * c(s), basis: self.basis }
    }

    pub fn plus(&self, other: &Operator) -> Result<Operator> {
        self.basis.require_same(&other.basis)?;
        Ok(Operator { matrix: &self.matrix + &other.matrix, basis: self.basis })
    }

    pub fn minus(&self, other: &Operator) -> Result<Operator> {
        self.basis.require_same(&other.basis)?;
        Ok(Operator { matrix: &self.matrix - &other.matrix, basis: self.basis })
    }

    /// A², always Hermitian.
    pub fn square(&self) -> Operator {
        Operator::hermitize(&self.matrix * &self.matrix, self.basis)
    }

    pub fn pow(&self, k: u32) -> Operator {
        let mut out = CMat::identity(self.dim(), self.dim());
        for _ in 0..k {
            out = &out * &self.matrix;
        }
        Operator::hermitize(out, self.basis)
    }

    /// A B A for Hermitian A and B, which is Hermitian again.
    pub fn sandwich(&self, inner: &Operator) -> Result<Operator> {
        self.basis.require_same(&inner.basis)?;
        Ok(Operator::hermitize(&self.matrix * &inner.matrix * &self.matrix, self.basis))
    }

    /// Anticommutator {A, B}.
    pub fn anticommutator(&self, other: &Operator) -> Result<Operator> {
        self.basis.require_same(&other.basis)?;
        let m = &self.matrix * &other.matrix + &other.matrix * &self.matrix;
        Ok(Operator::hermitize(m, self.basis))
    }

    pub fn identity(basis: Basis) -> Operator {
        Operator { matrix: CMat::identity(basis.dim(), basis.dim()), basis }
    }

    pub fn commutes_with(&self, other: &Operator, tol: f64) -> bool {
        linalg::max_abs(&linalg::commutator(&self.matrix, &other.matrix)) <= tol
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::hermitian_eigenvalues(&self.matrix)
    }
}

/// Ladder-operator matrices (j_x, j_y, j_z) ordered m = +j, ..., -j.
pub fn spin_matrices_raw(two_j: u32) -> (CMat, CMat, CMat) {
    let d = two_j as usize + 1;
    let j = two_j as f64 / 2.0;
    let mut jp = CMat::zeros(d, d);
    let mut jz = CMat::zeros(d, d);
    for k in 0..d {
        let m = j - k as f64;
        jz[(k, k)] = c(m);
        if k > 0 {
            jp[(k - 1, k)] = c((j * (j + 1.0) - m * (m + 1.0)).sqrt());
        }
    }
    let jm = jp.adjoint();
    let jx = (&jp + &jm) * c(0.5);
    let jy = (&jp - &jm) * (-I * 0.5);
    (jx, jy, jz)
}

pub fn single_spin_matrices(j: f64) -> Result<(Operator, Operator, Operator)> {
    let two_j = two_j_from(j)?;
    let basis = Basis { kind: BasisKind::Symmetric, n_particles: 1, two_j };
    let (x, y, z) = spin_matrices_raw(two_j);
    Ok((
        Operator { matrix: x, basis },
        Operator { matrix: y, basis },
        Operator { matrix: z, basis },
    ))
}

/// Single-particle operator in the full-basis local ordering (m ascending).
fn to_local_order(m: &CMat) -> CMat {
    let d = m.nrows();
    CMat::from_fn(d, d, |a, b| m[(d - 1 - a, d - 1 - b)])
}

fn local_axis_matrix(two_j: u32, n: [f64; 3]) -> CMat {
    let (x, y, z) = spin_matrices_raw(two_j);
    x * c(n[0]) + y * c(n[1]) + z * c(n[2])
}

/// Embeds a local operator (given in +j..-j order) acting on one particle.
pub fn single_particle_operator(local: &CMat, particle: usize, basis: Basis) -> Result<Operator> {
    if basis.kind != BasisKind::Full {
        return Err(MetroError::BasisMismatch(
            "single-particle operators need the full basis".into(),
        ));
    }
    let n = basis.n_particles;
    if particle >= n {
        return Err(MetroError::OutOfRange(format!("particle {particle} of {n}")));
    }
    let d = basis.local_dim();
    if local.nrows() != d {
        return Err(MetroError::BasisMismatch("local operator has wrong size".into()));
    }
    let loc = to_local_order(local);
    let dim = basis.dim();
    let stride = d.pow((n - 1 - particle) as u32);
    let mut m = CMat::zeros(dim, dim);
    for col in 0..dim {
        let b = (col / stride) % d;
        let base = col - b * stride;
        for a in 0..d {
            let v = loc[(a, b)];
            if v != Complex64::new(0.0, 0.0) {
                m[(base + a * stride, col)] += v;
            }
        }
    }
    Operator::new(m, basis)
}

/// j_axis acting on one particle of a full-basis ensemble.
pub fn particle_spin_operator(axis: Axis, particle: usize, basis: Basis) -> Result<Operator> {
    single_particle_operator(&local_axis_matrix(basis.two_j, axis.unit()), particle, basis)
}

/// Collective operator n·J for a unit vector n.
pub fn collective_operator_along(n: [f64; 3], basis: Basis) -> Result<Operator> {
    let norm = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(MetroError::InvalidInput(format!("direction has norm {norm}")));
    }
    match basis.kind {
        BasisKind::Symmetric => {
            let two_big_j = basis.n_particles as u32 * basis.two_j;
            Ok(Operator { matrix: local_axis_matrix(two_big_j, n), basis })
        }
        BasisKind::Full => {
            let local = to_local_order(&local_axis_matrix(basis.two_j, n));
            let nparts = basis.n_particles;
            let d = basis.local_dim();
            let dim = basis.dim();
            let mut m = CMat::zeros(dim, dim);
            for p in 0..nparts {
                let stride = d.pow((nparts - 1 - p) as u32);
                for col in 0..dim {
                    let b = (col / stride) % d;
                    let base = col - b * stride;
                    for a in 0..d {
                        let v = local[(a, b)];
                        if v.norm_sqr() > 0.0 {
                            m[(base + a * stride, col)] += v;
                        }
                    }
                }
            }
            Ok(Operator { matrix: m, basis })
        }
    }
}

pub fn collective_operator(axis: Axis, basis: Basis) -> Result<Operator> {
    collective_operator_along(axis.unit(), basis)
}

/// (J_x, J_y, J_z) in one call.
pub fn collective_operators(basis: Basis) -> Result<[Operator; 3]> {
    Ok([
        collective_operator(Axis::X, basis)?,
        collective_operator(Axis::Y, basis)?,
        collective_operator(Axis::Z, basis)?,
    ])
}

/// J_x² + J_y² + J_z².
pub fn total_spin_squared(basis: Basis) -> Result<Operator> {
    let [x, y, z] = collective_operators(basis)?;
    x.square().plus(&y.square())?.plus(&z.square())
}

/// Collective raising operator J_+ in the full basis (real matrix).
pub(crate) fn full_raising(basis: Basis) -> CMat {
    let n = basis.n_particles;
    let d = basis.local_dim();
    let j = basis.spin();
    let dim = basis.dim();
    let mut m = CMat::zeros(dim, dim);
    for col in 0..dim {
        for p in 0..n {
            let stride = d.pow((n - 1 - p) as u32);
            let a = (col / stride) % d;
            if a + 1 < d {
                let mz = -j + a as f64;
                m[(col + stride, col)] += c((j * (j + 1.0) - mz * (mz + 1.0)).sqrt());
            }
        }
    }
    m
}

/// Isometry from the symmetric multiplet into the full basis. Column k is
/// the normalized state J_-^k |+j, ..., +j⟩.
pub fn symmetric_embedding(basis: Basis) -> Result<CMat> {
    let full = basis.with_kind(BasisKind::Full)?;
    let sym = basis.with_kind(BasisKind::Symmetric)?;
    let lower = full_raising(full).adjoint();
    let mut v = CMat::zeros(full.dim(), sym.dim());
    let mut cur = CVec::zeros(full.dim());
    cur[full.dim() - 1] = c(1.0);
    for k in 0..sym.dim() {
        v.set_column(k, &cur);
        let next = &lower * &cur;
        let norm = next.norm();
        if k + 1 < sym.dim() {
            cur = next / c(norm);
        }
    }
    Ok(v)
}

/// Restricts a full-basis operator to the symmetric multiplet.
pub fn restrict_to_symmetric(op: &Operator) -> Result<Operator> {
    if op.basis.kind != BasisKind::Full {
        return Err(MetroError::BasisMismatch("expected a full-basis operator".into()));
    }
    let v = symmetric_embedding(op.basis)?;
    let m = v.adjoint() * op.matrix() * &v;
    Ok(Operator::hermitize(m, op.basis.with_kind(BasisKind::Symmetric)?))
}

/// Density matrix or pure vector in a tagged basis.
#[derive(Clone, Debug)]
pub enum StateRepr {
    Pure(CVec),
    Mixed(CMat),
    /// Orthonormal columns with their probabilities; used when the spectral
    /// decomposition is known by construction.
    Spectral { probs: Vec<f64>, vectors: CMat },
}

#[derive(Clone, Debug)]
pub struct QuantumState {
    repr: StateRepr,
    basis: Basis,
}

impl QuantumState {
    pub fn pure(v: CVec, basis: Basis) -> Result<Self> {
        if v.len() != basis.dim() {
            return Err(MetroError::BasisMismatch("vector length differs from basis".into()));
        }
        let norm = v.norm();
        if (norm - 1.0).abs() > tol::STATE_NORM {
            return Err(MetroError::InvalidInput(format!("state norm is {norm}")));
        }
        Ok(QuantumState { repr: StateRepr::Pure(v), basis })
    }

    /// Normalizes the vector before wrapping it.
    pub fn pure_normalized(v: CVec, basis: Basis) -> Result<Self> {
        let norm = v.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(MetroError::InvalidInput("zero vector".into()));
        }
        Self::pure(v / c(norm), basis)
    }

    pub fn mixed(rho: CMat, basis: Basis) -> Result<Self> {
        if rho.nrows() != basis.dim() || !rho.is_square() {
            return Err(MetroError::BasisMismatch("density matrix size differs from basis".into()));
        }
        if !linalg::is_hermitian(&rho, tol::HERMITIAN_REL) {
            return Err(MetroError::InvalidInput("density matrix is not Hermitian".into()));
        }
        let tr = rho.trace();
        if (tr.re - 1.0).abs() > tol::STATE_TRACE || tr.im.abs() > tol::STATE_TRACE {
            return Err(MetroError::InvalidInput(format!("trace is {tr}")));
        }
        let min = linalg::hermitian_eigenvalues(&rho).first().copied().unwrap_or(0.0);
        if min < tol::STATE_MIN_EIGENVALUE {
            return Err(MetroError::InvalidInput(format!("negative eigenvalue {min}")));
        }
        Ok(QuantumState { repr: StateRepr::Mixed(rho), basis })
    }

    pub fn spectral(probs: Vec<f64>, vectors: CMat, basis: Basis) -> Result<Self> {
        if vectors.nrows() != basis.dim() || vectors.ncols() != probs.len() {
            return Err(MetroError::BasisMismatch("spectral data has wrong shape".into()));
        }
        if probs.iter().any(|&p| p < 0.0 || !p.is_finite()) {
            return Err(MetroError::InvalidInput("negative probability".into()));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > tol::STATE_TRACE {
            return Err(MetroError::InvalidInput(format!("probabilities sum to {total}")));
        }
        let gram = vectors.adjoint() * &vectors;
        let k = probs.len();
        if (gram - CMat::identity(k, k)).iter().any(|z| z.norm() > 1e-10) {
            return Err(MetroError::InvalidInput("spectral vectors are not orthonormal".into()));
        }
        Ok(QuantumState { repr: StateRepr::Spectral { probs, vectors }, basis })
    }

    /// Convex combination Σ p_k ρ_k of states in one basis.
    pub fn mixture(parts: &[(f64, &QuantumState)]) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| MetroError::InvalidInput("empty mixture".into()))?;
        let basis = first.1.basis;
        let mut rho = CMat::zeros(basis.dim(), basis.dim());
        for (p, s) in parts {
            basis.require_same(&s.basis)?;
            rho += s.density_matrix() * c(*p);
        }
        let rho = (&rho + rho.adjoint()) * c(0.5);
        Self::mixed(rho, basis)
    }

    pub fn maximally_mixed(basis: Basis) -> Result<Self> {
        let d = basis.dim();
        Self::mixed(CMat::identity(d, d) * c(1.0 / d as f64), basis)
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn repr(&self) -> &StateRepr {
        &self.repr
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn as_pure(&self) -> Option<&CVec> {
        match &self.repr {
            StateRepr::Pure(v) => Some(v),
            _ => None,
        }
    }

    pub fn density_matrix(&self) -> CMat {
        match &self.repr {
            StateRepr::Pure(v) => v * v.adjoint(),
            StateRepr::Mixed(m) => m.clone(),
            StateRepr::Spectral { probs, vectors } => {
                let mut scaled = vectors.clone();
                for (k, p) in probs.iter().enumerate() {
                    scaled.column_mut(k).scale_mut(*p);
                }
                &scaled * vectors.adjoint()
            }
        }
    }

    /// tr(ρ M) for an arbitrary square matrix.
    pub fn expect_matrix(&self, m: &CMat) -> Complex64 {
        match &self.repr {
            StateRepr::Pure(v) => linalg::sandwich(v, m),
            StateRepr::Mixed(rho) => {
                let n = rho.nrows();
                let mut acc = Complex64::new(0.0, 0.0);
                for i in 0..n {
                    for k in 0..n {
                        acc += rho[(i, k)] * m[(k, i)];
                    }
                }
                acc
            }
            StateRepr::Spectral { probs, vectors } => {
                let mv = m * vectors;
                let mut acc = Complex64::new(0.0, 0.0);
                for (k, p) in probs.iter().enumerate() {
                    acc += vectors.column(k).dotc(&mv.column(k)) * *p;
                }
                acc
            }
        }
    }

    /// ⟨A⟩ for a Hermitian operator.
    pub fn expect(&self, op: &Operator) -> Result<f64> {
        self.basis.require_same(&op.basis)?;
        Ok(self.expect_matrix(op.matrix()).re)
    }

    pub fn variance(&self, op: &Operator) -> Result<f64> {
        let m = self.expect(op)?;
        let m2 = self.expect_matrix(&(op.matrix() * op.matrix())).re;
        Ok(m2 - m * m)
    }

    /// tr(ρ σ) for two states in the same basis.
    pub fn fidelity_with_pure(&self, target: &CVec) -> Result<f64> {
        if target.len() != self.dim() {
            return Err(MetroError::BasisMismatch("target has wrong dimension".into()));
        }
        Ok(self.expect_matrix(&(target * target.adjoint())).re)
    }

    /// U ρ U† for a unitary matrix.
    pub fn evolve(&self, u: &CMat) -> QuantumState {
        let repr = match &self.repr {
            StateRepr::Pure(v) => StateRepr::Pure(u * v),
            StateRepr::Mixed(m) => StateRepr::Mixed(u * m * u.adjoint()),
            StateRepr::Spectral { probs, vectors } => {
                StateRepr::Spectral { probs: probs.clone(), vectors: u * vectors }
            }
        };
        QuantumState { repr, basis: self.basis }
    }

    /// Embeds a symmetric-basis state into the full basis.
    pub fn to_full(&self) -> Result<QuantumState> {
        if self.basis.kind == BasisKind::Full {
            return Ok(self.clone());
        }
        let v = symmetric_embedding(self.basis)?;
        let basis = self.basis.with_kind(BasisKind::Full)?;
        let repr = match &self.repr {
            StateRepr::Pure(x) => StateRepr::Pure(&v * x),
            StateRepr::Mixed(m) => StateRepr::Mixed(&v * m * v.adjoint()),
            StateRepr::Spectral { probs, vectors } => {
                StateRepr::Spectral { probs: probs.clone(), vectors: &v * vectors }
            }
        };
        Ok(QuantumState { repr, basis })
    }
}
