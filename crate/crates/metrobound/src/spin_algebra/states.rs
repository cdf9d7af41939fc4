use super::{
    spin_matrices_raw, total_spin_squared, Axis, Basis, BasisKind, Operator,
    QuantumState,
};
use crate::error::{MetroError, Result};
use crate::linalg::{self, c, CMat, CVec, I};
use crate::tolerances as tol;
use nalgebra::DMatrix;
use num_complex::Complex64;
use std::f64::consts::{FRAC_1_SQRT_2, PI};

/// Qubit unitary taking z eigenstates to eigenstates along `axis`, in
/// (m = +1/2, m = -1/2) ordering. Phases follow
/// |1⟩_x = (|0⟩+|1⟩)/√2, |0⟩_x = (-|0⟩+|1⟩)/√2,
/// |1⟩_y = (i|0⟩+|1⟩)/√2, |0⟩_y = (-i|0⟩+|1⟩)/√2.
pub fn qubit_axis_unitary(axis: Axis) -> CMat {
    let h = FRAC_1_SQRT_2;
    match axis {
        Axis::Z => CMat::identity(2, 2),
        Axis::X => CMat::from_row_slice(2, 2, &[c(h), c(h), c(h), c(-h)]),
        Axis::Y => CMat::from_row_slice(2, 2, &[c(h), c(h), I * h, -I * h]),
    }
}

/// Spin-J representation of a 2x2 unitary, ordered M = +J, ..., -J.
pub fn spin_representation(u: &CMat, two_big_j: u32) -> CMat {
    let det = u[(0, 0)] * u[(1, 1)] - u[(0, 1)] * u[(1, 0)];
    let phi = det.arg() / 2.0;
    let v = u * Complex64::from_polar(1.0, -phi);
    let a = v[(0, 0)];
    let cc = v[(1, 0)];
    let sn = [-cc.im, cc.re, -a.im];
    let s = (sn[0] * sn[0] + sn[1] * sn[1] + sn[2] * sn[2]).sqrt();
    let dim = two_big_j as usize + 1;
    let global = Complex64::from_polar(1.0, two_big_j as f64 * phi);
    if s < 1e-15 {
        let sign = if a.re < 0.0 && two_big_j % 2 == 1 { -1.0 } else { 1.0 };
        return CMat::identity(dim, dim) * (global * sign);
    }
    let t = 2.0 * s.atan2(a.re);
    let (x, y, z) = spin_matrices_raw(two_big_j);
    let gen = x * c(sn[0] / s) + y * c(sn[1] / s) + z * c(sn[2] / s);
    linalg::unitary_exp(&gen, t) * global
}

/// Spin-J rotation taking |J, M⟩_z to |J, M⟩_axis.
pub fn axis_rotation(axis: Axis, two_big_j: u32) -> CMat {
    spin_representation(&qubit_axis_unitary(axis), two_big_j)
}

/// Applies the same local d x d matrix (full-basis ordering) to every particle.
fn apply_product(v: &CVec, local: &CMat, basis: Basis) -> CVec {
    let n = basis.n_particles;
    let d = basis.local_dim();
    let mut cur = v.clone();
    let mut next = CVec::zeros(v.len());
    for p in 0..n {
        let stride = d.pow((n - 1 - p) as u32);
        next.fill(c(0.0));
        for idx in 0..v.len() {
            let amp = cur[idx];
            if amp.norm_sqr() == 0.0 {
                continue;
            }
            let b = (idx / stride) % d;
            let base = idx - b * stride;
            for a in 0..d {
                next[base + a * stride] += local[(a, b)] * amp;
            }
        }
        std::mem::swap(&mut cur, &mut next);
    }
    cur
}

fn reversed(m: &CMat) -> CMat {
    let d = m.nrows();
    CMat::from_fn(d, d, |a, b| m[(d - 1 - a, d - 1 - b)])
}

/// Symmetric-multiplet vector with M = Nj - k, expressed in `basis` and
/// rotated to `axis`.
fn symmetric_level(k: usize, axis: Axis, basis: Basis) -> Result<QuantumState> {
    match basis.kind {
        BasisKind::Symmetric => {
            let mut v = CVec::zeros(basis.dim());
            v[k] = c(1.0);
            if axis != Axis::Z {
                let two_big_j = basis.n_particles as u32 * basis.two_j();
                v = axis_rotation(axis, two_big_j) * v;
            }
            QuantumState::pure_normalized(v, basis)
        }
        BasisKind::Full => {
            let sym = basis.with_kind(BasisKind::Symmetric)?;
            let iso = super::symmetric_embedding(sym)?;
            let mut v: CVec = iso.column(k).into_owned();
            if axis != Axis::Z {
                let local = reversed(&axis_rotation(axis, basis.two_j()));
                v = apply_product(&v, &local, basis);
            }
            QuantumState::pure_normalized(v, basis)
        }
    }
}

fn require_qubits(basis: &Basis) -> Result<()> {
    if basis.two_j() != 1 {
        return Err(MetroError::InvalidInput("state is defined for spin-1/2 particles".into()));
    }
    Ok(())
}

fn require_n(basis: &Basis, n: usize) -> Result<()> {
    if basis.n_particles != n {
        return Err(MetroError::BasisMismatch(format!(
            "basis has {} particles, state asks for {n}",
            basis.n_particles
        )));
    }
    Ok(())
}

/// Dicke state with `n` excitations (particles in |0⟩) along `axis`.
pub fn dicke_state(n_particles: usize, n: usize, axis: Axis, basis: Basis) -> Result<QuantumState> {
    require_qubits(&basis)?;
    require_n(&basis, n_particles)?;
    if n > n_particles {
        return Err(MetroError::OutOfRange(format!("n = {n} > N = {n_particles}")));
    }
    symmetric_level(n, axis, basis)
}

/// (|0...0⟩ + |1...1⟩)/√2.
pub fn ghz_state(n_particles: usize, basis: Basis) -> Result<QuantumState> {
    require_qubits(&basis)?;
    require_n(&basis, n_particles)?;
    let mut v = CVec::zeros(basis.dim());
    v[0] = c(FRAC_1_SQRT_2);
    v[basis.dim() - 1] = c(FRAC_1_SQRT_2);
    QuantumState::pure(v, basis)
}

/// Every particle in its m = +j state along `axis`.
pub fn polarized_state(n_particles: usize, j: f64, axis: Axis, basis: Basis) -> Result<QuantumState> {
    require_n(&basis, n_particles)?;
    if (basis.spin() - j).abs() > 1e-12 {
        return Err(MetroError::BasisMismatch(format!("basis spin {} vs j = {j}", basis.spin())));
    }
    symmetric_level(0, axis, basis)
}

/// Uniform mixture over the J = 0 subspace, full basis.
pub fn pi_singlet(n_particles: usize, j: f64) -> Result<QuantumState> {
    pi_singlet_in(Basis::full(n_particles, j)?)
}

pub fn pi_singlet_in(basis: Basis) -> Result<QuantumState> {
    let n = basis.n_particles;
    let j = basis.spin();
    let two_j = basis.two_j() as usize;
    let none = MetroError::NoSinglet { n, j };
    if basis.kind != BasisKind::Full {
        return Err(MetroError::BasisMismatch("singlets live in the full basis".into()));
    }
    if (n * two_j) % 2 != 0 {
        return Err(none);
    }
    // 2M + Nj·2 = Σ 2a where a is the ascending digit; M = 0 needs Σa = Nj.
    let d = basis.local_dim();
    let target = n * two_j / 2;
    let digit_sum = |idx: usize| -> usize {
        let mut s = 0;
        let mut x = idx;
        for _ in 0..n {
            s += x % d;
            x /= d;
        }
        s
    };
    let sector0: Vec<usize> = (0..basis.dim()).filter(|&i| digit_sum(i) == target).collect();
    let sector1: Vec<usize> = (0..basis.dim()).filter(|&i| digit_sum(i) == target + 1).collect();
    let mut pos1 = std::collections::HashMap::with_capacity(sector1.len());
    for (k, &i) in sector1.iter().enumerate() {
        pos1.insert(i, k);
    }
    let mut k_mat = DMatrix::<f64>::zeros(sector1.len(), sector0.len());
    for (col, &idx) in sector0.iter().enumerate() {
        for p in 0..n {
            let stride = d.pow((n - 1 - p) as u32);
            let a = (idx / stride) % d;
            if a + 1 < d {
                let m = -j + a as f64;
                let amp = (j * (j + 1.0) - m * (m + 1.0)).sqrt();
                k_mat[(pos1[&(idx + stride)], col)] += amp;
            }
        }
    }
    let j2 = k_mat.transpose() * &k_mat;
    let eig = j2.symmetric_eigen();
    let kernel: Vec<usize> = (0..sector0.len())
        .filter(|&k| eig.eigenvalues[k].abs() < tol::SINGLET_EIGENVALUE)
        .collect();
    if kernel.is_empty() {
        return Err(none);
    }
    let mut vectors = CMat::zeros(basis.dim(), kernel.len());
    for (col, &k) in kernel.iter().enumerate() {
        for (row, &idx) in sector0.iter().enumerate() {
            vectors[(idx, col)] = c(eig.eigenvectors[(row, k)]);
        }
    }
    let p = 1.0 / kernel.len() as f64;
    QuantumState::spectral(vec![p; kernel.len()], vectors, basis)
}

/// Same as [`pi_singlet_in`] but built by diagonalizing J² on the whole
/// space; slow, kept as a cross-check.
pub fn pi_singlet_dense(basis: Basis) -> Result<QuantumState> {
    let j2 = total_spin_squared(basis)?;
    let (vals, vecs) = linalg::hermitian_eigen(j2.matrix());
    let kernel: Vec<usize> =
        (0..vals.len()).filter(|&k| vals[k].abs() < tol::SINGLET_EIGENVALUE).collect();
    if kernel.is_empty() {
        return Err(MetroError::NoSinglet { n: basis.n_particles, j: basis.spin() });
    }
    let mut rho = CMat::zeros(basis.dim(), basis.dim());
    for &k in &kernel {
        let v = vecs.column(k);
        rho += &v * v.adjoint();
    }
    rho *= c(1.0 / kernel.len() as f64);
    QuantumState::mixed((&rho + rho.adjoint()) * c(0.5), basis)
}

#[derive(Clone, Debug)]
pub struct GroundState {
    pub state: QuantumState,
    pub energy: f64,
    pub gap: f64,
    pub degenerate: bool,
}

/// Ground state of sign·J_x² - λ J_y in the symmetric multiplet.
pub fn squeezing_ground_state(
    n_particles: usize,
    lambda: f64,
    sign: f64,
    basis: Basis,
) -> Result<GroundState> {
    if basis.kind != BasisKind::Symmetric {
        return Err(MetroError::BasisMismatch("expected the symmetric basis".into()));
    }
    require_n(&basis, n_particles)?;
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(MetroError::OutOfRange(format!("lambda = {lambda}")));
    }
    if sign != 1.0 && sign != -1.0 {
        return Err(MetroError::InvalidInput(format!("sign = {sign}")));
    }
    let jx = super::collective_operator(Axis::X, basis)?;
    let jy = super::collective_operator(Axis::Y, basis)?;
    let h = jx.square().scale(sign).minus(&jy.scale(lambda))?;
    ground_state_of(&h, lambda == 0.0 && n_particles >= 2)
}

/// Lowest eigenvector of a Hermitian operator with gap diagnostics.
pub fn ground_state_of(h: &Operator, force_degenerate: bool) -> Result<GroundState> {
    let (vals, vecs) = linalg::hermitian_eigen(h.matrix());
    let width = vals.last().unwrap() - vals[0];
    let gap = if vals.len() > 1 { vals[1] - vals[0] } else { f64::INFINITY };
    let degenerate = force_degenerate || gap < tol::DEGENERACY_REL_GAP * width.max(1.0);
    if degenerate {
        log::debug!("ground state is degenerate (gap {gap:e})");
    }
    let state = QuantumState::pure_normalized(vecs.column(0).into_owned(), h.basis())?;
    Ok(GroundState { state, energy: vals[0], gap, degenerate })
}

/// |⟨D_{N,m}|_z |D_{N,N/2}⟩_x|².
pub fn dicke_overlap(n: usize, m: usize) -> Result<f64> {
    if n % 2 != 0 {
        return Err(MetroError::InvalidInput(format!("N = {n} must be even")));
    }
    if m > n {
        return Err(MetroError::OutOfRange(format!("m = {m} > N = {n}")));
    }
    let m = m.min(n - m);
    if m % 2 == 1 {
        return Ok(0.0);
    }
    // a(0) = binom(N, N/2)/2^N, then the ratio a(m+2)/a(m) term by term.
    let half = n / 2;
    let mut a = 1.0;
    for i in 1..=half {
        a *= (2 * i - 1) as f64 / (2 * i) as f64;
    }
    for k in 0..m / 2 {
        let r = (half - k) as f64 / (k + 1) as f64;
        a *= r * r * ((2 * k + 1) * (2 * k + 2)) as f64
            / ((n - 2 * k) as f64 * (n - 2 * k - 1) as f64);
    }
    Ok(a)
}

/// Amplitudes ⟨J, M|Ω⟩ of the coherent state e^{-iφJ_z} e^{-iθJ_y}|J, J⟩,
/// ordered M = +J, ..., -J.
pub fn coherent_state(two_big_j: u32, theta: f64, phi: f64) -> CVec {
    let n = two_big_j as usize;
    let lf = linalg::ln_factorials(n);
    let (ch, sh) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let big_j = two_big_j as f64 / 2.0;
    CVec::from_fn(n + 1, |k, _| {
        let m = big_j - k as f64;
        let mag = linalg::ln_binomial(&lf, n, k).exp().sqrt()
            * ch.powi((n - k) as i32)
            * sh.powi(k as i32);
        Complex64::from_polar(mag, -m * phi)
    })
}

/// Husimi Q function normalized to one over the sphere.
pub fn husimi_q(state: &QuantumState, phi: f64, theta: f64) -> Result<f64> {
    let basis = state.basis();
    if basis.kind != BasisKind::Symmetric {
        return Err(MetroError::BasisMismatch("Husimi Q needs the symmetric basis".into()));
    }
    let two_big_j = basis.n_particles as u32 * basis.two_j();
    let omega = coherent_state(two_big_j, theta, phi);
    let overlap = state.fidelity_with_pure(&omega)?;
    Ok((two_big_j as f64 + 1.0) / (4.0 * PI) * overlap)
}
