//! Quantum Fisher information, classical Fisher information and the usual
//! thresholds built from them.

use crate::error::{MetroError, Result};
use crate::linalg::{self, CMat, CVec};
use crate::spin_algebra::{collective_operators, Operator, QuantumState, StateRepr};
use crate::tolerances as tol;
use num_complex::Complex64;
use serde::Serialize;

/// Spectral data of a state, eigenvalues descending.
#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    pub probs: Vec<f64>,
    pub vectors: CMat,
    pub rank_tol: f64,
}

impl EigenDecomposition {
    pub fn of(state: &QuantumState) -> Self {
        let (probs, vectors) = match state.repr() {
            StateRepr::Pure(v) => (vec![1.0], CMat::from_columns(&[v.clone()])),
            StateRepr::Spectral { probs, vectors } => (probs.clone(), vectors.clone()),
            StateRepr::Mixed(rho) => {
                let (vals, vecs) = linalg::hermitian_eigen(rho);
                (vals, vecs)
            }
        };
        let mut order: Vec<usize> = (0..probs.len()).collect();
        order.sort_by(|&a, &b| probs[b].total_cmp(&probs[a]));
        let clipped: Vec<f64> = order
            .iter()
            .map(|&k| if probs[k] > tol::EIGEN_CLIP { probs[k].max(0.0) } else { probs[k] })
            .collect();
        let mut sorted = CMat::zeros(vectors.nrows(), order.len());
        for (col, &k) in order.iter().enumerate() {
            sorted.set_column(col, &vectors.column(k));
        }
        EigenDecomposition { probs: clipped, vectors: sorted, rank_tol: tol::QFI_PAIR_SKIP / 2.0 }
    }

    /// Eigenpairs with p above half the pair-skip threshold.
    pub fn support(&self) -> (Vec<f64>, CMat) {
        let keep: Vec<usize> =
            (0..self.probs.len()).filter(|&k| self.probs[k] > self.rank_tol).collect();
        let mut v = CMat::zeros(self.vectors.nrows(), keep.len());
        for (col, &k) in keep.iter().enumerate() {
            v.set_column(col, &self.vectors.column(k));
        }
        (keep.iter().map(|&k| self.probs[k]).collect(), v)
    }
}

/// State prepared for repeated QFI evaluations.
pub struct Spectrum {
    probs: Vec<f64>,
    vectors: CMat,
    pure: Option<CVec>,
}

/// Operator images A|λ⟩ and projected blocks ⟨λ|A|ν⟩ on the support.
pub struct Projected {
    image: CMat,
    block: CMat,
}

impl Spectrum {
    pub fn new(state: &QuantumState) -> Self {
        if let Some(v) = state.as_pure() {
            return Spectrum {
                probs: vec![1.0],
                vectors: CMat::from_columns(&[v.clone()]),
                pure: Some(v.clone()),
            };
        }
        let (probs, vectors) = EigenDecomposition::of(state).support();
        Spectrum { probs, vectors, pure: None }
    }

    pub fn rank(&self) -> usize {
        self.probs.len()
    }

    pub fn project(&self, a: &CMat) -> Projected {
        let image = a * &self.vectors;
        let block = self.vectors.adjoint() * &image;
        Projected { image, block }
    }

    /// 2 Σ (p_λ-p_ν)²/(p_λ+p_ν) A_λν B_νλ with the complement of the support
    /// summed in closed form.
    pub fn cross_projected(&self, a: &Projected, b: &Projected) -> Complex64 {
        if self.pure.is_some() {
            let ab = a.image.column(0).dotc(&b.image.column(0));
            return (ab - a.block[(0, 0)] * b.block[(0, 0)]) * 4.0;
        }
        let r = self.rank();
        let mut inner = Complex64::new(0.0, 0.0);
        let mut outer = Complex64::new(0.0, 0.0);
        for l in 0..r {
            let pl = self.probs[l];
            let mut in_ab = Complex64::new(0.0, 0.0);
            let mut in_ba = Complex64::new(0.0, 0.0);
            for v in 0..r {
                let pv = self.probs[v];
                let prod = a.block[(l, v)] * b.block[(v, l)];
                in_ab += prod;
                in_ba += b.block[(l, v)] * a.block[(v, l)];
                let s = pl + pv;
                if s >= tol::QFI_PAIR_SKIP && l != v {
                    inner += prod * ((pl - pv) * (pl - pv) / s);
                }
            }
            let full_ab = a.image.column(l).dotc(&b.image.column(l));
            let full_ba = b.image.column(l).dotc(&a.image.column(l));
            outer += (full_ab - in_ab + full_ba - in_ba) * pl;
        }
        (inner + outer) * 2.0
    }

    pub fn cross(&self, a: &CMat, b: &CMat) -> Complex64 {
        let pa = self.project(a);
        if std::ptr::eq(a, b) {
            return self.cross_projected(&pa, &pa);
        }
        let pb = self.project(b);
        self.cross_projected(&pa, &pb)
    }

    pub fn qfi(&self, g: &CMat) -> f64 {
        let p = self.project(g);
        self.cross_projected(&p, &p).re.max(0.0)
    }
}

/// F_Q[ρ, G].
pub fn qfi(state: &QuantumState, generator: &Operator) -> Result<f64> {
    state.basis().require_same(&generator.basis())?;
    Ok(Spectrum::new(state).qfi(generator.matrix()))
}

/// F_Q[ρ, A, B], the real part of the two-operator generalization.
pub fn qfi_cross(state: &QuantumState, a: &Operator, b: &Operator) -> Result<f64> {
    state.basis().require_same(&a.basis())?;
    state.basis().require_same(&b.basis())?;
    if !a.commutes_with(b, tol::COMMUTE_TOL) {
        log::warn!("qfi_cross called with non-commuting operators");
    }
    let z = Spectrum::new(state).cross(a.matrix(), b.matrix());
    check_real(z)
}

fn check_real(z: Complex64) -> Result<f64> {
    if z.im.abs() > tol::QFI_CROSS_IMAG * (1.0 + z.re.abs()) {
        return Err(MetroError::Numerical(format!("cross QFI has imaginary part {}", z.im)));
    }
    Ok(z.re)
}

/// Symmetric 2x2 QFI matrix.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QfiMatrix(pub [[f64; 2]; 2]);

impl QfiMatrix {
    pub fn get(&self, i: usize, k: usize) -> f64 {
        self.0[i][k]
    }

    pub fn determinant(&self) -> f64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }
}

pub fn qfi_matrix(state: &QuantumState, a: &Operator, b: &Operator) -> Result<QfiMatrix> {
    state.basis().require_same(&a.basis())?;
    state.basis().require_same(&b.basis())?;
    let s = Spectrum::new(state);
    let (pa, pb) = (s.project(a.matrix()), s.project(b.matrix()));
    let f00 = s.cross_projected(&pa, &pa).re;
    let f11 = s.cross_projected(&pb, &pb).re;
    let f01 = check_real(s.cross_projected(&pa, &pb))?;
    Ok(QfiMatrix([[f00, f01], [f01, f11]]))
}

/// (1/3) Σ_l F_Q[ρ, J_l].
pub fn avg_qfi(state: &QuantumState) -> Result<f64> {
    let ops = collective_operators(state.basis())?;
    let s = Spectrum::new(state);
    Ok(ops.iter().map(|o| s.qfi(o.matrix())).sum::<f64>() / 3.0)
}

fn validate_povm(povm: &[Operator], dim: usize) -> Result<()> {
    if povm.is_empty() {
        return Err(MetroError::InvalidInput("empty POVM".into()));
    }
    let mut total = CMat::zeros(dim, dim);
    for e in povm {
        let min = e.eigenvalues().first().copied().unwrap_or(0.0);
        if min < -tol::POVM_COMPLETENESS {
            return Err(MetroError::InvalidInput(format!("POVM element has eigenvalue {min}")));
        }
        total += e.matrix();
    }
    let dev = linalg::max_abs(&(total - CMat::identity(dim, dim)));
    if dev > tol::POVM_COMPLETENESS {
        return Err(MetroError::InvalidInput(format!("POVM sums to identity only within {dev}")));
    }
    Ok(())
}

/// Fisher information of the outcome distribution of `povm` after the
/// evolution e^{-iθG}.
pub fn classical_fisher(
    state: &QuantumState,
    generator: &Operator,
    theta: f64,
    povm: &[Operator],
) -> Result<f64> {
    let basis = state.basis();
    basis.require_same(&generator.basis())?;
    for e in povm {
        basis.require_same(&e.basis())?;
    }
    validate_povm(povm, basis.dim())?;

    let (vals, vecs) = linalg::hermitian_eigen(generator.matrix());
    let probs_at = |t: f64| -> Vec<f64> {
        let mut u = vecs.clone();
        for (k, &g) in vals.iter().enumerate() {
            let ph = Complex64::from_polar(1.0, -t * g);
            for i in 0..u.nrows() {
                u[(i, k)] *= ph;
            }
        }
        let u = u * vecs.adjoint();
        let evolved = state.evolve(&u);
        povm.iter().map(|e| evolved.expect_matrix(e.matrix()).re).collect()
    };

    let h = tol::CFI_STEP;
    let p0 = probs_at(theta);
    let diff = |step: f64| -> Vec<f64> {
        let (pp, pm) = (probs_at(theta + step), probs_at(theta - step));
        pp.iter().zip(&pm).map(|(a, b)| (a - b) / (2.0 * step)).collect()
    };
    let d1 = diff(h);
    let d2 = diff(h / 2.0);
    let mut f = 0.0;
    for m in 0..povm.len() {
        if p0[m] < tol::CFI_PROB_FLOOR {
            continue;
        }
        let d = (4.0 * d2[m] - d1[m]) / 3.0;
        f += d * d / p0[m];
    }
    Ok(f)
}

/// Projectors onto the eigenspaces of an operator, one per distinct
/// eigenvalue.
pub fn eigenprojectors(op: &Operator) -> Result<Vec<Operator>> {
    let (vals, vecs) = linalg::hermitian_eigen(op.matrix());
    let mut out = Vec::new();
    let mut start = 0;
    while start < vals.len() {
        let mut end = start + 1;
        while end < vals.len() && (vals[end] - vals[start]).abs() < 1e-8 {
            end += 1;
        }
        let block = vecs.columns(start, end - start);
        out.push(Operator::hermitize(&block * block.adjoint(), op.basis()));
        start = end;
    }
    Ok(out)
}

/// ⟨J_y⟩² / Var(J_x).
pub fn pezze_smerzi_bound(mean_jy: f64, var_jx: f64) -> Result<f64> {
    if !(var_jx > 0.0) {
        return Err(MetroError::InvalidInput(format!("variance {var_jx} must be positive")));
    }
    Ok(mean_jy * mean_jy / var_jx)
}

pub fn shot_noise_limit(n: usize) -> f64 {
    n as f64
}

pub fn heisenberg_limit(n: usize) -> f64 {
    (n * n) as f64
}

/// Maximal QFI of k-producible states of N qubits, s k² + (N - s k)².
pub fn k_producible_bound(k: usize, n: usize) -> f64 {
    let s = n / k;
    let rest = n - s * k;
    (s * k * k + rest * rest) as f64
}

/// Smallest entanglement depth compatible with a measured QFI.
pub fn entanglement_depth(qfi_value: f64, n: usize) -> Result<usize> {
    if n == 0 {
        return Err(MetroError::InvalidInput("N must be positive".into()));
    }
    if qfi_value > heisenberg_limit(n) * (1.0 + 1e-12) {
        return Err(MetroError::OutOfRange(format!("QFI {qfi_value} exceeds N² = {}", n * n)));
    }
    let depth = (1..=n).rev().find(|&k| qfi_value > k_producible_bound(k, n));
    Ok(depth.map_or(1, |k| (k + 1).min(n)))
}

/// 2N + N² (1 - ⟨J_y⟩²/(N/2)²).
pub fn polarized_precision_cap(mean_jy: f64, n: usize) -> f64 {
    let nf = n as f64;
    let jmax = nf / 2.0;
    2.0 * nf + nf * nf * (1.0 - (mean_jy / jmax).powi(2))
}
