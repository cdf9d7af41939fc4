//! Lower bounds on the quantum Fisher information from measured expectation
//! values.
//!
//! For constraints ⟨W_k⟩ = w_k the optimal bound is
//!
//! ```text
//! B(w) = sup_r [ r·w - sup_μ λ_max( Σ_k r_k W_k - 4 (G - μ)² ) ]
//! ```
//!
//! Any r gives a valid bound, so an unconverged search still returns a
//! correct (if loose) number. The inner supremum over μ is certified by a
//! branch-and-bound on the convex part of λ_max(μ) + 4μ².

mod engine;
pub mod optimize;
mod scenarios;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{MetroError, Result};
use crate::linalg::{self, c, CMat};
use crate::spin_algebra::{Basis, BasisKind, Operator, QuantumState};
use crate::tolerances as tol;

use engine::Engine;
pub use optimize::{ellipsoid_max, golden_max, pattern_search, EllipsoidOutcome, SearchOutcome};

const ELLIPSOID_REGROWS: usize = 6;
pub use scenarios::*;

/// Measured expectation values ⟨W_k⟩ = w_k on a common basis.
#[derive(Clone, Debug)]
pub struct ConstraintSet {
    operators: Vec<Operator>,
    values: Vec<f64>,
    spectra: Vec<(f64, f64)>,
    basis: Basis,
}

impl ConstraintSet {
    pub fn new(operators: Vec<Operator>, values: Vec<f64>) -> Result<Self> {
        if operators.len() != values.len() {
            return Err(MetroError::InvalidInput(format!(
                "{} operators but {} values",
                operators.len(),
                values.len()
            )));
        }
        let Some(first) = operators.first() else {
            return Err(MetroError::InvalidInput("empty constraint set".into()));
        };
        let basis = first.basis();
        let mut spectra = Vec::with_capacity(operators.len());
        for (k, (op, &w)) in operators.iter().zip(&values).enumerate() {
            basis.require_same(&op.basis())?;
            if !w.is_finite() {
                return Err(MetroError::InvalidInput(format!("constraint {k} has value {w}")));
            }
            let eig = op.eigenvalues();
            let (lo, hi) = (eig[0], *eig.last().unwrap());
            let slack = tol::FEASIBILITY_REL * lo.abs().max(hi.abs()).max(1.0);
            if w < lo - slack || w > hi + slack {
                return Err(MetroError::Infeasible(format!(
                    "constraint {k}: value {w} outside the spectrum [{lo}, {hi}]"
                )));
            }
            spectra.push((lo, hi));
        }
        Ok(ConstraintSet { operators, values, spectra, basis })
    }

    /// Constraints with the values the given state produces.
    pub fn from_state(operators: Vec<Operator>, state: &QuantumState) -> Result<Self> {
        let values = operators.iter().map(|op| state.expect(op)).collect::<Result<Vec<_>>>()?;
        ConstraintSet::new(operators, values)
    }

    pub fn operators(&self) -> &[Operator] {
        &self.operators
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Same operators minus the k-th.
    pub fn without(&self, k: usize) -> Result<ConstraintSet> {
        let mut ops = self.operators.clone();
        let mut vals = self.values.clone();
        if k >= ops.len() {
            return Err(MetroError::OutOfRange(format!("constraint index {k}")));
        }
        ops.remove(k);
        vals.remove(k);
        ConstraintSet::new(ops, vals)
    }

    /// Same operators with new target values.
    pub fn with_values(&self, values: Vec<f64>) -> Result<ConstraintSet> {
        ConstraintSet::new(self.operators.clone(), values)
    }

    fn engine(&self, generator: &Operator) -> Result<Engine> {
        self.basis.require_same(&generator.basis())?;
        let mats: Vec<&CMat> = self.operators.iter().map(|o| o.matrix()).collect();
        Ok(Engine::new(&mats, &self.values, &self.spectra, generator.matrix()))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundResult {
    pub bound: f64,
    /// Optimal multipliers in the units of the original operators.
    pub r_star: Vec<f64>,
    pub mu_star: f64,
    pub iterations: usize,
    pub mu_grid_size: usize,
    pub converged: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LegendreOptions {
    pub mu_grid: usize,
    pub random_starts: usize,
    pub seed: u64,
    /// Objective evaluations allowed per start.
    pub max_evals: usize,
    /// Final step relative to the scale 4(Nj)².
    pub step_rel: f64,
    /// Initial r in operator units; used as an extra first start.
    pub warm_start: Option<Vec<f64>>,
}

impl Default for LegendreOptions {
    fn default() -> Self {
        LegendreOptions {
            mu_grid: tol::DEFAULT_MU_GRID,
            random_starts: tol::R_RANDOM_STARTS,
            seed: tol::R_SEED,
            max_evals: tol::R_MAX_EVALS,
            step_rel: tol::R_STEP_REL,
            warm_start: None,
        }
    }
}

impl LegendreOptions {
    pub fn with_warm_start(mut self, r: Vec<f64>) -> Self {
        self.warm_start = Some(r);
        self
    }

    pub fn with_random_starts(mut self, k: usize) -> Self {
        self.random_starts = k;
        self
    }
}

/// sup_μ λ_max[Σ_k r_k W_k - 4(G - μ)²] and the μ attaining it.
pub fn legendre_hat(r: &[f64], cs: &ConstraintSet, generator: &Operator, mu_grid: usize) -> Result<(f64, f64)> {
    if r.len() != cs.len() {
        return Err(MetroError::InvalidInput(format!("r has {} entries for {} constraints", r.len(), cs.len())));
    }
    let engine = cs.engine(generator)?;
    let scaled: Vec<f64> = r.iter().zip(&engine.radii).map(|(x, rad)| x * rad).collect();
    let hat = engine.hat(&scaled, mu_grid);
    let shift: f64 = r.iter().zip(cs.values()).map(|(x, w)| x * w).sum();
    Ok((hat.value + shift, hat.mu))
}

/// The bound r·w - ĥ(r) for one fixed r (operator units).
pub fn bound_at(r: &[f64], cs: &ConstraintSet, generator: &Operator, mu_grid: usize) -> Result<f64> {
    let (hat, _) = legendre_hat(r, cs, generator, mu_grid)?;
    let rw: f64 = r.iter().zip(cs.values()).map(|(x, w)| x * w).sum();
    Ok(rw - hat)
}

/// Optimal lower bound on F_Q[ρ, generator] over all states compatible
/// with the constraints.
pub fn qfi_lower_bound(cs: &ConstraintSet, generator: &Operator, opts: &LegendreOptions) -> Result<BoundResult> {
    let engine = cs.engine(generator)?;
    let dim = engine.dim_r();
    let scale = engine.cap().max(1.0);
    let mut evals = 0usize;

    let warm = match &opts.warm_start {
        Some(w) if w.len() != dim => {
            return Err(MetroError::InvalidInput(format!("warm start has {} entries for {dim} constraints", w.len())));
        }
        Some(w) => Some(w.iter().zip(&engine.radii).map(|(x, rad)| x * rad).collect::<Vec<f64>>()),
        None => None,
    };
    let min_step = opts.step_rel * scale;

    if engine.subgradient(&vec![0.0; dim], 0.0).is_some() {
        // Band form: the objective is concave with cheap supergradients.
        let mut evals = 0usize;
        let mut f = |r: &[f64]| {
            evals += 1;
            let hat = engine.hat(r, opts.mu_grid);
            let g = engine.subgradient(r, hat.mu).expect("band form");
            (-hat.value, g.into_iter().map(|x| -x).collect())
        };
        let mut centre = warm.unwrap_or_else(|| vec![0.0; dim]);
        let mut radius = 4.0 * scale;
        let mut out = ellipsoid_max(&mut f, centre.clone(), radius, min_step, opts.max_evals);
        // Grow the ball while the maximiser sits near its edge.
        for _ in 0..ELLIPSOID_REGROWS {
            let moved = out.x.iter().zip(&centre).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
            if moved < 0.5 * radius {
                break;
            }
            centre = out.x.clone();
            radius *= 8.0;
            let next = ellipsoid_max(&mut f, centre.clone(), radius, min_step, opts.max_evals);
            if next.value >= out.value {
                out = next;
            }
        }
        let value = out.value;
        let hat = engine.hat(&out.x, opts.mu_grid);
        let bound = (-hat.value).max(0.0).min(engine.cap());
        if !out.converged {
            log::warn!("r search stopped with gap {:e}; bound {bound} is valid but may be loose", out.upper - value);
        }
        let r_star = out.x.iter().zip(&engine.radii).map(|(x, rad)| x / rad).collect();
        return Ok(BoundResult {
            bound,
            r_star,
            mu_star: hat.mu,
            iterations: evals,
            mu_grid_size: opts.mu_grid,
            converged: out.converged,
        });
    }

    let mut objective = |r: &[f64]| {
        evals += 1;
        -engine.hat(r, opts.mu_grid).value
    };
    let mut starts: Vec<(Vec<f64>, f64)> = Vec::new();
    if let Some(w) = warm {
        starts.push((w, scale * 1e-2));
    }
    starts.push((vec![0.0; dim], scale / 4.0));
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for _ in 0..opts.random_starts {
        let x = (0..dim).map(|_| rng.random_range(-scale / 4.0..=scale / 4.0)).collect();
        starts.push((x, scale / 4.0));
    }

    let mut best: Option<SearchOutcome> = None;
    for (x0, step) in starts {
        let out = pattern_search(&mut objective, x0, step, min_step, opts.max_evals);
        log::debug!("start finished: value {} after {} evals (converged {})", out.value, out.evals, out.converged);
        if best.as_ref().is_none_or(|b| out.value > b.value) {
            best = Some(out);
        }
    }
    let best = best.expect("at least one start");
    let hat = engine.hat(&best.x, opts.mu_grid);
    let bound = (-hat.value).max(0.0).min(engine.cap());
    let r_star = best.x.iter().zip(&engine.radii).map(|(x, rad)| x / rad).collect();
    if !best.converged {
        log::warn!("r search hit the evaluation cap; bound {bound} is valid but may be loose");
    }
    Ok(BoundResult {
        bound,
        r_star,
        mu_star: hat.mu,
        iterations: evals,
        mu_grid_size: opts.mu_grid,
        converged: best.converged,
    })
}

/// sup_x [r x - f(x)] over `search` for convex f.
pub fn legendre_1d<F: Fn(f64) -> f64>(f: F, r: f64, search: (f64, f64)) -> Result<f64> {
    let (a, b) = search;
    if !(a.is_finite() && b.is_finite()) || a > b {
        return Err(MetroError::InvalidInput(format!("search interval [{a}, {b}] must be finite")));
    }
    let x_tol = 1e-12 * (1.0 + a.abs().max(b.abs()));
    let (x, v) = golden_max(|x| r * x - f(x), a, b, x_tol);
    if !v.is_finite() {
        return Err(MetroError::Numerical(format!("objective is unbounded near x = {x}")));
    }
    Ok(v)
}

/// Outcome of checking whether a bound computed in the symmetric multiplet
/// also holds for general states.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidityReport {
    pub permutation_invariant: bool,
    pub nondegenerate: bool,
    pub top_gap: f64,
}

impl ValidityReport {
    pub fn certifies(&self) -> bool {
        self.permutation_invariant && self.nondegenerate
    }
}

/// Basis-index maps of the adjacent transpositions (p, p+1).
fn adjacent_swaps(basis: &Basis) -> Vec<Vec<usize>> {
    let n = basis.n_particles;
    let d = basis.local_dim();
    let dim = basis.dim();
    (0..n.saturating_sub(1))
        .map(|p| {
            let (wp, wq) = (d.pow((n - 1 - p) as u32), d.pow((n - 2 - p) as u32));
            (0..dim)
                .map(|idx| {
                    let (dp, dq) = ((idx / wp) % d, (idx / wq) % d);
                    idx - dp * wp - dq * wq + dq * wp + dp * wq
                })
                .collect()
        })
        .collect()
}

/// True when the operator commutes with every particle exchange.
pub fn is_permutation_invariant(op: &Operator) -> bool {
    let basis = op.basis();
    if basis.kind == BasisKind::Symmetric {
        return true;
    }
    let m = op.matrix();
    let cut = 1e-10 * linalg::max_abs(m).max(1.0);
    adjacent_swaps(&basis).iter().all(|perm| {
        let dim = perm.len();
        (0..dim).all(|i| (0..dim).all(|j| (m[(perm[i], perm[j])] - m[(i, j)]).norm() <= cut))
    })
}

/// Checks permutation invariance of the constraints and whether the maximal
/// eigenvalue of the Legendre argument at (r*, μ*) is non-degenerate in the
/// full space.
pub fn symmetric_validity_check(cs: &ConstraintSet, generator: &Operator, result: &BoundResult) -> Result<ValidityReport> {
    cs.basis.require_same(&generator.basis())?;
    if result.r_star.len() != cs.len() {
        return Err(MetroError::InvalidInput("result does not match the constraint set".into()));
    }
    let permutation_invariant = cs.operators.iter().all(is_permutation_invariant) && is_permutation_invariant(generator);
    let dim = cs.basis.dim();
    let mut arg = CMat::zeros(dim, dim);
    for (op, &r) in cs.operators.iter().zip(&result.r_star) {
        arg += op.matrix() * c(r);
    }
    let shifted = generator.matrix() - CMat::identity(dim, dim) * c(result.mu_star);
    arg -= &shifted * &shifted * c(4.0);
    let vals = linalg::hermitian_eigenvalues(&arg);
    let top_gap = if dim > 1 { vals[dim - 1] - vals[dim - 2] } else { f64::INFINITY };
    let nondegenerate = top_gap > tol::DEGENERACY_REL_GAP * vals[dim - 1].abs().max(1.0);
    Ok(ValidityReport { permutation_invariant, nondegenerate, top_gap })
}
