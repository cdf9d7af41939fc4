//! Largest-eigenvalue evaluation and the supremum over μ.
//!
//! Everything works in the eigenbasis of the generator, where the penalty
//! -4(G - μ)² is diagonal. Constraint operators are normalised to unit
//! spectral radius and centred on their target value, so the objective at
//! r = 0 is exactly zero.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::linalg::{self, CMat};
use crate::tolerances as tol;

const GRID_CHUNK: usize = 16;
const MU_MAX_SPLITS: usize = 20_000;

/// Lower band of a Hermitian matrix. Entry (i, i-d) is stored at
/// `data[i * (bw + 1) + d]`.
#[derive(Clone, Debug)]
pub(crate) struct Band {
    pub n: usize,
    pub bw: usize,
    pub data: Vec<Complex64>,
}

impl Band {
    pub fn zeros(n: usize, bw: usize) -> Self {
        Band { n, bw, data: vec![Complex64::new(0.0, 0.0); n * (bw + 1)] }
    }

    /// Smallest bandwidth that keeps every entry above `cutoff`.
    pub fn bandwidth_of(m: &CMat, cutoff: f64) -> usize {
        let n = m.nrows();
        let mut bw = 0;
        for j in 0..n {
            for i in (j + bw + 1)..n {
                if m[(i, j)].norm() > cutoff {
                    bw = bw.max(i - j);
                }
            }
        }
        bw
    }

    pub fn from_dense(m: &CMat, bw: usize) -> Self {
        let n = m.nrows();
        let mut b = Band::zeros(n, bw);
        for i in 0..n {
            for d in 0..=bw.min(i) {
                b.data[i * (bw + 1) + d] = m[(i, i - d)];
            }
            b.data[i * (bw + 1)].im = 0.0;
        }
        b
    }

    #[inline]
    pub fn at(&self, i: usize, d: usize) -> Complex64 {
        self.data[i * (self.bw + 1) + d]
    }

    pub fn diag(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.at(i, 0).re).collect()
    }

    pub fn axpy(&mut self, a: f64, other: &Band) {
        debug_assert_eq!(self.n, other.n);
        let w = other.bw.min(self.bw);
        for i in 0..self.n {
            for d in 0..=w {
                self.data[i * (self.bw + 1) + d] += other.at(i, d) * a;
            }
        }
    }

    /// y = M x where the diagonal of M is replaced by `diag`.
    fn matvec(&self, diag: &[f64], x: &[Complex64], y: &mut [Complex64]) {
        let (n, bw) = (self.n, self.bw);
        for i in 0..n {
            y[i] = x[i] * diag[i];
        }
        for i in 0..n {
            for d in 1..=bw.min(i) {
                let a = self.at(i, d);
                y[i] += a * x[i - d];
                y[i - d] += a.conj() * x[i];
            }
        }
    }
}

/// Scratch space for repeated factorisations of one matrix size.
pub(crate) struct Workspace {
    chol: Vec<Complex64>,
    v: Vec<Complex64>,
    y: Vec<Complex64>,
    mv: Vec<Complex64>,
}

impl Workspace {
    pub fn new(n: usize, bw: usize) -> Self {
        let zero = Complex64::new(0.0, 0.0);
        let v = (0..n).map(|i| Complex64::new(1.0 + 0.37 * (1.3 * i as f64).sin(), 0.0)).collect();
        Workspace { chol: vec![zero; n * (bw + 1)], v, y: vec![zero; n], mv: vec![zero; n] }
    }
}

/// Cholesky factor of σI - M (M given by its band and diagonal); false if
/// the shifted matrix is not positive definite.
fn factor_shifted(m: &Band, diag: &[f64], sigma: f64, l: &mut [Complex64]) -> bool {
    let (n, bw) = (m.n, m.bw);
    let w = bw + 1;
    for i in 0..n {
        let j0 = i.saturating_sub(bw);
        for j in j0..=i {
            let mut s = if i == j {
                Complex64::new(sigma - diag[i], 0.0)
            } else {
                -m.at(i, i - j)
            };
            for k in j0.max(j.saturating_sub(bw))..j {
                s -= l[i * w + (i - k)] * l[j * w + (j - k)].conj();
            }
            if i == j {
                if !(s.re > 0.0) {
                    return false;
                }
                l[i * w] = Complex64::new(s.re.sqrt(), 0.0);
            } else {
                l[i * w + (i - j)] = s / l[j * w].re;
            }
        }
    }
    true
}

/// Overwrites `x` with (LL†)⁻¹ x.
fn solve_factored(l: &[Complex64], n: usize, bw: usize, x: &mut [Complex64]) {
    let w = bw + 1;
    for i in 0..n {
        let mut s = x[i];
        for k in i.saturating_sub(bw)..i {
            s -= l[i * w + (i - k)] * x[k];
        }
        x[i] = s / l[i * w].re;
    }
    for i in (0..n).rev() {
        let mut s = x[i];
        for k in (i + 1)..(i + bw + 1).min(n) {
            s -= l[k * w + (k - i)].conj() * x[k];
        }
        x[i] = s / l[i * w].re;
    }
}

fn normalize(x: &mut [Complex64]) -> f64 {
    let norm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm > 0.0 && norm.is_finite() {
        x.iter_mut().for_each(|z| *z /= norm);
    }
    norm
}

/// Rayleigh quotient of `ws.v` and the residual norm |Mv - ρv|.
fn rayleigh(m: &Band, diag: &[f64], ws: &mut Workspace) -> (f64, f64) {
    m.matvec(diag, &ws.v, &mut ws.mv);
    let rho: f64 = ws.v.iter().zip(&ws.mv).map(|(a, b)| (a.conj() * b).re).sum();
    let res = ws.v.iter().zip(&ws.mv).map(|(a, b)| (b - a * rho).norm_sqr()).sum::<f64>().sqrt();
    (rho, res)
}

/// Upper estimate of the largest eigenvalue of the band matrix whose
/// diagonal is `diag`. Cholesky factorisations of σI - M certify upper
/// brackets; shifted inverse iteration supplies the lower ones. `ws.v`
/// carries the eigenvector estimate between calls.
pub(crate) fn band_lambda_max(m: &Band, diag: &[f64], ws: &mut Workspace) -> f64 {
    let (n, bw) = (m.n, m.bw);
    let mut hi = f64::NEG_INFINITY;
    let mut radius_max: f64 = 0.0;
    let mut lo = f64::NEG_INFINITY;
    let mut rows = vec![0.0; n];
    for i in 0..n {
        for d in 1..=bw.min(i) {
            let a = m.at(i, d).norm();
            rows[i] += a;
            rows[i - d] += a;
        }
    }
    for i in 0..n {
        hi = hi.max(diag[i] + rows[i]);
        lo = lo.max(diag[i]);
        radius_max = radius_max.max(diag[i].abs() + rows[i]);
    }
    if bw == 0 || n == 1 {
        return lo;
    }
    let tol = tol::LAMBDA_MAX_REL * radius_max.max(f64::MIN_POSITIVE);
    normalize(&mut ws.v);
    let (rho, res) = rayleigh(m, diag, ws);
    lo = lo.max(rho);
    // Some eigenvalue lies within the residual of ρ; aim there first and
    // widen geometrically if the top one is further out.
    let mut delta = res.max(0.5 * tol);
    for _ in 0..300 {
        let gap = hi - lo;
        if gap <= tol {
            break;
        }
        let sigma = (lo + delta).min(lo + 0.5 * gap);
        if factor_shifted(m, diag, sigma, &mut ws.chol) {
            hi = sigma;
            ws.y.copy_from_slice(&ws.v);
            solve_factored(&ws.chol, n, bw, &mut ws.y);
            if normalize(&mut ws.y).is_finite() {
                std::mem::swap(&mut ws.v, &mut ws.y);
                let (rho, res) = rayleigh(m, diag, ws);
                lo = lo.max(rho);
                delta = res.max(0.5 * tol);
            }
        } else {
            lo = sigma;
            delta *= 4.0;
        }
    }
    hi
}

/// Largest eigenvalue of diag(δ) + s ψψ† from the secular equation, where
/// `weights` holds |ψ_i|².
pub(crate) fn rank_one_lambda_max(delta: &[f64], weights: &[f64], s: f64) -> f64 {
    let dmax = delta.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let scale = delta.iter().fold(s.abs(), |a, d| a.max(d.abs())).max(1.0);
    let merge = 1e-14 * scale;
    let mut order: Vec<usize> = (0..delta.len()).collect();
    order.sort_by(|&a, &b| delta[a].total_cmp(&delta[b]));
    // (pole, weight, multiplicity)
    let mut groups: Vec<(f64, f64, usize)> = Vec::new();
    for &i in &order {
        match groups.last_mut() {
            Some(g) if delta[i] - g.0 <= merge => {
                g.1 += weights[i];
                g.2 += 1;
            }
            _ => groups.push((delta[i], weights[i], 1)),
        }
    }
    let mut best = f64::NEG_INFINITY;
    let mut poles = Vec::new();
    let mut total = 0.0;
    for &(p, w, mult) in &groups {
        if w <= 1e-30 {
            best = best.max(p);
        } else {
            poles.push((p, w));
            total += w;
            if mult > 1 {
                best = best.max(p);
            }
        }
    }
    if poles.is_empty() || s == 0.0 {
        return dmax;
    }
    let secular = |x: f64| 1.0 - s * poles.iter().map(|&(p, w)| w / (x - p)).sum::<f64>();
    let top = poles.last().unwrap().0;
    let (mut a, mut b) = if s > 0.0 {
        (top, top + s * total)
    } else if poles.len() == 1 {
        let root = top + s * total;
        return best.max(root);
    } else {
        (poles[poles.len() - 2].0.max(top + s * total), top)
    };
    // f increases through the root when s > 0 and decreases otherwise.
    let rising = s > 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b || b - a <= 1e-15 * scale {
            break;
        }
        let f = secular(mid);
        if (f < 0.0) == rising {
            a = mid;
        } else {
            b = mid;
        }
    }
    best.max(b)
}

#[derive(Clone, Debug)]
pub(crate) enum Form {
    /// Σ_k r_k B_k with B_k the centred, normalised constraint bands.
    Band { bw: usize, ops: Vec<Band> },
    /// sign·ψψ† - w', with weights |ψ_i|².
    RankOne { weights: Vec<f64>, sign: f64, centre: f64 },
}

#[derive(Clone, Debug)]
pub(crate) struct Engine {
    pub n: usize,
    /// Generator eigenvalues in working-basis order.
    pub gen: Vec<f64>,
    pub form: Form,
    pub radii: Vec<f64>,
    pub mu_range: (f64, f64),
    /// Interval actually searched; half of `mu_range` when the problem is
    /// mirror-symmetric in μ.
    search: (f64, f64),
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct HatValue {
    /// Certified upper estimate of sup_μ λ_max.
    pub value: f64,
    pub mu: f64,
}

impl Engine {
    /// `ops` are dense constraint matrices and `values` their targets;
    /// `spectra` holds (λ_min, λ_max) of each operator.
    pub fn new(ops: &[&CMat], values: &[f64], spectra: &[(f64, f64)], generator: &CMat) -> Self {
        let n = generator.nrows();
        let gscale = linalg::max_abs(generator).max(1.0);
        let mut off = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    off = off.max(generator[(i, j)].norm());
                }
            }
        }
        let (gen, basis) = if off <= 1e-14 * gscale {
            ((0..n).map(|i| generator[(i, i)].re).collect::<Vec<_>>(), None)
        } else {
            let (vals, vecs) = linalg::hermitian_eigen(generator);
            (vals, Some(vecs))
        };
        let transformed: Vec<CMat> = ops
            .iter()
            .map(|w| match &basis {
                Some(v) => v.adjoint() * *w * v,
                None => (*w).clone(),
            })
            .collect();
        let radii: Vec<f64> = spectra.iter().map(|&(a, b)| a.abs().max(b.abs()).max(f64::MIN_POSITIVE)).collect();
        let centres: Vec<f64> = values.iter().zip(&radii).map(|(w, r)| w / r).collect();
        let lo = gen.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = gen.iter().copied().fold(f64::NEG_INFINITY, f64::max);

        let form = Self::rank_one_form(&transformed, &radii, &centres).unwrap_or_else(|| {
            let bw = transformed
                .iter()
                .zip(&radii)
                .map(|(m, r)| Band::bandwidth_of(m, 1e-13 * r))
                .max()
                .unwrap_or(0);
            let ops = transformed
                .iter()
                .zip(radii.iter().zip(&centres))
                .map(|(m, (r, w))| {
                    let mut b = Band::from_dense(&(m * linalg::c(1.0 / r)), bw);
                    for i in 0..n {
                        b.data[i * (bw + 1)].re -= w;
                    }
                    b
                })
                .collect();
            Form::Band { bw, ops }
        });
        let search = if mirror_symmetric(&gen, &form) { (0.5 * (lo + hi), hi) } else { (lo, hi) };
        Engine { n, gen, form, radii, mu_range: (lo, hi), search }
    }

    fn rank_one_form(ops: &[CMat], radii: &[f64], centres: &[f64]) -> Option<Form> {
        if ops.len() != 1 {
            return None;
        }
        let (vals, vecs) = linalg::hermitian_eigen(&ops[0]);
        let cut = 1e-10 * radii[0];
        let big: Vec<usize> = (0..vals.len()).filter(|&k| vals[k].abs() > cut).collect();
        if big.len() != 1 {
            return None;
        }
        let k = big[0];
        let weights = vecs.column(k).iter().map(|z| z.norm_sqr()).collect();
        Some(Form::RankOne { weights, sign: vals[k].signum(), centre: centres[0] })
    }

    pub fn dim_r(&self) -> usize {
        self.radii.len()
    }

    /// Largest value the penalty term can cost, (g_max - g_min)².
    pub fn cap(&self) -> f64 {
        (self.mu_range.1 - self.mu_range.0).powi(2)
    }

    fn penalty(&self, mu: f64, out: &mut [f64]) {
        for (o, g) in out.iter_mut().zip(&self.gen) {
            *o = -4.0 * (g - mu) * (g - mu);
        }
    }

    /// Evaluator for a fixed normalised r.
    fn evaluator<'a>(&'a self, r: &[f64]) -> Evaluator<'a> {
        match &self.form {
            Form::Band { bw, ops } => {
                let mut base = Band::zeros(self.n, *bw);
                for (op, &rk) in ops.iter().zip(r) {
                    if rk != 0.0 {
                        base.axpy(rk, op);
                    }
                }
                let base_diag = base.diag();
                Evaluator::Band { engine: self, base, base_diag }
            }
            Form::RankOne { weights, sign, centre } => {
                Evaluator::RankOne { engine: self, weights, s: r[0] * sign, shift: -r[0] * centre }
            }
        }
    }

    /// sup_μ λ_max[Σ r_k (W'_k - w'_k) - 4(G - μ)²] for normalised r.
    pub fn hat(&self, r: &[f64], grid: usize) -> HatValue {
        let ev = self.evaluator(r);
        let (lo, hi) = self.search;
        // Keep the grid spacing of the full range when only half is searched.
        let full = self.mu_range.1 - self.mu_range.0;
        let grid = if full > 0.0 && hi - lo < full { grid.div_ceil(2) } else { grid }.max(2);
        if hi - lo <= 0.0 {
            let mut scratch = ev.scratch();
            let v = ev.eval(lo, &mut scratch);
            return HatValue { value: v, mu: lo };
        }
        let mus: Vec<f64> = (0..grid).map(|i| lo + (hi - lo) * i as f64 / (grid - 1) as f64).collect();
        let lams: Vec<f64> = mus
            .par_chunks(GRID_CHUNK)
            .flat_map_iter(|chunk| {
                let mut scratch = ev.scratch();
                chunk.iter().map(|&mu| ev.eval(mu, &mut scratch)).collect::<Vec<_>>()
            })
            .collect();
        let scale = 1.0 + 2.0 * r.iter().map(|x| x.abs()).sum::<f64>() + self.cap() * 4.0;
        let eps = tol::MU_CERT_REL * scale;

        let convex = |mu: f64, lam: f64| lam + 4.0 * mu * mu;
        // Upper bound of λ(μ) on [a, b]: chord of the convex part minus 4μ².
        let upper = |a: f64, b: f64, ca: f64, cb: f64| {
            let slope = (cb - ca) / (b - a);
            let m = (slope / 8.0).clamp(a, b);
            ca + slope * (m - a) - 4.0 * m * m
        };
        let (mut best, mut best_mu) = (f64::NEG_INFINITY, lo);
        for (&mu, &lam) in mus.iter().zip(&lams) {
            if lam > best {
                best = lam;
                best_mu = mu;
            }
        }
        let mut open: Vec<(f64, f64, f64, f64, f64)> = Vec::with_capacity(grid);
        for i in 0..grid - 1 {
            let (a, b) = (mus[i], mus[i + 1]);
            let (ca, cb) = (convex(a, lams[i]), convex(b, lams[i + 1]));
            open.push((a, b, ca, cb, upper(a, b, ca, cb)));
        }
        let mut scratch = ev.scratch();
        let mut splits = 0;
        // Largest upper bound among discarded intervals; keeps the returned
        // value above the true supremum.
        let mut pruned = f64::NEG_INFINITY;
        loop {
            open.retain(|iv| {
                let keep = iv.4 > best + eps;
                if !keep {
                    pruned = pruned.max(iv.4);
                }
                keep
            });
            let Some(k) = (0..open.len()).max_by(|&x, &y| open[x].4.total_cmp(&open[y].4)) else {
                break;
            };
            if splits >= MU_MAX_SPLITS {
                let top = open[k].4;
                log::warn!("mu search stopped after {splits} splits, gap {:e}", top - best);
                return HatValue { value: top.max(best).max(pruned), mu: best_mu };
            }
            let (a, b, ca, cb, _) = open.swap_remove(k);
            let mid = 0.5 * (a + b);
            let lam = ev.eval(mid, &mut scratch);
            splits += 1;
            if lam > best {
                best = lam;
                best_mu = mid;
            }
            let cm = convex(mid, lam);
            open.push((a, mid, ca, cm, upper(a, mid, ca, cm)));
            open.push((mid, b, cm, cb, upper(mid, b, cm, cb)));
        }
        HatValue { value: best.max(pruned), mu: best_mu }
    }

    /// Subgradient of the hat function at r: ⟨v|B_k|v⟩ for the top
    /// eigenvector v at μ*. Only available for the band form.
    pub fn subgradient(&self, r: &[f64], mu: f64) -> Option<Vec<f64>> {
        let Form::Band { bw, ops } = &self.form else {
            return None;
        };
        let ev = self.evaluator(r);
        let Evaluator::Band { base, base_diag, .. } = &ev else {
            return None;
        };
        let mut diag = vec![0.0; self.n];
        self.penalty(mu, &mut diag);
        for (d, b) in diag.iter_mut().zip(base_diag) {
            *d += b;
        }
        let mut ws = Workspace::new(self.n, *bw);
        let lam = band_lambda_max(base, &diag, &mut ws);
        normalize(&mut ws.v);
        let (rho, _) = rayleigh(base, &diag, &mut ws);
        let top = (0..self.n).max_by(|&a, &b| diag[a].total_cmp(&diag[b])).unwrap_or(0);
        if !(rho >= diag[top]) || *bw == 0 {
            ws.v.iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
            ws.v[top] = Complex64::new(1.0, 0.0);
        }
        log::trace!("subgradient at mu {mu}: lambda {lam}, rayleigh {rho}");
        let mut y = vec![Complex64::new(0.0, 0.0); self.n];
        Some(
            ops.iter()
                .map(|op| {
                    op.matvec(&op.diag(), &ws.v, &mut y);
                    ws.v.iter().zip(&y).map(|(a, b)| (a.conj() * b).re).sum()
                })
                .collect(),
        )
    }
}

/// Whether some reversal i -> n-1-i, optionally with alternating signs and
/// complex conjugation, maps every band to itself while reflecting the
/// generator spectrum. Then λ(μ) = λ(2c - μ) about the spectral centre c.
fn mirror_symmetric(gen: &[f64], form: &Form) -> bool {
    let Form::Band { bw, ops } = form else {
        return false;
    };
    let n = gen.len();
    let centre = 0.5 * (gen[0] + gen[n - 1]);
    let gscale = gen.iter().fold(1.0f64, |a, g| a.max(g.abs()));
    if (0..n).any(|i| (gen[i] + gen[n - 1 - i] - 2.0 * centre).abs() > 1e-12 * gscale) {
        return false;
    }
    let holds = |alternate: bool, conjugate: bool| {
        ops.iter().all(|b| {
            let cut = 1e-12 * b.data.iter().fold(1.0f64, |a, z| a.max(z.norm()));
            (0..n).all(|i| {
                (0..=(*bw).min(i)).all(|d| {
                    let j = i - d;
                    // (i, j) maps to (n-1-i, n-1-j), which lies above the diagonal.
                    let (pi, pj) = (n - 1 - j, n - 1 - i);
                    let mut image = b.at(pi, pi - pj).conj();
                    if conjugate {
                        image = image.conj();
                    }
                    if alternate && d % 2 == 1 {
                        image = -image;
                    }
                    (image - b.at(i, d)).norm() <= cut
                })
            })
        })
    };
    [(false, false), (true, false), (false, true), (true, true)].into_iter().any(|(a, c)| holds(a, c))
}

enum Evaluator<'a> {
    Band { engine: &'a Engine, base: Band, base_diag: Vec<f64> },
    RankOne { engine: &'a Engine, weights: &'a [f64], s: f64, shift: f64 },
}

struct Scratch {
    ws: Option<Workspace>,
    diag: Vec<f64>,
}

impl Evaluator<'_> {
    fn scratch(&self) -> Scratch {
        match self {
            Evaluator::Band { engine, base, .. } => {
                Scratch { ws: Some(Workspace::new(engine.n, base.bw)), diag: vec![0.0; engine.n] }
            }
            Evaluator::RankOne { engine, .. } => Scratch { ws: None, diag: vec![0.0; engine.n] },
        }
    }

    fn eval(&self, mu: f64, sc: &mut Scratch) -> f64 {
        match self {
            Evaluator::Band { engine, base, base_diag } => {
                engine.penalty(mu, &mut sc.diag);
                for (d, b) in sc.diag.iter_mut().zip(base_diag) {
                    *d += b;
                }
                band_lambda_max(base, &sc.diag, sc.ws.as_mut().expect("band scratch"))
            }
            Evaluator::RankOne { engine, weights, s, shift } => {
                engine.penalty(mu, &mut sc.diag);
                sc.diag.iter_mut().for_each(|d| *d += shift);
                rank_one_lambda_max(&sc.diag, weights, *s)
            }
        }
    }
}
