//! Test-side oracles built independently of the library code paths.
#![allow(dead_code)]

use metrobound::linalg::{CMat, CVec};
use metrobound::spin_algebra::{Basis, QuantumState};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn cx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    CMat::from_fn(ar * br, ac * bc, |i, j| a[(i / br, j / bc)] * b[(i % br, j % bc)])
}

/// Pauli/2 in the ascending (m = -1/2, +1/2) ordering.
pub fn qubit_ops_ascending() -> [CMat; 3] {
    let h = 0.5;
    [
        CMat::from_row_slice(2, 2, &[cx(0.0, 0.0), cx(h, 0.0), cx(h, 0.0), cx(0.0, 0.0)]),
        CMat::from_row_slice(2, 2, &[cx(0.0, 0.0), cx(0.0, h), cx(0.0, -h), cx(0.0, 0.0)]),
        CMat::from_row_slice(2, 2, &[cx(-h, 0.0), cx(0.0, 0.0), cx(0.0, 0.0), cx(h, 0.0)]),
    ]
}

/// Spin-j matrices in ascending m built from the standard formulae.
pub fn spin_ops_ascending(j: f64) -> [CMat; 3] {
    let d = (2.0 * j).round() as usize + 1;
    let m = |k: usize| -j + k as f64;
    let mut jp = CMat::zeros(d, d);
    for k in 0..d - 1 {
        jp[(k + 1, k)] = cx((j * (j + 1.0) - m(k) * (m(k) + 1.0)).sqrt(), 0.0);
    }
    let jm = jp.adjoint();
    let jz = CMat::from_fn(d, d, |a, b| if a == b { cx(m(a), 0.0) } else { cx(0.0, 0.0) });
    [(&jp + &jm) * cx(0.5, 0.0), (&jp - &jm) * cx(0.0, -0.5), jz]
}

/// Σ_n 1 ⊗ ... ⊗ op ⊗ ... ⊗ 1 by explicit Kronecker products.
pub fn kron_collective(local: &CMat, n: usize) -> CMat {
    let d = local.nrows();
    let id = CMat::identity(d, d);
    let mut total = CMat::zeros(d.pow(n as u32), d.pow(n as u32));
    for p in 0..n {
        let mut term = CMat::identity(1, 1);
        for q in 0..n {
            term = kron(&term, if q == p { local } else { &id });
        }
        total += term;
    }
    total
}

pub fn kron_single(local: &CMat, particle: usize, n: usize) -> CMat {
    let d = local.nrows();
    let id = CMat::identity(d, d);
    let mut term = CMat::identity(1, 1);
    for q in 0..n {
        term = kron(&term, if q == particle { local } else { &id });
    }
    term
}

/// Uniform superposition of all N-bit strings with `zeros` zeros; bit 0 is m = -1/2.
pub fn brute_dicke(n: usize, zeros: usize) -> CVec {
    let mut v = CVec::zeros(1 << n);
    let mut count: f64 = 0.0;
    for idx in 0..(1usize << n) {
        if n - idx.count_ones() as usize == zeros {
            v[idx] = cx(1.0, 0.0);
            count += 1.0;
        }
    }
    v / cx(count.sqrt(), 0.0)
}

pub fn binomial(n: u64, k: u64) -> f64 {
    let mut r = 1.0;
    for i in 0..k {
        r = r * (n - i) as f64 / (i + 1) as f64;
    }
    r
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_vector(rng: &mut ChaCha8Rng, dim: usize) -> CVec {
    let v = CVec::from_fn(dim, |_, _| cx(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
    let n = v.norm();
    v / cx(n, 0.0)
}

/// Random full-rank density matrix G G† / tr.
pub fn random_density(rng: &mut ChaCha8Rng, dim: usize, rank: usize) -> CMat {
    let g = CMat::from_fn(dim, rank, |_, _| cx(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
    let rho = &g * g.adjoint();
    let tr = rho.trace();
    let rho = rho / tr;
    (&rho + rho.adjoint()) * cx(0.5, 0.0)
}

pub fn random_state(rng: &mut ChaCha8Rng, basis: Basis, rank: usize) -> QuantumState {
    QuantumState::mixed(random_density(rng, basis.dim(), rank), basis).unwrap()
}

pub fn random_hermitian(rng: &mut ChaCha8Rng, dim: usize) -> CMat {
    let g = CMat::from_fn(dim, dim, |_, _| cx(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
    (&g + g.adjoint()) * cx(0.5, 0.0)
}

/// QFI from the textbook double sum over a full eigendecomposition.
pub fn qfi_double_sum(rho: &CMat, a: &CMat, b: &CMat) -> f64 {
    let eig = rho.clone().symmetric_eigen();
    let vecs = &eig.eigenvectors;
    let p = &eig.eigenvalues;
    let ab = vecs.adjoint() * a * vecs;
    let bb = vecs.adjoint() * b * vecs;
    let n = rho.nrows();
    let mut f = cx(0.0, 0.0);
    for l in 0..n {
        for v in 0..n {
            let s = p[l] + p[v];
            if s > 1e-12 {
                f += ab[(l, v)] * bb[(v, l)] * (2.0 * (p[l] - p[v]).powi(2) / s);
            }
        }
    }
    f.re
}

/// max |A - B| entrywise.
pub fn max_diff(a: &CMat, b: &CMat) -> f64 {
    (a - b).iter().fold(0.0, |m, z| m.max(z.norm()))
}

/// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}
