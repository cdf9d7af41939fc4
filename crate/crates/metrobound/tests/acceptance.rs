//! Acceptance suite. Each test checks one criterion and prints a single
//! PASS/FAIL line; thresholds come from `tolerances::acceptance`.

mod common;

use common::*;
use metrobound::dicke_bounds::{experimental_moments, optimal_precision, second_moment_bound};
use metrobound::gradient_bounds::*;
use metrobound::legendre_bounds::*;
use metrobound::linalg::{unitary_exp, CMat};
use metrobound::qfi_core::qfi;
use metrobound::spin_algebra::*;
use metrobound::tolerances::{acceptance as acc, DEFAULT_BETA};
use std::f64::consts::PI;
use std::time::Instant;

fn report(id: u32, name: &str, failures: &[String], started: Instant, limit: f64) {
    let secs = started.elapsed().as_secs_f64();
    let mut all = failures.to_vec();
    if secs > limit {
        all.push(format!("took {secs:.2} s, limit {limit} s"));
    }
    if all.is_empty() {
        println!("criterion {id} ({name}): PASS in {secs:.2} s");
    } else {
        println!("criterion {id} ({name}): FAIL: {}", all.join("; "));
    }
    assert!(all.is_empty(), "criterion {id} failed: {}", all.join("; "));
}

fn check(failures: &mut Vec<String>, ok: bool, msg: impl FnOnce() -> String) {
    if !ok {
        failures.push(msg());
    }
}

#[test]
fn criterion_1_pure_dicke_qfi() {
    let t = Instant::now();
    let mut bad = vec![];
    for n in (2..=20usize).step_by(2) {
        let b = Basis::symmetric(n, 0.5).unwrap();
        let st = dicke_state(n, n / 2, Axis::X, b).unwrap();
        let jz = collective_operator(Axis::Z, b).unwrap();
        let got = qfi(&st, &jz).unwrap();
        let want = (n * (n + 2)) as f64 / 2.0;
        check(&mut bad, (got - want).abs() < acc::DICKE_QFI_ABS, || format!("N {n}: {got} vs {want}"));
    }
    report(1, "pure Dicke QFI", &bad, t, acc::DICKE_QFI_SECONDS);
}

#[test]
fn criterion_2_dicke_experimental_bound() {
    let t = Instant::now();
    let mut bad = vec![];
    let m = experimental_moments();
    let nf = m.n as f64;
    let best = optimal_precision(&m).unwrap().0 / nf;
    let second = second_moment_bound(m.jx2, m.jy2, m.n, DEFAULT_BETA).unwrap() / nf;
    check(&mut bad, (best - acc::EXPERIMENT_OPTIMAL_PER_N).abs() <= acc::EXPERIMENT_PER_N_ABS, || {
        format!("optimal {best:.4} N")
    });
    check(&mut bad, (second - acc::EXPERIMENT_SECOND_MOMENT_PER_N).abs() <= acc::EXPERIMENT_PER_N_ABS, || {
        format!("second moment {second:.4} N")
    });
    report(2, "Dicke experimental bound", &bad, t, acc::EXPERIMENT_SECONDS);
}

#[test]
fn criterion_3_legendre_1d() {
    let t = Instant::now();
    let mut bad = vec![];
    let f = |x: f64| x * x - 1.9 * x - 0.3;
    for r in [-2.0, 0.0, 1.0, 5.0] {
        let got = legendre_1d(f, r, (-50.0, 50.0)).unwrap();
        let want = r * r / 4.0 + 0.95 * r + 1.2025;
        check(&mut bad, (got - want).abs() < acc::LEGENDRE_1D_ABS, || format!("r {r}: {got} vs {want}"));
    }
    report(3, "Legendre transform in one variable", &bad, t, acc::LEGENDRE_1D_SECONDS);
}

#[test]
fn criterion_4_ghz_fidelity() {
    let t = Instant::now();
    let mut bad = vec![];
    let opts = LegendreOptions::default();
    for n in [4usize, 6] {
        let nf = n as f64;
        for f in [0.5, 0.6, 0.8, 1.0] {
            let num = ghz_fidelity_bound_numeric(f, n, &opts).unwrap().bound;
            // Independent form: 4N²(F - 1/2)² above one half.
            let want = if f > 0.5 { 4.0 * nf * nf * (f - 0.5).powi(2) } else { 0.0 };
            check(&mut bad, (num - want).abs() < acc::GHZ_NUMERIC_VS_ANALYTIC, || format!("N {n} F {f}: {num} vs {want}"));
            let closed = ghz_fidelity_bound(f, n).unwrap();
            check(&mut bad, (closed - want).abs() < acc::GHZ_NUMERIC_VS_ANALYTIC, || format!("closed form N {n} F {f}: {closed}"));
            if f == 0.5 || f == 1.0 {
                let end = if f == 1.0 { nf * nf } else { 0.0 };
                check(&mut bad, (num - end).abs() < acc::GHZ_ENDPOINT_ABS, || format!("endpoint N {n} F {f}: {num}"));
            }
        }
    }
    report(4, "GHZ fidelity bound", &bad, t, acc::GHZ_SECONDS);
}

#[test]
fn criterion_5_fidelity_table() {
    let t = Instant::now();
    let mut bad = vec![];
    let opts = LegendreOptions::default();
    for r in FIDELITY_RECORDS {
        let got = r.bound_per_particle(&opts).unwrap();
        check(&mut bad, (got - r.reported).abs() <= r.tolerance(), || {
            format!("{:?}{} F {}: {got:.4} outside {} ± {}", r.target, r.n, r.fidelity, r.reported, r.tolerance())
        });
    }
    report(5, "fidelity table", &bad, t, acc::FIDELITY_TABLE_SECONDS);
}

#[test]
fn criterion_6_spin_squeezing() {
    let t = Instant::now();
    let mut bad = vec![];
    let opts = LegendreOptions::default();
    let mut warm: Option<Vec<f64>> = None;
    for n in [50usize, 200] {
        let o = match &warm {
            Some(r) => opts.clone().with_warm_start(r.clone()),
            None => opts.clone(),
        };
        let res = squeezing_scaled_per_particle(n, acc::SQUEEZING_ALPHA, acc::SQUEEZING_XI2, &o).unwrap();
        let rel = (res.bound - acc::SQUEEZING_PER_N).abs() / acc::SQUEEZING_PER_N;
        check(&mut bad, rel <= acc::SQUEEZING_REL, || format!("N' {n}: {:.5} per particle", res.bound));
        warm = Some(res.r_star.clone());
    }
    for n in (4..=20usize).step_by(2) {
        for l in [0.02, 0.05, 0.1, 0.2, 0.3, 0.5, 0.75, 1.0, 2.0, 5.0] {
            let p = squeezing_boundary_point(n, l * n as f64, &opts).unwrap();
            let gap = p.relative_gap();
            check(&mut bad, gap <= acc::PEZZE_GAP_REL, || format!("boundary N {n} λ {l}N: gap {gap:.4}"));
        }
    }
    report(6, "spin-squeezing experiment", &bad, t, f64::INFINITY);
}

#[test]
fn criterion_7_dicke_many_particle() {
    let t = Instant::now();
    let mut bad = vec![];
    let opts = LegendreOptions::default();
    let primes = default_n_primes(acc::DICKE_EXPERIMENT_NPRIME_MAX);
    let sweep = dicke_experiment_sweep(112.0, 6e6, 7900, &primes, &opts).unwrap();
    check(&mut bad, (sweep.gamma - acc::GAMMA).abs() <= acc::GAMMA_ABS, || format!("γ {}", sweep.gamma));
    let per = sweep.per_particle();
    check(&mut bad, (per - acc::DICKE_EXPERIMENT_PER_N).abs() <= acc::DICKE_EXPERIMENT_ABS, || format!("bound {per:.4} N"));
    for w in sweep.points.windows(2) {
        let (a, b) = (w[0].per_particle, w[1].per_particle);
        check(&mut bad, b >= a * (1.0 - acc::MONOTONE_SLACK_REL), || {
            format!("decreases from N' {} to {}: {a} > {b}", w[0].n_prime, w[1].n_prime)
        });
    }
    report(7, "Dicke many-particle experiment", &bad, t, acc::DICKE_EXPERIMENT_SECONDS);
}

#[test]
fn criterion_8_gradient_closed_forms() {
    let t = Instant::now();
    let mut bad = vec![];
    let model = SpatialModel::moments(0.3, 1.7, 0.4).unwrap();
    let a = 1.3;
    for n in [4usize, 6] {
        let nf = n as f64;
        for j in [0.5, 1.0] {
            for row in state_table(&model, n, j).unwrap() {
                let dev = row.deviation().unwrap();
                check(&mut bad, dev < acc::GRADIENT_TABLE_ABS, || format!("{:?} N {n} j {j}: deviation {dev}", row.state));
            }
            for s in TwoEnsembleState::ALL {
                if !s.applies(n, j) {
                    continue;
                }
                let (num, want) = (s.numeric(a, n, j).unwrap(), s.closed_form(a, n, j));
                check(&mut bad, (num - want).abs() < acc::GRADIENT_TABLE_ABS, || format!("{s:?} N {n} j {j}: {num} vs {want}"));
            }
            let st = polarized_state(n, j, Axis::Y, Basis::full(n, j).unwrap()).unwrap();
            let chain = gradient_bound(&st, &SpatialModel::chain(n, a).unwrap()).unwrap().value;
            let want = a * a * (nf * nf - 1.0) / 12.0 * 2.0 * j * nf;
            check(&mut bad, (chain - want).abs() < acc::GRADIENT_TABLE_ABS, || format!("chain N {n} j {j}: {chain} vs {want}"));
            let best = two_ensemble_best_state(n / 2, j).unwrap();
            let pos = two_ensemble_positions(n / 2, n / 2, a).unwrap();
            let heis = gradient_bound(&best, &pos).unwrap().value;
            let want = 4.0 * a * a * nf * nf * j * j;
            check(&mut bad, (heis - want).abs() < acc::GRADIENT_TABLE_ABS, || format!("Heisenberg N {n} j {j}: {heis} vs {want}"));
        }
    }
    report(8, "gradient closed forms", &bad, t, acc::GRADIENT_SECONDS);
}

fn comm(a: &CMat, b: &CMat) -> CMat {
    a * b - b * a
}

#[test]
fn criterion_9_property_suites() {
    let t = Instant::now();
    let mut bad = vec![];
    let mut r = rng(909);

    let mut bases: Vec<Basis> = (1..=6).map(|n| Basis::full(n, 0.5).unwrap()).collect();
    bases.extend([Basis::full(3, 1.0).unwrap(), Basis::symmetric(40, 0.5).unwrap()]);
    for b in bases {
        let [x, y, z] = collective_operators(b).unwrap();
        let i = cx(0.0, 1.0);
        let scale = 1.0f64.max(b.max_spin());
        let d = max_diff(&comm(x.matrix(), y.matrix()), &(z.matrix() * i))
            .max(max_diff(&comm(y.matrix(), z.matrix()), &(x.matrix() * i)))
            .max(max_diff(&comm(z.matrix(), x.matrix()), &(y.matrix() * i)));
        check(&mut bad, d < acc::COMMUTATOR_ABS * scale, || format!("commutators {b:?}: {d}"));
    }

    let b = Basis::full(4, 0.5).unwrap();
    let z = collective_operator(Axis::Z, b).unwrap();
    let s1 = random_state(&mut r, b, 2);
    let s2 = random_state(&mut r, b, 1);
    let (f1, f2) = (qfi(&s1, &z).unwrap(), qfi(&s2, &z).unwrap());
    for k in 1..=9 {
        let p = k as f64 / 10.0;
        let mix = QuantumState::mixture(&[(p, &s1), (1.0 - p, &s2)]).unwrap();
        let fm = qfi(&mix, &z).unwrap();
        check(&mut bad, fm <= p * f1 + (1.0 - p) * f2 + acc::QFI_PROPERTY_ABS, || format!("convexity p {p}"));
    }
    let b2 = Basis::full(2, 0.5).unwrap();
    let z2 = collective_operator(Axis::Z, b2).unwrap();
    let (rho1, rho2) = (random_density(&mut r, 4, 2), random_density(&mut r, 4, 3));
    let prod = kron(&rho1, &rho2);
    let prod = QuantumState::mixed((&prod + prod.adjoint()) * cx(0.5, 0.0), b).unwrap();
    let parts = qfi(&QuantumState::mixed(rho1, b2).unwrap(), &z2).unwrap() + qfi(&QuantumState::mixed(rho2, b2).unwrap(), &z2).unwrap();
    let whole = qfi(&prod, &z).unwrap();
    check(&mut bad, (whole - parts).abs() < acc::QFI_PROPERTY_ABS, || format!("additivity: {whole} vs {parts}"));
    let u = unitary_exp(&random_hermitian(&mut r, b.dim()), 0.7);
    let rotated = Operator::hermitize(u.adjoint() * z.matrix() * &u, b);
    let (lhs, rhs) = (qfi(&s1.evolve(&u), &z).unwrap(), qfi(&s1, &rotated).unwrap());
    check(&mut bad, (lhs - rhs).abs() < acc::QFI_PROPERTY_ABS, || format!("covariance: {lhs} vs {rhs}"));

    let opts = LegendreOptions::default().with_random_starts(1);
    for k in 0..acc::SOUNDNESS_CASES {
        let n = 2 + k % 6;
        let sb = Basis::symmetric(n, 0.5).unwrap();
        let [jx, jy, jz] = collective_operators(sb).unwrap();
        let st = match k % 3 {
            0 => random_state(&mut r, sb, 1 + k % 3),
            1 => squeezing_ground_state(n, 0.1 + (k as f64) * 0.1, 1.0, sb).unwrap().state,
            _ => {
                let d = dicke_state(n, n / 2, Axis::X, sb).unwrap();
                let other = random_state(&mut r, sb, 2);
                QuantumState::mixture(&[(0.7, &d), (0.3, &other)]).unwrap()
            }
        };
        let ops = if k % 2 == 0 { vec![jy.clone(), jx.square()] } else { vec![jx.square(), jy.square()] };
        let cs = ConstraintSet::from_state(ops, &st).unwrap();
        let q = qfi(&st, &jz).unwrap();
        let bound = qfi_lower_bound(&cs, &jz, &opts).unwrap().bound;
        check(&mut bad, bound <= q + acc::SOUNDNESS_ABS, || format!("soundness case {k}: {bound} > {q}"));
    }

    for (k, shift) in [-7.5, 0.0, 3.2, 19.0].into_iter().enumerate() {
        let n = 3 + k % 2;
        let st = random_state(&mut r, Basis::full(n, 0.5).unwrap(), 2);
        let sp = SpatialModel::deterministic((0..n).map(|i| i as f64 * 0.9 - 1.0).collect()).unwrap();
        let diff = translation_check(&st, &sp, shift).unwrap();
        check(&mut bad, diff < acc::TRANSLATION_ABS * (1.0 + shift * shift), || format!("translation by {shift}: {diff}"));
    }

    let hb = Basis::symmetric(8, 0.5).unwrap();
    let nodes = gauss_legendre(40);
    for s in [ghz_state(8, hb).unwrap(), dicke_state(8, 4, Axis::X, hb).unwrap(), random_state(&mut r, hb, 3)] {
        let mut total = 0.0;
        for &(x, w) in &nodes {
            for k in 0..40 {
                let phi = 2.0 * PI * k as f64 / 40.0;
                total += w * (2.0 * PI / 40.0) * husimi_q(&s, phi, x.acos()).unwrap();
            }
        }
        check(&mut bad, (total - 1.0).abs() < acc::HUSIMI_NORM_ABS, || format!("Husimi integral {total}"));
    }

    for n in [4usize, 6, 8] {
        let dx = dicke_state(n, n / 2, Axis::X, Basis::full(n, 0.5).unwrap()).unwrap();
        for m in 0..=n {
            let brute = brute_dicke(n, m).dotc(dx.as_pure().unwrap()).norm_sqr();
            let got = dicke_overlap(n, m).unwrap();
            check(&mut bad, (got - brute).abs() < acc::OVERLAP_ABS, || format!("overlap N {n} m {m}: {got} vs {brute}"));
        }
    }
    report(9, "property suites", &bad, t, acc::PROPERTY_SECONDS);
}
