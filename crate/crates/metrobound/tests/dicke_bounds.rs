mod common;

use common::*;
use metrobound::dicke_bounds::*;
use metrobound::qfi_core::qfi;
use metrobound::spin_algebra::*;

fn pure_dicke_moments(n: usize) -> DickeMoments {
    let b = Basis::symmetric(n, 0.5).unwrap();
    moments_from_state(&dicke_state(n, n / 2, Axis::X, b).unwrap()).unwrap()
}

#[test]
fn pure_dicke_moment_values() {
    let m = pure_dicke_moments(4);
    assert!(m.jx2.abs() < 1e-12 && m.jx4.abs() < 1e-12 && m.jxjy2jx.abs() < 1e-12);
    assert!((m.jy2 - 3.0).abs() < 1e-12);
    assert!((m.jz2 - 3.0).abs() < 1e-12);
    assert!(m.parity_ok);
}

#[test]
fn polarized_jx2() {
    let b = Basis::symmetric(4, 0.5).unwrap();
    let m = moments_from_state(&polarized_state(4, 0.5, Axis::Y, b).unwrap()).unwrap();
    assert!((m.jx2 - 1.0).abs() < 1e-12);
}

#[test]
fn thermal_zero_temperature_is_pure() {
    let b = Basis::symmetric(6, 0.5).unwrap();
    let t = moments_from_state(&thermal_dicke_state(6, 0.0, b).unwrap()).unwrap();
    let p = pure_dicke_moments(6);
    for (a, e) in [(t.jx2, p.jx2), (t.jx4, p.jx4), (t.jy2, p.jy2), (t.jy4, p.jy4), (t.jxjy2jx, p.jxjy2jx)] {
        assert!((a - e).abs() < 1e-12);
    }
}

#[test]
fn optimal_for_pure_dicke() {
    for n in (2..=40).step_by(2) {
        let (prec, theta) = optimal_precision(&pure_dicke_moments(n)).unwrap();
        let nf = n as f64;
        assert!((prec - nf * (nf + 2.0) / 2.0).abs() < 1e-8 * nf * nf, "n={n}");
        assert_eq!(theta, 0.0);
        assert!((precision_vs_theta(&pure_dicke_moments(n), 0.0) - prec).abs() < 1e-8 * nf * nf);
    }
}

#[test]
fn experimental_optimum() {
    let m = experimental_moments();
    let (prec, theta) = optimal_precision(&m).unwrap();
    assert!((prec / 7900.0 - 3.3).abs() < 0.05, "{}", prec / 7900.0);
    assert!((theta - 0.0057).abs() < 5e-5, "{theta}");
}

#[test]
fn experimental_curve_peaks_at_optimum() {
    let m = experimental_moments();
    let (best, theta_opt) = optimal_precision(&m).unwrap();
    let mut arg = 0.0;
    let mut max = 0.0;
    for k in 1..20000 {
        let t = k as f64 * 1e-6;
        let v = precision_vs_theta(&m, t);
        if v > max {
            max = v;
            arg = t;
        }
    }
    assert!((arg - 0.0057).abs() < 5e-5);
    assert!((arg - theta_opt).abs() < 2e-6);
    assert!((max - best).abs() / best < 1e-6);
    assert_eq!(precision_vs_theta(&m, 0.0), 0.0);
}

#[test]
fn curve_matches_simulation_for_ground_state() {
    let gs = reference_ground_state(6).unwrap();
    let m = moments_from_state(&gs).unwrap();
    assert!(m.parity_ok);
    let mut checked = 0;
    for k in 1..1000 {
        let theta = std::f64::consts::PI * k as f64 / 1000.0;
        let sim = simulated_precision(&gs, theta).unwrap();
        let formula = precision_vs_theta(&m, theta);
        if sim > 1e-3 * 6.0 {
            assert!((sim - formula).abs() / sim < 0.01, "theta={theta} sim={sim} f={formula}");
            checked += 1;
        }
    }
    assert!(checked > 900);
}

#[test]
fn fourth_moment_identity() {
    let mut r = rng(21);
    for n in [4usize, 6] {
        let b = Basis::symmetric(n, 0.5).unwrap();
        let [x, y, z] = collective_operators(b).unwrap();
        let (x2, y2) = (x.square(), y.square());
        let anti = x.anticommutator(&y).unwrap();
        let lhs_op = x2.anticommutator(&y2).unwrap().plus(&anti.square()).unwrap();
        for _ in 0..10 {
            let s = random_state(&mut r, b, 2);
            let lhs = s.expect(&lhs_op).unwrap();
            let rhs = 4.0 * s.expect(&y2).unwrap() - 3.0 * s.expect(&z.square()).unwrap()
                - 2.0 * s.expect(&x2).unwrap()
                + 6.0 * s.expect(&x.sandwich(&y2).unwrap()).unwrap();
            assert!((lhs - rhs).abs() < 1e-9);
        }
    }
}

#[test]
fn fourth_moment_bound_saturation() {
    let mut r = rng(22);
    let b = Basis::symmetric(6, 0.5).unwrap();
    let dx: Vec<QuantumState> = (0..=6).map(|k| dicke_state(6, k, Axis::X, b).unwrap()).collect();
    for _ in 0..5 {
        let w: Vec<f64> = (0..=6).map(|_| rand::Rng::random::<f64>(&mut r)).collect();
        let total: f64 = w.iter().sum();
        let parts: Vec<(f64, &QuantumState)> = w.iter().zip(&dx).map(|(p, s)| (p / total, s)).collect();
        let m = moments_from_state(&QuantumState::mixture(&parts).unwrap()).unwrap();
        assert!((fourth_moment_bound(&m, 6) - m.jxjy2jx).abs() < 1e-10);
    }
    let f = Basis::full(4, 0.5).unwrap();
    for _ in 0..5 {
        let s = QuantumState::pure(random_vector(&mut r, f.dim()), f).unwrap();
        let m = moments_from_state(&s).unwrap();
        assert!(fourth_moment_bound(&m, 4) > m.jxjy2jx + 1e-6);
    }
    let singlet = moments_from_state(&pi_singlet(4, 0.5).unwrap()).unwrap();
    assert!(fourth_moment_bound(&singlet, 4).abs() < 1e-10);
    let p = pure_dicke_moments(8);
    assert!(fourth_moment_bound(&p, 8).abs() < 1e-10);
}

#[test]
fn cramer_rao_dominance_thermal() {
    for n in [4usize, 10, 20, 40] {
        let b = Basis::symmetric(n, 0.5).unwrap();
        let z = collective_operator(Axis::Z, b).unwrap();
        for t in [0.0, 0.1, 0.5, 1.0, 2.0, 5.0, 20.0] {
            let s = thermal_dicke_state(n, t, b).unwrap();
            let m = moments_from_state(&s).unwrap();
            let (prec, _) = optimal_precision(&m).unwrap();
            assert!(prec <= qfi(&s, &z).unwrap() + 1e-8, "n={n} T={t}");
        }
    }
}

#[test]
fn cramer_rao_dominance_ground_states() {
    for n in [4usize, 6, 10, 20] {
        let b = Basis::symmetric(n, 0.5).unwrap();
        let z = collective_operator(Axis::Z, b).unwrap();
        for lambda in [0.01, 0.1, 1.0, 10.0, 100.0] {
            let s = squeezing_ground_state(n, lambda, 1.0, b).unwrap().state;
            let m = moments_from_state(&s).unwrap();
            assert!(m.parity_ok);
            if let Ok((prec, _)) = optimal_precision(&m) {
                assert!(prec <= qfi(&s, &z).unwrap() + 1e-8, "n={n} lambda={lambda}");
            }
        }
    }
}

#[test]
fn parity_of_evolved_moments() {
    let n = 6;
    let b = Basis::symmetric(n, 0.5).unwrap();
    let mut states = vec![];
    for lambda in [0.2, 1.5] {
        states.push(squeezing_ground_state(n, lambda, 1.0, b).unwrap().state);
    }
    for t in [0.5, 3.0] {
        states.push(thermal_dicke_state(n, t, b).unwrap());
    }
    for s in &states {
        for k in 1..20 {
            let theta = k as f64 * 0.15;
            for m in [2, 4] {
                let a = evolved_moment(s, m, theta).unwrap();
                let c = evolved_moment(s, m, -theta).unwrap();
                assert!((a - c).abs() < 1e-9);
            }
        }
    }
}

#[test]
fn second_moment_experiment() {
    let v = second_moment_bound(112.0, 6e6, 7900, 3.0).unwrap();
    assert!((v / 7900.0 - 2.9).abs() < 0.05, "{}", v / 7900.0);
}

#[test]
fn second_moment_consistent_with_optimal() {
    for n in [6usize, 10, 20] {
        let b = Basis::symmetric(n, 0.5).unwrap();
        for t in [0.3, 1.0, 3.0] {
            let s = thermal_dicke_state(n, t, b).unwrap();
            let m = moments_from_state(&s).unwrap();
            let beta = m.jx4 / (m.jx2 * m.jx2);
            let second = second_moment_bound(m.jx2, m.jy2, n, beta).unwrap();
            let (opt, _) = optimal_precision(&m).unwrap();
            assert!(second <= opt + 1e-8, "n={n} T={t}");
        }
    }
    let n = 12;
    let jy2 = (n * (n + 2)) as f64 / 8.0;
    let limit = second_moment_bound(0.0, jy2, n, 3.0).unwrap();
    let (opt, _) = optimal_precision(&pure_dicke_moments(n)).unwrap();
    assert!((limit - opt).abs() < 1e-8);
}

#[test]
fn second_moment_degenerate() {
    assert!(second_moment_bound(5.0, 5.0, 10, 3.0).is_err());
}

#[test]
fn resample_is_seeded() {
    let f = |x: &[f64]| -> metrobound::Result<f64> { Ok(x[0] + x[1]) };
    let a = gaussian_resample(&[1.0, 2.0], &[0.1, 0.2], 10_000, 3, f).unwrap();
    let b = gaussian_resample(&[1.0, 2.0], &[0.1, 0.2], 10_000, 3, f).unwrap();
    assert_eq!(a.mean, b.mean);
    assert!((a.mean - 3.0).abs() < 0.01);
    assert!((a.std - (0.05f64).sqrt()).abs() < 0.01);
    assert!(a.p16 < a.p50 && a.p50 < a.p84);
    assert!(gaussian_resample(&[1.0], &[-1.0], 10, 3, f).is_err());
}

#[test]
fn resample_without_spread() {
    let m = experimental_moments();
    let f = |x: &[f64]| optimal_precision(&DickeMoments::x_invariant(7900, x[0], x[1], x[2], x[3])?).map(|p| p.0);
    let s = gaussian_resample(&[m.jx2, m.jx4, m.jy2, m.jy4], &[0.0; 4], 500, 1, f).unwrap();
    assert_eq!(s.std, 0.0);
    assert_eq!(s.failures, 0);
    assert_eq!(s.mean, optimal_precision(&m).unwrap().0);
}
