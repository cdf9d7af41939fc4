mod common;

use common::*;
use metrobound::linalg::{CMat, CVec};
use metrobound::spin_algebra::*;
use metrobound::MetroError;
use std::f64::consts::PI;

fn comm(a: &CMat, b: &CMat) -> CMat {
    a * b - b * a
}

#[test]
fn single_spin_half_is_pauli_over_two() {
    let (x, _, z) = single_spin_matrices(0.5).unwrap();
    assert!((z.matrix()[(0, 0)].re - 0.5).abs() < 1e-15);
    assert!((z.matrix()[(1, 1)].re + 0.5).abs() < 1e-15);
    assert!((x.matrix()[(0, 1)].re - 0.5).abs() < 1e-15);
    assert!(x.matrix()[(0, 0)].norm() < 1e-15);
}

#[test]
fn spin_one_jz_diagonal() {
    let (_, _, z) = single_spin_matrices(1.0).unwrap();
    let d: Vec<f64> = (0..3).map(|k| z.matrix()[(k, k)].re).collect();
    assert_eq!(d, vec![1.0, 0.0, -1.0]);
}

#[test]
fn single_spin_commutators() {
    for tj in 1..=8 {
        let (x, y, z) = single_spin_matrices(tj as f64 / 2.0).unwrap();
        let lhs = comm(x.matrix(), y.matrix());
        let rhs = z.matrix() * cx(0.0, 1.0);
        assert!(max_diff(&lhs, &rhs) < 1e-12, "2j = {tj}");
    }
}

#[test]
fn invalid_spin_rejected() {
    assert!(matches!(single_spin_matrices(0.3), Err(MetroError::InvalidSpin(_))));
    assert!(matches!(single_spin_matrices(0.0), Err(MetroError::InvalidSpin(_))));
    assert!(single_spin_matrices(-1.0).is_err());
}

#[test]
fn dimension_cap_enforced() {
    assert!(matches!(Basis::full(13, 0.5), Err(MetroError::DimensionCap { .. })));
    assert!(Basis::full(12, 0.5).is_ok());
    assert!(Basis::full_with_cap(4, 0.5, 8).is_err());
    assert_eq!(Basis::symmetric(1000, 0.5).unwrap().dim(), 1001);
    assert_eq!(Basis::full(3, 1.0).unwrap().dim(), 27);
}

#[test]
fn triplet_jz_symmetric() {
    let b = Basis::symmetric(2, 0.5).unwrap();
    let z = collective_operator(Axis::Z, b).unwrap();
    let expect = CMat::from_diagonal(&CVec::from_vec(vec![cx(1.0, 0.0), cx(0.0, 0.0), cx(-1.0, 0.0)]));
    assert!(max_diff(z.matrix(), &expect) < 1e-15);
}

#[test]
fn full_jz_spectrum_multiplicities() {
    let b = Basis::full(4, 0.5).unwrap();
    let z = collective_operator(Axis::Z, b).unwrap();
    let ev = z.eigenvalues();
    for (m, mult) in [(-2.0, 1), (-1.0, 4), (0.0, 6), (1.0, 4), (2.0, 1)] {
        assert_eq!(ev.iter().filter(|&&e| (e - m).abs() < 1e-9).count(), mult);
    }
}

#[test]
fn full_collective_matches_kronecker_oracle() {
    for (n, j) in [(3usize, 0.5), (4, 0.5), (2, 1.0), (3, 1.0), (2, 1.5)] {
        let b = Basis::full(n, j).unwrap();
        let ops = collective_operators(b).unwrap();
        let local = spin_ops_ascending(j);
        for a in 0..3 {
            let oracle = kron_collective(&local[a], n);
            assert!(max_diff(ops[a].matrix(), &oracle) < 1e-13, "n={n} j={j} axis {a}");
        }
    }
}

#[test]
fn particle_operator_matches_kronecker_oracle() {
    let b = Basis::full(3, 1.0).unwrap();
    let local = spin_ops_ascending(1.0);
    for p in 0..3 {
        let op = particle_spin_operator(Axis::Y, p, b).unwrap();
        assert!(max_diff(op.matrix(), &kron_single(&local[1], p, 3)) < 1e-13);
    }
    assert!(particle_spin_operator(Axis::Z, 3, b).is_err());
}

#[test]
fn collective_commutators_both_bases() {
    let mut bases = vec![];
    for n in 1..=8 {
        bases.push(Basis::full(n, 0.5).unwrap());
    }
    bases.push(Basis::full(4, 1.0).unwrap());
    for n in [1usize, 2, 7, 50, 200] {
        bases.push(Basis::symmetric(n, 0.5).unwrap());
    }
    for b in bases {
        let [x, y, z] = collective_operators(b).unwrap();
        let i = cx(0.0, 1.0);
        let scale = 1.0f64.max(b.max_spin());
        assert!(max_diff(&comm(x.matrix(), y.matrix()), &(z.matrix() * i)) < 1e-12 * scale, "{b:?}");
        assert!(max_diff(&comm(y.matrix(), z.matrix()), &(x.matrix() * i)) < 1e-12 * scale, "{b:?}");
        assert!(max_diff(&comm(z.matrix(), x.matrix()), &(y.matrix() * i)) < 1e-12 * scale, "{b:?}");
    }
}

#[test]
fn arbitrary_direction_is_linear_combination() {
    let b = Basis::symmetric(5, 0.5).unwrap();
    let n = [0.6, 0.0, 0.8];
    let op = collective_operator_along(n, b).unwrap();
    let [x, _, z] = collective_operators(b).unwrap();
    let expect = x.matrix() * cx(0.6, 0.0) + z.matrix() * cx(0.8, 0.0);
    assert!(max_diff(op.matrix(), &expect) < 1e-14);
    assert!(collective_operator_along([1.0, 1.0, 0.0], b).is_err());
}

#[test]
fn total_spin_on_symmetric_states() {
    let n = 6;
    let b = Basis::symmetric(n, 0.5).unwrap();
    let j2 = total_spin_squared(b).unwrap();
    let mut r = rng(7);
    for _ in 0..10 {
        let s = QuantumState::pure(random_vector(&mut r, b.dim()), b).unwrap();
        assert!((s.expect(&j2).unwrap() - 12.0).abs() < 1e-10);
    }
    let d = dicke_state(n, 2, Axis::X, b).unwrap();
    assert!((d.expect(&j2).unwrap() - 12.0).abs() < 1e-10);
}

#[test]
fn embedding_is_isometry_into_maximal_spin() {
    for (n, j) in [(4usize, 0.5), (3, 1.0)] {
        let b = Basis::symmetric(n, j).unwrap();
        let v = symmetric_embedding(b).unwrap();
        let gram = v.adjoint() * &v;
        assert!(max_diff(&gram, &CMat::identity(b.dim(), b.dim())) < 1e-12);
        let full = b.with_kind(BasisKind::Full).unwrap();
        for axis in [Axis::X, Axis::Y, Axis::Z] {
            let f = collective_operator(axis, full).unwrap();
            let s = collective_operator(axis, b).unwrap();
            let restricted = restrict_to_symmetric(&f).unwrap();
            assert!(max_diff(restricted.matrix(), s.matrix()) < 1e-12);
        }
    }
}

#[test]
fn two_qubit_triplet_in_full_basis() {
    let b = Basis::full(2, 0.5).unwrap();
    let s = dicke_state(2, 1, Axis::Z, b).unwrap();
    let v = s.as_pure().unwrap();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let expect = CVec::from_vec(vec![cx(0.0, 0.0), cx(h, 0.0), cx(h, 0.0), cx(0.0, 0.0)]);
    assert!((v - expect).norm() < 1e-14);
}

#[test]
fn full_dicke_matches_brute_force_symmetrization() {
    for n in 1..=6 {
        let b = Basis::full(n, 0.5).unwrap();
        for k in 0..=n {
            let s = dicke_state(n, k, Axis::Z, b).unwrap();
            assert!((s.as_pure().unwrap() - brute_dicke(n, k)).norm() < 1e-12);
        }
    }
}

#[test]
fn x_dicke_is_jx_eigenstate() {
    for kind in [BasisKind::Full, BasisKind::Symmetric] {
        let b = Basis::qubits(4, kind).unwrap();
        let s = dicke_state(4, 2, Axis::X, b).unwrap();
        let jx = collective_operator(Axis::X, b).unwrap();
        let v = s.as_pure().unwrap();
        assert!((jx.matrix() * v).norm() < 1e-12);
    }
}

#[test]
fn z_dicke_moments() {
    let b = Basis::symmetric(4, 0.5).unwrap();
    let s = dicke_state(4, 2, Axis::Z, b).unwrap();
    let [_, _, z] = collective_operators(b).unwrap();
    assert!(s.expect(&z.square()).unwrap().abs() < 1e-14);
    assert!((s.expect(&total_spin_squared(b).unwrap()).unwrap() - 6.0).abs() < 1e-12);
    assert!(dicke_state(4, 5, Axis::Z, b).is_err());
}

#[test]
fn axis_phase_convention() {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let b = Basis::full(1, 0.5).unwrap();
    let one_x = dicke_state(1, 0, Axis::X, b).unwrap();
    let zero_x = dicke_state(1, 1, Axis::X, b).unwrap();
    let zero_y = dicke_state(1, 1, Axis::Y, b).unwrap();
    let one_y = dicke_state(1, 0, Axis::Y, b).unwrap();
    // full ordering is (|0⟩, |1⟩)
    let check = |s: &QuantumState, a0: (f64, f64), a1: (f64, f64)| {
        let v = s.as_pure().unwrap();
        assert!((v[0] - cx(a0.0, a0.1)).norm() < 1e-14, "{v}");
        assert!((v[1] - cx(a1.0, a1.1)).norm() < 1e-14, "{v}");
    };
    check(&one_x, (h, 0.0), (h, 0.0));
    check(&zero_x, (-h, 0.0), (h, 0.0));
    check(&one_y, (0.0, h), (h, 0.0));
    check(&zero_y, (0.0, -h), (h, 0.0));
}

#[test]
fn full_and_symmetric_axis_states_agree() {
    for n in 1..=6 {
        let full = Basis::full(n, 0.5).unwrap();
        let sym = Basis::symmetric(n, 0.5).unwrap();
        for axis in [Axis::X, Axis::Y, Axis::Z] {
            for k in 0..=n {
                let a = dicke_state(n, k, axis, full).unwrap();
                let s = dicke_state(n, k, axis, sym).unwrap().to_full().unwrap();
                let overlap = a.as_pure().unwrap().dotc(s.as_pure().unwrap());
                assert!((overlap - cx(1.0, 0.0)).norm() < 1e-11, "n={n} k={k} {axis:?} {overlap}");
            }
        }
    }
}

#[test]
fn embedding_consistency_of_moments() {
    for n in 2..=8 {
        let full = Basis::full(n, 0.5).unwrap();
        let sym = Basis::symmetric(n, 0.5).unwrap();
        let mut states = vec![
            (ghz_state(n, full).unwrap(), ghz_state(n, sym).unwrap()),
            (
                polarized_state(n, 0.5, Axis::Y, full).unwrap(),
                polarized_state(n, 0.5, Axis::Y, sym).unwrap(),
            ),
        ];
        for axis in [Axis::X, Axis::Y, Axis::Z] {
            states.push((
                dicke_state(n, n / 2, axis, full).unwrap(),
                dicke_state(n, n / 2, axis, sym).unwrap(),
            ));
        }
        let fo = collective_operators(full).unwrap();
        let so = collective_operators(sym).unwrap();
        for (f, s) in &states {
            for a in 0..3 {
                for b in 0..3 {
                    let ff = f.expect(&fo[a].anticommutator(&fo[b]).unwrap()).unwrap();
                    let ss = s.expect(&so[a].anticommutator(&so[b]).unwrap()).unwrap();
                    assert!((ff - ss).abs() < 1e-10);
                }
                assert!((f.expect(&fo[a]).unwrap() - s.expect(&so[a]).unwrap()).abs() < 1e-10);
            }
        }
    }
}

#[test]
fn ghz_moments_and_bell() {
    let b = Basis::full(4, 0.5).unwrap();
    let g = ghz_state(4, b).unwrap();
    let z = collective_operator(Axis::Z, b).unwrap();
    assert!(g.expect(&z).unwrap().abs() < 1e-14);
    assert!((g.expect(&z.square()).unwrap() - 4.0).abs() < 1e-12);
    let b2 = Basis::full(2, 0.5).unwrap();
    let bell = ghz_state(2, b2).unwrap();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let expect = CVec::from_vec(vec![cx(h, 0.0), cx(0.0, 0.0), cx(0.0, 0.0), cx(h, 0.0)]);
    assert!((bell.as_pure().unwrap() - expect).norm() < 1e-15);
}

#[test]
fn polarized_moments() {
    for (n, j) in [(4usize, 0.5), (3, 1.0), (2, 1.5)] {
        for kind in [BasisKind::Full, BasisKind::Symmetric] {
            let b = Basis::full(n, j).unwrap().with_kind(kind).unwrap();
            let s = polarized_state(n, j, Axis::Y, b).unwrap();
            let [x, y, _] = collective_operators(b).unwrap();
            assert!((s.expect(&y).unwrap() - n as f64 * j).abs() < 1e-12);
            assert!((s.expect(&x.square()).unwrap() - n as f64 * j / 2.0).abs() < 1e-12);
        }
    }
}

#[test]
fn polarized_fidelity_with_x_dicke() {
    let b = Basis::symmetric(4, 0.5).unwrap();
    let p = polarized_state(4, 0.5, Axis::Z, b).unwrap();
    let d = dicke_state(4, 2, Axis::X, b).unwrap();
    let f = p.fidelity_with_pure(d.as_pure().unwrap()).unwrap();
    assert!((f - 0.375).abs() < 1e-12);
}

#[test]
fn two_qubit_singlet() {
    let s = pi_singlet(2, 0.5).unwrap();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let psi = CVec::from_vec(vec![cx(0.0, 0.0), cx(h, 0.0), cx(-h, 0.0), cx(0.0, 0.0)]);
    let rho = s.density_matrix();
    assert!(max_diff(&rho, &(&psi * psi.adjoint())) < 1e-12);
}

#[test]
fn singlet_moments() {
    for (n, j) in [(4usize, 0.5), (6, 0.5), (2, 1.0), (4, 1.0), (3, 1.0)] {
        let s = pi_singlet(n, j).unwrap();
        let b = s.basis();
        for op in collective_operators(b).unwrap() {
            assert!(s.expect(&op.square()).unwrap().abs() < 1e-10);
        }
        let jz1 = particle_spin_operator(Axis::Z, 0, b).unwrap();
        assert!((s.expect(&jz1.square()).unwrap() - j * (j + 1.0) / 3.0).abs() < 1e-10);
    }
}

#[test]
fn singlet_matches_dense_construction() {
    for (n, j) in [(4usize, 0.5), (3, 1.0)] {
        let b = Basis::full(n, j).unwrap();
        let fast = pi_singlet(n, j).unwrap().density_matrix();
        let slow = pi_singlet_dense(b).unwrap().density_matrix();
        assert!(max_diff(&fast, &slow) < 1e-10);
    }
}

#[test]
fn singlet_absent() {
    assert!(matches!(pi_singlet(3, 0.5), Err(MetroError::NoSinglet { .. })));
    assert!(matches!(pi_singlet(1, 1.0), Err(MetroError::NoSinglet { .. })));
}

#[test]
fn squeezing_limits() {
    for n in [4usize, 10] {
        let b = Basis::symmetric(n, 0.5).unwrap();
        let big = squeezing_ground_state(n, 1e6, 1.0, b).unwrap();
        let pol = polarized_state(n, 0.5, Axis::Y, b).unwrap();
        assert!(big.state.fidelity_with_pure(pol.as_pure().unwrap()).unwrap() > 1.0 - 1e-6);
        assert!(!big.degenerate);

        let small = squeezing_ground_state(n, 1e-6, 1.0, b).unwrap();
        let d = dicke_state(n, n / 2, Axis::X, b).unwrap();
        assert!(small.state.fidelity_with_pure(d.as_pure().unwrap()).unwrap() > 1.0 - 1e-4);

        assert!(squeezing_ground_state(n, 0.0, 1.0, b).unwrap().degenerate);
    }
    let b = Basis::symmetric(4, 0.5).unwrap();
    assert!(squeezing_ground_state(4, -1.0, 1.0, b).is_err());
    assert!(squeezing_ground_state(4, 1.0, 1.0, Basis::full(4, 0.5).unwrap()).is_err());
}

#[test]
fn dicke_overlap_values() {
    assert_eq!(dicke_overlap(4, 1).unwrap(), 0.0);
    assert!((dicke_overlap(4, 0).unwrap() - 0.375).abs() < 1e-12);
    assert!((dicke_overlap(4, 2).unwrap() - 0.25).abs() < 1e-12);
    assert!(dicke_overlap(5, 2).is_err());
}

#[test]
fn dicke_overlap_matches_brute_force() {
    for n in [2usize, 4, 6, 8] {
        let b = Basis::full(n, 0.5).unwrap();
        let dx = dicke_state(n, n / 2, Axis::X, b).unwrap();
        for m in 0..=n {
            let dz = brute_dicke(n, m);
            let brute = dz.dotc(dx.as_pure().unwrap()).norm_sqr();
            assert!((dicke_overlap(n, m).unwrap() - brute).abs() < 1e-12, "n={n} m={m}");
        }
    }
}

#[test]
fn dicke_overlap_symmetry_and_sum() {
    for n in (2..=400).step_by(2) {
        let mut total = 0.0;
        for m in 0..=n {
            let a = dicke_overlap(n, m).unwrap();
            assert_eq!(a, dicke_overlap(n, n - m).unwrap());
            total += a;
        }
        assert!((total - 1.0).abs() < 1e-12, "n={n} sum={total}");
    }
}

#[test]
fn coherent_state_matches_rotation() {
    let n = 7;
    let b = Basis::symmetric(n, 0.5).unwrap();
    let [_, y, z] = collective_operators(b).unwrap();
    let (theta, phi) = (1.1, -0.4);
    let mut top = CVec::zeros(b.dim());
    top[0] = cx(1.0, 0.0);
    let rotated = metrobound::linalg::unitary_exp(z.matrix(), phi)
        * metrobound::linalg::unitary_exp(y.matrix(), theta)
        * top;
    let closed = coherent_state(n as u32, theta, phi);
    assert!((rotated - closed).norm() < 1e-12);
}

#[test]
fn husimi_values() {
    let n = 5;
    let b = Basis::symmetric(n, 0.5).unwrap();
    let mixed = QuantumState::maximally_mixed(b).unwrap();
    for (t, p) in [(0.1, 0.2), (2.0, 4.0)] {
        assert!((husimi_q(&mixed, p, t).unwrap() - 1.0 / (4.0 * PI)).abs() < 1e-12);
    }
    let pol = dicke_state(n, 0, Axis::Z, b).unwrap();
    assert!((husimi_q(&pol, 0.3, 0.0).unwrap() - (n as f64 + 1.0) / (4.0 * PI)).abs() < 1e-12);
    assert!(husimi_q(&pol.to_full().unwrap(), 0.0, 0.0).is_err());
}

#[test]
fn husimi_normalized() {
    let n = 8;
    let b = Basis::symmetric(n, 0.5).unwrap();
    let mut r = rng(11);
    let nodes = gauss_legendre(40);
    let nphi = 40;
    let states = vec![
        ghz_state(n, b).unwrap(),
        dicke_state(n, 4, Axis::X, b).unwrap(),
        random_state(&mut r, b, 3),
    ];
    for s in states {
        let mut total = 0.0;
        for &(x, w) in &nodes {
            for k in 0..nphi {
                let phi = 2.0 * PI * k as f64 / nphi as f64;
                total += w * (2.0 * PI / nphi as f64) * husimi_q(&s, phi, x.acos()).unwrap();
            }
        }
        assert!((total - 1.0).abs() < 1e-6, "{total}");
    }
}

#[test]
fn state_validation() {
    let b = Basis::symmetric(2, 0.5).unwrap();
    let v = CVec::from_vec(vec![cx(1.0, 0.0), cx(1.0, 0.0), cx(0.0, 0.0)]);
    assert!(QuantumState::pure(v.clone(), b).is_err());
    assert!(QuantumState::pure_normalized(v, b).is_ok());
    let bad = CMat::identity(3, 3);
    assert!(QuantumState::mixed(bad, b).is_err());
    let neg = CMat::from_diagonal(&CVec::from_vec(vec![cx(1.1, 0.0), cx(-0.1, 0.0), cx(0.0, 0.0)]));
    assert!(QuantumState::mixed(neg, b).is_err());
    assert!(matches!(
        QuantumState::pure(CVec::zeros(4), b),
        Err(MetroError::BasisMismatch(_))
    ));
}
