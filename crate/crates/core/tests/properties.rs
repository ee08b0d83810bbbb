use std::f64::consts::{FRAC_PI_4, PI};

use cloneforge::bounds::{self, CloningProblem};
use cloneforge::gates;
use cloneforge::linalg::{Kron, Matrix, Outcome, StateVector, Unitary, C64};
use cloneforge::networks::{self, NetworkSpec, Step};
use proptest::prelude::*;

fn state(n: usize) -> impl Strategy<Value = StateVector> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1 << n)
        .prop_filter("non-zero", |v| {
            v.iter().map(|(a, b)| a * a + b * b).sum::<f64>() > 1e-3
        })
        .prop_map(|v| {
            let norm = v.iter().map(|(a, b)| a * a + b * b).sum::<f64>().sqrt();
            StateVector::new(
                v.iter()
                    .map(|(a, b)| C64::new(a / norm, b / norm))
                    .collect(),
            )
            .unwrap()
        })
}

/// `e^{i a} Rz(b) Ry(c) Rz(d)`.
fn su2(a: f64, b: f64, c: f64, d: f64) -> Unitary {
    let rz = |t: f64| {
        let mut m = Matrix::zeros(2);
        m.set(0, 0, C64::from_polar(1.0, -t / 2.0));
        m.set(1, 1, C64::from_polar(1.0, t / 2.0));
        m
    };
    let (s, co) = (c / 2.0).sin_cos();
    let ry = Matrix::from_real([[co, -s], [s, co]]);
    let mut m = rz(b).mul(&ry).unwrap().mul(&rz(d)).unwrap();
    let phase = C64::from_polar(1.0, a);
    for r in 0..2 {
        for col in 0..2 {
            m.set(r, col, m.get(r, col) * phase);
        }
    }
    Unitary::new(m).unwrap()
}

fn local_unitary() -> impl Strategy<Value = Unitary> {
    (0.0..2.0 * PI, 0.0..2.0 * PI, 0.0..PI, 0.0..2.0 * PI).prop_map(|(a, b, c, d)| su2(a, b, c, d))
}

fn two_qubit_unitary() -> impl Strategy<Value = Unitary> {
    (local_unitary(), local_unitary(), local_unitary()).prop_map(|(u, v, w)| {
        u.kron(&v)
            .then_after(&gates::cnot())
            .unwrap()
            .then_after(&w.kron(&gates::identity2()))
            .unwrap()
    })
}

fn distinct_pair(n: usize) -> impl Strategy<Value = (usize, usize)> {
    (0..n, 0..n).prop_filter("distinct", |(a, b)| a != b)
}

proptest! {
    // integration tests have no source file to persist regressions next to
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn apply_preserves_norm(s in state(4), u in two_qubit_unitary(), (a, b) in distinct_pair(4), v in local_unitary(), q in 0usize..4) {
        let out = s.apply(&u, &[a, b]).unwrap().apply(&v, &[q]).unwrap();
        prop_assert!((out.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn inner_is_conjugate_symmetric(a in state(3), b in state(3)) {
        let ab = a.inner(&b).unwrap();
        let ba = b.inner(&a).unwrap();
        prop_assert!((ab - ba.conj()).norm() < 1e-14);
        prop_assert!((a.inner(&a).unwrap().re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn branch_probabilities_sum_to_one(s in state(3), q in 0usize..3) {
        let p0 = s.branch(q, Outcome::Plus).unwrap().norm_sqr();
        let p1 = s.branch(q, Outcome::Minus).unwrap().norm_sqr();
        prop_assert!((p0 + p1 - 1.0).abs() < 1e-12);
        if p0 > 1e-6 {
            let (p, post) = s.project_qubit(q, Outcome::Plus).unwrap();
            prop_assert!((p - p0).abs() < 1e-15);
            prop_assert!((post.norm_sqr() - 1.0).abs() < 1e-12);
            let (bit, rest) = post.discard_qubit(q).unwrap();
            prop_assert_eq!(bit, Outcome::Plus);
            prop_assert!((rest.norm_sqr() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn transfer_gate_is_hermitian_unitary(t1 in 0.0..FRAC_PI_4, t2 in 0.0..FRAC_PI_4) {
        let d = gates::transfer_gate(t1, t2).unwrap();
        prop_assert!(d.matrix().unitarity_deviation() < 1e-12);
        prop_assert!(d.matrix().is_hermitian(1e-14));
        let dec = gates::decompose_transfer(t1, t2).unwrap();
        prop_assert!(dec.max_abs_error(&d).unwrap() < 1e-10);
    }

    #[test]
    fn separation_circuit_matches(t_in in 0.01..FRAC_PI_4, frac in 0.0f64..1.0) {
        let t_out = t_in + (FRAC_PI_4 - t_in) * frac;
        let s = gates::separation_gate(t_in, t_out).unwrap();
        let dec = gates::decompose_separation(t_in, t_out).unwrap();
        prop_assert!(dec.max_abs_error(&s).unwrap() < 1e-10);
    }

    #[test]
    fn fidelity_bound_orderings(theta in 0.01..FRAC_PI_4, m in 1usize..4, extra in 1usize..6, eta in 0.0f64..1.0) {
        let n = m + extra;
        let f = |m: usize, n: usize| bounds::fidelity_bound(&CloningProblem::new(theta, m, n, eta).unwrap());
        // more outputs never help, more inputs never hurt
        prop_assert!(f(m, n + 1) <= f(m, n) + 1e-12);
        prop_assert!(f(m + 1, n + 1) + 1e-12 >= f(m, n + 1));
        let h = bounds::helstrom_bound(eta, (2.0 * theta).cos().powi(m as i32)).unwrap();
        prop_assert!(f(m, n) + 1e-12 >= h);
        prop_assert!(f(m, n) <= 1.0 + 1e-15);
    }

    #[test]
    fn clone_coefficients_normalized(theta in 0.01..FRAC_PI_4, m in 1usize..4, extra in 1usize..5, eta in 0.05f64..0.95) {
        let p = CloningProblem::new(theta, m, m + extra, eta).unwrap();
        let angles = bounds::optimal_phis(&p).unwrap();
        let c = bounds::clone_coefficients(&angles, p.theta_n()).unwrap();
        let (np, nm) = c.norms_sqr(p.overlap_n());
        prop_assert!((np - 1.0).abs() < 1e-10);
        prop_assert!((nm - 1.0).abs() < 1e-10);
    }

    #[test]
    fn hybrid_bound_monotone(theta in 0.05..FRAC_PI_4, m in 1usize..3, extra in 1usize..4, a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let n = m + extra;
        let p_min = bounds::exact_clone_probability(theta, m, n).unwrap();
        let (lo, hi) = (a.min(b), a.max(b));
        let p = |x: f64| p_min + (1.0 - p_min) * x;
        let f_lo = bounds::hybrid_fidelity_bound(theta, m, n, p(lo)).unwrap().fidelity_bound;
        let f_hi = bounds::hybrid_fidelity_bound(theta, m, n, p(hi)).unwrap().fidelity_bound;
        prop_assert!(f_hi <= f_lo + 1e-12);
        let limit = bounds::hybrid_limit(p(hi), 1.0 - (2.0 * theta).cos().powi(m as i32)).unwrap();
        prop_assert!(limit <= f_hi + 1e-12);
    }
}

/// `<r|U_qubits|c>` entry by entry: zero unless the untouched bits of `r`
/// and `c` agree, otherwise the gate entry at their local indices.
/// Qubit 0 is the most significant bit, as is the first listed qubit.
fn kron_oracle(u: &Unitary, qubits: &[usize], n: usize) -> Matrix {
    let bit = |x: usize, q: usize| (x >> (n - 1 - q)) & 1;
    let local = |x: usize| qubits.iter().fold(0, |acc, &q| (acc << 1) | bit(x, q));
    let rest_mask: usize = (0..n)
        .filter(|q| !qubits.contains(q))
        .map(|q| 1 << (n - 1 - q))
        .sum();
    let dim = 1 << n;
    let mut m = Matrix::zeros(dim);
    for r in 0..dim {
        for c in 0..dim {
            if r & rest_mask == c & rest_mask {
                m.set(r, c, u.matrix().get(local(r), local(c)));
            }
        }
    }
    m
}

#[test]
fn apply_matches_embedding_exhaustively() {
    let u1 = su2(0.3, 1.1, 0.7, -0.4);
    let u2 = su2(-0.2, 0.5, 2.1, 0.9)
        .kron(&su2(0.1, 0.0, 1.3, 0.4))
        .then_after(&gates::cnot())
        .unwrap();
    let u3 = u1
        .kron(&u2)
        .then_after(&gates::identity2().kron(&gates::cnot()))
        .unwrap();
    for n in 1..=4usize {
        let raw: Vec<C64> = (0..1usize << n)
            .map(|i| C64::new((i as f64 + 1.0).sqrt(), 0.3 * i as f64))
            .collect();
        let norm = raw.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let s = StateVector::new(raw.iter().map(|z| z / norm).collect()).unwrap();
        let mut placements: Vec<(Unitary, Vec<usize>)> =
            (0..n).map(|q| (u1.clone(), vec![q])).collect();
        for a in 0..n {
            for b in (0..n).filter(|&b| b != a) {
                placements.push((u2.clone(), vec![a, b]));
                for c in (0..n).filter(|&c| c != a && c != b) {
                    placements.push((u3.clone(), vec![a, b, c]));
                }
            }
        }
        for (u, qubits) in placements {
            let direct = s.apply(&u, &qubits).unwrap();
            let full = kron_oracle(&u, &qubits, n);
            let via = full.mul_vec(s.amps()).unwrap();
            assert!(full.max_abs_diff(&u.matrix().embed(&qubits, n).unwrap()) < 1e-15);
            let diff = direct
                .amps()
                .iter()
                .zip(&via)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            assert!(diff < 1e-14, "n={n} qubits={qubits:?} diff={diff}");
        }
    }
}

#[test]
fn compression_then_decompression_is_identity() {
    for (theta, m, n) in [(0.3, 3, 4), (0.5, 4, 5), (0.2, 2, 3)] {
        let p = CloningProblem::symmetric(theta, m, n).unwrap();
        let comp = networks::compression_sequence(&p).unwrap();
        let theta_m = p.theta_m();
        for sign in [Outcome::Plus, Outcome::Minus] {
            let input = networks::prepare_input(&p, sign, false);
            let out = networks::run_network(&comp, &input).unwrap().state;
            let mut want = StateVector::psi(theta_m, sign);
            for _ in 1..n {
                want = want.kron(&StateVector::plus());
            }
            assert!(out.max_abs_diff(&want) < 1e-12);
            // undo: the same transfer gates in reverse order
            let undo: Vec<Step> = comp.steps().iter().rev().cloned().collect();
            let back = networks::run_network(&NetworkSpec::new(n, undo).unwrap(), &out)
                .unwrap()
                .state;
            assert!(back.max_abs_diff(&input) < 1e-12);
        }
    }
}

#[test]
fn decompression_builds_product_clones() {
    for (theta, n) in [(0.3, 2), (0.5, 4), (FRAC_PI_4, 3)] {
        let p = CloningProblem::symmetric(theta, 1, n).unwrap();
        let dec = networks::decompression_sequence(&p).unwrap();
        for sign in [Outcome::Plus, Outcome::Minus] {
            let mut input = StateVector::psi(p.theta_n(), sign);
            for _ in 1..n {
                input = input.kron(&StateVector::plus());
            }
            let out = networks::run_network(&dec, &input).unwrap().state;
            assert!(out.max_abs_diff(&networks::exact_clones(&p, sign)) < 1e-12);
        }
    }
}

#[test]
fn runs_are_bit_identical() {
    let p = CloningProblem::symmetric(0.35, 2, 4).unwrap();
    let spec = networks::hybrid_network(&p, 0.9).unwrap();
    let a = networks::simulate(&p, &spec, Outcome::Minus).unwrap();
    let b = networks::simulate(&p, &spec, Outcome::Minus).unwrap();
    assert_eq!(a.post_state, b.post_state);
    assert_eq!(
        a.success_probability.to_bits(),
        b.success_probability.to_bits()
    );
}
