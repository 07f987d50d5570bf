// Copyright 2026 The emech Authors
// SPDX-License-Identifier: Apache-2.0

use emech::hilbert::{
    coherent_state, coherent_tail_mass, coherent_truncation_loss, fock_state, thermal_state,
    thermal_tail_mass, thermal_truncation_loss, DenseMatrix, ModeLayout, QOperator, QState,
};
use emech::C64;
use proptest::prelude::*;

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Bose distribution mean over the kept levels, renormalized.
fn bose_mean(n_bar: f64, dim: usize) -> f64 {
    let q = n_bar / (1.0 + n_bar);
    let (mut num, mut den) = (0.0, 0.0);
    for n in 0..dim {
        let p = q.powi(n as i32);
        num += n as f64 * p;
        den += p;
    }
    num / den
}

#[test]
fn fock_states_and_bounds() {
    let l = ModeLayout::standard(3, 3, 5).unwrap();
    let vac = fock_state(&l, &[0, 0, 0]).unwrap();
    assert_eq!(vac.as_vector().unwrap()[0], c(1.0));
    let one = fock_state(&l, &[0, 0, 1]).unwrap();
    let nb = QOperator::number(&l, 2).unwrap();
    assert_eq!(one.expectation(&nb).unwrap(), c(1.0));
    assert_eq!(vac.expectation(&nb).unwrap(), c(0.0));
    assert!(fock_state(&l, &[0, 0, 5]).is_err());
}

#[test]
fn coherent_state_moments() {
    let vac = coherent_state(10, c(0.0)).unwrap();
    assert!((vac.as_vector().unwrap()[0] - 1.0).norm() < 1e-15);

    let s = coherent_state(30, c(1.0)).unwrap();
    let n = QOperator::number(s.layout(), 0).unwrap();
    assert!((s.expectation(&n).unwrap().re - 1.0).abs() < 1e-6);

    let plus = coherent_state(40, c(2.0)).unwrap();
    let minus = coherent_state(40, c(-2.0)).unwrap();
    let ov = plus.overlap(&minus).unwrap().norm();
    assert!((ov - (-8.0f64).exp()).abs() < 1e-10, "overlap {ov}");
}

#[test]
fn thermal_state_moments() {
    let vac = thermal_state(5, 0.0).unwrap();
    assert_eq!(vac.density_matrix()[(0, 0)], c(1.0));
    assert!(thermal_state(5, -1.0).is_err());

    // At dim 120 the renormalized truncated mean sits 1.7% below n̄; it must
    // equal the truncated Bose sum exactly, and reach n̄ within 1% by dim 150.
    let t = thermal_state(120, 20.0).unwrap();
    let n = QOperator::number(t.layout(), 0).unwrap();
    let mean = t.expectation(&n).unwrap().re;
    assert!((mean - bose_mean(20.0, 120)).abs() < 1e-9);
    assert!((mean - 20.0).abs() < 0.4, "mean {mean}");
    let t = thermal_state(150, 20.0).unwrap();
    let mean = t.expectation(&QOperator::number(t.layout(), 0).unwrap()).unwrap().re;
    assert!((mean - 20.0).abs() < 0.2, "mean {mean}");

    let t3 = thermal_state(80, 3.0).unwrap();
    let mean3 = t3.expectation(&QOperator::number(t3.layout(), 0).unwrap()).unwrap();
    assert!((mean3.re - 3.0).abs() < 1e-6);

    // n̄ = 5 in 8 levels loses far more than the warning threshold.
    assert!(thermal_truncation_loss(8, 5.0) > 1e-6);
    assert!((thermal_tail_mass(8, 5.0) - (5.0f64 / 6.0).powi(8)).abs() < 1e-15);
}

#[test]
fn identity_expectation_is_trace() {
    let t = thermal_state(20, 1.3).unwrap();
    let id = QOperator::identity(t.layout());
    assert!((t.expectation(&id).unwrap() - 1.0).norm() < 1e-10);
}

#[test]
fn commutator_truncation_artifact() {
    for dim in [2usize, 3, 7] {
        let l = ModeLayout::single(dim, "m").unwrap();
        let a = QOperator::lowering(&l, 0).unwrap();
        let comm = (&a * &a.adjoint()) - (&a.adjoint() * &a);
        let d = comm.to_dense();
        for i in 0..dim {
            for j in 0..dim {
                let want = if i != j {
                    0.0
                } else if i + 1 < dim {
                    1.0
                } else {
                    1.0 - dim as f64
                };
                assert!((d[(i, j)] - want).norm() < 1e-12, "({i},{j}) {}", d[(i, j)]);
            }
        }
    }
}

#[test]
fn distinct_modes_commute_exactly() {
    let l = ModeLayout::standard(3, 2, 4).unwrap();
    let ops: Vec<QOperator> = (0..3)
        .flat_map(|m| {
            [
                QOperator::lowering(&l, m).unwrap(),
                QOperator::raising(&l, m).unwrap(),
            ]
        })
        .collect();
    for (i, x) in ops.iter().enumerate() {
        for (j, y) in ops.iter().enumerate() {
            if i / 2 != j / 2 {
                let comm = &(x * y) - &(y * x);
                assert_eq!(comm.max_abs(), 0.0);
            }
        }
    }
}

#[test]
fn partial_traces() {
    let l = ModeLayout::new(&[2, 2], &["a", "b"]).unwrap();
    let prod = fock_state(&l, &[0, 1]).unwrap();
    let rb = prod.partial_trace(&[1]).unwrap().density_matrix();
    assert_eq!(rb, DenseMatrix::from_fn(2, 2, |i, j| c(if i == 1 && j == 1 { 1.0 } else { 0.0 })));

    let s = 0.5f64.sqrt();
    let bell = QState::from_vector(l.clone(), vec![c(s), c(0.0), c(0.0), c(s)]).unwrap();
    for keep in [0usize, 1] {
        let r = bell.partial_trace(&[keep]).unwrap();
        assert!((r.purity() - 0.5).abs() < 1e-15);
        assert!((r.trace() - 1.0).abs() < 1e-10);
    }
    assert!(bell.partial_trace(&[]).is_err());
}

#[test]
fn expectation_layout_mismatch() {
    let l1 = ModeLayout::single(3, "a").unwrap();
    let l2 = ModeLayout::single(3, "b").unwrap();
    let s = fock_state(&l1, &[1]).unwrap();
    assert!(s.expectation(&QOperator::number(&l2, 0).unwrap()).is_err());
}

fn random_density(n: usize, seed: &[f64]) -> DenseMatrix {
    // ρ = M M† / Tr from a seeded complex matrix.
    let m = DenseMatrix::from_fn(n, n, |i, j| {
        let k = (i * n + j) % seed.len();
        C64::new(seed[k] * (1.0 + i as f64), seed[(k + 1) % seed.len()] - j as f64 * 0.1)
    });
    let r = m.matmul(&m.adjoint());
    let tr = r.trace();
    r.scale(1.0 / tr).hermitian_part()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 32, ..ProptestConfig::default() })]

    #[test]
    fn partial_trace_of_product(seed_a in prop::collection::vec(-1.0f64..1.0, 6),
                                seed_b in prop::collection::vec(-1.0f64..1.0, 6)) {
        let ra = random_density(2, &seed_a);
        let rb = random_density(3, &seed_b);
        prop_assume!(ra.trace().re > 0.0 && rb.trace().re > 0.0);
        let a = QState::from_density(ModeLayout::single(2, "a").unwrap(), ra.clone());
        let b = QState::from_density(ModeLayout::single(3, "b").unwrap(), rb.clone());
        prop_assume!(a.is_ok() && b.is_ok());
        let ab = a.unwrap().tensor(&b.unwrap()).unwrap();
        let back = ab.partial_trace(&[0]).unwrap().density_matrix();
        prop_assert!(back.sub(&ra).max_abs() < 1e-12);
        let back_b = ab.partial_trace(&[1]).unwrap().density_matrix();
        prop_assert!(back_b.sub(&rb).max_abs() < 1e-12);
        prop_assert!((ab.partial_trace(&[1]).unwrap().trace() - ab.trace()).abs() < 1e-10);
    }

    #[test]
    fn truncation_loss_matches_tail(dim in 2usize..60, re in -4.0f64..4.0, im in -4.0f64..4.0) {
        let beta = C64::new(re, im);
        prop_assert!((coherent_tail_mass(dim, beta) - coherent_truncation_loss(dim, beta)).abs() < 1e-8);
        let nb = re.abs() * 3.0;
        prop_assert!((thermal_tail_mass(dim, nb) - thermal_truncation_loss(dim, nb)).abs() < 1e-8);
    }
}
