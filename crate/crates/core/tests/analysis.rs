// Copyright 2026 The emech Authors
// SPDX-License-Identifier: Apache-2.0

use std::f64::consts::PI;

use emech::analysis::{
    cat_state, fidelity, ghz_target, grid, parity, populations, wigner, wigner_point, Parity,
};
use emech::hilbert::{
    coherent_state, fock_state, thermal_state, DenseMatrix, ModeLayout, QOperator, QState,
};
use emech::C64;
use proptest::prelude::*;

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

#[test]
fn fidelity_basics() {
    let psi = coherent_state(20, C64::new(0.7, 0.2)).unwrap();
    assert!((fidelity(&psi, &psi).unwrap() - 1.0).abs() < 1e-12);
    assert!((fidelity(&psi.to_density(), &psi).unwrap() - 1.0).abs() < 1e-12);

    let l = ModeLayout::single(5, "mech").unwrap();
    let mixed = QState::from_density(l.clone(), DenseMatrix::identity(5).scale(c(0.2))).unwrap();
    let target = fock_state(&l, &[3]).unwrap();
    assert!((fidelity(&mixed, &target).unwrap() - 0.2).abs() < 1e-12);

    let other = ModeLayout::single(5, "x").unwrap();
    assert!(fidelity(&mixed, &fock_state(&other, &[0]).unwrap()).is_err());
    assert!(fidelity(&psi, &psi.to_density()).is_err());
}

#[test]
fn cat_states() {
    let even = cat_state(60, c(4.0), Parity::Even).unwrap();
    let odd = cat_state(60, c(4.0), Parity::Odd).unwrap();
    // Large-β normalization → 1/√2 relative to the raw superposition.
    let raw = 2.0 * (1.0 + (-32.0f64).exp());
    assert!((1.0 / raw.sqrt() - 0.5f64.sqrt()).abs() < 1e-6);
    let v = even.as_vector().unwrap();
    for n in (1..60).step_by(2) {
        assert_eq!(v[n], c(0.0));
    }
    assert!((parity(&even, "mech").unwrap() - 1.0).abs() < 1e-10);
    assert!((parity(&odd, "mech").unwrap() + 1.0).abs() < 1e-10);
    assert!((even.trace() - 1.0).abs() < 1e-10);

    let vac = cat_state(10, c(0.0), Parity::Even).unwrap();
    assert!((vac.as_vector().unwrap()[0].norm() - 1.0).abs() < 1e-15);
    assert!(cat_state(10, c(0.0), Parity::Odd).is_err());
}

#[test]
fn ghz_target_structure() {
    let beta = c(2.0);
    let l = ModeLayout::standard(2, 2, 30).unwrap();
    let g = ghz_target(beta, &l).unwrap();
    assert!((g.trace() - 1.0).abs() < 1e-10);
    // The ½ prefactor normalizes the untruncated state; truncation at 30
    // levels loses far less than the tolerance.
    let raw_norm: f64 = {
        let e = 0.25 * (2.0 + 2.0 * (-8.0f64).exp());
        let o = 0.25 * (2.0 - 2.0 * (-8.0f64).exp());
        e + o
    };
    assert!((raw_norm - 1.0).abs() < 1e-15);

    // Branch weights are (1 ± e^{−2|β|²})/2, balanced only as β grows.
    let rt = g.reduce_to("transmon").unwrap().density_matrix();
    let e = (-8.0f64).exp();
    assert!((rt[(0, 0)] - c(0.5 * (1.0 + e))).norm() < 1e-10);
    assert!((rt[(1, 1)] - c(0.5 * (1.0 - e))).norm() < 1e-10);
    assert!(rt[(0, 1)].norm() < 1e-10);
    let wide = ModeLayout::standard(2, 2, 60).unwrap();
    let rt4 = ghz_target(c(4.0), &wide).unwrap().reduce_to("transmon").unwrap().density_matrix();
    assert!((rt4[(0, 0)] - c(0.5)).norm() < 1e-10);
    assert!((rt4[(1, 1)] - c(0.5)).norm() < 1e-10);

    let zz = {
        let zt = QOperator::diagonal_fn(&l, |o| c(if o[0] == 0 { 1.0 } else { -1.0 }));
        let zc = QOperator::diagonal_fn(&l, |o| c(if o[1] == 0 { 1.0 } else { -1.0 }));
        zt.try_matmul(&zc).unwrap()
    };
    assert!((g.expectation(&zz).unwrap().re - 1.0).abs() < 1e-12);

    // Post-select transmon |1⟩ → odd cat on the mechanics.
    let psi = g.as_vector().unwrap();
    let mut mech = vec![c(0.0); 30];
    for (n, m) in mech.iter_mut().enumerate() {
        *m = psi[l.flat_index(&[1, 1, n]).unwrap()];
    }
    let post = QState::normalized(ModeLayout::single(30, "mech").unwrap(), mech).unwrap();
    let odd = cat_state(30, beta, Parity::Odd).unwrap();
    assert!((fidelity(&post, &odd).unwrap() - 1.0).abs() < 1e-12);

    assert!(ghz_target(c(0.0), &l).is_err());
    let pops = populations(&g, "cavity").unwrap();
    assert!((pops[1] - 0.5 * (1.0 - e)).abs() < 1e-10);
}

#[test]
fn wigner_reference_values() {
    let vac = fock_state(&ModeLayout::single(6, "mech").unwrap(), &[0]).unwrap();
    let one = fock_state(&ModeLayout::single(6, "mech").unwrap(), &[1]).unwrap();
    assert!((wigner_point(&vac.density_matrix(), 0.0, 0.0) - 1.0 / PI).abs() < 1e-14);
    assert!((wigner_point(&one.density_matrix(), 0.0, 0.0) + 1.0 / PI).abs() < 1e-14);
    // Vacuum Gaussian e^{−x²−p²}/π.
    let w = wigner_point(&vac.density_matrix(), 0.7, -1.1);
    assert!((w - (-(0.49 + 1.21f64)).exp() / PI).abs() < 1e-14);

    let multi = fock_state(&ModeLayout::standard(2, 2, 3).unwrap(), &[0, 0, 0]).unwrap();
    assert!(wigner(&multi, &[0.0], &[0.0]).is_err());
}

/// `(1/π) Tr[ρ D(γ) Π D(γ)†]` with `D` from the exact exponential in an
/// enlarged space.
fn brute_force_wigner(rho: &DenseMatrix, x: f64, p: f64) -> f64 {
    let n = rho.nrows();
    let big = n + 60;
    let l = ModeLayout::single(big, "m").unwrap();
    let alpha = C64::new(x, p) / 2f64.sqrt();
    let b = QOperator::lowering(&l, 0).unwrap();
    // D(α) = exp(αb† − α*b) = exp(−iK) with K = i(αb† − α*b).
    let gen = b.adjoint().scale(alpha).try_sub(&b.scale(alpha.conj())).unwrap();
    let k = gen.scale(C64::new(0.0, 1.0));
    let d = k.propagator(1.0).unwrap().to_dense();
    let par = DenseMatrix::from_fn(big, big, |i, j| {
        if i == j {
            c(if i % 2 == 0 { 1.0 } else { -1.0 })
        } else {
            c(0.0)
        }
    });
    let op = d.matmul(&par).matmul(&d.adjoint());
    let mut s = C64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            s += rho[(i, j)] * op[(j, i)];
        }
    }
    assert!(s.im.abs() < 1e-10);
    s.re / PI
}

#[test]
fn wigner_matches_displaced_parity_oracle() {
    let cat = cat_state(30, c(2.0), Parity::Odd).unwrap().density_matrix();
    let mut seed = 12345u64;
    let mut rnd = || {
        seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((seed >> 11) as f64 / (1u64 << 53) as f64) * 8.0 - 4.0
    };
    for _ in 0..20 {
        let (x, p) = (rnd(), rnd());
        let fast = wigner_point(&cat, x, p);
        let slow = brute_force_wigner(&cat, x, p);
        assert!((fast - slow).abs() < 1e-6, "({x},{p}): {fast} vs {slow}");
    }
}

/// Harmonic-oscillator eigenfunctions by the stable three-term recurrence.
fn hermite_functions(n: usize, x: f64) -> Vec<f64> {
    let mut out = vec![0.0; n];
    out[0] = PI.powf(-0.25) * (-0.5 * x * x).exp();
    if n > 1 {
        out[1] = 2f64.sqrt() * x * out[0];
    }
    for k in 2..n {
        out[k] = (2.0 / k as f64).sqrt() * x * out[k - 1]
            - ((k - 1) as f64 / k as f64).sqrt() * out[k - 2];
    }
    out
}

#[test]
fn wigner_normalization_and_marginals() {
    let states = [
        cat_state(30, c(2.0), Parity::Odd).unwrap().to_density(),
        thermal_state(30, 0.8).unwrap(),
        fock_state(&ModeLayout::single(8, "mech").unwrap(), &[3]).unwrap().to_density(),
    ];
    let x = grid(-8.0, 8.0, 161);
    let p = grid(-8.0, 8.0, 161);
    for s in &states {
        let map = wigner(s, &x, &p).unwrap();
        assert!((map.integral() - 1.0).abs() < 1e-3, "integral {}", map.integral());
        let rho = s.density_matrix();
        let n = rho.nrows();
        for (i, xi) in map.x.iter().enumerate().step_by(7) {
            let h = hermite_functions(n, *xi);
            let mut want = C64::new(0.0, 0.0);
            for a in 0..n {
                for b in 0..n {
                    want += rho[(a, b)] * h[a] * h[b];
                }
            }
            let got = map.x_marginal()[i];
            assert!((got - want.re).abs() < 1e-3, "x={xi}: {got} vs {}", want.re);
        }
    }
    let odd = wigner(&states[0], &[0.0], &[0.0]).unwrap();
    assert!(odd.values[0][0] < 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn fidelity_ignores_global_phase(re in -2.0f64..2.0, im in -2.0f64..2.0, phase in 0.0f64..6.3) {
        let target = coherent_state(25, C64::new(re, im)).unwrap();
        let rho = thermal_state(25, 0.5).unwrap();
        let rotated = QState::from_vector(
            target.layout().clone(),
            target.as_vector().unwrap().iter().map(|a| a * C64::from_polar(1.0, phase)).collect(),
        ).unwrap();
        let f1 = fidelity(&rho, &target).unwrap();
        let f2 = fidelity(&rho, &rotated).unwrap();
        prop_assert!((f1 - f2).abs() < 1e-12);
    }

    #[test]
    fn wigner_matches_oracle_random(x in -3.0f64..3.0, p in -3.0f64..3.0, re in -1.5f64..1.5) {
        let rho = cat_state(20, C64::new(re, 0.5), Parity::Even).unwrap().density_matrix();
        let fast = wigner_point(&rho, x, p);
        let slow = brute_force_wigner(&rho, x, p);
        prop_assert!((fast - slow).abs() < 1e-8);
    }
}
