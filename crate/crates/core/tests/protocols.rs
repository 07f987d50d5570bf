// Copyright 2026 The emech Authors
// SPDX-License-Identifier: Apache-2.0

use std::f64::consts::PI;

use emech::analysis::postselect;
use emech::dynamics::{IntegratorSettings, Method, Observables};
use emech::hilbert::{coherent_amplitudes, fock_state, DenseMatrix, ModeLayout, QOperator, MECH, TRANSMON};
use emech::model::{hamiltonian, polariton, preset, Branch, Drive, HamiltonianOptions, SystemParams};
use emech::protocols::*;
use emech::{Error, C64};
use proptest::prelude::*;

fn set1() -> SystemParams {
    preset("set1").unwrap().params
}

/// set2 at the GHZ operating point.
fn set2_ghz() -> SystemParams {
    let p = preset("set2").unwrap();
    p.params.with_zeta(p.params.zeta + p.zeta_span)
}

/// Lossless set1 with `g0` scaled so that `g_t = ratio · Ω_m` at the
/// resonance.
fn set1_small_coupling(ratio: f64) -> SystemParams {
    let p = set1().lossless();
    let res = solve_resonance(&p).unwrap();
    let g_t = p.with_zeta(res.zeta).derive().g_t;
    SystemParams {
        g0: p.g0 * ratio * p.omega_m / g_t,
        ..p
    }
}

/// Deterministic uniform samples in [0, 1).
fn lcg(seed: u64, n: usize) -> Vec<f64> {
    let mut s = seed;
    (0..n)
        .map(|_| {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (s >> 11) as f64 / (1u64 << 53) as f64
        })
        .collect()
}

fn vec_dist(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}

// ---------------------------------------------------------------- pulses

#[test]
fn rotation_matrix_basics() {
    let r = rotation_matrix(PI, Axis::X);
    // |0⟩ → −i|1⟩
    assert!(r[0][0].norm() < 1e-15 && (r[1][0] - C64::new(0.0, -1.0)).norm() < 1e-15);
    let h = rotation_matrix(PI / 2.0, Axis::Y);
    let s = 0.5f64.sqrt();
    assert!((h[0][0].re - s).abs() < 1e-15 && (h[1][0].re - s).abs() < 1e-15);
    // Two half rotations compose to one full rotation.
    let half = rotation_matrix(PI / 2.0, Axis::X);
    let full = rotation_matrix(PI, Axis::X);
    for i in 0..2 {
        for j in 0..2 {
            let v: C64 = (0..2).map(|k| half[i][k] * half[k][j]).sum();
            assert!((v - full[i][j]).norm() < 1e-15);
        }
    }
}

#[test]
fn transition_names_round_trip() {
    for t in [
        Transition::Transmon01,
        Transition::Transmon12,
        Transition::PolaritonPlus,
        Transition::PolaritonMinus,
    ] {
        assert_eq!(t.to_string().parse::<Transition>().unwrap(), t);
    }
    assert_eq!("plus".parse::<Transition>().unwrap(), Transition::PolaritonPlus);
    assert!("sideways".parse::<Transition>().is_err());
}

#[test]
fn transmon12_pulse_needs_three_levels() {
    let p = set1();
    let l2 = ModeLayout::standard(2, 2, 3).unwrap();
    assert!(matches!(
        pulse_unitary(&p, &l2, 0.0, Transition::Transmon12, PI, Axis::X),
        Err(Error::Layout(_))
    ));
    let l3 = ModeLayout::standard(3, 2, 3).unwrap();
    let u = pulse_unitary(&p, &l3, 0.0, Transition::Transmon12, PI, Axis::X).unwrap();
    let s = fock_state(&l3, &[1, 0, 2]).unwrap();
    let out = u.apply(s.as_vector().unwrap());
    let i = l3.flat_index(&[2, 0, 2]).unwrap();
    assert!((out[i].norm() - 1.0).abs() < 1e-14);
}

#[test]
fn polariton_vectors_are_one_excitation_eigenvectors() {
    let p = set1().with_zeta(solve_resonance(&set1()).unwrap().zeta);
    let frame = 1.0e11;
    let pol = polariton_vectors(&p, frame).unwrap();
    let pp = polariton(&p, frame).unwrap();
    let d = p.derive();
    // Independent 2×2 block: [[ω_t − f, iχ], [−iχ, ω_c − f]] in (|1,0⟩, |0,1⟩).
    let block = [
        [C64::new(d.omega_t - frame, 0.0), C64::new(0.0, -d.chi)],
        [C64::new(0.0, d.chi), C64::new(p.omega_c - frame, 0.0)],
    ];
    for (k, (val, v)) in pol.iter().enumerate() {
        for r in 0..2 {
            let hv = block[r][0] * v[0] + block[r][1] * v[1];
            assert!((hv - val * v[r]).norm() < 1e-9 * d.omega_t, "row {r} of vector {k}");
        }
    }
    let expect = [pp.omega_minus - frame, pp.omega_plus - frame];
    for k in 0..2 {
        assert!((pol[k].0 - expect[k]).abs() < 1e-10 * d.omega_t);
    }
    let ov: C64 = pol[0].1[0].conj() * pol[1].1[0] + pol[0].1[1].conj() * pol[1].1[1];
    assert!(ov.norm() < 1e-12);
}

#[test]
fn polariton_pulse_excites_the_polariton() {
    let p = set1();
    let layout = ModeLayout::standard(2, 2, 3).unwrap();
    let pol = polariton_vectors(&p, 0.0).unwrap();
    let u = pulse_unitary(&p, &layout, 0.0, Transition::PolaritonPlus, PI, Axis::X).unwrap();
    assert!(u.unitarity_error() < 1e-12);
    let s = fock_state(&layout, &[0, 0, 1]).unwrap();
    let out = u.apply(s.as_vector().unwrap());
    let i10 = layout.flat_index(&[1, 0, 1]).unwrap();
    let i01 = layout.flat_index(&[0, 1, 1]).unwrap();
    let amp = C64::new(0.0, -1.0);
    assert!((out[i10] - amp * pol[1].1[0]).norm() < 1e-12);
    assert!((out[i01] - amp * pol[1].1[1]).norm() < 1e-12);
    // States outside the addressed pair are untouched.
    let s2 = fock_state(&layout, &[1, 1, 0]).unwrap();
    assert!(vec_dist(&u.apply(s2.as_vector().unwrap()), s2.as_vector().unwrap()) < 1e-14);
}

#[test]
fn embed_on_modes_matches_single_mode_embedding() {
    let layout = ModeLayout::standard(3, 2, 4).unwrap();
    let local = DenseMatrix::from_fn(4, 4, |i, j| C64::new((i * 4 + j) as f64, (i as f64) - (j as f64)));
    let a = embed_on_modes(&layout, &[2], &local).unwrap().to_dense();
    let b = QOperator::embed(&layout, 2, &emech::hilbert::CsrMatrix::from_dense(&local))
        .unwrap()
        .to_dense();
    assert!(a.sub(&b).max_abs() < 1e-15);
    assert!(embed_on_modes(&layout, &[0, 1], &local).is_err());
}

#[test]
fn sequence_bookkeeping() {
    let p = set1();
    let q = p.with_zeta(160.0);
    let seq = PulseSequence::new(&p, 0.0)
        .rotate(Transition::Transmon01, PI, Axis::X)
        .segment(1e-7)
        .unwrap()
        .retune(&q)
        .segment(2e-7)
        .unwrap();
    assert!((seq.duration() - 3e-7).abs() < 1e-20);
    assert_eq!(seq.events().len(), 4);
    assert_eq!(seq.events()[2].time, 1e-7);
    assert_eq!(seq.final_params().zeta, 160.0);
    assert!(PulseSequence::new(&p, 0.0).segment(-1.0).is_err());
    let json = serde_json::to_string(&seq.events()[0]).unwrap();
    assert!(json.contains("\"kind\":\"rotation\""), "{json}");
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn pulses_are_unitary(angle in -7.0f64..7.0, y in any::<bool>(), which in 0usize..4) {
        let p = set1();
        let layout = ModeLayout::standard(3, 2, 2).unwrap();
        let axis = if y { Axis::Y } else { Axis::X };
        let target = [
            Transition::Transmon01,
            Transition::Transmon12,
            Transition::PolaritonPlus,
            Transition::PolaritonMinus,
        ][which];
        let u = pulse_unitary(&p, &layout, 1e11, target, angle, axis).unwrap();
        prop_assert!(u.unitarity_error() < 1e-12);
    }
}

// ------------------------------------------------------------- resonance

#[test]
fn resonance_set1_falls_back_to_minimum_splitting() {
    let r = solve_resonance(&set1()).unwrap();
    assert!(!r.exact);
    assert!(r.mismatch > 0.0 && r.mismatch < 1e-3, "{}", r.mismatch);
    assert!((r.zeta - 150.0).abs() < 0.01, "{}", r.zeta);
}

#[test]
fn resonance_exact_when_reachable() {
    let p = SystemParams {
        omega_m: 1.5 * set1().omega_m,
        ..set1()
    };
    let r = solve_resonance(&p).unwrap();
    assert!(r.exact);
    let d = p.with_zeta(r.zeta).derive();
    let split = (d.delta * d.delta + 4.0 * d.chi * d.chi).sqrt();
    assert!((split - p.omega_m).abs() < 1e-9 * p.omega_m);
    assert!(d.delta >= 0.0);
}

#[test]
fn resonance_refuses_large_mismatch() {
    let p = SystemParams {
        omega_m: 0.5 * set1().omega_m,
        ..set1()
    };
    assert!(matches!(solve_resonance(&p), Err(Error::Resonance(_))));
}

// --------------------------------------------------------------- cooling

#[test]
fn local_minima_counting() {
    assert_eq!(count_local_minima(&[3.0, 1.0, 3.0, 0.5, 3.0], 0.05), 2);
    // A 1% dip on a slope does not count.
    assert_eq!(count_local_minima(&[5.0, 4.0, 3.96, 4.0, 2.0, 1.0, 2.0], 0.05), 1);
    assert_eq!(count_local_minima(&[1.0, 2.0, 3.0], 0.05), 0);
    assert_eq!(count_local_minima(&[1.0, 0.0], 0.05), 0);
    // Shallow but relatively deep minimum between large peaks.
    assert_eq!(count_local_minima(&[25.0, 0.26, 0.5, 0.33, 20.0], 0.05), 2);
}

#[test]
fn detuning_grid_shapes() {
    let g = detuning_grid(2.0, -2.0, 0.0, 5).unwrap();
    assert_eq!(g, vec![-4.0, -3.0, -2.0, -1.0, 0.0]);
    assert_eq!(detuning_grid(2.0, -2.0, 0.0, 1).unwrap(), vec![-2.0]);
    assert!(detuning_grid(2.0, 0.0, -1.0, 3).is_err());
    assert!(detuning_grid(2.0, 0.0, 1.0, 0).is_err());
}

#[test]
fn zero_drive_returns_truncated_thermal_occupation() {
    let n_bar = 1.0;
    let p = set1().with_bath_occupation(n_bar);
    let dim = 10;
    let layout = ModeLayout::standard(2, 2, dim).unwrap();
    let grid = detuning_grid(p.omega_m, -2.0, 0.0, 5).unwrap();
    let cfg = CoolingConfig {
        e_l: Some(0.0),
        ..CoolingConfig::default()
    };
    let r = cooling_sweep(&p, Branch::Plus, &grid, &layout, &cfg).unwrap();
    // Truncated Bose distribution p_k ∝ x^k.
    let x = n_bar / (n_bar + 1.0);
    let z: f64 = (0..dim).map(|k| x.powi(k as i32)).sum();
    let oracle: f64 = (0..dim).map(|k| k as f64 * x.powi(k as i32)).sum::<f64>() / z;
    assert!(r.all_converged());
    for n in &r.n_final {
        assert!((n - oracle).abs() < 1e-8 * oracle, "{n} vs {oracle}");
    }
}

#[test]
fn sweep_rejects_detunings_outside_window() {
    let p = set1();
    let layout = ModeLayout::standard(2, 2, 3).unwrap();
    let bad = [1.5 * p.omega_m];
    assert!(cooling_sweep(&p, Branch::Plus, &bad, &layout, &CoolingConfig::default()).is_err());
    assert!(cooling_sweep(&p, Branch::Plus, &[], &layout, &CoolingConfig::default()).is_err());
}

#[test]
fn displaced_frame_matches_undisplaced_drive() {
    // Weak drive keeps the bare cavity amplitude small enough to converge
    // the undisplaced run at a moderate cavity truncation.
    let pr = preset("set1").unwrap();
    let p = pr.params.with_zeta(pr.params.zeta + pr.zeta_span).with_bath_occupation(0.5);
    let omega_l = polariton(&p, 0.0).unwrap().omega(Branch::Plus) - p.omega_m;
    let e_l = 0.2 * (p.omega_c - omega_l).abs();
    let cs = |l: &ModeLayout| emech::dynamics::CollapseSet::standard(&p, l).unwrap();

    let small = ModeLayout::standard(2, 3, 4).unwrap();
    let (hd, cbar) = displaced_drive_hamiltonian(&p, &small, omega_l, e_l).unwrap();
    assert!((cbar.norm() - 0.2).abs() < 0.01, "{cbar}");
    let rd = emech::dynamics::steady_state(&hd, &cs(&small)).unwrap();
    let nd = rd.expectation(&QOperator::number(&small, 2).unwrap()).unwrap().re;

    let big = ModeLayout::standard(2, 8, 4).unwrap();
    let pd = p.with_drive(Some(Drive { e_l, omega_l }));
    let hu = hamiltonian(
        &pd,
        &big,
        &HamiltonianOptions {
            frame: omega_l,
            include_g_c: true,
            include_drive: true,
        },
    )
    .unwrap();
    let ru = emech::dynamics::steady_state(&hu, &cs(&big)).unwrap();
    let nu = ru.expectation(&QOperator::number(&big, 2).unwrap()).unwrap().re;
    assert!((nd - nu).abs() < 1e-6 * nu.max(1e-3), "displaced {nd} vs undisplaced {nu}");
}

#[test]
fn auto_drive_population_in_weak_drive_limit() {
    // Steady state of the driven transmon–cavity pair alone, drive at the
    // red sideband of the + polariton.
    let pr = preset("set1").unwrap();
    let p = pr.params.with_zeta(pr.params.zeta + pr.zeta_span);
    let target = 1e-3;
    let e_l = auto_drive_amplitude(&p, Branch::Plus, target).unwrap();
    let omega_l = polariton(&p, 0.0).unwrap().omega(Branch::Plus) - p.omega_m;
    let layout = ModeLayout::new(&[3, 4], &[TRANSMON, emech::hilbert::CAVITY]).unwrap();
    let h = hamiltonian(
        &p.with_drive(Some(Drive { e_l, omega_l })),
        &layout,
        &HamiltonianOptions {
            frame: omega_l,
            include_g_c: true,
            include_drive: true,
        },
    )
    .unwrap();
    let cs = emech::dynamics::CollapseSet::standard(&p, &layout).unwrap();
    let rho = emech::dynamics::steady_state(&h, &cs).unwrap();
    let v = polariton_vectors(&p, omega_l).unwrap()[1].1;
    let mut plus = vec![C64::new(0.0, 0.0); layout.total()];
    plus[layout.flat_index(&[1, 0]).unwrap()] = v[0];
    plus[layout.flat_index(&[0, 1]).unwrap()] = v[1];
    let proj = QOperator::from_dense(layout.clone(), DenseMatrix::outer(&plus, &plus)).unwrap();
    let pop = rho.expectation(&proj).unwrap().re;
    assert!((pop / target - 1.0).abs() < 0.05, "{pop}");
}

#[test]
fn cooling_improves_when_dephasing_is_halved() {
    let pr = preset("set1").unwrap();
    let p = pr.params.with_zeta(pr.params.zeta + pr.zeta_span).with_bath_occupation(5.0);
    let q = SystemParams {
        gamma_phi: 0.5 * p.gamma_phi,
        ..p.clone()
    };
    let layout = ModeLayout::standard(2, 2, 15).unwrap();
    // Same drive for both so only the dephasing differs.
    let e_l = auto_drive_amplitude(&p, Branch::Plus, DEFAULT_POLARITON_POPULATION).unwrap();
    let (_, n_p) = optimal_detuning(&p, Branch::Plus, e_l, &layout, (-2.0, 0.0, 21)).unwrap();
    let (_, n_q) = optimal_detuning(&q, Branch::Plus, e_l, &layout, (-2.0, 0.0, 21)).unwrap();
    assert!(n_q < n_p, "halved γ_φ: {n_q} vs {n_p}");
}

// ------------------------------------------------------------------ Fock

#[test]
fn fock_rejects_bad_targets() {
    let p = set1();
    assert!(prepare_fock(&p, &FockConfig::new(0)).is_err());
    let mut c = FockConfig::new(3);
    c.dims = Some((2, 2, 3));
    assert!(matches!(prepare_fock(&p, &c), Err(Error::Truncation(_))));
}

#[test]
fn fock_lossless_small_coupling() {
    let p = set1_small_coupling(0.01);
    let r = prepare_fock(&p, &FockConfig::new(1)).unwrap();
    assert!(r.fidelity() >= 0.99, "F = {}", r.fidelity());
    assert_eq!(r.stages.len(), 2);
    assert_eq!(r.stages[0].fidelity, 1.0);
    assert!((r.swap_times[0] - PI / (2.0 * r.g_threebody)).abs() < 1e-12 * r.swap_times[0]);
}

#[test]
fn fock_swap_scaling_follows_sqrt_n() {
    let p = set1_small_coupling(0.01);
    let (_, _, g) = fock_operating_point(&p).unwrap();
    let layout = ModeLayout::standard(2, 2, 6).unwrap();
    let times: Vec<f64> = (1..=3)
        .map(|k| {
            let tau = PI / (2.0 * (k as f64).sqrt() * g);
            swap_time_scan(&p, k, &layout, 1.8 * tau, 1801).unwrap()
        })
        .collect();
    for (i, t) in times.iter().enumerate() {
        let k = (i + 1) as f64;
        let scaled = t * k.sqrt() / times[0];
        assert!((scaled - 1.0).abs() < 0.02, "k = {k}: t√k/t₁ = {scaled}");
        let tau = PI / (2.0 * k.sqrt() * g);
        assert!((t / tau - 1.0).abs() < 0.02, "k = {k}: t/τ = {}", t / tau);
    }
}

#[test]
fn fock_timing_sensitivity() {
    let p = set1_small_coupling(0.01);
    let mut c = FockConfig::new(2);
    let right = prepare_fock(&p, &c).unwrap();
    c.timing = SwapTiming::Uniform;
    let wrong = prepare_fock(&p, &c).unwrap();
    assert!(right.fidelity() > wrong.fidelity() + 0.05, "{} vs {}", right.fidelity(), wrong.fidelity());
    assert!(right.fidelity() > 0.98, "{}", right.fidelity());
}

#[test]
fn fock_swap_keeps_at_most_one_polariton() {
    let p = set1_small_coupling(0.01);
    let (op, _, g) = fock_operating_point(&p).unwrap();
    let pp = polariton(&op, 0.0).unwrap();
    let frame = 0.5 * (pp.omega_plus + pp.omega_minus);
    let layout = ModeLayout::standard(2, 2, 6).unwrap();
    let n_tc = QOperator::diagonal_fn(&layout, |o| C64::new(if o[0] + o[1] <= 1 { 1.0 } else { 0.0 }, 0.0));
    let tau = PI / (2.0 * g);
    let seq = PulseSequence::new(&op, frame)
        .rotate(Transition::PolaritonPlus, PI, Axis::X)
        .segment(tau)
        .unwrap();
    let settings = IntegratorSettings {
        method: Method::Exact,
        record_every: Some(tau / 200.0),
        ..IntegratorSettings::default()
    };
    let start = fock_state(&layout, &[0, 0, 0]).unwrap();
    let tr = seq.run(&start, &settings, &Observables::none().with("low", n_tc)).unwrap();
    let low = tr.get("low").unwrap();
    assert!(low.len() > 100);
    let worst = low.iter().cloned().fold(1.0, f64::min);
    assert!(worst >= 1.0 - 1e-3, "{worst}");
}

// ------------------------------------------------------------------- GHZ

#[test]
fn theory_p1_values() {
    assert!((theory_p1(3, 0.35, 1.0) - 0.490).abs() < 5e-4, "{}", theory_p1(3, 0.35, 1.0));
    assert_eq!(theory_p1(5, 0.0, 1.0), 0.0);
    assert!((theory_p1(101, 0.35, 1.0) - 0.5).abs() < 1e-15);
    assert!((ghz_beta(3, 0.35, 1.0) - 1.4).abs() < 1e-15);
    assert_eq!(ghz_theta(3, &set2_ghz()), 0.0);
}

#[test]
fn swap_zeta_tunes_upper_transition_to_cavity() {
    let p = set2_ghz();
    let d = p.with_zeta(swap_zeta(&p)).derive();
    assert!((d.omega_t - 2.0 * d.lambda - p.omega_c).abs() < 1e-9 * p.omega_c);
}

#[test]
fn conditional_displacement_closed_form() {
    let p = set2_ghz().lossless();
    let layout = ModeLayout::new(&[2, 25], &[TRANSMON, MECH]).unwrap();
    let d = p.derive();
    let (g, om) = (d.g_t, p.omega_m);
    let start = fock_state(&layout, &[0, 0]).unwrap();
    let s = 0.5f64.sqrt();
    for (k, u) in lcg(7, 10).into_iter().enumerate() {
        let t = u * 2.0 * PI / om;
        let seq = PulseSequence::new(&p, d.omega_t)
            .rotate(Transition::Transmon01, PI / 2.0, Axis::Y)
            .segment(t)
            .unwrap();
        let out = seq
            .run(&start, &IntegratorSettings::default(), &Observables::none())
            .unwrap()
            .final_state
            .unwrap();
        let psi = out.as_vector().unwrap();
        let alpha = (g / om) * (C64::from_polar(1.0, -om * t) - 1.0);
        let phi = (g / om).powi(2) * (om * t - (om * t).sin());
        let coh = coherent_amplitudes(25, alpha);
        let mut oracle = vec![C64::new(0.0, 0.0); 50];
        oracle[0] = C64::new(s, 0.0);
        for n in 0..25 {
            oracle[25 + n] = s * C64::from_polar(1.0, phi) * coh[n];
        }
        assert!(vec_dist(psi, &oracle) < 1e-6, "sample {k}: t = {t:e}, err {}", vec_dist(psi, &oracle));

        // The branch picture agrees: postselected mechanics is |α⟩.
        let (cond, prob) = postselect(&out, TRANSMON, 1).unwrap();
        assert!((prob - 0.5).abs() < 1e-8);
        let b = cond.expectation(&QOperator::lowering(cond.layout(), 0).unwrap()).unwrap();
        assert!((b - alpha).norm() < 1e-6);
    }
}

#[test]
fn displacement_without_pulses_from_excited_transmon() {
    let p = set2_ghz().lossless();
    let layout = ModeLayout::new(&[2, 25], &[TRANSMON, MECH]).unwrap();
    let g = p.derive().g_t;
    let seq = append_displacement(PulseSequence::new(&p, p.derive().omega_t), 0, p.omega_m).unwrap();
    let start = fock_state(&layout, &[1, 0]).unwrap();
    let out = seq
        .run(&start, &IntegratorSettings::default(), &Observables::none())
        .unwrap()
        .final_state
        .unwrap();
    let b = out.expectation(&QOperator::lowering(&layout, 1).unwrap()).unwrap();
    assert!((b - C64::new(-2.0 * g / p.omega_m, 0.0)).norm() < 1e-6, "{b}");
}

#[test]
fn zero_coupling_leaves_a_product_state() {
    let p = SystemParams {
        g0: 0.0,
        ..set2_ghz().lossless()
    };
    let layout = ModeLayout::new(&[2, 10], &[TRANSMON, MECH]).unwrap();
    let cfg = GhzConfig::default();
    let out = conditional_displacement(&p, 3, &layout, &cfg).unwrap();
    let mech = out.reduce_to(MECH).unwrap();
    assert!((mech.populations(0).unwrap()[0] - 1.0).abs() < 1e-10);
    assert!((out.purity() - 1.0).abs() < 1e-10);
}

#[test]
fn ghz_lossless_matches_theory() {
    let p = set2_ghz().lossless();
    let results = ghz_scan(&p, &[1, 3, 5, 7], &GhzConfig::default()).unwrap();
    for r in &results {
        assert!((r.p1_sim - r.p1_theory).abs() <= 0.05, "N_p = {}: {} vs {}", r.n_p, r.p1_sim, r.p1_theory);
        if r.beta >= 1.5 {
            assert!(r.fidelity_cat_odd >= 0.95, "N_p = {}: {}", r.n_p, r.fidelity_cat_odd);
        }
        assert!(r.fidelity_ghz >= 0.95);
    }
}

#[test]
fn ghz_cavity_deferral_is_exact_when_lossless() {
    let p = set2_ghz().lossless();
    let a = prepare_ghz(&p, 1, &GhzConfig::default()).unwrap();
    let b = prepare_ghz(
        &p,
        1,
        &GhzConfig {
            include_cavity: true,
            ..GhzConfig::default()
        },
    )
    .unwrap();
    assert!((a.p1_sim - b.p1_sim).abs() < 1e-3, "{} vs {}", a.p1_sim, b.p1_sim);
    assert!((a.fidelity_cat_odd - b.fidelity_cat_odd).abs() < 1e-3);
}

#[test]
fn ghz_rejects_even_pulse_counts_and_small_truncation() {
    let p = set2_ghz();
    assert!(matches!(prepare_ghz(&p, 2, &GhzConfig::default()), Err(Error::Parameter(_))));
    let layout = ModeLayout::new(&[2, 4], &[TRANSMON, MECH]).unwrap();
    assert!(matches!(
        conditional_displacement(&p, 7, &layout, &GhzConfig::default()),
        Err(Error::Truncation(_))
    ));
    assert!(ghz_theta(2, &p) != 0.0);
}

#[test]
fn ghz_fidelity_of_the_target_is_one() {
    let layout = ModeLayout::standard(3, 2, 20).unwrap();
    let beta = C64::new(1.2, -0.4);
    let target = emech::analysis::ghz_target(beta, &layout).unwrap();
    let f = ghz_fidelity_max_phase(&target, beta).unwrap();
    assert!((f - 1.0).abs() < 1e-9, "{f}");
    let f0 = ghz_fidelity_max_phase(&fock_state(&layout, &[0, 0, 0]).unwrap(), beta).unwrap();
    assert!(f0 < 0.6);
}
