// Copyright 2026 The emech Authors
// SPDX-License-Identifier: Apache-2.0

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::pulses::{Axis, PulseSequence, Transition};
use crate::analysis::{cat_amplitudes, cat_state, fidelity, postselect, Parity};
use crate::dynamics::{IntegratorSettings, Method, Observables};
use crate::error::{Error, Result};
use crate::hilbert::{
    coherent_safe_dim, fock_state, thermal_state, ModeLayout, QState, StateData, CAVITY, MECH,
    TRANSMON,
};
use crate::model::SystemParams;

/// `½(1 − exp(−2(N_p+1)² g_t²/Ω_m²))`.
pub fn theory_p1(n_p: usize, g_t: f64, omega_m: f64) -> f64 {
    let r = (n_p as f64 + 1.0) * g_t / omega_m;
    0.5 * (1.0 - (-2.0 * r * r).exp())
}

/// Cat amplitude `β = (N_p+1) g_t/Ω_m`.
pub fn ghz_beta(n_p: usize, g_t: f64, omega_m: f64) -> f64 {
    (n_p as f64 + 1.0) * g_t / omega_m
}

/// Relative branch phase after `N_p` pulses: zero for odd `N_p`,
/// `π(ω_t − g_t²/Ω_m)/Ω_m` for even `N_p`.
pub fn ghz_theta(n_p: usize, params: &SystemParams) -> f64 {
    if n_p % 2 == 1 {
        return 0.0;
    }
    let d = params.derive();
    PI * (d.omega_t - d.g_t * d.g_t / params.omega_m) / params.omega_m
}

/// ζ at which the transmon 1↔2 transition meets the cavity,
/// `ω_t − 2λ = ω_c`.
pub fn swap_zeta(params: &SystemParams) -> f64 {
    (params.omega_c / params.e_c + 2.0).powi(2) / 8.0
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GhzConfig {
    /// Mechanical truncation; defaults to the coherent-safe size for β.
    pub mech_dim: Option<usize>,
    /// Keep the cavity in the simulation during the displacement steps
    /// instead of attaching it in vacuum just before the swap.
    pub include_cavity: bool,
    /// Thermal phonon number of the initial mechanical state.
    pub initial_occupation: f64,
    pub settings: IntegratorSettings,
}

impl Default for GhzConfig {
    fn default() -> Self {
        Self {
            mech_dim: None,
            include_cavity: false,
            initial_occupation: 0.0,
            settings: IntegratorSettings::default(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GhzResult {
    pub n_p: usize,
    pub beta: f64,
    pub p1_sim: f64,
    pub p1_theory: f64,
    /// Fidelity of the mechanics, conditioned on transmon `|1⟩`, to the odd
    /// cat of amplitude β.
    pub fidelity_cat_odd: f64,
    /// Fidelity to the GHZ target, maximized over the relative phase of
    /// its two branches.
    pub fidelity_ghz: f64,
    pub theta: f64,
    pub mech_dim: usize,
    pub warnings: Vec<String>,
    #[serde(skip)]
    pub final_state: Option<QState>,
}

fn regime_warnings(params: &SystemParams, n_p: usize) -> Vec<String> {
    let d = params.derive();
    let mut out = Vec::new();
    let spacing = params.omega_m / n_p.max(1) as f64;
    let loss = PI * params.gamma_t.max(d.n_bar * d.gamma_m);
    if !(loss < spacing) {
        out.push(format!(
            "GHZ regime: π·max(γ_t, n̄Γ_m) = {loss:.3e} is not < Ω_m/N_p = {spacing:.3e}"
        ));
    }
    if !(spacing < d.g_t) {
        out.push(format!(
            "GHZ regime: Ω_m/N_p = {spacing:.3e} is not < g_t = {:.3e}",
            d.g_t
        ));
    }
    if !(d.chi >= 10.0 * params.omega_m) {
        out.push(format!(
            "GHZ regime: χ = {:.3e} is not ≫ Ω_m = {:.3e}",
            d.chi, params.omega_m
        ));
    }
    for w in &out {
        log::warn!("{w}");
    }
    out
}

/// Appends the pulse train of the conditional displacement: `N_p + 1` free
/// intervals of half a mechanical period separated by `N_p` `[π]₀↔₁`
/// pulses.
pub fn append_displacement(seq: PulseSequence, n_p: usize, omega_m: f64) -> Result<PulseSequence> {
    let half = PI / omega_m;
    let mut seq = seq.segment(half)?;
    for _ in 0..n_p {
        seq = seq.rotate(Transition::Transmon01, PI, Axis::X).segment(half)?;
    }
    Ok(seq)
}

fn initial_state(layout: &ModeLayout, occupation: f64) -> Result<QState> {
    let m = layout.require(MECH)?;
    if occupation > 0.0 {
        let mech = thermal_state(layout.dim(m), occupation)?;
        let (s, _) = mech.embed(layout)?;
        Ok(s)
    } else {
        fock_state(layout, &vec![0; layout.num_modes()])
    }
}

fn run(seq: &PulseSequence, state: &QState, settings: &IntegratorSettings, lossless: bool) -> Result<(QState, Vec<String>)> {
    let mut s = *settings;
    s.record_every = None;
    if lossless && s.method == Method::AdaptiveEmbedded {
        s.method = Method::Exact;
    }
    let tr = seq.run(state, &s, &Observables::none())?;
    let w = tr.warnings.clone();
    Ok((tr.final_state.expect("evolve records the final state"), w))
}

/// Steps up to the conditional displacement: `[π/2]₀↔₁` on the ground state
/// followed by the pulse train. The result approximates
/// `(|0⟩|β⟩ + |1⟩|−β⟩)/√2` for odd `N_p`. Transmon and cavity rotate at
/// `ω_t`.
pub fn conditional_displacement(
    params: &SystemParams,
    n_p: usize,
    layout: &ModeLayout,
    config: &GhzConfig,
) -> Result<QState> {
    params.validate()?;
    layout.require(TRANSMON)?;
    let m = layout.require(MECH)?;
    let beta = ghz_beta(n_p, params.derive().g_t, params.omega_m);
    let need = coherent_safe_dim(C64::new(beta, 0.0));
    if layout.dim(m) < need {
        return Err(Error::Truncation(format!(
            "mech dim {} < {need} needed for β = {beta:.3}",
            layout.dim(m)
        )));
    }
    let open = PulseSequence::new(params, params.derive().omega_t)
        .rotate(Transition::Transmon01, PI / 2.0, Axis::Y);
    let seq = append_displacement(open, n_p, params.omega_m)?;
    let start = initial_state(layout, config.initial_occupation)?;
    Ok(run(&seq, &start, &config.settings, params.is_lossless())?.0)
}

/// Runs the full GHZ sequence at the operating point `params` and scores
/// the result.
pub fn prepare_ghz(params: &SystemParams, n_p: usize, config: &GhzConfig) -> Result<GhzResult> {
    params.validate()?;
    if n_p.is_multiple_of(2) {
        return Err(Error::Parameter(format!(
            "N_p = {n_p} is even; the symmetric cat needs an odd pulse count"
        )));
    }
    let d = params.derive();
    let beta = ghz_beta(n_p, d.g_t, params.omega_m);
    let need = coherent_safe_dim(C64::new(beta, 0.0));
    let mech_dim = config.mech_dim.unwrap_or(need);
    let mut warnings = regime_warnings(params, n_p);
    let lossless = params.is_lossless();

    let full = ModeLayout::standard(3, 2, mech_dim)?;
    let early = if config.include_cavity {
        full.clone()
    } else {
        ModeLayout::new(&[2, mech_dim], &[TRANSMON, MECH])?
    };
    let displaced = conditional_displacement(params, n_p, &early, config)?;

    // Close the interferometer, then move |1⟩ to |2⟩ and swap it into the
    // cavity at the 1↔2 resonance.
    let frame = d.omega_t;
    let swap = params.with_zeta(swap_zeta(params));
    let chi_swap = swap.derive().chi;
    let tau_swap = PI / (2.0 * 2f64.sqrt() * chi_swap);
    let close = PulseSequence::new(params, frame).rotate(Transition::Transmon01, -PI / 2.0, Axis::Y);
    let (closed, w) = run(&close, &displaced, &config.settings, lossless)?;
    warnings.extend(w);
    let (state, loss) = closed.embed(&full)?;
    if loss > 0.0 {
        return Err(Error::State(format!("embedding lost {loss:.3e} of the state")));
    }
    let tail = PulseSequence::new(params, frame)
        .rotate(Transition::Transmon12, PI, Axis::X)
        .retune(&swap)
        .segment(tau_swap)?;
    let (fin, w) = run(&tail, &state, &config.settings, lossless)?;
    warnings.extend(w);

    let t = full.require(TRANSMON)?;
    let p1_sim = fin.populations(t)?[1];
    let beta_eff = C64::from_polar(beta, -params.omega_m * tau_swap);
    let fidelity_cat_odd = match postselect(&fin, TRANSMON, 1) {
        Ok((cond, _)) => {
            let mech = cond.reduce_to(MECH)?;
            fidelity(&mech, &cat_state(mech_dim, beta_eff, Parity::Odd)?)?
        }
        Err(_) => 0.0,
    };
    let fidelity_ghz = ghz_fidelity_max_phase(&fin, beta_eff)?;
    Ok(GhzResult {
        n_p,
        beta,
        p1_sim,
        p1_theory: theory_p1(n_p, d.g_t, params.omega_m),
        fidelity_cat_odd,
        fidelity_ghz,
        theta: ghz_theta(n_p, params),
        mech_dim,
        warnings,
        final_state: Some(fin),
    })
}

/// GHZ fidelity maximized over the relative phase φ of the branches
/// `u = ½|0,0⟩(|β⟩+|−β⟩)` and `v = ½|1,1⟩(|β⟩−|−β⟩)`:
/// `max_φ ⟨u + e^{iφ}v|ρ|u + e^{iφ}v⟩ = ⟨u|ρ|u⟩ + ⟨v|ρ|v⟩ + 2|⟨u|ρ|v⟩|`.
pub fn ghz_fidelity_max_phase(state: &QState, beta: C64) -> Result<f64> {
    let l = state.layout();
    let (t, c, m) = (l.require(TRANSMON)?, l.require(CAVITY)?, l.require(MECH)?);
    let dm = l.dim(m);
    // cat_amplitudes returns |β⟩ ± |−β⟩ unnormalized.
    let even = cat_amplitudes(dm, beta, Parity::Even);
    let odd = cat_amplitudes(dm, beta, Parity::Odd);
    let n = l.total();
    let mut u = vec![C64::new(0.0, 0.0); n];
    let mut v = vec![C64::new(0.0, 0.0); n];
    for k in 0..dm {
        let mut occ = vec![0; l.num_modes()];
        occ[m] = k;
        u[l.flat_index(&occ)?] = 0.5 * even[k];
        occ[t] = 1;
        occ[c] = 1;
        v[l.flat_index(&occ)?] = 0.5 * odd[k];
    }
    let form = |x: &[C64], y: &[C64]| -> C64 {
        match state.data() {
            StateData::Vector(psi) => {
                let a: C64 = x.iter().zip(psi).map(|(p, q)| p.conj() * q).sum();
                let b: C64 = y.iter().zip(psi).map(|(p, q)| p.conj() * q).sum();
                a * b.conj()
            }
            StateData::Density(rho) => {
                let mut s = C64::new(0.0, 0.0);
                for i in (0..n).filter(|&i| x[i] != C64::new(0.0, 0.0)) {
                    for j in (0..n).filter(|&j| y[j] != C64::new(0.0, 0.0)) {
                        s += x[i].conj() * rho[(i, j)] * y[j];
                    }
                }
                s
            }
        }
    };
    let a = form(&u, &u).re;
    let b = form(&v, &v).re;
    let cc = form(&u, &v).norm();
    Ok((a + b + 2.0 * cc).clamp(0.0, 1.0))
}

/// GHZ runs for several pulse counts in parallel.
pub fn ghz_scan(params: &SystemParams, pulses: &[usize], config: &GhzConfig) -> Result<Vec<GhzResult>> {
    pulses.par_iter().map(|&n| prepare_ghz(params, n, config)).collect()
}
