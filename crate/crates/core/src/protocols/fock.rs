// Copyright 2026 The emech Authors
// SPDX-License-Identifier: Apache-2.0

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::cooling::{auto_drive_amplitude, displaced_drive_hamiltonian, optimal_detuning, DEFAULT_POLARITON_POPULATION};
use super::pulses::{Axis, PulseSequence, Transition};
use super::resonance::{solve_resonance, Resonance};
use crate::dynamics::{
    evolve, steady_state, CollapseSet, IntegratorSettings, Method, Observables, Schedule,
    Trajectory,
};
use crate::error::{Error, Result};
use crate::hilbert::{fock_state, ModeLayout, QOperator, QState, MECH};
use crate::model::{hamiltonian, polariton, Branch, HamiltonianOptions, Preset, SystemParams};

/// Extra mechanical levels kept above the target Fock number by default.
pub const FOCK_MECH_MARGIN: usize = 10;

/// Swap durations used in round `k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SwapTiming {
    /// `τ_k = π/(2√k |G|)`.
    SqrtN,
    /// `τ_1 = π/(2|G|)` in every round.
    Uniform,
}

/// Sideband-cooling stage run before the Fock rounds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoolingPrestage {
    /// Parameters at the cooling operating point.
    pub params: SystemParams,
    pub branch: Branch,
    /// Drive detuning from the branch; `None` searches
    /// `[-2, 0]·Ω_m` for the optimum.
    pub delta: Option<f64>,
    /// Drive amplitude; `None` uses the automatic choice.
    pub e_l: Option<f64>,
    pub dims: (usize, usize, usize),
}

impl CoolingPrestage {
    /// Cooling via the transmon-like polariton at `ζ_c + span`.
    pub fn for_preset(preset: &Preset) -> Self {
        Self {
            params: preset.params.with_zeta(preset.params.zeta + preset.zeta_span),
            branch: Branch::Plus,
            delta: None,
            e_l: None,
            dims: (2, 2, 30),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FockStart {
    /// All modes in their ground state.
    Ideal,
    /// Stationary mechanical state of a cooling run, with transmon and
    /// cavity reset to vacuum.
    Cooled(Box<CoolingPrestage>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FockConfig {
    pub n_target: usize,
    /// `(transmon, cavity, mech)`; mech defaults to `n_target + 10`.
    pub dims: Option<(usize, usize, usize)>,
    pub start: FockStart,
    pub timing: SwapTiming,
    pub settings: IntegratorSettings,
}

impl FockConfig {
    pub fn new(n_target: usize) -> Self {
        Self {
            n_target,
            dims: None,
            start: FockStart::Ideal,
            timing: SwapTiming::SqrtN,
            settings: IntegratorSettings::default(),
        }
    }

    pub fn layout(&self) -> Result<ModeLayout> {
        let (t, c, m) = self.dims.unwrap_or((2, 2, self.n_target + FOCK_MECH_MARGIN));
        ModeLayout::standard(t, c, m)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FockStage {
    pub stage: usize,
    /// Elapsed protocol time, seconds (pulses are instantaneous).
    pub time: f64,
    /// `⟨stage|ρ_m|stage⟩`.
    pub fidelity: f64,
    pub n_mech: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FockResult {
    pub resonance: Resonance,
    /// Magnitude of the three-body rate at the resonance.
    pub g_threebody: f64,
    pub swap_times: Vec<f64>,
    pub stages: Vec<FockStage>,
    /// Stationary phonon number of the cooling stage, if any.
    pub cooled_n: Option<f64>,
    #[serde(skip)]
    pub final_state: Option<QState>,
    /// Standard observables over the whole protocol, recorded when the
    /// integrator settings ask for a sampling interval.
    #[serde(skip)]
    pub trajectory: Option<Trajectory>,
    pub warnings: Vec<String>,
}

impl FockResult {
    pub fn fidelity(&self) -> f64 {
        self.stages.last().map_or(0.0, |s| s.fidelity)
    }

    /// Reduced state of the mechanics at the end.
    pub fn mech_state(&self) -> Result<QState> {
        self.final_state
            .as_ref()
            .ok_or_else(|| Error::State("no final state recorded".into()))?
            .reduce_to(MECH)
    }
}

/// Parameters at the polariton–mechanics resonance and the magnitude of the
/// three-body rate there.
pub fn fock_operating_point(params: &SystemParams) -> Result<(SystemParams, Resonance, f64)> {
    let res = solve_resonance(params)?;
    let p = params.with_zeta(res.zeta);
    let g = polariton(&p, 0.0)?.g_threebody.abs();
    if g == 0.0 {
        return Err(Error::Parameter("three-body rate vanishes at the resonance".into()));
    }
    Ok((p, res, g))
}

/// Rotating frame halfway between the polaritons.
fn fock_frame(params: &SystemParams) -> Result<f64> {
    let pp = polariton(params, 0.0)?;
    Ok(0.5 * (pp.omega_plus + pp.omega_minus))
}

fn regime_warnings(params: &SystemParams) -> Vec<String> {
    let d = params.derive();
    let loss = params.gamma_t.max(d.n_bar * d.gamma_m);
    let mut out = Vec::new();
    if !(10.0 * loss <= d.g_t) {
        out.push(format!(
            "Fock regime: max(γ_t, n̄Γ_m) = {loss:.3e} is not ≪ g_t = {:.3e}",
            d.g_t
        ));
    }
    if !(10.0 * d.g_t <= params.omega_m) {
        out.push(format!(
            "Fock regime: g_t = {:.3e} is not ≪ Ω_m = {:.3e}",
            d.g_t, params.omega_m
        ));
    }
    for w in &out {
        log::warn!("{w}");
    }
    out
}

/// Stationary mechanical state of the cooling stage and its phonon number.
pub fn cooled_mech_state(pre: &CoolingPrestage) -> Result<(QState, f64)> {
    let (t, c, m) = pre.dims;
    let layout = ModeLayout::standard(t, c, m)?;
    let e_l = match pre.e_l {
        Some(e) => e,
        None => auto_drive_amplitude(&pre.params, pre.branch, DEFAULT_POLARITON_POPULATION)?,
    };
    let delta = match pre.delta {
        Some(d) => d,
        None => optimal_detuning(&pre.params, pre.branch, e_l, &layout, (-2.0, 0.0, 41))?.0,
    };
    let omega_l = polariton(&pre.params, 0.0)?.omega(pre.branch) + delta;
    let (h, _) = displaced_drive_hamiltonian(&pre.params, &layout, omega_l, e_l)?;
    let rho = steady_state(&h, &CollapseSet::standard(&pre.params, &layout)?)?;
    let mech = rho.reduce_to(MECH)?;
    let n = mech.expectation(&QOperator::number(mech.layout(), 0)?)?.re;
    Ok((mech, n))
}

fn stage_record(state: &QState, stage: usize, time: f64) -> Result<FockStage> {
    let mech = state.reduce_to(MECH)?;
    let pops = mech.populations(0)?;
    let fidelity = pops.get(stage).copied().unwrap_or(0.0);
    let n_mech = pops.iter().enumerate().map(|(k, p)| k as f64 * p).sum();
    Ok(FockStage {
        stage,
        time,
        fidelity,
        n_mech,
    })
}

/// Prepares the mechanical Fock state `|n_target⟩` by repeated rounds of
/// `[π]₊ → swap → [π]₋` at the polariton–mechanics resonance, under the
/// full Hamiltonian and dissipation of `params`.
pub fn prepare_fock(params: &SystemParams, config: &FockConfig) -> Result<FockResult> {
    params.validate()?;
    let n = config.n_target;
    if n == 0 {
        return Err(Error::Parameter("n_target = 0: the ground state needs no preparation".into()));
    }
    let layout = config.layout()?;
    let m = layout.require(MECH)?;
    if layout.dim(m) <= n {
        return Err(Error::Truncation(format!(
            "mech dim {} cannot hold Fock state {n}",
            layout.dim(m)
        )));
    }
    let (p, res, g) = fock_operating_point(params)?;
    let mut warnings = regime_warnings(&p);
    if !res.exact {
        warnings.push(format!(
            "resonance not reached; operating {:.3}% off",
            100.0 * res.mismatch
        ));
    }
    let frame = fock_frame(&p)?;

    let (mut state, cooled_n) = match &config.start {
        FockStart::Ideal => (fock_state(&layout, &vec![0; layout.num_modes()])?, None),
        FockStart::Cooled(pre) => {
            let (mech, n_c) = cooled_mech_state(pre)?;
            let (s, loss) = mech.embed(&layout)?;
            if loss > crate::hilbert::TRUNCATION_WARN {
                warnings.push(format!("cooled state truncated, lost {loss:.3e}"));
            }
            (s, Some(n_c))
        }
    };

    let mut settings = config.settings;
    if p.is_lossless() && settings.method == Method::AdaptiveEmbedded {
        settings.method = Method::Exact;
    }
    let observables = if settings.record_every.is_some() {
        Observables::standard(&layout)?
    } else {
        Observables::none()
    };
    let mut trajectory: Option<Trajectory> = None;

    let mut stages = vec![stage_record(&state, 0, 0.0)?];
    let mut swap_times = Vec::with_capacity(n);
    let mut t = 0.0;
    for k in 1..=n {
        let tau = match config.timing {
            SwapTiming::SqrtN => PI / (2.0 * (k as f64).sqrt() * g),
            SwapTiming::Uniform => PI / (2.0 * g),
        };
        let seq = PulseSequence::new(&p, frame)
            .rotate(Transition::PolaritonPlus, PI, Axis::X)
            .segment(tau)?
            .rotate(Transition::PolaritonMinus, PI, Axis::X);
        let mut tr = seq.run(&state, &settings, &observables)?;
        warnings.extend(tr.warnings.iter().cloned());
        state = tr.final_state.take().expect("evolve records the final state");
        if settings.record_every.is_some() {
            append_trajectory(&mut trajectory, tr, t);
        }
        t += tau;
        swap_times.push(tau);
        let rec = stage_record(&state, k, t)?;
        stages.push(rec);
    }
    Ok(FockResult {
        resonance: res,
        g_threebody: g,
        swap_times,
        stages,
        cooled_n,
        final_state: Some(state),
        trajectory,
        warnings,
    })
}

/// Appends `next`, shifted by `offset` seconds, dropping its first sample
/// when it repeats the last recorded time.
fn append_trajectory(acc: &mut Option<Trajectory>, mut next: Trajectory, offset: f64) {
    next.times.iter_mut().for_each(|t| *t += offset);
    let Some(a) = acc else {
        *acc = Some(next);
        return;
    };
    let skip = match (a.times.last(), next.times.first()) {
        (Some(&x), Some(&y)) if y <= x => 1,
        _ => 0,
    };
    a.times.extend_from_slice(&next.times[skip.min(next.times.len())..]);
    for (name, vals) in next.observables {
        a.observables
            .entry(name)
            .or_default()
            .extend_from_slice(&vals[skip.min(vals.len())..]);
    }
    a.stats.accepted += next.stats.accepted;
    a.stats.rejected += next.stats.rejected;
    a.stats.rhs_evals += next.stats.rhs_evals;
}

/// Time of the first maximum of `⟨b†b⟩` when the lossless system starts in
/// `|1₊, 0₋⟩ ⊗ |k − 1⟩`, sampled at `samples` points over `[0, t_max]`.
/// `t_max` must cover the whole first transfer lobe.
pub fn swap_time_scan(
    params: &SystemParams,
    k: usize,
    layout: &ModeLayout,
    t_max: f64,
    samples: usize,
) -> Result<f64> {
    if k == 0 || samples < 3 || !(t_max > 0.0) {
        return Err(Error::Parameter("swap scan needs k ≥ 1, samples ≥ 3 and t_max > 0".into()));
    }
    let (p, _, _) = fock_operating_point(params)?;
    let p = p.lossless();
    let frame = fock_frame(&p)?;
    let m = layout.require(MECH)?;
    if layout.dim(m) <= k {
        return Err(Error::Truncation(format!("mech dim {} too small for k = {k}", layout.dim(m))));
    }
    let mut occ = vec![0; layout.num_modes()];
    occ[m] = k - 1;
    let start = fock_state(layout, &occ)?;
    let excite = PulseSequence::new(&p, frame)
        .rotate(Transition::PolaritonPlus, PI, Axis::X)
        .compile(layout)?;
    let s = evolve(&start, &excite, &IntegratorSettings::default(), &Observables::none())?
        .final_state
        .expect("final state");
    let h = hamiltonian(
        &p,
        layout,
        &HamiltonianOptions {
            frame,
            include_g_c: true,
            include_drive: false,
        },
    )?;
    let dt = t_max / (samples - 1) as f64;
    let sched = Schedule::new(layout).evolve("swap", h, CollapseSet::empty(layout), t_max)?;
    let settings = IntegratorSettings {
        method: Method::Exact,
        record_every: Some(dt),
        ..IntegratorSettings::default()
    };
    let obs = Observables::none().with("n_mech", QOperator::number(layout, m)?);
    let tr = evolve(&s, &sched, &settings, &obs)?;
    let nb = tr.get("n_mech").expect("registered");
    let half = (k - 1) as f64 + 0.5;
    // The first transfer lobe is symmetric about its maximum, so the peak
    // sits midway between the two crossings of the half-transfer level.
    // Both crossings are steep, unlike the flat top, where counter-rotating
    // ripple would bias a direct peak search.
    let cross = |from: usize, up: bool| -> Option<f64> {
        (from..nb.len() - 1).find_map(|i| {
            let (a, b) = (nb[i] - half, nb[i + 1] - half);
            let hit = if up { a < 0.0 && b >= 0.0 } else { a >= 0.0 && b < 0.0 };
            hit.then(|| tr.times[i] + dt * a / (a - b))
        })
    };
    let t_up = cross(0, true).ok_or_else(|| Error::Parameter("no swap within t_max".into()))?;
    let i_up = (t_up / dt).ceil() as usize;
    let t_down = cross(i_up, false)
        .ok_or_else(|| Error::Parameter("swap lobe does not close within t_max".into()))?;
    Ok(0.5 * (t_up + t_down))
}
