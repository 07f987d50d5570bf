// Copyright 2026 The emech Authors
// SPDX-License-Identifier: Apache-2.0

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{
    evolve_to_stationarity, steady_state, CollapseSet, IntegratorSettings, StationarityCriterion,
};
use crate::error::{Error, Result};
use crate::hilbert::{fock_state, thermal_state, ModeLayout, QOperator, QState, CAVITY, MECH, TRANSMON};
use crate::model::{hamiltonian, polariton, Branch, HamiltonianOptions, SystemParams};

/// Target steady population of the driven polariton used by the automatic
/// drive amplitude.
pub const DEFAULT_POLARITON_POPULATION: f64 = 0.1;

/// How the stationary phonon number is obtained at each detuning.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SteadyStateMethod {
    /// Null vector of the Liouvillian by sparse LU.
    Direct,
    /// Time evolution from the thermal start until the phonon number is
    /// stationary.
    Evolve {
        criterion: StationarityCriterion,
        settings: IntegratorSettings,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoolingConfig {
    /// Drive amplitude; `None` picks it from
    /// [`DEFAULT_POLARITON_POPULATION`].
    pub e_l: Option<f64>,
    pub method: SteadyStateMethod,
}

impl Default for CoolingConfig {
    fn default() -> Self {
        Self {
            e_l: None,
            method: SteadyStateMethod::Direct,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoolingSweepResult {
    pub polariton_branch: Branch,
    /// Frequency of the driven polariton.
    pub omega_branch: f64,
    /// Drive detunings `ω_L − ω_branch`.
    pub detunings: Vec<f64>,
    pub n_final: Vec<f64>,
    pub converged: Vec<bool>,
    pub e_l: f64,
    /// Thermal occupation of the mechanical bath.
    pub n_thermal: f64,
    pub omega_m: f64,
    pub zeta: f64,
}

impl CoolingSweepResult {
    pub fn len(&self) -> usize {
        self.detunings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.detunings.is_empty()
    }

    /// Index and value of the lowest phonon number.
    pub fn optimum(&self) -> Option<(usize, f64)> {
        self.n_final
            .iter()
            .copied()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(&b.1))
    }

    pub fn all_converged(&self) -> bool {
        self.converged.iter().all(|&c| c)
    }
}

/// Drive amplitude that puts roughly `population` excitations in the driven
/// polariton at the red sideband `δ = −Ω_m`, from the weak-drive steady
/// state `|α E_L|² (γ/Γ₁) / (δ² + γ²/4)`. Here `α` is the polariton's cavity
/// weight, `γ` its coherence decay rate (twice the linewidth) and `Γ₁` its
/// energy decay rate; the factor `γ/Γ₁` counts the population scattered
/// incoherently by dephasing.
pub fn auto_drive_amplitude(params: &SystemParams, branch: Branch, population: f64) -> Result<f64> {
    let pp = polariton(params, 0.0)?;
    let (wt, wc) = (pp.transmon_weight(branch), pp.cavity_weight(branch));
    if wc == 0.0 {
        return Err(Error::Parameter(format!("polariton {branch} has no cavity weight to drive")));
    }
    let gamma = wt * wt * (params.gamma_t + params.gamma_phi) + wc * wc * params.kappa_c;
    let gamma1 = wt * wt * params.gamma_t + wc * wc * params.kappa_c;
    // Without energy decay any drive saturates; fall back to the coherent part.
    let incoherent = if gamma1 > 0.0 { gamma / gamma1 } else { 1.0 };
    let om = params.omega_m;
    Ok((population * (om * om + 0.25 * gamma * gamma) / incoherent).sqrt() / wc)
}

/// Product of a thermal mechanical state with transmon and cavity vacuum.
pub fn thermal_start(layout: &ModeLayout, n_bar: f64) -> Result<QState> {
    let m = layout.require(MECH)?;
    let mech = thermal_state(layout.dim(m), n_bar)?;
    let rest: Vec<usize> = (0..layout.num_modes()).filter(|&k| k != m).collect();
    let vac = fock_state(&layout.subset(&rest)?, &vec![0; rest.len()])?.to_density();
    // Tensor in layout order; the mechanics is last in every standard layout.
    if m != layout.num_modes() - 1 {
        return Err(Error::Layout(format!("mech must be the last mode, got {layout}")));
    }
    vac.tensor(&mech)
}

/// Driven Hamiltonian in the frame rotating at `omega_l`, with the cavity
/// shifted by the stationary amplitude `c̄ = −E_L/(ω_c − ω_L − iκ/2)` of its
/// bare linear response. Substituting `c → c + c̄` cancels the drive,
/// leaves the cavity near vacuum and turns each coupling into a drive of
/// the transmon or the mechanics. Together with the unchanged cavity
/// dissipator this is exactly equivalent to `E_L(c + c†)` in the
/// undisplaced frame. Returns the Hamiltonian and `c̄`.
pub fn displaced_drive_hamiltonian(
    params: &SystemParams,
    layout: &ModeLayout,
    omega_l: f64,
    e_l: f64,
) -> Result<(QOperator, C64)> {
    let h0 = hamiltonian(
        params,
        layout,
        &HamiltonianOptions {
            frame: omega_l,
            include_g_c: true,
            include_drive: false,
        },
    )?;
    let cbar = -e_l / C64::new(params.omega_c - omega_l, -0.5 * params.kappa_c);
    if cbar == C64::new(0.0, 0.0) {
        return Ok((h0, cbar));
    }
    let d = params.derive();
    let a = QOperator::lowering(layout, layout.require(TRANSMON)?)?;
    let c = QOperator::lowering(layout, layout.require(CAVITY)?)?;
    let b = QOperator::lowering(layout, layout.require(MECH)?)?;
    let x = &b + &b.adjoint();
    let i = C64::new(0.0, 1.0);
    // i(a c̄* − a† c̄)
    let hop = (i * cbar.conj()) * &a + (-i * cbar) * &a.adjoint();
    // c̄* c + c̄ c† + |c̄|²
    let nc = cbar.conj() * &c + cbar * &c.adjoint() + QOperator::identity(layout).scale_re(cbar.norm_sqr());
    let h = h0 + d.chi * &hop + d.g_tc * &(&hop * &x) + d.g_c * &(&nc * &x);
    Ok((h, cbar))
}

/// Stationary phonon number for a drive at `ω_branch + delta`.
pub fn cooling_point(
    params: &SystemParams,
    branch: Branch,
    delta: f64,
    e_l: f64,
    layout: &ModeLayout,
    method: &SteadyStateMethod,
) -> Result<(f64, bool)> {
    for l in [TRANSMON, CAVITY, MECH] {
        layout.require(l)?;
    }
    let pp = polariton(params, 0.0)?;
    let omega_l = pp.omega(branch) + delta;
    let (h, _) = displaced_drive_hamiltonian(params, layout, omega_l, e_l)?;
    let cs = CollapseSet::standard(params, layout)?;
    let n_b = QOperator::number(layout, layout.require(MECH)?)?;
    match method {
        SteadyStateMethod::Direct => {
            let rho = steady_state(&h, &cs)?;
            Ok((rho.expectation(&n_b)?.re, true))
        }
        SteadyStateMethod::Evolve { criterion, settings } => {
            let start = thermal_start(layout, params.derive().n_bar)?;
            let st = evolve_to_stationarity(&start, &h, &cs, &n_b, criterion, settings)?;
            Ok((st.value, st.converged))
        }
    }
}

/// Stationary phonon number versus drive detuning from the chosen
/// polariton, evaluated in parallel over the grid. `params.zeta` is the
/// operating point.
pub fn cooling_sweep(
    params: &SystemParams,
    branch: Branch,
    detunings: &[f64],
    layout: &ModeLayout,
    config: &CoolingConfig,
) -> Result<CoolingSweepResult> {
    params.validate()?;
    if detunings.is_empty() {
        return Err(Error::Parameter("empty detuning grid".into()));
    }
    let om = params.omega_m;
    if let Some(d) = detunings.iter().find(|&&d| !(d.is_finite() && (d + om).abs() <= 2.0 * om * (1.0 + 1e-12))) {
        return Err(Error::Parameter(format!(
            "detuning {:.4} Ω_m lies outside ±2 Ω_m of the red sideband",
            d / om
        )));
    }
    let e_l = match config.e_l {
        Some(e) if e.is_finite() && e >= 0.0 => e,
        Some(e) => return Err(Error::Parameter(format!("E_L = {e} must be ≥ 0"))),
        None => auto_drive_amplitude(params, branch, DEFAULT_POLARITON_POPULATION)?,
    };
    let points: Vec<(f64, bool)> = detunings
        .par_iter()
        .map(|&d| cooling_point(params, branch, d, e_l, layout, &config.method))
        .collect::<Result<_>>()?;
    let pp = polariton(params, 0.0)?;
    let d = params.derive();
    Ok(CoolingSweepResult {
        polariton_branch: branch,
        omega_branch: pp.omega(branch),
        detunings: detunings.to_vec(),
        n_final: points.iter().map(|p| p.0.max(0.0)).collect(),
        converged: points.iter().map(|p| p.1).collect(),
        e_l,
        n_thermal: d.n_bar,
        omega_m: om,
        zeta: params.zeta,
    })
}

/// Counts local minima whose lower flanking peak exceeds the minimum by at
/// least `prominence` times that peak. A flanking peak is the highest value
/// reached on one side before the curve drops below the minimum.
pub fn count_local_minima(values: &[f64], prominence: f64) -> usize {
    let n = values.len();
    if n < 3 {
        return 0;
    }
    (1..n - 1)
        .filter(|&i| values[i] < values[i - 1] && values[i] <= values[i + 1])
        .filter(|&i| {
            let peak = climb(values, i, -1).min(climb(values, i, 1));
            peak - values[i] >= prominence * peak.abs()
        })
        .count()
}

/// Highest value on the way from `i` in direction `dir` before the curve
/// drops below `values[i]`.
fn climb(values: &[f64], i: usize, dir: isize) -> f64 {
    let mut best = values[i];
    let mut k = i as isize + dir;
    while k >= 0 && (k as usize) < values.len() {
        let v = values[k as usize];
        if v < values[i] {
            break;
        }
        best = best.max(v);
        k += dir;
    }
    best
}

/// Uniform grid of `n` detunings `δ/Ω_m ∈ [lo, hi]`, returned in rad/s.
pub fn detuning_grid(omega_m: f64, lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if n == 0 || !(lo.is_finite() && hi.is_finite()) || hi < lo {
        return Err(Error::Parameter(format!("bad sweep {lo}:{hi}:{n}")));
    }
    if n == 1 {
        return Ok(vec![0.5 * (lo + hi) * omega_m]);
    }
    Ok((0..n)
        .map(|k| (lo + (hi - lo) * k as f64 / (n - 1) as f64) * omega_m)
        .collect())
}

/// Detuning of lowest stationary phonon number within `[lo, hi]·Ω_m`: the
/// best of `n` grid points, refined by golden section between its
/// neighbours.
pub fn optimal_detuning(
    params: &SystemParams,
    branch: Branch,
    e_l: f64,
    layout: &ModeLayout,
    (lo, hi, n): (f64, f64, usize),
) -> Result<(f64, f64)> {
    if n < 3 {
        return Err(Error::Parameter("optimal detuning needs at least 3 grid points".into()));
    }
    let grid = detuning_grid(params.omega_m, lo, hi, n)?;
    let eval = |d: f64| cooling_point(params, branch, d, e_l, layout, &SteadyStateMethod::Direct).map(|r| r.0);
    let vals: Vec<f64> = grid.par_iter().map(|&d| eval(d)).collect::<Result<_>>()?;
    let k = vals
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(k, _)| k)
        .expect("non-empty grid");
    let (mut a, mut b) = (grid[k.saturating_sub(1)], grid[(k + 1).min(n - 1)]);
    let (mut best_d, mut best_v) = (grid[k], vals[k]);
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - phi * (b - a);
    let mut x2 = a + phi * (b - a);
    let (mut f1, mut f2) = (eval(x1)?, eval(x2)?);
    for _ in 0..12 {
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = eval(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = eval(x2)?;
        }
    }
    for (d, v) in [(x1, f1), (x2, f2)] {
        if v < best_v {
            best_d = d;
            best_v = v;
        }
    }
    Ok((best_d, best_v))
}
