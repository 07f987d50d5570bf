// Copyright 2026 The emech Authors
// SPDX-License-Identifier: Apache-2.0

//! Transmon–cavity polaritons.
//!
//! With `p₊ = α₊ a − i α₋ c` and `p₋ = α₋ a + i α₊ c` the quadratic
//! transmon–cavity block is diagonal. The inverse map is
//! `a = α₊ p₊ + α₋ p₋`, `c = i α₋ p₊ − i α₊ p₋`.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::params::{DerivedParams, SystemParams};
use crate::error::{Error, Result};
use crate::hilbert::{DenseMatrix, ModeLayout, QOperator, CAVITY, MECH, TRANSMON};

pub const P_PLUS: &str = "p_plus";
pub const P_MINUS: &str = "p_minus";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }
}

impl std::fmt::Display for Branch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Branch::Plus => "plus",
            Branch::Minus => "minus",
        })
    }
}

impl std::str::FromStr for Branch {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plus" | "+" | "p" => Ok(Branch::Plus),
            "minus" | "-" | "m" => Ok(Branch::Minus),
            _ => Err(Error::Parameter(format!("unknown polariton branch '{s}'"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolaritonParams {
    pub alpha_plus: f64,
    pub alpha_minus: f64,
    pub omega_plus: f64,
    pub omega_minus: f64,
    pub g_plus: f64,
    pub g_minus: f64,
    /// Three-body coupling of `(p₊†p₋ + p₊p₋†)(b + b†)`.
    pub g_threebody: f64,
    pub lambda_plus: f64,
    pub lambda_minus: f64,
    /// Intensity–intensity interaction strength.
    pub lambda0: f64,
    pub delta_plus: f64,
    pub delta_minus: f64,
    /// Duffing coefficient λ of the bare transmon.
    pub lambda: f64,
}

impl PolaritonParams {
    /// Mixing and coupling coefficients for the derived couplings `d`;
    /// `include_g_c` selects whether the electromechanical rate enters
    /// `g±` and `G`.
    pub fn from_derived(d: &DerivedParams, omega_l: f64, include_g_c: bool) -> Result<Self> {
        let (delta, chi) = (d.delta, d.chi);
        if delta == 0.0 && chi == 0.0 {
            return Err(Error::DegeneratePolariton);
        }
        let root = (delta * delta + 4.0 * chi * chi).sqrt();
        let ap = (0.5 * (1.0 + delta / root)).sqrt();
        let am = (0.5 * (1.0 - delta / root)).sqrt();
        let omega_c = d.omega_t - delta;
        let g_c = if include_g_c { d.g_c } else { 0.0 };
        let omega_plus = ap * ap * d.omega_t + am * am * omega_c + 2.0 * ap * am * chi;
        let omega_minus = am * am * d.omega_t + ap * ap * omega_c - 2.0 * ap * am * chi;
        Ok(Self {
            alpha_plus: ap,
            alpha_minus: am,
            omega_plus,
            omega_minus,
            g_plus: ap * ap * d.g_t + am * am * g_c + 2.0 * ap * am * d.g_tc,
            g_minus: am * am * d.g_t + ap * ap * g_c - 2.0 * ap * am * d.g_tc,
            g_threebody: ap * am * (d.g_t - g_c) + (am * am - ap * ap) * d.g_tc,
            lambda_plus: ap.powi(4) * d.lambda,
            lambda_minus: am.powi(4) * d.lambda,
            lambda0: 4.0 * d.lambda * ap * ap * am * am,
            delta_plus: omega_l - omega_plus,
            delta_minus: omega_l - omega_minus,
            lambda: d.lambda,
        })
    }

    /// Splitting `ω₊ − ω₋ = √(Δ² + 4χ²)`.
    pub fn splitting(&self) -> f64 {
        self.omega_plus - self.omega_minus
    }

    pub fn omega(&self, branch: Branch) -> f64 {
        match branch {
            Branch::Plus => self.omega_plus,
            Branch::Minus => self.omega_minus,
        }
    }

    /// Weight of the bare transmon in the given polariton.
    pub fn transmon_weight(&self, branch: Branch) -> f64 {
        match branch {
            Branch::Plus => self.alpha_plus,
            Branch::Minus => self.alpha_minus,
        }
    }

    /// Weight of the cavity photon in the given polariton.
    pub fn cavity_weight(&self, branch: Branch) -> f64 {
        match branch {
            Branch::Plus => self.alpha_minus,
            Branch::Minus => self.alpha_plus,
        }
    }
}

/// Polariton parameters of a system, including the electromechanical rate.
pub fn polariton(params: &SystemParams, omega_l: f64) -> Result<PolaritonParams> {
    PolaritonParams::from_derived(&params.derive(), omega_l, true)
}

/// Layout `(p_plus, p_minus, mech)`.
pub fn polariton_layout(n_polariton: usize, n_mech: usize) -> Result<ModeLayout> {
    ModeLayout::new(&[n_polariton, n_polariton, n_mech], &[P_PLUS, P_MINUS, MECH])
}

/// Inter-polariton interactions: the normal-ordered Duffing term
/// `−λ (A†)² A²` with `A = α₊p₊ + α₋p₋`, written as its seven term families
/// (self-Kerr of each polariton included).
pub fn interpolariton_hamiltonian(pp: &PolaritonParams, layout: &ModeLayout) -> Result<QOperator> {
    let p = QOperator::lowering(layout, layout.require(P_PLUS)?)?;
    let m = QOperator::lowering(layout, layout.require(P_MINUS)?)?;
    let pd = p.adjoint();
    let md = m.adjoint();
    let (ap, am) = (pp.alpha_plus, pp.alpha_minus);
    let k = -pp.lambda;

    let pd2 = &pd * &pd;
    let md2 = &md * &md;
    let p2 = &p * &p;
    let m2 = &m * &m;
    let pm = &p * &m;
    let pdmd = &pd * &md;

    let self_plus = &pd2 * &p2;
    let self_minus = &md2 * &m2;
    let cross = &pdmd * &pm;
    let pair = &(&pd2 * &m2) + &(&md2 * &p2);
    let mixed_plus = &(&pd2 * &pm) + &(&pdmd * &p2);
    let mixed_minus = &(&md2 * &pm) + &(&pdmd * &m2);

    Ok(k * ap.powi(4) * &self_plus
        + k * am.powi(4) * &self_minus
        + k * 4.0 * ap * ap * am * am * &cross
        + k * ap * ap * am * am * &pair
        + k * 2.0 * ap.powi(3) * am * &mixed_plus
        + k * 2.0 * ap * am.powi(3) * &mixed_minus)
}

/// Full polariton-basis Hamiltonian on a `(p_plus, p_minus[, mech])`
/// layout, with the transmon–cavity pair in a frame rotating at `frame`:
///
/// ```text
/// H = Σ± (ω± − ω_f) p±†p± + H₊₋ + Ω_m b†b
///   + [g₊ p₊†p₊ + g₋ p₋†p₋ + G (p₊†p₋ + p₊p₋†)] (b + b†)
/// ```
pub fn polariton_hamiltonian(
    pp: &PolaritonParams,
    omega_m: f64,
    layout: &ModeLayout,
    frame: f64,
) -> Result<QOperator> {
    let p = QOperator::lowering(layout, layout.require(P_PLUS)?)?;
    let m = QOperator::lowering(layout, layout.require(P_MINUS)?)?;
    let np = &p.adjoint() * &p;
    let nm = &m.adjoint() * &m;
    let mut h = (pp.omega_plus - frame) * &np
        + (pp.omega_minus - frame) * &nm
        + interpolariton_hamiltonian(pp, layout)?;
    if let Some(bi) = layout.index_of(MECH) {
        let b = QOperator::lowering(layout, bi)?;
        let x = &b + &b.adjoint();
        let hop = &(&p.adjoint() * &m) + &(&m.adjoint() * &p);
        let coupling = pp.g_plus * &np + pp.g_minus * &nm + pp.g_threebody * &hop;
        h = h + omega_m * (&b.adjoint() * &b) + &coupling * &x;
    }
    Ok(h)
}

/// Isometry from the polariton Fock basis into the bare (transmon, cavity)
/// Fock basis of `lab`, for polariton states with at most `max_excitations`
/// quanta. Columns follow the row-major order of a `(p_plus, p_minus)`
/// layout of side `max_excitations + 1`; columns above the cutoff are zero.
pub fn polariton_basis_map(
    pp: &PolaritonParams,
    lab: &ModeLayout,
    max_excitations: usize,
) -> Result<DenseMatrix> {
    let t = lab.require(TRANSMON)?;
    let c = lab.require(CAVITY)?;
    if lab.num_modes() != 2 || lab.dim(t) <= max_excitations || lab.dim(c) <= max_excitations {
        return Err(Error::Layout(format!(
            "basis map needs a (transmon, cavity) layout with dims > {max_excitations}, got {lab}"
        )));
    }
    let a = QOperator::lowering(lab, t)?;
    let cc = QOperator::lowering(lab, c)?;
    let i = C64::new(0.0, 1.0);
    // p₊† = α₊ a† + i α₋ c†, p₋† = α₋ a† − i α₊ c†
    let pd = pp.alpha_plus * &a.adjoint() + (i * pp.alpha_minus) * &cc.adjoint();
    let md = pp.alpha_minus * &a.adjoint() + (-i * pp.alpha_plus) * &cc.adjoint();
    let side = max_excitations + 1;
    let n = lab.total();
    let mut out = DenseMatrix::zeros(n, side * side);
    let mut vac = vec![C64::new(0.0, 0.0); n];
    vac[0] = C64::new(1.0, 0.0);
    for np in 0..side {
        for nm in 0..side - np {
            let mut v = vac.clone();
            for _ in 0..np {
                v = pd.apply(&v);
            }
            for _ in 0..nm {
                v = md.apply(&v);
            }
            let norm = (factorial(np) * factorial(nm)).sqrt();
            for (r, x) in v.iter().enumerate() {
                out[(r, np * side + nm)] = x / norm;
            }
        }
    }
    Ok(out)
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}
