// Copyright 2026 The emech Authors
// SPDX-License-Identifier: Apache-2.0

use num_complex::Complex64 as C64;

use super::params::SystemParams;
use crate::error::{Error, Result};
use crate::hilbert::{ModeLayout, QOperator, CAVITY, MECH, TRANSMON};

/// Ladder operators of the modes present in a layout, located by label.
#[derive(Clone, Debug)]
pub struct ModeOps {
    pub layout: ModeLayout,
    pub a: Option<QOperator>,
    pub c: Option<QOperator>,
    pub b: Option<QOperator>,
}

impl ModeOps {
    pub fn new(layout: &ModeLayout) -> Result<Self> {
        let get = |label| {
            layout
                .index_of(label)
                .map(|m| QOperator::lowering(layout, m))
                .transpose()
        };
        Ok(Self {
            layout: layout.clone(),
            a: get(TRANSMON)?,
            c: get(CAVITY)?,
            b: get(MECH)?,
        })
    }

    pub fn transmon(&self) -> Result<&QOperator> {
        self.a
            .as_ref()
            .ok_or_else(|| Error::Layout("layout has no transmon mode".into()))
    }

    pub fn cavity(&self) -> Result<&QOperator> {
        self.c
            .as_ref()
            .ok_or_else(|| Error::Layout("layout has no cavity mode".into()))
    }

    pub fn mech(&self) -> Result<&QOperator> {
        self.b
            .as_ref()
            .ok_or_else(|| Error::Layout("layout has no mech mode".into()))
    }
}

/// Frame and optional terms of the system Hamiltonian.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HamiltonianOptions {
    /// Transmon and cavity are written in a frame rotating at this angular
    /// frequency; the mechanics always stays in the lab frame.
    pub frame: f64,
    /// Adds the electromechanical `g_c c†c (b + b†)` term.
    pub include_g_c: bool,
    /// Adds the static drive `E_L (c + c†)`; only meaningful when `frame`
    /// equals the drive frequency.
    pub include_drive: bool,
}

impl Default for HamiltonianOptions {
    fn default() -> Self {
        Self {
            frame: 0.0,
            include_g_c: false,
            include_drive: false,
        }
    }
}

/// System Hamiltonian on any layout holding a transmon plus an optional
/// cavity and mechanics; terms involving absent modes are dropped.
///
/// ```text
/// H = (ω_t − ω_f) a†a − λ a†²a² + Ω_m b†b + (ω_c − ω_f) c†c + iχ(a c† − a† c)
///   + [g_t a†a + i g_tc (a c† − a† c)] (b + b†)  [+ g_c c†c (b + b†)]  [+ E_L (c + c†)]
/// ```
pub fn hamiltonian(
    params: &SystemParams,
    layout: &ModeLayout,
    opts: &HamiltonianOptions,
) -> Result<QOperator> {
    let d = params.derive();
    let ops = ModeOps::new(layout)?;
    let a = ops.transmon()?;
    let ad = a.adjoint();
    let na = &ad * a;
    let mut h = (d.omega_t - opts.frame) * &na - d.lambda * (&(&ad * &ad) * &(a * a));

    let x = ops.b.as_ref().map(|b| b + &b.adjoint());
    if let (Some(b), Some(x)) = (&ops.b, &x) {
        h = h + params.omega_m * (&b.adjoint() * b) + d.g_t * (&na * x);
    }
    if let Some(c) = &ops.c {
        let cd = c.adjoint();
        let nc = &cd * c;
        // i(a c† − a† c)
        let hop = C64::new(0.0, 1.0) * (&(a * &cd) - &(&ad * c));
        h = h + (params.omega_c - opts.frame) * &nc + d.chi * &hop;
        if let Some(x) = &x {
            h = h + d.g_tc * (&hop * x);
            if opts.include_g_c {
                h = h + d.g_c * (&nc * x);
            }
        }
        if opts.include_drive {
            let drive = params.drive.ok_or_else(|| {
                Error::Parameter("drive term requested but no drive is configured".into())
            })?;
            h = h + drive.e_l * (c + &cd);
        }
    } else if opts.include_drive {
        return Err(Error::Layout("drive term needs a cavity mode".into()));
    }
    Ok(h)
}

/// Lab-frame Hamiltonian on the full (transmon, cavity, mech) layout.
pub fn hamiltonian_lab(params: &SystemParams, layout: &ModeLayout) -> Result<QOperator> {
    require_three(layout)?;
    hamiltonian(params, layout, &HamiltonianOptions::default())
}

/// Hamiltonian in the frame of the cavity drive, where the drive becomes
/// the static term `E_L (c + c†)`.
pub fn hamiltonian_rotating(params: &SystemParams, layout: &ModeLayout) -> Result<QOperator> {
    require_three(layout)?;
    let drive = params.drive.ok_or_else(|| {
        Error::Parameter("rotating-frame Hamiltonian needs a configured drive".into())
    })?;
    hamiltonian(
        params,
        layout,
        &HamiltonianOptions {
            frame: drive.omega_l,
            include_g_c: false,
            include_drive: true,
        },
    )
}

fn require_three(layout: &ModeLayout) -> Result<()> {
    for l in [TRANSMON, CAVITY, MECH] {
        layout.require(l)?;
    }
    if layout.num_modes() != 3 {
        return Err(Error::Layout(format!(
            "expected the three-mode layout, got {layout}"
        )));
    }
    Ok(())
}

/// Total transmon-plus-cavity excitation number `a†a + c†c`.
pub fn excitation_number(layout: &ModeLayout) -> Result<QOperator> {
    let t = layout.require(TRANSMON)?;
    let c = layout.index_of(CAVITY);
    Ok(QOperator::diagonal_fn(layout, |occ| {
        C64::new((occ[t] + c.map_or(0, |c| occ[c])) as f64, 0.0)
    }))
}
