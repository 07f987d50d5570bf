// Copyright 2026 The emech Authors
// SPDX-License-Identifier: Apache-2.0

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::SystemParams;

/// Relative mismatch of the polariton splitting to `Ω_m` above which the
/// fallback is refused.
pub const RESONANCE_MAX_MISMATCH: f64 = 0.02;

/// Operating point where the polariton splitting meets the mechanical
/// frequency.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Resonance {
    pub zeta: f64,
    /// `√(Δ² + 4χ²)` at `zeta`.
    pub splitting: f64,
    /// `(splitting − Ω_m)/Ω_m`; zero up to the solver tolerance when
    /// `exact`.
    pub mismatch: f64,
    /// False when the splitting never reaches `Ω_m` and `zeta` minimizes
    /// it instead.
    pub exact: bool,
}

fn splitting(params: &SystemParams, zeta: f64) -> f64 {
    let d = params.with_zeta(zeta).derive();
    (d.delta * d.delta + 4.0 * d.chi * d.chi).sqrt()
}

/// Solves `√(Δ² + 4χ²) = Ω_m` for ζ on the side `Δ ≥ 0` of the cavity
/// crossing by bisection. When the minimum splitting already exceeds `Ω_m`
/// the ζ of minimum splitting is returned with `exact = false`, provided
/// the mismatch stays below [`RESONANCE_MAX_MISMATCH`].
pub fn solve_resonance(params: &SystemParams) -> Result<Resonance> {
    params.validate()?;
    let target = params.omega_m;
    let f = |z: f64| splitting(params, z) - target;

    // The splitting is convex in ζ around the crossing; find its minimum by
    // golden section on a bracket wide enough to contain it.
    let zc = crate::model::zeta_for_transmon_frequency(params.e_c, params.omega_c);
    let (mut lo, mut hi) = ((zc * 0.5).max(1.0 + 1e-9), zc * 1.5);
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..200 {
        let a = hi - phi * (hi - lo);
        let b = lo + phi * (hi - lo);
        if f(a) < f(b) {
            hi = b;
        } else {
            lo = a;
        }
        if hi - lo < 1e-12 * zc {
            break;
        }
    }
    let z_min = 0.5 * (lo + hi);
    let f_min = f(z_min);
    if f_min > 0.0 {
        let mismatch = f_min / target;
        if mismatch > RESONANCE_MAX_MISMATCH {
            return Err(Error::Resonance(format!(
                "minimum polariton splitting exceeds Ω_m by {:.2}%",
                100.0 * mismatch
            )));
        }
        log::warn!(
            "polariton splitting never reaches Ω_m; using its minimum at ζ = {z_min:.6} ({:.3}% above)",
            100.0 * mismatch
        );
        return Ok(Resonance {
            zeta: z_min,
            splitting: splitting(params, z_min),
            mismatch,
            exact: false,
        });
    }

    let mut a = z_min;
    let mut b = z_min;
    let mut step = 1e-3 * zc;
    while f(b) < 0.0 {
        b += step;
        step *= 2.0;
        if b > 10.0 * zc {
            return Err(Error::Resonance("no upper bracket for ζ".into()));
        }
    }
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if f(m) < 0.0 {
            a = m;
        } else {
            b = m;
        }
        if b - a < 1e-14 * zc {
            break;
        }
    }
    let zeta = 0.5 * (a + b);
    let s = splitting(params, zeta);
    Ok(Resonance {
        zeta,
        splitting: s,
        mismatch: (s - target) / target,
        exact: true,
    })
}
