// Copyright 2026 The emech Authors
// SPDX-License-Identifier: Apache-2.0

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{
    coherent_amplitudes, coherent_safe_dim, ModeLayout, QState, CAVITY, MECH, NORM_TOL, TRANSMON,
    TRUNCATION_WARN,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    fn keeps(self, n: usize) -> bool {
        match self {
            Parity::Even => n.is_multiple_of(2),
            Parity::Odd => n % 2 == 1,
        }
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        })
    }
}

impl FromStr for Parity {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "even" => Ok(Parity::Even),
            "odd" => Ok(Parity::Odd),
            _ => Err(Error::Parameter(format!("parity must be 'even' or 'odd', got '{s}'"))),
        }
    }
}

/// Unnormalized `|β⟩ ± |−β⟩` in `dim` levels. Amplitudes of the wrong
/// parity are exactly zero.
pub fn cat_amplitudes(dim: usize, beta: C64, parity: Parity) -> Vec<C64> {
    coherent_amplitudes(dim, beta)
        .into_iter()
        .enumerate()
        .map(|(n, a)| if parity.keeps(n) { 2.0 * a } else { C64::new(0.0, 0.0) })
        .collect()
}

fn warn_truncation(dim: usize, beta: C64) {
    if dim < coherent_safe_dim(beta) {
        log::warn!(
            "cat amplitude |β| = {:.3} in dim {dim} is below the safe truncation {}",
            beta.norm(),
            coherent_safe_dim(beta)
        );
    }
}

/// Normalized cat state `𝒩±(|β⟩ ± |−β⟩)` on a single mode labelled `mech`.
pub fn cat_state(dim: usize, beta: C64, parity: Parity) -> Result<QState> {
    if !(beta.re.is_finite() && beta.im.is_finite()) {
        return Err(Error::Parameter(format!("cat amplitude {beta} is not finite")));
    }
    warn_truncation(dim, beta);
    let amps = cat_amplitudes(dim, beta, parity);
    let norm2: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
    // Compare with the untruncated norm 2 ± 2e^{−2|β|²}.
    let sign = if parity == Parity::Even { 1.0 } else { -1.0 };
    let exact = 2.0 + sign * 2.0 * (-2.0 * beta.norm_sqr()).exp();
    if exact <= 1e-300 || norm2 == 0.0 {
        return Err(Error::State(format!("{parity} cat at β = {beta} has zero norm")));
    }
    let loss = 1.0 - norm2 / exact;
    if loss > TRUNCATION_WARN {
        log::warn!("cat state truncation loses {loss:.3e} of probability");
    }
    QState::normalized(ModeLayout::single(dim, MECH)?, amps)
}

/// `½(|0⟩_t|0⟩_c(|β⟩+|−β⟩) + |1⟩_t|1⟩_c(|β⟩−|−β⟩))`, with any further
/// modes in vacuum. The prefactor normalizes the untruncated state exactly;
/// truncation loss is renormalized away with a warning.
pub fn ghz_target(beta: C64, layout: &ModeLayout) -> Result<QState> {
    if beta == C64::new(0.0, 0.0) {
        return Err(Error::State("GHZ target needs β ≠ 0 (odd branch vanishes)".into()));
    }
    let t = layout.require(TRANSMON)?;
    let c = layout.require(CAVITY)?;
    let m = layout.require(MECH)?;
    let dim = layout.dim(m);
    warn_truncation(dim, beta);
    let mut psi = vec![C64::new(0.0, 0.0); layout.total()];
    let mut occ = vec![0usize; layout.num_modes()];
    for (branch, parity) in [(0usize, Parity::Even), (1, Parity::Odd)] {
        let amps = cat_amplitudes(dim, beta, parity);
        occ[t] = branch;
        occ[c] = branch;
        for (n, a) in amps.into_iter().enumerate() {
            occ[m] = n;
            psi[layout.flat_index(&occ)?] = 0.5 * a;
        }
    }
    let norm2: f64 = psi.iter().map(|a| a.norm_sqr()).sum();
    if norm2 == 0.0 || !norm2.is_finite() {
        return Err(Error::State("GHZ target has zero norm".into()));
    }
    if (norm2 - 1.0).abs() > NORM_TOL {
        log::warn!("GHZ target truncation: norm² = {norm2:.12}, renormalizing");
    }
    QState::normalized(layout.clone(), psi)
}
