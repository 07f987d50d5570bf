// Copyright 2026 The emech Authors
// SPDX-License-Identifier: Apache-2.0

//! Fixtures shared by the benchmarks.

use emech::dynamics::CollapseSet;
use emech::hilbert::{ModeLayout, QOperator};
use emech::model::{polariton, preset, Branch, SystemParams};
use emech::protocols::{auto_drive_amplitude, displaced_drive_hamiltonian, DEFAULT_POLARITON_POPULATION};

/// Driven, lossy set1 system at the cooling operating point with a red
/// sideband drive, truncated to `(2, 2, mech)`.
pub fn cooling_system(mech: usize) -> (SystemParams, ModeLayout, QOperator, CollapseSet) {
    let pre = preset("set1").expect("built-in preset");
    let p = pre.params.with_zeta(pre.params.zeta + pre.zeta_span).with_bath_occupation(5.0);
    let layout = ModeLayout::standard(2, 2, mech).expect("valid dims");
    let e_l = auto_drive_amplitude(&p, Branch::Plus, DEFAULT_POLARITON_POPULATION).expect("drive");
    let omega_l = polariton(&p, 0.0).expect("polariton").omega_plus - p.omega_m;
    let (h, _) = displaced_drive_hamiltonian(&p, &layout, omega_l, e_l).expect("hamiltonian");
    let cs = CollapseSet::standard(&p, &layout).expect("collapses");
    (p, layout, h, cs)
}
