// Copyright 2026 The emech Authors
// SPDX-License-Identifier: Apache-2.0

//! Parameters, derived coefficients, Hamiltonians and the polariton
//! transformation.

mod config;
mod hamiltonian;
mod params;
mod polariton;

pub use config::{load_config, parse_config};
pub use hamiltonian::{
    excitation_number, hamiltonian, hamiltonian_lab, hamiltonian_rotating, HamiltonianOptions,
    ModeOps,
};
pub use params::{
    bose_occupation, mech_period, preset, preset_names, temperature_for_occupation, to_hz,
    transmon_frequency, zeta_for_transmon_frequency, DerivedParams, Drive, Preset, SystemParams,
    HBAR, K_B,
};
pub use polariton::{
    interpolariton_hamiltonian, polariton, polariton_basis_map, polariton_hamiltonian,
    polariton_layout, Branch, PolaritonParams, P_MINUS, P_PLUS,
};
