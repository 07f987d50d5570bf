// Copyright 2026 The emech Authors
// SPDX-License-Identifier: Apache-2.0

//! Cooling sweeps, Fock-state preparation and GHZ/cat preparation built
//! from idealized pulses and master-equation segments.

mod cooling;
mod fock;
mod ghz;
mod pulses;
mod resonance;

pub use cooling::{
    auto_drive_amplitude, cooling_point, displaced_drive_hamiltonian, optimal_detuning, cooling_sweep, count_local_minima, detuning_grid,
    thermal_start, CoolingConfig, CoolingSweepResult, SteadyStateMethod,
    DEFAULT_POLARITON_POPULATION,
};
pub use pulses::{
    embed_on_modes, polariton_vectors, pulse_unitary, rotation_matrix, Axis, Event, EventKind,
    PulseSequence, Transition,
};
pub use resonance::{solve_resonance, Resonance, RESONANCE_MAX_MISMATCH};
pub use fock::{
    cooled_mech_state, fock_operating_point, prepare_fock, swap_time_scan, CoolingPrestage,
    FockConfig, FockResult, FockStage, FockStart, SwapTiming, FOCK_MECH_MARGIN,
};
pub use ghz::{
    append_displacement, conditional_displacement, ghz_beta, ghz_fidelity_max_phase, ghz_scan,
    ghz_theta, prepare_ghz, swap_zeta, theory_p1, GhzConfig, GhzResult,
};
