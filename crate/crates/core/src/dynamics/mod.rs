// Copyright 2026 The emech Authors
// SPDX-License-Identifier: Apache-2.0

//! Master-equation and Schrödinger time evolution.

mod evolve;
mod integrator;
mod lindblad;

pub use evolve::{
    apply_unitary, evolve, evolve_exact, evolve_to_stationarity, steady_state, Observables,
    Schedule, Segment, Stationary, StationarityCriterion, Step, Trajectory, POSITIVITY_PROJECT,
    UNITARITY_TOL,
};
pub use integrator::{
    integrate, Halt, IntegratorSettings, IntegratorStats, Method, OdeSystem, Stepper,
};
pub use lindblad::{lindblad_rhs, Collapse, CollapseSet, LindbladGenerator};
