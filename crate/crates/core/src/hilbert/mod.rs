// Copyright 2026 The emech Authors
// SPDX-License-Identifier: Apache-2.0

//! Truncated multi-mode Fock-space algebra.

mod dense;
mod layout;
mod operator;
mod sparse;
mod state;

pub use dense::DenseMatrix;
pub use layout::{ModeLayout, CAVITY, MECH, TRANSMON};
pub use operator::{ladder, QOperator, Storage};
pub use sparse::CsrMatrix;
pub use state::{
    coherent_amplitudes, coherent_safe_dim, coherent_state, coherent_tail_mass,
    coherent_truncation_loss, fock_state, thermal_state, thermal_tail_mass,
    thermal_truncation_loss, QState, StateData, StateDump, StateKind, HERMITIAN_TOL, NORM_TOL,
    TRACE_TOL, TRUNCATION_WARN,
};
pub(crate) use state::{norm_sqr, trace_product};
