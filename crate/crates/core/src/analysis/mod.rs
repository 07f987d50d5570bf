// Copyright 2026 The emech Authors
// SPDX-License-Identifier: Apache-2.0

//! State metrics, target states and Wigner functions.

mod metrics;
mod targets;
mod wigner;

pub use metrics::{fidelity, parity, parity_operator, populations, postselect, purity};
pub use targets::{cat_amplitudes, cat_state, ghz_target, Parity};
pub use wigner::{grid, wigner, wigner_point, WignerMap, WIGNER_CONVENTION};
