// Copyright 2026 The emech Authors
// SPDX-License-Identifier: Apache-2.0

//! Open-system simulation of a transmon, a microwave cavity and a
//! nanomechanical resonator coupled through a three-body interaction.
//!
//! All frequencies and rates are angular (rad/s) unless a name says
//! otherwise. Mode order is always (transmon, cavity, mech).

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod hilbert;
pub mod model;
pub mod dynamics;
pub mod analysis;
pub mod protocols;

pub use error::{Error, Result};
pub use hilbert::{ModeLayout, QOperator, QState};
pub use num_complex::Complex64 as C64;
