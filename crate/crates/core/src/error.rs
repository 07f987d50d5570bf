// Copyright 2026 The emech Authors
// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid mode layout: {0}")]
    Layout(String),

    #[error("layout mismatch: {0}")]
    LayoutMismatch(String),

    #[error("mode index {index} out of range for {modes} modes")]
    ModeIndex { index: usize, modes: usize },

    #[error("occupation {occupation} exceeds truncation {dim} of mode '{label}'")]
    Occupation {
        label: String,
        occupation: usize,
        dim: usize,
    },

    #[error("invalid state: {0}")]
    State(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("config error at '{field}': {message}")]
    Config { field: String, message: String },

    #[error("operator is not unitary (deviation {deviation:.3e})")]
    NotUnitary { deviation: f64 },

    #[error("degenerate polariton mixing: chi and Delta are both zero")]
    DegeneratePolariton,

    #[error("step size underflow at t = {t:.6e} s (step {step:.3e} s)")]
    StepUnderflow {
        t: f64,
        step: f64,
        last_good: Box<crate::hilbert::QState>,
    },

    #[error("trace drift {drift:.3e} exceeds guard {guard:.1e} at t = {t:.6e} s")]
    TraceDrift { t: f64, drift: f64, guard: f64 },

    #[error("density matrix lost positivity: min eigenvalue {min_eigenvalue:.3e} at t = {t:.6e} s")]
    Positivity { t: f64, min_eigenvalue: f64 },

    #[error("resonance solver failed: {0}")]
    Resonance(String),

    #[error("truncation too small: {0}")]
    Truncation(String),

    #[error("linear algebra failure: {0}")]
    LinAlg(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures of the numerics rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::StepUnderflow { .. }
                | Error::TraceDrift { .. }
                | Error::Positivity { .. }
                | Error::LinAlg(_)
                | Error::Resonance(_)
        )
    }
}
