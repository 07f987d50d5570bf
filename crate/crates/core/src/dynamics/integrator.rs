// Copyright 2026 The emech Authors
// SPDX-License-Identifier: Apache-2.0

//! Explicit Runge–Kutta integrators for complex linear systems.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Dormand–Prince 5(4) with embedded error control.
    AdaptiveEmbedded,
    /// Classical RK4 with a fixed step.
    FixedRk4,
    /// Eigendecomposition of each segment Hamiltonian; closed systems only.
    Exact,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegratorSettings {
    pub method: Method,
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Seconds. Also the step of [`Method::FixedRk4`].
    pub max_step: f64,
    /// Seconds.
    pub min_step: f64,
    /// Sampling interval for recorded observables, seconds. `None` records
    /// only at schedule boundaries.
    pub record_every: Option<f64>,
    /// Largest tolerated `|Tr ρ − 1|` (or `|‖ψ‖² − 1|`).
    pub trace_guard: f64,
    /// Check the smallest eigenvalue of ρ at every recorded sample.
    pub check_positivity: bool,
}

impl Default for IntegratorSettings {
    fn default() -> Self {
        Self {
            method: Method::AdaptiveEmbedded,
            rel_tol: 1e-8,
            abs_tol: 1e-10,
            max_step: f64::INFINITY,
            min_step: 1e-22,
            record_every: None,
            trace_guard: 1e-6,
            check_positivity: true,
        }
    }
}

impl IntegratorSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return Err(Error::Parameter("integrator tolerances must be > 0".into()));
        }
        if !(self.min_step > 0.0 && self.min_step < self.max_step) {
            return Err(Error::Parameter(format!(
                "need 0 < min_step < max_step, got {} and {}",
                self.min_step, self.max_step
            )));
        }
        if self.method == Method::FixedRk4 && !self.max_step.is_finite() {
            return Err(Error::Parameter("fixed-step RK4 needs a finite max_step".into()));
        }
        if let Some(r) = self.record_every {
            if !(r > 0.0) {
                return Err(Error::Parameter("record_every must be > 0".into()));
            }
        }
        Ok(())
    }

    pub fn rk4(step: f64) -> Self {
        Self {
            method: Method::FixedRk4,
            max_step: step,
            min_step: step * 1e-6,
            ..Self::default()
        }
    }
}

/// Right-hand side `dy/dt = f(y)` of an autonomous system.
pub trait OdeSystem {
    fn rhs(&mut self, y: &[C64], dy: &mut [C64]);
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct IntegratorStats {
    pub accepted: u64,
    pub rejected: u64,
    pub rhs_evals: u64,
}

/// Step-size memory carried across calls so successive segments reuse the
/// controller state.
#[derive(Clone, Debug, Default)]
pub struct Stepper {
    h: Option<f64>,
    err_old: f64,
    fsal: Option<Vec<C64>>,
    pub stats: IntegratorStats,
}

impl Stepper {
    pub fn new() -> Self {
        Self {
            h: None,
            err_old: 1e-4,
            fsal: None,
            stats: IntegratorStats::default(),
        }
    }

    /// Forgets derivative caches after the state was changed externally or
    /// the right-hand side was swapped.
    pub fn reset(&mut self) {
        self.fsal = None;
    }
}

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn zeros(n: usize) -> Vec<C64> {
    vec![C64::new(0.0, 0.0); n]
}

/// RMS of the componentwise scaled error over real and imaginary parts.
fn error_norm(err: &[C64], y0: &[C64], y1: &[C64], s: &IntegratorSettings) -> f64 {
    let mut acc = 0.0;
    for ((e, a), b) in err.iter().zip(y0).zip(y1) {
        let sr = s.abs_tol + s.rel_tol * a.re.abs().max(b.re.abs());
        let si = s.abs_tol + s.rel_tol * a.im.abs().max(b.im.abs());
        acc += (e.re / sr).powi(2) + (e.im / si).powi(2);
    }
    (acc / (2 * err.len()).max(1) as f64).sqrt()
}

fn scaled_norm(v: &[C64], y: &[C64], s: &IntegratorSettings) -> f64 {
    let mut acc = 0.0;
    for (x, a) in v.iter().zip(y) {
        let sr = s.abs_tol + s.rel_tol * a.re.abs();
        let si = s.abs_tol + s.rel_tol * a.im.abs();
        acc += (x.re / sr).powi(2) + (x.im / si).powi(2);
    }
    (acc / (2 * v.len()).max(1) as f64).sqrt()
}

/// Why an integration stopped early.
#[derive(Debug)]
pub enum Halt {
    /// The controller needed a step below `min_step`; `y` holds the last
    /// accepted state at time `t`.
    Underflow { t: f64, step: f64 },
    /// The step callback returned an error.
    Callback(Error),
}

impl Halt {
    /// Converts to a crate error, attaching `last_good` for underflows.
    pub fn into_error(self, last_good: impl FnOnce() -> crate::hilbert::QState) -> Error {
        match self {
            Halt::Underflow { t, step } => Error::StepUnderflow {
                t,
                step,
                last_good: Box::new(last_good()),
            },
            Halt::Callback(e) => e,
        }
    }
}

/// Advances `y` from `t0` to exactly `t1`. `on_step(t, y)` runs after every
/// accepted step.
pub fn integrate<S, F>(
    sys: &mut S,
    y: &mut [C64],
    t0: f64,
    t1: f64,
    settings: &IntegratorSettings,
    stepper: &mut Stepper,
    mut on_step: F,
) -> std::result::Result<(), Halt>
where
    S: OdeSystem,
    F: FnMut(f64, &[C64]) -> Result<()>,
{
    if t1 <= t0 {
        return Ok(());
    }
    match settings.method {
        Method::FixedRk4 => rk4(sys, y, t0, t1, settings, stepper, &mut on_step),
        Method::AdaptiveEmbedded => dopri5(sys, y, t0, t1, settings, stepper, &mut on_step),
        Method::Exact => Err(Halt::Callback(Error::Parameter(
            "the exact method has no step-based integrator".into(),
        ))),
    }
}

fn rk4<S, F>(
    sys: &mut S,
    y: &mut [C64],
    t0: f64,
    t1: f64,
    s: &IntegratorSettings,
    stepper: &mut Stepper,
    on_step: &mut F,
) -> std::result::Result<(), Halt>
where
    S: OdeSystem,
    F: FnMut(f64, &[C64]) -> Result<()>,
{
    let n = y.len();
    let steps = ((t1 - t0) / s.max_step).ceil().max(1.0) as u64;
    let h = (t1 - t0) / steps as f64;
    let (mut k1, mut k2, mut k3, mut k4, mut tmp) = (zeros(n), zeros(n), zeros(n), zeros(n), zeros(n));
    for step in 0..steps {
        sys.rhs(y, &mut k1);
        for i in 0..n {
            tmp[i] = y[i] + 0.5 * h * k1[i];
        }
        sys.rhs(&tmp, &mut k2);
        for i in 0..n {
            tmp[i] = y[i] + 0.5 * h * k2[i];
        }
        sys.rhs(&tmp, &mut k3);
        for i in 0..n {
            tmp[i] = y[i] + h * k3[i];
        }
        sys.rhs(&tmp, &mut k4);
        for i in 0..n {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        stepper.stats.accepted += 1;
        stepper.stats.rhs_evals += 4;
        let t = if step + 1 == steps { t1 } else { t0 + (step + 1) as f64 * h };
        on_step(t, y).map_err(Halt::Callback)?;
    }
    stepper.fsal = None;
    Ok(())
}

fn dopri5<S, F>(
    sys: &mut S,
    y: &mut [C64],
    t0: f64,
    t1: f64,
    s: &IntegratorSettings,
    stepper: &mut Stepper,
    on_step: &mut F,
) -> std::result::Result<(), Halt>
where
    S: OdeSystem,
    F: FnMut(f64, &[C64]) -> Result<()>,
{
    let n = y.len();
    let mut k1 = match stepper.fsal.take() {
        Some(k) if k.len() == n => k,
        _ => {
            let mut k = zeros(n);
            sys.rhs(y, &mut k);
            stepper.stats.rhs_evals += 1;
            k
        }
    };
    let (mut k2, mut k3, mut k4, mut k5, mut k6, mut k7) =
        (zeros(n), zeros(n), zeros(n), zeros(n), zeros(n), zeros(n));
    let mut tmp = zeros(n);
    let mut ynew = zeros(n);
    let mut err = zeros(n);

    let mut h = match stepper.h {
        Some(h) => h,
        None => initial_step(sys, y, &k1, s, stepper),
    }
    .min(s.max_step);

    let mut t = t0;
    let mut rejected_last = false;
    while t < t1 {
        let remaining = t1 - t;
        let last = h >= remaining * (1.0 - 1e-12);
        let hs = if last { remaining } else { h };

        for i in 0..n {
            tmp[i] = y[i] + hs * A21 * k1[i];
        }
        sys.rhs(&tmp, &mut k2);
        for i in 0..n {
            tmp[i] = y[i] + hs * (A31 * k1[i] + A32 * k2[i]);
        }
        sys.rhs(&tmp, &mut k3);
        for i in 0..n {
            tmp[i] = y[i] + hs * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
        }
        sys.rhs(&tmp, &mut k4);
        for i in 0..n {
            tmp[i] = y[i] + hs * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
        }
        sys.rhs(&tmp, &mut k5);
        for i in 0..n {
            tmp[i] = y[i]
                + hs * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
        }
        sys.rhs(&tmp, &mut k6);
        for i in 0..n {
            ynew[i] = y[i]
                + hs * (B1 * k1[i] + B3 * k3[i] + B4 * k4[i] + B5 * k5[i] + B6 * k6[i]);
        }
        sys.rhs(&ynew, &mut k7);
        stepper.stats.rhs_evals += 6;
        for i in 0..n {
            err[i] = hs
                * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
        }
        let e = error_norm(&err, y, &ynew, s);

        if e <= 1.0 {
            // Accept; PI controller for the next step.
            let e = e.max(1e-10);
            let fac = 0.9 * e.powf(-0.7 / 5.0) * stepper.err_old.powf(0.4 / 5.0);
            let mut fac = fac.clamp(0.2, 10.0);
            if rejected_last {
                fac = fac.min(1.0);
            }
            stepper.err_old = e.max(1e-4);
            y.copy_from_slice(&ynew);
            std::mem::swap(&mut k1, &mut k7);
            t = if last { t1 } else { t + hs };
            stepper.stats.accepted += 1;
            rejected_last = false;
            if !last || fac < 1.0 {
                h = (hs * fac).min(s.max_step);
            }
            on_step(t, y).map_err(Halt::Callback)?;
        } else {
            stepper.stats.rejected += 1;
            rejected_last = true;
            let fac = if e.is_finite() {
                (0.9 * e.powf(-0.2)).clamp(0.1, 1.0)
            } else {
                0.1
            };
            h = hs * fac;
            if h < s.min_step {
                stepper.fsal = None;
                return Err(Halt::Underflow { t, step: h });
            }
        }
    }
    stepper.h = Some(h);
    stepper.fsal = Some(k1);
    Ok(())
}

fn initial_step<S: OdeSystem>(
    sys: &mut S,
    y: &[C64],
    f0: &[C64],
    s: &IntegratorSettings,
    stepper: &mut Stepper,
) -> f64 {
    let d0 = scaled_norm(y, y, s);
    let d1 = scaled_norm(f0, y, s);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let h0 = h0.min(s.max_step);
    let y1: Vec<C64> = y.iter().zip(f0).map(|(a, b)| a + h0 * b).collect();
    let mut f1 = zeros(y.len());
    sys.rhs(&y1, &mut f1);
    stepper.stats.rhs_evals += 1;
    let diff: Vec<C64> = f1.iter().zip(f0).map(|(a, b)| a - b).collect();
    let d2 = scaled_norm(&diff, y, s) / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6 * h0)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    (100.0 * h0).min(h1)
}
