// Copyright 2026 The emech Authors
// SPDX-License-Identifier: Apache-2.0

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::dynamics::{evolve, CollapseSet, IntegratorSettings, Observables, Schedule, Trajectory};
use crate::error::{Error, Result};
use crate::hilbert::{CsrMatrix, DenseMatrix, ModeLayout, QOperator, QState, CAVITY, TRANSMON};
use crate::model::{hamiltonian, HamiltonianOptions, SystemParams};

/// Two-level transition addressed by an idealized pulse.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Transition {
    Transmon01,
    Transmon12,
    PolaritonPlus,
    PolaritonMinus,
}

impl fmt::Display for Transition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Transition::Transmon01 => "transmon01",
            Transition::Transmon12 => "transmon12",
            Transition::PolaritonPlus => "polariton+",
            Transition::PolaritonMinus => "polariton-",
        })
    }
}

impl FromStr for Transition {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "transmon01" => Ok(Transition::Transmon01),
            "transmon12" => Ok(Transition::Transmon12),
            "polariton+" | "plus" => Ok(Transition::PolaritonPlus),
            "polariton-" | "minus" => Ok(Transition::PolaritonMinus),
            _ => Err(Error::Parameter(format!("unknown transition '{s}'"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
}

/// `cos(θ/2) 1 − i sin(θ/2) σ_axis` in the basis (lower, upper).
pub fn rotation_matrix(angle: f64, axis: Axis) -> [[C64; 2]; 2] {
    let (s, c) = (angle / 2.0).sin_cos();
    let off = match axis {
        Axis::X => [C64::new(0.0, -s), C64::new(0.0, -s)],
        Axis::Y => [C64::new(-s, 0.0), C64::new(s, 0.0)],
    };
    [[C64::new(c, 0.0), off[0]], [off[1], C64::new(c, 0.0)]]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EventKind {
    Rotation {
        target: Transition,
        angle: f64,
        axis: Axis,
    },
    /// Sudden change of the system parameters, e.g. a flux retune.
    Retune { params: Box<SystemParams> },
    /// Free evolution under the current parameters.
    Segment { duration: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Event {
    /// Start time, seconds.
    pub time: f64,
    pub kind: EventKind,
}

/// Idealized pulses, retunes and free-evolution segments, all written in
/// one frame rotating at `frame` for transmon and cavity.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PulseSequence {
    initial: SystemParams,
    frame: f64,
    include_g_c: bool,
    events: Vec<Event>,
    end: f64,
}

impl PulseSequence {
    pub fn new(params: &SystemParams, frame: f64) -> Self {
        Self {
            initial: params.clone(),
            frame,
            include_g_c: true,
            events: Vec::new(),
            end: 0.0,
        }
    }

    /// Drops the `g_c c†c(b + b†)` term from every segment.
    pub fn without_g_c(mut self) -> Self {
        self.include_g_c = false;
        self
    }

    pub fn rotate(mut self, target: Transition, angle: f64, axis: Axis) -> Self {
        self.events.push(Event {
            time: self.end,
            kind: EventKind::Rotation {
                target,
                angle,
                axis,
            },
        });
        self
    }

    pub fn retune(mut self, params: &SystemParams) -> Self {
        self.events.push(Event {
            time: self.end,
            kind: EventKind::Retune {
                params: Box::new(params.clone()),
            },
        });
        self
    }

    pub fn segment(mut self, duration: f64) -> Result<Self> {
        if !(duration.is_finite() && duration >= 0.0) {
            return Err(Error::Parameter(format!("segment duration {duration} must be ≥ 0")));
        }
        self.events.push(Event {
            time: self.end,
            kind: EventKind::Segment { duration },
        });
        self.end += duration;
        Ok(self)
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn duration(&self) -> f64 {
        self.end
    }

    pub fn frame(&self) -> f64 {
        self.frame
    }

    /// Parameters in force after the last event.
    pub fn final_params(&self) -> &SystemParams {
        self.events
            .iter()
            .rev()
            .find_map(|e| match &e.kind {
                EventKind::Retune { params } => Some(params.as_ref()),
                _ => None,
            })
            .unwrap_or(&self.initial)
    }

    /// Lowers the sequence to a schedule of segments and unitaries on
    /// `layout`.
    pub fn compile(&self, layout: &ModeLayout) -> Result<Schedule> {
        let mut params = self.initial.clone();
        let mut sched = Schedule::new(layout);
        let opts = HamiltonianOptions {
            frame: self.frame,
            include_g_c: self.include_g_c,
            include_drive: false,
        };
        for (k, e) in self.events.iter().enumerate() {
            match &e.kind {
                EventKind::Retune { params: p } => {
                    p.validate()?;
                    params = (**p).clone();
                }
                EventKind::Segment { duration } => {
                    let h = hamiltonian(&params, layout, &opts)?;
                    let cs = CollapseSet::standard(&params, layout)?;
                    sched = sched.evolve(&format!("segment{k}"), h, cs, *duration)?;
                }
                EventKind::Rotation {
                    target,
                    angle,
                    axis,
                } => {
                    let u = pulse_unitary(&params, layout, self.frame, *target, *angle, *axis)?;
                    sched = sched.unitary(&format!("{target}"), u)?;
                }
            }
        }
        Ok(sched)
    }

    pub fn run(
        &self,
        initial: &QState,
        settings: &IntegratorSettings,
        observables: &Observables,
    ) -> Result<Trajectory> {
        let sched = self.compile(initial.layout())?;
        evolve(initial, &sched, settings, observables)
    }
}

/// Full-space operator acting as `local` on `modes` (in layout order) and
/// as the identity elsewhere.
pub fn embed_on_modes(layout: &ModeLayout, modes: &[usize], local: &DenseMatrix) -> Result<QOperator> {
    let sub = layout.subset(modes)?;
    let mut sorted = modes.to_vec();
    sorted.sort_unstable();
    if local.shape() != (sub.total(), sub.total()) {
        return Err(Error::LayoutMismatch(format!(
            "local operator {:?} does not fit {sub}",
            local.shape()
        )));
    }
    let n = layout.total();
    let mut trip = Vec::new();
    for i in 0..n {
        let occ = layout.occupations(i);
        let sub_occ: Vec<usize> = sorted.iter().map(|&m| occ[m]).collect();
        let r = sub.flat_index(&sub_occ)?;
        for col in 0..sub.total() {
            let v = local[(r, col)];
            if v == C64::new(0.0, 0.0) {
                continue;
            }
            let col_occ = sub.occupations(col);
            let mut o = occ.clone();
            for (k, &m) in sorted.iter().enumerate() {
                o[m] = col_occ[k];
            }
            trip.push((i, layout.flat_index(&o)?, v));
        }
    }
    QOperator::from_sparse(layout.clone(), CsrMatrix::from_triplets(n, n, trip))
}

/// One-excitation eigenvectors `(|−⟩, |+⟩)` of the transmon–cavity block of
/// the Hamiltonian, in the basis `(|1,0⟩, |0,1⟩)`, with eigenvalues. Each
/// vector's largest component is made real and positive.
pub fn polariton_vectors(params: &SystemParams, frame: f64) -> Result<[(f64, [C64; 2]); 2]> {
    let tc = ModeLayout::new(&[2, 2], &[TRANSMON, CAVITY])?;
    let h = hamiltonian(
        params,
        &tc,
        &HamiltonianOptions {
            frame,
            ..HamiltonianOptions::default()
        },
    )?;
    let i10 = tc.flat_index(&[1, 0])?;
    let i01 = tc.flat_index(&[0, 1])?;
    let block = DenseMatrix::from_fn(2, 2, |r, c| {
        let idx = [i10, i01];
        h.get(idx[r], idx[c])
    });
    let (vals, vecs) = block.eigh()?;
    let mut out = [(0.0, [C64::new(0.0, 0.0); 2]); 2];
    for k in 0..2 {
        let mut v = [vecs[(0, k)], vecs[(1, k)]];
        let big = if v[0].norm() >= v[1].norm() { v[0] } else { v[1] };
        let phase = big.conj() / big.norm();
        v.iter_mut().for_each(|x| *x *= phase);
        out[k] = (vals[k], v);
    }
    Ok(out)
}

/// Idealized instantaneous rotation on `target` for the given parameters.
pub fn pulse_unitary(
    params: &SystemParams,
    layout: &ModeLayout,
    frame: f64,
    target: Transition,
    angle: f64,
    axis: Axis,
) -> Result<QOperator> {
    let r = rotation_matrix(angle, axis);
    let t = layout.require(TRANSMON)?;
    match target {
        Transition::Transmon01 | Transition::Transmon12 => {
            let (lo, hi) = if target == Transition::Transmon01 { (0, 1) } else { (1, 2) };
            let d = layout.dim(t);
            if hi >= d {
                return Err(Error::Layout(format!(
                    "{target} pulse needs transmon dim ≥ {}, layout has {d}",
                    hi + 1
                )));
            }
            let mut m = DenseMatrix::identity(d);
            m[(lo, lo)] = r[0][0];
            m[(lo, hi)] = r[0][1];
            m[(hi, lo)] = r[1][0];
            m[(hi, hi)] = r[1][1];
            embed_on_modes(layout, &[t], &m)
        }
        Transition::PolaritonPlus | Transition::PolaritonMinus => {
            let c = layout.require(CAVITY)?;
            let pol = polariton_vectors(params, frame)?;
            let v = if target == Transition::PolaritonPlus { pol[1].1 } else { pol[0].1 };
            let sub = layout.subset(&[t, c])?;
            let n = sub.total();
            let (ti, ci) = if t < c { (0, 1) } else { (1, 0) };
            let idx = |nt: usize, nc: usize| {
                let mut o = [0usize; 2];
                o[ti] = nt;
                o[ci] = nc;
                sub.flat_index(&o)
            };
            // Basis (|0,0⟩, |±⟩) of the addressed pair.
            let mut e0 = vec![C64::new(0.0, 0.0); n];
            e0[idx(0, 0)?] = C64::new(1.0, 0.0);
            let mut e1 = vec![C64::new(0.0, 0.0); n];
            e1[idx(1, 0)?] = v[0];
            e1[idx(0, 1)?] = v[1];
            let basis = [e0, e1];
            let mut m = DenseMatrix::identity(n);
            for a in 0..2 {
                for b in 0..2 {
                    let coef = r[a][b] - if a == b { 1.0 } else { 0.0 };
                    for i in 0..n {
                        for j in 0..n {
                            m[(i, j)] += coef * basis[a][i] * basis[b][j].conj();
                        }
                    }
                }
            }
            let mut modes = [t, c];
            modes.sort_unstable();
            embed_on_modes(layout, &modes, &m)
        }
    }
}
