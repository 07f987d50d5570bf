// Copyright 2026 The emech Authors
// SPDX-License-Identifier: Apache-2.0

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::hilbert::{DenseMatrix, QOperator, QState, StateData, NORM_TOL};

/// `⟨ψ|ρ|ψ⟩` against a pure, normalized target.
pub fn fidelity(state: &QState, target: &QState) -> Result<f64> {
    if state.layout() != target.layout() {
        return Err(Error::LayoutMismatch(format!(
            "state on {} but target on {}",
            state.layout(),
            target.layout()
        )));
    }
    let psi = match target.data() {
        StateData::Vector(v) => v,
        StateData::Density(_) => {
            return Err(Error::State("fidelity target must be a pure state vector".into()))
        }
    };
    if (target.trace() - 1.0).abs() > NORM_TOL {
        return Err(Error::State(format!(
            "fidelity target norm² {} is not 1",
            target.trace()
        )));
    }
    let f: C64 = match state.data() {
        StateData::Vector(phi) => {
            let ov: C64 = psi.iter().zip(phi).map(|(a, b)| a.conj() * b).sum();
            C64::new(ov.norm_sqr(), 0.0)
        }
        StateData::Density(rho) => {
            let n = psi.len();
            let mut s = C64::new(0.0, 0.0);
            for i in 0..n {
                if psi[i] == C64::new(0.0, 0.0) {
                    continue;
                }
                let mut row = C64::new(0.0, 0.0);
                for j in 0..n {
                    row += rho[(i, j)] * psi[j];
                }
                s += psi[i].conj() * row;
            }
            s
        }
    };
    if f.im.abs() > 1e-10 {
        return Err(Error::State(format!("fidelity has imaginary part {:.3e}", f.im)));
    }
    Ok(f.re)
}

pub fn purity(state: &QState) -> f64 {
    state.purity()
}

/// Occupation probabilities of the mode with `label`.
pub fn populations(state: &QState, label: &str) -> Result<Vec<f64>> {
    let m = state.layout().require(label)?;
    state.populations(m)
}

/// `(−1)^n` on the mode with `label`.
pub fn parity_operator(state: &QState, label: &str) -> Result<QOperator> {
    let m = state.layout().require(label)?;
    Ok(QOperator::diagonal_fn(state.layout(), |occ| {
        C64::new(if occ[m] % 2 == 0 { 1.0 } else { -1.0 }, 0.0)
    }))
}

/// `⟨(−1)^n⟩` of the mode with `label`.
pub fn parity(state: &QState, label: &str) -> Result<f64> {
    Ok(state.expectation(&parity_operator(state, label)?)?.re)
}

/// State of the other modes conditioned on finding the mode `label` in
/// `level`, together with the probability of that outcome.
pub fn postselect(state: &QState, label: &str, level: usize) -> Result<(QState, f64)> {
    let l = state.layout();
    let m = l.require(label)?;
    if level >= l.dim(m) {
        return Err(Error::Occupation {
            label: label.into(),
            occupation: level,
            dim: l.dim(m),
        });
    }
    let rest: Vec<usize> = (0..l.num_modes()).filter(|&k| k != m).collect();
    if rest.is_empty() {
        return Err(Error::Layout("post-selection needs at least two modes".into()));
    }
    let sub = l.subset(&rest)?;
    // Flat indices of the kept block, in the order of `sub`.
    let idx: Vec<usize> = (0..l.total()).filter(|&i| l.occupations(i)[m] == level).collect();
    let (out, prob) = match state.data() {
        StateData::Vector(psi) => {
            let v: Vec<C64> = idx.iter().map(|&i| psi[i]).collect();
            let p: f64 = v.iter().map(|x| x.norm_sqr()).sum();
            (StateData::Vector(v), p)
        }
        StateData::Density(rho) => {
            let n = idx.len();
            let d = DenseMatrix::from_fn(n, n, |a, b| rho[(idx[a], idx[b])]);
            let p = d.trace().re;
            (StateData::Density(d), p)
        }
    };
    if !(prob > 0.0) {
        return Err(Error::State(format!("outcome {label} = {level} has zero probability")));
    }
    let s = match out {
        StateData::Vector(v) => QState::normalized(sub, v)?,
        StateData::Density(d) => QState::from_density(sub, d.scale(C64::new(1.0 / prob, 0.0)).hermitian_part())?,
    };
    Ok((s, prob))
}
