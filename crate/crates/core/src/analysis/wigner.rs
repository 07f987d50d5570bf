// Copyright 2026 The emech Authors
// SPDX-License-Identifier: Apache-2.0

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{DenseMatrix, QState, HERMITIAN_TOL};

/// Convention tag written next to exported maps.
pub const WIGNER_CONVENTION: &str =
    "alpha=(x+ip)/sqrt(2); x=(b+b^dag)/sqrt(2); p=i(b^dag-b)/sqrt(2); unit integral over dx dp";

/// Wigner function sampled on a rectangular grid; `values[i][j]` belongs to
/// `(x[i], p[j])`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WignerMap {
    pub x: Vec<f64>,
    pub p: Vec<f64>,
    pub values: Vec<Vec<f64>>,
}

impl WignerMap {
    /// Riemann sum of `W dx dp`, assuming uniform grids.
    pub fn integral(&self) -> f64 {
        let dx = spacing(&self.x);
        let dp = spacing(&self.p);
        self.values.iter().flatten().sum::<f64>() * dx * dp
    }

    /// `∫ W dp` at every `x`.
    pub fn x_marginal(&self) -> Vec<f64> {
        let dp = spacing(&self.p);
        self.values.iter().map(|row| row.iter().sum::<f64>() * dp).collect()
    }

    pub fn min(&self) -> f64 {
        self.values.iter().flatten().cloned().fold(f64::INFINITY, f64::min)
    }
}

fn spacing(v: &[f64]) -> f64 {
    if v.len() < 2 {
        1.0
    } else {
        (v[v.len() - 1] - v[0]) / (v.len() - 1) as f64
    }
}

/// `n` evenly spaced points from `lo` to `hi` inclusive.
pub fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.5 * (lo + hi)],
        _ => (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect(),
    }
}

/// `W(x, p) = (1/π) Σ_n (−1)ⁿ [ρ_nn D_nn + 2 Re Σ_{m>n} ρ_nm D_mn]` with
/// `D = D(2α)`. Each off-diagonal `k = m − n` column of `D` comes from the
/// Laguerre recurrence in `n`, seeded with the Poisson-scaled prefactor so
/// every iterate is a bounded matrix element.
pub fn wigner_point(rho: &DenseMatrix, x: f64, p: f64) -> f64 {
    let dim = rho.nrows();
    let gamma = C64::new(x, p) * std::f64::consts::SQRT_2;
    let r2 = gamma.norm_sqr();
    let mut w = 0.0;
    // seed = e^{−|γ|²/2} γ^k / √k!
    let mut seed = C64::new((-0.5 * r2).exp(), 0.0);
    for k in 0..dim {
        if k > 0 {
            seed = seed * gamma / (k as f64).sqrt();
        }
        let kf = k as f64;
        let mut prev = C64::new(0.0, 0.0);
        let mut cur = seed;
        for n in 0..dim - k {
            if n > 0 {
                let nf = n as f64;
                let next = cur * ((2.0 * nf - 1.0 + kf - r2) / (nf * (nf + kf)).sqrt())
                    - prev * (((nf - 1.0) * (nf + kf - 1.0)) / (nf * (nf + kf))).sqrt();
                prev = cur;
                cur = next;
            }
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            let term = rho[(n, n + k)] * cur;
            w += sign * if k == 0 { term.re } else { 2.0 * term.re };
        }
    }
    w / std::f64::consts::PI
}

/// Wigner map of a single-mode state on the `x × p` grid.
pub fn wigner(state: &QState, x: &[f64], p: &[f64]) -> Result<WignerMap> {
    if state.layout().num_modes() != 1 {
        return Err(Error::State(format!(
            "Wigner function needs a single-mode state, got {}; take a partial trace first",
            state.layout()
        )));
    }
    let rho = state.density_matrix();
    let herr = rho.hermiticity_error();
    if herr > HERMITIAN_TOL * rho.max_abs().max(1.0) {
        return Err(Error::State(format!("density matrix not Hermitian ({herr:.3e})")));
    }
    let values = x
        .par_iter()
        .map(|&xi| p.iter().map(|&pj| wigner_point(&rho, xi, pj)).collect())
        .collect();
    Ok(WignerMap {
        x: x.to_vec(),
        p: p.to_vec(),
        values,
    })
}
