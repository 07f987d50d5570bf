// Copyright 2026 The emech Authors
// SPDX-License-Identifier: Apache-2.0

use std::path::Path;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::dense::DenseMatrix;
use super::layout::{ModeLayout, MECH};
use super::operator::{QOperator, Storage};
use crate::error::{Error, Result};

pub const NORM_TOL: f64 = 1e-10;
pub const HERMITIAN_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-10;
pub const MIN_EIGENVALUE_TOL: f64 = -1e-8;
/// Truncated probability mass above which state constructors warn.
pub const TRUNCATION_WARN: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StateKind {
    Vector,
    Density,
}

#[derive(Clone, Debug, PartialEq)]
pub enum StateData {
    Vector(Vec<C64>),
    Density(DenseMatrix),
}

/// A normalized pure state or a density matrix on a [`ModeLayout`].
#[derive(Clone, Debug, PartialEq)]
pub struct QState {
    layout: ModeLayout,
    data: StateData,
}

impl QState {
    /// Pure state; the norm must be 1 within [`NORM_TOL`].
    pub fn from_vector(layout: ModeLayout, psi: Vec<C64>) -> Result<Self> {
        check_len(&layout, psi.len())?;
        let norm2 = norm_sqr(&psi);
        if (norm2 - 1.0).abs() > NORM_TOL {
            return Err(Error::State(format!("vector norm² = {norm2:.12} is not 1")));
        }
        Ok(Self {
            layout,
            data: StateData::Vector(psi),
        })
    }

    /// Pure state from an unnormalized vector.
    pub fn normalized(layout: ModeLayout, mut psi: Vec<C64>) -> Result<Self> {
        check_len(&layout, psi.len())?;
        let norm = norm_sqr(&psi).sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::State("cannot normalize a zero vector".into()));
        }
        psi.iter_mut().for_each(|c| *c /= norm);
        Ok(Self {
            layout,
            data: StateData::Vector(psi),
        })
    }

    /// Density matrix; checks Hermiticity, unit trace and positivity.
    pub fn from_density(layout: ModeLayout, rho: DenseMatrix) -> Result<Self> {
        let n = layout.total();
        if rho.shape() != (n, n) {
            return Err(Error::LayoutMismatch(format!(
                "density {:?} for layout {layout}",
                rho.shape()
            )));
        }
        let herm = rho.hermiticity_error();
        if herm > HERMITIAN_TOL {
            return Err(Error::State(format!("density not Hermitian (error {herm:.3e})")));
        }
        let tr = rho.trace();
        if (tr - 1.0).norm() > TRACE_TOL {
            return Err(Error::State(format!("density trace {tr} is not 1")));
        }
        let min = rho.eigvalsh()?.first().copied().unwrap_or(0.0);
        if min < MIN_EIGENVALUE_TOL {
            return Err(Error::State(format!(
                "density has negative eigenvalue {min:.3e}"
            )));
        }
        Ok(Self {
            layout,
            data: StateData::Density(rho),
        })
    }

    /// Skips validation; used for states produced by the integrators, which
    /// carry their own trace and positivity guards.
    pub(crate) fn density_unchecked(layout: ModeLayout, rho: DenseMatrix) -> Self {
        Self {
            layout,
            data: StateData::Density(rho),
        }
    }

    pub(crate) fn vector_unchecked(layout: ModeLayout, psi: Vec<C64>) -> Self {
        Self {
            layout,
            data: StateData::Vector(psi),
        }
    }

    pub fn layout(&self) -> &ModeLayout {
        &self.layout
    }

    pub fn data(&self) -> &StateData {
        &self.data
    }

    pub fn kind(&self) -> StateKind {
        match self.data {
            StateData::Vector(_) => StateKind::Vector,
            StateData::Density(_) => StateKind::Density,
        }
    }

    pub fn as_vector(&self) -> Option<&[C64]> {
        match &self.data {
            StateData::Vector(v) => Some(v),
            StateData::Density(_) => None,
        }
    }

    pub fn as_density(&self) -> Option<&DenseMatrix> {
        match &self.data {
            StateData::Vector(_) => None,
            StateData::Density(m) => Some(m),
        }
    }

    pub fn density_matrix(&self) -> DenseMatrix {
        match &self.data {
            StateData::Vector(v) => DenseMatrix::outer(v, v),
            StateData::Density(m) => m.clone(),
        }
    }

    pub fn to_density(&self) -> Self {
        Self {
            layout: self.layout.clone(),
            data: StateData::Density(self.density_matrix()),
        }
    }

    /// Same data under new mode labels.
    pub fn relabeled<S: AsRef<str>>(&self, labels: &[S]) -> Result<Self> {
        Ok(Self {
            layout: self.layout.relabeled(labels)?,
            data: self.data.clone(),
        })
    }

    pub fn trace(&self) -> f64 {
        match &self.data {
            StateData::Vector(v) => norm_sqr(v),
            StateData::Density(m) => m.trace().re,
        }
    }

    pub fn purity(&self) -> f64 {
        match &self.data {
            StateData::Vector(v) => norm_sqr(v).powi(2),
            StateData::Density(m) => m.as_slice().iter().map(|c| c.norm_sqr()).sum(),
        }
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        match &self.data {
            StateData::Vector(_) => Ok(0.0),
            StateData::Density(m) => Ok(m.eigvalsh()?.first().copied().unwrap_or(0.0)),
        }
    }

    /// `⟨ψ|O|ψ⟩` or `Tr(Oρ)`. For Hermitian `O` a residual imaginary part
    /// above 1e-9 is reported as an error.
    pub fn expectation(&self, op: &QOperator) -> Result<C64> {
        let v = self.expect(op)?;
        if op.is_hermitian(HERMITIAN_TOL) && v.im.abs() > 1e-9 * v.re.abs().max(1.0) {
            return Err(Error::State(format!(
                "expectation of Hermitian operator has imaginary part {:.3e}",
                v.im
            )));
        }
        Ok(v)
    }

    /// Unchecked expectation value.
    pub fn expect(&self, op: &QOperator) -> Result<C64> {
        if op.layout() != &self.layout {
            return Err(Error::LayoutMismatch(format!(
                "operator on {} but state on {}",
                op.layout(),
                self.layout
            )));
        }
        Ok(match &self.data {
            StateData::Vector(psi) => {
                let o = op.apply(psi);
                psi.iter().zip(&o).map(|(a, b)| a.conj() * b).sum()
            }
            StateData::Density(rho) => trace_product(op, rho),
        })
    }

    /// Reduced density matrix over `keep` (mode indices, any order; the
    /// result keeps the layout order).
    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        let sub = self.layout.subset(keep)?;
        let mut kept: Vec<usize> = keep.to_vec();
        kept.sort_unstable();
        kept.dedup();
        let traced: Vec<usize> = (0..self.layout.num_modes())
            .filter(|m| !kept.contains(m))
            .collect();
        let n = self.layout.total();
        let nk = sub.total();
        let nt = n / nk;
        let mut groups: Vec<Vec<(usize, usize)>> = vec![Vec::with_capacity(nk); nt];
        for i in 0..n {
            let occ = self.layout.occupations(i);
            let mut ik = 0;
            for &m in &kept {
                ik = ik * self.layout.dim(m) + occ[m];
            }
            let mut it = 0;
            for &m in &traced {
                it = it * self.layout.dim(m) + occ[m];
            }
            groups[it].push((i, ik));
        }
        let mut red = DenseMatrix::zeros(nk, nk);
        for g in &groups {
            for &(i, ki) in g {
                for &(j, kj) in g {
                    red[(ki, kj)] += match &self.data {
                        StateData::Vector(psi) => psi[i] * psi[j].conj(),
                        StateData::Density(rho) => rho[(i, j)],
                    };
                }
            }
        }
        Ok(Self::density_unchecked(sub, red))
    }

    /// Reduced state of the mode with the given label.
    pub fn reduce_to(&self, label: &str) -> Result<Self> {
        let m = self.layout.require(label)?;
        self.partial_trace(&[m])
    }

    /// Diagonal of the reduced state of one mode.
    pub fn populations(&self, mode: usize) -> Result<Vec<f64>> {
        let r = self.partial_trace(&[mode])?;
        let m = r.density_matrix();
        Ok((0..m.nrows()).map(|i| m[(i, i)].re).collect())
    }

    /// `self ⊗ other`; pure if both are pure.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let layout = self.layout.tensor(&other.layout)?;
        let data = match (&self.data, &other.data) {
            (StateData::Vector(a), StateData::Vector(b)) => {
                StateData::Vector(a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect())
            }
            _ => StateData::Density(self.density_matrix().kron(&other.density_matrix())),
        };
        Ok(Self { layout, data })
    }

    /// `U ψ` or `U ρ U†` without a unitarity check.
    pub(crate) fn transform(&self, u: &QOperator) -> Self {
        let data = match &self.data {
            StateData::Vector(psi) => StateData::Vector(u.apply(psi)),
            StateData::Density(rho) => {
                let ud = u.to_dense();
                StateData::Density(ud.matmul(rho).matmul(&ud.adjoint()))
            }
        };
        Self {
            layout: self.layout.clone(),
            data,
        }
    }

    /// Re-expresses the state on `target`, matching modes by label. Modes
    /// missing from `self` are put in vacuum; modes of `self` absent from
    /// `target` must be in vacuum. Levels beyond a shrunk truncation are
    /// dropped and the result is renormalized; the discarded probability is
    /// returned alongside.
    pub fn embed(&self, target: &ModeLayout) -> Result<(Self, f64)> {
        let src = &self.layout;
        let mut map_modes = Vec::with_capacity(src.num_modes());
        for label in src.labels() {
            map_modes.push(target.index_of(label));
        }
        let n_src = src.total();
        // Flat index in `target` for every source basis state, if kept.
        let mut dest: Vec<Option<usize>> = Vec::with_capacity(n_src);
        let mut occ_t = vec![0usize; target.num_modes()];
        for flat in 0..n_src {
            let occ = src.occupations(flat);
            occ_t.iter_mut().for_each(|o| *o = 0);
            let mut keep = true;
            for (k, &n) in occ.iter().enumerate() {
                match map_modes[k] {
                    Some(t) if n < target.dim(t) => occ_t[t] = n,
                    _ if n == 0 => {}
                    _ => keep = false,
                }
            }
            dest.push(if keep { Some(target.flat_index(&occ_t)?) } else { None });
        }
        let n_t = target.total();
        let (data, kept) = match &self.data {
            StateData::Vector(psi) => {
                let mut out = vec![C64::new(0.0, 0.0); n_t];
                for (i, d) in dest.iter().enumerate() {
                    if let Some(j) = d {
                        out[*j] = psi[i];
                    }
                }
                let kept = norm_sqr(&out);
                (StateData::Vector(out), kept)
            }
            StateData::Density(rho) => {
                let mut out = DenseMatrix::zeros(n_t, n_t);
                for (i, di) in dest.iter().enumerate() {
                    let Some(a) = di else { continue };
                    for (j, dj) in dest.iter().enumerate() {
                        if let Some(b) = dj {
                            out[(*a, *b)] = rho[(i, j)];
                        }
                    }
                }
                let kept = out.trace().re;
                (StateData::Density(out), kept)
            }
        };
        let total = self.trace();
        if !(kept > 0.0) {
            return Err(Error::Truncation(format!(
                "embedding {} into {target} discards the whole state",
                self.layout
            )));
        }
        let loss = 1.0 - kept / total;
        if loss > TRUNCATION_WARN {
            log::warn!("embedding into {target} discards {loss:.3e} of probability");
        }
        let data = match data {
            StateData::Vector(v) => {
                let s = 1.0 / kept.sqrt();
                StateData::Vector(v.into_iter().map(|x| x * s).collect())
            }
            StateData::Density(m) => StateData::Density(m.scale(C64::new(1.0 / kept, 0.0))),
        };
        Ok((
            Self {
                layout: target.clone(),
                data,
            },
            loss,
        ))
    }

    /// Inner product `⟨self|other⟩` of two pure states.
    pub fn overlap(&self, other: &Self) -> Result<C64> {
        if self.layout != other.layout {
            return Err(Error::LayoutMismatch(format!(
                "{} vs {}",
                self.layout, other.layout
            )));
        }
        match (&self.data, &other.data) {
            (StateData::Vector(a), StateData::Vector(b)) => {
                Ok(a.iter().zip(b).map(|(x, y)| x.conj() * y).sum())
            }
            _ => Err(Error::State("overlap needs two pure states".into())),
        }
    }

    pub fn to_dump(&self) -> StateDump {
        let flat: Vec<C64> = match &self.data {
            StateData::Vector(v) => v.clone(),
            StateData::Density(m) => m.as_slice().to_vec(),
        };
        StateDump {
            labels: self.layout.labels().to_vec(),
            dims: self.layout.dims().to_vec(),
            kind: self.kind(),
            re: flat.iter().map(|c| c.re).collect(),
            im: flat.iter().map(|c| c.im).collect(),
        }
    }

    pub fn from_dump(d: StateDump) -> Result<Self> {
        let layout = ModeLayout::new(&d.dims, &d.labels)?;
        if d.re.len() != d.im.len() {
            return Err(Error::State("re/im length mismatch in state dump".into()));
        }
        let flat: Vec<C64> = d.re.iter().zip(&d.im).map(|(&r, &i)| C64::new(r, i)).collect();
        match d.kind {
            StateKind::Vector => Self::from_vector(layout, flat),
            StateKind::Density => {
                let n = layout.total();
                let m = DenseMatrix::from_row_major(n, n, flat)?;
                Self::from_density(layout, m)
            }
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&self.to_dump())?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Self::from_dump(serde_json::from_str(s)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

/// Serialized form of a [`QState`], row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateDump {
    pub labels: Vec<String>,
    pub dims: Vec<usize>,
    pub kind: StateKind,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

fn check_len(layout: &ModeLayout, len: usize) -> Result<()> {
    if len != layout.total() {
        return Err(Error::LayoutMismatch(format!(
            "vector of length {len} for layout {layout}"
        )));
    }
    Ok(())
}

pub(crate) fn norm_sqr(v: &[C64]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum()
}

/// `Tr(O ρ)`.
pub(crate) fn trace_product(op: &QOperator, rho: &DenseMatrix) -> C64 {
    let n = rho.nrows();
    match op.storage() {
        Storage::Sparse(m) => {
            let mut s = C64::new(0.0, 0.0);
            for i in 0..n {
                let (cols, vals) = m.row(i);
                for (&k, &v) in cols.iter().zip(vals) {
                    s += v * rho[(k, i)];
                }
            }
            s
        }
        Storage::Dense(m) => {
            let mut s = C64::new(0.0, 0.0);
            for i in 0..n {
                for k in 0..n {
                    s += m[(i, k)] * rho[(k, i)];
                }
            }
            s
        }
    }
}

/// Basis state with the given occupations.
pub fn fock_state(layout: &ModeLayout, occupations: &[usize]) -> Result<QState> {
    let idx = layout.flat_index(occupations)?;
    let mut psi = vec![C64::new(0.0, 0.0); layout.total()];
    psi[idx] = C64::new(1.0, 0.0);
    QState::from_vector(layout.clone(), psi)
}

/// Minimum dimension for which a coherent state of amplitude `|beta|` is
/// considered safely truncated.
pub fn coherent_safe_dim(beta: C64) -> usize {
    let b = beta.norm();
    (b * b + 6.0 * b + 10.0).ceil() as usize
}

/// Untruncated Fock amplitudes `e^{-|β|²/2} βⁿ/√n!` for `n < dim`.
pub fn coherent_amplitudes(dim: usize, beta: C64) -> Vec<C64> {
    let mut c = Vec::with_capacity(dim);
    let mut cur = C64::new((-0.5 * beta.norm_sqr()).exp(), 0.0);
    for n in 0..dim {
        if n > 0 {
            cur = cur * beta / (n as f64).sqrt();
        }
        c.push(cur);
    }
    c
}

/// Poisson probability mass at and above `dim` for mean `|β|²`.
pub fn coherent_tail_mass(dim: usize, beta: C64) -> f64 {
    let mu = beta.norm_sqr();
    if mu == 0.0 {
        return 0.0;
    }
    // log p_dim, then the tail by forward recursion until negligible.
    let mut log_p = -mu + dim as f64 * mu.ln() - ln_factorial(dim);
    let mut sum = 0.0;
    let mut n = dim;
    loop {
        let p = log_p.exp();
        sum += p;
        n += 1;
        log_p += mu.ln() - (n as f64).ln();
        if (n as f64) > mu && p < 1e-300_f64.max(sum * 1e-18) {
            break;
        }
    }
    sum
}

fn ln_factorial(n: usize) -> f64 {
    (1..=n).map(|k| (k as f64).ln()).sum()
}

/// Single-mode coherent state labelled `mech`, renormalized after
/// truncation.
pub fn coherent_state(dim: usize, beta: C64) -> Result<QState> {
    if dim < coherent_safe_dim(beta) {
        log::warn!(
            "coherent state |β| = {:.3} in dim {dim} is below the safe truncation {}",
            beta.norm(),
            coherent_safe_dim(beta)
        );
    }
    let c = coherent_amplitudes(dim, beta);
    let loss = 1.0 - norm_sqr(&c);
    if loss > TRUNCATION_WARN {
        log::warn!("coherent state truncation loses {loss:.3e} of probability");
    }
    QState::normalized(ModeLayout::single(dim, MECH)?, c)
}

/// Geometric tail mass `(n̄/(1+n̄))^dim` of a thermal distribution.
pub fn thermal_tail_mass(dim: usize, n_bar: f64) -> f64 {
    if n_bar <= 0.0 {
        return 0.0;
    }
    (n_bar / (1.0 + n_bar)).powi(dim as i32)
}

/// Single-mode thermal state labelled `mech`, renormalized after truncation.
pub fn thermal_state(dim: usize, n_bar: f64) -> Result<QState> {
    if !(n_bar >= 0.0 && n_bar.is_finite()) {
        return Err(Error::Parameter(format!("thermal occupation {n_bar} must be ≥ 0")));
    }
    let layout = ModeLayout::single(dim, MECH)?;
    let q = n_bar / (1.0 + n_bar);
    let p: Vec<f64> = (0..dim).map(|n| (1.0 - q) * q.powi(n as i32)).collect();
    let kept: f64 = p.iter().sum();
    let loss = 1.0 - kept;
    if loss > TRUNCATION_WARN {
        log::warn!("thermal state n̄ = {n_bar} in dim {dim} truncates {loss:.3e} of probability");
    }
    let mut rho = DenseMatrix::zeros(dim, dim);
    for (n, pn) in p.iter().enumerate() {
        rho[(n, n)] = C64::new(pn / kept, 0.0);
    }
    Ok(QState::density_unchecked(layout, rho))
}

/// Probability mass lost by truncating a thermal state, computed the same
/// way [`thermal_state`] does.
pub fn thermal_truncation_loss(dim: usize, n_bar: f64) -> f64 {
    let q = n_bar / (1.0 + n_bar);
    1.0 - (0..dim).map(|n| (1.0 - q) * q.powi(n as i32)).sum::<f64>()
}

/// Probability mass lost by truncating a coherent state, computed the same
/// way [`coherent_state`] does.
pub fn coherent_truncation_loss(dim: usize, beta: C64) -> f64 {
    1.0 - norm_sqr(&coherent_amplitudes(dim, beta))
}
