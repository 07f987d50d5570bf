// Copyright 2026 The emech Authors
// SPDX-License-Identifier: Apache-2.0

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::hilbert::{CsrMatrix, DenseMatrix, ModeLayout, QOperator, QState, StateData};
use crate::hilbert::{CAVITY, MECH, TRANSMON};
use crate::model::SystemParams;

/// A jump operator with its rate; the dissipator is `rate · D[op]`.
#[derive(Clone, Debug)]
pub struct Collapse {
    pub name: String,
    pub op: QOperator,
    pub rate: f64,
}

/// Collapse channels sharing one layout.
#[derive(Clone, Debug)]
pub struct CollapseSet {
    layout: ModeLayout,
    channels: Vec<Collapse>,
}

impl CollapseSet {
    pub fn empty(layout: &ModeLayout) -> Self {
        Self {
            layout: layout.clone(),
            channels: Vec::new(),
        }
    }

    pub fn push(&mut self, name: &str, op: QOperator, rate: f64) -> Result<()> {
        if !(rate.is_finite() && rate >= 0.0) {
            return Err(Error::Parameter(format!(
                "collapse rate for '{name}' must be finite and ≥ 0, got {rate}"
            )));
        }
        if op.layout() != &self.layout {
            return Err(Error::LayoutMismatch(format!(
                "collapse '{name}' on {} but set on {}",
                op.layout(),
                self.layout
            )));
        }
        self.channels.push(Collapse {
            name: name.into(),
            op,
            rate,
        });
        Ok(())
    }

    pub fn with(mut self, name: &str, op: QOperator, rate: f64) -> Result<Self> {
        self.push(name, op, rate)?;
        Ok(self)
    }

    /// Standard channels: transmon decay `a` (γ_t) and dephasing `a†a`
    /// (γ_φ), mechanical loss `b` ((n̄+1)Γ_m) and heating `b†` (n̄Γ_m), and
    /// cavity loss `c` (κ_c). Channels of absent modes or zero rate are
    /// skipped.
    pub fn standard(params: &SystemParams, layout: &ModeLayout) -> Result<Self> {
        let d = params.derive();
        let mut set = Self::empty(layout);
        if let Some(t) = layout.index_of(TRANSMON) {
            set.push_nonzero("transmon_decay", QOperator::lowering(layout, t)?, params.gamma_t)?;
            set.push_nonzero("transmon_dephasing", QOperator::number(layout, t)?, params.gamma_phi)?;
        }
        if let Some(m) = layout.index_of(MECH) {
            let b = QOperator::lowering(layout, m)?;
            set.push_nonzero("mech_heating", b.adjoint(), d.n_bar * d.gamma_m)?;
            set.push_nonzero("mech_loss", b, (d.n_bar + 1.0) * d.gamma_m)?;
        }
        if let Some(c) = layout.index_of(CAVITY) {
            set.push_nonzero("cavity_loss", QOperator::lowering(layout, c)?, params.kappa_c)?;
        }
        Ok(set)
    }

    fn push_nonzero(&mut self, name: &str, op: QOperator, rate: f64) -> Result<()> {
        if rate > 0.0 {
            self.push(name, op, rate)?;
        }
        Ok(())
    }

    pub fn layout(&self) -> &ModeLayout {
        &self.layout
    }

    pub fn channels(&self) -> &[Collapse] {
        &self.channels
    }

    pub fn is_empty(&self) -> bool {
        self.channels.iter().all(|c| c.rate == 0.0)
    }
}

/// Precomputed Lindblad generator
/// `ρ̇ = A ρ + ρ A† + Σ L ρ L†` with `A = −i(H − ½ Σ L†L)` and `L = √γ o`.
#[derive(Clone, Debug)]
pub struct LindbladGenerator {
    n: usize,
    a: CsrMatrix,
    jumps: Vec<CsrMatrix>,
}

impl LindbladGenerator {
    pub fn new(h: &QOperator, collapses: &CollapseSet) -> Result<Self> {
        if h.layout() != collapses.layout() {
            return Err(Error::LayoutMismatch(format!(
                "Hamiltonian on {} but collapses on {}",
                h.layout(),
                collapses.layout()
            )));
        }
        let n = h.dim();
        let mut heff = h.sparse().into_owned();
        let mut jumps = Vec::new();
        for ch in collapses.channels() {
            if ch.rate == 0.0 {
                continue;
            }
            let l = ch.op.sparse().scale(C64::new(ch.rate.sqrt(), 0.0));
            let ldl = l.adjoint().matmul(&l);
            heff = heff.axpby(C64::new(1.0, 0.0), &ldl, C64::new(0.0, -0.5));
            jumps.push(l);
        }
        let a = heff.scale(C64::new(0.0, -1.0));
        Ok(Self { n, a, jumps })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn has_jumps(&self) -> bool {
        !self.jumps.is_empty()
    }

    /// `out = L(ρ)` for Hermitian `ρ`; the output is Hermitian by
    /// construction.
    pub fn apply_hermitian(&self, rho: &[C64], out: &mut [C64], scratch: &mut [C64]) {
        let n = self.n;
        scratch.fill(C64::new(0.0, 0.0));
        self.a.left_mul_dense_acc(rho, n, scratch);
        for i in 0..n {
            for j in i..n {
                let v = scratch[i * n + j] + scratch[j * n + i].conj();
                out[i * n + j] = v;
                out[j * n + i] = v.conj();
            }
        }
        for l in &self.jumps {
            scratch.fill(C64::new(0.0, 0.0));
            l.left_mul_dense_acc(rho, n, scratch);
            l.right_mul_adjoint_dense_acc(scratch, n, out);
        }
    }

    /// `out = L(X)` for an arbitrary square `X`.
    pub fn apply_general(&self, x: &[C64], out: &mut [C64], scratch: &mut [C64]) {
        let n = self.n;
        out.fill(C64::new(0.0, 0.0));
        self.a.left_mul_dense_acc(x, n, out);
        self.a.right_mul_adjoint_dense_acc(x, n, out);
        for l in &self.jumps {
            scratch.fill(C64::new(0.0, 0.0));
            l.left_mul_dense_acc(x, n, scratch);
            l.right_mul_adjoint_dense_acc(scratch, n, out);
        }
    }

    /// `out = −i H_eff ψ`; only meaningful without jumps.
    pub fn apply_vector(&self, psi: &[C64], out: &mut [C64]) {
        out.fill(C64::new(0.0, 0.0));
        self.a.mul_vec_acc(C64::new(1.0, 0.0), psi, out);
    }

    /// Triplets of the Liouvillian acting on row-major `vec(ρ)`, where
    /// `ρ_ij` sits at `i·n + j`.
    pub fn superoperator_triplets(&self) -> Vec<(usize, usize, C64)> {
        let n = self.n;
        let mut t = Vec::new();
        for (i, k, v) in self.a.triplets() {
            for j in 0..n {
                t.push((i * n + j, k * n + j, v));
            }
        }
        for (j, k, v) in self.a.triplets() {
            let w = v.conj();
            for i in 0..n {
                t.push((i * n + j, i * n + k, w));
            }
        }
        for l in &self.jumps {
            let trip: Vec<_> = l.triplets().collect();
            for &(i, k, v) in &trip {
                for &(j, m, w) in &trip {
                    t.push((i * n + j, k * n + m, v * w.conj()));
                }
            }
        }
        t
    }
}

/// `dρ/dt` of the master equation for a Hermitian `ρ`.
pub fn lindblad_rhs(h: &QOperator, collapses: &CollapseSet, rho: &QState) -> Result<DenseMatrix> {
    if rho.layout() != h.layout() {
        return Err(Error::LayoutMismatch(format!(
            "state on {} but Hamiltonian on {}",
            rho.layout(),
            h.layout()
        )));
    }
    let g = LindbladGenerator::new(h, collapses)?;
    let n = g.dim();
    let r = match rho.data() {
        StateData::Density(m) => m.clone(),
        StateData::Vector(v) => DenseMatrix::outer(v, v),
    };
    let mut out = vec![C64::new(0.0, 0.0); n * n];
    let mut scratch = vec![C64::new(0.0, 0.0); n * n];
    g.apply_general(r.as_slice(), &mut out, &mut scratch);
    DenseMatrix::from_row_major(n, n, out)
}
