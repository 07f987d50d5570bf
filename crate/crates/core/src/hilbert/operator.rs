// Copyright 2026 The emech Authors
// SPDX-License-Identifier: Apache-2.0

use std::borrow::Cow;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64 as C64;

use super::dense::DenseMatrix;
use super::layout::ModeLayout;
use super::sparse::CsrMatrix;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum Storage {
    Sparse(CsrMatrix),
    Dense(DenseMatrix),
}

/// Operator on the composite space of a [`ModeLayout`].
///
/// Arithmetic through the `std::ops` traits panics on layout mismatch; the
/// result is sparse only when both operands are.
#[derive(Clone, Debug, PartialEq)]
pub struct QOperator {
    layout: ModeLayout,
    storage: Storage,
}

/// Annihilation operator of a single `dim`-level mode.
pub fn ladder(dim: usize) -> CsrMatrix {
    CsrMatrix::from_triplets(
        dim,
        dim,
        (1..dim).map(|n| (n - 1, n, C64::new((n as f64).sqrt(), 0.0))),
    )
}

impl QOperator {
    pub fn from_sparse(layout: ModeLayout, m: CsrMatrix) -> Result<Self> {
        check_shape(&layout, m.shape())?;
        Ok(Self {
            layout,
            storage: Storage::Sparse(m),
        })
    }

    pub fn from_dense(layout: ModeLayout, m: DenseMatrix) -> Result<Self> {
        check_shape(&layout, m.shape())?;
        Ok(Self {
            layout,
            storage: Storage::Dense(m),
        })
    }

    pub fn identity(layout: &ModeLayout) -> Self {
        Self {
            storage: Storage::Sparse(CsrMatrix::identity(layout.total())),
            layout: layout.clone(),
        }
    }

    pub fn zero(layout: &ModeLayout) -> Self {
        let n = layout.total();
        Self {
            storage: Storage::Sparse(CsrMatrix::zeros(n, n)),
            layout: layout.clone(),
        }
    }

    /// Embeds a single-mode matrix as `I ⊗ … ⊗ local ⊗ … ⊗ I`.
    pub fn embed(layout: &ModeLayout, mode: usize, local: &CsrMatrix) -> Result<Self> {
        layout.check_mode(mode)?;
        if local.shape() != (layout.dim(mode), layout.dim(mode)) {
            return Err(Error::LayoutMismatch(format!(
                "local operator {:?} for mode of dim {}",
                local.shape(),
                layout.dim(mode)
            )));
        }
        let before: usize = layout.dims()[..mode].iter().product();
        let after: usize = layout.dims()[mode + 1..].iter().product();
        let m = CsrMatrix::identity(before)
            .kron(local)
            .kron(&CsrMatrix::identity(after));
        Self::from_sparse(layout.clone(), m)
    }

    pub fn lowering(layout: &ModeLayout, mode: usize) -> Result<Self> {
        layout.check_mode(mode)?;
        Self::embed(layout, mode, &ladder(layout.dim(mode)))
    }

    pub fn raising(layout: &ModeLayout, mode: usize) -> Result<Self> {
        layout.check_mode(mode)?;
        Self::embed(layout, mode, &ladder(layout.dim(mode)).adjoint())
    }

    pub fn number(layout: &ModeLayout, mode: usize) -> Result<Self> {
        layout.check_mode(mode)?;
        let d = layout.dim(mode);
        let diag: Vec<C64> = (0..d).map(|n| C64::new(n as f64, 0.0)).collect();
        Self::embed(layout, mode, &CsrMatrix::diagonal(&diag))
    }

    /// Projector onto level `level` of one mode.
    pub fn level_projector(layout: &ModeLayout, mode: usize, level: usize) -> Result<Self> {
        layout.check_mode(mode)?;
        let d = layout.dim(mode);
        if level >= d {
            return Err(Error::Occupation {
                label: layout.labels()[mode].clone(),
                occupation: level,
                dim: d,
            });
        }
        let m = CsrMatrix::from_triplets(d, d, [(level, level, C64::new(1.0, 0.0))]);
        Self::embed(layout, mode, &m)
    }

    /// Diagonal operator `f(occupations)` over the composite basis.
    pub fn diagonal_fn(layout: &ModeLayout, f: impl Fn(&[usize]) -> C64) -> Self {
        let diag: Vec<C64> = (0..layout.total())
            .map(|i| f(&layout.occupations(i)))
            .collect();
        Self {
            storage: Storage::Sparse(CsrMatrix::diagonal(&diag)),
            layout: layout.clone(),
        }
    }

    pub fn layout(&self) -> &ModeLayout {
        &self.layout
    }

    pub fn storage(&self) -> &Storage {
        &self.storage
    }

    pub fn dim(&self) -> usize {
        self.layout.total()
    }

    pub fn is_sparse(&self) -> bool {
        matches!(self.storage, Storage::Sparse(_))
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        match &self.storage {
            Storage::Sparse(m) => m.get(i, j),
            Storage::Dense(m) => m[(i, j)],
        }
    }

    pub fn to_dense(&self) -> DenseMatrix {
        match &self.storage {
            Storage::Sparse(m) => m.to_dense(),
            Storage::Dense(m) => m.clone(),
        }
    }

    pub fn sparse(&self) -> Cow<'_, CsrMatrix> {
        match &self.storage {
            Storage::Sparse(m) => Cow::Borrowed(m),
            Storage::Dense(m) => Cow::Owned(CsrMatrix::from_dense(m)),
        }
    }

    pub fn into_dense(self) -> Self {
        let m = self.to_dense();
        Self {
            layout: self.layout,
            storage: Storage::Dense(m),
        }
    }

    pub fn into_sparse(self) -> Self {
        let m = self.sparse().into_owned();
        Self {
            layout: self.layout,
            storage: Storage::Sparse(m),
        }
    }

    pub fn adjoint(&self) -> Self {
        let storage = match &self.storage {
            Storage::Sparse(m) => Storage::Sparse(m.adjoint()),
            Storage::Dense(m) => Storage::Dense(m.adjoint()),
        };
        Self {
            layout: self.layout.clone(),
            storage,
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        let storage = match &self.storage {
            Storage::Sparse(m) => Storage::Sparse(m.scale(s)),
            Storage::Dense(m) => Storage::Dense(m.scale(s)),
        };
        Self {
            layout: self.layout.clone(),
            storage,
        }
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.combine(other, C64::new(1.0, 0.0))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.combine(other, C64::new(-1.0, 0.0))
    }

    fn combine(&self, other: &Self, b: C64) -> Result<Self> {
        self.same_layout(other)?;
        let storage = match (&self.storage, &other.storage) {
            (Storage::Sparse(x), Storage::Sparse(y)) => {
                Storage::Sparse(x.axpby(C64::new(1.0, 0.0), y, b))
            }
            _ => Storage::Dense(self.to_dense().add(&other.to_dense().scale(b))),
        };
        Ok(Self {
            layout: self.layout.clone(),
            storage,
        })
    }

    pub fn try_matmul(&self, other: &Self) -> Result<Self> {
        self.same_layout(other)?;
        let storage = match (&self.storage, &other.storage) {
            (Storage::Sparse(x), Storage::Sparse(y)) => Storage::Sparse(x.matmul(y)),
            _ => Storage::Dense(self.to_dense().matmul(&other.to_dense())),
        };
        Ok(Self {
            layout: self.layout.clone(),
            storage,
        })
    }

    /// `self ⊗ other` on the concatenated layout.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let layout = self.layout.tensor(&other.layout)?;
        let storage = match (&self.storage, &other.storage) {
            (Storage::Sparse(x), Storage::Sparse(y)) => Storage::Sparse(x.kron(y)),
            _ => Storage::Dense(self.to_dense().kron(&other.to_dense())),
        };
        Ok(Self { layout, storage })
    }

    pub fn apply(&self, psi: &[C64]) -> Vec<C64> {
        match &self.storage {
            Storage::Sparse(m) => m.mul_vec(psi),
            Storage::Dense(m) => m.mul_vec(psi),
        }
    }

    pub fn hermiticity_error(&self) -> f64 {
        match &self.storage {
            Storage::Sparse(m) => m.hermiticity_error(),
            Storage::Dense(m) => m.hermiticity_error(),
        }
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_error() <= tol * self.max_abs().max(1.0)
    }

    pub fn max_abs(&self) -> f64 {
        match &self.storage {
            Storage::Sparse(m) => m.max_abs(),
            Storage::Dense(m) => m.max_abs(),
        }
    }

    pub fn trace(&self) -> C64 {
        match &self.storage {
            Storage::Sparse(m) => m.trace(),
            Storage::Dense(m) => m.trace(),
        }
    }

    /// Eigenvalues of a Hermitian operator, nondecreasing.
    pub fn eigvalsh(&self) -> Result<Vec<f64>> {
        self.to_dense().eigvalsh()
    }

    /// `exp(-i·self·t)` for Hermitian `self`, as a dense operator.
    pub fn propagator(&self, t: f64) -> Result<Self> {
        let u = self.to_dense().unitary_propagator(t)?;
        Self::from_dense(self.layout.clone(), u)
    }

    pub fn unitarity_error(&self) -> f64 {
        self.to_dense().unitarity_error()
    }

    pub(crate) fn same_layout(&self, other: &Self) -> Result<()> {
        if self.layout != other.layout {
            return Err(Error::LayoutMismatch(format!(
                "{} vs {}",
                self.layout, other.layout
            )));
        }
        Ok(())
    }
}

fn check_shape(layout: &ModeLayout, shape: (usize, usize)) -> Result<()> {
    let n = layout.total();
    if shape != (n, n) {
        return Err(Error::LayoutMismatch(format!(
            "matrix {}x{} for layout {layout} of dimension {n}",
            shape.0, shape.1
        )));
    }
    Ok(())
}

impl Add for &QOperator {
    type Output = QOperator;
    fn add(self, rhs: &QOperator) -> QOperator {
        self.try_add(rhs).expect("operator sum")
    }
}

impl Add for QOperator {
    type Output = QOperator;
    fn add(self, rhs: QOperator) -> QOperator {
        &self + &rhs
    }
}

impl Sub for &QOperator {
    type Output = QOperator;
    fn sub(self, rhs: &QOperator) -> QOperator {
        self.try_sub(rhs).expect("operator difference")
    }
}

impl Sub for QOperator {
    type Output = QOperator;
    fn sub(self, rhs: QOperator) -> QOperator {
        &self - &rhs
    }
}

impl Mul for &QOperator {
    type Output = QOperator;
    fn mul(self, rhs: &QOperator) -> QOperator {
        self.try_matmul(rhs).expect("operator product")
    }
}

impl Mul for QOperator {
    type Output = QOperator;
    fn mul(self, rhs: QOperator) -> QOperator {
        &self * &rhs
    }
}

impl Mul<&QOperator> for f64 {
    type Output = QOperator;
    fn mul(self, rhs: &QOperator) -> QOperator {
        rhs.scale_re(self)
    }
}

impl Mul<QOperator> for f64 {
    type Output = QOperator;
    fn mul(self, rhs: QOperator) -> QOperator {
        rhs.scale_re(self)
    }
}

impl Mul<&QOperator> for C64 {
    type Output = QOperator;
    fn mul(self, rhs: &QOperator) -> QOperator {
        rhs.scale(self)
    }
}

impl Mul<QOperator> for C64 {
    type Output = QOperator;
    fn mul(self, rhs: QOperator) -> QOperator {
        rhs.scale(self)
    }
}

impl Neg for &QOperator {
    type Output = QOperator;
    fn neg(self) -> QOperator {
        self.scale_re(-1.0)
    }
}
