// Copyright 2026 The emech Authors
// SPDX-License-Identifier: Apache-2.0

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const TRANSMON: &str = "transmon";
pub const CAVITY: &str = "cavity";
pub const MECH: &str = "mech";

/// Ordered list of truncated bosonic modes. Composite indices are row-major
/// over this order, so the last mode varies fastest.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ModeLayout {
    dims: Vec<usize>,
    labels: Vec<String>,
}

impl ModeLayout {
    pub fn new<S: AsRef<str>>(dims: &[usize], labels: &[S]) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::Layout("layout needs at least one mode".into()));
        }
        if dims.len() != labels.len() {
            return Err(Error::Layout(format!(
                "{} dims but {} labels",
                dims.len(),
                labels.len()
            )));
        }
        if let Some(d) = dims.iter().find(|&&d| d < 2) {
            return Err(Error::Layout(format!("mode dimension {d} < 2")));
        }
        let labels: Vec<String> = labels.iter().map(|s| s.as_ref().to_owned()).collect();
        for (i, l) in labels.iter().enumerate() {
            if l.is_empty() {
                return Err(Error::Layout("empty mode label".into()));
            }
            if labels[..i].contains(l) {
                return Err(Error::Layout(format!("duplicate mode label '{l}'")));
            }
        }
        dims.iter()
            .try_fold(1usize, |acc, &d| acc.checked_mul(d))
            .ok_or_else(|| Error::Layout("total dimension overflows".into()))?;
        Ok(Self {
            dims: dims.to_vec(),
            labels,
        })
    }

    /// The (transmon, cavity, mech) layout used throughout the protocols.
    pub fn standard(transmon: usize, cavity: usize, mech: usize) -> Result<Self> {
        Self::new(&[transmon, cavity, mech], &[TRANSMON, CAVITY, MECH])
    }

    pub fn single(dim: usize, label: &str) -> Result<Self> {
        Self::new(&[dim], &[label])
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn num_modes(&self) -> usize {
        self.dims.len()
    }

    pub fn total(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn dim(&self, mode: usize) -> usize {
        self.dims[mode]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn require(&self, label: &str) -> Result<usize> {
        self.index_of(label)
            .ok_or_else(|| Error::Layout(format!("layout has no '{label}' mode")))
    }

    pub(crate) fn check_mode(&self, mode: usize) -> Result<()> {
        if mode >= self.num_modes() {
            return Err(Error::ModeIndex {
                index: mode,
                modes: self.num_modes(),
            });
        }
        Ok(())
    }

    /// Row-major strides: `flat = sum(occ[k] * stride[k])`.
    pub fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.dims.len()];
        for k in (0..self.dims.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * self.dims[k + 1];
        }
        strides
    }

    pub fn flat_index(&self, occupations: &[usize]) -> Result<usize> {
        if occupations.len() != self.dims.len() {
            return Err(Error::Layout(format!(
                "{} occupations for {} modes",
                occupations.len(),
                self.dims.len()
            )));
        }
        let mut idx = 0;
        for (k, (&n, &d)) in occupations.iter().zip(&self.dims).enumerate() {
            if n >= d {
                return Err(Error::Occupation {
                    label: self.labels[k].clone(),
                    occupation: n,
                    dim: d,
                });
            }
            idx = idx * d + n;
        }
        Ok(idx)
    }

    pub fn occupations(&self, mut flat: usize) -> Vec<usize> {
        let mut occ = vec![0; self.dims.len()];
        for k in (0..self.dims.len()).rev() {
            occ[k] = flat % self.dims[k];
            flat /= self.dims[k];
        }
        occ
    }

    /// Layout restricted to the given modes, kept in their original order.
    pub fn subset(&self, modes: &[usize]) -> Result<Self> {
        let mut sorted = modes.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.is_empty() {
            return Err(Error::Layout("empty mode subset".into()));
        }
        for &m in &sorted {
            self.check_mode(m)?;
        }
        let dims: Vec<usize> = sorted.iter().map(|&m| self.dims[m]).collect();
        let labels: Vec<&str> = sorted.iter().map(|&m| self.labels[m].as_str()).collect();
        Self::new(&dims, &labels)
    }

    /// Concatenation `self ⊗ other`.
    pub fn tensor(&self, other: &ModeLayout) -> Result<Self> {
        let dims: Vec<usize> = self.dims.iter().chain(&other.dims).copied().collect();
        let labels: Vec<&str> = self
            .labels
            .iter()
            .chain(&other.labels)
            .map(String::as_str)
            .collect();
        Self::new(&dims, &labels)
    }

    /// Same layout with one mode inserted at `position`.
    pub fn with_mode_inserted(&self, position: usize, dim: usize, label: &str) -> Result<Self> {
        if position > self.num_modes() {
            return Err(Error::ModeIndex {
                index: position,
                modes: self.num_modes(),
            });
        }
        let mut dims = self.dims.clone();
        let mut labels: Vec<&str> = self.labels.iter().map(String::as_str).collect();
        dims.insert(position, dim);
        labels.insert(position, label);
        Self::new(&dims, &labels)
    }

    pub fn relabeled<S: AsRef<str>>(&self, labels: &[S]) -> Result<Self> {
        Self::new(&self.dims, labels)
    }
}

impl std::fmt::Display for ModeLayout {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self
            .labels
            .iter()
            .zip(&self.dims)
            .map(|(l, d)| format!("{l}:{d}"))
            .collect();
        write!(f, "({})", parts.join(", "))
    }
}
