// Copyright 2026 Qhit Contributors
// SPDX-License-Identifier: Apache-2.0

//! Row-stacking vec calculus and matrix representations of maps on M_n.
//!
//! With rows stacked, `vec(A X Bᵀ) = (A ⊗ B) vec(X)`, so the map
//! `X ↦ V X V*` is represented by `V ⊗ conj(V)`.

use num_complex::Complex64;

use crate::error::{QhitError, Result};
use crate::linalg::{identity, ComplexMatrix, ComplexVector};

/// Stack the rows of `x` into one column.
pub fn vec(x: &ComplexMatrix) -> ComplexVector {
    let (r, c) = x.shape();
    ComplexVector::from_fn(r * c, |k, _| x[(k / c, k % c)])
}

/// Inverse of [`vec`].
pub fn unvec(v: &ComplexVector, rows: usize, cols: usize) -> Result<ComplexMatrix> {
    if v.len() != rows * cols {
        return Err(QhitError::Dimension(format!("cannot unvec length {} into {rows}x{cols}", v.len())));
    }
    Ok(ComplexMatrix::from_fn(rows, cols, |i, j| v[i * cols + j]))
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

/// `vec(I_n)`.
pub fn vec_identity(n: usize) -> ComplexVector {
    vec(&identity(n))
}

/// Matrix representation ⌈T⌉ of a linear map on n×n matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct SuperOp {
    dim: usize,
    mat: ComplexMatrix,
}

impl SuperOp {
    pub fn new(dim: usize, mat: ComplexMatrix) -> Result<Self> {
        let d2 = dim * dim;
        if mat.shape() != (d2, d2) {
            return Err(QhitError::Dimension(format!(
                "superoperator on {dim}x{dim} matrices must be {d2}x{d2}, got {}x{}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        Ok(Self { dim, mat })
    }

    pub fn identity(dim: usize) -> Self {
        Self { dim, mat: identity(dim * dim) }
    }

    /// The map `X ↦ A X B*`.
    pub fn sandwich(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<Self> {
        if !a.is_square() || a.shape() != b.shape() {
            return Err(QhitError::Dimension("sandwich factors must be equal square matrices".into()));
        }
        Self::new(a.nrows(), kron(a, &b.map(|z| z.conj())))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn mat(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn into_mat(self) -> ComplexMatrix {
        self.mat
    }

    pub fn apply(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        if x.shape() != (self.dim, self.dim) {
            return Err(QhitError::Dimension(format!(
                "map acts on {0}x{0} matrices, got {1}x{2}",
                self.dim,
                x.nrows(),
                x.ncols()
            )));
        }
        unvec(&(&self.mat * vec(x)), self.dim, self.dim)
    }

    /// `self ∘ other`, i.e. apply `other` first.
    pub fn compose(&self, other: &SuperOp) -> Result<SuperOp> {
        self.check_dim(other)?;
        Ok(Self { dim: self.dim, mat: &self.mat * &other.mat })
    }

    pub fn add(&self, other: &SuperOp) -> Result<SuperOp> {
        self.check_dim(other)?;
        Ok(Self { dim: self.dim, mat: &self.mat + &other.mat })
    }

    pub fn sub(&self, other: &SuperOp) -> Result<SuperOp> {
        self.check_dim(other)?;
        Ok(Self { dim: self.dim, mat: &self.mat - &other.mat })
    }

    pub fn scale(&self, s: Complex64) -> SuperOp {
        Self { dim: self.dim, mat: self.mat.map(|z| z * s) }
    }

    pub fn power(&self, e: u64) -> SuperOp {
        Self { dim: self.dim, mat: crate::linalg::matrix_power(&self.mat, e) }
    }

    fn check_dim(&self, other: &SuperOp) -> Result<()> {
        if self.dim != other.dim {
            return Err(QhitError::Dimension(format!("superoperators on dimensions {} and {}", self.dim, other.dim)));
        }
        Ok(())
    }
}
