// Copyright 2026 Qhit Contributors
// SPDX-License-Identifier: Apache-2.0

//! Dense complex linear algebra on top of nalgebra.
//!
//! Everything here works on [`ComplexMatrix`], a plain `DMatrix<Complex64>`.
//! Factorizations come from nalgebra; this module adds the pieces it lacks:
//! rank decisions, kernel bases, and reordering of a complex Schur form.

use nalgebra::{DMatrix, DVector, Schur, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{QhitError, Result};

pub type ComplexMatrix = DMatrix<Complex64>;
pub type ComplexVector = DVector<Complex64>;

/// Condition estimates above this are reported when inverting.
pub const COND_WARN: f64 = 1e10;
/// Condition estimates above this are treated as singular.
pub const COND_FAIL: f64 = 1e15;

const SCHUR_EPS: f64 = 1e-15;
const SCHUR_MAX_ITER: usize = 100_000;

#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[inline]
pub fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

pub fn identity(n: usize) -> ComplexMatrix {
    ComplexMatrix::identity(n, n)
}

pub fn zeros(rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::zeros(rows, cols)
}

/// Build a matrix from real row-major rows.
pub fn from_real_rows(rows: &[&[f64]]) -> ComplexMatrix {
    let r = rows.len();
    let cols = rows.first().map_or(0, |row| row.len());
    assert!(rows.iter().all(|row| row.len() == cols), "ragged rows");
    ComplexMatrix::from_fn(r, cols, |i, j| re(rows[i][j]))
}

/// Build a matrix from complex row-major rows.
pub fn from_complex_rows(rows: &[Vec<Complex64>]) -> Result<ComplexMatrix> {
    let r = rows.len();
    let cols = rows.first().map_or(0, |row| row.len());
    if let Some(bad) = rows.iter().position(|row| row.len() != cols) {
        return Err(QhitError::Dimension(format!("row {bad} has {} entries, expected {cols}", rows[bad].len())));
    }
    Ok(ComplexMatrix::from_fn(r, cols, |i, j| rows[i][j]))
}

pub fn is_finite(m: &ComplexMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

pub fn max_abs(m: &ComplexMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn max_abs_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape(), "shape mismatch in comparison");
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn frobenius(m: &ComplexMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Induced 1-norm (max column sum).
pub fn norm_one(m: &ComplexMatrix) -> f64 {
    (0..m.ncols()).map(|j| m.column(j).iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max)
}

pub fn trace(m: &ComplexMatrix) -> Complex64 {
    m.diagonal().iter().sum()
}

pub fn hermitize(m: &ComplexMatrix) -> ComplexMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// |a⟩⟨b| with the conjugate on `b`.
pub fn outer(a: &ComplexVector, b: &ComplexVector) -> ComplexMatrix {
    a * b.adjoint()
}

/// Inverse by partial-pivoting LU, with a 1-norm condition estimate.
pub fn inverse(m: &ComplexMatrix, context: &str) -> Result<ComplexMatrix> {
    if !m.is_square() {
        return Err(QhitError::Dimension(format!("{context}: inverse of non-square matrix")));
    }
    let inv =
        m.clone().lu().try_inverse().ok_or_else(|| QhitError::Numerical(format!("{context}: matrix is singular")))?;
    if !is_finite(&inv) {
        return Err(QhitError::Numerical(format!("{context}: inverse is not finite")));
    }
    let cond = norm_one(m) * norm_one(&inv);
    if cond > COND_FAIL {
        return Err(QhitError::Numerical(format!(
            "{context}: matrix is numerically singular (condition estimate {cond:.3e})"
        )));
    }
    if cond > COND_WARN {
        log::warn!("{context}: condition estimate {cond:.3e}");
    }
    Ok(inv)
}

/// Singular values in descending order.
pub fn singular_values(m: &ComplexMatrix) -> Vec<f64> {
    let mut sv: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Outcome of a thresholded rank decision.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankDecision {
    pub rank: usize,
    /// Some singular value sits within a factor 10 of the threshold.
    pub ambiguous: bool,
}

/// Rank with singular values below `rel * σ_max` counted as zero.
pub fn rank(m: &ComplexMatrix, rel: f64) -> RankDecision {
    let sv = singular_values(m);
    let smax = sv.first().copied().unwrap_or(0.0);
    if smax == 0.0 {
        return RankDecision { rank: 0, ambiguous: false };
    }
    let thr = rel * smax;
    let rank = sv.iter().filter(|&&s| s > thr).count();
    let ambiguous = sv.iter().any(|&s| s > thr / 10.0 && s < thr * 10.0);
    RankDecision { rank, ambiguous }
}

/// Orthonormal basis of the numerical kernel of a square matrix.
pub fn null_space(m: &ComplexMatrix, abs_tol: f64) -> Vec<ComplexVector> {
    let svd = m.clone().svd(false, true);
    let v_t = svd.v_t.expect("v_t requested");
    svd.singular_values.iter().enumerate().filter(|(_, &s)| s < abs_tol).map(|(i, _)| v_t.row(i).adjoint()).collect()
}

/// Eigenvalues of a general square matrix, from its complex Schur form.
pub fn eigenvalues(m: &ComplexMatrix) -> Result<Vec<Complex64>> {
    let (_, t) = schur(m)?;
    Ok(t.diagonal().iter().copied().collect())
}

pub fn spectral_radius(m: &ComplexMatrix) -> Result<f64> {
    Ok(eigenvalues(m)?.iter().map(|z| z.norm()).fold(0.0, f64::max))
}

/// Eigenvalues of the Hermitian part, ascending.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Vec<f64> {
    let mut ev: Vec<f64> = SymmetricEigen::new(hermitize(m)).eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    ev
}

/// Complex Schur decomposition `m = Z T Z*` with `T` upper triangular.
pub fn schur(m: &ComplexMatrix) -> Result<(ComplexMatrix, ComplexMatrix)> {
    if !m.is_square() {
        return Err(QhitError::Dimension("Schur form of non-square matrix".into()));
    }
    let s = Schur::try_new(m.clone(), SCHUR_EPS, SCHUR_MAX_ITER)
        .ok_or_else(|| QhitError::Numerical("Schur iteration did not converge".into()))?;
    let (z, mut t) = s.unpack();
    // Clear the roundoff below the diagonal so later solves see a true triangle.
    for j in 0..t.ncols() {
        for i in j + 1..t.nrows() {
            t[(i, j)] = Complex64::ZERO;
        }
    }
    Ok((z, t))
}

/// Reorder a complex Schur form so the diagonal entries selected by `lead`
/// come first. Adjacent swaps by Givens rotations keep `Z T Z*` invariant.
/// Returns how many entries were selected.
pub fn reorder_schur(z: &mut ComplexMatrix, t: &mut ComplexMatrix, lead: impl Fn(Complex64) -> bool) -> usize {
    let n = t.nrows();
    let mut placed = 0;
    for k in 0..n {
        if !lead(t[(k, k)]) {
            continue;
        }
        let mut pos = k;
        while pos > placed {
            swap_adjacent(z, t, pos - 1);
            pos -= 1;
        }
        placed += 1;
    }
    placed
}

/// Swap diagonal entries k and k+1 of an upper triangular `t`.
fn swap_adjacent(z: &mut ComplexMatrix, t: &mut ComplexMatrix, k: usize) {
    let a = t[(k, k)];
    let b = t[(k, k + 1)];
    let cc = t[(k + 1, k + 1)];
    let (x1, x2) = (b, cc - a);
    let nrm = (x1.norm_sqr() + x2.norm_sqr()).sqrt();
    if nrm == 0.0 {
        return;
    }
    // First column is the eigenvector of the 2x2 block for eigenvalue `cc`.
    let (g11, g21) = (x1 / nrm, x2 / nrm);
    let (g12, g22) = (-g21.conj(), g11.conj());
    let n = t.nrows();
    // T <- G* T on rows k, k+1.
    for j in 0..n {
        let (u, v) = (t[(k, j)], t[(k + 1, j)]);
        t[(k, j)] = g11.conj() * u + g21.conj() * v;
        t[(k + 1, j)] = g12.conj() * u + g22.conj() * v;
    }
    // T <- T G and Z <- Z G on columns k, k+1.
    for i in 0..n {
        let (u, v) = (t[(i, k)], t[(i, k + 1)]);
        t[(i, k)] = u * g11 + v * g21;
        t[(i, k + 1)] = u * g12 + v * g22;
        let (u, v) = (z[(i, k)], z[(i, k + 1)]);
        z[(i, k)] = u * g11 + v * g21;
        z[(i, k + 1)] = u * g12 + v * g22;
    }
    t[(k + 1, k)] = Complex64::ZERO;
}

/// Matrix power by repeated squaring.
pub fn matrix_power(m: &ComplexMatrix, mut e: u64) -> ComplexMatrix {
    let mut result = identity(m.nrows());
    let mut base = m.clone();
    while e > 0 {
        if e & 1 == 1 {
            result = &result * &base;
        }
        e >>= 1;
        if e > 0 {
            base = &base * &base;
        }
    }
    result
}
