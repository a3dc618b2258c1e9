// Copyright 2026 Qhit Contributors
// SPDX-License-Identifier: Apache-2.0

//! Standard channels and states used by the worked examples and tests.

use num_complex::Complex64;

use crate::channel::{pure_state, GoalSubspace, KrausChannel};
use crate::error::{QhitError, Result};
use crate::linalg::{c, from_real_rows, identity, re, ComplexMatrix, ComplexVector};
use crate::Tolerances;

fn checked(kraus: Vec<ComplexMatrix>) -> KrausChannel {
    KrausChannel::checked(kraus, &Tolerances::default()).expect("catalog channels are trace preserving")
}

/// Two shear-like Kraus operators `(1/√3)[[1,1],[0,1]]` and `(1/√3)[[1,0],[−1,1]]`.
pub fn shear_pair() -> KrausChannel {
    let s = 1.0 / 3f64.sqrt();
    let a = from_real_rows(&[&[s, s], &[0.0, s]]);
    let b = from_real_rows(&[&[s, 0.0], &[-s, s]]);
    checked(vec![a, b])
}

/// Goal `span{(1, 1)/√2}` for [`shear_pair`].
pub fn shear_pair_goal() -> GoalSubspace {
    GoalSubspace::from_vectors(&[ComplexVector::from_vec(vec![re(1.0), re(1.0)])]).expect("nonzero")
}

/// Start state `(1, −1)/√2`, orthogonal to [`shear_pair_goal`].
pub fn shear_pair_start() -> ComplexMatrix {
    pure_state(&ComplexVector::from_vec(vec![re(1.0), re(-1.0)])).expect("nonzero")
}

pub fn hadamard_matrix() -> ComplexMatrix {
    let h = 1.0 / 2f64.sqrt();
    from_real_rows(&[&[h, h], &[h, -h]])
}

pub fn hadamard() -> KrausChannel {
    checked(vec![hadamard_matrix()])
}

/// `(α, √(1 − α²))` with `α = ½√(2 + √2)`, an eigenvector of the Hadamard
/// matrix. Taking its span as the goal puts 1 in the spectrum of `ℚ𝕌`.
pub fn hadamard_forbidden_state() -> ComplexVector {
    let a = 0.5 * (2.0 + 2f64.sqrt()).sqrt();
    ComplexVector::from_vec(vec![re(a), re((1.0 - a * a).sqrt())])
}

/// Rotation `[[cos θ, −sin θ], [sin θ, cos θ]]`.
pub fn rotation_matrix(theta: f64) -> ComplexMatrix {
    let (s, co) = theta.sin_cos();
    from_real_rows(&[&[co, -s], &[s, co]])
}

pub fn rotation(theta: f64) -> KrausChannel {
    checked(vec![rotation_matrix(theta)])
}

/// Pauli channel `√(1 − 3s/4) I` and `(√s/2) X, Y, Z`, for `s` in `[0, 4/3]`.
pub fn depolarizing(s: f64) -> Result<KrausChannel> {
    if !(0.0..=4.0 / 3.0).contains(&s) {
        return Err(QhitError::Parameter(format!("depolarizing parameter {s} outside [0, 4/3]")));
    }
    let w = s.sqrt() / 2.0;
    let x = from_real_rows(&[&[0.0, w], &[w, 0.0]]);
    let y = ComplexMatrix::from_row_slice(2, 2, &[re(0.0), c(0.0, -w), c(0.0, w), re(0.0)]);
    let z = from_real_rows(&[&[w, 0.0], &[0.0, -w]]);
    KrausChannel::checked(vec![identity(2).scale((1.0 - 0.75 * s).sqrt()), x, y, z], &Tolerances::default())
}

/// Coined walk on two vertices with a Hadamard coin, as a 4×4 unitary.
pub fn coined_walk_matrix() -> ComplexMatrix {
    let h = 1.0 / 2f64.sqrt();
    from_real_rows(&[&[h, h, 0.0, 0.0], &[0.0, 0.0, h, h], &[h, -h, 0.0, 0.0], &[0.0, 0.0, h, -h]])
}

pub fn coined_walk() -> KrausChannel {
    checked(vec![coined_walk_matrix()])
}

/// Diagonal embedding of a column-stochastic matrix: Kraus `√p_ij |i⟩⟨j|`.
pub fn stochastic_embedding(p: &nalgebra::DMatrix<f64>, tol: &Tolerances) -> Result<KrausChannel> {
    let n = p.nrows();
    if !p.is_square() {
        return Err(QhitError::Dimension("stochastic matrix must be square".into()));
    }
    if p.iter().any(|&x| !(0.0..=1.0 + tol.entry).contains(&x)) {
        return Err(QhitError::Validation("transition probabilities must lie in [0, 1]".into()));
    }
    let mut kraus = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if p[(i, j)] > 0.0 {
                let mut k = ComplexMatrix::zeros(n, n);
                k[(i, j)] = re(p[(i, j)].sqrt());
                kraus.push(k);
            }
        }
    }
    KrausChannel::checked(kraus, tol)
}

/// `|e_i⟩⟨e_i|` in dimension `n`.
pub fn basis_state(n: usize, i: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(n, n);
    m[(i, i)] = Complex64::ONE;
    m
}
