// Copyright 2026 Qhit Contributors
// SPDX-License-Identifier: Apache-2.0

//! Shared fixtures: printed reference matrices and seeded random inputs.

#![allow(dead_code)]

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use qhit_core::channel::KrausChannel;
use qhit_core::linalg::{c, from_real_rows, ComplexMatrix, ComplexVector};
use qhit_core::Tolerances;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

pub fn scaled(rows: &[&[f64]], s: f64) -> ComplexMatrix {
    from_real_rows(rows).scale(s)
}

/// Rows with entries `a + b√3`, given as pairs.
pub fn sqrt3_rows(rows: &[[(f64, f64); 8]], s: f64) -> ComplexMatrix {
    let r3 = 3f64.sqrt();
    ComplexMatrix::from_fn(rows.len(), 8, |i, j| {
        let (a, b) = rows[i][j];
        c(s * (a + b * r3), 0.0)
    })
}

pub fn complex_gaussian(rng: &mut ChaCha8Rng) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    c(re, im)
}

pub fn ginibre(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

/// Gaussian Kraus operators normalized by `(Σ G*G)^{-1/2}`.
pub fn random_channel(rng: &mut ChaCha8Rng, n: usize, rank: usize) -> KrausChannel {
    let gs: Vec<ComplexMatrix> = (0..rank).map(|_| ginibre(rng, n, n)).collect();
    let h = gs.iter().fold(ComplexMatrix::zeros(n, n), |acc, g| acc + g.adjoint() * g);
    let eig = SymmetricEigen::new(h);
    let inv_sqrt = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| c(1.0 / l.sqrt(), 0.0)));
    let w = &eig.eigenvectors * inv_sqrt * eig.eigenvectors.adjoint();
    let kraus = gs.into_iter().map(|g| g * &w).collect();
    KrausChannel::checked(kraus, &Tolerances::default()).expect("normalized Kraus set")
}

pub fn random_unit_vector(rng: &mut ChaCha8Rng, n: usize) -> ComplexVector {
    let v = ComplexVector::from_fn(n, |_, _| complex_gaussian(rng));
    let nrm = v.norm();
    v / c(nrm, 0.0)
}

pub fn random_density(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
    let g = ginibre(rng, n, n);
    let m = &g * g.adjoint();
    let tr = m.trace();
    m / tr
}

/// Column-stochastic matrix with entries bounded away from zero.
pub fn random_stochastic(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
    let mut p = DMatrix::from_fn(n, n, |_, _| rng.random_range(0.05..1.0));
    for j in 0..n {
        let s: f64 = p.column(j).sum();
        p.column_mut(j).scale_mut(1.0 / s);
    }
    p
}

/// Mean time to reach `target` from every state, by the absorbing-chain
/// solve `(I − P̃) m = 1` on the remaining states. `p` is column stochastic.
pub fn absorbing_hitting_times(p: &DMatrix<f64>, target: usize) -> Vec<f64> {
    let n = p.nrows();
    let others: Vec<usize> = (0..n).filter(|&l| l != target).collect();
    let m = others.len();
    // Row-stochastic transition probabilities P(a -> b) = p[(b, a)].
    let a = DMatrix::from_fn(m, m, |r, s| {
        let delta = if r == s { 1.0 } else { 0.0 };
        delta - p[(others[s], others[r])]
    });
    let sol = a.lu().solve(&nalgebra::DVector::from_element(m, 1.0)).expect("transient block invertible");
    let mut out = vec![0.0; n];
    for (r, &l) in others.iter().enumerate() {
        out[l] = sol[r];
    }
    out
}

pub fn k_section_shear() -> ComplexMatrix {
    scaled(
        &[
            &[39.0, -12.0, -12.0, 9.0],
            &[-72.0, 32.0, 28.0, -12.0],
            &[-72.0, 28.0, 32.0, -12.0],
            &[177.0, -72.0, -72.0, 39.0],
        ],
        1.0 / 6.0,
    )
}

pub fn shear_t() -> ComplexMatrix {
    scaled(&[&[2.0, 1.0, 1.0, 1.0], &[-1.0, 2.0, 0.0, 1.0], &[-1.0, 0.0, 2.0, 1.0], &[1.0, -1.0, -1.0, 2.0]], 1.0 / 3.0)
}

pub fn shear_phi() -> ComplexMatrix {
    scaled(
        &[
            &[3.0, 6.0, 6.0, 3.0, 3.0, 6.0, 6.0, 3.0],
            &[1.0, 6.0, -2.0, 5.0, 1.0, 6.0, -2.0, 5.0],
            &[1.0, -2.0, 6.0, 5.0, 1.0, -2.0, 6.0, 5.0],
            &[-1.0, -2.0, -2.0, 7.0, -1.0, -2.0, -2.0, 7.0],
            &[5.0, -2.0, -2.0, 1.0, 5.0, -2.0, -2.0, 1.0],
            &[-5.0, 2.0, 2.0, -1.0, -5.0, 2.0, 2.0, -1.0],
            &[-5.0, 2.0, 2.0, -1.0, -5.0, 2.0, 2.0, -1.0],
            &[5.0, -2.0, -2.0, 1.0, 5.0, -2.0, -2.0, 1.0],
        ],
        1.0 / 12.0,
    )
}

pub fn shear_pi() -> ComplexVector {
    ComplexVector::from_iterator(8, [1.0, 1.0, 1.0, 1.0, 1.0, -1.0, -1.0, 1.0].iter().map(|&x| c(x / 4.0, 0.0)))
}

pub fn shear_d() -> ComplexMatrix {
    scaled(
        &[
            &[-51.0, 24.0, 24.0, -9.0, 0.0, 0.0, 0.0, 0.0],
            &[18.0, -4.0, -8.0, 6.0, 0.0, 0.0, 0.0, 0.0],
            &[18.0, -8.0, -4.0, 6.0, 0.0, 0.0, 0.0, 0.0],
            &[87.0, -36.0, -36.0, 21.0, 0.0, 0.0, 0.0, 0.0],
            &[0.0, 0.0, 0.0, 0.0, 3.0, 0.0, 0.0, 9.0],
            &[0.0, 0.0, 0.0, 0.0, -3.0, 0.0, 0.0, -9.0],
            &[0.0, 0.0, 0.0, 0.0, -3.0, 0.0, 0.0, -9.0],
            &[0.0, 0.0, 0.0, 0.0, 3.0, 0.0, 0.0, 9.0],
        ],
        1.0 / 6.0,
    )
}

pub fn shear_g() -> ComplexMatrix {
    scaled(
        &[
            &[5.0, 2.0, 2.0, 5.0, 1.0, 2.0, 2.0, 5.0],
            &[1.0, 8.0, -4.0, 3.0, 1.0, 4.0, -4.0, 3.0],
            &[1.0, -4.0, 8.0, 3.0, 1.0, -4.0, 4.0, 3.0],
            &[1.0, -2.0, -2.0, 5.0, 1.0, -2.0, -2.0, 1.0],
            &[1.0, 0.0, 0.0, -1.0, 5.0, 0.0, 0.0, -1.0],
            &[-1.0, 0.0, 0.0, 1.0, -1.0, 4.0, 0.0, 1.0],
            &[-1.0, 0.0, 0.0, 1.0, -1.0, 0.0, 4.0, 1.0],
            &[1.0, 0.0, 0.0, -1.0, 1.0, 0.0, 0.0, 3.0],
        ],
        0.25,
    )
}

pub fn shear_g_d() -> ComplexMatrix {
    scaled(
        &[
            &[5.0, 2.0, 2.0, 5.0, 0.0, 0.0, 0.0, 0.0],
            &[1.0, 8.0, -4.0, 3.0, 0.0, 0.0, 0.0, 0.0],
            &[1.0, -4.0, 8.0, 3.0, 0.0, 0.0, 0.0, 0.0],
            &[1.0, -2.0, -2.0, 5.0, 0.0, 0.0, 0.0, 0.0],
            &[0.0, 0.0, 0.0, 0.0, 5.0, 0.0, 0.0, -1.0],
            &[0.0, 0.0, 0.0, 0.0, -1.0, 4.0, 0.0, 1.0],
            &[0.0, 0.0, 0.0, 0.0, -1.0, 0.0, 4.0, 1.0],
            &[0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 3.0],
        ],
        0.25,
    )
}

pub fn rotation_k() -> ComplexMatrix {
    let r = 3f64.sqrt();
    from_real_rows(&[
        &[2.0, r, r, 4.0],
        &[-r, -3.0, -4.0, -4.0 * r],
        &[-r, -4.0, -3.0, -4.0 * r],
        &[4.0, 4.0 * r, 4.0 * r, 12.0],
    ])
}

/// The printed limit kernel for the rotation walk.
pub fn rotation_h0() -> ComplexMatrix {
    let z = [(0.0, 0.0); 8];
    sqrt3_rows(
        &[
            [(2.0, 0.0), (0.0, 1.0), (0.0, 1.0), (4.0, 0.0), (2.0, 0.0), (0.0, 1.0), (0.0, 1.0), (4.0, 0.0)],
            [(0.0, -1.0), (-3.0, 0.0), (-4.0, 0.0), (0.0, -4.0), (0.0, -1.0), (-3.0, 0.0), (-4.0, 0.0), (0.0, -4.0)],
            [(0.0, -1.0), (-4.0, 0.0), (-3.0, 0.0), (0.0, -4.0), (0.0, -1.0), (-4.0, 0.0), (-3.0, 0.0), (0.0, -4.0)],
            z,
            z,
            z,
            z,
            [(1.0, 0.0), (0.0, -0.5), (0.0, -0.5), (2.0, 0.0), (1.0, 0.0), (0.0, -0.5), (0.0, -0.5), (2.0, 0.0)],
        ],
        1.0,
    )
}

/// The printed group inverse for the rotation walk.
pub fn rotation_a0_sharp() -> ComplexMatrix {
    let unit = |k: usize| {
        let mut row = [(0.0, 0.0); 8];
        row[k] = (4.0, 0.0);
        row
    };
    sqrt3_rows(
        &[
            [(1.0, 0.0), (0.0, -1.0), (0.0, -1.0), (-1.0, 0.0), (-3.0, 0.0), (0.0, -1.0), (0.0, -1.0), (-1.0, 0.0)],
            [(0.0, 1.0), (1.0, 0.0), (1.0, 0.0), (0.0, -1.0), (0.0, 1.0), (-3.0, 0.0), (1.0, 0.0), (0.0, -1.0)],
            [(0.0, 1.0), (1.0, 0.0), (1.0, 0.0), (0.0, -1.0), (0.0, 1.0), (1.0, 0.0), (-3.0, 0.0), (0.0, -1.0)],
            unit(3),
            unit(4),
            unit(5),
            unit(6),
            [(-1.0, 0.0), (0.0, 1.0), (0.0, 1.0), (-3.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, 1.0), (1.0, 0.0)],
        ],
        0.25,
    )
}

pub fn hadamard_a_sharp() -> ComplexMatrix {
    scaled(
        &[
            &[1.0, -1.0, -1.0, -1.0, -7.0, -1.0, -1.0, -1.0],
            &[-1.0, 3.0, -1.0, 1.0, -1.0, -5.0, -1.0, 1.0],
            &[-1.0, -1.0, 3.0, 1.0, -1.0, -1.0, -5.0, 1.0],
            &[0.0, 0.0, 0.0, 8.0, 0.0, 0.0, 0.0, 0.0],
            &[0.0, 0.0, 0.0, 0.0, 8.0, 0.0, 0.0, 0.0],
            &[0.0, 0.0, 0.0, 0.0, 0.0, 8.0, 0.0, 0.0],
            &[0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 8.0, 0.0],
            &[-1.0, 1.0, 1.0, -7.0, -1.0, 1.0, 1.0, 1.0],
        ],
        0.125,
    )
}

pub fn hadamard_kernel() -> ComplexMatrix {
    let z = [0.0; 8];
    let rows: [[f64; 8]; 8] = [
        [2.0, -1.0, -1.0, 2.0, 2.0, -1.0, -1.0, 2.0],
        [-1.0, 1.0, 2.0, -2.0, -1.0, 1.0, 2.0, -2.0],
        [-1.0, 2.0, 1.0, -2.0, -1.0, 2.0, 1.0, -2.0],
        z,
        z,
        z,
        z,
        [2.0, -2.0, -2.0, 2.0, 2.0, -2.0, -2.0, 2.0],
    ];
    let refs: Vec<&[f64]> = rows.iter().map(|r| r.as_slice()).collect();
    from_real_rows(&refs)
}

/// The four printed 8×8 blocks of `K` for the coined walk.
pub fn coined_walk_k() -> ComplexMatrix {
    let b1: [[f64; 8]; 8] = [
        [4., -3., -1., 2., -3., 4., 1., -2.],
        [-1., 1., -1., -5., 1., -1., 2., 6.],
        [-3., 3., 1., -2., 4., -4., -1., 2.],
        [2., -2., -5., 8., -2., 2., 6., -9.],
        [-1., 1., 6., -3., 1., -1., -6., 3.],
        [6., -6., -2., 4., -6., 6., 2., -4.],
        [1., -1., -6., 3., -1., 1., 6., -3.],
        [-3., 3., 4., -13., 3., -3., -4., 13.],
    ];
    let b2: [[f64; 8]; 8] = [
        [-1., 1., 6., -3., 2., -2., -3., 10.],
        [6., -6., -2., 4., -3., 3., 8., -12.],
        [1., -1., -6., 3., -2., 2., 3., -10.],
        [-3., 3., 4., -13., 10., -10., -12., 25.],
        [-1., 2., -2., 8., -5., 6., 4., -12.],
        [-2., 2., 10., -6., 4., -4., -6., 18.],
        [2., -2., 2., -8., 6., -6., -4., 12.],
        [8., -8., -6., 16., -12., 12., 18., -34.],
    ];
    let b3: [[f64; 8]; 8] = [
        [-3., 4., 1., -2., 3., -4., -1., 2.],
        [1., -1., 2., 6., -1., 1., -2., -6.],
        [4., -4., -1., 2., -4., 4., 1., -2.],
        [-2., 2., 6., -9., 2., -2., -6., 9.],
        [2., -2., -3., 10., -2., 2., 3., -10.],
        [-3., 3., 8., -12., 3., -3., -8., 12.],
        [-2., 2., 3., -10., 2., -2., -3., 10.],
        [10., -10., -12., 25., -10., 10., 12., -25.],
    ];
    let b4: [[f64; 8]; 8] = [
        [1., -1., -6., 3., -2., 2., 3., -10.],
        [-6., 6., 2., -4., 3., -3., -8., 12.],
        [-1., 1., 6., -3., 2., -2., -3., 10.],
        [3., -3., -4., 13., -10., 10., 12., -25.],
        [-5., 6., 4., -12., 8., -9., -13., 25.],
        [4., -4., -6., 18., -13., 13., 16., -34.],
        [6., -6., -4., 12., -9., 9., 13., -25.],
        [-12., 12., 18., -34., 25., -25., -34., 72.],
    ];
    ComplexMatrix::from_fn(16, 16, |i, j| {
        let b = match (i / 8, j / 8) {
            (0, 0) => &b1,
            (0, 1) => &b2,
            (1, 0) => &b3,
            _ => &b4,
        };
        c(b[i % 8][j % 8], 0.0)
    })
}
