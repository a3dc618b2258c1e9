// Copyright 2026 Qhit Contributors
// SPDX-License-Identifier: Apache-2.0

//! Error type shared by every module.

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum QhitError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("validation failed: {0}")]
    Validation(String),

    /// 1 lies in the spectrum of a map that has to be inverted against it.
    #[error("spectral obstruction: {context}; eigenvalues near 1: [{}]", format_eigenvalues(offending))]
    SpectralObstruction { context: String, offending: Vec<Complex64> },

    #[error("channel is not irreducible: {0}")]
    Reducible(String),

    #[error("no group inverse: index {0} exceeds 1")]
    NoGroupInverse(usize),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

/// `a+bi` with 12 significant digits, comma separated.
pub fn format_eigenvalues(zs: &[Complex64]) -> String {
    let r = |x: f64| format!("{x:.11e}").parse::<f64>().unwrap_or(x);
    zs.iter()
        .map(|z| if z.im.abs() < 1e-13 { format!("{}", r(z.re)) } else { format!("{}{:+}i", r(z.re), r(z.im)) })
        .collect::<Vec<_>>()
        .join(", ")
}

pub type Result<T> = std::result::Result<T, QhitError>;
