// Copyright 2026 Qhit Contributors
// SPDX-License-Identifier: Apache-2.0

//! Hitting times of quantum channels.
//!
//! Three routes to the mean time for a channel to first reach a goal
//! subspace `V`:
//!
//! - the monitored first-visit series ([`monitor`]),
//! - the analytic hitting-time map `K = T(I − ℚT)⁻²` ([`hitting`]),
//! - KSMH kernels on the induced two-site quantum Markov chain, built from a
//!   g-inverse or from the group inverse of `I − Φ` ([`ksmh`], [`ginverse`]).
//!
//! Routes are registered by name in [`methods::MethodRegistry`].

pub mod catalog;
pub mod channel;
pub mod error;
pub mod ginverse;
pub mod hitting;
pub mod ksmh;
pub mod linalg;
pub mod matrep;
pub mod methods;
pub mod monitor;
pub mod qmc;

pub use error::{QhitError, Result};
pub use linalg::{ComplexMatrix, ComplexVector};
pub use matrep::SuperOp;

/// Numerical thresholds shared across modules.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Absolute entrywise tolerance for equalities such as trace preservation.
    pub entry: f64,
    /// Distance from 1 below which an eigenvalue counts as 1.
    pub eig_one: f64,
    /// Hermitian matrices with smallest eigenvalue `≥ −psd` count as positive.
    pub psd: f64,
    /// A fixed density is faithful when its smallest eigenvalue exceeds this.
    pub faithful: f64,
    /// Relative singular-value threshold for ranks.
    pub rank_rel: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { entry: 1e-10, eig_one: 1e-9, psd: 1e-10, faithful: 1e-9, rank_rel: 1e-10 }
    }
}
