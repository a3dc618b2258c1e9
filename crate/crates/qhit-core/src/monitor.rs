// Copyright 2026 Qhit Contributors
// SPDX-License-Identifier: Apache-2.0

//! Brute-force first-visit series under monitoring.
//!
//! After each step the walker is measured against the goal; a miss projects
//! it back onto the complement. The first-visit probability at step `r` is
//! `π_r = Tr(ℙ T (ℚ T)^{r−1} ρ)` and `τ = Σ r π_r` when the hitting
//! probability is one.

use num_complex::Complex64;

use crate::channel::{validate_density, GoalSubspace};
use crate::error::{QhitError, Result};
use crate::linalg::{self, identity, inverse, ComplexMatrix, ComplexVector};
use crate::matrep::{vec, vec_identity, SuperOp};
use crate::qmc::{Qmc, VecState};
use crate::Tolerances;

/// Mean time that may be infinite when the goal is missed with positive probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MeanTime {
    Finite(f64),
    Infinite,
}

impl MeanTime {
    pub fn finite(self) -> Option<f64> {
        match self {
            MeanTime::Finite(t) => Some(t),
            MeanTime::Infinite => None,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct MonitorConfig {
    /// Increments `r π_r` below this count as negligible.
    pub increment_tol: f64,
    /// Consecutive negligible increments needed to stop.
    pub patience: usize,
    pub max_steps: usize,
    /// Hitting probability below `1 − gap` means the goal may be missed.
    pub divergence_gap: f64,
    /// How many leading terms to keep in the result.
    pub record_terms: usize,
}

impl Default for MonitorConfig {
    fn default() -> Self {
        Self { increment_tol: 1e-12, patience: 64, max_steps: 1_000_000, divergence_gap: 1e-6, record_terms: 4096 }
    }
}

#[derive(Debug, Clone)]
pub struct MonitorSeries {
    /// `(r, π_r)` for the first `record_terms` steps.
    pub terms: Vec<(usize, f64)>,
    pub cumulative_prob: f64,
    pub partial_tau: f64,
    pub truncated_at: usize,
    pub converged: bool,
    pub tau: MeanTime,
}

/// Imaginary parts of probabilities above this are reported.
const IMAG_WARN: f64 = 1e-9;

/// Generic series: `π_r = ⟨e| P Y⟩` with `Y = S X`, then `X ← Q Y`.
fn run_series(
    s: &ComplexMatrix,
    p: &ComplexMatrix,
    q: &ComplexMatrix,
    e: &ComplexVector,
    x0: ComplexVector,
    cfg: &MonitorConfig,
) -> MonitorSeries {
    let goal_functional = e.adjoint() * p;
    let mut x = x0;
    let mut terms = Vec::new();
    let mut cumulative = 0.0;
    let mut tau = 0.0;
    let mut quiet = 0;
    let mut r = 0;
    let mut converged = false;
    while r < cfg.max_steps {
        r += 1;
        let y = s * &x;
        let pr: Complex64 = (&goal_functional * &y)[(0, 0)];
        if pr.im.abs() > IMAG_WARN {
            log::warn!("step {r}: probability has imaginary part {:.3e}", pr.im);
        }
        let pr = pr.re;
        if terms.len() < cfg.record_terms {
            terms.push((r, pr));
        }
        cumulative += pr;
        tau += r as f64 * pr;
        if (r as f64 * pr).abs() < cfg.increment_tol {
            quiet += 1;
            if quiet >= cfg.patience {
                converged = true;
                break;
            }
        } else {
            quiet = 0;
        }
        x = q * y;
    }
    let tau_value = if cumulative < 1.0 - cfg.divergence_gap { MeanTime::Infinite } else { MeanTime::Finite(tau) };
    if !converged {
        log::warn!("monitoring series hit the step cap {} before converging", cfg.max_steps);
    }
    MonitorSeries { terms, cumulative_prob: cumulative, partial_tau: tau, truncated_at: r, converged, tau: tau_value }
}

fn check_inputs(s: &SuperOp, v: &GoalSubspace, rho: &ComplexMatrix, tol: &Tolerances) -> Result<()> {
    if s.dim() != v.ambient_dim() || rho.nrows() != s.dim() {
        return Err(QhitError::Dimension("channel, subspace and state dimensions differ".into()));
    }
    validate_density(rho, tol)
}

/// `Tr(ℙ Tʳ ρ)`, clamped to `[0, 1]`.
pub fn step_prob(s: &SuperOp, v: &GoalSubspace, rho: &ComplexMatrix, r: u64, tol: &Tolerances) -> Result<f64> {
    check_inputs(s, v, rho, tol)?;
    if r == 0 {
        return Err(QhitError::Parameter("step index starts at 1".into()));
    }
    let y = s.power(r).mat() * vec(rho);
    let e = vec_identity(s.dim());
    let p = e.dotc(&(v.pp().mat() * y));
    Ok(p.re.clamp(0.0, 1.0))
}

pub fn first_visit_series(
    s: &SuperOp,
    v: &GoalSubspace,
    rho: &ComplexMatrix,
    cfg: &MonitorConfig,
    tol: &Tolerances,
) -> Result<MonitorSeries> {
    check_inputs(s, v, rho, tol)?;
    let e = vec_identity(s.dim());
    Ok(run_series(s.mat(), v.pp().mat(), v.qq().mat(), &e, vec(rho), cfg))
}

/// First visit to `site` of a QMC started from `state`.
pub fn site_series(q: &Qmc, site: usize, state: &VecState, cfg: &MonitorConfig) -> Result<MonitorSeries> {
    if site >= q.n_sites() || state.data().len() != q.order() {
        return Err(QhitError::Dimension("site or state does not fit the QMC".into()));
    }
    Ok(run_series(
        q.rep(),
        &q.site_projector(site),
        &q.site_complement(site),
        &q.e_identity(),
        state.data().clone(),
        cfg,
    ))
}

/// `𝔾(z) = z T (I − z ℚ T)⁻¹`.
pub fn generating_function(s: &SuperOp, v: &GoalSubspace, z: Complex64, tol: &Tolerances) -> Result<SuperOp> {
    let n2 = s.mat().nrows();
    let qt = v.qq().mat() * s.mat();
    let zqt = &qt * z;
    let near: Vec<Complex64> =
        linalg::eigenvalues(&zqt)?.into_iter().filter(|l| (l - Complex64::ONE).norm() < tol.eig_one).collect();
    if !near.is_empty() {
        return Err(QhitError::SpectralObstruction {
            context: format!("I − zℚT is singular at z = {z}"),
            offending: near,
        });
    }
    let resolvent = inverse(&(identity(n2) - zqt), "resolvent of zℚT")?;
    SuperOp::new(s.dim(), s.mat() * resolvent * z)
}
