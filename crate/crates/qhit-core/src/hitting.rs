// Copyright 2026 Qhit Contributors
// SPDX-License-Identifier: Apache-2.0

//! Analytic hitting maps and the channel-level fundamental map.
//!
//! Under Assumption I the generating function is analytic at `z = 1`, giving
//! `H = T(I − ℚT)⁻¹` (hitting probabilities) and `K = T(I − ℚT)⁻²` (mean
//! hitting times). Blocks are taken against the split `I = (I − ℚ) + ℚ`.

use num_complex::Complex64;

use crate::channel::{assumption_one, diagnose, fixed_states, validate_density, GoalSubspace, Side};
use crate::error::{QhitError, Result};
use crate::linalg::{identity, inverse, max_abs_diff, outer, ComplexMatrix};
use crate::matrep::{vec, vec_identity, SuperOp};
use crate::Tolerances;

/// The four blocks of a map against `(I − ℚ) ⊕ ℚ`.
#[derive(Debug, Clone)]
pub struct Blocks {
    pub b11: ComplexMatrix,
    pub b12: ComplexMatrix,
    pub b21: ComplexMatrix,
    pub b22: ComplexMatrix,
}

impl Blocks {
    pub fn split(m: &ComplexMatrix, qq: &ComplexMatrix) -> Self {
        let p = identity(qq.nrows()) - qq;
        Self { b11: &p * m * &p, b12: &p * m * qq, b21: qq * m * &p, b22: qq * m * qq }
    }
}

#[derive(Debug, Clone)]
pub struct HittingMaps {
    pub h: SuperOp,
    pub k: SuperOp,
    pub h_blocks: Blocks,
    pub k_blocks: Blocks,
}

pub fn analytic_hk(s: &SuperOp, v: &GoalSubspace, tol: &Tolerances) -> Result<HittingMaps> {
    let a1 = assumption_one(s, v, tol)?;
    if !a1.holds {
        return Err(QhitError::SpectralObstruction {
            context: "Assumption I fails: 1 is an eigenvalue of ℚT".into(),
            offending: a1.offending,
        });
    }
    let n2 = s.mat().nrows();
    let qq = v.qq().mat();
    let m = inverse(&(identity(n2) - qq * s.mat()), "I − ℚT")?;
    let h = s.mat() * &m;
    let k = &h * &m;
    Ok(HittingMaps {
        h_blocks: Blocks::split(&h, qq),
        k_blocks: Blocks::split(&k, qq),
        h: SuperOp::new(s.dim(), h)?,
        k: SuperOp::new(s.dim(), k)?,
    })
}

/// Real part of `Tr(unvec(M vec ρ))`, checking that the imaginary part is roundoff.
pub(crate) fn traced_action(m: &ComplexMatrix, rho: &ComplexMatrix) -> Result<f64> {
    let n = rho.nrows();
    let t: Complex64 = vec_identity(n).dotc(&(m * vec(rho)));
    if t.im.abs() > 1e-9 {
        return Err(QhitError::Numerical(format!("trace has imaginary part {:.3e}", t.im)));
    }
    Ok(t.re)
}

/// `Tr(K_11 ρ)` for `ρ` in `V`, `Tr(K_12 ρ)` for `ρ` in `V⊥`.
pub fn tau_from_k(
    maps: &HittingMaps,
    rho: &ComplexMatrix,
    v: &GoalSubspace,
    side: Side,
    tol: &Tolerances,
) -> Result<f64> {
    validate_density(rho, tol)?;
    if !v.supports(rho, side, tol.entry) {
        return Err(QhitError::Validation(format!("state is not supported on the {side:?} side")));
    }
    let block = match side {
        Side::InV => &maps.k_blocks.b11,
        Side::InComplement => &maps.k_blocks.b12,
    };
    let tau = traced_action(block, rho)?;
    if tau < 1.0 - 1e-9 {
        return Err(QhitError::Numerical(format!("mean hitting time {tau} is below one step")));
    }
    Ok(tau)
}

/// `Z = (I − T + |vec π⟩⟨vec I|)⁻¹` for an irreducible channel.
#[derive(Debug, Clone)]
pub struct FundamentalMap {
    pub z: SuperOp,
    pub pi: ComplexMatrix,
}

impl FundamentalMap {
    /// `max|(I − T) Z (I − T) − (I − T)|`.
    pub fn g_inverse_residual(&self, s: &SuperOp) -> f64 {
        let a = identity(s.mat().nrows()) - s.mat();
        max_abs_diff(&(&a * self.z.mat() * &a), &a)
    }
}

pub fn fundamental_map(s: &SuperOp, tol: &Tolerances) -> Result<FundamentalMap> {
    let d = diagnose(s, tol);
    if !d.is_irreducible {
        return Err(QhitError::Reducible(format!(
            "fixed space dimension {}, faithful fixed state: {}",
            d.fixed_space_dim,
            d.fixed_density_min_eig.is_some_and(|m| m > tol.faithful)
        )));
    }
    let pi = fixed_states(s)?.swap_remove(0);
    let n = s.dim();
    let omega = outer(&vec(&pi), &vec_identity(n));
    let z = inverse(&(identity(n * n) - s.mat() + omega), "I − T + Ω")?;
    Ok(FundamentalMap { z: SuperOp::new(n, z)?, pi })
}

/// `Tr(K_11 (Z_11 ρ_ψ − Z_12 ρ_φ))` with `ψ` in `V` and `φ` in `V⊥`.
pub fn mhtf_tau(
    v: &GoalSubspace,
    z: &FundamentalMap,
    maps: &HittingMaps,
    rho_psi: &ComplexMatrix,
    rho_phi: &ComplexMatrix,
    tol: &Tolerances,
) -> Result<f64> {
    validate_density(rho_psi, tol)?;
    validate_density(rho_phi, tol)?;
    if !v.supports(rho_psi, Side::InV, tol.entry) {
        return Err(QhitError::Validation("ψ must lie in V".into()));
    }
    if !v.supports(rho_phi, Side::InComplement, tol.entry) {
        return Err(QhitError::Validation("φ must lie in V⊥".into()));
    }
    let zb = Blocks::split(z.z.mat(), v.qq().mat());
    let n = rho_psi.nrows();
    let inner = &zb.b11 * vec(rho_psi) - &zb.b12 * vec(rho_phi);
    let t = vec_identity(n).dotc(&(&maps.k_blocks.b11 * inner));
    if t.im.abs() > 1e-9 {
        return Err(QhitError::Numerical(format!("trace has imaginary part {:.3e}", t.im)));
    }
    Ok(t.re)
}
