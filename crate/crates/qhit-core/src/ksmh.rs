// Copyright 2026 Qhit Contributors
// SPDX-License-Identifier: Apache-2.0

//! KSMH kernels for quantum Markov chains.
//!
//! For each target site `i` the hitting-time operator is
//! `K⁽ⁱ⁾ = Φ(I − ℚ_iΦ)⁻²`; `D` collects the diagonal blocks `K⁽ⁱ⁾_ii`. Given a
//! g-inverse `G` of `I − Φ`, block `(i, j)` of `D(I − G + G_d E)` (or of its
//! Ω-corrected form) traced against a density at site `j` is the mean time to
//! reach site `i`. With `G = A^♯` this needs only `K⁽ⁱ⁾` to exist, not
//! irreducibility.

use num_complex::Complex64;

use crate::channel::validate_density;
use crate::channel::{randomize, GoalSubspace};
use crate::error::{QhitError, Result};
use crate::ginverse::{self, hunter_ginverse, HunterParams};
use crate::hitting::traced_action;
use crate::linalg::{self, frobenius, identity, inverse, max_abs_diff, zeros, ComplexMatrix};
use crate::matrep::SuperOp;
use crate::qmc::{block_constant_e, Qmc};
use crate::Tolerances;

/// How `K⁽ⁱ⁾` was obtained for a site.
#[derive(Debug, Clone, PartialEq)]
pub enum SiteAvailability {
    /// `I − ℚ_iΦ` is invertible.
    Exact,
    /// 1 is an eigenvalue of `ℚ_iΦ`; the group inverse of `I − ℚ_iΦ`
    /// replaces the inverse.
    Extended { near_one: Vec<Complex64> },
    /// Neither construction applies.
    Unavailable { near_one: Vec<Complex64>, reason: String },
}

impl SiteAvailability {
    pub fn is_available(&self) -> bool {
        !matches!(self, SiteAvailability::Unavailable { .. })
    }
}

#[derive(Debug, Clone)]
pub struct QmcHittingOperators {
    n_sites: usize,
    k2: usize,
    per_site: Vec<Option<ComplexMatrix>>,
    pub availability: Vec<Option<SiteAvailability>>,
    d: ComplexMatrix,
}

impl QmcHittingOperators {
    /// `K⁽ⁱ⁾` for target site `i`.
    pub fn k_map(&self, i: usize) -> Option<&ComplexMatrix> {
        self.per_site.get(i).and_then(Option::as_ref)
    }

    /// Block `K_ij`: mean time operator from site `j` to site `i`.
    pub fn k_block(&self, i: usize, j: usize) -> Option<ComplexMatrix> {
        let k2 = self.k2;
        self.k_map(i).map(|k| k.view((i * k2, j * k2), (k2, k2)).into_owned())
    }

    /// Block diagonal `diag(K_11, …, K_nn)`, zero where unavailable.
    pub fn d(&self) -> &ComplexMatrix {
        &self.d
    }

    pub fn site_exact(&self, i: usize) -> bool {
        matches!(self.availability.get(i), Some(Some(SiteAvailability::Exact)))
    }

    /// Grid whose block row `i` is block row `i` of `K⁽ⁱ⁾`.
    pub fn k_grid(&self) -> Result<ComplexMatrix> {
        let k2 = self.k2;
        let order = self.n_sites * k2;
        let mut grid = zeros(order, order);
        for i in 0..self.n_sites {
            let k = self
                .k_map(i)
                .ok_or_else(|| QhitError::Numerical(format!("hitting operator for site {i} is unavailable")))?;
            grid.view_mut((i * k2, 0), (k2, order)).copy_from(&k.view((i * k2, 0), (k2, order)));
        }
        Ok(grid)
    }
}

pub fn qmc_hitting_operators(q: &Qmc, targets: &[usize], tol: &Tolerances) -> Result<QmcHittingOperators> {
    let n = q.n_sites();
    let k2 = q.block_size();
    let order = q.order();
    let phi = q.rep();
    let mut per_site = vec![None; n];
    let mut availability = vec![None; n];
    let mut d = zeros(order, order);
    for &i in targets {
        if i >= n {
            return Err(QhitError::Dimension(format!("target site {i} outside {n} sites")));
        }
        let m = identity(order) - q.site_complement(i) * phi;
        let near_one: Vec<Complex64> = linalg::eigenvalues(&(identity(order) - &m))?
            .into_iter()
            .filter(|l| (l - Complex64::ONE).norm() < tol.eig_one)
            .collect();
        let (k, avail) = if near_one.is_empty() {
            let inv = inverse(&m, "I − ℚ_iΦ")?;
            (Some(phi * &inv * &inv), SiteAvailability::Exact)
        } else {
            match ginverse::group_inverse(&m) {
                Ok(gi) => {
                    log::info!("site {i}: 1 ∈ spec(ℚ_iΦ), using the group inverse of I − ℚ_iΦ");
                    (Some(phi * gi.asharp() * gi.asharp()), SiteAvailability::Extended { near_one })
                }
                Err(e) => (None, SiteAvailability::Unavailable { near_one, reason: e.to_string() }),
            }
        };
        if let Some(k) = &k {
            d.view_mut((i * k2, i * k2), (k2, k2)).copy_from(&k.view((i * k2, i * k2), (k2, k2)));
        }
        per_site[i] = k;
        availability[i] = Some(avail);
    }
    Ok(QmcHittingOperators { n_sites: n, k2, per_site, availability, d })
}

/// All sites as targets.
pub fn all_hitting_operators(q: &Qmc, tol: &Tolerances) -> Result<QmcHittingOperators> {
    let targets: Vec<usize> = (0..q.n_sites()).collect();
    qmc_hitting_operators(q, &targets, tol)
}

/// Zero everything but the diagonal `k2 × k2` blocks.
pub fn diag_blocks(m: &ComplexMatrix, n_sites: usize, k2: usize) -> Result<ComplexMatrix> {
    let order = n_sites * k2;
    if m.shape() != (order, order) {
        return Err(QhitError::Dimension(format!(
            "expected order {order} for {n_sites} blocks of size {k2}, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    let mut out = zeros(order, order);
    for i in 0..n_sites {
        out.view_mut((i * k2, i * k2), (k2, k2)).copy_from(&m.view((i * k2, i * k2), (k2, k2)));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelVariant {
    /// `D(ΩG − (ΩG)_d E + I − G + G_d E)`, valid for every g-inverse.
    General,
    /// `D(I − G + G_d E)`, for `G` of the form `(I − Φ + |t⟩⟨e_I|)⁻¹ + |g⟩⟨e_I|`.
    Hunter,
    /// `D(I − A^♯ + A^♯_d E)`.
    Group,
}

impl KernelVariant {
    pub fn name(self) -> &'static str {
        match self {
            KernelVariant::General => "general",
            KernelVariant::Hunter => "hunter",
            KernelVariant::Group => "group",
        }
    }
}

#[derive(Debug, Clone)]
pub struct KsmhKernel {
    pub kernel: ComplexMatrix,
    pub variant: KernelVariant,
    n_sites: usize,
    k2: usize,
}

impl KsmhKernel {
    pub fn block(&self, i: usize, j: usize) -> ComplexMatrix {
        let k2 = self.k2;
        self.kernel.view((i * k2, j * k2), (k2, k2)).into_owned()
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }
}

pub fn ksmh_kernel(
    d: &ComplexMatrix,
    g: &ComplexMatrix,
    variant: KernelVariant,
    omega: Option<&ComplexMatrix>,
    n_sites: usize,
    k2: usize,
) -> Result<KsmhKernel> {
    let order = n_sites * k2;
    if d.shape() != (order, order) || g.shape() != (order, order) {
        return Err(QhitError::Dimension("D and G must match the QMC order".into()));
    }
    let e = block_constant_e(n_sites, k2);
    let mut inner = identity(order) - g + diag_blocks(g, n_sites, k2)? * &e;
    if variant == KernelVariant::General {
        let omega = omega.ok_or_else(|| QhitError::Parameter("the general kernel needs the fixed map".into()))?;
        let og = omega * g;
        inner += &og - diag_blocks(&og, n_sites, k2)? * &e;
    }
    Ok(KsmhKernel { kernel: d * inner, variant, n_sites, k2 })
}

/// `Tr([kernel]_ij ρ_j)`.
pub fn tau_irreducible_qmc(
    kernel: &KsmhKernel,
    i: usize,
    j: usize,
    rho_j: &ComplexMatrix,
    tol: &Tolerances,
) -> Result<f64> {
    if i >= kernel.n_sites || j >= kernel.n_sites {
        return Err(QhitError::Dimension(format!("sites ({i}, {j}) outside {} sites", kernel.n_sites)));
    }
    if rho_j.nrows() * rho_j.nrows() != kernel.k2 {
        return Err(QhitError::Dimension("state does not fit the site dimension".into()));
    }
    validate_density(rho_j, tol)?;
    traced_action(&kernel.block(i, j), rho_j)
}

/// `L = K − (K − D)Φ`.
pub fn first_step_operator_l(q: &Qmc, ops: &QmcHittingOperators) -> Result<ComplexMatrix> {
    let k = ops.k_grid()?;
    Ok(&k - (&k - ops.d()) * q.rep())
}

/// One row of a kernel limit study.
#[derive(Debug, Clone)]
pub struct LimitRow {
    pub p: f64,
    pub g_norm: f64,
    pub kernel: ComplexMatrix,
    pub tau: f64,
}

#[derive(Debug, Clone)]
pub struct LimitStudy {
    /// Rows in decreasing `p`.
    pub rows: Vec<LimitRow>,
    pub h0_extrapolated: ComplexMatrix,
    pub tau0_extrapolated: f64,
    /// Group-inverse kernel at `p = 0`, or why it could not be formed.
    pub h0_direct: std::result::Result<ComplexMatrix, String>,
    pub tau0_direct: Option<f64>,
    /// `‖G_p‖_F` increases as `p` decreases.
    pub g_diverges: bool,
    /// Successive kernel differences shrink towards small `p`.
    pub h_converges: bool,
}

/// Parameters `t`, `f` of `G = (I − Φ + |t⟩⟨e_I|)⁻¹ + |f⟩⟨e_I|`.
#[derive(Debug, Clone)]
pub struct LimitGauge {
    pub t: linalg::ComplexVector,
    pub f: linalg::ComplexVector,
}

/// Kernels of the randomized channels `p T + (1 − p) M'` as `p → 0`,
/// compared with the group-inverse kernel of `M'` itself.
pub fn kernel_limit_study(
    t: &SuperOp,
    m_prime: &SuperOp,
    v: &GoalSubspace,
    p_values: &[f64],
    gauge: &LimitGauge,
    rho: &ComplexMatrix,
    tol: &Tolerances,
) -> Result<LimitStudy> {
    let mut ps: Vec<f64> = p_values.to_vec();
    ps.sort_by(|a, b| b.total_cmp(a));
    ps.dedup();
    if ps.len() < 3 || ps.iter().any(|&p| p <= 0.0 || p > 1.0) {
        return Err(QhitError::Parameter("need at least three distinct p in (0, 1]".into()));
    }
    let mut rows = Vec::with_capacity(ps.len());
    for &p in &ps {
        let s = randomize(t, m_prime, p)?;
        let q = Qmc::induce(&s, v)?;
        let ops = all_hitting_operators(&q, tol)?;
        let params = HunterParams::with_identity_functional(gauge.t.clone(), gauge.f.clone(), &q.e_identity());
        let g = hunter_ginverse(&q, params)?;
        let kernel = ksmh_kernel(ops.d(), &g.g, KernelVariant::Hunter, None, 2, q.block_size())?;
        let tau = tau_irreducible_qmc(&kernel, 0, 1, rho, tol)?;
        rows.push(LimitRow { p, g_norm: frobenius(&g.g), kernel: kernel.kernel, tau });
    }

    let tail = &rows[rows.len() - 3..];
    let xs: Vec<f64> = tail.iter().map(|r| r.p).collect();
    let ys: Vec<ComplexMatrix> = tail.iter().map(|r| r.kernel.clone()).collect();
    let h0 = ginverse::extrapolate_to_zero(&xs, &ys);
    let k2 = v.ambient_dim() * v.ambient_dim();
    let h0_kernel = KsmhKernel { kernel: h0.clone(), variant: KernelVariant::Hunter, n_sites: 2, k2 };
    let tau0_extrapolated = tau_irreducible_qmc(&h0_kernel, 0, 1, rho, tol)?;

    let direct = group_kernel(m_prime, v, tol);
    let tau0_direct = direct
        .as_ref()
        .ok()
        .map(|k| {
            let kk = KsmhKernel { kernel: k.clone(), variant: KernelVariant::Group, n_sites: 2, k2 };
            tau_irreducible_qmc(&kk, 0, 1, rho, tol)
        })
        .transpose()?;

    let g_diverges = rows.windows(2).all(|w| w[1].g_norm > w[0].g_norm);
    let diffs: Vec<f64> = rows.windows(2).map(|w| max_abs_diff(&w[0].kernel, &w[1].kernel)).collect();
    let h_converges = diffs.len() < 2 || diffs[diffs.len() - 1] <= diffs[diffs.len() - 2];

    Ok(LimitStudy {
        rows,
        h0_extrapolated: h0,
        tau0_extrapolated,
        h0_direct: direct.map_err(|e| e.to_string()),
        tau0_direct,
        g_diverges,
        h_converges,
    })
}

/// `D(I − A^♯ + A^♯_d E)` for the QMC induced by `s` and `v`.
pub fn group_kernel(s: &SuperOp, v: &GoalSubspace, tol: &Tolerances) -> Result<ComplexMatrix> {
    let q = Qmc::induce(s, v)?;
    let ops = all_hitting_operators(&q, tol)?;
    let a = identity(q.order()) - q.rep();
    let gi = ginverse::group_inverse(&a)?;
    Ok(ksmh_kernel(ops.d(), gi.asharp(), KernelVariant::Group, None, 2, q.block_size())?.kernel)
}
