// Copyright 2026 Qhit Contributors
// SPDX-License-Identifier: Apache-2.0

//! Generalized inverses of `A = I − Φ`.
//!
//! The group inverse is built from a complex Schur form reordered so the
//! zero eigenvalues lead: `A = Z [[0, T12], [0, T22]] Z*`. A triangular
//! Sylvester solve block-diagonalizes it, after which inverting `T22` alone
//! gives `A^♯`. The resolvent limit `(A² + zI)⁻¹A` at `z → 0` is kept as an
//! independent cross-check.

use num_complex::Complex64;

use crate::error::{QhitError, Result};
use crate::linalg::{
    self, identity, inverse, max_abs, max_abs_diff, norm_one, outer, rank, schur, zeros, ComplexMatrix, ComplexVector,
};
use crate::qmc::Qmc;

/// Relative singular-value threshold for rank decisions.
pub const RANK_REL: f64 = 1e-10;
/// Similarity conditioning above this is reported.
pub const HEALTH_WARN: f64 = 1e8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IndexResult {
    pub index: usize,
    /// A rank decision along the way was close to the threshold.
    pub ambiguous: bool,
}

/// Entries of the nilpotent block below this, relative to `max(1, max|A|)`,
/// count as zero.
pub const NILPOTENT_REL: f64 = 1e-9;

/// Eigenvalues this close to zero, relative to `max(1, max|A|)`, join the
/// zero cluster. A perturbed Jordan block of size `k` spreads its zero
/// eigenvalue to about `ε^{1/k}`.
pub const ZERO_CLUSTER_REL: f64 = 1e-7;

/// Schur form `A = Z T Z*` with the eigenvalues clustered at zero leading.
/// `nullity` counts the cluster, the algebraic multiplicity of zero.
struct KernelSplit {
    nullity: usize,
    z: ComplexMatrix,
    t: ComplexMatrix,
}

fn kernel_split(a: &ComplexMatrix, scale: f64) -> Result<KernelSplit> {
    let n = a.nrows();
    let geometric = n - rank(a, RANK_REL).rank;
    if geometric == 0 || geometric == n {
        return Ok(KernelSplit { nullity: geometric, z: identity(n), t: a.clone() });
    }
    let (mut z, mut t) = schur(a)?;
    let mut mods: Vec<f64> = t.diagonal().iter().map(|l| l.norm()).collect();
    mods.sort_by(|x, y| x.total_cmp(y));
    let cutoff = mods[geometric - 1].max(ZERO_CLUSTER_REL * scale);
    let m = mods.iter().filter(|&&x| x <= cutoff).count();
    if m == n {
        return Ok(KernelSplit { nullity: n, z, t });
    }
    // Split at the gap between the cluster and the rest.
    let split = 0.5 * (mods[m - 1] + mods[m]);
    let placed = linalg::reorder_schur(&mut z, &mut t, |l| l.norm() < split);
    if placed != m {
        return Err(QhitError::Numerical(format!("could not separate {m} zero eigenvalues (selected {placed})")));
    }
    Ok(KernelSplit { nullity: m, z, t })
}

/// Nilpotency index of the leading block, which is the index of `A`.
fn split_index(sp: &KernelSplit, scale: f64) -> IndexResult {
    let m = sp.nullity;
    if m == 0 {
        return IndexResult { index: 0, ambiguous: false };
    }
    let t11 = sp.t.view((0, 0), (m, m)).into_owned();
    let thr = NILPOTENT_REL * scale;
    let mut power = t11.clone();
    let mut ambiguous = false;
    for k in 1..=m {
        let size = max_abs(&power);
        ambiguous |= size > thr / 100.0 && size < thr * 100.0;
        if size <= thr {
            if ambiguous {
                log::warn!("index decision is close to the threshold");
            }
            return IndexResult { index: k, ambiguous };
        }
        power = &power * &t11;
    }
    IndexResult { index: m + 1, ambiguous: true }
}

/// Smallest `m ≥ 0` with `rank(Aᵐ) = rank(Aᵐ⁺¹)`, read off as the
/// nilpotency index of the zero-eigenvalue block of a reordered Schur form.
/// Rank tests on powers of `A` misjudge small nonzero eigenvalues.
pub fn index(a: &ComplexMatrix) -> Result<IndexResult> {
    if !a.is_square() {
        return Err(QhitError::Dimension("index of non-square matrix".into()));
    }
    let scale = max_abs(a).max(1.0);
    let sp = kernel_split(a, scale)?;
    let idx = split_index(&sp, scale);
    if idx.index > sp.nullity {
        return Err(QhitError::Numerical("an eigenvalue is too close to zero to classify".into()));
    }
    Ok(idx)
}

/// The group inverse `A^♯` together with its checks.
#[derive(Debug, Clone)]
pub struct GroupInverse {
    a: ComplexMatrix,
    asharp: ComplexMatrix,
    index: usize,
    nullity: usize,
    /// 1-norm condition of the block-diagonalizing similarity.
    pub similarity_condition: f64,
}

impl GroupInverse {
    pub fn a(&self) -> &ComplexMatrix {
        &self.a
    }

    pub fn asharp(&self) -> &ComplexMatrix {
        &self.asharp
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn nullity(&self) -> usize {
        self.nullity
    }

    /// `I − A^♯A`, the projector onto the kernel of `A` along its range.
    pub fn ergodic_projector(&self) -> ComplexMatrix {
        identity(self.a.nrows()) - &self.asharp * &self.a
    }

    /// Worst of the three group-inverse axioms, relative to `max|A|`.
    pub fn axiom_residual(&self) -> f64 {
        group_axiom_residual(&self.a, &self.asharp)
    }
}

/// Worst of `AXA − A`, `XAX − X`, `AX − XA`, divided by `max(1, max|A|)`.
pub fn group_axiom_residual(a: &ComplexMatrix, x: &ComplexMatrix) -> f64 {
    let axa = max_abs_diff(&(a * x * a), a);
    let xax = max_abs_diff(&(x * a * x), x);
    let comm = max_abs_diff(&(a * x), &(x * a));
    axa.max(xax).max(comm) / max_abs(a).max(1.0)
}

pub fn group_inverse(a: &ComplexMatrix) -> Result<GroupInverse> {
    if !a.is_square() {
        return Err(QhitError::Dimension("group inverse of non-square matrix".into()));
    }
    let scale = max_abs(a).max(1.0);
    let sp = kernel_split(a, scale)?;
    let idx = split_index(&sp, scale);
    if idx.index > sp.nullity {
        return Err(QhitError::Numerical("an eigenvalue is too close to zero to classify".into()));
    }
    if idx.index > 1 {
        return Err(QhitError::NoGroupInverse(idx.index));
    }
    let n = a.nrows();
    let m = sp.nullity;
    if m == 0 {
        let asharp = inverse(a, "group inverse of a nonsingular matrix")?;
        return Ok(GroupInverse { a: a.clone(), asharp, index: 0, nullity: 0, similarity_condition: 1.0 });
    }
    if m == n {
        return Ok(GroupInverse {
            a: a.clone(),
            asharp: zeros(n, n),
            index: idx.index,
            nullity: m,
            similarity_condition: 1.0,
        });
    }
    let KernelSplit { z, t, .. } = sp;

    let t11 = t.view((0, 0), (m, m)).into_owned();
    let t12 = t.view((0, m), (m, n - m)).into_owned();
    let t22 = t.view((m, m), (n - m, n - m)).into_owned();
    let y = solve_triangular_sylvester(&t11, &t22, &t12)?;
    let t22_inv = t22
        .solve_upper_triangular(&identity(n - m))
        .ok_or_else(|| QhitError::Numerical("nonzero eigenvalue block is singular".into()))?;

    let mut core = zeros(n, n);
    core.view_mut((0, m), (m, n - m)).copy_from(&(&y * &t22_inv));
    core.view_mut((m, m), (n - m, n - m)).copy_from(&t22_inv);
    let asharp = &z * core * z.adjoint();

    let ny = norm_one(&y);
    let similarity_condition = (1.0 + ny) * (1.0 + ny);
    if similarity_condition > HEALTH_WARN {
        log::warn!("kernel/range split is ill conditioned ({similarity_condition:.3e})");
    }
    if !linalg::is_finite(&asharp) {
        return Err(QhitError::Numerical("group inverse is not finite".into()));
    }
    Ok(GroupInverse { a: a.clone(), asharp, index: idx.index, nullity: m, similarity_condition })
}

/// Solve `T11 Y − Y T22 = −T12` for upper triangular `T11`, `T22` with
/// disjoint spectra, one column at a time.
fn solve_triangular_sylvester(t11: &ComplexMatrix, t22: &ComplexMatrix, t12: &ComplexMatrix) -> Result<ComplexMatrix> {
    let m = t11.nrows();
    let p = t22.nrows();
    let mut y = zeros(m, p);
    for j in 0..p {
        let mut rhs = -t12.column(j).into_owned();
        for l in 0..j {
            rhs += y.column(l) * t22[(l, j)];
        }
        let shifted = t11 - identity(m) * t22[(j, j)];
        let col = shifted
            .solve_upper_triangular(&rhs)
            .ok_or_else(|| QhitError::Numerical("Sylvester block is singular".into()))?;
        y.set_column(j, &col);
    }
    Ok(y)
}

/// Result of the resolvent-limit construction.
#[derive(Debug, Clone)]
pub struct DrazinLimit {
    pub value: ComplexMatrix,
    /// `(z, max|A X_z A − A|)` for each evaluated `z`.
    pub residuals: Vec<(f64, f64)>,
}

pub const DEFAULT_Z_SCHEDULE: [f64; 3] = [1e-4, 1e-5, 1e-6];

/// `lim_{z→0} (A² + zI)⁻¹ A`, extrapolated to `z = 0` from the schedule.
pub fn drazin_limit(a: &ComplexMatrix, z_schedule: &[f64]) -> Result<DrazinLimit> {
    if !a.is_square() {
        return Err(QhitError::Dimension("Drazin limit of non-square matrix".into()));
    }
    if z_schedule.is_empty() {
        return Err(QhitError::Parameter("empty z schedule".into()));
    }
    let n = a.nrows();
    let a2 = a * a;
    let mut samples = Vec::with_capacity(z_schedule.len());
    let mut residuals = Vec::with_capacity(z_schedule.len());
    for &z in z_schedule {
        let shifted = &a2 + identity(n) * Complex64::new(z, 0.0);
        let xz = shifted
            .clone()
            .lu()
            .solve(a)
            .ok_or_else(|| QhitError::Numerical(format!("A² + zI singular at z = {z:e}")))?;
        residuals.push((z, max_abs_diff(&(a * &xz * a), a)));
        samples.push(xz);
    }
    if residuals.windows(2).any(|w| w[1].1 > w[0].1 * (1.0 + 1e-6) + 1e-14) {
        return Err(QhitError::Numerical(format!(
            "resolvent limit is not converging: residuals {:?}",
            residuals.iter().map(|r| r.1).collect::<Vec<_>>()
        )));
    }
    let value = extrapolate_to_zero(z_schedule, &samples);
    Ok(DrazinLimit { value, residuals })
}

/// Neville evaluation at 0 of the entrywise interpolating polynomial.
pub fn extrapolate_to_zero(xs: &[f64], ys: &[ComplexMatrix]) -> ComplexMatrix {
    assert_eq!(xs.len(), ys.len());
    let mut p: Vec<ComplexMatrix> = ys.to_vec();
    let k = xs.len();
    for level in 1..k {
        for i in 0..k - level {
            let (xi, xj) = (xs[i], xs[i + level]);
            // P(0) = (x_j P_i − x_i P_{i+1}) / (x_j − x_i)
            p[i] =
                (&p[i] * Complex64::new(xj, 0.0) - &p[i + 1] * Complex64::new(xi, 0.0)) / Complex64::new(xj - xi, 0.0);
        }
    }
    p.swap_remove(0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GInverseKind {
    HunterFamily,
    Group,
    Fundamental,
    External,
}

/// Parameters of the family `(I − Φ + |t⟩⟨u|)⁻¹ + |π⟩⟨f| + |g⟩⟨e_I|`.
#[derive(Debug, Clone)]
pub struct HunterParams {
    pub t: ComplexVector,
    pub u: ComplexVector,
    pub f: ComplexVector,
    pub g: ComplexVector,
}

impl HunterParams {
    /// The special form `(I − Φ + |t⟩⟨e_I|)⁻¹ + |f⟩⟨e_I|`.
    pub fn with_identity_functional(t: ComplexVector, f: ComplexVector, e_i: &ComplexVector) -> Self {
        let n = e_i.len();
        Self { t, u: e_i.clone(), f: ComplexVector::zeros(n), g: f }
    }
}

/// A g-inverse of `A` with its provenance.
#[derive(Debug, Clone)]
pub struct GInverse {
    pub a: ComplexMatrix,
    pub g: ComplexMatrix,
    pub kind: GInverseKind,
    pub params: Option<HunterParams>,
}

impl GInverse {
    /// `max|AGA − A| / max(1, max|A|)`.
    pub fn residual(&self) -> f64 {
        max_abs_diff(&(&self.a * &self.g * &self.a), &self.a) / max_abs(&self.a).max(1.0)
    }
}

/// Tolerance on the defining identity `AGA = A`, relative to `max|A|`.
pub const GINVERSE_TOL: f64 = 1e-9;

/// Member of the Hunter family of g-inverses of `I − Φ` for a QMC with a
/// unique stationary density.
pub fn hunter_ginverse(q: &Qmc, params: HunterParams) -> Result<GInverse> {
    let n = q.rep().nrows();
    for (name, v) in [("t", &params.t), ("u", &params.u), ("f", &params.f), ("g", &params.g)] {
        if v.len() != n {
            return Err(QhitError::Dimension(format!("parameter {name} has length {}, expected {n}", v.len())));
        }
    }
    let pi = q.unique_stationary()?;
    let pi = pi.data();
    let e = q.e_identity();
    let et = e.dotc(&params.t);
    if et.norm() <= 1e-12 {
        return Err(QhitError::Parameter("⟨e_I|t⟩ vanishes".into()));
    }
    let up = params.u.dotc(pi);
    if up.norm() <= 1e-12 {
        return Err(QhitError::Parameter("⟨u|π⟩ vanishes".into()));
    }
    let a = identity(n) - q.rep();
    let inner = &a + outer(&params.t, &params.u);
    let g = inverse(&inner, "Hunter g-inverse")? + outer(pi, &params.f) + outer(&params.g, &e);
    let gi = GInverse { a, g, kind: GInverseKind::HunterFamily, params: Some(params) };
    let res = gi.residual();
    if res > GINVERSE_TOL {
        return Err(QhitError::Numerical(format!("Hunter g-inverse fails AGA = A (residual {res:.3e})")));
    }
    Ok(gi)
}
