// Copyright 2026 Qhit Contributors
// SPDX-License-Identifier: Apache-2.0

//! Quantum channels, goal subspaces and channel diagnostics.

use num_complex::Complex64;

use crate::error::{QhitError, Result};
use crate::ginverse;
use crate::linalg::{
    self, eigenvalues, hermitian_eigenvalues, identity, is_finite, max_abs_diff, null_space, rank, trace,
    ComplexMatrix, ComplexVector,
};
use crate::matrep::{kron, unvec, vec, vec_identity, SuperOp};
use crate::Tolerances;

/// A channel `ρ ↦ Σ V_i ρ V_i*` given by its Kraus operators.
#[derive(Debug, Clone)]
pub struct KrausChannel {
    dim: usize,
    kraus: Vec<ComplexMatrix>,
}

impl KrausChannel {
    /// Shape checks only; trace preservation is checked by [`KrausChannel::checked`].
    pub fn new(kraus: Vec<ComplexMatrix>) -> Result<Self> {
        let first = kraus.first().ok_or_else(|| QhitError::Validation("empty Kraus list".into()))?;
        let dim = first.nrows();
        for (i, v) in kraus.iter().enumerate() {
            if v.shape() != (dim, dim) {
                return Err(QhitError::Dimension(format!(
                    "Kraus operator {i} is {}x{}, expected {dim}x{dim}",
                    v.nrows(),
                    v.ncols()
                )));
            }
            if !is_finite(v) {
                return Err(QhitError::Validation(format!("Kraus operator {i} has non-finite entries")));
            }
        }
        Ok(Self { dim, kraus })
    }

    /// Like [`KrausChannel::new`] but also requires `Σ V_i* V_i = I`.
    pub fn checked(kraus: Vec<ComplexMatrix>, tol: &Tolerances) -> Result<Self> {
        let ch = Self::new(kraus)?;
        let dev = ch.tp_deviation();
        if dev > tol.entry {
            return Err(QhitError::Validation(format!(
                "Kraus operators are not trace preserving: max |Σ V*V - I| = {dev:.3e}"
            )));
        }
        Ok(ch)
    }

    pub fn unitary(u: ComplexMatrix, tol: &Tolerances) -> Result<Self> {
        Self::checked(vec![u], tol)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    /// Largest entry of `Σ V_i* V_i − I`.
    pub fn tp_deviation(&self) -> f64 {
        let sum = self.kraus.iter().fold(linalg::zeros(self.dim, self.dim), |acc, v| acc + v.adjoint() * v);
        max_abs_diff(&sum, &identity(self.dim))
    }

    pub fn represent(&self) -> SuperOp {
        let mat = self.kraus.iter().fold(linalg::zeros(self.dim * self.dim, self.dim * self.dim), |acc, v| {
            acc + kron(v, &v.map(|z| z.conj()))
        });
        SuperOp::new(self.dim, mat).expect("square by construction")
    }

    pub fn validate(&self, tol: &Tolerances) -> ChannelDiagnostics {
        diagnose(&self.represent(), tol)
    }
}

/// Spectral and structural facts about a map, always computable.
#[derive(Debug, Clone)]
pub struct ChannelDiagnostics {
    pub is_trace_preserving: bool,
    /// Largest entry of `⟨vec(I)|⌈T⌉ − ⟨vec(I)|`.
    pub tp_deviation: f64,
    pub is_unital: bool,
    pub fixed_space_dim: usize,
    /// The kernel of `⌈T⌉ − I` had a singular value near the threshold.
    pub fixed_space_ambiguous: bool,
    pub is_irreducible: bool,
    /// Smallest eigenvalue of the normalized fixed density, when unique.
    pub fixed_density_min_eig: Option<f64>,
    pub peripheral_eigenvalues: Vec<Complex64>,
    pub spectral_radius: f64,
    pub jordan_trivial_at_1: bool,
}

/// Singular values of `⌈T⌉ − I` below this count towards the fixed space.
const FIXED_SPACE_TOL: f64 = 1e-9;

pub fn diagnose(s: &SuperOp, tol: &Tolerances) -> ChannelDiagnostics {
    let n = s.dim();
    let e = vec_identity(n);
    let tp_deviation = (s.mat().adjoint() * &e - &e).iter().map(|z| z.norm()).fold(0.0, f64::max);
    let unital_dev = (s.mat() * &e - &e).iter().map(|z| z.norm()).fold(0.0, f64::max);

    let a = s.mat() - identity(n * n);
    let sv = linalg::singular_values(&a);
    let fixed_space_dim = sv.iter().filter(|&&x| x < FIXED_SPACE_TOL).count();
    let fixed_space_ambiguous = sv.iter().any(|x| (FIXED_SPACE_TOL..10.0 * FIXED_SPACE_TOL).contains(x));
    if fixed_space_ambiguous {
        log::warn!("fixed space dimension is ambiguous at threshold {FIXED_SPACE_TOL:.0e}");
    }

    let spectrum = eigenvalues(s.mat()).unwrap_or_default();
    let spectral_radius = spectrum.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let mut peripheral: Vec<Complex64> = spectrum.iter().copied().filter(|z| z.norm() > 1.0 - tol.eig_one).collect();
    peripheral.sort_by(|x, y| x.arg().total_cmp(&y.arg()));

    let r1 = rank(&a, tol.rank_rel).rank;
    let r2 = rank(&(&a * &a), tol.rank_rel).rank;

    let fixed_density_min_eig =
        if fixed_space_dim == 1 { unique_fixed_density(s).map(|rho| hermitian_eigenvalues(&rho)[0]) } else { None };
    let is_irreducible = fixed_space_dim == 1 && fixed_density_min_eig.is_some_and(|m| m > tol.faithful);

    ChannelDiagnostics {
        is_trace_preserving: tp_deviation <= tol.entry,
        tp_deviation,
        is_unital: unital_dev <= tol.entry,
        fixed_space_dim,
        fixed_space_ambiguous,
        is_irreducible,
        fixed_density_min_eig,
        peripheral_eigenvalues: peripheral,
        spectral_radius,
        jordan_trivial_at_1: r1 == r2,
    }
}

/// The trace-normalized fixed point when the fixed space is one-dimensional.
fn unique_fixed_density(s: &SuperOp) -> Option<ComplexMatrix> {
    let n = s.dim();
    let ker = null_space(&(s.mat() - identity(n * n)), FIXED_SPACE_TOL);
    let v = ker.first()?;
    let x = unvec(v, n, n).ok()?;
    let tr = trace(&x);
    if tr.norm() < 1e-12 {
        return None;
    }
    Some(linalg::hermitize(&x.map(|z| z / tr)))
}

/// A basis of the fixed space of `s`; the first element is a fixed density.
pub fn fixed_states(s: &SuperOp) -> Result<Vec<ComplexMatrix>> {
    let n = s.dim();
    let a = s.mat() - identity(n * n);
    let ker = null_space(&a, FIXED_SPACE_TOL);
    if ker.is_empty() {
        return Err(QhitError::Numerical("map has no fixed points".into()));
    }
    // Project the maximally mixed state onto the fixed space.
    let gi = ginverse::group_inverse(&a)?;
    let seed = vec(&identity(n).scale(1.0 / n as f64));
    let fixed = gi.ergodic_projector() * seed;
    let rho = unvec(&fixed, n, n)?;
    let tr = trace(&rho);
    if tr.norm() < 1e-12 {
        return Err(QhitError::Numerical("fixed space contains no density".into()));
    }
    let rho = linalg::hermitize(&rho.map(|z| z / tr));

    let mut basis: Vec<ComplexVector> = vec![vec(&rho).normalize()];
    for k in ker {
        let mut w = k;
        for b in &basis {
            let overlap = b.dotc(&w);
            w -= b * overlap;
        }
        if w.norm() > 1e-8 {
            basis.push(w.normalize());
        }
    }
    let mut out = vec![rho];
    for b in basis.iter().skip(1) {
        out.push(unvec(b, n, n)?);
    }
    Ok(out)
}

/// Spectrum of `⌈ℚ⌉⌈T⌉` and whether it avoids 1.
#[derive(Debug, Clone)]
pub struct AssumptionOne {
    pub holds: bool,
    pub offending: Vec<Complex64>,
    pub spectrum: Vec<Complex64>,
}

pub fn assumption_one(s: &SuperOp, v: &GoalSubspace, tol: &Tolerances) -> Result<AssumptionOne> {
    if s.dim() != v.ambient_dim() {
        return Err(QhitError::Dimension(format!(
            "channel on dimension {} but subspace in dimension {}",
            s.dim(),
            v.ambient_dim()
        )));
    }
    let spectrum = eigenvalues(&(v.qq().mat() * s.mat()))?;
    let offending: Vec<Complex64> =
        spectrum.iter().copied().filter(|z| (z - Complex64::ONE).norm() < tol.eig_one).collect();
    Ok(AssumptionOne { holds: offending.is_empty(), offending, spectrum })
}

pub fn assumption_one_holds(s: &SuperOp, v: &GoalSubspace, tol: &Tolerances) -> Result<bool> {
    Ok(assumption_one(s, v, tol)?.holds)
}

/// `p·S1 + (1−p)·S2`.
pub fn randomize(s1: &SuperOp, s2: &SuperOp, p: f64) -> Result<SuperOp> {
    if !(0.0..=1.0).contains(&p) {
        return Err(QhitError::Parameter(format!("mixing probability {p} outside [0, 1]")));
    }
    s1.scale(Complex64::new(p, 0.0)).add(&s2.scale(Complex64::new(1.0 - p, 0.0)))
}

/// Choi matrix `Σ_ij E_ij ⊗ T(E_ij)`.
pub fn choi(s: &SuperOp) -> ComplexMatrix {
    let n = s.dim();
    let mut j = linalg::zeros(n * n, n * n);
    for a in 0..n {
        for b in 0..n {
            let col = s.mat().column(a * n + b);
            for k in 0..n {
                for l in 0..n {
                    j[(a * n + k, b * n + l)] = col[k * n + l];
                }
            }
        }
    }
    j
}

pub fn is_completely_positive(s: &SuperOp, tol: &Tolerances) -> bool {
    hermitian_eigenvalues(&choi(s))[0] >= -tol.psd
}

/// Check that `rho` is a density matrix.
pub fn validate_density(rho: &ComplexMatrix, tol: &Tolerances) -> Result<()> {
    if !rho.is_square() {
        return Err(QhitError::Dimension("state must be a square matrix".into()));
    }
    if !is_finite(rho) {
        return Err(QhitError::Validation("state has non-finite entries".into()));
    }
    let herm = max_abs_diff(rho, &rho.adjoint());
    if herm > tol.entry {
        return Err(QhitError::Validation(format!("state is not Hermitian (deviation {herm:.3e})")));
    }
    let tr = trace(rho);
    if (tr - Complex64::ONE).norm() > tol.entry {
        return Err(QhitError::Validation(format!("state has trace {tr}, expected 1")));
    }
    let min = hermitian_eigenvalues(rho)[0];
    if min < -tol.psd {
        return Err(QhitError::Validation(format!("state is not positive (eigenvalue {min:.3e})")));
    }
    Ok(())
}

/// `|v⟩⟨v|` for the normalized `v`.
pub fn pure_state(v: &ComplexVector) -> Result<ComplexMatrix> {
    let nrm = v.norm();
    if nrm < 1e-14 {
        return Err(QhitError::Validation("zero state vector".into()));
    }
    let u = v / Complex64::new(nrm, 0.0);
    Ok(linalg::outer(&u, &u))
}

/// Which side of the goal subspace a state lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    InV,
    InComplement,
}

/// The goal subspace `V` with its projectors.
#[derive(Debug, Clone)]
pub struct GoalSubspace {
    basis: ComplexMatrix,
    p: ComplexMatrix,
    q: ComplexMatrix,
    pp: SuperOp,
    qq: SuperOp,
    rr: SuperOp,
}

impl GoalSubspace {
    /// Orthonormalize `vectors` and build the projectors. Linearly dependent
    /// input is rejected.
    pub fn from_vectors(vectors: &[ComplexVector]) -> Result<Self> {
        let first =
            vectors.first().ok_or_else(|| QhitError::Validation("subspace needs at least one basis vector".into()))?;
        let n = first.len();
        if vectors.iter().any(|v| v.len() != n) {
            return Err(QhitError::Dimension("subspace basis vectors differ in length".into()));
        }
        if vectors.len() > n {
            return Err(QhitError::Validation(format!(
                "{} vectors cannot be independent in dimension {n}",
                vectors.len()
            )));
        }
        let m = ComplexMatrix::from_columns(vectors);
        let qr = m.qr();
        let r = qr.r();
        let scale = vectors.iter().map(|v| v.norm()).fold(0.0, f64::max);
        if (0..vectors.len()).any(|i| r[(i, i)].norm() <= 1e-10 * scale.max(1e-300)) {
            return Err(QhitError::Validation("subspace basis vectors are linearly dependent".into()));
        }
        Ok(Self::from_orthonormal(qr.q()))
    }

    /// Span of the standard basis vectors with the given indices.
    pub fn coordinate(n: usize, indices: &[usize]) -> Result<Self> {
        let vs: Vec<ComplexVector> = indices
            .iter()
            .map(|&i| {
                if i >= n {
                    return Err(QhitError::Dimension(format!("index {i} outside dimension {n}")));
                }
                let mut v = ComplexVector::zeros(n);
                v[i] = Complex64::ONE;
                Ok(v)
            })
            .collect::<Result<_>>()?;
        Self::from_vectors(&vs)
    }

    pub fn whole(n: usize) -> Self {
        Self::from_orthonormal(identity(n))
    }

    fn from_orthonormal(basis: ComplexMatrix) -> Self {
        let n = basis.nrows();
        let p = &basis * basis.adjoint();
        let q = identity(n) - &p;
        let pp = SuperOp::sandwich(&p, &p).expect("square");
        let qq = SuperOp::sandwich(&q, &q).expect("square");
        let rr = SuperOp::sandwich(&p, &q).and_then(|a| a.add(&SuperOp::sandwich(&q, &p)?)).expect("square");
        Self { basis, p, q, pp, qq, rr }
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn basis(&self) -> &ComplexMatrix {
        &self.basis
    }

    pub fn p(&self) -> &ComplexMatrix {
        &self.p
    }

    pub fn q(&self) -> &ComplexMatrix {
        &self.q
    }

    pub fn pp(&self) -> &SuperOp {
        &self.pp
    }

    pub fn qq(&self) -> &SuperOp {
        &self.qq
    }

    pub fn rr(&self) -> &SuperOp {
        &self.rr
    }

    /// Whether `rho` is supported on the given side, within `tol`.
    pub fn supports(&self, rho: &ComplexMatrix, side: Side, tol: f64) -> bool {
        let proj = match side {
            Side::InV => &self.p,
            Side::InComplement => &self.q,
        };
        max_abs_diff(&(proj * rho * proj), rho) <= tol
    }
}
