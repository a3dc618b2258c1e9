// Copyright 2026 Qhit Contributors
// SPDX-License-Identifier: Apache-2.0

//! Quantum Markov chains on a finite set of sites.
//!
//! A QMC is stored as its assembled representation, an `n_sites × n_sites`
//! grid of `k² × k²` blocks where block `(i, j)` carries site `j` to site `i`.

use num_complex::Complex64;

use crate::channel::GoalSubspace;
use crate::error::{QhitError, Result};
use crate::ginverse;
use crate::linalg::{self, hermitian_eigenvalues, identity, max_abs_diff, zeros, ComplexMatrix, ComplexVector};
use crate::matrep::{kron, unvec, vec, vec_identity, SuperOp};
use crate::Tolerances;

#[derive(Debug, Clone)]
pub struct Qmc {
    n_sites: usize,
    k: usize,
    rep: ComplexMatrix,
}

impl Qmc {
    /// Wrap an assembled representation; trace preservation is required.
    pub fn from_rep(n_sites: usize, k: usize, rep: ComplexMatrix, tol: &Tolerances) -> Result<Self> {
        let order = n_sites * k * k;
        if rep.shape() != (order, order) {
            return Err(QhitError::Dimension(format!(
                "QMC with {n_sites} sites of dimension {k} needs order {order}, got {}x{}",
                rep.nrows(),
                rep.ncols()
            )));
        }
        let q = Self { n_sites, k, rep };
        let dev = q.trace_deviation();
        if dev > tol.entry {
            return Err(QhitError::Validation(format!("QMC is not trace preserving (deviation {dev:.3e})")));
        }
        Ok(q)
    }

    /// Assemble from a grid of block maps, `blocks[i][j]` taking site `j` to site `i`.
    pub fn from_blocks(blocks: &[Vec<SuperOp>], tol: &Tolerances) -> Result<Self> {
        let n = blocks.len();
        let k = blocks
            .first()
            .and_then(|row| row.first())
            .map(SuperOp::dim)
            .ok_or_else(|| QhitError::Dimension("empty block grid".into()))?;
        let k2 = k * k;
        let mut rep = zeros(n * k2, n * k2);
        for (i, row) in blocks.iter().enumerate() {
            if row.len() != n {
                return Err(QhitError::Dimension(format!("block row {i} has {} entries", row.len())));
            }
            for (j, b) in row.iter().enumerate() {
                if b.dim() != k {
                    return Err(QhitError::Dimension(format!("block ({i}, {j}) acts on dimension {}", b.dim())));
                }
                rep.view_mut((i * k2, j * k2), (k2, k2)).copy_from(b.mat());
            }
        }
        Self::from_rep(n, k, rep, tol)
    }

    /// Open quantum walk with `b[i][j]` the transition operator from `j` to `i`.
    pub fn from_oqw(b: &[Vec<ComplexMatrix>], tol: &Tolerances) -> Result<Self> {
        let n = b.len();
        let k = b
            .first()
            .and_then(|row| row.first())
            .map(|m| m.nrows())
            .ok_or_else(|| QhitError::Dimension("empty OQW grid".into()))?;
        if b.iter().any(|row| row.len() != n || row.iter().any(|m| m.shape() != (k, k))) {
            return Err(QhitError::Dimension("OQW grid must be square with equal k x k blocks".into()));
        }
        #[allow(clippy::needless_range_loop)]
        for j in 0..n {
            let sum = (0..n).fold(zeros(k, k), |acc, i| acc + b[i][j].adjoint() * &b[i][j]);
            let dev = max_abs_diff(&sum, &identity(k));
            if dev > tol.entry {
                return Err(QhitError::Validation(format!(
                    "OQW column {j} violates Σ_i B_ij* B_ij = I (deviation {dev:.3e})"
                )));
            }
        }
        let blocks: Vec<Vec<SuperOp>> = b
            .iter()
            .map(|row| row.iter().map(|m| SuperOp::sandwich(m, m)).collect::<Result<_>>())
            .collect::<Result<_>>()?;
        Self::from_blocks(&blocks, tol)
    }

    /// The two-site QMC whose first row is `(I − ℚ)T` and second row `ℚT`.
    pub fn induce(s: &SuperOp, v: &GoalSubspace) -> Result<Self> {
        let n = s.dim();
        if v.ambient_dim() != n {
            return Err(QhitError::Dimension("channel and subspace dimensions differ".into()));
        }
        let n2 = n * n;
        let qt = v.qq().mat() * s.mat();
        let pt = s.mat() - &qt;
        let mut rep = zeros(2 * n2, 2 * n2);
        for j in 0..2 {
            rep.view_mut((0, j * n2), (n2, n2)).copy_from(&pt);
            rep.view_mut((n2, j * n2), (n2, n2)).copy_from(&qt);
        }
        Ok(Self { n_sites: 2, k: n, rep })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn internal_dim(&self) -> usize {
        self.k
    }

    /// Size `k²` of each block.
    pub fn block_size(&self) -> usize {
        self.k * self.k
    }

    pub fn order(&self) -> usize {
        self.rep.nrows()
    }

    pub fn rep(&self) -> &ComplexMatrix {
        &self.rep
    }

    pub fn block(&self, i: usize, j: usize) -> ComplexMatrix {
        let k2 = self.block_size();
        self.rep.view((i * k2, j * k2), (k2, k2)).into_owned()
    }

    /// `|e_I⟩`, the stacked `vec(I_k)` whose pairing gives the total trace.
    pub fn e_identity(&self) -> ComplexVector {
        let e = vec_identity(self.k);
        let k2 = self.block_size();
        ComplexVector::from_fn(self.order(), |r, _| e[r % k2])
    }

    pub fn trace_deviation(&self) -> f64 {
        let e = self.e_identity();
        (self.rep.adjoint() * &e - &e).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `ℙ_i`, the identity on block `i` and zero elsewhere.
    pub fn site_projector(&self, i: usize) -> ComplexMatrix {
        let k2 = self.block_size();
        let mut p = zeros(self.order(), self.order());
        p.view_mut((i * k2, i * k2), (k2, k2)).fill_with_identity();
        p
    }

    /// `ℚ_i = I − ℙ_i`.
    pub fn site_complement(&self, i: usize) -> ComplexMatrix {
        identity(self.order()) - self.site_projector(i)
    }

    pub fn site_projectors(&self) -> Vec<ComplexMatrix> {
        (0..self.n_sites).map(|i| self.site_projector(i)).collect()
    }

    /// The grid of `I_{k²}` blocks.
    pub fn block_constant_e(&self) -> ComplexMatrix {
        block_constant_e(self.n_sites, self.block_size())
    }

    pub fn fixed_space_dim(&self) -> usize {
        let a = &self.rep - identity(self.order());
        linalg::singular_values(&a).iter().filter(|&&s| s < 1e-9).count()
    }

    /// A stationary density, projected from the uniform maximally mixed seed.
    pub fn stationary_density(&self) -> Result<VecState> {
        let a = identity(self.order()) - &self.rep;
        let gi = ginverse::group_inverse(&a)?;
        let seed = VecState::uniform(self.n_sites, self.k);
        let fixed = gi.ergodic_projector() * seed.data();
        let total = self.e_identity().dotc(&fixed);
        if total.norm() < 1e-12 {
            return Err(QhitError::Numerical("fixed space contains no density".into()));
        }
        let mut state = VecState::from_data(self.n_sites, self.k, fixed / total)?;
        state.hermitize_blocks();
        Ok(state)
    }

    /// The stationary density, required to be unique.
    pub fn unique_stationary(&self) -> Result<VecState> {
        let dim = self.fixed_space_dim();
        if dim != 1 {
            return Err(QhitError::Reducible(format!("fixed space has dimension {dim}; use the group-inverse route")));
        }
        self.stationary_density()
    }

    pub fn fixed_map(&self) -> Result<FixedMap> {
        let pi = self.unique_stationary()?;
        let omega = linalg::outer(pi.data(), &self.e_identity());
        Ok(FixedMap { omega, pi })
    }

    /// Smallest eigenvalue over the images of a fixed set of test densities
    /// under every block. Diagnostic only.
    pub fn sampled_positivity(&self) -> f64 {
        let k = self.k;
        let k2 = self.block_size();
        let mut worst = f64::INFINITY;
        for rho in test_densities(k) {
            let v = vec(&rho);
            for i in 0..self.n_sites {
                for j in 0..self.n_sites {
                    let out = self.rep.view((i * k2, j * k2), (k2, k2)) * &v;
                    let m = unvec(&out, k, k).expect("block size");
                    worst = worst.min(hermitian_eigenvalues(&m)[0]);
                }
            }
        }
        worst
    }
}

/// Grid of `n_sites × n_sites` identity blocks of size `k2`.
pub fn block_constant_e(n_sites: usize, k2: usize) -> ComplexMatrix {
    let ones = ComplexMatrix::from_element(n_sites, n_sites, Complex64::ONE);
    kron(&ones, &identity(k2))
}

/// Basis projectors and the pairwise `|+⟩`, `|+i⟩` states.
fn test_densities(k: usize) -> Vec<ComplexMatrix> {
    let mut out = Vec::new();
    let basis = |i: usize| {
        let mut v = ComplexVector::zeros(k);
        v[i] = Complex64::ONE;
        v
    };
    for i in 0..k {
        out.push(linalg::outer(&basis(i), &basis(i)));
        for j in i + 1..k {
            for phase in [Complex64::ONE, Complex64::I] {
                let v = (basis(i) + basis(j) * phase) / Complex64::new(2f64.sqrt(), 0.0);
                out.push(linalg::outer(&v, &v));
            }
        }
    }
    out
}

/// Stacked block state `[ρ_1; …; ρ_n]` in vectorized form.
#[derive(Debug, Clone, PartialEq)]
pub struct VecState {
    n_sites: usize,
    k: usize,
    data: ComplexVector,
}

impl VecState {
    pub fn from_data(n_sites: usize, k: usize, data: ComplexVector) -> Result<Self> {
        if data.len() != n_sites * k * k {
            return Err(QhitError::Dimension(format!(
                "state of length {} for {n_sites} sites of dimension {k}",
                data.len()
            )));
        }
        Ok(Self { n_sites, k, data })
    }

    /// `ρ` placed at `site`, zero elsewhere.
    pub fn at_site(n_sites: usize, site: usize, rho: &ComplexMatrix) -> Result<Self> {
        let k = rho.nrows();
        if site >= n_sites {
            return Err(QhitError::Dimension(format!("site {site} outside {n_sites} sites")));
        }
        let k2 = k * k;
        let mut data = ComplexVector::zeros(n_sites * k2);
        data.rows_mut(site * k2, k2).copy_from(&vec(rho));
        Ok(Self { n_sites, k, data })
    }

    /// `I_k / (k n)` on every site.
    pub fn uniform(n_sites: usize, k: usize) -> Self {
        let blk = vec(&identity(k).scale(1.0 / (k * n_sites) as f64));
        let k2 = k * k;
        let data = ComplexVector::from_fn(n_sites * k2, |r, _| blk[r % k2]);
        Self { n_sites, k, data }
    }

    pub fn data(&self) -> &ComplexVector {
        &self.data
    }

    pub fn block(&self, i: usize) -> ComplexMatrix {
        let k2 = self.k * self.k;
        unvec(&self.data.rows(i * k2, k2).into_owned(), self.k, self.k).expect("block size")
    }

    pub fn total_trace(&self) -> Complex64 {
        (0..self.n_sites).map(|i| linalg::trace(&self.block(i))).sum()
    }

    fn hermitize_blocks(&mut self) {
        let k2 = self.k * self.k;
        for i in 0..self.n_sites {
            let h = linalg::hermitize(&self.block(i));
            self.data.rows_mut(i * k2, k2).copy_from(&vec(&h));
        }
    }
}

/// `Ω = |π⟩⟨e_I|`.
#[derive(Debug, Clone)]
pub struct FixedMap {
    pub omega: ComplexMatrix,
    pub pi: VecState,
}
