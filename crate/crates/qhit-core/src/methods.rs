// Copyright 2026 Qhit Contributors
// SPDX-License-Identifier: Apache-2.0

//! Interchangeable routes to the mean hitting time of a channel.
//!
//! Each route implements [`HittingMethod`] and is registered by name in a
//! [`MethodRegistry`], so callers pick one at runtime.

use std::collections::BTreeMap;

use crate::channel::{assumption_one, diagnose, validate_density, GoalSubspace, Side};
use crate::error::{QhitError, Result};
use crate::ginverse::{self, hunter_ginverse, HunterParams};
use crate::hitting::{analytic_hk, tau_from_k};
use crate::ksmh::{all_hitting_operators, ksmh_kernel, tau_irreducible_qmc, KernelVariant};
use crate::linalg::{identity, ComplexMatrix, ComplexVector};
use crate::matrep::SuperOp;
use crate::monitor::{first_visit_series, MeanTime, MonitorConfig};
use crate::qmc::Qmc;
use crate::Tolerances;

/// A channel, a goal subspace and a start density in its complement.
#[derive(Debug, Clone)]
pub struct HittingProblem {
    pub s: SuperOp,
    pub v: GoalSubspace,
    pub rho: ComplexMatrix,
}

impl HittingProblem {
    pub fn new(s: SuperOp, v: GoalSubspace, rho: ComplexMatrix, tol: &Tolerances) -> Result<Self> {
        if s.dim() != v.ambient_dim() || rho.nrows() != s.dim() {
            return Err(QhitError::Dimension("channel, subspace and state dimensions differ".into()));
        }
        validate_density(&rho, tol)?;
        if !v.supports(&rho, Side::InComplement, tol.entry) {
            return Err(QhitError::Validation("initial state must be supported in the complement of V".into()));
        }
        Ok(Self { s, v, rho })
    }
}

/// What a route produced.
#[derive(Debug, Clone)]
pub struct MethodOutcome {
    pub tau: MeanTime,
    /// Preconditions that were checked and held.
    pub verified: Vec<String>,
    /// Named intermediate matrices.
    pub artifacts: Vec<(String, ComplexMatrix)>,
    pub notes: Vec<String>,
}

impl MethodOutcome {
    fn finite(tau: f64) -> Self {
        Self { tau: MeanTime::Finite(tau), verified: Vec::new(), artifacts: Vec::new(), notes: Vec::new() }
    }
}

pub trait HittingMethod: Send + Sync {
    fn name(&self) -> &'static str;
    fn description(&self) -> &'static str;
    fn evaluate(&self, problem: &HittingProblem, tol: &Tolerances) -> Result<MethodOutcome>;
}

/// Direct summation of the monitored first-visit series.
#[derive(Debug, Default)]
pub struct SeriesMethod {
    pub config: MonitorConfig,
}

impl HittingMethod for SeriesMethod {
    fn name(&self) -> &'static str {
        "series"
    }

    fn description(&self) -> &'static str {
        "sum r·π_r of the monitored first-visit series"
    }

    fn evaluate(&self, p: &HittingProblem, tol: &Tolerances) -> Result<MethodOutcome> {
        let ser = first_visit_series(&p.s, &p.v, &p.rho, &self.config, tol)?;
        let mut notes = vec![format!(
            "{} steps, hitting probability {:.12}, partial sum {:.12}",
            ser.truncated_at, ser.cumulative_prob, ser.partial_tau
        )];
        if !ser.converged {
            notes.push("step cap reached before the series settled".into());
        }
        Ok(MethodOutcome { tau: ser.tau, verified: Vec::new(), artifacts: Vec::new(), notes })
    }
}

fn require_assumption_one(p: &HittingProblem, tol: &Tolerances) -> Result<String> {
    let a1 = assumption_one(&p.s, &p.v, tol)?;
    if !a1.holds {
        return Err(QhitError::SpectralObstruction {
            context: "Assumption I fails: 1 is an eigenvalue of ℚT".into(),
            offending: a1.offending,
        });
    }
    let rho = a1.spectrum.iter().map(|z| z.norm()).fold(0.0, f64::max);
    Ok(format!("Assumption I (spectral radius of ℚT {rho:.6})"))
}

/// `Tr(K_12 ρ)` with `K = T(I − ℚT)⁻²`.
#[derive(Debug, Default)]
pub struct AnalyticMethod;

impl HittingMethod for AnalyticMethod {
    fn name(&self) -> &'static str {
        "analytic"
    }

    fn description(&self) -> &'static str {
        "analytic hitting-time map K = T(I − ℚT)⁻²"
    }

    fn evaluate(&self, p: &HittingProblem, tol: &Tolerances) -> Result<MethodOutcome> {
        let verified = require_assumption_one(p, tol)?;
        let maps = analytic_hk(&p.s, &p.v, tol)?;
        let tau = tau_from_k(&maps, &p.rho, &p.v, Side::InComplement, tol)?;
        let mut out = MethodOutcome::finite(tau);
        out.verified.push(verified);
        out.artifacts.push(("K".into(), maps.k.mat().clone()));
        out.artifacts.push(("H".into(), maps.h.mat().clone()));
        Ok(out)
    }
}

/// KSMH kernel with a Hunter-family g-inverse; needs an irreducible channel.
#[derive(Debug, Default)]
pub struct KsmhHunterMethod;

impl HittingMethod for KsmhHunterMethod {
    fn name(&self) -> &'static str {
        "ksmh-g"
    }

    fn description(&self) -> &'static str {
        "KSMH kernel from a g-inverse of I − Φ (irreducible channels)"
    }

    fn evaluate(&self, p: &HittingProblem, tol: &Tolerances) -> Result<MethodOutcome> {
        let d = diagnose(&p.s, tol);
        if !d.is_irreducible {
            return Err(QhitError::Reducible(format!(
                "fixed space dimension {}; the g-inverse formula needs an irreducible channel",
                d.fixed_space_dim
            )));
        }
        let q = Qmc::induce(&p.s, &p.v)?;
        let ops = all_hitting_operators(&q, tol)?;
        if !ops.site_exact(0) {
            return Err(QhitError::SpectralObstruction {
                context: "hitting operator for the goal site does not exist".into(),
                offending: Vec::new(),
            });
        }
        let fixed = q.fixed_map()?;
        let mut t = ComplexVector::zeros(q.order());
        t[0] = num_complex::Complex64::ONE;
        let params = HunterParams::with_identity_functional(t, ComplexVector::zeros(q.order()), &q.e_identity());
        let g = hunter_ginverse(&q, params)?;
        let kernel = ksmh_kernel(ops.d(), &g.g, KernelVariant::General, Some(&fixed.omega), 2, q.block_size())?;
        let tau = tau_irreducible_qmc(&kernel, 0, 1, &p.rho, tol)?;
        let mut out = MethodOutcome::finite(tau);
        out.verified.push("irreducible channel (unique faithful fixed state)".into());
        out.verified.push(format!("AGA = A (relative residual {:.3e})", g.residual()));
        out.artifacts.push(("Phi".into(), q.rep().clone()));
        out.artifacts.push(("D".into(), ops.d().clone()));
        out.artifacts.push(("G".into(), g.g));
        out.artifacts.push(("kernel".into(), kernel.kernel));
        Ok(out)
    }
}

/// KSMH kernel with the group inverse; needs Assumption I only.
#[derive(Debug, Default)]
pub struct KsmhGroupMethod;

impl HittingMethod for KsmhGroupMethod {
    fn name(&self) -> &'static str {
        "ksmh-group"
    }

    fn description(&self) -> &'static str {
        "KSMH kernel from the group inverse of I − Φ (Assumption I)"
    }

    fn evaluate(&self, p: &HittingProblem, tol: &Tolerances) -> Result<MethodOutcome> {
        let verified = require_assumption_one(p, tol)?;
        let q = Qmc::induce(&p.s, &p.v)?;
        let ops = all_hitting_operators(&q, tol)?;
        if !ops.site_exact(0) {
            return Err(QhitError::SpectralObstruction {
                context: "hitting operator for the goal site does not exist".into(),
                offending: Vec::new(),
            });
        }
        let a = identity(q.order()) - q.rep();
        let gi = ginverse::group_inverse(&a)?;
        let kernel = ksmh_kernel(ops.d(), gi.asharp(), KernelVariant::Group, None, 2, q.block_size())?;
        let tau = tau_irreducible_qmc(&kernel, 0, 1, &p.rho, tol)?;
        let mut out = MethodOutcome::finite(tau);
        out.verified.push(verified);
        out.verified.push(format!("index(I − Φ) = {}, group axioms residual {:.3e}", gi.index(), gi.axiom_residual()));
        if let Some(Some(avail)) = ops.availability.get(1) {
            if !matches!(avail, crate::ksmh::SiteAvailability::Exact) {
                let note = match avail {
                    crate::ksmh::SiteAvailability::Extended { near_one } => format!(
                        "1 is an eigenvalue of ℚ_2Φ ({}); the second diagonal block uses the group-inverse extension",
                        crate::error::format_eigenvalues(near_one)
                    ),
                    other => format!("second diagonal block unavailable: {other:?}"),
                };
                out.notes.push(note);
            }
        }
        out.artifacts.push(("Phi".into(), q.rep().clone()));
        out.artifacts.push(("D".into(), ops.d().clone()));
        out.artifacts.push(("Asharp".into(), gi.asharp().clone()));
        out.artifacts.push(("kernel".into(), kernel.kernel));
        Ok(out)
    }
}

/// Name → method table, with aliases.
#[derive(Default)]
pub struct MethodRegistry {
    methods: Vec<Box<dyn HittingMethod>>,
    index: BTreeMap<String, usize>,
}

impl MethodRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// The four built-in routes.
    pub fn with_defaults() -> Self {
        let mut r = Self::new();
        r.register(Box::new(SeriesMethod::default()));
        r.register(Box::new(AnalyticMethod));
        r.register(Box::new(KsmhHunterMethod));
        r.register(Box::new(KsmhGroupMethod));
        r.alias("analytic-K", "analytic");
        r.alias("ksmh-ginverse", "ksmh-g");
        r
    }

    /// Add a method; a later registration under the same name replaces it.
    pub fn register(&mut self, method: Box<dyn HittingMethod>) {
        let name = method.name().to_string();
        match self.index.get(&name) {
            Some(&i) => self.methods[i] = method,
            None => {
                self.index.insert(name, self.methods.len());
                self.methods.push(method);
            }
        }
    }

    pub fn alias(&mut self, alias: &str, target: &str) {
        if let Some(&i) = self.index.get(target) {
            self.index.insert(alias.to_string(), i);
        }
    }

    pub fn get(&self, name: &str) -> Option<&dyn HittingMethod> {
        self.index.get(name).map(|&i| self.methods[i].as_ref())
    }

    /// Primary names in registration order.
    pub fn names(&self) -> Vec<&'static str> {
        self.methods.iter().map(|m| m.name()).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = &dyn HittingMethod> {
        self.methods.iter().map(|m| m.as_ref())
    }
}

/// Mean hitting time by the named route.
pub fn tau_channel(
    s: &SuperOp,
    v: &GoalSubspace,
    rho: &ComplexMatrix,
    method: &str,
    tol: &Tolerances,
) -> Result<MethodOutcome> {
    let registry = MethodRegistry::with_defaults();
    let m = registry
        .get(method)
        .ok_or_else(|| QhitError::Parameter(format!("unknown method {method:?}; known: {:?}", registry.names())))?;
    let problem = HittingProblem::new(s.clone(), v.clone(), rho.clone(), tol)?;
    m.evaluate(&problem, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn registry_lookup_and_aliases() {
        let r = MethodRegistry::with_defaults();
        assert_eq!(r.names(), vec!["series", "analytic", "ksmh-g", "ksmh-group"]);
        assert_eq!(r.get("analytic-K").unwrap().name(), "analytic");
        assert_eq!(r.get("ksmh-ginverse").unwrap().name(), "ksmh-g");
        assert!(r.get("nope").is_none());
    }

    #[test]
    fn all_routes_give_six() {
        let tol = Tolerances::default();
        let s = catalog::shear_pair().represent();
        for name in ["series", "analytic", "ksmh-g", "ksmh-group"] {
            let out = tau_channel(&s, &catalog::shear_pair_goal(), &catalog::shear_pair_start(), name, &tol).unwrap();
            let tau = out.tau.finite().unwrap();
            assert!((tau - 6.0).abs() < 1e-6, "{name}: {tau}");
        }
    }

    #[test]
    fn reducible_channel_rejected_by_hunter_route() {
        let tol = Tolerances::default();
        let s = catalog::hadamard().represent();
        let v = GoalSubspace::coordinate(2, &[0]).unwrap();
        let rho = catalog::basis_state(2, 1);
        assert!(matches!(tau_channel(&s, &v, &rho, "ksmh-g", &tol), Err(QhitError::Reducible(_))));
        let tau = tau_channel(&s, &v, &rho, "ksmh-group", &tol).unwrap().tau.finite().unwrap();
        assert!((tau - 2.0).abs() < 1e-10);
    }
}
