// Copyright 2026 Qhit Contributors
// SPDX-License-Identifier: Apache-2.0

//! Acceptance gate. Prints one line per criterion. Tolerances are pinned
//! next to each check.
//!
//! A few reference values contradict other printed values in the same
//! example; those checks are listed in `SELF_INCONSISTENT` and still report
//! FAIL. The process exits non-zero on any other failure, or if a listed
//! check starts passing.

mod common;

use std::f64::consts::PI;
use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use qhit_core::catalog;
use qhit_core::channel::{assumption_one_holds, diagnose, pure_state, GoalSubspace, Side};
use qhit_core::ginverse::{drazin_limit, group_inverse, hunter_ginverse, HunterParams, DEFAULT_Z_SCHEDULE};
use qhit_core::hitting::{analytic_hk, fundamental_map, tau_from_k};
use qhit_core::ksmh::{
    all_hitting_operators, diag_blocks, first_step_operator_l, group_kernel, kernel_limit_study, ksmh_kernel,
    tau_irreducible_qmc, KernelVariant, LimitGauge,
};
use qhit_core::linalg::{c, identity, max_abs, max_abs_diff, re, ComplexMatrix, ComplexVector};
use qhit_core::matrep::{vec, vec_identity};
use qhit_core::methods::{HittingProblem, MethodRegistry};
use qhit_core::qmc::Qmc;
use qhit_core::{QhitError, Result, SuperOp, Tolerances};

use common::*;

/// Sub-check results for one criterion.
#[derive(Default)]
struct Checks {
    failures: Vec<String>,
    count: usize,
}

impl Checks {
    fn ok(&mut self, label: &str, cond: bool, detail: impl FnOnce() -> String) {
        self.count += 1;
        if !cond {
            self.failures.push(format!("{label}: {}", detail()));
        }
    }

    fn close(&mut self, label: &str, got: f64, want: f64, tol: f64) {
        let err = (got - want).abs();
        self.ok(label, err <= tol, || format!("got {got:.12}, want {want:.12}, error {err:.3e} > {tol:.0e}"));
    }

    fn mat(&mut self, label: &str, got: &ComplexMatrix, want: &ComplexMatrix, tol: f64) {
        if got.shape() != want.shape() {
            self.ok(label, false, || format!("shape {:?}, want {:?}", got.shape(), want.shape()));
            return;
        }
        let err = max_abs_diff(got, want);
        self.ok(label, err <= tol, || {
            let mut rows: Vec<usize> = (0..got.nrows())
                .filter(|&i| (0..got.ncols()).any(|j| (got[(i, j)] - want[(i, j)]).norm() > tol))
                .collect();
            rows.dedup();
            format!("max entry error {err:.3e} > {tol:.0e}, rows {rows:?} (0-based)")
        });
    }
}

/// `(criterion, check label)` pairs whose reference value is inconsistent
/// with the rest of its own example.
const SELF_INCONSISTENT: [(&str, &str); 3] = [
    // The printed last row needs a D_22 block that no construction yields
    // while 1 is an eigenvalue of ℚ_2Φ; rows 1-7 and τ match.
    ("hadamard-walk", "kernel D[I - A# + A#_d E]"),
    // The printed B blocks give -4 and -6 for these two coefficients.
    ("coined-walk", "coefficient 4"),
    ("coined-walk", "coefficient 5"),
];

fn listed(id: &str, failure: &str) -> bool {
    SELF_INCONSISTENT.iter().any(|&(c, label)| c == id && failure.starts_with(&format!("{label}:")))
}

/// Returns the failure lines of one criterion.
fn run(id: &str, f: fn(&mut Checks) -> Result<()>) -> Vec<String> {
    let start = Instant::now();
    let mut checks = Checks::default();
    if let Err(e) = f(&mut checks) {
        checks.failures.push(format!("aborted: {e}"));
    }
    let secs = start.elapsed().as_secs_f64();
    let pass = checks.failures.is_empty();
    println!("[{}] {id} ({} checks, {secs:.2}s)", if pass { "PASS" } else { "FAIL" }, checks.count);
    for line in &checks.failures {
        let tag = if listed(id, line) { " [reference self-inconsistent]" } else { "" };
        println!("       {line}{tag}");
    }
    checks.failures
}

fn tol() -> Tolerances {
    Tolerances::default()
}

fn unit(n: usize, i: usize) -> ComplexVector {
    let mut v = ComplexVector::zeros(n);
    v[i] = Complex64::ONE;
    v
}

fn hunter_kernel_tau(q: &Qmc, params: HunterParams, rho: &ComplexMatrix) -> Result<(ComplexMatrix, f64)> {
    let ops = all_hitting_operators(q, &tol())?;
    let omega = q.fixed_map()?.omega;
    let g = hunter_ginverse(q, params)?;
    let k = ksmh_kernel(ops.d(), &g.g, KernelVariant::General, Some(&omega), q.n_sites(), q.block_size())?;
    let tau = tau_irreducible_qmc(&k, 0, 1, rho, &tol())?;
    Ok((g.g, tau))
}

fn shear_pair_example(ck: &mut Checks) -> Result<()> {
    let t = tol();
    let s = catalog::shear_pair().represent();
    let v = catalog::shear_pair_goal();
    let rho = catalog::shear_pair_start();
    ck.mat("T", s.mat(), &shear_t(), 1e-9);
    let maps = analytic_hk(&s, &v, &t)?;
    ck.mat("K", maps.k.mat(), &k_section_shear(), 1e-9);

    let q = Qmc::induce(&s, &v)?;
    ck.mat("Phi", q.rep(), &shear_phi(), 1e-9);
    let pi = q.unique_stationary()?;
    ck.mat(
        "pi",
        &ComplexMatrix::from_column_slice(8, 1, pi.data().as_slice()),
        &ComplexMatrix::from_column_slice(8, 1, shear_pi().as_slice()),
        1e-9,
    );
    let ops = all_hitting_operators(&q, &t)?;
    ck.mat("D", ops.d(), &shear_d(), 1e-9);
    let params = HunterParams::with_identity_functional(unit(8, 0), unit(8, 0), &q.e_identity());
    let g = hunter_ginverse(&q, params)?;
    ck.mat("G", &g.g, &shear_g(), 1e-9);
    ck.mat("G_d", &diag_blocks(&g.g, 2, 4)?, &shear_g_d(), 1e-9);

    let problem = HittingProblem::new(s, v, rho, &t)?;
    for method in MethodRegistry::with_defaults().iter() {
        match method.evaluate(&problem, &t) {
            Ok(out) => match out.tau.finite() {
                Some(tau) => ck.close(&format!("tau by {}", method.name()), tau, 6.0, 1e-8),
                None => ck.ok(method.name(), false, || "infinite mean time".into()),
            },
            Err(e) => ck.ok(method.name(), false, || e.to_string()),
        }
    }
    Ok(())
}

fn randomization_limit(ck: &mut Checks) -> Result<()> {
    let t = tol();
    let v = GoalSubspace::coordinate(2, &[0])?;
    let rho = catalog::basis_state(2, 1);
    let rot = catalog::rotation(PI / 6.0).represent();
    let mut f = ComplexVector::zeros(8);
    f[1] = Complex64::ONE;
    f[7] = Complex64::ONE;
    let gauge = LimitGauge { t: unit(8, 0), f };

    for &p in &[0.2, 0.4, 0.6, 0.8, 1.0] {
        for &s in &[0.1, 0.3, 0.5, 0.7, 0.9] {
            let dep = catalog::depolarizing(s)?.represent();
            let ch = qhit_core::channel::randomize(&dep, &rot, p)?;
            let q = Qmc::induce(&ch, &v)?;
            let ops = all_hitting_operators(&q, &t)?;
            let params = HunterParams::with_identity_functional(gauge.t.clone(), gauge.f.clone(), &q.e_identity());
            let g = hunter_ginverse(&q, params)?;
            let k = ksmh_kernel(ops.d(), &g.g, KernelVariant::Hunter, None, 2, 4)?;
            let tau = tau_irreducible_qmc(&k, 0, 1, &rho, &t)?;
            ck.close(&format!("tau(p={p}, s={s})"), tau, 4.0 / (1.0 - p + 2.0 * p * s), 1e-8);
        }
    }

    let ku = analytic_hk(&rot, &v, &t)?;
    ck.mat("K_U", ku.k.mat(), &rotation_k(), 1e-9);

    let q0 = Qmc::induce(&rot, &v)?;
    let a0 = group_inverse(&(identity(8) - q0.rep()))?;
    ck.mat("A_0 group inverse", a0.asharp(), &rotation_a0_sharp(), 1e-9);

    let dep = catalog::depolarizing(0.5)?.represent();
    // Extrapolation uses the three smallest p. Below about 1e-4 the second
    // diagonal block carries roundoff of order eps/p², so stop there.
    let study = kernel_limit_study(&dep, &rot, &v, &[1e-1, 1e-2, 1e-3, 5e-4, 1e-4], &gauge, &rho, &t)?;
    ck.mat("H_0 extrapolated", &study.h0_extrapolated, &rotation_h0(), 1e-9);
    match &study.h0_direct {
        Ok(h0d) => {
            ck.mat("H_0 from the group inverse", h0d, &rotation_h0(), 1e-9);
            ck.mat("H_0^D vs extrapolated H_0", h0d, &study.h0_extrapolated, 1e-8);
        }
        Err(e) => ck.ok("H_0^D", false, || e.clone()),
    }
    let norm_at = |p: f64| study.rows.iter().find(|r| r.p == p).map(|r| r.g_norm).unwrap_or(f64::NAN);
    let (small, large) = (norm_at(1e-4), norm_at(1e-1));
    ck.ok("G_p diverges", small > 1e3 * large, || {
        format!("Frobenius norm {small:.6e} at p=1e-4 vs {large:.6e} at p=1e-1, ratio {:.1}", small / large)
    });
    Ok(())
}

fn hadamard_walk(ck: &mut Checks) -> Result<()> {
    let t = tol();
    let s = catalog::hadamard().represent();
    let v = GoalSubspace::coordinate(2, &[0])?;
    ck.ok("Assumption I for span{e1}", assumption_one_holds(&s, &v, &t)?, || "verdict false".into());
    let forbidden = GoalSubspace::from_vectors(&[catalog::hadamard_forbidden_state()])?;
    ck.ok("Assumption I fails for the eigenvector goal", !assumption_one_holds(&s, &forbidden, &t)?, || {
        "verdict true".into()
    });

    let rho = catalog::basis_state(2, 1);
    let problem = HittingProblem::new(s.clone(), v.clone(), rho, &t)?;
    let registry = MethodRegistry::with_defaults();
    for name in ["series", "analytic", "ksmh-group"] {
        let out = registry.get(name).expect("registered").evaluate(&problem, &t)?;
        ck.close(&format!("tau by {name}"), out.tau.finite().unwrap_or(f64::INFINITY), 2.0, 1e-8);
    }

    let q = Qmc::induce(&s, &v)?;
    let gi = group_inverse(&(identity(8) - q.rep()))?;
    ck.mat("A#", gi.asharp(), &hadamard_a_sharp(), 1e-9);
    let kernel = group_kernel(&s, &v, &t)?;
    ck.mat("kernel D[I - A# + A#_d E]", &kernel, &hadamard_kernel(), 1e-9);
    // Everything but the last row depends only on D_11.
    ck.mat("kernel rows 1-7", &kernel.rows(0, 7).into_owned(), &hadamard_kernel().rows(0, 7).into_owned(), 1e-9);
    Ok(())
}

fn coined_walk(ck: &mut Checks) -> Result<()> {
    let t = tol();
    let s = catalog::coined_walk().represent();
    let v = GoalSubspace::coordinate(4, &[0])?;
    let maps = analytic_hk(&s, &v, &t)?;
    ck.mat("K = [B1 B2; B3 B4]", maps.k.mat(), &coined_walk_k(), 1e-9);

    let tau_of = |a: [f64; 3]| -> Result<f64> {
        let psi = ComplexVector::from_vec(vec![re(0.0), re(a[0]), re(a[1]), re(a[2])]);
        tau_from_k(&maps, &pure_state(&psi)?, &v, Side::InComplement, &t)
    };
    for (i, want) in [4.0, 6.0, 10.0].into_iter().enumerate() {
        let mut a = [0.0; 3];
        a[i] = 1.0;
        ck.close(&format!("tau(e{})", i + 2), tau_of(a)?, want, 1e-8);
    }

    // Rows are [|α|², |β|², |δ|², Re αβ̄, Re αδ̄, Re βδ̄] at real unit vectors.
    let h = 0.5f64.sqrt();
    let points = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [h, h, 0.0], [h, 0.0, h], [0.0, h, h]];
    let design = DMatrix::from_fn(6, 6, |r, col| {
        let a = points[r];
        match col {
            0..=2 => a[col] * a[col],
            3 => a[0] * a[1],
            4 => a[0] * a[2],
            _ => a[1] * a[2],
        }
    });
    let rhs = DVector::from_iterator(6, points.iter().map(|&a| tau_of(a)).collect::<Result<Vec<_>>>()?);
    let coef = design.lu().solve(&rhs).ok_or_else(|| QhitError::Numerical("singular design".into()))?;
    for (i, want) in [4.0, 6.0, 10.0, 2.0, -2.0, -3.0].into_iter().enumerate() {
        ck.close(&format!("coefficient {i}"), coef[i], want, 1e-8);
    }
    Ok(())
}

fn classical_embedding(ck: &mut Checks) -> Result<()> {
    let t = tol();
    let mut rng = rng(0x5eed_0005);
    for trial in 0..10 {
        let n = 3 + trial % 3;
        let p = random_stochastic(&mut rng, n);
        let s = catalog::stochastic_embedding(&p, &t)?.represent();
        let z = fundamental_map(&s, &t)?;

        let b: Vec<Vec<ComplexMatrix>> =
            (0..n).map(|i| (0..n).map(|j| ComplexMatrix::from_element(1, 1, re(p[(i, j)].sqrt()))).collect()).collect();
        let q = Qmc::from_oqw(&b, &t)?;
        let ops = all_hitting_operators(&q, &t)?;
        let omega = q.fixed_map()?.omega;
        let params = HunterParams {
            t: random_unit_vector(&mut rng, n),
            u: random_unit_vector(&mut rng, n),
            f: random_unit_vector(&mut rng, n),
            g: random_unit_vector(&mut rng, n),
        };
        let g = hunter_ginverse(&q, params)?;
        let kernel = ksmh_kernel(ops.d(), &g.g, KernelVariant::General, Some(&omega), n, 1)?;
        let one = ComplexMatrix::from_element(1, 1, Complex64::ONE);

        for target in 0..n {
            let oracle = absorbing_hitting_times(&p, target);
            let jj = target * n + target;
            let pi_j = z.pi[(target, target)].re;
            for start in (0..n).filter(|&l| l != target) {
                let ii = start * n + start;
                let via_z = (z.z.mat()[(jj, jj)] - z.z.mat()[(jj, ii)]).re / pi_j;
                ck.close(&format!("chain {trial}: fundamental map {start}->{target}"), via_z, oracle[start], 1e-8);
                let via_g = tau_irreducible_qmc(&kernel, target, start, &one, &t)?;
                ck.close(&format!("chain {trial}: g-inverse kernel {start}->{target}"), via_g, oracle[start], 1e-8);
            }
        }
    }
    Ok(())
}

/// `(1/N) Σ_{m<N} Φ^m` for `N = 2^doublings`.
fn cesaro_mean(phi: &ComplexMatrix, doublings: u32) -> ComplexMatrix {
    let mut sum = identity(phi.nrows());
    let mut power = phi.clone();
    for _ in 0..doublings {
        sum = &sum + &power * &sum;
        power = &power * &power;
    }
    sum / c((1u64 << doublings) as f64, 0.0)
}

fn group_inverse_properties(ck: &mut Checks) -> Result<()> {
    let mut rng = rng(0x5eed_0006);
    let mut cesaro_worst: f64 = 0.0;
    for trial in 0..50 {
        let n = 2 + trial % 3;
        let rank = 2 + (trial / 3) % 3;
        let s = random_channel(&mut rng, n, rank).represent();
        let v = GoalSubspace::from_vectors(&[random_unit_vector(&mut rng, n)])?;
        let q = Qmc::induce(&s, &v)?;
        for (what, phi) in [("channel", s.mat().clone()), ("induced QMC", q.rep().clone())] {
            let label = format!("trial {trial} {what} (n={n}, rank={rank})");
            let a = identity(phi.nrows()) - &phi;
            let gi = group_inverse(&a)?;
            ck.ok(&format!("{label}: index"), gi.index() <= 1, || format!("index {}", gi.index()));
            // axiom_residual is already scaled by max(1, max|A|).
            let ax = gi.axiom_residual();
            ck.ok(&format!("{label}: axioms"), ax <= 1e-9, || format!("relative residual {ax:.3e}"));
            let lim = drazin_limit(&a, &DEFAULT_Z_SCHEDULE)?;
            ck.mat(&format!("{label}: z-limit"), &lim.value, gi.asharp(), 1e-6);
            let mean = cesaro_mean(&phi, 12);
            let err = max_abs_diff(&mean, &gi.ergodic_projector());
            cesaro_worst = cesaro_worst.max(err);
            ck.ok(&format!("{label}: Cesaro mean at N=4096"), err <= 1e-3, || {
                format!("error {err:.3e} > 1e-3, max|A#| = {:.3}", max_abs(gi.asharp()))
            });
        }
    }
    log_line(&format!("worst Cesaro deviation {cesaro_worst:.3e}"));
    Ok(())
}

fn log_line(msg: &str) {
    if std::env::var_os("QHIT_ACCEPTANCE_VERBOSE").is_some() {
        println!("       note: {msg}");
    }
}

fn random_irreducible_qubit(rng: &mut rand_chacha::ChaCha8Rng, t: &Tolerances) -> SuperOp {
    loop {
        let rank = 2 + rand::Rng::random_range(rng, 0..3);
        let s = random_channel(rng, 2, rank).represent();
        if diagnose(&s, t).is_irreducible {
            return s;
        }
    }
}

fn route_agreement(ck: &mut Checks) -> Result<()> {
    let t = tol();
    let mut rng = rng(0x5eed_0007);
    let registry = MethodRegistry::with_defaults();
    for trial in 0..20 {
        let s = random_irreducible_qubit(&mut rng, &t);
        let psi = random_unit_vector(&mut rng, 2);
        let perp = ComplexVector::from_vec(vec![-psi[1].conj(), psi[0].conj()]);
        let v = GoalSubspace::from_vectors(&[psi])?;
        let problem = HittingProblem::new(s.clone(), v.clone(), pure_state(&perp)?, &t)?;

        let mut taus = Vec::new();
        for method in registry.iter() {
            match method.evaluate(&problem, &t).map(|o| o.tau.finite()) {
                Ok(Some(tau)) => taus.push((method.name(), tau)),
                Ok(None) => ck.ok(&format!("trial {trial} {}", method.name()), false, || "infinite".into()),
                Err(e) => ck.ok(&format!("trial {trial} {}", method.name()), false, || e.to_string()),
            }
        }
        for (i, (na, ta)) in taus.iter().enumerate() {
            for (nb, tb) in &taus[i + 1..] {
                ck.close(&format!("trial {trial}: {na} vs {nb}"), *ta, *tb, 1e-6);
            }
        }

        let q = Qmc::induce(&s, &v)?;
        let ops = all_hitting_operators(&q, &t)?;
        let l = first_step_operator_l(&q, &ops)?;
        for i in 0..2 {
            for j in 0..2 {
                let rho = random_density(&mut rng, 2);
                let block = l.view((i * 4, j * 4), (4, 4)).into_owned();
                let tr = vec_identity(2).dotc(&(block * vec(&rho)));
                ck.close(&format!("trial {trial}: Tr(L_{i}{j} rho)"), tr.re, 1.0, 1e-8);
                ck.close(&format!("trial {trial}: Im Tr(L_{i}{j} rho)"), tr.im, 0.0, 1e-8);
            }
        }
    }
    Ok(())
}

fn ginverse_independence(ck: &mut Checks) -> Result<()> {
    let s = catalog::shear_pair().represent();
    let q = Qmc::induce(&s, &catalog::shear_pair_goal())?;
    let rho = catalog::shear_pair_start();
    let e = q.e_identity();
    let pi = q.unique_stationary()?.data().clone();
    let mut rng = rng(0x5eed_0008);
    let zero = ComplexVector::zeros(8);
    let mut family = vec![
        HunterParams::with_identity_functional(unit(8, 0), unit(8, 0), &e),
        HunterParams::with_identity_functional(unit(8, 0), zero.clone(), &e),
        HunterParams { t: pi, u: e.clone(), f: random_unit_vector(&mut rng, 8), g: zero },
    ];
    for _ in 0..2 {
        family.push(HunterParams {
            t: random_unit_vector(&mut rng, 8),
            u: random_unit_vector(&mut rng, 8),
            f: random_unit_vector(&mut rng, 8),
            g: random_unit_vector(&mut rng, 8),
        });
    }
    let mut results = Vec::new();
    for (i, params) in family.into_iter().enumerate() {
        let (g, tau) = hunter_kernel_tau(&q, params, &rho)?;
        results.push((g, tau));
        ck.close(&format!("parameterization {i}"), tau, results[0].1, 1e-8);
    }
    for i in 1..results.len() {
        let diff = max_abs_diff(&results[0].0, &results[i].0);
        ck.ok(&format!("parameterization {i} is a distinct g-inverse"), diff > 1e-6, || {
            format!("differs from the first by only {diff:.3e}")
        });
    }
    Ok(())
}

type Criterion = (&'static str, fn(&mut Checks) -> Result<()>);

fn main() {
    let criteria: [Criterion; 8] = [
        ("shear-pair-example", shear_pair_example),
        ("randomization-limit", randomization_limit),
        ("hadamard-walk", hadamard_walk),
        ("coined-walk", coined_walk),
        ("classical-embedding", classical_embedding),
        ("group-inverse-properties", group_inverse_properties),
        ("route-agreement", route_agreement),
        ("ginverse-independence", ginverse_independence),
    ];
    let mut failed = 0;
    let mut unexpected = 0;
    let mut seen = Vec::new();
    for (id, f) in criteria {
        let failures = run(id, f);
        if !failures.is_empty() {
            failed += 1;
        }
        for line in &failures {
            if listed(id, line) {
                seen.push(SELF_INCONSISTENT.iter().position(|&(c, l)| c == id && line.starts_with(&format!("{l}:"))));
            } else {
                unexpected += 1;
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    let stale: Vec<_> = (0..SELF_INCONSISTENT.len()).filter(|i| !seen.contains(&Some(*i))).collect();
    for i in &stale {
        let (c, l) = SELF_INCONSISTENT[*i];
        println!("listed check now passes: {c} / {l}");
    }
    if unexpected > 0 || !stale.is_empty() {
        std::process::exit(1);
    }
}
