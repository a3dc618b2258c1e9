// Copyright 2026 Qhit Contributors
// SPDX-License-Identifier: Apache-2.0

//! `qhit`: mean hitting times of quantum channels from JSON spec files.
//!
//! Exit codes: 0 success, 2 invalid input, 3 no method applicable,
//! 4 numerical failure.

mod report;
mod spec;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use qhit_core::channel::{assumption_one, diagnose, is_completely_positive};
use qhit_core::ginverse::{drazin_limit, group_inverse, hunter_ginverse, HunterParams, DEFAULT_Z_SCHEDULE};
use qhit_core::ksmh::{kernel_limit_study, LimitGauge};
use qhit_core::linalg::{identity, max_abs_diff, ComplexMatrix, ComplexVector};
use qhit_core::methods::{HittingProblem, MethodRegistry};
use qhit_core::qmc::Qmc;
use qhit_core::{QhitError, Tolerances};
use serde_json::{json, Map, Value};

use report::{complex, matrix, mean_time, num};
use spec::{ChannelSpec, Kind, SpecError};

#[derive(Parser)]
#[command(name = "qhit", version, about = "Mean hitting times of quantum channels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Print the report as JSON.
    #[arg(long, global = true)]
    json: bool,
    /// Entrywise tolerance for trace, positivity and support checks.
    #[arg(long, global = true, value_name = "FLOAT")]
    tol: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Check a channel spec and print its diagnostics.
    Validate { spec: PathBuf },
    /// Mean hitting time of the goal subspace from the initial state.
    Hitting {
        spec: PathBuf,
        /// A registered method name, or "all".
        #[arg(long, default_value = "all")]
        method: String,
        /// Include intermediate matrices in the report.
        #[arg(long)]
        dump_intermediates: bool,
    },
    /// Group inverse or Hunter g-inverse of I − Φ.
    Ginverse {
        spec: PathBuf,
        #[arg(long, value_enum, default_value_t = GKind::Group)]
        kind: GKind,
    },
    /// Hitting times of a randomization as its weight goes to zero.
    Sweep {
        spec: PathBuf,
        /// Swept parameter; only the mixing weight "p" is supported.
        #[arg(long, default_value = "p")]
        param: String,
        #[arg(long, value_delimiter = ',', required = true, num_args = 1..)]
        values: Vec<f64>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum GKind {
    Group,
    Hunter,
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<SpecError> for Failure {
    fn from(e: SpecError) -> Self {
        match e {
            SpecError::Invalid(q) => q.into(),
            other => Failure { code: 2, message: other.to_string() },
        }
    }
}

impl From<QhitError> for Failure {
    fn from(e: QhitError) -> Self {
        Failure { code: exit_code(&e), message: e.to_string() }
    }
}

fn exit_code(e: &QhitError) -> u8 {
    match e {
        QhitError::Dimension(_) | QhitError::Validation(_) | QhitError::Parameter(_) => 2,
        QhitError::SpectralObstruction { .. } | QhitError::Reducible(_) | QhitError::NoGroupInverse(_) => 3,
        QhitError::Numerical(_) => 4,
    }
}

fn error_kind(e: &QhitError) -> &'static str {
    match e {
        QhitError::Dimension(_) => "dimension",
        QhitError::Validation(_) => "validation",
        QhitError::SpectralObstruction { .. } => "spectral-obstruction",
        QhitError::Reducible(_) => "reducible",
        QhitError::NoGroupInverse(_) => "no-group-inverse",
        QhitError::Parameter(_) => "parameter",
        QhitError::Numerical(_) => "numerical",
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let mut tol = Tolerances::default();
    if let Some(t) = cli.tol {
        if !(t.is_finite() && t > 0.0) {
            eprintln!("error: --tol must be a positive number");
            return ExitCode::from(2);
        }
        tol.entry = t;
        tol.psd = t;
    }
    let result = match &cli.command {
        Command::Validate { spec } => cmd_validate(spec, &tol),
        Command::Hitting { spec, method, dump_intermediates } => cmd_hitting(spec, method, *dump_intermediates, &tol),
        Command::Ginverse { spec, kind } => cmd_ginverse(spec, *kind, &tol),
        Command::Sweep { spec, param, values } => cmd_sweep(spec, param, values, &tol),
    };
    let (value, code) = match result {
        Ok(ok) => ok,
        Err(f) => {
            if cli.json {
                let v = json!({"status": "error", "exit_code": f.code, "error": f.message});
                emit(&format!("{}\n", serde_json::to_string_pretty(&v).expect("serializable")));
            } else {
                eprintln!("error: {}", f.message);
            }
            return ExitCode::from(f.code);
        }
    };
    if cli.json {
        emit(&format!("{}\n", serde_json::to_string_pretty(&value).expect("serializable")));
    } else {
        emit(&report::render_text(&value));
    }
    ExitCode::from(code)
}

/// Write to stdout; a closed pipe is not an error.
fn emit(text: &str) {
    use std::io::Write;
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

type Outcome = Result<(Value, u8), Failure>;

fn input_echo(path: &Path, spec: &ChannelSpec) -> Value {
    let mut m = Map::new();
    m.insert("file".into(), json!(path.display().to_string()));
    m.insert("dim".into(), json!(spec.dim));
    m.insert("kind".into(), json!(spec.kind.name()));
    if let Some(sub) = &spec.subspace {
        m.insert("subspace_dim".into(), json!(sub.len()));
    }
    Value::Object(m)
}

fn eigen_list(zs: &[Complex64]) -> Value {
    let mut zs = zs.to_vec();
    zs.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Value::Array(zs.into_iter().map(complex).collect())
}

fn cmd_validate(path: &Path, tol: &Tolerances) -> Outcome {
    let spec = spec::load(path)?;
    if spec.kind == Kind::Matrix {
        return Err(Failure { code: 2, message: "kind \"matrix\" is only accepted by ginverse".into() });
    }
    let s = spec.superop_unchecked()?;
    let d = diagnose(&s, tol);
    let mut problems = Vec::new();
    if !d.is_trace_preserving {
        problems.push(format!("not trace preserving: deviation {:.3e}", d.tp_deviation));
    }
    let cp = is_completely_positive(&s, tol);
    if !cp {
        problems.push("Choi matrix has a negative eigenvalue".to_string());
    }

    let mut out = Map::new();
    out.insert("command".into(), json!("validate"));
    out.insert("input".into(), input_echo(path, &spec));
    out.insert(
        "diagnostics".into(),
        json!({
            "is_trace_preserving": d.is_trace_preserving,
            "tp_deviation": num(d.tp_deviation),
            "completely_positive": cp,
            "is_unital": d.is_unital,
            "fixed_space_dim": d.fixed_space_dim,
            "fixed_space_ambiguous": d.fixed_space_ambiguous,
            "is_irreducible": d.is_irreducible,
            "fixed_density_min_eig": d.fixed_density_min_eig.map_or(Value::Null, num),
            "spectral_radius": num(d.spectral_radius),
            "peripheral_eigenvalues": eigen_list(&d.peripheral_eigenvalues),
            "jordan_trivial_at_1": d.jordan_trivial_at_1,
        }),
    );
    match spec.subspace() {
        Ok(Some(v)) if d.is_trace_preserving => {
            let a1 = assumption_one(&s, &v, tol)?;
            let radius = a1.spectrum.iter().map(|z| z.norm()).fold(0.0, f64::max);
            out.insert(
                "assumption_one".into(),
                json!({
                    "holds": a1.holds,
                    "spectral_radius_qt": num(radius),
                    "offending": eigen_list(&a1.offending),
                }),
            );
        }
        Ok(_) => {}
        Err(e) => problems.push(format!("subspace: {e}")),
    }
    if let Err(e) = spec.initial_state(tol) {
        problems.push(format!("initial state: {e}"));
    }
    let valid = problems.is_empty();
    out.insert("valid".into(), json!(valid));
    out.insert("problems".into(), json!(problems));
    Ok((Value::Object(out), if valid { 0 } else { 2 }))
}

fn hitting_problem(spec: &ChannelSpec, tol: &Tolerances) -> Result<HittingProblem, Failure> {
    let s = spec.superop()?;
    let v = spec.subspace()?.ok_or_else(|| Failure { code: 2, message: "spec needs a \"subspace\"".into() })?;
    let rho = spec
        .initial_state(tol)?
        .ok_or_else(|| Failure { code: 2, message: "spec needs an \"initial_state\"".into() })?;
    Ok(HittingProblem::new(s, v, rho, tol)?)
}

fn cmd_hitting(path: &Path, method: &str, dump: bool, tol: &Tolerances) -> Outcome {
    let spec = spec::load(path)?;
    let problem = hitting_problem(&spec, tol)?;
    let registry = MethodRegistry::with_defaults();
    let selected: Vec<&dyn qhit_core::methods::HittingMethod> = if method == "all" {
        registry.iter().collect()
    } else {
        vec![registry.get(method).ok_or_else(|| Failure {
            code: 2,
            message: format!("unknown method {method:?}; known: {}", registry.names().join(", ")),
        })?]
    };

    let d = diagnose(&problem.s, tol);
    let a1 = assumption_one(&problem.s, &problem.v, tol)?;
    let mut results = Vec::new();
    let mut finite = Vec::new();
    let mut all_numerical = true;
    for m in &selected {
        let mut entry = Map::new();
        entry.insert("method".into(), json!(m.name()));
        match m.evaluate(&problem, tol) {
            Ok(out) => {
                all_numerical = false;
                entry.insert("status".into(), json!("ok"));
                entry.insert("tau".into(), mean_time(out.tau));
                entry.insert("verified".into(), json!(out.verified));
                entry.insert("notes".into(), json!(out.notes));
                if dump {
                    let mats: Map<String, Value> = out.artifacts.iter().map(|(k, v)| (k.clone(), matrix(v))).collect();
                    entry.insert("intermediates".into(), Value::Object(mats));
                }
                if let Some(t) = out.tau.finite() {
                    finite.push((m.name(), t));
                }
            }
            Err(e) => {
                all_numerical &= matches!(e, QhitError::Numerical(_));
                entry.insert("status".into(), json!("error"));
                entry.insert("error_kind".into(), json!(error_kind(&e)));
                entry.insert("error".into(), json!(e.to_string()));
            }
        }
        results.push(Value::Object(entry));
    }
    let succeeded = results.iter().filter(|r| r["status"] == "ok").count();

    let mut out = Map::new();
    out.insert("command".into(), json!("hitting"));
    out.insert("input".into(), input_echo(path, &spec));
    out.insert(
        "diagnostics".into(),
        json!({
            "is_irreducible": d.is_irreducible,
            "fixed_space_dim": d.fixed_space_dim,
            "assumption_one": a1.holds,
            "offending": eigen_list(&a1.offending),
        }),
    );
    out.insert("methods".into(), Value::Array(results));
    if finite.len() > 1 {
        let mut pairs = Vec::new();
        let mut worst: f64 = 0.0;
        for (i, (na, ta)) in finite.iter().enumerate() {
            for (nb, tb) in &finite[i + 1..] {
                let delta = (ta - tb).abs();
                worst = worst.max(delta);
                pairs.push(json!({"a": na, "b": nb, "delta": num(delta)}));
            }
        }
        out.insert("agreement".into(), json!({"max_delta": num(worst), "pairs": pairs}));
    }
    let code = match (succeeded, all_numerical) {
        (0, true) => 4,
        (0, false) => 3,
        _ => 0,
    };
    Ok((Value::Object(out), code))
}

fn params_vector(
    raw: &Option<spec::RawVector>,
    n: usize,
    default: ComplexVector,
    name: &str,
) -> Result<ComplexVector, Failure> {
    match raw {
        None => Ok(default),
        Some(r) => {
            let v = spec::vector(r);
            if v.len() != n {
                return Err(Failure { code: 2, message: format!("{name} must have length {n}") });
            }
            Ok(v)
        }
    }
}

fn unit(n: usize, i: usize) -> ComplexVector {
    let mut v = ComplexVector::zeros(n);
    v[i] = Complex64::ONE;
    v
}

fn cmd_ginverse(path: &Path, kind: GKind, tol: &Tolerances) -> Outcome {
    let spec = spec::load(path)?;
    let (target, qmc, a): (&str, Option<Qmc>, ComplexMatrix) = if spec.kind == Kind::Matrix {
        ("matrix", None, spec.bare_matrix()?)
    } else {
        let s = spec.superop()?;
        let q = match spec.subspace()? {
            Some(v) => Qmc::induce(&s, &v)?,
            None => Qmc::from_rep(1, s.dim(), s.mat().clone(), tol)?,
        };
        let a = identity(q.order()) - q.rep();
        (if spec.subspace.is_some() { "I - Phi (induced QMC)" } else { "I - T" }, Some(q), a)
    };

    let mut out = Map::new();
    out.insert("command".into(), json!("ginverse"));
    out.insert("input".into(), input_echo(path, &spec));
    out.insert("target".into(), json!(target));
    match kind {
        GKind::Group => {
            let gi = group_inverse(&a)?;
            out.insert("kind".into(), json!("group"));
            out.insert("index".into(), json!(gi.index()));
            out.insert("nullity".into(), json!(gi.nullity()));
            out.insert("matrix".into(), matrix(gi.asharp()));
            let limit = match drazin_limit(&a, &DEFAULT_Z_SCHEDULE) {
                Ok(l) => num(max_abs_diff(&l.value, gi.asharp())),
                Err(e) => json!(e.to_string()),
            };
            out.insert(
                "checks".into(),
                json!({
                    "axiom_residual": num(gi.axiom_residual()),
                    "similarity_condition": num(gi.similarity_condition),
                    "resolvent_limit_delta": limit,
                }),
            );
        }
        GKind::Hunter => {
            let q = qmc.ok_or_else(|| Failure {
                code: 2,
                message: "the Hunter family needs a channel, not a bare matrix".into(),
            })?;
            let n = q.order();
            let e = q.e_identity();
            let h = spec.hunter.clone().unwrap_or_default();
            let params = HunterParams {
                t: params_vector(&h.t, n, unit(n, 0), "hunter.t")?,
                u: params_vector(&h.u, n, e.clone(), "hunter.u")?,
                f: params_vector(&h.f, n, ComplexVector::zeros(n), "hunter.f")?,
                g: params_vector(&h.g, n, ComplexVector::zeros(n), "hunter.g")?,
            };
            let g = hunter_ginverse(&q, params)?;
            out.insert("kind".into(), json!("hunter"));
            out.insert("matrix".into(), matrix(&g.g));
            out.insert("checks".into(), json!({"g_inverse_residual": num(g.residual())}));
        }
    }
    Ok((Value::Object(out), 0))
}

fn cmd_sweep(path: &Path, param: &str, values: &[f64], tol: &Tolerances) -> Outcome {
    if param != "p" {
        return Err(Failure {
            code: 2,
            message: format!("unknown sweep parameter {param:?}; only \"p\" is supported"),
        });
    }
    let spec = spec::load(path)?;
    let mix = spec
        .mix
        .as_ref()
        .filter(|_| spec.kind == Kind::Randomization)
        .ok_or_else(|| Failure { code: 2, message: "sweep needs a randomization spec".into() })?;
    let problem = hitting_problem(&spec, tol)?;
    let (t, m_prime) = (mix.left.superop()?, mix.right.superop()?);
    let n2 = 2 * spec.dim * spec.dim;
    let gauge_spec = spec.gauge.clone().unwrap_or_default();
    let gauge = LimitGauge {
        t: params_vector(&gauge_spec.t, n2, unit(n2, 0), "gauge.t")?,
        f: params_vector(&gauge_spec.f, n2, ComplexVector::zeros(n2), "gauge.f")?,
    };
    let study = kernel_limit_study(&t, &m_prime, &problem.v, values, &gauge, &problem.rho, tol)?;

    let rows: Vec<Value> =
        study.rows.iter().map(|r| json!({"p": num(r.p), "tau": num(r.tau), "g_norm": num(r.g_norm)})).collect();
    let direct = match (&study.h0_direct, study.tau0_direct) {
        (Ok(_), Some(tau)) => json!({"tau": num(tau)}),
        (Err(e), _) => json!({"error": e}),
        (Ok(_), None) => json!({"error": "no value"}),
    };
    let mut out = Map::new();
    out.insert("command".into(), json!("sweep"));
    out.insert("input".into(), input_echo(path, &spec));
    out.insert("param".into(), json!(param));
    out.insert("rows".into(), Value::Array(rows));
    out.insert("extrapolated".into(), json!({"tau": num(study.tau0_extrapolated)}));
    out.insert("direct".into(), direct);
    out.insert("g_diverges".into(), json!(study.g_diverges));
    out.insert("h_converges".into(), json!(study.h_converges));
    Ok((Value::Object(out), 0))
}
