// Copyright 2026 Qhit Contributors
// SPDX-License-Identifier: Apache-2.0

//! Channel spec files.
//!
//! Complex entries are `[re, im]` pairs; a bare number is read as real.
//! Matrices are row-major nested arrays.

use std::path::Path;

use num_complex::Complex64;
use qhit_core::channel::{validate_density, GoalSubspace, KrausChannel};
use qhit_core::linalg::{outer, ComplexMatrix, ComplexVector};
use qhit_core::{QhitError, SuperOp, Tolerances};
use serde::Deserialize;

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Pair([f64; 2]),
    Real(f64),
}

impl Entry {
    fn value(self) -> Complex64 {
        match self {
            Entry::Pair([re, im]) => Complex64::new(re, im),
            Entry::Real(re) => Complex64::new(re, 0.0),
        }
    }
}

pub type RawMatrix = Vec<Vec<Entry>>;
pub type RawVector = Vec<Entry>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Kraus,
    Unitary,
    Superop,
    Randomization,
    /// A bare square matrix, for `ginverse` only.
    Matrix,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Kraus => "kraus",
            Kind::Unitary => "unitary",
            Kind::Superop => "superop",
            Kind::Randomization => "randomization",
            Kind::Matrix => "matrix",
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Mix {
    pub p: f64,
    pub left: Box<ChannelSpec>,
    pub right: Box<ChannelSpec>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum InitialState {
    Vector(RawVector),
    Matrix(RawMatrix),
}

/// Optional Hunter-family parameters; missing vectors take defaults.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HunterSpec {
    pub t: Option<RawVector>,
    pub u: Option<RawVector>,
    pub f: Option<RawVector>,
    pub g: Option<RawVector>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSpec {
    pub dim: usize,
    pub kind: Kind,
    #[serde(default)]
    pub kraus: Option<Vec<RawMatrix>>,
    #[serde(default)]
    pub unitary: Option<RawMatrix>,
    #[serde(default)]
    pub superop: Option<RawMatrix>,
    #[serde(default)]
    pub matrix: Option<RawMatrix>,
    #[serde(default)]
    pub mix: Option<Mix>,
    #[serde(default)]
    pub subspace: Option<Vec<RawVector>>,
    #[serde(default)]
    pub initial_state: Option<InitialState>,
    #[serde(default)]
    pub hunter: Option<HunterSpec>,
    /// Gauge `(t, f)` for sweeps; defaults to `t = e_1`, `f = 0`.
    #[serde(default)]
    pub gauge: Option<HunterSpec>,
}

/// Failure to read or decode a spec file.
#[derive(Debug)]
pub enum SpecError {
    Io(String),
    Parse { path: String, message: String },
    Invalid(QhitError),
}

impl std::fmt::Display for SpecError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SpecError::Io(m) => write!(f, "cannot read spec: {m}"),
            SpecError::Parse { path, message } => write!(f, "parse error at {path}: {message}"),
            SpecError::Invalid(e) => write!(f, "{e}"),
        }
    }
}

impl From<QhitError> for SpecError {
    fn from(e: QhitError) -> Self {
        SpecError::Invalid(e)
    }
}

pub fn load(path: &Path) -> Result<ChannelSpec, SpecError> {
    let text = std::fs::read_to_string(path).map_err(|e| SpecError::Io(format!("{}: {e}", path.display())))?;
    parse(&text)
}

pub fn parse(text: &str) -> Result<ChannelSpec, SpecError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de)
        .map_err(|e| SpecError::Parse { path: e.path().to_string(), message: e.inner().to_string() })
}

fn invalid(msg: impl Into<String>) -> SpecError {
    SpecError::Invalid(QhitError::Validation(msg.into()))
}

pub fn matrix(raw: &RawMatrix, field: &str) -> Result<ComplexMatrix, SpecError> {
    let rows = raw.len();
    let cols = raw.first().map_or(0, Vec::len);
    if rows == 0 || cols == 0 || raw.iter().any(|r| r.len() != cols) {
        return Err(SpecError::Invalid(QhitError::Dimension(format!("{field}: ragged or empty matrix"))));
    }
    Ok(ComplexMatrix::from_fn(rows, cols, |i, j| raw[i][j].value()))
}

pub fn vector(raw: &RawVector) -> ComplexVector {
    ComplexVector::from_iterator(raw.len(), raw.iter().map(|e| e.value()))
}

fn require<'a, T>(v: &'a Option<T>, field: &str, kind: Kind) -> Result<&'a T, SpecError> {
    v.as_ref().ok_or_else(|| invalid(format!("kind \"{}\" needs the field \"{field}\"", kind.name())))
}

impl ChannelSpec {
    /// The Kraus set, for the kinds that have one.
    pub fn kraus_channel(&self) -> Result<Option<KrausChannel>, SpecError> {
        let ops = match self.kind {
            Kind::Kraus => require(&self.kraus, "kraus", self.kind)?
                .iter()
                .enumerate()
                .map(|(i, m)| matrix(m, &format!("kraus[{i}]")))
                .collect::<Result<Vec<_>, _>>()?,
            Kind::Unitary => vec![matrix(require(&self.unitary, "unitary", self.kind)?, "unitary")?],
            _ => return Ok(None),
        };
        if ops.iter().any(|m| m.shape() != (self.dim, self.dim)) {
            return Err(SpecError::Invalid(QhitError::Dimension(format!("operators must be {0}x{0}", self.dim))));
        }
        Ok(Some(KrausChannel::new(ops)?))
    }

    /// Superoperator, without the trace-preservation check.
    pub fn superop_unchecked(&self) -> Result<SuperOp, SpecError> {
        match self.kind {
            Kind::Kraus | Kind::Unitary => Ok(self.kraus_channel()?.expect("has Kraus operators").represent()),
            Kind::Superop => {
                Ok(SuperOp::new(self.dim, matrix(require(&self.superop, "superop", self.kind)?, "superop")?)?)
            }
            Kind::Randomization => {
                let mix = require(&self.mix, "mix", self.kind)?;
                self.randomized(mix.p)
            }
            Kind::Matrix => Err(invalid("kind \"matrix\" describes no channel")),
        }
    }

    /// `p·left + (1 − p)·right` for a randomization spec.
    pub fn randomized(&self, p: f64) -> Result<SuperOp, SpecError> {
        let mix = require(&self.mix, "mix", self.kind)?;
        let (left, right) = (mix.left.superop()?, mix.right.superop()?);
        if left.dim() != self.dim || right.dim() != self.dim {
            return Err(SpecError::Invalid(QhitError::Dimension("mixed channels must have the spec dimension".into())));
        }
        Ok(qhit_core::channel::randomize(&left, &right, p)?)
    }

    /// Trace-preserving superoperator.
    pub fn superop(&self) -> Result<SuperOp, SpecError> {
        let s = self.superop_unchecked()?;
        let tol = Tolerances::default();
        let dev = qhit_core::channel::diagnose(&s, &tol).tp_deviation;
        if dev > tol.entry {
            return Err(invalid(format!("map is not trace preserving (deviation {dev:.3e})")));
        }
        Ok(s)
    }

    pub fn subspace(&self) -> Result<Option<GoalSubspace>, SpecError> {
        let Some(raw) = &self.subspace else { return Ok(None) };
        let vs: Vec<ComplexVector> = raw.iter().map(vector).collect();
        if vs.iter().any(|v| v.len() != self.dim) {
            return Err(SpecError::Invalid(QhitError::Dimension(format!(
                "subspace vectors must have length {}",
                self.dim
            ))));
        }
        Ok(Some(GoalSubspace::from_vectors(&vs)?))
    }

    /// The initial density: a vector is normalized into a pure state.
    pub fn initial_state(&self, tol: &Tolerances) -> Result<Option<ComplexMatrix>, SpecError> {
        let rho = match &self.initial_state {
            None => return Ok(None),
            Some(InitialState::Vector(v)) => {
                let v = vector(v);
                let n = v.norm();
                if n == 0.0 {
                    return Err(invalid("initial state vector is zero"));
                }
                let v = v / Complex64::new(n, 0.0);
                outer(&v, &v)
            }
            Some(InitialState::Matrix(m)) => matrix(m, "initial_state")?,
        };
        if rho.shape() != (self.dim, self.dim) {
            return Err(SpecError::Invalid(QhitError::Dimension(format!("initial state must be {0}x{0}", self.dim))));
        }
        validate_density(&rho, tol)?;
        Ok(Some(rho))
    }

    pub fn bare_matrix(&self) -> Result<ComplexMatrix, SpecError> {
        let m = matrix(require(&self.matrix, "matrix", self.kind)?, "matrix")?;
        if !m.is_square() {
            return Err(SpecError::Invalid(QhitError::Dimension("matrix must be square".into())));
        }
        Ok(m)
    }
}
