// Copyright 2026 Qhit Contributors
// SPDX-License-Identifier: Apache-2.0

//! Deterministic report values: 12 significant digits, fixed key order.

use num_complex::Complex64;
use qhit_core::linalg::ComplexMatrix;
use qhit_core::monitor::MeanTime;
use serde_json::{json, Map, Value};

pub const DIGITS: usize = 12;
/// Magnitudes below this are roundoff and print as zero.
pub const FLUSH: f64 = 1e-13;

/// Round to 12 significant digits; tiny values and `-0` become `0`.
pub fn round(x: f64) -> f64 {
    if !x.is_finite() {
        return x;
    }
    if x.abs() < FLUSH {
        return 0.0;
    }
    let r: f64 = format!("{:.*e}", DIGITS - 1, x).parse().expect("formatted float parses");
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

pub fn num(x: f64) -> Value {
    if x.is_nan() {
        Value::String("nan".into())
    } else if x.is_infinite() {
        Value::String(if x > 0.0 { "inf" } else { "-inf" }.into())
    } else {
        json!(round(x))
    }
}

pub fn complex(z: Complex64) -> Value {
    json!([num(z.re), num(z.im)])
}

pub fn matrix(m: &ComplexMatrix) -> Value {
    Value::Array((0..m.nrows()).map(|i| Value::Array((0..m.ncols()).map(|j| complex(m[(i, j)])).collect())).collect())
}

pub fn mean_time(t: MeanTime) -> Value {
    match t {
        MeanTime::Finite(x) => num(x),
        MeanTime::Infinite => Value::String("inf".into()),
    }
}

pub fn fmt_complex(z: Complex64) -> String {
    let (re, im) = (round(z.re), round(z.im));
    if im == 0.0 {
        format!("{re}")
    } else if im < 0.0 {
        format!("{re}-{}i", -im)
    } else {
        format!("{re}+{im}i")
    }
}

/// Indented plain-text dump of a report value.
pub fn render_text(v: &Value) -> String {
    let mut out = String::new();
    render(v, 0, &mut out);
    out
}

fn is_complex_pair(v: &Value) -> bool {
    let part = |x: &Value| x.is_number() || matches!(x.as_str(), Some("inf" | "-inf" | "nan"));
    matches!(v, Value::Array(a) if a.len() == 2 && a.iter().all(part))
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Array(a) if is_complex_pair(v) => {
            let part = |x: &Value| x.as_f64().unwrap_or(f64::NAN);
            fmt_complex(Complex64::new(part(&a[0]), part(&a[1])))
        }
        Value::Array(a) => format!("[{}]", a.iter().map(scalar).collect::<Vec<_>>().join(", ")),
        other => other.to_string(),
    }
}

fn is_matrix(v: &Value) -> bool {
    matches!(v, Value::Array(rows) if !rows.is_empty()
        && rows.iter().all(|r| matches!(r, Value::Array(c) if c.iter().all(is_complex_pair)) && !is_complex_pair(r)))
}

fn render(v: &Value, depth: usize, out: &mut String) {
    let pad = "  ".repeat(depth);
    match v {
        Value::Object(map) => render_map(map, depth, out),
        Value::Array(items) if is_matrix(v) => {
            for row in items {
                let cells: Vec<String> = row.as_array().expect("matrix row").iter().map(scalar).collect();
                out.push_str(&format!("{pad}{}\n", cells.join("  ")));
            }
        }
        Value::Array(items) if items.iter().any(|x| x.is_object()) => {
            for (i, item) in items.iter().enumerate() {
                out.push_str(&format!("{pad}- [{i}]\n"));
                render(item, depth + 1, out);
            }
        }
        other => out.push_str(&format!("{pad}{}\n", scalar(other))),
    }
}

fn render_map(map: &Map<String, Value>, depth: usize, out: &mut String) {
    let pad = "  ".repeat(depth);
    for (k, v) in map {
        match v {
            Value::Object(_) => {
                out.push_str(&format!("{pad}{k}:\n"));
                render(v, depth + 1, out);
            }
            Value::Array(items) if is_matrix(v) || items.iter().any(|x| x.is_object()) => {
                out.push_str(&format!("{pad}{k}:\n"));
                render(v, depth + 1, out);
            }
            _ => out.push_str(&format!("{pad}{k}: {}\n", scalar(v))),
        }
    }
}
