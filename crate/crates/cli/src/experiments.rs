//! Scalar sweeps written as CSV with header `parameter,value,certified_error`.
//!
//! - `fen-uniform-limit`: FEN of the uniform spectrum `(1/n, …, 1/n)`, which is
//!   `(n+1)·ln(1 + 1/n)` and decreases to 1.
//! - `gramian-dim-sweep`: gramian volume of the maximally entangled state in
//!   `d × d`, `(1 + 1/d)^d`, increasing to `e`.
//! - `plemelj-convergence`: truncated Plemelj determinants by order, with the
//!   geometric tail bound as certified error.
//!
//! Uniform sweeps are evaluated in closed form; no matrices are built. Their
//! certified error is a floating-point rounding bound.

use std::str::FromStr;

use fredent_core::fredholm::det_plemelj;
use fredent_core::{Error, Result, TraceClassOperator};
use num_complex::Complex64;

use crate::output::sci;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExperimentRow {
    pub parameter: u64,
    pub value: f64,
    pub certified_error: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    FenUniformLimit,
    GramianDimSweep,
    PlemeljConvergence,
}

impl Experiment {
    pub const NAMES: [&'static str; 3] = ["fen-uniform-limit", "gramian-dim-sweep", "plemelj-convergence"];
}

impl FromStr for Experiment {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "fen-uniform-limit" => Ok(Experiment::FenUniformLimit),
            "gramian-dim-sweep" => Ok(Experiment::GramianDimSweep),
            "plemelj-convergence" => Ok(Experiment::PlemeljConvergence),
            other => Err(format!(
                "UnknownExperiment: '{other}' (expected one of {})",
                Experiment::NAMES.join(", ")
            )),
        }
    }
}

/// Roughly `points` integers from 1 to `max`, evenly spaced in log scale.
pub fn log_spaced(max: u64, points: usize) -> Vec<u64> {
    let max = max.max(1);
    if points <= 1 || max == 1 {
        return vec![1, max].into_iter().collect::<std::collections::BTreeSet<_>>().into_iter().collect();
    }
    let top = (max as f64).ln();
    let mut out: Vec<u64> = (0..points)
        .map(|k| ((top * k as f64 / (points - 1) as f64).exp().round() as u64).clamp(1, max))
        .collect();
    out.push(max);
    out.sort_unstable();
    out.dedup();
    out
}

/// `(n+1)·ln(1 + 1/n)`.
pub fn fen_uniform_limit(max_n: u64, points: usize) -> Vec<ExperimentRow> {
    log_spaced(max_n, points)
        .into_iter()
        .map(|n| {
            let value = fredent_core::entropy::fen_uniform(n);
            ExperimentRow {
                parameter: n,
                value,
                certified_error: 4.0 * f64::EPSILON * value,
            }
        })
        .collect()
}

/// `(1 + 1/d)^d = ∏ (1 + τ_n²)` with `τ_n² = 1/d`.
pub fn gramian_dim_sweep(max_d: u64, points: usize) -> Vec<ExperimentRow> {
    log_spaced(max_d, points)
        .into_iter()
        .map(|d| {
            let log_g = d as f64 * (1.0 / d as f64).ln_1p();
            let value = log_g.exp();
            ExperimentRow {
                parameter: d,
                value,
                certified_error: 6.0 * f64::EPSILON * value,
            }
        })
        .collect()
}

/// Truncated Plemelj determinants `det_N(I + zA)` for `N = 1..=max_order`.
///
/// With `r = ‖A‖₁·|z|·(|z|ρ)^N / ((N+1)(1 − |z|ρ))` bounding the omitted
/// log-series tail, `|det − det_N| ≤ |det_N|·(e^r − 1)`.
pub fn plemelj_convergence(a: &TraceClassOperator, z: Complex64, max_order: usize) -> Result<Vec<ExperimentRow>> {
    let q = z.norm() * a.spectral_radius();
    if q >= 1.0 {
        return Err(Error::ConvergenceDomain(q));
    }
    (1..=max_order.max(1))
        .map(|order| {
            let det = det_plemelj(a, z, order)?;
            let used = det.truncation_order.unwrap_or(order) as i32;
            let tail = a.trace_norm() * z.norm() * q.powi(used) / ((used as f64 + 1.0) * (1.0 - q));
            let certified_error = det.value.norm() * tail.exp_m1() + 8.0 * f64::EPSILON * det.value.norm();
            Ok(ExperimentRow {
                parameter: order as u64,
                value: det.value.re,
                certified_error,
            })
        })
        .collect()
}

pub fn to_csv(rows: &[ExperimentRow]) -> String {
    let mut out = String::from("parameter,value,certified_error\n");
    for r in rows {
        out.push_str(&format!("{},{},{}\n", r.parameter, sci(r.value), sci(r.certified_error)));
    }
    out
}
