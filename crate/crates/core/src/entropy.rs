//! Renormalized entropies `FEN±`, the entropy-generating operators `S±`,
//! the renormalized logarithm `log(I + Q)` and its Fréchet derivative.
//!
//! All logarithms are natural. For a state with spectrum `λ`,
//!
//! ```text
//! FEN₊(Q) = Σ (1 + λ_k) ln(1 + λ_k),    FEN₋(Q) = −FEN₊(Q),
//! S±(Q)   = (I + Q)^{±(I + Q)} − I.
//! ```
//!
//! Truncated spectra carry a certified tail bound: each omitted eigenvalue
//! contributes at most `(1 + λ) ln(1 + λ) ≤ λ² + λ ≤ 2λ`.

use serde::Serialize;
use serde_json::json;

use crate::error::{Error, Result};
use crate::io::matrix_json;
use crate::linalg::{
    hermitian_eig, hermitize, kahan_sum, matrix_function, trace_norm, ComplexMatrix, DensityMatrix, Spectrum,
    TraceClassOperator,
};
use crate::report::ClaimReport;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FenValue {
    pub plus: f64,
    pub minus: f64,
    /// Certified bound on the contribution of eigenvalues not included.
    pub tail_bound: f64,
}

impl FenValue {
    fn from_plus(plus: f64, tail_bound: f64) -> Self {
        FenValue {
            plus,
            minus: -plus,
            tail_bound,
        }
    }
}

/// `(1 + x) ln(1 + x)`.
pub fn fen_term(x: f64) -> f64 {
    (1.0 + x) * x.ln_1p()
}

/// `Σ (1 + λ) ln(1 + λ)` over arbitrary non-negative values.
pub fn fen_of_values<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    kahan_sum(values.into_iter().map(fen_term))
}

pub fn fen(q: &DensityMatrix) -> FenValue {
    FenValue::from_plus(fen_of_values(q.spectrum().iter()), 0.0)
}

/// `FEN₊` of a trace-class operator (not necessarily unit trace).
pub fn fen_operator(q: &TraceClassOperator) -> FenValue {
    FenValue::from_plus(fen_of_values(q.spectrum().iter()), 0.0)
}

/// FEN over the leading `keep` values with tail bound `2·(1 − Σ_{k≤keep} λ_k)`.
pub fn fen_truncated(spectrum: &Spectrum, keep: usize) -> Result<FenValue> {
    if keep > spectrum.len() {
        return Err(Error::KeepOutOfRange {
            keep,
            len: spectrum.len(),
        });
    }
    let head = &spectrum.values()[..keep];
    if let Some(bad) = head.iter().find(|v| v.is_nan() || **v < 0.0) {
        return Err(Error::InvalidSequence(format!("negative spectrum value {bad}")));
    }
    let kept_mass = kahan_sum(head.iter().copied());
    let tail_bound = (2.0 * (1.0 - kept_mass)).max(0.0);
    Ok(FenValue::from_plus(fen_of_values(head.iter().copied()), tail_bound))
}

/// Closed form `(n + 1) ln(1 + 1/n)` of FEN for the uniform spectrum `1/n` repeated `n` times.
pub fn fen_uniform(n: u64) -> f64 {
    let x = 1.0 / n as f64;
    (n as f64 + 1.0) * x.ln_1p()
}

/// Standard von Neumann entropy `−Σ λ ln λ`, for comparison only.
pub fn von_neumann_entropy(q: &DensityMatrix) -> f64 {
    -kahan_sum(q.spectrum().iter().filter(|&l| l > 0.0).map(|l| l * l.ln()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Sign {
    Plus,
    Minus,
}

/// `f±(x) = (1 + x)^{±(1 + x)} − 1`.
pub fn f_sign(sign: Sign, x: f64) -> f64 {
    let e = fen_term(x);
    match sign {
        Sign::Plus => e.exp_m1(),
        Sign::Minus => (-e).exp_m1(),
    }
}

/// `S±(Q) = (I + Q)^{±(I + Q)} − I`.
#[derive(Debug, Clone)]
pub struct EntropyOperator {
    pub matrix: ComplexMatrix,
    pub sign: Sign,
    /// Eigenvalues `f±(λ_k)`, non-increasing.
    pub spectrum: Spectrum,
}

impl EntropyOperator {
    pub fn operator_norm(&self) -> f64 {
        self.spectrum.iter().map(f64::abs).fold(0.0, f64::max)
    }

    pub fn trace_norm(&self) -> f64 {
        kahan_sum(self.spectrum.iter().map(f64::abs))
    }

    /// `ln det(I + S±)`.
    pub fn log_det_identity_plus(&self) -> f64 {
        kahan_sum(self.spectrum.iter().map(f64::ln_1p))
    }
}

pub fn entropy_operator(q: &DensityMatrix, sign: Sign) -> EntropyOperator {
    entropy_operator_of(q.operator(), sign)
}

/// `S±` of any PSD operator.
pub fn entropy_operator_of(q: &TraceClassOperator, sign: Sign) -> EntropyOperator {
    let matrix = matrix_function(q, |x| f_sign(sign, x)).expect("f± is finite on [0, ∞)");
    let spectrum = Spectrum::new(q.spectrum().iter().map(|x| f_sign(sign, x)).collect());
    EntropyOperator {
        matrix,
        sign,
        spectrum,
    }
}

/// `log(I + Q) = U ln(1 + Λ) U†`.
pub fn renorm_log(q: &TraceClassOperator) -> ComplexMatrix {
    matrix_function(q, f64::ln_1p).expect("ln(1 + x) is finite on [0, ∞)")
}

/// Daleckii–Krein kernel of `ln(1 + x)`.
fn log_divided_difference(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    let gap = hi - lo;
    // ln((1+hi)/(1+lo)) = ln(1 + gap/(1+lo))
    let t = gap / (1.0 + lo);
    if t < 1e-8 {
        // series of ln(1+t)/t around t = 0
        (1.0 - t / 2.0 + t * t / 3.0) / (1.0 + lo)
    } else {
        t.ln_1p() / gap
    }
}

/// Directional derivative of `Q ↦ log(I + Q)` at `q0` along `q1`:
/// `∫₀^∞ (1 + q0 + x)⁻¹ q1 (1 + q0 + x)⁻¹ dx`, evaluated in the eigenbasis of
/// `q0` by the divided-difference kernel.
pub fn frechet_derivative_log(q0: &TraceClassOperator, q1: &TraceClassOperator) -> Result<ComplexMatrix> {
    if q0.dim() != q1.dim() {
        return Err(Error::DimMismatch(q0.dim(), q1.dim()));
    }
    let u = q0.eigenbasis();
    let lambda = q0.spectrum().values();
    let mut inner = u.adjoint() * q1.matrix() * u;
    for i in 0..lambda.len() {
        for j in 0..lambda.len() {
            inner[(i, j)] *= log_divided_difference(lambda[i], lambda[j]);
        }
    }
    Ok(u * inner * u.adjoint())
}

/// Smallest eigenvalue of `log(I + B) − log(I + A)`; non-negative when the
/// log map is monotone on the pair `A ≤ B`.
pub fn log_monotonicity_margin(a: &TraceClassOperator, b: &TraceClassOperator) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimMismatch(a.dim(), b.dim()));
    }
    min_eigenvalue(&(renorm_log(b) - renorm_log(a)))
}

/// Smallest eigenvalue of `log(I + tA + (1−t)B) − t·log(I + A) − (1−t)·log(I + B)`.
pub fn log_concavity_margin(a: &TraceClassOperator, b: &TraceClassOperator, t: f64) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimMismatch(a.dim(), b.dim()));
    }
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::ParameterOutOfRange(format!("t = {t} not in [0, 1]")));
    }
    let mix = TraceClassOperator::new(a.matrix().scale(t) + b.matrix().scale(1.0 - t))?;
    let chord = renorm_log(a).scale(t) + renorm_log(b).scale(1.0 - t);
    min_eigenvalue(&(renorm_log(&mix) - chord))
}

fn min_eigenvalue(m: &ComplexMatrix) -> Result<f64> {
    let (s, _) = hermitian_eig(&hermitize(m))?;
    Ok(s.values().last().copied().unwrap_or(0.0))
}

/// Log continuity bound `‖log(I+Q) − log(I+Q')‖₁ ≤ ‖Q − Q'‖₁ / (1 − τ)`
/// with `τ` the larger spectral radius.
pub fn log_continuity_probe(q: &DensityMatrix, q2: &DensityMatrix) -> Result<ClaimReport> {
    if q.dim() != q2.dim() {
        return Err(Error::DimMismatch(q.dim(), q2.dim()));
    }
    let tau = q.spectrum().max().max(q2.spectrum().max());
    if tau >= 1.0 - 1e-12 {
        return Err(Error::SpectralRadiusOne(tau));
    }
    let lhs = trace_norm(&(renorm_log(q.operator()) - renorm_log(q2.operator())))?;
    let rhs = trace_norm(&(q.matrix() - q2.matrix()))? / (1.0 - tau);
    let mut report = ClaimReport::new("log-continuity");
    report.record(rhs - lhs, 1e-12, || {
        json!({ "q": matrix_json(q.matrix()), "q2": matrix_json(q2.matrix()) })
    });
    Ok(report)
}
