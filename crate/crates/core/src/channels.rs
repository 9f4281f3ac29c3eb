//! Quantum operations in Kraus form `Φ(Q) = Σ A_i Q A_i†`, mixed-unitary
//! channels, partial traces, and checkers for determinant and FEN
//! monotonicity under channels.
//!
//! Two completeness conditions are tracked for every channel: the standard
//! trace condition `Σ A_i†A_i ≤ I` (enforced on construction) and the
//! reversed-order condition `Σ A_i A_i† ≤ I`, which is recorded and gates
//! [`check_det_contraction`].

use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use crate::entropy::fen;
use crate::error::{Error, Result};
use crate::io::{matrix_from_json, matrix_json};
use crate::linalg::{
    c, frobenius_norm, hermitian_eig, hermitize, identity, kahan_sum, kron, unitarity_deviation,
    ComplexMatrix, DensityMatrix, TraceClassOperator,
};
use crate::majorization::{ConversionPlan, WeightedPermutation};
use crate::report::ClaimReport;

pub const COMPLETENESS_TOL: f64 = 1e-10;
pub const UNITARY_TOL: f64 = 1e-10;
pub const WEIGHT_SUM_TOL: f64 = 1e-12;
/// Violation threshold for determinant and FEN comparisons.
pub const CLAIM_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Completeness {
    TracePreserving,
    TraceNonIncreasing,
}

#[derive(Debug, Clone)]
pub struct KrausChannel {
    ops: Vec<ComplexMatrix>,
    input_dim: usize,
    output_dim: usize,
    completeness: Completeness,
    unital: bool,
    /// Smallest eigenvalue of `I − Σ A_i A_i†`.
    adjoint_gap: f64,
}

fn min_eigenvalue(m: &ComplexMatrix) -> Result<f64> {
    let (s, _) = hermitian_eig(&hermitize(m))?;
    Ok(s.values().last().copied().unwrap_or(0.0))
}

impl KrausChannel {
    /// Validates `Σ A_i†A_i ≤ I`; every operator must have the same shape.
    pub fn new(ops: Vec<ComplexMatrix>) -> Result<Self> {
        let first = ops
            .first()
            .ok_or_else(|| Error::InvalidSequence("channel needs at least one Kraus operator".into()))?;
        let (k, m) = first.shape();
        for a in &ops {
            if a.shape() != (k, m) {
                return Err(Error::DimMismatch(a.ncols(), m));
            }
            if a.iter().any(|z| !z.is_finite()) {
                return Err(Error::NonFinite);
            }
        }
        let dagger_sum = ops.iter().fold(ComplexMatrix::zeros(m, m), |acc, a| acc + a.adjoint() * a);
        let outer_sum = ops.iter().fold(ComplexMatrix::zeros(k, k), |acc, a| acc + a * a.adjoint());
        let completeness = if frobenius_norm(&(&dagger_sum - identity(m))) <= COMPLETENESS_TOL {
            Completeness::TracePreserving
        } else {
            let gap = min_eigenvalue(&(identity(m) - &dagger_sum))?;
            if gap < -COMPLETENESS_TOL {
                return Err(Error::NotTraceNonIncreasing(gap));
            }
            Completeness::TraceNonIncreasing
        };
        let unital = frobenius_norm(&(&outer_sum - identity(k))) <= COMPLETENESS_TOL;
        let adjoint_gap = min_eigenvalue(&(identity(k) - &outer_sum))?;
        Ok(KrausChannel {
            ops,
            input_dim: m,
            output_dim: k,
            completeness,
            unital,
            adjoint_gap,
        })
    }

    pub fn identity(d: usize) -> Self {
        Self::new(vec![identity(d)]).expect("identity is a channel")
    }

    pub fn unitary(u: ComplexMatrix) -> Result<Self> {
        mixed_unitary(&[1.0], &[u])
    }

    pub fn kraus_ops(&self) -> &[ComplexMatrix] {
        &self.ops
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn output_dim(&self) -> usize {
        self.output_dim
    }

    pub fn completeness(&self) -> Completeness {
        self.completeness
    }

    pub fn is_unital(&self) -> bool {
        self.unital
    }

    pub fn is_bistochastic(&self) -> bool {
        self.unital && self.completeness == Completeness::TracePreserving
    }

    /// Whether `Σ A_i A_i† ≤ I` within tolerance.
    pub fn satisfies_adjoint_condition(&self) -> bool {
        self.adjoint_gap >= -COMPLETENESS_TOL
    }

    pub fn adjoint_gap(&self) -> f64 {
        self.adjoint_gap
    }

    /// `Φ(M) = Σ A_i M A_i†` on an arbitrary square input.
    pub fn apply_matrix(&self, m: &ComplexMatrix) -> Result<ComplexMatrix> {
        if m.nrows() != self.input_dim || m.ncols() != self.input_dim {
            return Err(Error::DimMismatch(m.nrows(), self.input_dim));
        }
        let k = self.output_dim;
        Ok(self
            .ops
            .iter()
            .fold(ComplexMatrix::zeros(k, k), |acc, a| acc + a * m * a.adjoint()))
    }

    pub(crate) fn to_json(&self) -> Value {
        Value::Array(self.ops.iter().map(matrix_json).collect())
    }

    pub(crate) fn from_json(v: &Value) -> Result<Self> {
        let ops = v
            .as_array()
            .ok_or_else(|| Error::MalformedWitness("kraus operators must be an array".into()))?
            .iter()
            .map(matrix_from_json)
            .collect::<Result<Vec<_>>>()?;
        Self::new(ops)
    }
}

pub fn apply_channel(phi: &KrausChannel, q: &DensityMatrix) -> Result<TraceClassOperator> {
    apply_to_operator(phi, q.operator())
}

pub fn apply_to_operator(phi: &KrausChannel, q: &TraceClassOperator) -> Result<TraceClassOperator> {
    TraceClassOperator::new(hermitize(&phi.apply_matrix(q.matrix())?))
}

/// Kraus operators `√p_i·U_i`.
pub fn mixed_unitary(weights: &[f64], unitaries: &[ComplexMatrix]) -> Result<KrausChannel> {
    if weights.len() != unitaries.len() {
        return Err(Error::LengthMismatch(weights.len(), unitaries.len()));
    }
    if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
        return Err(Error::WeightsInvalid(format!("weight {w} is negative or not finite")));
    }
    let total = kahan_sum(weights.iter().copied());
    if (total - 1.0).abs() > WEIGHT_SUM_TOL {
        return Err(Error::WeightsInvalid(format!("weights sum to {total}")));
    }
    for (i, u) in unitaries.iter().enumerate() {
        let dev = unitarity_deviation(u);
        if dev.is_nan() || dev > UNITARY_TOL {
            return Err(Error::NotUnitary(i, dev));
        }
    }
    KrausChannel::new(weights.iter().zip(unitaries).map(|(w, u)| u.scale(w.sqrt())).collect())
}

/// `Φ(Q) = (1 − p)·Q + p·Tr(Q)·I/d`, via the `d²` Weyl operators `X^a Z^b`.
pub fn depolarizing(d: usize, p: f64) -> Result<KrausChannel> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::ParameterOutOfRange(format!("depolarizing strength {p}")));
    }
    let n = (d * d) as f64;
    let omega = |k: usize| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / d as f64);
    let mut weights = Vec::with_capacity(d * d);
    let mut unitaries = Vec::with_capacity(d * d);
    for a in 0..d {
        for b in 0..d {
            // (X^a Z^b)|j⟩ = ω^{bj} |j + a⟩
            let w = ComplexMatrix::from_fn(d, d, |i, j| if i == (j + a) % d { omega(b * j % d) } else { c(0.0, 0.0) });
            weights.push(if a == 0 && b == 0 { 1.0 - p + p / n } else { p / n });
            unitaries.push(w);
        }
    }
    mixed_unitary(&weights, &unitaries)
}

/// Which factor a partial trace keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Keep {
    A,
    B,
}

pub(crate) fn check_factorization(dim: usize, da: usize, db: usize) -> Result<()> {
    if da * db != dim || da == 0 || db == 0 {
        return Err(Error::DimFactorizationMismatch { dim, da, db });
    }
    Ok(())
}

/// Kraus form of the partial trace: `I_A ⊗ ⟨i|` to keep A, `⟨i| ⊗ I_B` to keep B.
pub fn partial_trace_channel(da: usize, db: usize, keep: Keep) -> KrausChannel {
    let bra = |n: usize, i: usize| ComplexMatrix::from_fn(1, n, |_, j| if i == j { c(1.0, 0.0) } else { c(0.0, 0.0) });
    let ops = match keep {
        Keep::A => (0..db).map(|i| kron(&identity(da), &bra(db, i))).collect(),
        Keep::B => (0..da).map(|i| kron(&bra(da, i), &identity(db))).collect(),
    };
    KrausChannel::new(ops).expect("partial trace is trace preserving")
}

pub fn partial_trace(q: &DensityMatrix, dims: (usize, usize), keep: Keep) -> Result<DensityMatrix> {
    let (da, db) = dims;
    check_factorization(q.dim(), da, db)?;
    let phi = partial_trace_channel(da, db, keep);
    DensityMatrix::new(hermitize(&phi.apply_matrix(q.matrix())?))
}

/// `Φ_A ⊗ Φ_B` with the full Cartesian product of Kraus operators.
pub fn tensor_channel(phi_a: &KrausChannel, phi_b: &KrausChannel) -> Result<KrausChannel> {
    let ops = phi_a
        .ops
        .iter()
        .flat_map(|a| phi_b.ops.iter().map(move |b| kron(a, b)))
        .collect();
    KrausChannel::new(ops)
}

/// Mixed-unitary channel realizing a conversion plan in the eigenbasis `u` of
/// the source state: Kraus operators `√w·U P U†`.
pub fn conversion_channel(plan: &ConversionPlan, u: &ComplexMatrix) -> Result<KrausChannel> {
    let n = plan.dim();
    if u.nrows() != n {
        return Err(Error::DimMismatch(u.nrows(), n));
    }
    let perm_matrix = |p: &WeightedPermutation| {
        ComplexMatrix::from_fn(n, n, |i, j| if p.perm[i] == j { c(1.0, 0.0) } else { c(0.0, 0.0) })
    };
    let weights: Vec<f64> = plan.permutations.iter().map(|p| p.weight).collect();
    let unitaries: Vec<ComplexMatrix> = plan
        .permutations
        .iter()
        .map(|p| u * perm_matrix(p) * u.adjoint())
        .collect();
    mixed_unitary(&weights, &unitaries)
}

/// `det(I + Q) = ∏ (1 + λ_k)`.
pub fn det_identity_plus(q: &TraceClassOperator) -> f64 {
    q.spectrum().iter().fold(1.0, |acc, l| acc * (1.0 + l))
}

fn det_margin(phi: &KrausChannel, q: &DensityMatrix) -> Result<f64> {
    let out = apply_channel(phi, q)?;
    Ok(det_identity_plus(q.operator()) - det_identity_plus(&out))
}

/// Compares `det(I + Φ(Q))` with `det(I + Q)`; margin `det(I+Q) − det(I+Φ(Q))`.
pub fn check_det_contraction(phi: &KrausChannel, q: &DensityMatrix) -> Result<ClaimReport> {
    if !phi.satisfies_adjoint_condition() {
        return Err(Error::KrausConditionUnmet(phi.adjoint_gap()));
    }
    let margin = det_margin(phi, q)?;
    let mut report = ClaimReport::new("det-contraction");
    report.record(margin, CLAIM_TOL, || json!({ "kraus": phi.to_json(), "q": matrix_json(q.matrix()) }));
    Ok(report)
}

/// As [`check_det_contraction`] for the product channel `Φ_A ⊗ Φ_B`.
pub fn check_separable_contraction(
    phi_a: &KrausChannel,
    phi_b: &KrausChannel,
    q: &DensityMatrix,
) -> Result<ClaimReport> {
    let phi = tensor_channel(phi_a, phi_b)?;
    if phi.input_dim != q.dim() {
        return Err(Error::DimMismatch(q.dim(), phi.input_dim));
    }
    let margin = det_margin(&phi, q)?;
    let mut report = ClaimReport::new("separable-contraction");
    report.record(margin, CLAIM_TOL, || {
        json!({ "kraus_a": phi_a.to_json(), "kraus_b": phi_b.to_json(), "q": matrix_json(q.matrix()) })
    });
    Ok(report)
}

/// Compares `FEN₊(Tr_B Q)` with `FEN₊(Q)`; margin `FEN₊(Q) − FEN₊(Q^A)`.
pub fn check_fen_reduction(q: &DensityMatrix, dims: (usize, usize)) -> Result<ClaimReport> {
    let reduced = partial_trace(q, dims, Keep::A)?;
    let margin = fen(q).plus - fen(&reduced).plus;
    let mut report = ClaimReport::new("fen-partial-trace");
    report.record(margin, CLAIM_TOL, || json!({ "q": matrix_json(q.matrix()), "dims": [dims.0, dims.1] }));
    Ok(report)
}

fn witness_state(w: &Value, key: &str) -> Result<DensityMatrix> {
    let m = matrix_from_json(w.get(key).ok_or_else(|| Error::MalformedWitness(format!("missing `{key}`")))?)?;
    DensityMatrix::new(m)
}

fn witness_channel(w: &Value, key: &str) -> Result<KrausChannel> {
    KrausChannel::from_json(w.get(key).ok_or_else(|| Error::MalformedWitness(format!("missing `{key}`")))?)
}

/// Recomputes the margin of a witness produced by one of the checkers above.
pub fn replay_witness(claim_id: &str, w: &Value) -> Result<f64> {
    let q = witness_state(w, "q")?;
    match claim_id {
        "det-contraction" => det_margin(&witness_channel(w, "kraus")?, &q),
        "separable-contraction" => {
            let phi = tensor_channel(&witness_channel(w, "kraus_a")?, &witness_channel(w, "kraus_b")?)?;
            det_margin(&phi, &q)
        }
        "fen-partial-trace" => {
            let dims: [usize; 2] = serde_json::from_value(
                w.get("dims").cloned().ok_or_else(|| Error::MalformedWitness("missing `dims`".into()))?,
            )
            .map_err(|e| Error::MalformedWitness(e.to_string()))?;
            let reduced = partial_trace(&q, (dims[0], dims[1]), Keep::A)?;
            Ok(fen(&q).plus - fen(&reduced).plus)
        }
        other => Err(Error::UnknownClaim(other.to_string())),
    }
}

/// Pauli X.
pub fn pauli_x() -> ComplexMatrix {
    crate::linalg::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]])
}
