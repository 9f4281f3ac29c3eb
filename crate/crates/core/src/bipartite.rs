//! Bipartite systems: Schmidt decomposition of pure states, the reduced Gram
//! operators `Δ^A`, `Δ^B`, gramian volumes, block additivity of FEN, the
//! renormalized Kronecker product, and operator-Schmidt (realignment) analysis.
//!
//! A pure state on `C^dA ⊗ C^dB` is stored as its `dA × dB` coefficient matrix
//! `Ψ` with `|Ψ⟩ = Σ Ψ_ij |i⟩⊗|j⟩`; the row index belongs to `A`. As a vector
//! in `C^{dA·dB}` the index is `i·dB + j`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::channels::{apply_channel, check_factorization, partial_trace, tensor_channel, Keep, KrausChannel};
use crate::entropy::{entropy_operator_of, fen, fen_of_values, fen_operator, EntropyOperator, Sign};
use crate::error::{Error, Result};
use crate::io::{matrix_from_json, matrix_json};
use crate::linalg::{
    c, determinant, direct_sum, frobenius_norm, hermitian_eig, hermitize, identity, kahan_sum, kron, svd,
    unitarity_deviation, ComplexMatrix, DensityMatrix, Spectrum, TraceClassOperator,
};
use crate::random;
use crate::report::ClaimReport;

pub const NORM_TOL: f64 = 1e-10;
/// Slack for identities between bipartite quantities.
pub const IDENTITY_TOL: f64 = 1e-10;
/// Relative tolerance for the Kronecker determinant formula.
pub const KRONECKER_TOL: f64 = 1e-8;
/// Realignment sums above `1 + REALIGNMENT_TOL` detect entanglement.
pub const REALIGNMENT_TOL: f64 = 1e-10;
const UNITARY_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct PureBipartiteState {
    coeffs: ComplexMatrix,
    schmidt: Spectrum,
}

impl PureBipartiteState {
    /// Requires `‖Ψ‖_F = 1` within `NORM_TOL`.
    pub fn new(coeffs: ComplexMatrix) -> Result<Self> {
        if coeffs.iter().any(|z| !z.is_finite()) {
            return Err(Error::NonFinite);
        }
        let norm = frobenius_norm(&coeffs);
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NormNotOne(norm));
        }
        let schmidt = svd(&coeffs)?.1;
        Ok(PureBipartiteState { coeffs, schmidt })
    }

    /// Reshapes a `dA·dB` vector (row-major, `A` index major).
    pub fn from_vector(v: &[Complex64], da: usize, db: usize) -> Result<Self> {
        check_factorization(v.len(), da, db)?;
        Self::new(ComplexMatrix::from_fn(da, db, |i, j| v[i * db + j]))
    }

    /// Normalized complex Gaussian coefficients.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, da: usize, db: usize) -> Self {
        let g = random::ginibre(rng, da, db);
        let norm = frobenius_norm(&g);
        Self::new(g.unscale(norm)).expect("normalized Gaussian state")
    }

    /// `(|00⟩ + |11⟩)/√2`.
    pub fn bell() -> Self {
        Self::new(identity(2).scale(std::f64::consts::FRAC_1_SQRT_2)).expect("Bell state")
    }

    pub fn coeffs(&self) -> &ComplexMatrix {
        &self.coeffs
    }

    pub fn schmidt(&self) -> &Spectrum {
        &self.schmidt
    }

    pub fn dims(&self) -> (usize, usize) {
        self.coeffs.shape()
    }

    pub fn to_vector(&self) -> Vec<Complex64> {
        let (da, db) = self.dims();
        (0..da * db).map(|k| self.coeffs[(k / db, k % db)]).collect()
    }

    /// `|Ψ⟩⟨Ψ|` on `C^{dA·dB}`.
    pub fn density(&self) -> DensityMatrix {
        DensityMatrix::pure(&self.to_vector()).expect("unit vector")
    }

    /// `(U_A ⊗ U_B)|Ψ⟩`, i.e. `Ψ → U_A Ψ U_Bᵀ`.
    pub fn apply_local(&self, ua: &ComplexMatrix, ub: &ComplexMatrix) -> Result<Self> {
        let (da, db) = self.dims();
        if ua.nrows() != da || ua.ncols() != da {
            return Err(Error::DimMismatch(ua.nrows(), da));
        }
        if ub.nrows() != db || ub.ncols() != db {
            return Err(Error::DimMismatch(ub.nrows(), db));
        }
        for (i, u) in [ua, ub].into_iter().enumerate() {
            let dev = unitarity_deviation(u);
            if dev.is_nan() || dev > UNITARY_TOL {
                return Err(Error::NotUnitary(i, dev));
            }
        }
        Self::new(ua * &self.coeffs * ub.transpose())
    }
}

/// `(τ, Φ, Ω)` with `|Ψ⟩ = Σ τ_n |φ_n⟩⊗|ω_n⟩`; the columns of `Φ` and `Ω`
/// are orthonormal.
pub fn schmidt_decompose(psi: &PureBipartiteState) -> (Spectrum, ComplexMatrix, ComplexMatrix) {
    let (u, s, v) = svd(&psi.coeffs).expect("finite coefficients");
    (s, u, v.map(|z| z.conj()))
}

#[derive(Debug, Clone)]
pub struct GramOperators {
    pub delta_a: TraceClassOperator,
    pub delta_b: TraceClassOperator,
}

/// `Δ^A_ij = ⟨F_j|F_i⟩` over the rows `F_i` of `Ψ`; `Δ^B` likewise over columns.
pub fn gram_operators(psi: &PureBipartiteState) -> GramOperators {
    let (da, db) = psi.dims();
    let p = &psi.coeffs;
    let delta_a = ComplexMatrix::from_fn(da, da, |i, j| (0..db).map(|k| p[(i, k)] * p[(j, k)].conj()).sum());
    let delta_b = ComplexMatrix::from_fn(db, db, |k, l| (0..da).map(|i| p[(i, k)] * p[(i, l)].conj()).sum());
    GramOperators {
        delta_a: TraceClassOperator::new(hermitize(&delta_a)).expect("Gram matrix is PSD"),
        delta_b: TraceClassOperator::new(hermitize(&delta_b)).expect("Gram matrix is PSD"),
    }
}

fn schmidt_squares(psi: &PureBipartiteState) -> impl Iterator<Item = f64> + '_ {
    psi.schmidt.iter().map(|t| t * t)
}

/// `G(Ψ)(z) = ∏ (1 + z·τ_n²)`.
pub fn gramian_function(psi: &PureBipartiteState, z: Complex64) -> Complex64 {
    schmidt_squares(psi).fold(c(1.0, 0.0), |acc, t2| acc * (c(1.0, 0.0) + z * t2))
}

/// Gramian volume `G(Ψ)` by three routes: product over `τ²`, and
/// `det(I + Δ^A)`, `det(I + Δ^B)` by LU.
pub fn gramian_paths(psi: &PureBipartiteState) -> [f64; 3] {
    let g = gram_operators(psi);
    let lu = |d: &TraceClassOperator| {
        determinant(&(identity(d.dim()) + d.matrix()))
            .expect("square")
            .re
    };
    [gramian_function(psi, c(1.0, 0.0)).re, lu(&g.delta_a), lu(&g.delta_b)]
}

/// `g(Ψ) = Σ ln(1 + τ_n²)`.
pub fn log_gramian(psi: &PureBipartiteState) -> f64 {
    kahan_sum(schmidt_squares(psi).map(f64::ln_1p))
}

/// `Σ (1 + τ_n²) ln(1 + τ_n²)`.
pub fn fen_pure(psi: &PureBipartiteState) -> f64 {
    fen_of_values(schmidt_squares(psi))
}

/// `S₋(Δ^A)`.
pub fn s_minus_pure(psi: &PureBipartiteState) -> EntropyOperator {
    entropy_operator_of(&gram_operators(psi).delta_a, Sign::Minus)
}

/// Non-identity part `Q_A ⊗ Q_B` of `(I + Q_A) ⊗_r (I + Q_B) = I + Q_A ⊗ Q_B`.
pub fn renorm_kronecker(qa: &TraceClassOperator, qb: &TraceClassOperator) -> TraceClassOperator {
    TraceClassOperator::new(kron(qa.matrix(), qb.matrix())).expect("product of PSD operators is PSD")
}

/// `det(Q_A ⊗ Q_B)` as `det(I_A ⊗ Q_B) · det(Q_A ⊗ I_B)`, which equals
/// `det(Q_A)^{N_B} · det(Q_B)^{N_A}`.
pub fn kronecker_det_factors(qa: &ComplexMatrix, qb: &ComplexMatrix) -> Result<(Complex64, Complex64)> {
    let (na, nb) = (qa.nrows(), qb.nrows());
    Ok((determinant(&kron(&identity(na), qb))?, determinant(&kron(qa, &identity(nb)))?))
}

fn kronecker_margin(qa: &ComplexMatrix, qb: &ComplexMatrix) -> Result<f64> {
    let lhs = determinant(&kron(qa, qb))?;
    let (fb, fa) = kronecker_det_factors(qa, qb)?;
    let rhs = fb * fa;
    let scale = lhs.norm().max(rhs.norm());
    Ok(if scale == 0.0 { 0.0 } else { -(lhs - rhs).norm() / scale })
}

pub fn kronecker_det_identity_check(qa: &ComplexMatrix, qb: &ComplexMatrix) -> Result<ClaimReport> {
    let margin = kronecker_margin(qa, qb)?;
    let mut report = ClaimReport::new("kronecker-formula");
    report.record(margin, KRONECKER_TOL, || json!({ "qa": matrix_json(qa), "qb": matrix_json(qb) }));
    Ok(report)
}

fn validate_weights(weights: &[f64]) -> Result<()> {
    if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
        return Err(Error::WeightsInvalid(format!("weight {w} is negative or not finite")));
    }
    let total = kahan_sum(weights.iter().copied());
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::WeightsInvalid(format!("weights sum to {total}")));
    }
    Ok(())
}

fn block_margin(blocks: &[(f64, DensityMatrix)]) -> Result<f64> {
    let weights: Vec<f64> = blocks.iter().map(|b| b.0).collect();
    validate_weights(&weights)?;
    let mut assembled = ComplexMatrix::zeros(0, 0);
    let mut parts = 0.0;
    for (w, q) in blocks {
        let scaled = q.operator().scaled(*w)?;
        assembled = direct_sum(&assembled, scaled.matrix());
        parts += fen_operator(&scaled).plus;
    }
    let whole = fen(&DensityMatrix::new(assembled)?).plus;
    Ok(-(whole - parts).abs())
}

/// `FEN₊(⊕ λ_i Q_i) = Σ_i FEN₊(λ_i Q_i)`.
pub fn fen_block_additivity(blocks: &[(f64, DensityMatrix)]) -> Result<ClaimReport> {
    let margin = block_margin(blocks)?;
    let mut report = ClaimReport::new("fen-block-additivity");
    report.record(margin, IDENTITY_TOL, || {
        json!({ "blocks": blocks.iter().map(|(w, q)| json!({ "weight": w, "q": matrix_json(q.matrix()) })).collect::<Vec<_>>() })
    });
    Ok(report)
}

#[derive(Debug, Clone)]
pub struct RdmTerm {
    pub weight: f64,
    pub local_a: DensityMatrix,
    pub local_b: DensityMatrix,
}

/// Spectral decomposition `Q = Σ λ_n |Ψ_n⟩⟨Ψ_n|` followed by the reduced
/// states of each eigenvector. Zero eigenvalues are dropped. For degenerate
/// eigenvalues the individual terms depend on the eigenbasis chosen; only
/// the weighted sums are basis independent.
pub fn mixed_state_rdm_decomposition(q: &DensityMatrix, dims: (usize, usize)) -> Result<Vec<RdmTerm>> {
    let (da, db) = dims;
    check_factorization(q.dim(), da, db)?;
    let u = q.eigenbasis();
    let mut terms = Vec::new();
    for (n, weight) in q.spectrum().iter().enumerate() {
        if weight <= 0.0 {
            continue;
        }
        let col: Vec<Complex64> = u.column(n).iter().copied().collect();
        let psi = PureBipartiteState::from_vector(&col, da, db)?;
        let g = gram_operators(&psi);
        terms.push(RdmTerm {
            weight,
            local_a: DensityMatrix::new(g.delta_a.matrix().clone())?,
            local_b: DensityMatrix::new(g.delta_b.matrix().clone())?,
        });
    }
    Ok(terms)
}

/// `Q = Σ τ_n Ω^A_n ⊗ Ω^B_n`.
#[derive(Debug, Clone)]
pub struct OperatorSchmidt {
    pub coefficients: Spectrum,
    pub factors_a: Vec<ComplexMatrix>,
    pub factors_b: Vec<ComplexMatrix>,
}

impl OperatorSchmidt {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let (na, nb) = match (self.factors_a.first(), self.factors_b.first()) {
            (Some(a), Some(b)) => (a.nrows(), b.nrows()),
            _ => return ComplexMatrix::zeros(0, 0),
        };
        self.coefficients
            .iter()
            .zip(self.factors_a.iter().zip(&self.factors_b))
            .fold(ComplexMatrix::zeros(na * nb, na * nb), |acc, (t, (a, b))| acc + kron(a, b).scale(t))
    }

    pub fn sum(&self) -> f64 {
        kahan_sum(self.coefficients.iter())
    }
}

/// `R_{(i,i'),(j,j')} = Q_{(i,j),(i',j')}`, pairs in row-major order.
pub fn realign(q: &ComplexMatrix, dims: (usize, usize)) -> Result<ComplexMatrix> {
    let (da, db) = dims;
    check_factorization(q.nrows(), da, db)?;
    Ok(ComplexMatrix::from_fn(da * da, db * db, |r, s| {
        let (i, ip) = (r / da, r % da);
        let (j, jp) = (s / db, s % db);
        q[(i * db + j, ip * db + jp)]
    }))
}

fn reshape(v: impl Iterator<Item = Complex64>, d: usize) -> ComplexMatrix {
    let flat: Vec<Complex64> = v.collect();
    ComplexMatrix::from_fn(d, d, |i, j| flat[i * d + j])
}

/// Canonical operator-Schmidt decomposition via the SVD of the realigned matrix.
pub fn operator_schmidt(q: &DensityMatrix, dims: (usize, usize)) -> Result<OperatorSchmidt> {
    let (da, db) = dims;
    let r = realign(q.matrix(), dims)?;
    let (u, s, v) = svd(&r)?;
    let factors_a = (0..s.len()).map(|n| reshape(u.column(n).iter().copied(), da)).collect();
    let factors_b = (0..s.len()).map(|n| reshape(v.column(n).iter().map(|z| z.conj()), db)).collect();
    Ok(OperatorSchmidt {
        coefficients: s,
        factors_a,
        factors_b,
    })
}

/// Orthonormal Hermitian basis of `d × d` matrices under `⟨X, Y⟩ = Tr[X Y]`:
/// `I/√d`, symmetric and antisymmetric off-diagonal pairs, and the traceless
/// diagonal elements `(Σ_{m<l} E_mm − l·E_ll)/√(l(l+1))`.
pub fn hermitian_basis(d: usize) -> Vec<ComplexMatrix> {
    let mut basis = vec![identity(d).unscale((d as f64).sqrt())];
    let s = std::f64::consts::FRAC_1_SQRT_2;
    for j in 0..d {
        for k in (j + 1)..d {
            let mut sym = ComplexMatrix::zeros(d, d);
            sym[(j, k)] = c(s, 0.0);
            sym[(k, j)] = c(s, 0.0);
            basis.push(sym);
            let mut anti = ComplexMatrix::zeros(d, d);
            anti[(j, k)] = c(0.0, -s);
            anti[(k, j)] = c(0.0, s);
            basis.push(anti);
        }
    }
    for l in 1..d {
        let norm = ((l * (l + 1)) as f64).sqrt();
        let mut m = ComplexMatrix::zeros(d, d);
        for i in 0..l {
            m[(i, i)] = c(1.0 / norm, 0.0);
        }
        m[(l, l)] = c(-(l as f64) / norm, 0.0);
        basis.push(m);
    }
    basis
}

/// Operator-Schmidt decomposition with Hermitian factors, from a real SVD of
/// the coefficients `c_kl = Tr[Q (G_k ⊗ G_l)]`.
pub fn hermitian_operator_schmidt(q: &DensityMatrix, dims: (usize, usize)) -> Result<OperatorSchmidt> {
    let (da, db) = dims;
    check_factorization(q.dim(), da, db)?;
    let (ga, gb) = (hermitian_basis(da), hermitian_basis(db));
    let coeff = DMatrix::<f64>::from_fn(ga.len(), gb.len(), |k, l| {
        (q.matrix() * kron(&ga[k], &gb[l])).trace().re
    });
    let dec = nalgebra::SVD::new(coeff, true, true);
    let u = dec.u.expect("u requested");
    let vt = dec.v_t.expect("v_t requested");
    let mut order: Vec<usize> = (0..dec.singular_values.len()).collect();
    order.sort_by(|&i, &j| dec.singular_values[j].total_cmp(&dec.singular_values[i]));
    let combine = |basis: &[ComplexMatrix], weight: &dyn Fn(usize) -> f64| {
        basis
            .iter()
            .enumerate()
            .fold(ComplexMatrix::zeros(basis[0].nrows(), basis[0].nrows()), |acc, (k, g)| acc + g.scale(weight(k)))
    };
    let factors_a = order.iter().map(|&n| combine(&ga, &|k| u[(k, n)])).collect();
    let factors_b = order.iter().map(|&n| combine(&gb, &|l| vt[(n, l)])).collect();
    let values = order.iter().map(|&n| dec.singular_values[n].max(0.0)).collect();
    Ok(OperatorSchmidt {
        coefficients: Spectrum::new(values),
        factors_a,
        factors_b,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RealignmentVerdict {
    EntanglementDetected,
    NotDetected,
}

/// Sum of canonical operator-Schmidt coefficients and the resulting verdict.
pub fn realignment_criterion(q: &DensityMatrix, dims: (usize, usize)) -> Result<(f64, RealignmentVerdict)> {
    let sum = operator_schmidt(q, dims)?.sum();
    let verdict = if sum > 1.0 + REALIGNMENT_TOL {
        RealignmentVerdict::EntanglementDetected
    } else {
        RealignmentVerdict::NotDetected
    };
    Ok((sum, verdict))
}

fn local_unitary_margin(psi: &PureBipartiteState, ua: &ComplexMatrix, ub: &ComplexMatrix) -> Result<f64> {
    let moved = psi.apply_local(ua, ub)?;
    let before = [gramian_function(psi, c(1.0, 0.0)).re, log_gramian(psi), fen_pure(psi)];
    let after = [gramian_function(&moved, c(1.0, 0.0)).re, log_gramian(&moved), fen_pure(&moved)];
    let dev = before.iter().zip(&after).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    Ok(-dev)
}

/// `G`, `g` and `FEN` are unchanged by `Ψ → (U_A ⊗ U_B) Ψ`.
pub fn local_unitary_invariance_check(
    psi: &PureBipartiteState,
    ua: &ComplexMatrix,
    ub: &ComplexMatrix,
) -> Result<ClaimReport> {
    let margin = local_unitary_margin(psi, ua, ub)?;
    let mut report = ClaimReport::new("local-unitary-invariance");
    report.record(margin, IDENTITY_TOL, || {
        json!({ "psi": matrix_json(&psi.coeffs), "ua": matrix_json(ua), "ub": matrix_json(ub) })
    });
    Ok(report)
}

fn local_channel_margin(psi: &PureBipartiteState, phi_a: &KrausChannel) -> Result<f64> {
    let (da, db) = psi.dims();
    let phi = tensor_channel(phi_a, &KrausChannel::identity(db))?;
    let out = DensityMatrix::new(apply_channel(&phi, &psi.density())?.matrix().clone())?;
    let reduced = partial_trace(&out, (phi_a.output_dim(), db), Keep::A)?;
    debug_assert_eq!(phi_a.input_dim(), da);
    let after = reduced.spectrum().iter().fold(1.0, |acc, l| acc * (1.0 + l));
    Ok(gramian_function(psi, c(1.0, 0.0)).re - after)
}

/// Compares `G(Ψ)` with `det(I + Tr_B[(Φ_A ⊗ id)(|Ψ⟩⟨Ψ|)])`; margin `before − after`.
pub fn gramian_local_channel_check(psi: &PureBipartiteState, phi_a: &KrausChannel) -> Result<ClaimReport> {
    if phi_a.input_dim() != psi.dims().0 {
        return Err(Error::DimMismatch(phi_a.input_dim(), psi.dims().0));
    }
    let margin = local_channel_margin(psi, phi_a)?;
    let mut report = ClaimReport::new("gramian-local-channel");
    report.record(margin, IDENTITY_TOL, || {
        json!({ "psi": matrix_json(&psi.coeffs), "kraus_a": phi_a.to_json() })
    });
    Ok(report)
}

fn field<'a>(w: &'a Value, key: &str) -> Result<&'a Value> {
    w.get(key).ok_or_else(|| Error::MalformedWitness(format!("missing `{key}`")))
}

/// Recomputes the margin of a witness produced by one of the checkers above.
pub fn replay_witness(claim_id: &str, w: &Value) -> Result<f64> {
    match claim_id {
        "kronecker-formula" => kronecker_margin(&matrix_from_json(field(w, "qa")?)?, &matrix_from_json(field(w, "qb")?)?),
        "fen-block-additivity" => {
            let blocks = field(w, "blocks")?
                .as_array()
                .ok_or_else(|| Error::MalformedWitness("`blocks` must be an array".into()))?
                .iter()
                .map(|b| {
                    let weight = field(b, "weight")?
                        .as_f64()
                        .ok_or_else(|| Error::MalformedWitness("weight must be a number".into()))?;
                    Ok((weight, DensityMatrix::new(matrix_from_json(field(b, "q")?)?)?))
                })
                .collect::<Result<Vec<_>>>()?;
            block_margin(&blocks)
        }
        "local-unitary-invariance" => {
            let psi = PureBipartiteState::new(matrix_from_json(field(w, "psi")?)?)?;
            local_unitary_margin(&psi, &matrix_from_json(field(w, "ua")?)?, &matrix_from_json(field(w, "ub")?)?)
        }
        "gramian-local-channel" => {
            let psi = PureBipartiteState::new(matrix_from_json(field(w, "psi")?)?)?;
            local_channel_margin(&psi, &KrausChannel::from_json(field(w, "kraus_a")?)?)
        }
        other => Err(Error::UnknownClaim(other.to_string())),
    }
}

/// Eigenvalues of a Hermitian matrix (used to compare Gram spectra).
pub fn hermitian_spectrum(m: &ComplexMatrix) -> Result<Spectrum> {
    hermitian_eig(m).map(|(s, _)| s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::depolarizing;
    use crate::linalg::diag;

    fn product_state(da: usize, db: usize) -> PureBipartiteState {
        let mut m = ComplexMatrix::zeros(da, db);
        m[(0, 0)] = c(1.0, 0.0);
        PureBipartiteState::new(m).unwrap()
    }

    fn bell_density() -> DensityMatrix {
        PureBipartiteState::bell().density()
    }

    #[test]
    fn state_validation() {
        assert!(matches!(PureBipartiteState::new(identity(2)), Err(Error::NormNotOne(_))));
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let v = [c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(s, 0.0)];
        let psi = PureBipartiteState::from_vector(&v, 2, 2).unwrap();
        assert_eq!(psi.coeffs(), PureBipartiteState::bell().coeffs());
        assert!(matches!(
            PureBipartiteState::from_vector(&v, 3, 2),
            Err(Error::DimFactorizationMismatch { .. })
        ));
    }

    #[test]
    fn schmidt_examples() {
        let (t, _, _) = schmidt_decompose(&product_state(2, 3));
        assert_eq!(t.values()[0], 1.0);
        assert!(t.values()[1..].iter().all(|&x| x < 1e-15));

        let (t, _, _) = schmidt_decompose(&PureBipartiteState::bell());
        for x in t.iter() {
            assert!((x - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        }

        let mut rng = random::rng(11, 0);
        let psi = PureBipartiteState::random(&mut rng, 3, 4);
        let (t, phi, omega) = schmidt_decompose(&psi);
        assert!((t.iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-10);
        // Σ τ_n |φ_n⟩⊗|ω_n⟩ as a coefficient matrix is Σ τ_n φ_n ω_nᵀ
        let rebuilt = (0..t.len()).fold(ComplexMatrix::zeros(3, 4), |acc, n| {
            acc + (phi.column(n) * omega.column(n).transpose()).scale(t.values()[n])
        });
        assert!(frobenius_norm(&(rebuilt - psi.coeffs())) < 1e-9);
        assert!(frobenius_norm(&(phi.adjoint() * &phi - identity(3))) < 1e-12);
        assert!(frobenius_norm(&(omega.adjoint() * &omega - identity(3))) < 1e-12);
    }

    #[test]
    fn gram_operator_examples() {
        let g = gram_operators(&product_state(3, 2));
        assert_eq!(g.delta_a.spectrum().values(), &[1.0, 0.0, 0.0]);
        let g = gram_operators(&PureBipartiteState::bell());
        assert!(frobenius_norm(&(g.delta_a.matrix() - diag(&[0.5, 0.5]))) < 1e-15);

        let mut rng = random::rng(12, 0);
        for _ in 0..20 {
            let (da, db) = (rng.random_range(1..=8), rng.random_range(1..=12));
            let psi = PureBipartiteState::random(&mut rng, da, db);
            let g = gram_operators(&psi);
            let k = da.min(db);
            let sa = g.delta_a.spectrum().values();
            let sb = g.delta_b.spectrum().values();
            for n in 0..k {
                let t2 = psi.schmidt().values()[n].powi(2);
                assert!((sa[n] - t2).abs() < 1e-10 && (sb[n] - t2).abs() < 1e-10);
            }
            assert!(sa[k..].iter().chain(&sb[k..]).all(|&x| x < 1e-10));
            assert!((g.delta_a.trace_norm() - 1.0).abs() < 1e-10);
            // Δ^A and Δ^B are the partial traces of |Ψ⟩⟨Ψ|
            let rho = psi.density();
            let ra = partial_trace(&rho, (da, db), Keep::A).unwrap();
            let rb = partial_trace(&rho, (da, db), Keep::B).unwrap();
            assert!(frobenius_norm(&(ra.matrix() - g.delta_a.matrix())) < 1e-12);
            assert!(frobenius_norm(&(rb.matrix() - g.delta_b.matrix())) < 1e-12);
        }
    }

    #[test]
    fn gramian_examples() {
        let one = c(1.0, 0.0);
        assert!((gramian_function(&product_state(2, 2), one).re - 2.0).abs() < 1e-15);
        assert!((gramian_function(&PureBipartiteState::bell(), one).re - 2.25).abs() < 1e-15);
        assert!((log_gramian(&product_state(3, 3)) - 2f64.ln()).abs() < 1e-15);
        assert!((log_gramian(&PureBipartiteState::bell()) - 2.0 * 1.5f64.ln()).abs() < 1e-15);
        assert!((fen_pure(&product_state(2, 4)) - 2.0 * 2f64.ln()).abs() < 1e-15);
        assert!((fen_pure(&PureBipartiteState::bell()) - 3.0 * 1.5f64.ln()).abs() < 1e-15);
        for d in [2usize, 5, 20] {
            let psi = PureBipartiteState::new(identity(d).unscale((d as f64).sqrt())).unwrap();
            let expected = d as f64 * (1.0 / d as f64).ln_1p();
            assert!((log_gramian(&psi) - expected).abs() < 1e-13);
        }
        let mut rng = random::rng(13, 0);
        for _ in 0..200 {
            let (da, db) = (rng.random_range(1..=8), rng.random_range(1..=12));
            let psi = PureBipartiteState::random(&mut rng, da, db);
            let [p, a, b] = gramian_paths(&psi);
            assert!((p - a).abs() < 1e-10 && (p - b).abs() < 1e-10);
            assert!((2.0 - 1e-10..=std::f64::consts::E + 1e-10).contains(&p));
            let g = log_gramian(&psi);
            assert!((2f64.ln() - 1e-10..=1.0 + 1e-10).contains(&g));
            let f = fen_pure(&psi);
            assert!(f > 0.0 && f <= 2.0 + 1e-10);
            let reduced = DensityMatrix::new(gram_operators(&psi).delta_a.matrix().clone()).unwrap();
            assert!((f - fen(&reduced).plus).abs() < 1e-10);
            assert!(s_minus_pure(&psi).trace_norm() <= 2.0 + 1e-10);
        }
    }

    #[test]
    fn s_minus_examples() {
        let s = s_minus_pure(&product_state(2, 2));
        assert_eq!(s.spectrum.values()[0], 0.0);
        assert!((s.spectrum.values()[1] + 0.75).abs() < 1e-15);
        let s = s_minus_pure(&PureBipartiteState::bell());
        for v in s.spectrum.iter() {
            assert!((v - (1.5f64.powf(-1.5) - 1.0)).abs() < 1e-15);
        }
    }

    #[test]
    fn renorm_kronecker_examples() {
        let pure = TraceClassOperator::from_diagonal(&[1.0, 0.0]).unwrap();
        let k = renorm_kronecker(&pure, &pure);
        assert_eq!(k.spectrum().values(), &[1.0, 0.0, 0.0, 0.0]);
        let half = TraceClassOperator::from_diagonal(&[0.5, 0.5]).unwrap();
        let k = renorm_kronecker(&half, &half);
        let det: f64 = k.spectrum().iter().map(|l| 1.0 + l).product();
        assert!((det - 1.25f64.powi(4)).abs() < 1e-14);
        assert!((k.trace_norm() - 1.0).abs() < 1e-15);
        let mut rng = random::rng(14, 0);
        for _ in 0..50 {
            let (da, db) = (rng.random_range(1..=4), rng.random_range(1..=4));
            let a = random::density(&mut rng, da);
            let b = random::density(&mut rng, db);
            let k = renorm_kronecker(a.operator(), b.operator());
            assert!((k.trace_norm() - 1.0).abs() < 1e-10);
            let det: f64 = k.spectrum().iter().map(|l| 1.0 + l).product();
            assert!(det <= std::f64::consts::E + 1e-10);
        }
    }

    #[test]
    fn kronecker_examples() {
        let r = kronecker_det_identity_check(&identity(2), &identity(2)).unwrap();
        assert!(r.holds() && r.worst_margin == 0.0);
        let (qa, qb) = (diag(&[2.0, 1.0]), diag(&[3.0, 1.0]));
        assert!((determinant(&kron(&qa, &qb)).unwrap().re - 36.0).abs() < 1e-12);
        let (fb, fa) = kronecker_det_factors(&qa, &qb).unwrap();
        assert!((fb.re - 9.0).abs() < 1e-12 && (fa.re - 4.0).abs() < 1e-12);
        assert!(kronecker_det_identity_check(&qa, &qb).unwrap().holds());

        let mut rng = random::rng(15, 0);
        for _ in 0..20 {
            let (na, nb) = (rng.random_range(1..=4), rng.random_range(1..=4));
            let (qa, qb) = (random::ginibre(&mut rng, na, na), random::ginibre(&mut rng, nb, nb));
            assert!(kronecker_det_identity_check(&qa, &qb).unwrap().holds());
            // closed form det(Q_A)^{N_B}·det(Q_B)^{N_A}
            let closed = determinant(&qa).unwrap().powu(nb as u32) * determinant(&qb).unwrap().powu(na as u32);
            let direct = determinant(&kron(&qa, &qb)).unwrap();
            assert!((closed - direct).norm() <= 1e-8 * direct.norm());
        }
    }

    #[test]
    fn block_additivity_examples() {
        let mut rng = random::rng(16, 0);
        let q = random::density(&mut rng, 3);
        let r = fen_block_additivity(&[(1.0, q)]).unwrap();
        assert!(r.holds() && r.worst_margin.abs() < 1e-15);

        let pure = DensityMatrix::from_diagonal(&[1.0]).unwrap();
        let blocks = [(0.5, pure.clone()), (0.5, pure)];
        assert!(fen_block_additivity(&blocks).unwrap().holds());
        let whole = DensityMatrix::from_diagonal(&[0.5, 0.5]).unwrap();
        assert!((fen(&whole).plus - 3.0 * 1.5f64.ln()).abs() < 1e-15);

        for _ in 0..20 {
            let w = random::probability_vector(&mut rng, 3);
            let blocks: Vec<_> = w
                .iter()
                .map(|&x| {
                    let d = rng.random_range(1..=4);
                    (x, random::density(&mut rng, d))
                })
                .collect();
            let r = fen_block_additivity(&blocks).unwrap();
            assert!(r.holds(), "{}", r.worst_margin);
        }
        assert!(matches!(
            fen_block_additivity(&[(0.7, DensityMatrix::maximally_mixed(2))]),
            Err(Error::WeightsInvalid(_))
        ));
    }

    #[test]
    fn rdm_decomposition_examples() {
        let psi = PureBipartiteState::bell();
        let terms = mixed_state_rdm_decomposition(&psi.density(), (2, 2)).unwrap();
        assert_eq!(terms.len(), 1);
        assert!(frobenius_norm(&(terms[0].local_b.matrix() - gram_operators(&psi).delta_b.matrix())) < 1e-12);

        // ½(Φ⁺ + Φ⁻) = ½(|00⟩⟨00| + |11⟩⟨11|)
        let mix = DensityMatrix::from_diagonal(&[0.5, 0.0, 0.0, 0.5]).unwrap();
        let terms = mixed_state_rdm_decomposition(&mix, (2, 2)).unwrap();
        let sum_b = terms.iter().fold(ComplexMatrix::zeros(2, 2), |acc, t| acc + t.local_b.matrix().scale(t.weight));
        assert!(frobenius_norm(&(sum_b - diag(&[0.5, 0.5]))) < 1e-12);

        let mut rng = random::rng(17, 0);
        for _ in 0..20 {
            let (da, db) = (rng.random_range(1..=3), rng.random_range(1..=3));
            let q = random::density(&mut rng, da * db);
            let terms = mixed_state_rdm_decomposition(&q, (da, db)).unwrap();
            let sum_a = terms.iter().fold(ComplexMatrix::zeros(da, da), |acc, t| acc + t.local_a.matrix().scale(t.weight));
            let sum_b = terms.iter().fold(ComplexMatrix::zeros(db, db), |acc, t| acc + t.local_b.matrix().scale(t.weight));
            let ra = partial_trace(&q, (da, db), Keep::A).unwrap();
            let rb = partial_trace(&q, (da, db), Keep::B).unwrap();
            assert!(frobenius_norm(&(sum_a - ra.matrix())) < 1e-9);
            assert!(frobenius_norm(&(sum_b - rb.matrix())) < 1e-9);
        }
        assert!(mixed_state_rdm_decomposition(&mix, (3, 2)).is_err());
    }

    #[test]
    fn hermitian_basis_is_orthonormal() {
        for d in 1..=4 {
            let b = hermitian_basis(d);
            assert_eq!(b.len(), d * d);
            for (i, x) in b.iter().enumerate() {
                assert!(frobenius_norm(&(x - x.adjoint())) < 1e-15);
                for (j, y) in b.iter().enumerate() {
                    let ip = (x * y).trace();
                    let expected = if i == j { 1.0 } else { 0.0 };
                    assert!((ip - c(expected, 0.0)).norm() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn operator_schmidt_examples() {
        let product = DensityMatrix::new(kron(&diag(&[1.0, 0.0]), &diag(&[0.0, 0.0, 1.0]))).unwrap();
        let os = operator_schmidt(&product, (2, 3)).unwrap();
        assert!((os.coefficients.values()[0] - 1.0).abs() < 1e-14);
        assert!(os.coefficients.values()[1..].iter().all(|&x| x < 1e-14));

        let bell = bell_density();
        let os = operator_schmidt(&bell, (2, 2)).unwrap();
        for t in os.coefficients.iter() {
            assert!((t - 0.5).abs() < 1e-14);
        }
        assert!((os.sum() - 2.0).abs() < 1e-9);
        assert_eq!(realignment_criterion(&bell, (2, 2)).unwrap().1, RealignmentVerdict::EntanglementDetected);

        let (sum, v) = realignment_criterion(&product, (2, 3)).unwrap();
        assert!((sum - 1.0).abs() < 1e-12);
        assert_eq!(v, RealignmentVerdict::NotDetected);
        let (sum, v) = realignment_criterion(&DensityMatrix::maximally_mixed(4), (2, 2)).unwrap();
        assert!((sum - 0.5).abs() < 1e-14);
        assert_eq!(v, RealignmentVerdict::NotDetected);
        assert!(operator_schmidt(&bell, (3, 2)).is_err());
    }

    #[test]
    fn operator_schmidt_reconstructs() {
        let mut rng = random::rng(18, 0);
        for _ in 0..20 {
            let (da, db) = (rng.random_range(1..=3), rng.random_range(1..=4));
            let q = random::density(&mut rng, da * db);
            let hs = frobenius_norm(q.matrix()).powi(2);
            for os in [operator_schmidt(&q, (da, db)).unwrap(), hermitian_operator_schmidt(&q, (da, db)).unwrap()] {
                assert!(frobenius_norm(&(os.reconstruct() - q.matrix())) < 1e-9);
                assert!((os.coefficients.iter().map(|t| t * t).sum::<f64>() - hs).abs() < 1e-10);
            }
            let h = hermitian_operator_schmidt(&q, (da, db)).unwrap();
            for f in h.factors_a.iter().chain(&h.factors_b) {
                assert!(frobenius_norm(&(f - f.adjoint())) < 1e-10);
            }
            // both decompositions have the same coefficients (unitary change of basis)
            let canon = operator_schmidt(&q, (da, db)).unwrap();
            for (x, y) in canon.coefficients.iter().zip(h.coefficients.iter()) {
                assert!((x - y).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn hermitian_schmidt_examples() {
        let mm = DensityMatrix::maximally_mixed(6);
        let h = hermitian_operator_schmidt(&mm, (2, 3)).unwrap();
        assert!((h.coefficients.values()[0] - frobenius_norm(mm.matrix())).abs() < 1e-14);
        let h = hermitian_operator_schmidt(&bell_density(), (2, 2)).unwrap();
        for t in h.coefficients.iter() {
            assert!((t - 0.5).abs() < 1e-14);
        }
    }

    #[test]
    fn local_unitary_examples() {
        let bell = PureBipartiteState::bell();
        let r = local_unitary_invariance_check(&bell, &identity(2), &identity(2)).unwrap();
        assert!(r.holds() && r.worst_margin == 0.0);
        let mut rng = random::rng(19, 0);
        for _ in 0..20 {
            let (da, db) = (rng.random_range(1..=4), rng.random_range(1..=4));
            let psi = PureBipartiteState::random(&mut rng, da, db);
            let (ua, ub) = (random::unitary(&mut rng, da), random::unitary(&mut rng, db));
            assert!(local_unitary_invariance_check(&psi, &ua, &ub).unwrap().holds());
        }
        assert!(matches!(
            local_unitary_invariance_check(&bell, &identity(3), &identity(2)),
            Err(Error::DimMismatch(3, 2))
        ));
    }

    #[test]
    fn local_channel_probe() {
        let psi = product_state(2, 2);
        let r = gramian_local_channel_check(&psi, &depolarizing(2, 1.0).unwrap()).unwrap();
        assert_eq!(r.violations, 1);
        assert!((r.worst_margin + 0.25).abs() < 1e-14);
        assert_eq!(replay_witness("gramian-local-channel", r.witness.as_ref().unwrap()).unwrap(), r.worst_margin);
        let r = gramian_local_channel_check(&PureBipartiteState::bell(), &KrausChannel::identity(2)).unwrap();
        assert!(r.holds());
    }
}
