//! Registry of checkable claims. Each claim runs seeded random trials (trial
//! `k` draws from stream `k` of the seed) and produces a [`ClaimReport`].
//! Claims known to fail carry the expected status
//! [`ExpectedStatus::DocumentedCounterexample`]; their trial 0 is a fixed
//! witness so the failure reproduces for every seed.

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::bipartite::{self, fen_block_additivity, gramian_local_channel_check, kronecker_det_identity_check,
    local_unitary_invariance_check, realignment_criterion, PureBipartiteState};
use crate::channels::{self, check_det_contraction, check_fen_reduction, check_separable_contraction, depolarizing,
    mixed_unitary, pauli_x, KrausChannel};
use crate::entropy::{log_concavity_margin, log_continuity_probe, log_monotonicity_margin};
use crate::error::{Error, Result};
use crate::fredholm::{det_direct, det_direct_sum, det_product_identity_check, det_spectral};
use crate::io::{matrix_from_json, matrix_json};
use crate::linalg::{c, identity, kron, ComplexMatrix, DensityMatrix, TraceClassOperator};
use crate::majorization::{
    fen_monotonicity_case, fen_monotonicity_probe, m_implies_additive_case, m_implies_additive_probe,
    OrderedSequence,
};
use crate::random::{self, TrialRng};
use crate::report::{ClaimReport, TrialOutcome};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExpectedStatus {
    Holds,
    DocumentedCounterexample,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ClaimSpec {
    pub id: &'static str,
    pub expected: ExpectedStatus,
    pub summary: &'static str,
}

const fn holds(id: &'static str, summary: &'static str) -> ClaimSpec {
    ClaimSpec { id, expected: ExpectedStatus::Holds, summary }
}

const fn fails(id: &'static str, summary: &'static str) -> ClaimSpec {
    ClaimSpec { id, expected: ExpectedStatus::DocumentedCounterexample, summary }
}

pub const REGISTRY: &[ClaimSpec] = &[
    fails("det-contraction", "det(I + Φ(Q)) ≤ det(I + Q) for channels with Σ A A† ≤ I"),
    fails("fen-partial-trace", "FEN₊(Tr_B Q) ≤ FEN₊(Q)"),
    fails("separable-contraction", "det(I + (Φ_A ⊗ Φ_B)(Q)) ≤ det(I + Q)"),
    fails("gramian-local-channel", "G does not increase under a local channel (reduced-state reading)"),
    holds("m-implies-additive", "multiplicative majorization implies additive majorization"),
    holds("direct-sum", "det(I + A ⊕ B) = det(I + A)·det(I + B)"),
    holds("product-identity", "det(I + A)·det(I + B) = det((I + A)(I + B))"),
    holds("log-operator-monotone", "A ≤ B implies log(I + A) ≤ log(I + B)"),
    holds("log-operator-concave", "log(I + ·) is operator concave"),
    holds("local-unitary-invariance", "G, g and FEN are invariant under local unitaries"),
    holds("kronecker-formula", "det(Q_A ⊗ Q_B) = det(I ⊗ Q_B)·det(Q_A ⊗ I)"),
    holds("entire-function-bound", "|det(I + zA)| ≤ exp(|z|·‖A‖₁)"),
    holds("fen-block-additivity", "FEN₊(⊕ λ_i Q_i) = Σ FEN₊(λ_i Q_i)"),
    holds("realignment-separable", "separable states have realignment sum ≤ 1"),
    holds("log-continuity", "‖log(I+Q) − log(I+Q')‖₁ ≤ ‖Q − Q'‖₁ / (1 − τ)"),
    holds("fen-monotone-s-plus", "S₊(Q₁) m-majorized by S₊(Q₂) implies FEN₊(Q₁) ≤ FEN₊(Q₂)"),
];

/// Alternative ids accepted on input, mapped to registry ids.
pub const ALIASES: &[(&str, &str)] = &[
    ("thm38-det-contraction", "det-contraction"),
    ("appA-direct-sum", "direct-sum"),
    ("appA-product-identity", "product-identity"),
    ("appC-operator-monotone", "log-operator-monotone"),
    ("appC-operator-concave", "log-operator-concave"),
];

pub fn lookup(id: &str) -> Result<&'static ClaimSpec> {
    let id = ALIASES.iter().find(|(alias, _)| *alias == id).map_or(id, |(_, canonical)| canonical);
    REGISTRY
        .iter()
        .find(|s| s.id == id)
        .ok_or_else(|| Error::UnknownClaim(id.to_string()))
}

/// Whether a report has the status the registry expects.
pub fn outcome_matches(spec: &ClaimSpec, report: &ClaimReport) -> bool {
    match spec.expected {
        ExpectedStatus::Holds => report.violations == 0,
        ExpectedStatus::DocumentedCounterexample => report.violations > 0,
    }
}

/// Tolerance for the determinant identities checked here.
const DET_REL_TOL: f64 = 1e-9;
/// Tolerance for the log-domain entire-function bound.
const BOUND_TOL: f64 = 1e-12;
const OPERATOR_TOL: f64 = 1e-9;
const REALIGNMENT_TOL: f64 = 1e-10;
const CONCAVITY_WEIGHTS: [f64; 3] = [0.25, 0.5, 0.75];

/// Runs `trials` trials of claim `id` with matrices of dimension at most `dim`.
pub fn run_claim(id: &str, trials: u64, seed: u64, dim: usize) -> Result<ClaimReport> {
    let spec = lookup(id)?;
    let dim = dim.max(1);
    let local = dim.min(4);
    let mut report = ClaimReport::new(spec.id);
    match spec.id {
        "m-implies-additive" => return Ok(m_implies_additive_probe(trials, dim, seed)),
        "fen-monotone-s-plus" => return Ok(fen_monotonicity_probe(trials, dim, seed)),
        _ => {}
    }
    for trial in 0..trials {
        let mut rng = random::rng(seed, trial);
        let r = &mut rng;
        let one = match spec.id {
            "det-contraction" => {
                let (phi, q) = if trial == 0 {
                    (
                        mixed_unitary(&[0.5, 0.5], &[identity(2), pauli_x()])?,
                        DensityMatrix::from_diagonal(&[1.0, 0.0])?,
                    )
                } else {
                    let d = r.random_range(1..=dim);
                    (random_mixed_unitary(r, d)?, random::density(r, d))
                };
                check_det_contraction(&phi, &q)?
            }
            "fen-partial-trace" => {
                let (q, dims) = if trial == 0 {
                    (DensityMatrix::maximally_mixed(4), (2, 2))
                } else {
                    let (da, db) = (r.random_range(1..=local), r.random_range(1..=local));
                    let rank = r.random_range(1..=da * db);
                    (random::density_with_rank(r, da * db, rank), (da, db))
                };
                check_fen_reduction(&q, dims)?
            }
            "separable-contraction" => {
                let (pa, pb, q) = if trial == 0 {
                    let dep = depolarizing(2, 0.5)?;
                    (dep.clone(), dep, DensityMatrix::from_diagonal(&[1.0, 0.0, 0.0, 0.0])?)
                } else {
                    let (da, db) = (r.random_range(1..=local.min(3)), r.random_range(1..=local.min(3)));
                    let pa = random_mixed_unitary(r, da)?;
                    let pb = random_mixed_unitary(r, db)?;
                    (pa, pb, random::density(r, da * db))
                };
                check_separable_contraction(&pa, &pb, &q)?
            }
            "gramian-local-channel" => {
                let (psi, phi) = if trial == 0 {
                    let mut m = ComplexMatrix::zeros(2, 2);
                    m[(0, 0)] = c(1.0, 0.0);
                    (PureBipartiteState::new(m)?, depolarizing(2, 1.0)?)
                } else {
                    let (da, db) = (r.random_range(1..=local), r.random_range(1..=local));
                    let psi = PureBipartiteState::random(r, da, db);
                    (psi, random_mixed_unitary(r, da)?)
                };
                gramian_local_channel_check(&psi, &phi)?
            }
            "direct-sum" => {
                let (a, b) = random_psd_pair(r, dim, false);
                single(spec.id, direct_sum_margin(&a, &b), DET_REL_TOL, || pair_witness(&a, &b))
            }
            "product-identity" => {
                let (a, b) = random_psd_pair(r, dim, true);
                det_product_identity_check(&a, &b)?
            }
            "log-operator-monotone" => {
                let d = r.random_range(1..=dim);
                let scale = r.random_range(0.1..2.0);
                let a = random::psd(r, d, scale);
                let scale = r.random_range(0.1..2.0);
                let p = random::psd(r, d, scale);
                let b = TraceClassOperator::new(a.matrix() + p.matrix())?;
                let margin = log_monotonicity_margin(&a, &b)?;
                single(spec.id, margin, OPERATOR_TOL, || pair_witness(&a, &b))
            }
            "log-operator-concave" => {
                let (a, b) = random_psd_pair(r, dim, true);
                let t = CONCAVITY_WEIGHTS[(trial % 3) as usize];
                let margin = log_concavity_margin(&a, &b, t)?;
                single(spec.id, margin, OPERATOR_TOL, || {
                    let mut w = pair_witness(&a, &b);
                    w["t"] = json!(t);
                    w
                })
            }
            "local-unitary-invariance" => {
                let (da, db) = (r.random_range(1..=dim), r.random_range(1..=dim));
                let psi = PureBipartiteState::random(r, da, db);
                let (ua, ub) = (random::unitary(r, da), random::unitary(r, db));
                local_unitary_invariance_check(&psi, &ua, &ub)?
            }
            "kronecker-formula" => {
                let (na, nb) = (r.random_range(1..=local), r.random_range(1..=local));
                let (qa, qb) = (random::ginibre(r, na, na), random::ginibre(r, nb, nb));
                kronecker_det_identity_check(&qa, &qb)?
            }
            "entire-function-bound" => {
                let d = r.random_range(1..=dim);
                let scale = r.random_range(0.1..3.0);
                let a = random::psd(r, d, scale);
                let z = Complex64::from_polar(r.random_range(0.0..=10.0), r.random_range(0.0..std::f64::consts::TAU));
                let margin = entire_bound_margin(&a, z)?;
                single(spec.id, margin, BOUND_TOL, || json!({ "a": matrix_json(a.matrix()), "z": [z.re, z.im] }))
            }
            "fen-block-additivity" => {
                let k = r.random_range(1..=3);
                let weights = random::probability_vector(r, k);
                let blocks: Vec<(f64, DensityMatrix)> = weights
                    .into_iter()
                    .map(|w| {
                        let d = r.random_range(1..=dim);
                        (w, random::density(r, d))
                    })
                    .collect();
                fen_block_additivity(&blocks)?
            }
            "realignment-separable" => {
                let (da, db) = (r.random_range(2..=local.max(2)), r.random_range(2..=local.max(2)));
                let q = random_separable(r, da, db)?;
                let margin = realignment_margin(&q, (da, db))?;
                single(spec.id, margin, REALIGNMENT_TOL, || {
                    json!({ "q": matrix_json(q.matrix()), "dims": [da, db] })
                })
            }
            "log-continuity" => {
                let d = r.random_range(2..=dim.max(2));
                let (q, q2) = (random::density(r, d), random::density(r, d));
                log_continuity_probe(&q, &q2)?
            }
            other => return Err(Error::UnknownClaim(other.to_string())),
        };
        report = report.merge(one);
    }
    Ok(report)
}

fn single(id: &str, margin: f64, tol: f64, witness: impl FnOnce() -> Value) -> ClaimReport {
    let mut r = ClaimReport::new(id);
    r.record(margin, tol, witness);
    r
}

fn pair_witness(a: &TraceClassOperator, b: &TraceClassOperator) -> Value {
    json!({ "a": matrix_json(a.matrix()), "b": matrix_json(b.matrix()) })
}

fn random_psd_pair(r: &mut TrialRng, dim: usize, same_dim: bool) -> (TraceClassOperator, TraceClassOperator) {
    let da = r.random_range(1..=dim);
    let db = if same_dim { da } else { r.random_range(1..=dim) };
    let scale = r.random_range(0.1..2.0);
    let a = random::psd(r, da, scale);
    let scale = r.random_range(0.1..2.0);
    let b = random::psd(r, db, scale);
    (a, b)
}

fn random_mixed_unitary(r: &mut TrialRng, d: usize) -> Result<KrausChannel> {
    let k = r.random_range(1..=3);
    let weights = random::probability_vector(r, k);
    let us: Vec<_> = (0..k).map(|_| random::unitary(r, d)).collect();
    mixed_unitary(&weights, &us)
}

/// Convex mixture of up to 20 random product states.
pub fn random_separable(r: &mut TrialRng, da: usize, db: usize) -> Result<DensityMatrix> {
    let k = r.random_range(1..=20);
    let weights = random::probability_vector(r, k);
    let mut m = ComplexMatrix::zeros(da * db, da * db);
    for w in weights {
        let (ra, rb) = (r.random_range(1..=da), r.random_range(1..=db));
        let a = random::density_with_rank(r, da, ra);
        let b = random::density_with_rank(r, db, rb);
        m += kron(a.matrix(), b.matrix()).scale(w);
    }
    DensityMatrix::new(crate::linalg::hermitize(&m))
}

fn direct_sum_margin(a: &TraceClassOperator, b: &TraceClassOperator) -> f64 {
    let one = c(1.0, 0.0);
    let lhs = det_direct_sum(a, b);
    let rhs = det_spectral(a, one).value.re * det_spectral(b, one).value.re;
    -(lhs - rhs).abs() / rhs.abs()
}

/// `|z|·‖A‖₁ − ln|det(I + zA)|`, the determinant by LU.
fn entire_bound_margin(a: &TraceClassOperator, z: Complex64) -> Result<f64> {
    let det = det_direct(a.matrix(), z)?.value;
    Ok(z.norm() * a.trace_norm() - det.norm().ln())
}

fn realignment_margin(q: &DensityMatrix, dims: (usize, usize)) -> Result<f64> {
    Ok(1.0 - realignment_criterion(q, dims)?.0)
}

fn field<'a>(w: &'a Value, key: &str) -> Result<&'a Value> {
    w.get(key).ok_or_else(|| Error::MalformedWitness(format!("missing `{key}`")))
}

fn op_field(w: &Value, key: &str) -> Result<TraceClassOperator> {
    TraceClassOperator::new(matrix_from_json(field(w, key)?)?)
}

fn state_field(w: &Value, key: &str) -> Result<DensityMatrix> {
    DensityMatrix::new(matrix_from_json(field(w, key)?)?)
}

fn seq_field(w: &Value, key: &str) -> Result<OrderedSequence> {
    let v: Vec<f64> =
        serde_json::from_value(field(w, key)?.clone()).map_err(|e| Error::MalformedWitness(e.to_string()))?;
    OrderedSequence::new(v)
}

fn f64_field(w: &Value, key: &str) -> Result<f64> {
    field(w, key)?
        .as_f64()
        .ok_or_else(|| Error::MalformedWitness(format!("`{key}` must be a number")))
}

fn dims_field(w: &Value) -> Result<(usize, usize)> {
    let d: [usize; 2] =
        serde_json::from_value(field(w, "dims")?.clone()).map_err(|e| Error::MalformedWitness(e.to_string()))?;
    Ok((d[0], d[1]))
}

fn outcome_margin(o: TrialOutcome) -> Result<f64> {
    match o {
        TrialOutcome::Evaluated { margin, .. } => Ok(margin),
        TrialOutcome::Skipped => Err(Error::MalformedWitness("witness does not satisfy the hypothesis".into())),
    }
}

/// Recomputes the margin of a witness for claim `id`.
pub fn evaluate_witness(id: &str, w: &Value) -> Result<f64> {
    let spec = lookup(id)?;
    match spec.id {
        "det-contraction" | "separable-contraction" | "fen-partial-trace" => channels::replay_witness(spec.id, w),
        "gramian-local-channel" | "local-unitary-invariance" | "kronecker-formula" | "fen-block-additivity" => {
            bipartite::replay_witness(spec.id, w)
        }
        "m-implies-additive" => outcome_margin(m_implies_additive_case(&seq_field(w, "a")?, &seq_field(w, "b")?)),
        "fen-monotone-s-plus" => outcome_margin(fen_monotonicity_case(&state_field(w, "q1")?, &state_field(w, "q2")?)),
        "direct-sum" => Ok(direct_sum_margin(&op_field(w, "a")?, &op_field(w, "b")?)),
        "product-identity" => Ok(det_product_identity_check(&op_field(w, "a")?, &op_field(w, "b")?)?.worst_margin),
        "log-operator-monotone" => log_monotonicity_margin(&op_field(w, "a")?, &op_field(w, "b")?),
        "log-operator-concave" => log_concavity_margin(&op_field(w, "a")?, &op_field(w, "b")?, f64_field(w, "t")?),
        "entire-function-bound" => {
            let z: [f64; 2] =
                serde_json::from_value(field(w, "z")?.clone()).map_err(|e| Error::MalformedWitness(e.to_string()))?;
            entire_bound_margin(&op_field(w, "a")?, c(z[0], z[1]))
        }
        "realignment-separable" => realignment_margin(&state_field(w, "q")?, dims_field(w)?),
        "log-continuity" => Ok(log_continuity_probe(&state_field(w, "q")?, &state_field(w, "q2")?)?.worst_margin),
        other => Err(Error::UnknownClaim(other.to_string())),
    }
}

/// Recomputed witness margin of a report, if it carries a witness.
pub fn replay(report: &ClaimReport) -> Result<Option<f64>> {
    report
        .witness
        .as_ref()
        .map(|w| evaluate_witness(&report.claim_id, w))
        .transpose()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn aliases_resolve() {
        for (alias, canonical) in ALIASES {
            assert_eq!(lookup(alias).unwrap().id, *canonical);
        }
        assert_eq!(run_claim(ALIASES[0].0, 1, 0, 2).unwrap().claim_id, "det-contraction");
    }

    #[test]
    fn registry_ids_are_unique() {
        for (i, a) in REGISTRY.iter().enumerate() {
            assert!(REGISTRY[i + 1..].iter().all(|b| b.id != a.id));
        }
        assert!(matches!(lookup("nope"), Err(Error::UnknownClaim(_))));
    }

    #[test]
    fn every_claim_has_its_expected_status_and_replays() {
        for spec in REGISTRY {
            let report = run_claim(spec.id, 12, 2024, 4).unwrap();
            assert_eq!(report.claim_id, spec.id);
            assert_eq!(report.trials, 12, "{}", spec.id);
            assert!(outcome_matches(spec, &report), "{}: {:?}", spec.id, report);
            if let Some(m) = replay(&report).unwrap() {
                assert_eq!(Some(m), report.witness_margin(), "{}", spec.id);
            }
        }
    }

    #[test]
    fn runs_are_deterministic() {
        for id in ["det-contraction", "log-operator-concave", "m-implies-additive"] {
            assert_eq!(run_claim(id, 20, 9, 3).unwrap(), run_claim(id, 20, 9, 3).unwrap());
        }
        assert_ne!(
            run_claim("direct-sum", 5, 1, 4).unwrap().worst_margin,
            run_claim("direct-sum", 5, 2, 4).unwrap().worst_margin
        );
    }

    #[test]
    fn canonical_witnesses() {
        let r = run_claim("det-contraction", 1, 0, 2).unwrap();
        assert_eq!(r.witness_margin(), Some(-0.25));
        let r = run_claim("fen-partial-trace", 1, 0, 2).unwrap();
        let expected = 5.0 * 1.25f64.ln() - 3.0 * 1.5f64.ln();
        assert!((r.witness_margin().unwrap() - expected).abs() < 1e-14);
        let r = run_claim("gramian-local-channel", 1, 0, 2).unwrap();
        assert!((r.witness_margin().unwrap() + 0.25).abs() < 1e-14);
    }

    #[test]
    fn replay_survives_serialization() {
        let r = run_claim("separable-contraction", 3, 5, 3).unwrap();
        let back: ClaimReport = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(replay(&back).unwrap(), r.witness_margin());
    }

    #[test]
    fn random_separable_states_pass_realignment() {
        let mut rng = random::rng(3, 0);
        for _ in 0..50 {
            let q = random_separable(&mut rng, 3, 2).unwrap();
            assert!(realignment_margin(&q, (3, 2)).unwrap() >= -REALIGNMENT_TOL);
        }
    }
}
