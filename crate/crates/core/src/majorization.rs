//! Additive and multiplicative majorization of non-increasing sequences and
//! states, Gram numbers, the FEN interpolation path, and a constructive
//! finite-dimensional conversion between majorization-ordered spectra.
//!
//! `b` majorizes `a` additively when every prefix sum of `a` is at most the
//! corresponding prefix sum of `b`; multiplicatively when the same holds for
//! prefix products of `(1 + ·)`. Shorter sequences are padded with zeros.
//! Prefix indices reported in verdicts are 1-based prefix lengths.

use nalgebra::DMatrix;
use rand::Rng;
use serde::Serialize;
use serde_json::json;

use crate::entropy::{entropy_operator, fen, fen_term, Sign};
use crate::error::{Error, Result};
use crate::io::matrix_json;
use crate::linalg::{kahan_sum, DensityMatrix, Spectrum};
use crate::random;
use crate::report::{ClaimReport, TrialOutcome};

/// A margin within `±PREFIX_TOL` counts as equality.
pub const PREFIX_TOL: f64 = 1e-12;
/// Allowed difference between the totals of two sequences being converted.
pub const SUM_TOL: f64 = 1e-10;

/// Non-negative sequence sorted non-increasingly.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderedSequence {
    values: Vec<f64>,
}

impl OrderedSequence {
    /// Sorts descending; equal values keep their input order.
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if let Some(bad) = values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::InvalidSequence(format!("entry {bad} is not a finite non-negative number")));
        }
        values.sort_by(|a, b| b.total_cmp(a));
        Ok(OrderedSequence { values })
    }

    pub fn from_spectrum(s: &Spectrum) -> Self {
        OrderedSequence {
            values: s.iter().map(|v| v.max(0.0)).collect(),
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn sum(&self) -> f64 {
        kahan_sum(self.values.iter().copied())
    }

    fn padded(&self, len: usize) -> Vec<f64> {
        let mut v = self.values.clone();
        v.resize(len.max(v.len()), 0.0);
        v
    }

    fn map(&self, f: impl Fn(f64) -> f64) -> OrderedSequence {
        OrderedSequence {
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    Additive,
    Multiplicative,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MajorizationVerdict {
    pub relation: Relation,
    pub holds: bool,
    /// 1-based length of the first failing prefix.
    pub first_violation: Option<usize>,
    /// `rhs − lhs` for each prefix.
    pub margins: Vec<f64>,
}

impl MajorizationVerdict {
    fn from_margins(relation: Relation, margins: Vec<f64>) -> Self {
        let first_violation = margins.iter().position(|&m| m.is_nan() || m < -PREFIX_TOL).map(|i| i + 1);
        MajorizationVerdict {
            relation,
            holds: first_violation.is_none(),
            first_violation,
            margins,
        }
    }

    pub fn min_margin(&self) -> f64 {
        self.margins.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

fn prefix_margins(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut sa = 0.0;
    let mut sb = 0.0;
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            sa += x;
            sb += y;
            sb - sa
        })
        .collect()
}

/// Does `b` majorize `a`? Prefix sums of `a` bounded by those of `b`.
pub fn additive_majorizes(a: &OrderedSequence, b: &OrderedSequence) -> MajorizationVerdict {
    let n = a.len().max(b.len());
    MajorizationVerdict::from_margins(Relation::Additive, prefix_margins(&a.padded(n), &b.padded(n)))
}

/// Does `b` majorize `a` multiplicatively? `∏(1 + a_i) ≤ ∏(1 + b_i)` on every
/// prefix, compared in the log domain.
pub fn multiplicative_majorizes(a: &OrderedSequence, b: &OrderedSequence) -> MajorizationVerdict {
    let n = a.len().max(b.len());
    let la = a.map(f64::ln_1p).padded(n);
    let lb = b.map(f64::ln_1p).padded(n);
    MajorizationVerdict::from_margins(Relation::Multiplicative, prefix_margins(&la, &lb))
}

/// Probe that multiplicative majorization implies additive majorization on
/// random non-negative sequences. Trials where the hypothesis fails are
/// counted but not evaluated.
pub fn m_implies_additive_probe(trials: u64, dim: usize, seed: u64) -> ClaimReport {
    let mut report = ClaimReport::new("m-implies-additive").conditional();
    let dim = dim.max(1);
    for trial in 0..trials {
        let mut rng = random::rng(seed, trial);
        let len = rng.random_range(1..=dim);
        let b = random::uniform_vector(&mut rng, len);
        // Half the pairs shrink `b` entrywise so the hypothesis holds often.
        let a = if rng.random_bool(0.5) {
            b.iter().map(|&x| x * rng.random::<f64>()).collect()
        } else {
            random::uniform_vector(&mut rng, len)
        };
        let a = OrderedSequence::new(a).expect("uniform samples are non-negative");
        let b = OrderedSequence::new(b).expect("uniform samples are non-negative");
        report.merge_trial(m_implies_additive_case(&a, &b));
    }
    report
}

/// One trial of the implication: `Some(margin)` when the hypothesis holds.
pub fn m_implies_additive_case(a: &OrderedSequence, b: &OrderedSequence) -> TrialOutcome {
    if !multiplicative_majorizes(a, b).holds {
        return TrialOutcome::Skipped;
    }
    let margin = additive_majorizes(a, b).min_margin();
    TrialOutcome::Evaluated {
        margin,
        tolerance: PREFIX_TOL,
        witness: json!({ "a": a.values(), "b": b.values() }),
    }
}

/// `g_n = ∏_{i≤n} (1 + λ_i)` for `n = 1..=dim`.
pub fn gram_numbers(q: &DensityMatrix) -> Vec<f64> {
    gram_numbers_of(q.spectrum())
}

pub fn gram_numbers_of(s: &Spectrum) -> Vec<f64> {
    let mut acc = 1.0;
    s.iter()
        .map(|l| {
            acc *= 1.0 + l;
            acc
        })
        .collect()
}

/// Does `q2` m-majorize `q1`, i.e. `g_n(q1) ≤ g_n(q2)` for every `n`?
pub fn state_m_majorizes(q1: &DensityMatrix, q2: &DensityMatrix) -> MajorizationVerdict {
    let (mut g1, mut g2) = (gram_numbers(q1), gram_numbers(q2));
    let n = g1.len().max(g2.len());
    let pad = |g: &mut Vec<f64>| {
        let last = g.last().copied().unwrap_or(1.0);
        g.resize(n, last);
    };
    pad(&mut g1);
    pad(&mut g2);
    let margins = g1.iter().zip(&g2).map(|(x, y)| y - x).collect();
    MajorizationVerdict::from_margins(Relation::Multiplicative, margins)
}

fn co_sorted_spectra(q1: &DensityMatrix, q2: &DensityMatrix) -> Result<(Vec<f64>, Vec<f64>)> {
    if q1.dim() != q2.dim() {
        return Err(Error::DimMismatch(q1.dim(), q2.dim()));
    }
    Ok((q1.spectrum().values().to_vec(), q2.spectrum().values().to_vec()))
}

fn check_unit_interval(t: f64) -> Result<()> {
    if (0.0..=1.0).contains(&t) {
        Ok(())
    } else {
        Err(Error::ParameterOutOfRange(format!("t = {t} not in [0, 1]")))
    }
}

/// `F(t) = Σ (1 + x_n) ln(1 + x_n)` with `x_n = t·λ_n + (1−t)·μ_n` on co-sorted spectra.
pub fn fen_interpolation(q1: &DensityMatrix, q2: &DensityMatrix, t: f64) -> Result<f64> {
    let (l, m) = co_sorted_spectra(q1, q2)?;
    Ok(kahan_sum(l.iter().zip(&m).map(|(a, b)| fen_term(t * a + (1.0 - t) * b))))
}

/// `F''(t) = Σ (λ_n − μ_n)² / (1 + t·λ_n + (1−t)·μ_n)`.
pub fn fen_interpolation_second_derivative(q1: &DensityMatrix, q2: &DensityMatrix, t: f64) -> Result<f64> {
    check_unit_interval(t)?;
    let (l, m) = co_sorted_spectra(q1, q2)?;
    Ok(kahan_sum(l.iter().zip(&m).map(|(a, b)| {
        let d = a - b;
        d * d / (1.0 + t * a + (1.0 - t) * b)
    })))
}

/// Probe of FEN monotonicity under m-majorization of the entropy-generating
/// operators: whenever `S₊(Q₁)` is m-majorized by `S₊(Q₂)`, check
/// `FEN₊(Q₁) ≤ FEN₊(Q₂)`.
pub fn fen_monotonicity_probe(trials: u64, dim: usize, seed: u64) -> ClaimReport {
    let mut report = ClaimReport::new("fen-monotone-s-plus").conditional();
    let dim = dim.max(1);
    for trial in 0..trials {
        let mut rng = random::rng(seed, trial);
        let d = rng.random_range(1..=dim);
        let q1 = random::density(&mut rng, d);
        let rank = rng.random_range(1..=d);
        let q2 = random::density_with_rank(&mut rng, d, rank);
        report.merge_trial(fen_monotonicity_case(&q1, &q2));
    }
    report
}

pub fn fen_monotonicity_case(q1: &DensityMatrix, q2: &DensityMatrix) -> TrialOutcome {
    let s1 = OrderedSequence::from_spectrum(&entropy_operator(q1, Sign::Plus).spectrum);
    let s2 = OrderedSequence::from_spectrum(&entropy_operator(q2, Sign::Plus).spectrum);
    if !multiplicative_majorizes(&s1, &s2).holds {
        return TrialOutcome::Skipped;
    }
    TrialOutcome::Evaluated {
        margin: fen(q2).plus - fen(q1).plus,
        tolerance: PREFIX_TOL,
        witness: json!({ "q1": matrix_json(q1.matrix()), "q2": matrix_json(q2.matrix()) }),
    }
}

/// `(1 − t)·I + t·(swap of i and j)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TTransform {
    pub i: usize,
    pub j: usize,
    pub t: f64,
}

impl TTransform {
    pub fn matrix(&self, n: usize) -> DMatrix<f64> {
        let mut m = DMatrix::identity(n, n);
        m[(self.i, self.i)] = 1.0 - self.t;
        m[(self.j, self.j)] = 1.0 - self.t;
        m[(self.i, self.j)] = self.t;
        m[(self.j, self.i)] = self.t;
        m
    }
}

/// A permutation `perm` acts as `(P b)_i = b[perm[i]]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightedPermutation {
    pub weight: f64,
    pub perm: Vec<usize>,
}

impl WeightedPermutation {
    pub fn matrix(&self) -> DMatrix<f64> {
        let n = self.perm.len();
        DMatrix::from_fn(n, n, |i, j| if self.perm[i] == j { 1.0 } else { 0.0 })
    }
}

/// Doubly stochastic map realizing `a = D·b` as T-transforms and as a convex
/// combination of permutations.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConversionPlan {
    pub t_transforms: Vec<TTransform>,
    pub permutations: Vec<WeightedPermutation>,
}

impl ConversionPlan {
    pub fn dim(&self) -> usize {
        self.permutations.first().map_or(0, |p| p.perm.len())
    }

    /// `Σ w_k P_k`.
    pub fn doubly_stochastic(&self) -> DMatrix<f64> {
        let n = self.dim();
        self.permutations
            .iter()
            .fold(DMatrix::zeros(n, n), |acc, p| acc + p.matrix() * p.weight)
    }

    pub fn apply(&self, b: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; b.len()];
        for p in &self.permutations {
            for (slot, &src) in out.iter_mut().zip(&p.perm) {
                *slot += p.weight * b[src];
            }
        }
        out
    }
}

/// Builds a doubly stochastic `D` with `a = D b` for `a` majorized by `b`
/// (equal totals) and decomposes it into weighted permutations.
pub fn construct_conversion_channel(a: &OrderedSequence, b: &OrderedSequence) -> Result<ConversionPlan> {
    let n = a.len().max(b.len());
    let (sa, sb) = (a.sum(), b.sum());
    if (sa - sb).abs() > SUM_TOL {
        return Err(Error::SumMismatch(sa, sb));
    }
    let verdict = additive_majorizes(a, b);
    if let Some(k) = verdict.first_violation {
        return Err(Error::NotMajorized(k));
    }
    let target = a.padded(n);
    let mut cur = b.padded(n);
    let mut d = DMatrix::<f64>::identity(n, n);
    let mut t_transforms = Vec::new();
    let eps = 1e-15 * sb.max(1.0);
    while t_transforms.len() < n {
        let Some(j) = (0..n).rev().find(|&j| cur[j] - target[j] > eps) else {
            break;
        };
        let Some(k) = ((j + 1)..n).find(|&k| target[k] - cur[k] > eps) else {
            break;
        };
        let delta = (cur[j] - target[j]).min(target[k] - cur[k]);
        let t = delta / (cur[j] - cur[k]);
        let step = TTransform { i: j, j: k, t };
        d = step.matrix(n) * d;
        cur[j] -= delta;
        cur[k] += delta;
        // snap the coordinate that reached its target
        if (cur[j] - target[j]).abs() <= (cur[k] - target[k]).abs() {
            cur[j] = target[j];
        } else {
            cur[k] = target[k];
        }
        t_transforms.push(step);
    }
    let permutations = birkhoff_decomposition(&d);
    Ok(ConversionPlan {
        t_transforms,
        permutations,
    })
}

/// Entries below this are treated as zero during the Birkhoff peeling.
const BIRKHOFF_ZERO: f64 = 1e-14;

/// Greedy Birkhoff–von Neumann decomposition of a doubly stochastic matrix.
pub fn birkhoff_decomposition(d: &DMatrix<f64>) -> Vec<WeightedPermutation> {
    let n = d.nrows();
    let mut rest = d.clone();
    let mut out = Vec::new();
    let max_terms = (n.saturating_sub(1)).pow(2) + 1;
    while out.len() < max_terms.max(n * n) {
        let Some(perm) = perfect_matching(&rest) else {
            break;
        };
        let weight = perm
            .iter()
            .enumerate()
            .map(|(i, &j)| rest[(i, j)])
            .fold(f64::INFINITY, f64::min);
        if weight <= BIRKHOFF_ZERO {
            break;
        }
        for (i, &j) in perm.iter().enumerate() {
            rest[(i, j)] -= weight;
            if rest[(i, j)] <= BIRKHOFF_ZERO {
                rest[(i, j)] = 0.0;
            }
        }
        out.push(WeightedPermutation { weight, perm });
    }
    let total: f64 = out.iter().map(|p| p.weight).sum();
    if total > 0.0 {
        for p in &mut out {
            p.weight /= total;
        }
    }
    out
}

/// Perfect matching on the support `{(i, j) : m[i, j] > BIRKHOFF_ZERO}` via
/// augmenting paths; `result[i]` is the column matched to row `i`.
fn perfect_matching(m: &DMatrix<f64>) -> Option<Vec<usize>> {
    let n = m.nrows();
    let mut col_owner: Vec<Option<usize>> = vec![None; n];

    fn augment(row: usize, m: &DMatrix<f64>, seen: &mut [bool], col_owner: &mut [Option<usize>]) -> bool {
        // prefer heavier entries to keep the number of terms small
        let mut cols: Vec<usize> = (0..m.ncols()).filter(|&j| m[(row, j)] > BIRKHOFF_ZERO).collect();
        cols.sort_by(|&x, &y| m[(row, y)].total_cmp(&m[(row, x)]));
        for j in cols {
            if seen[j] {
                continue;
            }
            seen[j] = true;
            let free = match col_owner[j] {
                None => true,
                Some(other) => augment(other, m, seen, col_owner),
            };
            if free {
                col_owner[j] = Some(row);
                return true;
            }
        }
        false
    }

    for row in 0..n {
        let mut seen = vec![false; n];
        if !augment(row, m, &mut seen, &mut col_owner) {
            return None;
        }
    }
    let mut perm = vec![0; n];
    for (j, owner) in col_owner.iter().enumerate() {
        perm[owner.expect("perfect matching covers every column")] = j;
    }
    Some(perm)
}
