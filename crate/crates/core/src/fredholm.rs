//! Fredholm determinants `det(I + zA)` by independent routes, traces of
//! antisymmetric powers, and the block/product determinant identities.
//!
//! The spectral, Grothendieck and Plemelj routes take a Hermitian PSD
//! operator, where eigenvalues and singular values coincide. Arbitrary square
//! matrices go through [`det_direct`].

use num_complex::Complex64;
use serde::Serialize;
use serde_json::json;

use crate::error::{Error, Result};
use crate::io::matrix_json;
use crate::linalg::{
    c, determinant, direct_sum, identity, kahan_sum, trace, trace_norm, ComplexMatrix,
    TraceClassOperator,
};
use crate::report::ClaimReport;

/// Default number of Plemelj terms.
pub const PLEMELJ_DEFAULT_ORDER: usize = 200;
/// Plemelj summation stops once a term drops below this magnitude.
pub const PLEMELJ_TERM_CUTOFF: f64 = 1e-15;
/// Elementary symmetric values below this (relative to `e₀ = 1`) are set to zero.
pub const ESYM_ZERO: f64 = 1e-14;
/// Largest dimension accepted by [`wedge_trace_oracle`].
pub const ORACLE_MAX_DIM: usize = 6;
/// Largest wedge order accepted by [`wedge_trace_oracle`].
pub const ORACLE_MAX_ORDER: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    Spectral,
    Grothendieck,
    Plemelj,
    Direct,
}

impl std::str::FromStr for Route {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "spectral" => Ok(Route::Spectral),
            "grothendieck" => Ok(Route::Grothendieck),
            "plemelj" => Ok(Route::Plemelj),
            "direct" => Ok(Route::Direct),
            other => Err(format!("unknown route '{other}'")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeterminantResult {
    pub value: Complex64,
    pub route: Route,
    pub truncation_order: Option<usize>,
    /// Entire-function envelope `exp(|z|·‖A‖₁)`.
    pub bound: f64,
}

impl DeterminantResult {
    pub fn within_bound(&self) -> bool {
        self.value.norm() <= self.bound * (1.0 + 1e-8)
    }
}

fn envelope(z: Complex64, norm1: f64) -> f64 {
    (z.norm() * norm1).exp()
}

/// `∏ (1 + z·λ_k)` over the spectrum.
pub fn det_spectral(a: &TraceClassOperator, z: Complex64) -> DeterminantResult {
    let value = a
        .spectrum()
        .iter()
        .fold(c(1.0, 0.0), |acc, l| acc * (c(1.0, 0.0) + z * l));
    DeterminantResult {
        value,
        route: Route::Spectral,
        truncation_order: None,
        bound: envelope(z, a.trace_norm()),
    }
}

/// Real parts of `Tr[m^k]` for `k = 1..=n`.
pub fn power_traces(m: &ComplexMatrix, n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n);
    if n == 0 {
        return out;
    }
    let mut power = m.clone();
    out.push(trace(&power).re);
    for _ in 1..n {
        power = &power * m;
        out.push(trace(&power).re);
    }
    out
}

/// Elementary symmetric polynomials `e₀..=e_n` from power sums `p₁..=p_n`
/// via Newton's identities `n·e_n = Σ_{k=1}^{n} (−1)^{k−1} e_{n−k} p_k`.
pub fn elementary_symmetric(power_sums: &[f64]) -> Vec<f64> {
    let mut e = Vec::with_capacity(power_sums.len() + 1);
    e.push(1.0);
    for n in 1..=power_sums.len() {
        let terms = (1..=n).map(|k| {
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            sign * e[n - k] * power_sums[k - 1]
        });
        let mut value = kahan_sum(terms) / n as f64;
        if value.abs() < ESYM_ZERO {
            value = 0.0;
        }
        e.push(value);
    }
    e
}

/// `Σ_{n=0}^{min(order, dim)} zⁿ·eₙ(σ(a))`, with `eₙ` from power traces.
pub fn det_grothendieck(a: &TraceClassOperator, z: Complex64, order: usize) -> DeterminantResult {
    let terms = order.min(a.dim());
    let e = elementary_symmetric(&power_traces(a.matrix(), terms));
    let mut value = c(0.0, 0.0);
    let mut zn = c(1.0, 0.0);
    for en in e {
        value += zn * en;
        zn *= z;
    }
    DeterminantResult {
        value,
        route: Route::Grothendieck,
        truncation_order: Some(terms),
        bound: envelope(z, a.trace_norm()),
    }
}

/// `exp(Σ_{n≥1} (−1)^{n+1} zⁿ Tr[aⁿ] / n)`, valid for `|z|·ρ(a) < 1`.
pub fn det_plemelj(a: &TraceClassOperator, z: Complex64, order: usize) -> Result<DeterminantResult> {
    let radius = z.norm() * a.spectral_radius();
    if radius >= 1.0 {
        return Err(Error::ConvergenceDomain(radius));
    }
    let mut log_det = c(0.0, 0.0);
    let mut zn = c(1.0, 0.0);
    let mut power = identity(a.dim());
    let mut used = 0;
    for n in 1..=order {
        power = &power * a.matrix();
        zn *= z;
        let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
        let term = zn * trace(&power).re * (sign / n as f64);
        log_det += term;
        used = n;
        if term.norm() < PLEMELJ_TERM_CUTOFF {
            break;
        }
    }
    Ok(DeterminantResult {
        value: log_det.exp(),
        route: Route::Plemelj,
        truncation_order: Some(used),
        bound: envelope(z, a.trace_norm()),
    })
}

/// `det(I + zA)` for any square matrix by LU factorisation.
pub fn det_direct(m: &ComplexMatrix, z: Complex64) -> Result<DeterminantResult> {
    if !m.is_square() {
        return Err(Error::NotSquare(m.nrows(), m.ncols()));
    }
    let value = determinant(&(identity(m.nrows()) + m * z))?;
    Ok(DeterminantResult {
        value,
        route: Route::Direct,
        truncation_order: None,
        bound: envelope(z, trace_norm(m)?),
    })
}

/// `Tr[∧ⁿ a] = eₙ(σ(a))` via Newton's identities.
pub fn wedge_trace(a: &TraceClassOperator, n: usize) -> Result<f64> {
    if n > a.dim() {
        return Err(Error::OrderOutOfRange { order: n, max: a.dim() });
    }
    Ok(elementary_symmetric(&power_traces(a.matrix(), n))[n])
}

/// All permutations of `0..n` paired with their signs.
fn signed_permutations(n: usize) -> Vec<(Vec<usize>, f64)> {
    fn go(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                go(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut perms = Vec::new();
    go(&mut Vec::new(), &mut vec![false; n], &mut perms);
    perms
        .into_iter()
        .map(|p| {
            let inversions = (0..n)
                .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
                .filter(|&(i, j)| p[i] > p[j])
                .count();
            let sign = if inversions % 2 == 0 { 1.0 } else { -1.0 };
            (p, sign)
        })
        .collect()
}

/// Explicit antisymmetriser `P = (1/n!) Σ_π sgn(π) Π_π` on `(Cᵈ)^{⊗n}`.
fn antisymmetrizer(d: usize, n: usize) -> ComplexMatrix {
    let size = d.pow(n as u32);
    let perms = signed_permutations(n);
    let norm: f64 = perms.len() as f64;
    let digits = |mut idx: usize| {
        let mut out = vec![0; n];
        for slot in (0..n).rev() {
            out[slot] = idx % d;
            idx /= d;
        }
        out
    };
    let index = |ds: &[usize]| ds.iter().fold(0, |acc, &x| acc * d + x);
    let mut p = ComplexMatrix::zeros(size, size);
    for col in 0..size {
        let ds = digits(col);
        for (perm, sign) in &perms {
            let permuted: Vec<usize> = perm.iter().map(|&k| ds[k]).collect();
            p[(index(&permuted), col)] += c(sign / norm, 0.0);
        }
    }
    p
}

/// Brute-force `Tr[P a^{⊗n} P]` with the explicit antisymmetric projector `P`.
///
/// `P` is normalised as an orthogonal projector, for which the trace is
/// exactly `eₙ(σ(a))` with no extra factor; the `1/n!` bound on states is a
/// consequence (Maclaurin) rather than a normalisation.
pub fn wedge_trace_oracle(a: &TraceClassOperator, n: usize) -> Result<f64> {
    let d = a.dim();
    if d > ORACLE_MAX_DIM {
        return Err(Error::DimensionTooLarge { dim: d, max: ORACLE_MAX_DIM });
    }
    if n > ORACLE_MAX_ORDER {
        return Err(Error::OrderOutOfRange { order: n, max: ORACLE_MAX_ORDER });
    }
    if n == 0 {
        return Ok(1.0);
    }
    let mut tensor = a.matrix().clone();
    for _ in 1..n {
        tensor = tensor.kronecker(a.matrix());
    }
    let p = antisymmetrizer(d, n);
    Ok(trace(&(&p * tensor * &p)).re)
}

/// `⟨f₁∧…∧fₙ | g₁∧…∧gₙ⟩ = det(⟨fᵢ|gⱼ⟩) / n!`.
pub fn wedge_inner_product(ff: &[Vec<Complex64>], gg: &[Vec<Complex64>]) -> Result<Complex64> {
    if ff.len() != gg.len() {
        return Err(Error::LengthMismatch(ff.len(), gg.len()));
    }
    let n = ff.len();
    if let Some(d) = ff.first().map(Vec::len) {
        for v in ff.iter().chain(gg) {
            if v.len() != d {
                return Err(Error::DimMismatch(v.len(), d));
            }
        }
    }
    let gram = ComplexMatrix::from_fn(n, n, |i, j| {
        ff[i].iter().zip(&gg[j]).map(|(f, g)| f.conj() * g).sum::<Complex64>()
    });
    let factorial: f64 = (1..=n).map(|k| k as f64).product();
    Ok(determinant(&gram)? / factorial)
}

/// `det(I + a ⊕ b)` by the spectral route on the block-diagonal operator.
pub fn det_direct_sum(a: &TraceClassOperator, b: &TraceClassOperator) -> f64 {
    let block = TraceClassOperator::new(direct_sum(a.matrix(), b.matrix()))
        .expect("direct sum of PSD operators is PSD");
    det_spectral(&block, c(1.0, 0.0)).value.re
}

/// Relative tolerance for [`det_product_identity_check`].
pub const PRODUCT_IDENTITY_TOL: f64 = 1e-9;

/// Checks `det(I+A)·det(I+B) = det((I+A)(I+B))`, the right side by LU.
pub fn det_product_identity_check(a: &TraceClassOperator, b: &TraceClassOperator) -> Result<ClaimReport> {
    if a.dim() != b.dim() {
        return Err(Error::DimMismatch(a.dim(), b.dim()));
    }
    let one = c(1.0, 0.0);
    let lhs = det_spectral(a, one).value * det_spectral(b, one).value;
    let id = identity(a.dim());
    let rhs = determinant(&((&id + a.matrix()) * (&id + b.matrix())))?;
    let deviation = (lhs - rhs).norm() / rhs.norm();
    let mut report = ClaimReport::new("product-identity");
    report.record(-deviation, PRODUCT_IDENTITY_TOL, || {
        json!({ "a": matrix_json(a.matrix()), "b": matrix_json(b.matrix()) })
    });
    Ok(report)
}
