//! Dense complex linear algebra: Hermitian eigendecomposition, SVD, norms,
//! spectral functional calculus and validated state construction.
//!
//! Every spectral quantity in the crate flows through [`hermitian_eig`] and
//! [`svd`]. Both return values in non-increasing order, ties broken by the
//! original index so that results are reproducible run to run.

use nalgebra::{DMatrix, DVector, SymmetricEigen, SVD};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

/// Dense square or rectangular complex matrix, the carrier for every operator.
pub type ComplexMatrix = DMatrix<Complex64>;

/// Eigenvalues in `(-EIG_CLAMP, 0)` are rounded up to zero.
pub const EIG_CLAMP: f64 = 1e-10;
/// Relative asymmetry allowed before a matrix is rejected as non-Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Absolute tolerance on the unit trace of a state.
pub const TRACE_TOL: f64 = 1e-10;
/// Relative eigen-residual `‖MU − UΛ‖_F / ‖M‖_F` accepted from the eigensolver.
pub const EIG_RESIDUAL_TOL: f64 = 1e-9;

/// Real spectrum sorted non-increasingly.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectrum {
    values: Vec<f64>,
}

impl Spectrum {
    /// Sorts `values` non-increasingly (stable, so equal values keep their order).
    pub fn new(mut values: Vec<f64>) -> Self {
        values.sort_by(|a, b| b.total_cmp(a));
        Spectrum { values }
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

    /// Largest value, 0 for an empty spectrum.
    pub fn max(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn sum(&self) -> f64 {
        kahan_sum(self.values.iter().copied())
    }

    pub fn iter(&self) -> impl Iterator<Item = f64> + '_ {
        self.values.iter().copied()
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.values
    }
}

/// Compensated summation.
pub fn kahan_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for v in values {
        let y = v - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    sum
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(n: usize) -> ComplexMatrix {
    ComplexMatrix::identity(n, n)
}

/// Real diagonal matrix.
pub fn diag(values: &[f64]) -> ComplexMatrix {
    ComplexMatrix::from_diagonal(&DVector::from_iterator(
        values.len(),
        values.iter().map(|&v| c(v, 0.0)),
    ))
}

/// Matrix from real entries given row by row.
pub fn from_real_rows(rows: &[&[f64]]) -> ComplexMatrix {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, |r| r.len());
    ComplexMatrix::from_fn(nrows, ncols, |i, j| c(rows[i][j], 0.0))
}

pub fn trace(m: &ComplexMatrix) -> Complex64 {
    m.diagonal().iter().sum()
}

/// Largest entry modulus.
pub fn max_abs(m: &ComplexMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn frobenius_norm(m: &ComplexMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `max |M − M†|` entrywise.
pub fn hermitian_asymmetry(m: &ComplexMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// `(M + M†) / 2`.
pub fn hermitize(m: &ComplexMatrix) -> ComplexMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// `‖U†U − I‖_F`.
pub fn unitarity_deviation(u: &ComplexMatrix) -> f64 {
    frobenius_norm(&(u.adjoint() * u - identity(u.ncols())))
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

/// Block-diagonal `a ⊕ b`.
pub fn direct_sum(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (ra, ca) = a.shape();
    let (rb, cb) = b.shape();
    let mut out = ComplexMatrix::zeros(ra + rb, ca + cb);
    out.view_mut((0, 0), (ra, ca)).copy_from(a);
    out.view_mut((ra, ca), (rb, cb)).copy_from(b);
    out
}

fn check_finite(m: &ComplexMatrix) -> Result<()> {
    if m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

fn check_square(m: &ComplexMatrix) -> Result<()> {
    if m.is_square() {
        Ok(())
    } else {
        Err(Error::NotSquare(m.nrows(), m.ncols()))
    }
}

fn check_hermitian(m: &ComplexMatrix) -> Result<()> {
    let asym = hermitian_asymmetry(m);
    if asym > HERMITIAN_TOL * max_abs(m) {
        return Err(Error::NotHermitian(asym));
    }
    Ok(())
}

/// Sorts eigen/singular pairs non-increasingly, permuting the basis columns alongside.
fn sort_with_columns(values: Vec<f64>, basis: &ComplexMatrix) -> (Vec<f64>, ComplexMatrix) {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[j].total_cmp(&values[i]));
    let sorted = order.iter().map(|&i| values[i]).collect();
    let cols = ComplexMatrix::from_fn(basis.nrows(), order.len(), |r, k| basis[(r, order[k])]);
    (sorted, cols)
}

/// Eigendecomposition of a Hermitian matrix without clamping.
fn raw_eig(m: &ComplexMatrix) -> (Vec<f64>, ComplexMatrix) {
    let eig = SymmetricEigen::new(hermitize(m));
    let values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    sort_with_columns(values, &eig.eigenvectors)
}

/// Relative residual `‖MU − UΛ‖_F / ‖M‖_F` (absolute when `M = 0`).
fn eig_residual(m: &ComplexMatrix, values: &[f64], basis: &ComplexMatrix) -> f64 {
    let lambda = diag(values);
    let res = frobenius_norm(&(m * basis - basis * lambda));
    let scale = frobenius_norm(m);
    if scale > 0.0 {
        res / scale
    } else {
        res
    }
}

/// Hermitian eigendecomposition `M = U Λ U†`, eigenvalues non-increasing.
///
/// Columns of the returned basis are the eigenvectors, in the same order as
/// the spectrum.
pub fn hermitian_eig(m: &ComplexMatrix) -> Result<(Spectrum, ComplexMatrix)> {
    check_square(m)?;
    check_finite(m)?;
    check_hermitian(m)?;
    let (values, basis) = raw_eig(m);
    let residual = eig_residual(m, &values, &basis);
    if residual > EIG_RESIDUAL_TOL {
        return Err(Error::EigenResidual(residual));
    }
    Ok((Spectrum { values }, basis))
}

/// Thin SVD `M = U Σ V†`; singular values non-increasing, `U` and `V` isometries.
pub fn svd(m: &ComplexMatrix) -> Result<(ComplexMatrix, Spectrum, ComplexMatrix)> {
    check_finite(m)?;
    let (r, cdim) = m.shape();
    let k = r.min(cdim);
    if k == 0 {
        return Ok((
            ComplexMatrix::zeros(r, 0),
            Spectrum::new(Vec::new()),
            ComplexMatrix::zeros(cdim, 0),
        ));
    }
    let dec = SVD::new(m.clone(), true, true);
    let u = dec.u.expect("u requested");
    let v = dec.v_t.expect("v_t requested").adjoint();
    let values: Vec<f64> = dec.singular_values.iter().map(|s| s.max(0.0)).collect();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&i, &j| values[j].total_cmp(&values[i]));
    let sorted: Vec<f64> = order.iter().map(|&i| values[i]).collect();
    let u = ComplexMatrix::from_fn(r, k, |row, col| u[(row, order[col])]);
    let v = ComplexMatrix::from_fn(cdim, k, |row, col| v[(row, order[col])]);
    Ok((u, Spectrum { values: sorted }, v))
}

pub fn singular_values(m: &ComplexMatrix) -> Result<Spectrum> {
    svd(m).map(|(_, s, _)| s)
}

/// `U diag(values) U†`.
pub fn reconstruct(values: &[f64], basis: &ComplexMatrix) -> ComplexMatrix {
    basis * diag(values) * basis.adjoint()
}

/// Sum of singular values.
pub fn trace_norm(m: &ComplexMatrix) -> Result<f64> {
    check_square(m)?;
    Ok(kahan_sum(singular_values(m)?.iter()))
}

/// Largest singular value.
pub fn operator_norm(m: &ComplexMatrix) -> f64 {
    singular_values(m).map(|s| s.max()).unwrap_or(f64::NAN)
}

/// Determinant by LU factorisation with partial pivoting.
pub fn determinant(m: &ComplexMatrix) -> Result<Complex64> {
    check_square(m)?;
    check_finite(m)?;
    let n = m.nrows();
    let mut a = m.clone();
    let mut det = c(1.0, 0.0);
    for k in 0..n {
        let pivot = (k..n)
            .max_by(|&i, &j| a[(i, k)].norm().total_cmp(&a[(j, k)].norm()))
            .unwrap_or(k);
        if a[(pivot, k)].norm() == 0.0 {
            return Ok(c(0.0, 0.0));
        }
        if pivot != k {
            a.swap_rows(pivot, k);
            det = -det;
        }
        let p = a[(k, k)];
        det *= p;
        for i in (k + 1)..n {
            let factor = a[(i, k)] / p;
            if factor == c(0.0, 0.0) {
                continue;
            }
            for j in (k + 1)..n {
                let delta = factor * a[(k, j)];
                a[(i, j)] -= delta;
            }
        }
    }
    Ok(det)
}

/// Hermitian positive semi-definite operator with cached spectral data.
#[derive(Debug, Clone)]
pub struct TraceClassOperator {
    matrix: ComplexMatrix,
    spectrum: Spectrum,
    eigenbasis: ComplexMatrix,
    trace_norm: f64,
}

impl TraceClassOperator {
    /// Validates `m` as Hermitian PSD. The stored matrix is the Hermitian part of `m`.
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        check_square(&m)?;
        check_finite(&m)?;
        check_hermitian(&m)?;
        let m = hermitize(&m);
        let (values, basis) = raw_eig(&m);
        let residual = eig_residual(&m, &values, &basis);
        if residual > EIG_RESIDUAL_TOL {
            return Err(Error::EigenResidual(residual));
        }
        let min = values.last().copied().unwrap_or(0.0);
        if min < -EIG_CLAMP {
            return Err(Error::NotPSD(min));
        }
        let values: Vec<f64> = values.into_iter().map(|v| v.max(0.0)).collect();
        let trace_norm = kahan_sum(values.iter().copied());
        Ok(TraceClassOperator {
            matrix: m,
            spectrum: Spectrum { values },
            eigenbasis: basis,
            trace_norm,
        })
    }

    pub fn from_diagonal(values: &[f64]) -> Result<Self> {
        Self::new(diag(values))
    }

    pub fn zero(n: usize) -> Self {
        Self::new(ComplexMatrix::zeros(n, n)).expect("zero matrix is PSD")
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    pub fn eigenbasis(&self) -> &ComplexMatrix {
        &self.eigenbasis
    }

    pub fn trace_norm(&self) -> f64 {
        self.trace_norm
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn spectral_radius(&self) -> f64 {
        self.spectrum.max()
    }

    /// `c·Q` for `c ≥ 0`, reusing the eigenbasis.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor >= 0.0 && factor.is_finite()) {
            return Err(Error::WeightsInvalid(format!("scale factor {factor}")));
        }
        Ok(TraceClassOperator {
            matrix: self.matrix.scale(factor),
            spectrum: Spectrum {
                values: self.spectrum.values.iter().map(|v| v * factor).collect(),
            },
            eigenbasis: self.eigenbasis.clone(),
            trace_norm: self.trace_norm * factor,
        })
    }
}

/// Quantum state: Hermitian, PSD, unit trace.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    op: TraceClassOperator,
}

impl DensityMatrix {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        check_square(&m)?;
        check_finite(&m)?;
        check_hermitian(&m)?;
        let tr = trace(&m).re;
        let mut op = TraceClassOperator::new(m)?;
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::TraceNotOne(tr));
        }
        // rank-one states can overshoot 1 by an ulp
        for v in &mut op.spectrum.values {
            *v = v.min(1.0);
        }
        Ok(DensityMatrix { op })
    }

    pub fn from_diagonal(values: &[f64]) -> Result<Self> {
        Self::new(diag(values))
    }

    /// `|ψ⟩⟨ψ| / ⟨ψ|ψ⟩`.
    pub fn pure(psi: &[Complex64]) -> Result<Self> {
        let v = DVector::from_column_slice(psi);
        let norm2 = v.norm_squared();
        if norm2 == 0.0 || !norm2.is_finite() {
            return Err(Error::NormNotOne(norm2.sqrt()));
        }
        Self::new((&v * v.adjoint()).unscale(norm2))
    }

    /// `I/d`.
    pub fn maximally_mixed(d: usize) -> Self {
        Self::new(identity(d).unscale(d as f64)).expect("I/d is a state")
    }

    pub fn operator(&self) -> &TraceClassOperator {
        &self.op
    }

    pub fn into_operator(self) -> TraceClassOperator {
        self.op
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        self.op.matrix()
    }

    pub fn spectrum(&self) -> &Spectrum {
        self.op.spectrum()
    }

    pub fn eigenbasis(&self) -> &ComplexMatrix {
        self.op.eigenbasis()
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }
}

impl AsRef<TraceClassOperator> for DensityMatrix {
    fn as_ref(&self) -> &TraceClassOperator {
        &self.op
    }
}

/// Validates `m` as a quantum state.
pub fn make_density(m: ComplexMatrix) -> Result<DensityMatrix> {
    DensityMatrix::new(m)
}

/// Spectral functional calculus `U f(Λ) U†`.
pub fn matrix_function<F: Fn(f64) -> f64>(q: &TraceClassOperator, f: F) -> Result<ComplexMatrix> {
    let mut mapped = Vec::with_capacity(q.dim());
    for &x in q.spectrum().values() {
        let y = f(x);
        if !y.is_finite() {
            return Err(Error::FunctionDomain(x));
        }
        mapped.push(y);
    }
    Ok(reconstruct(&mapped, q.eigenbasis()))
}
