//! Seeded random ensembles used by the claim checkers and test suites.
//!
//! Every trial draws from its own ChaCha stream `(seed, stream)`, so a trial
//! can be replayed in isolation and trials may run in any order.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{c, diag, ComplexMatrix, DensityMatrix, TraceClassOperator};

pub type TrialRng = ChaCha8Rng;

/// Generator for `stream` under `seed`.
pub fn rng(seed: u64, stream: u64) -> TrialRng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

fn normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

/// Complex Ginibre matrix with i.i.d. standard normal real and imaginary parts.
pub fn ginibre<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| c(normal(rng), normal(rng)))
}

pub fn hermitian<R: Rng + ?Sized>(rng: &mut R, d: usize) -> ComplexMatrix {
    let g = ginibre(rng, d, d);
    (&g + g.adjoint()).scale(0.5)
}

/// Haar unitary via QR of a Ginibre matrix with the phases of `R` absorbed.
pub fn unitary<R: Rng + ?Sized>(rng: &mut R, d: usize) -> ComplexMatrix {
    let qr = ginibre(rng, d, d).qr();
    let q = qr.q();
    let r = qr.r();
    let phases = DVector::from_iterator(
        d,
        (0..d).map(|i| {
            let z = r[(i, i)];
            if z.norm() > 0.0 {
                z / z.norm()
            } else {
                c(1.0, 0.0)
            }
        }),
    );
    q * ComplexMatrix::from_diagonal(&phases)
}

/// Random PSD matrix `G G†` of rank `d`, scaled to trace `scale`.
pub fn psd<R: Rng + ?Sized>(rng: &mut R, d: usize, scale: f64) -> TraceClassOperator {
    let g = ginibre(rng, d, d);
    let m = &g * g.adjoint();
    let tr = crate::linalg::trace(&m).re;
    TraceClassOperator::new(m.scale(scale / tr)).expect("G G† is PSD")
}

/// Random state `G G† / Tr` with `G` of shape `d × rank`.
pub fn density_with_rank<R: Rng + ?Sized>(rng: &mut R, d: usize, rank: usize) -> DensityMatrix {
    let g = ginibre(rng, d, rank.max(1));
    let m = &g * g.adjoint();
    let tr = crate::linalg::trace(&m).re;
    DensityMatrix::new(m.unscale(tr)).expect("normalised G G† is a state")
}

/// Full-rank random state (Hilbert-Schmidt ensemble).
pub fn density<R: Rng + ?Sized>(rng: &mut R, d: usize) -> DensityMatrix {
    density_with_rank(rng, d, d)
}

/// Random state with a prescribed spectrum in a Haar-random eigenbasis.
pub fn density_with_spectrum<R: Rng + ?Sized>(rng: &mut R, values: &[f64]) -> DensityMatrix {
    let u = unitary(rng, values.len());
    let total: f64 = values.iter().sum();
    let m = &u * diag(values).unscale(total) * u.adjoint();
    DensityMatrix::new(m).expect("rotated probability vector is a state")
}

pub fn pure_vector<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Vec<Complex64> {
    let v: Vec<Complex64> = (0..d).map(|_| c(normal(rng), normal(rng))).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / norm).collect()
}

/// Probability vector drawn uniformly from the simplex.
pub fn probability_vector<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Vec<f64> {
    let e: Vec<f64> = (0..d).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    let total: f64 = e.iter().sum();
    e.into_iter().map(|x| x / total).collect()
}

/// Non-negative vector with i.i.d. uniform entries in `[0, 1)`.
pub fn uniform_vector<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Vec<f64> {
    (0..d).map(|_| rng.random::<f64>()).collect()
}
