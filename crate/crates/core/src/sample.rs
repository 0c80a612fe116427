//! Random scene generators for tests, benchmarks and the CLI's demo scenes.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::geometry::{Ellipsoid, EllipsoidSum};
use crate::spd::{symmetrize, SpdMatrix};

/// Uniformly distributed unit vector in `R^n`.
pub fn random_unit<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DVector<f64> {
    loop {
        let v = DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal));
        let norm = v.norm();
        if norm > 1e-8 {
            return v / norm;
        }
    }
}

/// Haar-distributed rotation (orthogonal, determinant +1).
pub fn random_rotation<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DMatrix<f64> {
    let g = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            let mut col = q.column_mut(j);
            col.neg_mut();
        }
    }
    if q.determinant() < 0.0 {
        let mut col = q.column_mut(0);
        col.neg_mut();
    }
    q
}

/// Symmetric matrix with entries uniform in `[-1, 1]`.
pub fn random_symmetric<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DMatrix<f64> {
    let m = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..=1.0));
    symmetrize(&m)
}

/// SPD matrix with eigenvalues uniform in `[lo, hi]` and random eigenbasis.
pub fn random_spd<R: Rng + ?Sized>(rng: &mut R, n: usize, lo: f64, hi: f64) -> SpdMatrix {
    let q = random_rotation(rng, n);
    let d = DVector::from_fn(n, |_, _| rng.gen_range(lo..=hi));
    SpdMatrix::from_symmetrized(&q * DMatrix::from_diagonal(&d) * q.transpose())
        .expect("eigenvalues are positive")
}

/// `m` random ellipsoids in `R^n` with semi-axes in `[lo, hi]`.
pub fn random_scene<R: Rng + ?Sized>(rng: &mut R, n: usize, m: usize, lo: f64, hi: f64) -> EllipsoidSum {
    let terms = (0..m)
        .map(|_| Ellipsoid::new(random_spd(rng, n, lo, hi)))
        .collect();
    EllipsoidSum::new(terms).expect("non-empty scene of uniform dimension")
}
