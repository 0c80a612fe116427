//! Small dense symmetric linear algebra.
//!
//! Everything in this crate that is "an ellipsoid" is an [`SpdMatrix`]: the
//! shape matrices of the terms, the inner and outer bounding ellipsoids, and
//! the intermediate products that feed the operator geometric mean. The
//! matrices are tiny (N ≤ 16 in practice), so the eigendecomposition is a
//! plain cyclic Jacobi iteration, which is accurate to roundoff for symmetric
//! input and gives us full control over ordering and sign conventions.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Relative asymmetry accepted on construction before symmetrizing.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Eigenvalues must exceed `PD_EPS * λ_max` for a matrix to count as SPD.
pub const PD_EPS: f64 = 1e-10;

const JACOBI_TOL: f64 = 1e-14;
const JACOBI_MAX_SWEEPS: usize = 100;

/// Spectral factorization `M = V diag(λ) Vᵀ`.
///
/// Eigenvalues are ascending. Each eigenvector column is normalized so that
/// its largest-magnitude entry is positive (first such entry on ties).
#[derive(Debug, Clone, PartialEq)]
pub struct SymEigen {
    pub eigenvalues: DVector<f64>,
    pub eigenvectors: DMatrix<f64>,
}

impl SymEigen {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `V f(Λ) Vᵀ`, symmetrized.
    pub fn map<F: Fn(f64) -> f64>(&self, f: F) -> DMatrix<f64> {
        let v = &self.eigenvectors;
        let mut scaled = v.clone();
        for (j, mut col) in scaled.column_iter_mut().enumerate() {
            col *= f(self.eigenvalues[j]);
        }
        symmetrize(&(scaled * v.transpose()))
    }

    pub fn reconstruct(&self) -> DMatrix<f64> {
        self.map(|l| l)
    }
}

/// `(M + Mᵀ)/2`.
pub fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
}

fn relative_asymmetry(m: &DMatrix<f64>) -> f64 {
    let scale = max_abs(m);
    if scale == 0.0 {
        return 0.0;
    }
    let n = m.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in (i + 1)..n {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst / scale
}

fn check_square(m: &DMatrix<f64>) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    if m.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite);
    }
    Ok(())
}

/// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
pub fn sym_eigen(m: &DMatrix<f64>) -> Result<SymEigen> {
    check_square(m)?;
    let asym = relative_asymmetry(m);
    if asym > SYMMETRY_TOL {
        return Err(Error::NotSymmetric(asym));
    }
    Ok(jacobi(&symmetrize(m)))
}

fn jacobi(m: &DMatrix<f64>) -> SymEigen {
    let n = m.nrows();
    let mut a = m.clone();
    let mut v = DMatrix::<f64>::identity(n, n);
    let norm = a.norm();
    let target = JACOBI_TOL * norm;

    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut off = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    off += a[(i, j)] * a[(i, j)];
                }
            }
        }
        if off.sqrt() <= target {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // A ← Jᵀ A J with J the rotation in the (p, q) plane.
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].total_cmp(&a[(j, j)]));

    let eigenvalues = DVector::from_iterator(n, order.iter().map(|&i| a[(i, i)]));
    let mut eigenvectors = DMatrix::<f64>::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let mut col = v.column(src).into_owned();
        let mut pivot = 0;
        for k in 1..n {
            if col[k].abs() > col[pivot].abs() {
                pivot = k;
            }
        }
        if col[pivot] < 0.0 {
            col.neg_mut();
        }
        eigenvectors.set_column(dst, &col);
    }
    SymEigen {
        eigenvalues,
        eigenvectors,
    }
}

/// A symmetric positive-definite matrix together with its spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct SpdMatrix {
    matrix: DMatrix<f64>,
    eigen: SymEigen,
}

impl SpdMatrix {
    /// Validates symmetry (to [`SYMMETRY_TOL`]) and definiteness, then stores
    /// the symmetrized matrix.
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        check_square(&matrix)?;
        let asym = relative_asymmetry(&matrix);
        if asym > SYMMETRY_TOL {
            return Err(Error::NotSymmetric(asym));
        }
        Self::from_symmetrized(matrix)
    }

    /// Symmetrizes unconditionally before validating definiteness. Used for
    /// results of matrix arithmetic whose asymmetry is pure roundoff.
    pub fn from_symmetrized(matrix: DMatrix<f64>) -> Result<Self> {
        let m = Self::from_positive_symmetrized(matrix)?;
        let (min, max) = (m.min_eigenvalue(), m.max_eigenvalue());
        if min <= PD_EPS * max {
            return Err(Error::NotPositiveDefinite { min, max });
        }
        Ok(m)
    }

    /// Like [`SpdMatrix::from_symmetrized`] but accepts any strictly positive
    /// spectrum. For matrices derived from valid inputs (powers, congruences,
    /// sums), whose conditioning may legitimately exceed the input cutoff.
    pub fn from_positive_symmetrized(matrix: DMatrix<f64>) -> Result<Self> {
        check_square(&matrix)?;
        if matrix.nrows() == 0 {
            return Err(Error::InvalidArgument("empty matrix".into()));
        }
        let matrix = symmetrize(&matrix);
        let eigen = jacobi(&matrix);
        let n = eigen.dim();
        let min = eigen.eigenvalues[0];
        let max = eigen.eigenvalues[n - 1];
        if !(max > 0.0) || !(min > 0.0) || !max.is_finite() {
            return Err(Error::NotPositiveDefinite { min, max });
        }
        Ok(Self { matrix, eigen })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        for r in rows {
            if r.len() != n {
                return Err(Error::NotSquare {
                    rows: n,
                    cols: r.len(),
                });
            }
        }
        Self::new(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    pub fn from_row_slice(n: usize, entries: &[f64]) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::InvalidArgument(format!(
                "expected {} entries, got {}",
                n * n,
                entries.len()
            )));
        }
        Self::new(DMatrix::from_row_slice(n, n, entries))
    }

    pub fn from_diagonal(diag: &[f64]) -> Result<Self> {
        Self::new(DMatrix::from_diagonal(&DVector::from_column_slice(diag)))
    }

    pub fn identity(n: usize) -> Self {
        Self::scaled_identity(n, 1.0)
    }

    /// `c·I`; panics unless `c > 0`.
    pub fn scaled_identity(n: usize, c: f64) -> Self {
        assert!(c > 0.0 && n > 0, "scaled_identity needs n > 0 and c > 0");
        Self::from_symmetrized(DMatrix::identity(n, n) * c).expect("c·I is SPD")
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.matrix
    }

    pub fn eigen(&self) -> &SymEigen {
        &self.eigen
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigen.eigenvalues[0]
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigen.eigenvalues[self.dim() - 1]
    }

    pub fn condition_number(&self) -> f64 {
        self.max_eigenvalue() / self.min_eigenvalue()
    }

    pub fn det(&self) -> f64 {
        self.eigen.eigenvalues.iter().product()
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace()
    }

    fn spectral(&self, f: impl Fn(f64) -> f64) -> SpdMatrix {
        SpdMatrix::from_positive_symmetrized(self.eigen.map(f))
            .expect("positive spectral function of an SPD matrix is SPD")
    }

    /// Principal square root.
    pub fn sqrt(&self) -> SpdMatrix {
        self.spectral(f64::sqrt)
    }

    pub fn inverse(&self) -> SpdMatrix {
        self.spectral(|l| 1.0 / l)
    }

    pub fn inv_sqrt(&self) -> SpdMatrix {
        self.spectral(|l| 1.0 / l.sqrt())
    }

    /// `M^p` for real `p`.
    pub fn powf(&self, p: f64) -> SpdMatrix {
        self.spectral(|l| l.powf(p))
    }

    pub fn square(&self) -> SpdMatrix {
        self.spectral(|l| l * l)
    }

    /// `c·M`; `c` must be positive.
    pub fn scale(&self, c: f64) -> Result<SpdMatrix> {
        if !(c > 0.0) {
            return Err(Error::InvalidArgument(format!("scale factor {c} must be positive")));
        }
        Ok(SpdMatrix {
            matrix: &self.matrix * c,
            eigen: SymEigen {
                eigenvalues: &self.eigen.eigenvalues * c,
                eigenvectors: self.eigen.eigenvectors.clone(),
            },
        })
    }

    pub fn mul_vec(&self, v: &DVector<f64>) -> DVector<f64> {
        &self.matrix * v
    }

    /// Congruence `X M Xᵀ` for a nonsingular `X`.
    pub fn congruence(&self, x: &DMatrix<f64>) -> Result<SpdMatrix> {
        if x.ncols() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: x.ncols(),
            });
        }
        SpdMatrix::from_positive_symmetrized(x * &self.matrix * x.transpose())
    }

    /// Sum of two SPD matrices of equal dimension.
    pub fn add(&self, other: &SpdMatrix) -> Result<SpdMatrix> {
        same_dim(self, other)?;
        SpdMatrix::from_positive_symmetrized(&self.matrix + &other.matrix)
    }
}

fn same_dim(p: &SpdMatrix, q: &SpdMatrix) -> Result<()> {
    if p.dim() != q.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            found: q.dim(),
        });
    }
    Ok(())
}

/// Principal square root of an SPD matrix.
pub fn spd_sqrt(m: &SpdMatrix) -> SpdMatrix {
    m.sqrt()
}

/// Operator geometric mean `P # Q = P^{1/2} (P^{-1/2} Q P^{-1/2})^{1/2} P^{1/2}`.
///
/// ```
/// use ellipsum::spd::{geometric_mean, SpdMatrix};
///
/// let p = SpdMatrix::from_diagonal(&[4.0, 1.0]).unwrap();
/// let q = SpdMatrix::from_diagonal(&[1.0, 4.0]).unwrap();
/// let g = geometric_mean(&p, &q).unwrap();
/// assert!((g.matrix()[(0, 0)] - 2.0).abs() < 1e-12);
/// assert!((g.matrix()[(1, 1)] - 2.0).abs() < 1e-12);
/// ```
pub fn geometric_mean(p: &SpdMatrix, q: &SpdMatrix) -> Result<SpdMatrix> {
    same_dim(p, q)?;
    let p_half = p.sqrt();
    let p_inv_half = p.inv_sqrt();
    let inner = q.congruence(p_inv_half.matrix())?;
    inner.sqrt().congruence(p_half.matrix())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample::{random_spd, random_symmetric};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rel_err(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
        (a - b).norm() / b.norm().max(f64::MIN_POSITIVE)
    }

    #[test]
    fn eigen_of_diagonal_is_sorted_permutation() {
        let e = sym_eigen(&DMatrix::from_row_slice(2, 2, &[3.0, 0.0, 0.0, 1.0])).unwrap();
        assert_eq!(e.eigenvalues.as_slice(), &[1.0, 3.0]);
        assert_eq!(
            e.eigenvectors,
            DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0])
        );
    }

    #[test]
    fn eigen_of_identity() {
        let e = sym_eigen(&DMatrix::identity(4, 4)).unwrap();
        assert_eq!(e.eigenvalues.as_slice(), &[1.0; 4]);
    }

    #[test]
    fn eigen_reconstructs_random_symmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let m = random_symmetric(&mut rng, 5);
            let e = sym_eigen(&m).unwrap();
            assert!(rel_err(&e.reconstruct(), &m) < 1e-10);
            let vtv = e.eigenvectors.transpose() * &e.eigenvectors;
            assert!((vtv - DMatrix::identity(5, 5)).amax() < 1e-12);
            for w in e.eigenvalues.as_slice().windows(2) {
                assert!(w[0] <= w[1]);
            }
            for col in e.eigenvectors.column_iter() {
                let pivot = col.iamax();
                assert!(col[pivot] > 0.0);
            }
        }
    }

    #[test]
    fn eigen_rejects_asymmetric() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.4, 1.0]);
        assert!(matches!(sym_eigen(&m), Err(Error::NotSymmetric(_))));
    }

    #[test]
    fn construction_rejects_indefinite_and_tiny() {
        assert!(matches!(
            SpdMatrix::from_diagonal(&[1.0, -1.0]),
            Err(Error::NotPositiveDefinite { .. })
        ));
        assert!(SpdMatrix::from_diagonal(&[1.0, 1e-11]).is_err());
        assert!(SpdMatrix::from_diagonal(&[1.0, 1e-9]).is_ok());
        assert!(matches!(
            SpdMatrix::from_diagonal(&[1.0, f64::NAN]),
            Err(Error::NonFinite)
        ));
    }

    #[test]
    fn sqrt_examples() {
        let m = SpdMatrix::from_diagonal(&[4.0, 9.0]).unwrap();
        let r = spd_sqrt(&m);
        assert!((r.matrix() - DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 3.0])).amax() < 1e-14);
        assert_eq!(spd_sqrt(&SpdMatrix::identity(3)).matrix(), &DMatrix::identity(3, 3));

        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let m = random_spd(&mut rng, 3, 0.2, 5.0);
            let r = spd_sqrt(&m);
            assert!(rel_err(&(r.matrix() * r.matrix()), m.matrix()) < 1e-10);
            let scaled = spd_sqrt(&m.scale(2.5).unwrap());
            assert!(rel_err(scaled.matrix(), &(r.matrix() * 2.5_f64.sqrt())) < 1e-12);
        }
    }

    #[test]
    fn geometric_mean_properties() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let p = random_spd(&mut rng, 3, 0.3, 4.0);
            let q = random_spd(&mut rng, 3, 0.3, 4.0);
            let g = geometric_mean(&p, &q).unwrap();
            // Riccati identity G P⁻¹ G = Q.
            let riccati = g.matrix() * p.inverse().matrix() * g.matrix();
            assert!(rel_err(&riccati, q.matrix()) < 1e-9);
            let h = geometric_mean(&q, &p).unwrap();
            assert!(rel_err(h.matrix(), g.matrix()) < 1e-10);
            assert!(rel_err(geometric_mean(&p, &p).unwrap().matrix(), p.matrix()) < 1e-12);
        }
    }

    #[test]
    fn geometric_mean_commuting_is_product_of_roots() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let p = random_spd(&mut rng, 3, 0.5, 3.0);
        // q = p² + p commutes with p.
        let q = SpdMatrix::from_symmetrized(p.matrix() * p.matrix() + p.matrix()).unwrap();
        let g = geometric_mean(&p, &q).unwrap();
        let expected = p.sqrt().matrix() * q.sqrt().matrix();
        assert!(rel_err(g.matrix(), &expected) < 1e-10);
    }

    #[test]
    fn geometric_mean_dimension_mismatch() {
        let err = geometric_mean(&SpdMatrix::identity(2), &SpdMatrix::identity(3)).unwrap_err();
        assert_eq!(err, Error::DimensionMismatch { expected: 2, found: 3 });
    }
}
