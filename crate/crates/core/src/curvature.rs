//! Curvature of the Minkowski-sum boundary.
//!
//! Differentiating `x(n) = Σ A_i²n/‖A_i n‖` along the sphere gives
//! `dx = C(n) dn` with
//!
//! ```text
//! C(n) = Σ_i [ A_i²/‖A_i n‖ − A_i²nnᵀA_i²/‖A_i n‖³ ]
//! ```
//!
//! `C(n)` is symmetric, annihilates `n` and is positive definite on the
//! tangent hyperplane, so it is the inverse of the shape operator there. The
//! principal radii of curvature are its `N − 1` nonzero eigenvalues.
//!
//! All production paths work directly with `n`; spherical angle charts appear
//! only in [`fundamental_forms`], which reproduces the classical `G⁻¹L`
//! construction for cross-checking.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::geometry::{Ellipsoid, EllipsoidSum};
use crate::spd::{sym_eigen, symmetrize, SpdMatrix};

/// `C(n)` for the whole scene, with the normal it was evaluated at.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureMatrix {
    pub full: DMatrix<f64>,
    pub normal: DVector<f64>,
}

/// Orthonormal basis of the tangent hyperplane `n^⊥`, as the columns of an
/// `N × (N−1)` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentBasis {
    pub columns: DMatrix<f64>,
    pub normal: DVector<f64>,
}

fn unit(n: &DVector<f64>) -> Result<DVector<f64>> {
    let len = n.norm();
    if !(len > 0.0) || !len.is_finite() {
        return Err(Error::ZeroDirection);
    }
    Ok(n / len)
}

fn term_from_parts(a_sq: &DMatrix<f64>, a: &DMatrix<f64>, n: &DVector<f64>) -> DMatrix<f64> {
    let len = (a * n).norm();
    let b = a_sq * n;
    symmetrize(&(a_sq / len - &b * b.transpose() / (len * len * len)))
}

/// `C(A, n) = A²/‖An‖ − A²nnᵀA²/‖An‖³`.
///
/// `n` is used as given; with a non-unit `n` the result scales as `1/‖n‖`,
/// which is the convention under which `C((SA²Sᵀ)^{1/2}, n) = S C(A, Sᵀn) Sᵀ`.
pub fn curvature_term(a: &SpdMatrix, n: &DVector<f64>) -> DMatrix<f64> {
    let a_sq = a.matrix() * a.matrix();
    term_from_parts(&a_sq, a.matrix(), n)
}

fn ellipsoid_term(e: &Ellipsoid, n: &DVector<f64>) -> DMatrix<f64> {
    term_from_parts(e.shape_squared(), e.shape().matrix(), n)
}

/// `C(n) = Σ_i C(A_i, n)` at the unit vector `n/‖n‖`.
pub fn curvature_matrix(scene: &EllipsoidSum, n: &DVector<f64>) -> Result<CurvatureMatrix> {
    check_dim(scene, n)?;
    let n = unit(n)?;
    let k = scene.dim();
    let full = scene
        .terms()
        .iter()
        .fold(DMatrix::zeros(k, k), |acc, t| acc + ellipsoid_term(t, &n));
    Ok(CurvatureMatrix { full, normal: n })
}

fn check_dim(scene: &EllipsoidSum, n: &DVector<f64>) -> Result<()> {
    if n.len() != scene.dim() {
        return Err(Error::DimensionMismatch {
            expected: scene.dim(),
            found: n.len(),
        });
    }
    Ok(())
}

/// Columns `1..N−1` of the Householder reflector that maps `e_N` to `n`.
///
/// For `n = e_N` the reflector is the identity and the basis is the first
/// `N − 1` standard basis vectors.
pub fn tangent_basis(n: &DVector<f64>) -> Result<TangentBasis> {
    let n = unit(n)?;
    let k = n.len();
    if k < 2 {
        return Err(Error::UnsupportedDimension(k));
    }
    let mut v = -n.clone();
    v[k - 1] += 1.0;
    let vv = v.norm_squared();
    let mut h = DMatrix::<f64>::identity(k, k);
    if vv > 0.0 {
        h -= &v * v.transpose() * (2.0 / vv);
    }
    Ok(TangentBasis {
        columns: h.columns(0, k - 1).into_owned(),
        normal: n,
    })
}

/// `C̃ = MᵀCM`, the matrix of `C` on the tangent hyperplane.
pub fn reduced_curvature(c: &CurvatureMatrix, m: &TangentBasis) -> Result<DMatrix<f64>> {
    if (&c.normal - &m.normal).norm() > 1e-12 {
        return Err(Error::InvalidArgument(
            "curvature matrix and tangent basis were built at different normals".into(),
        ));
    }
    Ok(symmetrize(&(m.columns.transpose() * &c.full * &m.columns)))
}

/// Everything the surface integrals need at one normal direction.
#[derive(Debug, Clone)]
pub struct LocalGeometry {
    pub normal: DVector<f64>,
    pub point: DVector<f64>,
    pub support: f64,
    pub curvature: CurvatureMatrix,
    pub reduced: DMatrix<f64>,
}

impl LocalGeometry {
    pub fn at(scene: &EllipsoidSum, n: &DVector<f64>) -> Result<Self> {
        let curvature = curvature_matrix(scene, n)?;
        let normal = curvature.normal.clone();
        let basis = tangent_basis(&normal)?;
        let reduced = reduced_curvature(&curvature, &basis)?;
        let point = scene.boundary_point(&normal)?;
        let support = scene.support(&normal);
        Ok(Self {
            normal,
            point,
            support,
            curvature,
            reduced,
        })
    }

    /// `det C̃`, the area element of the boundary relative to the sphere.
    pub fn area_element(&self) -> f64 {
        match self.reduced.nrows() {
            1 => self.reduced[(0, 0)],
            2 => {
                let r = &self.reduced;
                r[(0, 0)] * r[(1, 1)] - r[(0, 1)] * r[(1, 0)]
            }
            _ => self.reduced.clone().lu().determinant(),
        }
    }

    /// Principal curvatures, ascending.
    pub fn principal_curvatures(&self) -> Vec<f64> {
        let eig = sym_eigen(&self.reduced).expect("reduced curvature is symmetric");
        // Radii ascend, so curvatures descend; report ascending.
        eig.eigenvalues.iter().rev().map(|r| 1.0 / r).collect()
    }
}

/// Principal curvatures `κ_i = 1/λ_i(C̃(n))` in ascending order.
///
/// ```
/// use ellipsum::curvature::principal_curvatures;
/// use ellipsum::geometry::{Ellipsoid, EllipsoidSum};
/// use ellipsum::spd::SpdMatrix;
/// use nalgebra::DVector;
///
/// // Ellipse with semi-axes 3 and 2: curvature a/b² at the end of the major axis.
/// let scene = EllipsoidSum::single(Ellipsoid::new(SpdMatrix::from_diagonal(&[3.0, 2.0]).unwrap()));
/// let k = principal_curvatures(&scene, &DVector::from_vec(vec![1.0, 0.0])).unwrap();
/// assert!((k[0] - 3.0 / 4.0).abs() < 1e-14);
/// ```
pub fn principal_curvatures(scene: &EllipsoidSum, n: &DVector<f64>) -> Result<Vec<f64>> {
    Ok(LocalGeometry::at(scene, n)?.principal_curvatures())
}

/// Distance from a pole below which chart points are rejected.
pub const CHART_POLE_EPS: f64 = 1e-6;

/// Hyperspherical chart on `S^{N−1}`:
/// `n_1 = cos φ_1`, `n_k = sin φ_1 ⋯ sin φ_{k−1} cos φ_k`,
/// `n_N = sin φ_1 ⋯ sin φ_{N−1}`. Angles `φ_1..φ_{N−2}` are polar, `φ_{N−1}`
/// is the azimuth.
pub fn spherical_point(phi: &[f64]) -> DVector<f64> {
    let k = phi.len() + 1;
    let mut n = DVector::zeros(k);
    let mut prod = 1.0;
    for i in 0..k {
        if i < k - 1 {
            n[i] = prod * phi[i].cos();
            prod *= phi[i].sin();
        } else {
            n[i] = prod;
        }
    }
    n
}

/// Columns `∂n/∂φ_i` of the chart Jacobian.
pub fn spherical_jacobian(phi: &[f64]) -> DMatrix<f64> {
    let k = phi.len() + 1;
    let mut j = DMatrix::zeros(k, k - 1);
    for i in 0..k - 1 {
        for row in i..k {
            // n_row = Π_{l<row} sin φ_l · (cos φ_row, or 1 for the last row).
            let mut val = 1.0;
            for l in 0..row.min(k - 1) {
                val *= if l == i { phi[l].cos() } else { phi[l].sin() };
            }
            if row < k - 1 {
                val *= if row == i { -phi[row].sin() } else { phi[row].cos() };
            }
            j[(row, i)] = val;
        }
    }
    j
}

/// First and second fundamental forms in a hyperspherical chart.
#[derive(Debug, Clone, PartialEq)]
pub struct FundamentalForms {
    pub metric: DMatrix<f64>,
    pub second: DMatrix<f64>,
}

impl FundamentalForms {
    /// Eigenvalues of `G⁻¹L`, ascending.
    pub fn shape_operator_eigenvalues(&self) -> Vec<f64> {
        // G⁻¹L is similar to G^{-1/2} L G^{-1/2}, which is symmetric.
        let g = SpdMatrix::from_positive_symmetrized(self.metric.clone()).expect("metric is SPD");
        let w = g.inv_sqrt();
        let s = symmetrize(&(w.matrix() * &self.second * w.matrix()));
        sym_eigen(&s)
            .expect("symmetric")
            .eigenvalues
            .iter()
            .copied()
            .collect()
    }
}

/// `G = J̃ᵀC̃²J̃` and `L = J̃ᵀC̃J̃` at chart point `phi`, where `J̃` is the
/// diagonal of chart tangent lengths and `C̃` is taken in the normalized chart
/// tangent basis.
pub fn fundamental_forms(scene: &EllipsoidSum, phi: &[f64]) -> Result<FundamentalForms> {
    let k = scene.dim();
    if phi.len() + 1 != k {
        return Err(Error::DimensionMismatch {
            expected: k - 1,
            found: phi.len(),
        });
    }
    for &polar in phi.iter().take(k.saturating_sub(2)) {
        let dist = polar.rem_euclid(2.0 * std::f64::consts::PI);
        let dist = dist.min((dist - std::f64::consts::PI).abs()).min(2.0 * std::f64::consts::PI - dist);
        if dist < CHART_POLE_EPS {
            return Err(Error::ChartPole(CHART_POLE_EPS));
        }
    }
    let n = spherical_point(phi);
    let jac = spherical_jacobian(phi);
    let lengths: Vec<f64> = jac.column_iter().map(|c| c.norm()).collect();
    let mut m = jac.clone();
    for (i, mut col) in m.column_iter_mut().enumerate() {
        col /= lengths[i];
    }
    let c = curvature_matrix(scene, &n)?;
    let reduced = symmetrize(&(m.transpose() * &c.full * &m));
    let jt = DMatrix::from_diagonal(&DVector::from_vec(lengths));
    let metric = symmetrize(&(&jt * &reduced * &reduced * &jt));
    let second = symmetrize(&(&jt * &reduced * &jt));
    Ok(FundamentalForms { metric, second })
}
