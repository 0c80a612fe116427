//! Quadrature on `S^{N−1}` and integrals over the Minkowski-sum boundary.
//!
//! Because the boundary is parameterized by its own normal, any boundary
//! integral pulls back to the sphere with area element `det C̃(n)`:
//!
//! ```text
//! ∫_{∂Σ} f dA = ∫_{S^{N−1}} f(x(n), n) det C̃(n) dσ(n)
//! ```
//!
//! The integrand is smooth for every scene, so fixed product rules converge
//! spectrally: uniform angles for `N = 2` (the trapezoid rule on a periodic
//! integrand), Gauss–Legendre in `cos θ` times uniform azimuth for `N = 3`.
//! Higher dimensions nest the construction, with Gauss–Legendre in the polar
//! angle and a `sin^{N−2}θ` Jacobian; those rules converge but carry no
//! accuracy guarantee beyond the mass and moment checks in the tests.
//!
//! Node evaluations run in parallel; sums are always reduced sequentially in
//! node order, so results are bitwise independent of the thread count.

use std::f64::consts::PI;

use nalgebra::DVector;
use rayon::prelude::*;

use crate::curvature::LocalGeometry;
use crate::error::{Error, Result};
use crate::geometry::{unit_sphere_area, EllipsoidSum};
use crate::spd::SpdMatrix;

/// Nodes and positive weights approximating the surface measure of
/// `S^{N−1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereQuadrature {
    dim: usize,
    nodes: Vec<DVector<f64>>,
    weights: Vec<f64>,
    covering_radius: Option<f64>,
}

impl SphereQuadrature {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[DVector<f64>] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Upper bound on the geodesic distance from any point of the sphere to
    /// its nearest node, when known.
    pub fn covering_radius(&self) -> Option<f64> {
        self.covering_radius
    }

    /// The same rule pulled back through `u ↦ Su/‖Su‖`: nodes `Su_k/‖Su_k‖`,
    /// weights `w_k det S / ‖Su_k‖^N`. The map is a diffeomorphism of the
    /// sphere, so the rule still integrates against `dσ`, but it clusters
    /// nodes where `S` compresses directions. With `S = B⁻¹` the Gauss-map
    /// density of the ellipsoid `E_B` becomes that of a sphere.
    pub fn warped(&self, s: &SpdMatrix) -> Result<SphereQuadrature> {
        if s.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: s.dim(),
            });
        }
        let det = s.det();
        let (nodes, weights) = self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(u, w)| {
                let v = s.mul_vec(u);
                let len = v.norm();
                (v / len, w * det / len.powi(self.dim as i32))
            })
            .unzip();
        Ok(SphereQuadrature {
            dim: self.dim,
            nodes,
            weights,
            covering_radius: None,
        })
    }

    /// [`SphereQuadrature::warped`] by `(ΣA_i)⁻¹`, which spreads nodes evenly
    /// over the boundary of the scene instead of over the sphere.
    pub fn adapted_to(&self, scene: &EllipsoidSum) -> Result<SphereQuadrature> {
        let n = scene.dim();
        let total = scene
            .shapes()
            .fold(nalgebra::DMatrix::zeros(n, n), |acc, a| acc + a.matrix());
        self.warped(&SpdMatrix::from_positive_symmetrized(total)?.inverse())
    }

    /// `Σ w_k f(n_k)`, reduced in node order.
    pub fn integrate<F>(&self, f: F) -> f64
    where
        F: Fn(&DVector<f64>) -> f64 + Sync,
    {
        let values: Vec<f64> = self.nodes.par_iter().map(|n| f(n)).collect();
        values.iter().zip(&self.weights).map(|(v, w)| v * w).sum()
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`, nodes ascending.
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; order];
    let mut w = vec![0.0; order];
    let m = order.div_ceil(2);
    for i in 0..m {
        // Tricomi initial guess, then Newton on P_order.
        let mut z = (PI * (i as f64 + 0.75) / (order as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(order, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(order, z);
        dp = if d != 0.0 { d } else { dp };
        let weight = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[order - 1 - i] = z;
        w[i] = weight;
        w[order - 1 - i] = weight;
    }
    if order % 2 == 1 {
        x[order / 2] = 0.0;
    }
    (x, w)
}

/// `(P_n(z), P_n'(z))` by the three-term recurrence.
fn legendre(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, dp)
}

/// Product quadrature on `S^{N−1}` with `resolution` points per angle.
///
/// `N = 2` gives `resolution` equally spaced angles starting at 0; `N = 3`
/// gives `resolution²` nodes. Larger `N` nest the rule recursively.
///
/// ```
/// use ellipsum::quadrature::build_quadrature;
///
/// let q = build_quadrature(3, 32).unwrap();
/// let total: f64 = q.weights().iter().sum();
/// assert!((total - 4.0 * std::f64::consts::PI).abs() < 1e-12);
/// ```
pub fn build_quadrature(dim: usize, resolution: usize) -> Result<SphereQuadrature> {
    if dim < 2 {
        return Err(Error::UnsupportedDimension(dim));
    }
    if resolution < 4 {
        return Err(Error::InvalidArgument(format!(
            "quadrature resolution {resolution} is below the minimum of 4"
        )));
    }
    if dim > 3 {
        log::debug!("sphere quadrature in dimension {dim} has no accuracy guarantee");
    }
    let (nodes, weights) = product_rule(dim, resolution);
    Ok(SphereQuadrature {
        dim,
        nodes,
        weights,
        covering_radius: product_covering_radius(dim, resolution),
    })
}

/// Covering radius of [`product_rule`] for `dim ≤ 3`. In space a point at
/// polar angle `θ` is within `|θ − θ_k|` of the ring `θ_k`, and within
/// `π/resolution` of a node along that ring.
fn product_covering_radius(dim: usize, resolution: usize) -> Option<f64> {
    let azimuth = PI / resolution as f64;
    match dim {
        2 => Some(azimuth),
        3 => {
            let (xs, _) = gauss_legendre(resolution);
            let mut thetas: Vec<f64> = xs.iter().map(|t| t.acos()).collect();
            thetas.sort_by(f64::total_cmp);
            let ends = thetas[0].max(PI - thetas[thetas.len() - 1]);
            let gap = thetas
                .windows(2)
                .map(|w| 0.5 * (w[1] - w[0]))
                .fold(ends, f64::max);
            Some(gap + azimuth)
        }
        _ => None,
    }
}

fn product_rule(dim: usize, resolution: usize) -> (Vec<DVector<f64>>, Vec<f64>) {
    if dim == 2 {
        let w = 2.0 * PI / resolution as f64;
        let nodes = (0..resolution)
            .map(|k| {
                let t = 2.0 * PI * k as f64 / resolution as f64;
                DVector::from_vec(vec![t.cos(), t.sin()])
            })
            .collect();
        return (nodes, vec![w; resolution]);
    }
    // n = (sin θ·m, cos θ) with m ∈ S^{dim−2}: dσ = sin^{dim−2}θ dθ dσ'.
    // For dim = 3 the θ-weight is sin θ dθ = dt, so Gauss–Legendre in t = cos θ
    // is exact for polynomials; for larger dim Gauss–Legendre in θ avoids the
    // endpoint singularities of (1−t²)^{(dim−3)/2}.
    let (xs, xw) = gauss_legendre(resolution);
    let (sub_nodes, sub_weights) = product_rule(dim - 1, resolution);
    let mut nodes = Vec::with_capacity(xs.len() * sub_nodes.len());
    let mut weights = Vec::with_capacity(nodes.capacity());
    for (x, wx) in xs.iter().zip(&xw) {
        let (t, r, w) = if dim == 3 {
            (*x, (1.0 - x * x).sqrt(), *wx)
        } else {
            let theta = 0.5 * PI * (x + 1.0);
            (theta.cos(), theta.sin(), 0.5 * PI * wx * theta.sin().powi(dim as i32 - 2))
        };
        for (m, wm) in sub_nodes.iter().zip(&sub_weights) {
            let mut n = DVector::zeros(dim);
            for i in 0..dim - 1 {
                n[i] = r * m[i];
            }
            n[dim - 1] = t;
            nodes.push(n);
            weights.push(w * wm);
        }
    }
    (nodes, weights)
}

/// Default resolution per dimension used by the CLI and convenience APIs.
pub fn default_resolution(dim: usize) -> usize {
    match dim {
        2 => 256,
        3 => 64,
        _ => 24,
    }
}

fn check(scene: &EllipsoidSum, quad: &SphereQuadrature) -> Result<()> {
    if scene.dim() != quad.dim() {
        return Err(Error::DimensionMismatch {
            expected: scene.dim(),
            found: quad.dim(),
        });
    }
    Ok(())
}

/// `Σ_k w_k f(x(n_k), n_k) det C̃(n_k)`, the boundary integral of `f`.
pub fn surface_integral<F>(scene: &EllipsoidSum, f: F, quad: &SphereQuadrature) -> Result<f64>
where
    F: Fn(&DVector<f64>, &DVector<f64>) -> f64 + Sync,
{
    integrate_local(scene, quad, |g| f(&g.point, &g.normal) * g.area_element())
}

/// Integrate an arbitrary function of the local boundary geometry against
/// the sphere measure (no area element applied).
pub fn integrate_local<F>(scene: &EllipsoidSum, quad: &SphereQuadrature, f: F) -> Result<f64>
where
    F: Fn(&LocalGeometry) -> f64 + Sync,
{
    check(scene, quad)?;
    let values = quad
        .nodes
        .par_iter()
        .map(|n| LocalGeometry::at(scene, n).map(|g| f(&g)))
        .collect::<Result<Vec<f64>>>()?;
    Ok(values.iter().zip(&quad.weights).map(|(v, w)| v * w).sum())
}

/// Boundary measure (perimeter for `N = 2`, surface area for `N = 3`).
pub fn surface_area(scene: &EllipsoidSum, quad: &SphereQuadrature) -> Result<f64> {
    surface_integral(scene, |_, _| 1.0, quad)
}

/// Integral of mean curvature over the boundary of a 3D sum,
/// `½ ∫ tr C(n) dσ`. Linear in the terms of the scene.
pub fn mean_curvature_integral(scene: &EllipsoidSum, quad: &SphereQuadrature) -> Result<f64> {
    if scene.dim() != 3 {
        return Err(Error::UnsupportedDimension(scene.dim()));
    }
    Ok(0.5 * integrate_local(scene, quad, |g| g.curvature.full.trace())?)
}

/// Integral of Gauss–Kronecker curvature `Πκ_i` over the boundary; `2π` in
/// the plane and `4π` in space for every scene.
pub fn gaussian_curvature_integral(scene: &EllipsoidSum, quad: &SphereQuadrature) -> Result<f64> {
    if !(2..=3).contains(&scene.dim()) {
        return Err(Error::UnsupportedDimension(scene.dim()));
    }
    integrate_local(scene, quad, |g| {
        let gauss: f64 = g.principal_curvatures().iter().product();
        gauss * g.area_element()
    })
}

/// Enclosed volume by the divergence theorem, `(1/N) ∫ x·n dA`.
pub fn volume_divergence(scene: &EllipsoidSum, quad: &SphereQuadrature) -> Result<f64> {
    let n = scene.dim() as f64;
    Ok(integrate_local(scene, quad, |g| g.support * g.area_element())? / n)
}

/// Total weight of a rule, which should be the area of `S^{N−1}`.
pub fn weight_defect(quad: &SphereQuadrature) -> f64 {
    let total: f64 = quad.weights.iter().sum();
    (total - unit_sphere_area(quad.dim)).abs() / unit_sphere_area(quad.dim)
}
