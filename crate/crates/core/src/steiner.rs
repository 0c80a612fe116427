//! Exact sum volumes from Steiner's formula.
//!
//! Mapping by `A⁻¹` turns `K + E_A` into `A⁻¹K + B`, an offset of `A⁻¹K` by
//! the unit ball, whose volume is a polynomial in the quermassintegrals of
//! `A⁻¹K`. In the plane and in space:
//!
//! ```text
//! Area(K + E_A) = Area(K) + det A · Per(A⁻¹K) + π det A
//! Vol(K + E_A)  = Vol(K)  + det A · [Area(∂A⁻¹K) + M(∂A⁻¹K)] + (4π/3) det A
//! ```
//!
//! Perimeter and the integrated mean curvature `M` are additive over
//! Minkowski sums, so planar sums of any length and spatial pairs are exact.
//! Spatial sums of three or more terms need the surface area of a partial
//! sum; that is bracketed by the areas of its inner and outer ellipsoids and
//! also evaluated exactly by quadrature.

use std::f64::consts::PI;

use serde::Serialize;

use crate::bounds::{john_inner_recursive, optimal_outer};
use crate::error::{Error, Result};
use crate::geometry::{Ellipsoid, EllipsoidSum};
use crate::quadrature::{mean_curvature_integral, surface_area, SphereQuadrature};
use crate::spd::SpdMatrix;

/// Complete elliptic integral of the second kind,
/// `E(k) = ∫₀^{π/2} √(1 − k² sin²θ) dθ`, by the arithmetic–geometric mean.
///
/// ```
/// use ellipsum::steiner::elliptic_e;
///
/// assert!((elliptic_e(0.0).unwrap() - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
/// assert_eq!(elliptic_e(1.0).unwrap(), 1.0);
/// ```
pub fn elliptic_e(k: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&k) {
        return Err(Error::InvalidArgument(format!("elliptic modulus {k} outside [0, 1]")));
    }
    if k == 1.0 {
        return Ok(1.0);
    }
    // E = K · (1 − Σ 2^{n−1} c_n²), K = π / (2 AGM(1, k')).
    let mut a = 1.0_f64;
    let mut b = (1.0 - k * k).sqrt();
    let mut c = k;
    let mut sum = 0.5 * c * c;
    let mut pow = 0.5;
    for _ in 0..64 {
        if c.abs() < 1e-17 * a {
            break;
        }
        let a_next = 0.5 * (a + b);
        let b_next = (a * b).sqrt();
        c = 0.5 * (a - b);
        a = a_next;
        b = b_next;
        pow *= 2.0;
        sum += pow * c * c;
    }
    Ok(PI / (2.0 * a) * (1.0 - sum))
}

/// Perimeter `4σ₁E(√(1 − σ₂²/σ₁²))` of an ellipse with semi-axes `σ₁ ≥ σ₂`.
pub fn ellipse_perimeter(s1: f64, s2: f64) -> f64 {
    let (hi, lo) = if s1 >= s2 { (s1, s2) } else { (s2, s1) };
    let k = (1.0 - (lo / hi).powi(2)).max(0.0).sqrt();
    4.0 * hi * elliptic_e(k.min(1.0)).expect("modulus in range")
}

fn require_dim(a: &SpdMatrix, n: usize) -> Result<()> {
    if a.dim() != n {
        return Err(Error::UnsupportedDimension(a.dim()));
    }
    Ok(())
}

/// Semi-axes of `A⁻¹E_B`, the singular values of `A⁻¹B`, descending.
fn relative_axes(a: &SpdMatrix, b: &SpdMatrix) -> Result<Vec<f64>> {
    let m = b.square().congruence(a.inverse().matrix())?;
    Ok(m.eigen().eigenvalues.iter().rev().map(|l| l.sqrt()).collect())
}

/// Exact area of `E_{A₁} + E_{A₂}` in the plane:
/// `π(det A₁ + det A₂) + det A₂ · Per(A₂⁻¹E_{A₁})`, where the perimeter is
/// `4σ₁E(√(1 − σ₂²/σ₁²))` with `σ₁ ≥ σ₂` the singular values of `A₂⁻¹A₁`.
///
/// ```
/// use ellipsum::spd::SpdMatrix;
/// use ellipsum::steiner::area_sum_2d_pair;
///
/// let i = SpdMatrix::identity(2);
/// let area = area_sum_2d_pair(&i, &i).unwrap();
/// assert!((area - 4.0 * std::f64::consts::PI).abs() < 1e-12);
/// ```
pub fn area_sum_2d_pair(a1: &SpdMatrix, a2: &SpdMatrix) -> Result<f64> {
    require_dim(a1, 2)?;
    require_dim(a2, 2)?;
    let s = relative_axes(a2, a1)?;
    Ok(PI * (a1.det() + a2.det()) + a2.det() * ellipse_perimeter(s[0], s[1]))
}

/// Exact area of a planar sum of any length by adding one term at a time:
/// `Area(Σ_{k+1}) = Area(Σ_k) + det A_{k+1} · Per(A_{k+1}⁻¹Σ_k) + π det A_{k+1}`,
/// the perimeter being the sum of the perimeters of the ellipses
/// `A_{k+1}⁻¹E_i`, `i ≤ k`.
pub fn area_sum_2d_recursive(scene: &EllipsoidSum) -> Result<f64> {
    if scene.dim() != 2 {
        return Err(Error::UnsupportedDimension(scene.dim()));
    }
    let shapes: Vec<&SpdMatrix> = scene.shapes().collect();
    let mut area = PI * shapes[0].det();
    for k in 1..shapes.len() {
        let next = shapes[k];
        let mut perimeter = 0.0;
        for prev in &shapes[..k] {
            let s = relative_axes(next, prev)?;
            perimeter += ellipse_perimeter(s[0], s[1]);
        }
        area += next.det() * perimeter + PI * next.det();
    }
    Ok(area)
}

/// `Area + M` of the boundary of `A⁻¹K`, `K` the given partial sum.
fn transformed_area_and_mean(
    partial: &EllipsoidSum,
    a: &SpdMatrix,
    quad: &SphereQuadrature,
) -> Result<(f64, f64)> {
    let mapped = partial.transform(a.inverse().matrix())?;
    let rule = quad.adapted_to(&mapped)?;
    Ok((surface_area(&mapped, &rule)?, mean_curvature_integral(&mapped, &rule)?))
}

/// Exact volume of `E_{A₁} + E_{A₂}` in space,
/// `Vol(E₁) + det A₂ · [Area + M](∂A₂⁻¹E₁) + Vol(E₂)`, with area and mean
/// curvature of the ellipsoid `A₂⁻¹E₁` by quadrature on `quad` adapted to
/// that ellipsoid (see [`SphereQuadrature::adapted_to`]).
pub fn volume_sum_3d_pair(a1: &SpdMatrix, a2: &SpdMatrix, quad: &SphereQuadrature) -> Result<f64> {
    require_dim(a1, 3)?;
    require_dim(a2, 3)?;
    let e1 = EllipsoidSum::single(Ellipsoid::new(a1.clone()));
    let (area, mean) = transformed_area_and_mean(&e1, a2, quad)?;
    let vb = 4.0 / 3.0 * PI;
    Ok(vb * a1.det() + a2.det() * (area + mean) + vb * a2.det())
}

/// Contributions of one Steiner step `Σ_k → Σ_k + E_{k+1}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SteinerStep {
    /// Number of terms in the partial sum before this step.
    pub terms: usize,
    /// `det A_{k+1}`.
    pub det: f64,
    /// Surface area of `A_{k+1}⁻¹Σ_k` (exact) and of its inner and outer
    /// ellipsoids.
    pub area_lower: f64,
    pub area_exact: f64,
    pub area_upper: f64,
    /// Integrated mean curvature of `A_{k+1}⁻¹Σ_k`.
    pub mean_curvature: f64,
}

/// Volume bounds, and the exact value where available.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SteinerReport {
    pub exact_value: Option<f64>,
    pub lower: f64,
    pub upper: f64,
    /// `(upper − lower)/exact`, or `None` when there is no exact value.
    pub relative_width: Option<f64>,
    pub components: Vec<SteinerStep>,
}

impl SteinerReport {
    fn exact(value: f64, components: Vec<SteinerStep>) -> Self {
        Self {
            exact_value: Some(value),
            lower: value,
            upper: value,
            relative_width: Some(0.0),
            components,
        }
    }
}

/// Steiner volume of a spatial sum of three or more terms.
///
/// The first two terms are combined exactly. Each later term adds
/// `det A · [Area(∂A⁻¹Σ_k) + M(∂A⁻¹Σ_k)] + Vol(E)`; `M` is additive and
/// exact, while the partial-sum area is replaced by the area of its best
/// inner ellipsoid for the lower bound and of its optimal outer ellipsoid
/// for the upper bound (surface area is monotone under inclusion of convex
/// bodies). The exact value uses the quadrature area of the partial sum.
pub fn volume_sum_3d_bounds(scene: &EllipsoidSum, quad: &SphereQuadrature) -> Result<SteinerReport> {
    if scene.dim() != 3 {
        return Err(Error::UnsupportedDimension(scene.dim()));
    }
    if scene.len() < 3 {
        return Err(Error::InvalidArgument(format!(
            "three-dimensional Steiner bounds need at least 3 terms, got {}",
            scene.len()
        )));
    }
    let shapes: Vec<SpdMatrix> = scene.shapes().cloned().collect();
    let vb = 4.0 / 3.0 * PI;
    let base = volume_sum_3d_pair(&shapes[0], &shapes[1], quad)?;
    let (mut lower, mut exact, mut upper) = (base, base, base);
    let mut components = Vec::with_capacity(shapes.len() - 2);
    for k in 2..shapes.len() {
        let a = &shapes[k];
        let partial = EllipsoidSum::from_shapes(shapes[..k].iter().cloned())?;
        let mapped = partial.transform(a.inverse().matrix())?;
        let rule = quad.adapted_to(&mapped)?;
        let area_exact = surface_area(&mapped, &rule)?;
        let mean = mean_curvature_integral(&mapped, &rule)?;
        let inner = EllipsoidSum::single(Ellipsoid::new(john_inner_recursive(&mapped)?));
        let (_, outer) = optimal_outer(&mapped)?;
        let outer = EllipsoidSum::single(Ellipsoid::new(outer));
        let area_lower = surface_area(&inner, &quad.adapted_to(&inner)?)?;
        let area_upper = surface_area(&outer, &quad.adapted_to(&outer)?)?;
        let det = a.det();
        lower += det * (area_lower + mean) + vb * det;
        exact += det * (area_exact + mean) + vb * det;
        upper += det * (area_upper + mean) + vb * det;
        components.push(SteinerStep {
            terms: k,
            det,
            area_lower,
            area_exact,
            area_upper,
            mean_curvature: mean,
        });
    }
    Ok(SteinerReport {
        exact_value: Some(exact),
        lower,
        upper,
        relative_width: Some((upper - lower) / exact),
        components,
    })
}

/// Steiner volume for any supported scene: exact for planar sums and spatial
/// pairs (and single terms), bounds plus quadrature value for longer
/// spatial sums.
pub fn steiner_volume(scene: &EllipsoidSum, quad: &SphereQuadrature) -> Result<SteinerReport> {
    let shapes: Vec<SpdMatrix> = scene.shapes().cloned().collect();
    match (scene.dim(), shapes.len()) {
        (2, _) => Ok(SteinerReport::exact(area_sum_2d_recursive(scene)?, Vec::new())),
        (3, 1) => Ok(SteinerReport::exact(4.0 / 3.0 * PI * shapes[0].det(), Vec::new())),
        (3, 2) => Ok(SteinerReport::exact(
            volume_sum_3d_pair(&shapes[0], &shapes[1], quad)?,
            Vec::new(),
        )),
        (3, _) => volume_sum_3d_bounds(scene, quad),
        (n, _) => Err(Error::UnsupportedDimension(n)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::unit_ball_volume;
    use crate::quadrature::{build_quadrature, volume_divergence};
    use crate::sample::{random_scene, random_spd};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Composite Gauss–Legendre on 200 panels of the defining integral.
    fn elliptic_e_oracle(k: f64) -> f64 {
        let (x, w) = crate::quadrature::gauss_legendre(10);
        let panels = 200;
        let h = PI / 2.0 / panels as f64;
        let mut total = 0.0;
        for p in 0..panels {
            let a = p as f64 * h;
            for (xi, wi) in x.iter().zip(&w) {
                let t = a + 0.5 * h * (xi + 1.0);
                total += 0.5 * h * wi * (1.0 - k * k * t.sin().powi(2)).sqrt();
            }
        }
        total
    }

    #[test]
    fn elliptic_e_values() {
        assert!((elliptic_e(0.0).unwrap() - PI / 2.0).abs() < 1e-15);
        assert_eq!(elliptic_e(1.0).unwrap(), 1.0);
        for k in [0.1, 0.5, 0.9, 0.99, 0.999999] {
            let v = elliptic_e(k).unwrap();
            assert!((v - elliptic_e_oracle(k)).abs() < 1e-12, "k = {k}");
        }
        assert!(elliptic_e(-0.1).is_err());
        assert!(elliptic_e(1.1).is_err());
        assert!(elliptic_e(f64::NAN).is_err());
    }

    #[test]
    fn pair_area_examples() {
        let b1 = SpdMatrix::identity(2);
        let b2 = SpdMatrix::scaled_identity(2, 2.0);
        assert!((area_sum_2d_pair(&b1, &b2).unwrap() - 9.0 * PI).abs() < 1e-12);
        let a = SpdMatrix::from_diagonal(&[5.0, 0.5]).unwrap();
        let b = SpdMatrix::from_rows(&[vec![2.0, 2.0], vec![2.0, 5.0]]).unwrap();
        let exact = area_sum_2d_pair(&a, &b).unwrap();
        assert!((exact - area_sum_2d_pair(&b, &a).unwrap()).abs() < 1e-10 * exact);
        assert!(exact > 113.14);
        let scene = EllipsoidSum::from_shapes([a, b]).unwrap();
        let div = volume_divergence(&scene, &build_quadrature(2, 256).unwrap()).unwrap();
        assert!((exact - div).abs() < 1e-6 * exact);
        assert!(area_sum_2d_pair(&SpdMatrix::identity(3), &SpdMatrix::identity(3)).is_err());
    }

    #[test]
    fn pair_area_exceeds_brunn_minkowski() {
        let mut rng = ChaCha8Rng::seed_from_u64(30);
        for _ in 0..50 {
            let a = random_spd(&mut rng, 2, 0.1, 3.0);
            let b = random_spd(&mut rng, 2, 0.1, 3.0);
            let area = area_sum_2d_pair(&a, &b).unwrap();
            assert!(area.sqrt() >= (PI * a.det()).sqrt() + (PI * b.det()).sqrt());
        }
    }

    #[test]
    fn recursive_area_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let a = random_spd(&mut rng, 2, 0.3, 3.0);
        let single = EllipsoidSum::from_shapes([a.clone()]).unwrap();
        assert!((area_sum_2d_recursive(&single).unwrap() - PI * a.det()).abs() < 1e-14);
        let b = random_spd(&mut rng, 2, 0.3, 3.0);
        let pair = EllipsoidSum::from_shapes([a.clone(), b.clone()]).unwrap();
        assert!((area_sum_2d_recursive(&pair).unwrap() - area_sum_2d_pair(&a, &b).unwrap()).abs() < 1e-9);
        let q = build_quadrature(2, 256).unwrap();
        for _ in 0..5 {
            let scene = random_scene(&mut rng, 2, 3, 0.3, 3.0);
            let exact = area_sum_2d_recursive(&scene).unwrap();
            let div = volume_divergence(&scene, &q).unwrap();
            assert!((exact - div).abs() < 1e-6 * exact);
        }
    }

    #[test]
    fn perimeter_is_additive() {
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        let q = build_quadrature(2, 256).unwrap();
        let scene = random_scene(&mut rng, 2, 2, 0.3, 3.0);
        let whole = surface_area(&scene, &q).unwrap();
        let parts: f64 = scene
            .shapes()
            .map(|a| {
                let s = a.eigen().eigenvalues.clone();
                ellipse_perimeter(s[1], s[0])
            })
            .sum();
        assert!((whole - parts).abs() < 1e-9 * whole);
    }

    #[test]
    fn spatial_pair_examples() {
        let q = build_quadrature(3, 96).unwrap();
        let (r1, r2) = (0.8, 1.7);
        let v = volume_sum_3d_pair(
            &SpdMatrix::scaled_identity(3, r1),
            &SpdMatrix::scaled_identity(3, r2),
            &q,
        )
        .unwrap();
        assert!((v - 4.0 / 3.0 * PI * (r1 + r2).powi(3)).abs() < 1e-9);
        let a = SpdMatrix::from_diagonal(&[1.0, 1.0, 2.0]).unwrap();
        let v = volume_sum_3d_pair(&a, &a, &q).unwrap();
        assert!((v - 8.0 * unit_ball_volume(3) * a.det()).abs() < 1e-8 * v);
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        for _ in 0..5 {
            let a1 = random_spd(&mut rng, 3, 0.5, 2.5);
            let a2 = random_spd(&mut rng, 3, 0.5, 2.5);
            let v12 = volume_sum_3d_pair(&a1, &a2, &q).unwrap();
            let v21 = volume_sum_3d_pair(&a2, &a1, &q).unwrap();
            assert!((v12 - v21).abs() < 1e-8 * v12);
            let fine = build_quadrature(3, 160).unwrap();
            let div = volume_divergence(&EllipsoidSum::from_shapes([a1, a2]).unwrap(), &fine).unwrap();
            assert!((v12 - div).abs() < 1e-8 * v12);
        }
    }

    #[test]
    fn spatial_bounds_examples() {
        // Partial sums mapped by A⁻¹ are elongated; 64 nodes per angle leave
        // errors near 1e-5 here, 128 reach 1e-9.
        let q = build_quadrature(3, 128).unwrap();
        let fine = build_quadrature(3, 192).unwrap();
        let balls = EllipsoidSum::from_shapes([
            SpdMatrix::scaled_identity(3, 0.5),
            SpdMatrix::scaled_identity(3, 1.0),
            SpdMatrix::scaled_identity(3, 1.5),
        ])
        .unwrap();
        let rep = volume_sum_3d_bounds(&balls, &q).unwrap();
        let exact = 4.0 / 3.0 * PI * 27.0;
        for v in [rep.lower, rep.upper, rep.exact_value.unwrap()] {
            assert!((v - exact).abs() < 1e-8 * exact, "{v} vs {exact}");
        }
        let diag = EllipsoidSum::from_shapes([
            SpdMatrix::from_diagonal(&[1.0, 0.5, 2.0]).unwrap(),
            SpdMatrix::from_diagonal(&[0.3, 1.2, 0.7]).unwrap(),
            SpdMatrix::from_diagonal(&[0.9, 0.9, 0.4]).unwrap(),
        ])
        .unwrap();
        let rep = volume_sum_3d_bounds(&diag, &q).unwrap();
        let div = volume_divergence(&diag, &fine).unwrap();
        assert!((rep.exact_value.unwrap() - div).abs() < 1e-7 * div);
        let mut rng = ChaCha8Rng::seed_from_u64(34);
        let scene = random_scene(&mut rng, 3, 3, 0.4, 2.5);
        let rep = volume_sum_3d_bounds(&scene, &q).unwrap();
        let div = volume_divergence(&scene, &fine).unwrap();
        assert!(rep.lower <= div && div <= rep.upper, "{} {} {}", rep.lower, div, rep.upper);
        assert!(volume_sum_3d_bounds(&EllipsoidSum::from_shapes([SpdMatrix::identity(3)]).unwrap(), &q).is_err());
    }
}
