//! Brute-force estimators used to validate the closed-form results.
//!
//! # Sampling contract
//!
//! [`monte_carlo_volume`] draws points uniformly from the axis-aligned
//! bounding box of the optimal outer ellipsoid. Samples are split into
//! batches of [`MC_BATCH`]; batch `b` uses `ChaCha8Rng::seed_from_u64(seed)`
//! switched to stream `b`, and each point consumes `N` consecutive `f64`
//! draws (`rng.gen::<f64>()`, coordinate order). Batch counts are merged in
//! batch order, so the estimate is bitwise reproducible for fixed
//! `(scene, samples, seed)` whatever the thread count.

use std::f64::consts::PI;

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::optimal_outer;
use crate::error::{Error, Result};
use crate::geometry::{default_tolerance, Containment, EllipsoidSum, MembershipTester};
use crate::quadrature::{build_quadrature, SphereQuadrature};

/// Samples per PRNG stream.
pub const MC_BATCH: usize = 1 << 14;

/// Smallest accepted sample count.
pub const MC_MIN_SAMPLES: usize = 1000;

/// Monte-Carlo volume estimate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McEstimate {
    pub value: f64,
    /// `V_box √(p(1−p)/samples)` for hit fraction `p`.
    pub std_error: f64,
    pub samples: usize,
    pub seed: u64,
    /// Samples within tolerance of the boundary; counted as inside.
    pub boundary_count: usize,
}

/// Membership grid used by the estimator: 720 directions in the plane, a
/// `64 × 64` product rule in space.
pub fn membership_grid(dim: usize) -> Result<SphereQuadrature> {
    match dim {
        2 => build_quadrature(2, 720),
        3 => build_quadrature(3, 64),
        n => build_quadrature(n, 16),
    }
}

/// Rejection-sampling estimate of the volume of the sum.
///
/// `membership` supplies the sphere grid for point classification; pass
/// `None` for [`membership_grid`].
pub fn monte_carlo_volume(
    scene: &EllipsoidSum,
    samples: usize,
    seed: u64,
    membership: Option<&SphereQuadrature>,
) -> Result<McEstimate> {
    if samples < MC_MIN_SAMPLES {
        return Err(Error::InvalidArgument(format!(
            "Monte-Carlo needs at least {MC_MIN_SAMPLES} samples, got {samples}"
        )));
    }
    let n = scene.dim();
    let owned;
    let grid = match membership {
        Some(g) => g,
        None => {
            owned = membership_grid(n)?;
            &owned
        }
    };
    let tester = MembershipTester::new(scene, grid)?;
    let tol = default_tolerance(scene, grid);
    let (_, outer) = optimal_outer(scene)?;
    let outer_sq = outer.square();
    let half: Vec<f64> = (0..n).map(|k| outer_sq.matrix()[(k, k)].sqrt()).collect();
    let box_volume: f64 = half.iter().map(|h| 2.0 * h).product();

    let batches = samples.div_ceil(MC_BATCH);
    let counts: Vec<(usize, usize)> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b as u64);
            let count = MC_BATCH.min(samples - b * MC_BATCH);
            let mut x = vec![0.0; n];
            let (mut inside, mut boundary) = (0, 0);
            for _ in 0..count {
                for k in 0..n {
                    x[k] = (2.0 * rng.gen::<f64>() - 1.0) * half[k];
                }
                match tester.classify(&x, tol).0 {
                    Containment::Inside => inside += 1,
                    Containment::Boundary => boundary += 1,
                    Containment::Outside => {}
                }
            }
            (inside, boundary)
        })
        .collect();
    let (inside, boundary) = counts
        .iter()
        .fold((0, 0), |(i, b), (ci, cb)| (i + ci, b + cb));
    let p = (inside + boundary) as f64 / samples as f64;
    Ok(McEstimate {
        value: box_volume * p,
        std_error: box_volume * (p * (1.0 - p) / samples as f64).sqrt(),
        samples,
        seed,
        boundary_count: boundary,
    })
}

fn planar_polyline(scene: &EllipsoidSum, resolution: usize) -> Result<Vec<DVector<f64>>> {
    if scene.dim() != 2 {
        return Err(Error::UnsupportedDimension(scene.dim()));
    }
    if resolution < 3 {
        return Err(Error::InvalidArgument(format!("polyline needs at least 3 points, got {resolution}")));
    }
    (0..resolution)
        .map(|k| {
            let t = 2.0 * PI * k as f64 / resolution as f64;
            scene.boundary_point(&DVector::from_vec(vec![t.cos(), t.sin()]))
        })
        .collect()
}

/// Length of the closed polyline through the boundary points at
/// `resolution` equally spaced normal angles.
pub fn polyline_perimeter(scene: &EllipsoidSum, resolution: usize) -> Result<f64> {
    let pts = planar_polyline(scene, resolution)?;
    Ok((0..pts.len())
        .map(|i| (&pts[(i + 1) % pts.len()] - &pts[i]).norm())
        .sum())
}

/// Shoelace area of the same polyline.
pub fn polyline_area(scene: &EllipsoidSum, resolution: usize) -> Result<f64> {
    let pts = planar_polyline(scene, resolution)?;
    let twice: f64 = (0..pts.len())
        .map(|i| {
            let (p, q) = (&pts[i], &pts[(i + 1) % pts.len()]);
            p[0] * q[1] - q[0] * p[1]
        })
        .sum();
    Ok(0.5 * twice)
}
