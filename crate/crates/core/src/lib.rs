//! Minkowski sums of origin-centred ellipsoids in `R^N`.
//!
//! The boundary of `E_1 + ⋯ + E_m` is parameterized by its outward normal,
//! `x(n) = Σ A_i²n/‖A_i n‖`. From that map the crate derives curvature,
//! surface integrals and volumes, exact planar areas via Steiner's formula,
//! and inner/outer ellipsoidal bounds.
//!
//! ```
//! use ellipsum::prelude::*;
//!
//! let a = SpdMatrix::from_diagonal(&[5.0, 0.5]).unwrap();
//! let b = SpdMatrix::from_rows(&[vec![2.0, 2.0], vec![2.0, 5.0]]).unwrap();
//! let scene = EllipsoidSum::from_shapes([a.clone(), b.clone()]).unwrap();
//!
//! let quad = build_quadrature(2, 256).unwrap();
//! let area = volume_divergence(&scene, &quad).unwrap();
//! let exact = area_sum_2d_pair(&a, &b).unwrap();
//! assert!((area - exact).abs() < 1e-9 * exact);
//! ```
//!
//! The guide in `book/` walks through each concept; its code blocks are
//! compiled and run as doctests of this crate.

pub mod bounds;
pub mod curvature;
pub mod error;
pub mod geometry;
pub mod optimize;
pub mod oracle;
pub mod quadrature;
pub mod sample;
pub mod spd;
pub mod steiner;

pub use error::{Error, Result};

/// Guide chapters, compiled as doctests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/boundary.md")]
    mod boundary {}
    #[doc = include_str!("../../../book/src/curvature.md")]
    mod curvature {}
    #[doc = include_str!("../../../book/src/quadrature.md")]
    mod quadrature {}
    #[doc = include_str!("../../../book/src/bounds.md")]
    mod bounds {}
    #[doc = include_str!("../../../book/src/steiner.md")]
    mod steiner {}
    #[doc = include_str!("../../../book/src/oracle.md")]
    mod oracle {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
    #[doc = include_str!("../../../README.md")]
    mod readme {}
}

/// Common imports.
pub mod prelude {
    pub use crate::bounds::{
        brunn_minkowski_chain, contact_points, containment_check, heuristic_gammas, inner_sum_matrix,
        john_inner_pair, john_inner_recursive, kv_inner_family, minvol_outer, optimal_beta,
        outer_gamma_matrix, volume_bounds, BoundReport,
    };
    pub use crate::curvature::{curvature_matrix, principal_curvatures, LocalGeometry};
    pub use crate::error::{Error, Result};
    pub use crate::geometry::{contains_point, sum_boundary_point, Containment, Ellipsoid, EllipsoidSum};
    pub use crate::oracle::{monte_carlo_volume, polyline_perimeter, McEstimate};
    pub use crate::quadrature::{
        build_quadrature, gaussian_curvature_integral, mean_curvature_integral, surface_area,
        surface_integral, volume_divergence, SphereQuadrature,
    };
    pub use crate::spd::{geometric_mean, SpdMatrix};
    pub use crate::steiner::{area_sum_2d_pair, area_sum_2d_recursive, elliptic_e, volume_sum_3d_pair};
}
