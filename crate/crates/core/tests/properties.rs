use ellipsum::bounds::{inner_sum_matrix, john_inner_pair, optimal_outer};
use ellipsum::geometry::{unit_ball_volume, Ellipsoid, EllipsoidSum};
use ellipsum::quadrature::{build_quadrature, volume_divergence};
use ellipsum::spd::SpdMatrix;
use ellipsum::steiner::{area_sum_2d_pair, area_sum_2d_recursive};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

/// SPD matrix `QDQᵀ` from a rotation angle and two semi-axes.
fn planar(angle: f64, a: f64, b: f64) -> SpdMatrix {
    let (c, s) = (angle.cos(), angle.sin());
    let q = DMatrix::from_row_slice(2, 2, &[c, -s, s, c]);
    SpdMatrix::from_symmetrized(&q * DMatrix::from_diagonal(&DVector::from_vec(vec![a, b])) * q.transpose()).unwrap()
}

fn planar_spd() -> impl Strategy<Value = SpdMatrix> {
    (0.0..std::f64::consts::PI, 0.2..3.0f64, 0.2..3.0f64).prop_map(|(t, a, b)| planar(t, a, b))
}

fn spatial_spd() -> impl Strategy<Value = SpdMatrix> {
    (prop::array::uniform9(-1.0..1.0f64), prop::array::uniform3(0.2..3.0f64)).prop_map(|(g, d)| {
        let q = DMatrix::from_row_slice(3, 3, &g).qr().q();
        SpdMatrix::from_symmetrized(&q * DMatrix::from_diagonal(&DVector::from_row_slice(&d)) * q.transpose()).unwrap()
    })
}

fn direction(n: usize) -> impl Strategy<Value = DVector<f64>> {
    prop::collection::vec(-1.0..1.0f64, n)
        .prop_filter("nonzero", |v| v.iter().map(|x| x * x).sum::<f64>() > 1e-3)
        .prop_map(DVector::from_vec)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn support_is_attained_at_the_boundary_point(a in spatial_spd(), b in spatial_spd(), n in direction(3)) {
        let scene = EllipsoidSum::from_shapes([a, b]).unwrap();
        let x = scene.boundary_point(&n).unwrap();
        let unit = &n / n.norm();
        prop_assert!((x.dot(&unit) - scene.support(&unit)).abs() < 1e-12 * scene.support(&unit));
        let scaled = scene.boundary_point(&(&n * 7.5)).unwrap();
        prop_assert!((x - scaled).norm() < 1e-12);
    }

    #[test]
    fn linear_maps_act_on_boundary_points(a in spatial_spd(), b in spatial_spd(), g in prop::array::uniform9(-1.0..1.0f64), n in direction(3)) {
        let s = DMatrix::from_row_slice(3, 3, &g) + DMatrix::identity(3, 3) * 2.0;
        let scene = EllipsoidSum::from_shapes([a, b]).unwrap();
        let image = scene.transform(&s).unwrap();
        let moved = image.boundary_point(&(s.transpose().lu().solve(&n).unwrap())).unwrap();
        let expected = &s * scene.boundary_point(&n).unwrap();
        prop_assert!((moved - &expected).norm() < 1e-9 * (1.0 + expected.norm()));
    }

    #[test]
    fn planar_area_is_symmetric_and_sandwiched(a in planar_spd(), b in planar_spd()) {
        let area = area_sum_2d_pair(&a, &b).unwrap();
        prop_assert!((area - area_sum_2d_pair(&b, &a).unwrap()).abs() < 1e-10 * area);
        let pi = std::f64::consts::PI;
        let scene = EllipsoidSum::from_shapes([a.clone(), b.clone()]).unwrap();
        let john = pi * john_inner_pair(&a, &b).unwrap().det();
        let outer = pi * optimal_outer(&scene).unwrap().1.det();
        prop_assert!(pi * inner_sum_matrix(&scene).det() <= john * (1.0 + 1e-12));
        prop_assert!(john <= area * (1.0 + 1e-9));
        prop_assert!(area <= outer * (1.0 + 1e-9));
    }

    #[test]
    fn volume_is_homogeneous_and_order_free(a in planar_spd(), b in planar_spd(), c in planar_spd(), k in 0.3..3.0f64) {
        let quad = build_quadrature(2, 256).unwrap();
        let scene = EllipsoidSum::from_shapes([a.clone(), b.clone(), c.clone()]).unwrap();
        let shuffled = EllipsoidSum::from_shapes([c.clone(), a.clone(), b.clone()]).unwrap();
        let scaled = EllipsoidSum::from_shapes([a.scale(k).unwrap(), b.scale(k).unwrap(), c.scale(k).unwrap()]).unwrap();
        let v = volume_divergence(&scene, &quad.adapted_to(&scene).unwrap()).unwrap();
        let recursive = area_sum_2d_recursive(&scene).unwrap();
        prop_assert!((v - recursive).abs() < 1e-6 * v);
        prop_assert!((recursive - area_sum_2d_recursive(&shuffled).unwrap()).abs() < 1e-10 * v);
        prop_assert!((area_sum_2d_recursive(&scaled).unwrap() - k * k * recursive).abs() < 1e-10 * k * k * v);
    }
}

#[test]
fn single_terms_have_closed_form_volumes() {
    for n in 2..=4 {
        let shape = SpdMatrix::from_diagonal(&(1..=n).map(|i| 0.5 + i as f64 / 2.0).collect::<Vec<_>>()).unwrap();
        let scene = EllipsoidSum::single(Ellipsoid::new(shape.clone()));
        let quad = if n == 4 {
            // The product rule carries no guarantee above N = 3; the adapted
            // rule turns a single ellipsoid into a sphere.
            build_quadrature(n, 12).unwrap().adapted_to(&scene).unwrap()
        } else {
            build_quadrature(n, 96).unwrap()
        };
        let v = volume_divergence(&scene, &quad).unwrap();
        let exact = unit_ball_volume(n) * shape.det();
        assert!((v - exact).abs() < 1e-6 * exact, "N={n}: {v} vs {exact}");
    }
}
