//! Command implementations. Each returns the text that goes to `--out` or
//! stdout; nothing here reads the clock or the environment.

use std::f64::consts::PI;
use std::fmt::Write as _;

use clap::ValueEnum;
use ellipsum::bounds::{inner_sum_matrix, john_inner_recursive, optimal_outer, volume_bounds};
use ellipsum::curvature::LocalGeometry;
use ellipsum::geometry::EllipsoidSum;
use ellipsum::oracle::{monte_carlo_volume, polyline_perimeter};
use ellipsum::quadrature::{build_quadrature, default_resolution, volume_divergence};
use ellipsum::spd::SpdMatrix;
use ellipsum::steiner::steiner_volume;
use nalgebra::DVector;
use serde_json::json;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Divergence,
    Steiner,
    Montecarlo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum)]
pub enum Curve {
    Inner,
    John,
    Outer,
    Sum,
}

fn resolution_or_default(scene: &EllipsoidSum, resolution: Option<usize>) -> usize {
    resolution.unwrap_or_else(|| default_resolution(scene.dim()))
}

fn to_json(value: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("JSON values serialize");
    s.push('\n');
    s
}

/// Normals for boundary export: equally spaced angles in the plane, a
/// Fibonacci lattice on `S²`, quadrature nodes above that.
pub fn export_normals(dim: usize, samples: usize) -> Result<Vec<DVector<f64>>, CliError> {
    if samples == 0 {
        return Err(CliError::Usage("--samples must be positive".into()));
    }
    Ok(match dim {
        2 => (0..samples)
            .map(|k| {
                let t = 2.0 * PI * k as f64 / samples as f64;
                DVector::from_vec(vec![t.cos(), t.sin()])
            })
            .collect(),
        3 => {
            let golden = PI * (3.0 - 5f64.sqrt());
            (0..samples)
                .map(|i| {
                    let z = 1.0 - (2.0 * i as f64 + 1.0) / samples as f64;
                    let r = (1.0 - z * z).sqrt();
                    let phi = golden * i as f64;
                    DVector::from_vec(vec![r * phi.cos(), r * phi.sin(), z])
                })
                .collect()
        }
        n => {
            let res = (samples as f64).powf(1.0 / (n as f64 - 1.0)).ceil().max(4.0) as usize;
            build_quadrature(n, res)?.nodes().to_vec()
        }
    })
}

/// CSV with columns `n_*, x_*, kappa_*`.
pub fn boundary(scene: &EllipsoidSum, samples: usize) -> Result<String, CliError> {
    let n = scene.dim();
    let mut out = String::new();
    let header: Vec<String> = (1..=n)
        .map(|i| format!("n_{i}"))
        .chain((1..=n).map(|i| format!("x_{i}")))
        .chain((1..n).map(|i| format!("kappa_{i}")))
        .collect();
    out.push_str(&header.join(","));
    out.push('\n');
    for normal in export_normals(n, samples)? {
        let g = LocalGeometry::at(scene, &normal)?;
        let fields: Vec<String> = g
            .normal
            .iter()
            .chain(g.point.iter())
            .copied()
            .chain(g.principal_curvatures())
            .map(|v| v.to_string())
            .collect();
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    Ok(out)
}

pub fn volume(
    scene: &EllipsoidSum,
    method: Method,
    resolution: Option<usize>,
    samples: usize,
    seed: Option<u64>,
) -> Result<String, CliError> {
    let res = resolution_or_default(scene, resolution);
    let value = match method {
        Method::Divergence => {
            let quad = build_quadrature(scene.dim(), res)?;
            let value = volume_divergence(scene, &quad.adapted_to(scene)?)?;
            let coarse = build_quadrature(scene.dim(), (res / 2).max(4))?;
            let coarse_value = volume_divergence(scene, &coarse.adapted_to(scene)?)?;
            let error_estimate = (value - coarse_value).abs();
            if error_estimate > 1e-6 * value.abs() {
                log::warn!("divergence volume not converged at resolution {res} (estimate {error_estimate:.3e}); increase --resolution");
            }
            json!({
                "method": "divergence",
                "value": value,
                "error_estimate": error_estimate,
                "resolution": res,
            })
        }
        Method::Steiner => {
            let quad = build_quadrature(scene.dim(), res)?;
            let report = steiner_volume(scene, &quad)?;
            json!({
                "method": "steiner",
                "value": report.exact_value,
                "lower": report.lower,
                "upper": report.upper,
                "relative_width": report.relative_width,
                "components": report.components,
                "resolution": res,
            })
        }
        Method::Montecarlo => {
            let seed = seed.ok_or_else(|| CliError::Usage("--method montecarlo requires --seed".into()))?;
            let est = monte_carlo_volume(scene, samples, seed, None)?;
            json!({
                "method": "montecarlo",
                "value": est.value,
                "error_estimate": est.std_error,
                "std_error": est.std_error,
                "samples": est.samples,
                "seed": est.seed,
                "boundary_count": est.boundary_count,
            })
        }
    };
    Ok(to_json(&value))
}

pub fn bounds(scene: &EllipsoidSum, resolution: Option<usize>) -> Result<String, CliError> {
    let quad = build_quadrature(scene.dim(), resolution_or_default(scene, resolution))?;
    let report = volume_bounds(scene, &quad)?;
    Ok(to_json(&serde_json::to_value(report.summary()).expect("summary serializes")))
}

pub fn oracle(
    scene: &EllipsoidSum,
    samples: usize,
    seed: u64,
    polyline_resolution: usize,
) -> Result<String, CliError> {
    let est = monte_carlo_volume(scene, samples, seed, None)?;
    let perimeter = if scene.dim() == 2 {
        Some(polyline_perimeter(scene, polyline_resolution)?)
    } else {
        None
    };
    Ok(to_json(&json!({
        "monte_carlo": est,
        "polyline_perimeter": perimeter,
        "polyline_resolution": polyline_resolution,
    })))
}

/// Points per plotted curve.
pub const PLOT_POINTS: usize = 720;

fn ellipse_points(a: &SpdMatrix) -> Vec<(f64, f64)> {
    (0..PLOT_POINTS)
        .map(|k| {
            let t = 2.0 * PI * k as f64 / PLOT_POINTS as f64;
            let p = a.mul_vec(&DVector::from_vec(vec![t.cos(), t.sin()]));
            (p[0], p[1])
        })
        .collect()
}

/// Planar figure: terms black, sum boundary green, `E_{ΣA_i}` blue, the
/// inner pair/composite ellipse red, the optimal outer ellipse orange.
pub fn plot(scene: &EllipsoidSum, show: &[Curve]) -> Result<String, CliError> {
    if scene.dim() != 2 {
        return Err(CliError::Dimension(format!(
            "plot supports planar scenes only, got dimension {}",
            scene.dim()
        )));
    }
    let mut curves: Vec<(&str, &str, Vec<(f64, f64)>)> = Vec::new();
    for a in scene.shapes() {
        curves.push(("term", "black", ellipse_points(a)));
    }
    let mut show = show.to_vec();
    show.sort();
    show.dedup();
    let bounds_drawn = scene.len() > 1;
    for c in &show {
        match c {
            Curve::Inner if bounds_drawn => curves.push(("inner", "blue", ellipse_points(&inner_sum_matrix(scene)))),
            Curve::John if bounds_drawn => curves.push(("john", "red", ellipse_points(&john_inner_recursive(scene)?))),
            Curve::Outer if bounds_drawn => curves.push(("outer", "orange", ellipse_points(&optimal_outer(scene)?.1))),
            _ => {}
        }
    }
    if show.contains(&Curve::Sum) {
        let pts = (0..PLOT_POINTS)
            .map(|k| {
                let t = 2.0 * PI * k as f64 / PLOT_POINTS as f64;
                let x = scene.boundary_point(&DVector::from_vec(vec![t.cos(), t.sin()]))?;
                Ok((x[0], x[1]))
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        curves.push(("sum", "green", pts));
    }

    let (mut xmin, mut xmax, mut ymin, mut ymax) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for (_, _, pts) in &curves {
        for &(x, y) in pts {
            xmin = xmin.min(x);
            xmax = xmax.max(x);
            // SVG's y axis points down.
            ymin = ymin.min(-y);
            ymax = ymax.max(-y);
        }
    }
    let (w, h) = (xmax - xmin, ymax - ymin);
    let (mx, my) = (0.05 * w, 0.05 * h);
    let stroke = 0.004 * w.max(h);

    let mut svg = String::new();
    writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{:.6} {:.6} {:.6} {:.6}" width="600" height="{:.0}">"#,
        xmin - mx,
        ymin - my,
        w + 2.0 * mx,
        h + 2.0 * my,
        600.0 * (h + 2.0 * my) / (w + 2.0 * mx)
    )
    .unwrap();
    for (kind, color, pts) in &curves {
        let points: Vec<String> = pts.iter().map(|(x, y)| format!("{x:.6},{:.6}", -y)).collect();
        writeln!(
            svg,
            r#"  <polygon class="{kind}" fill="none" stroke="{color}" stroke-width="{stroke:.6}" points="{}"/>"#,
            points.join(" ")
        )
        .unwrap();
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::parse_scene;

    const REFERENCE: &str = r#"{"dimension": 2, "ellipsoids": [{"matrix": [[5, 0], [0, 0.5]]}, {"matrix": [[2, 2], [2, 5]]}]}"#;

    #[test]
    fn boundary_of_unit_disk() {
        let scene = parse_scene(r#"{"dimension": 2, "ellipsoids": [{"matrix": [[1, 0], [0, 1]]}]}"#).unwrap();
        let csv = boundary(&scene, 4).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "n_1,n_2,x_1,x_2,kappa_1");
        assert_eq!(lines.len(), 5);
        for line in &lines[1..] {
            let v: Vec<f64> = line.split(',').map(|s| s.parse().unwrap()).collect();
            assert!((v[0] - v[2]).abs() < 1e-15 && (v[1] - v[3]).abs() < 1e-15);
            assert!((v[4] - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn fibonacci_normals_are_unit_and_spread() {
        let ns = export_normals(3, 500).unwrap();
        assert_eq!(ns.len(), 500);
        let mean = ns.iter().fold(DVector::zeros(3), |acc, n| acc + n) / 500.0;
        assert!(mean.norm() < 1e-2);
        assert!(ns.iter().all(|n| (n.norm() - 1.0).abs() < 1e-14));
    }

    #[test]
    fn plot_rejects_space_and_counts_curves() {
        let ball = parse_scene(r#"{"dimension": 3, "ellipsoids": [{"matrix": [[1, 0, 0], [0, 1, 0], [0, 0, 1]]}]}"#).unwrap();
        assert_eq!(plot(&ball, &[Curve::Sum]).unwrap_err().exit_code(), 4);
        let scene = parse_scene(REFERENCE).unwrap();
        let svg = plot(&scene, &[Curve::Inner, Curve::John, Curve::Sum]).unwrap();
        assert_eq!(svg.matches("<polygon").count(), 5);
        for color in ["black", "green", "blue", "red"] {
            assert!(svg.contains(&format!("stroke=\"{color}\"")));
        }
        let disk = parse_scene(r#"{"dimension": 2, "ellipsoids": [{"matrix": [[1, 0], [0, 1]]}]}"#).unwrap();
        let svg = plot(&disk, &[Curve::Inner, Curve::John, Curve::Sum]).unwrap();
        assert_eq!(svg.matches("<polygon").count(), 2);
    }

    #[test]
    fn montecarlo_needs_seed() {
        let scene = parse_scene(REFERENCE).unwrap();
        let err = volume(&scene, Method::Montecarlo, None, 10_000, None).unwrap_err();
        assert_eq!(err.exit_code(), 1);
    }
}
