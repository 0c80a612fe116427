//! Derivative-free minimization over the unit sphere.
//!
//! Grid search over a fixed node set followed by Nelder–Mead (via `argmin`)
//! in the gnomonic chart `t ↦ (n₀ + M t)/‖n₀ + M t‖` around each of the best
//! nodes, where `M` spans the tangent space at `n₀`. The chart is regular at
//! its centre, so starts never sit on a coordinate singularity.

use argmin::core::{CostFunction, Executor, State};
use argmin::solver::neldermead::NelderMead;
use nalgebra::DVector;
use rayon::prelude::*;

use crate::curvature::tangent_basis;

/// Budget for [`sphere_minimize`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchBudget {
    /// Number of best grid nodes refined locally.
    pub starts: usize,
    /// Nelder–Mead iterations per start.
    pub iterations: u64,
    /// Initial simplex edge in chart coordinates.
    pub step: f64,
    /// Stop when the simplex cost spread falls below this.
    pub tolerance: f64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        Self {
            starts: 5,
            iterations: 400,
            step: 0.05,
            tolerance: 1e-15,
        }
    }
}

struct Cost<F>(F);

impl<F: Fn(&[f64]) -> f64> CostFunction for Cost<F> {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, p: &Self::Param) -> Result<f64, argmin::core::Error> {
        Ok((self.0)(p))
    }
}

/// Nelder–Mead from `start` with an axis-aligned initial simplex of edge
/// `step`. Returns the best point and value seen; falls back to `start` if
/// the solver reports an error.
pub fn nelder_mead<F>(f: F, start: &[f64], step: f64, iterations: u64, tolerance: f64) -> (Vec<f64>, f64)
where
    F: Fn(&[f64]) -> f64,
{
    let f0 = f(start);
    let mut simplex = vec![start.to_vec()];
    for i in 0..start.len() {
        let mut v = start.to_vec();
        v[i] += step;
        simplex.push(v);
    }
    let run = NelderMead::new(simplex)
        .with_sd_tolerance(tolerance)
        .and_then(|solver| {
            Executor::new(Cost(&f), solver)
                .configure(|s| s.max_iters(iterations))
                .run()
        });
    match run {
        Ok(res) => {
            let state = res.state();
            match state.get_best_param() {
                Some(p) if state.get_best_cost() <= f0 => (p.clone(), state.get_best_cost()),
                _ => (start.to_vec(), f0),
            }
        }
        Err(e) => {
            log::debug!("nelder-mead failed: {e}");
            (start.to_vec(), f0)
        }
    }
}

/// Minimize `f` over the unit sphere: evaluate every node, refine the
/// `budget.starts` best with Nelder–Mead. Ties keep the earliest node.
pub fn sphere_minimize<F>(f: F, nodes: &[DVector<f64>], budget: SearchBudget) -> (DVector<f64>, f64)
where
    F: Fn(&DVector<f64>) -> f64 + Sync,
{
    assert!(!nodes.is_empty(), "sphere search needs at least one node");
    let values: Vec<f64> = nodes.par_iter().map(|n| f(n)).collect();
    let mut order: Vec<usize> = (0..nodes.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));

    let mut best = (nodes[order[0]].clone(), values[order[0]]);
    for &idx in order.iter().take(budget.starts) {
        let n0 = &nodes[idx];
        let basis = match tangent_basis(n0) {
            Ok(b) => b.columns,
            Err(_) => continue,
        };
        let chart = |t: &[f64]| -> DVector<f64> {
            let mut p = n0.clone();
            for (k, tk) in t.iter().enumerate() {
                p += basis.column(k) * *tk;
            }
            let norm = p.norm();
            p / norm
        };
        let start = vec![0.0; n0.len() - 1];
        let (t, v) = nelder_mead(|t| f(&chart(t)), &start, budget.step, budget.iterations, budget.tolerance);
        if v < best.1 {
            best = (chart(&t), v);
        }
    }
    best
}

/// Maximize `f` over the unit sphere; see [`sphere_minimize`].
pub fn sphere_maximize<F>(f: F, nodes: &[DVector<f64>], budget: SearchBudget) -> (DVector<f64>, f64)
where
    F: Fn(&DVector<f64>) -> f64 + Sync,
{
    let (n, v) = sphere_minimize(|n| -f(n), nodes, budget);
    (n, -v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::build_quadrature;

    #[test]
    fn rosenbrock() {
        let (x, v) = nelder_mead(
            |p| (1.0 - p[0]).powi(2) + 100.0 * (p[1] - p[0] * p[0]).powi(2),
            &[-1.2, 1.0],
            0.1,
            2000,
            1e-20,
        );
        assert!(v < 1e-10, "{v}");
        assert!((x[0] - 1.0).abs() < 1e-4 && (x[1] - 1.0).abs() < 1e-4);
    }

    #[test]
    fn finds_extreme_direction_of_quadratic_form() {
        // max nᵀQn over the sphere is λ_max(Q), attained at its eigenvector.
        let q = nalgebra::DMatrix::from_row_slice(3, 3, &[3.0, 1.0, 0.0, 1.0, 2.0, 0.5, 0.0, 0.5, 1.0]);
        let grid = build_quadrature(3, 8).unwrap();
        let (n, v) = sphere_maximize(|n| (n.transpose() * &q * n)[0], grid.nodes(), SearchBudget::default());
        let lmax = q.clone().symmetric_eigen().eigenvalues.max();
        assert!((v - lmax).abs() < 1e-12);
        assert!(((&q * &n) - &n * lmax).norm() < 1e-5);
    }

    #[test]
    fn never_worse_than_grid() {
        let grid = build_quadrature(2, 16).unwrap();
        let f = |n: &DVector<f64>| (5.0 * n[0]).sin() + n[1];
        let grid_best = grid.nodes().iter().map(f).fold(f64::INFINITY, f64::min);
        let (_, v) = sphere_minimize(f, grid.nodes(), SearchBudget::default());
        assert!(v <= grid_best);
    }
}
