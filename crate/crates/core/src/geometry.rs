//! Origin-centred ellipsoids and their Minkowski sums.
//!
//! An [`Ellipsoid`] is the open set `E_A = {x : xᵀA⁻²x < 1}` for an SPD shape
//! matrix `A`. Its boundary is reached from the outward unit normal `n` by
//! `x(n) = A²n / ‖An‖`, and the boundary of a sum `E_1 + ⋯ + E_m` is simply
//! the sum of those points, `x(n) = Σ A_i²n / ‖A_i n‖`. Every other quantity
//! in this crate (curvature, integrals, bounds) is built on that map.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::quadrature::SphereQuadrature;
use crate::spd::SpdMatrix;

/// Shape matrices with condition number above this are flagged unreliable.
pub const MAX_RELIABLE_CONDITION: f64 = 1e8;

/// Volume of the unit ball in `R^n`.
pub fn unit_ball_volume(n: usize) -> f64 {
    // V_n = 2π/n · V_{n-2}, V_0 = 1, V_1 = 2.
    match n {
        0 => 1.0,
        1 => 2.0,
        _ => 2.0 * std::f64::consts::PI / n as f64 * unit_ball_volume(n - 2),
    }
}

/// Surface measure of the unit sphere `S^{n-1}`, i.e. `n · V_n`.
pub fn unit_sphere_area(n: usize) -> f64 {
    n as f64 * unit_ball_volume(n)
}

/// Solid ellipsoid `E_A` centred at the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct Ellipsoid {
    shape: SpdMatrix,
    shape_sq: DMatrix<f64>,
}

impl Ellipsoid {
    pub fn new(shape: SpdMatrix) -> Self {
        let shape_sq = shape.matrix() * shape.matrix();
        Self { shape, shape_sq }
    }

    /// Ball of radius `r` in `R^n`.
    pub fn ball(n: usize, r: f64) -> Self {
        Self::new(SpdMatrix::scaled_identity(n, r))
    }

    pub fn shape(&self) -> &SpdMatrix {
        &self.shape
    }

    /// `A²`.
    pub fn shape_squared(&self) -> &DMatrix<f64> {
        &self.shape_sq
    }

    pub fn dim(&self) -> usize {
        self.shape.dim()
    }

    /// `Ψ(x) = xᵀA⁻²x`; equals 1 exactly on the boundary.
    pub fn implicit(&self, x: &DVector<f64>) -> f64 {
        let y = self.shape.inverse().mul_vec(x);
        y.norm_squared()
    }

    /// Support value `‖An‖` (1-homogeneous in `n`).
    pub fn support(&self, n: &DVector<f64>) -> f64 {
        self.shape.mul_vec(n).norm()
    }

    /// Boundary point with outward normal `n/‖n‖`: `A²n/‖An‖`.
    pub fn boundary_point(&self, n: &DVector<f64>) -> DVector<f64> {
        let an = self.shape.mul_vec(n);
        (&self.shape_sq * n) / an.norm()
    }

    pub fn volume(&self) -> f64 {
        unit_ball_volume(self.dim()) * self.shape.det()
    }
}

/// Build `E_A` from a general nonsingular `S` (the image of the unit ball under
/// `S`), using `A = (SSᵀ)^{1/2}`.
pub fn ellipsoid_from_general(s: &DMatrix<f64>) -> Result<Ellipsoid> {
    check_nonsingular(s)?;
    let sst = SpdMatrix::from_positive_symmetrized(s * s.transpose())?;
    let shape = SpdMatrix::from_symmetrized(sst.sqrt().into_matrix())?;
    Ok(Ellipsoid::new(shape))
}

fn check_nonsingular(s: &DMatrix<f64>) -> Result<()> {
    if s.nrows() != s.ncols() {
        return Err(Error::NotSquare {
            rows: s.nrows(),
            cols: s.ncols(),
        });
    }
    if s.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite);
    }
    let n = s.nrows() as i32;
    let det = s.clone().lu().determinant();
    if det.abs() <= 1e-12 * s.norm().powi(n) || det == 0.0 {
        return Err(Error::Singular);
    }
    Ok(())
}

/// Ordered collection of `m ≥ 1` ellipsoids in a common dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct EllipsoidSum {
    terms: Vec<Ellipsoid>,
}

impl EllipsoidSum {
    pub fn new(terms: Vec<Ellipsoid>) -> Result<Self> {
        let first = terms.first().ok_or(Error::EmptyScene)?;
        let n = first.dim();
        for t in &terms {
            if t.dim() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: t.dim(),
                });
            }
        }
        let scene = Self { terms };
        for i in scene.unreliable_terms() {
            log::warn!(
                "term {i} has condition number {:.3e} (> {MAX_RELIABLE_CONDITION:e}); results are unreliable",
                scene.terms[i].shape().condition_number()
            );
        }
        Ok(scene)
    }

    pub fn from_shapes(shapes: impl IntoIterator<Item = SpdMatrix>) -> Result<Self> {
        Self::new(shapes.into_iter().map(Ellipsoid::new).collect())
    }

    pub fn single(e: Ellipsoid) -> Self {
        Self { terms: vec![e] }
    }

    pub fn dim(&self) -> usize {
        self.terms[0].dim()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn terms(&self) -> &[Ellipsoid] {
        &self.terms
    }

    pub fn shapes(&self) -> impl Iterator<Item = &SpdMatrix> + '_ {
        self.terms.iter().map(|t| t.shape())
    }

    /// Indices of terms whose condition number exceeds [`MAX_RELIABLE_CONDITION`].
    pub fn unreliable_terms(&self) -> Vec<usize> {
        self.terms
            .iter()
            .enumerate()
            .filter(|(_, t)| t.shape().condition_number() > MAX_RELIABLE_CONDITION)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn is_reliable(&self) -> bool {
        self.unreliable_terms().is_empty()
    }

    fn check_dim(&self, v: &DVector<f64>) -> Result<()> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: v.len(),
            });
        }
        Ok(())
    }

    /// `Σ A_i²n/‖A_i n‖`; invariant under positive scaling of `n`.
    pub fn boundary_point(&self, n: &DVector<f64>) -> Result<DVector<f64>> {
        self.check_dim(n)?;
        if !(n.norm() > 0.0) {
            return Err(Error::ZeroDirection);
        }
        let mut x = DVector::zeros(self.dim());
        for t in &self.terms {
            x += t.boundary_point(n);
        }
        Ok(x)
    }

    /// Support function `h(n) = Σ‖A_i n‖`.
    pub fn support(&self, n: &DVector<f64>) -> f64 {
        self.terms.iter().map(|t| t.support(n)).sum()
    }

    /// Image of the sum under `S`: every `A_i` becomes `(S A_i² Sᵀ)^{1/2}`.
    pub fn transform(&self, s: &DMatrix<f64>) -> Result<EllipsoidSum> {
        if s.ncols() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: s.ncols(),
            });
        }
        check_nonsingular(s)?;
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let sq = SpdMatrix::from_positive_symmetrized(s * t.shape_squared() * s.transpose())?;
                Ok(Ellipsoid::new(sq.sqrt()))
            })
            .collect::<Result<Vec<_>>>()?;
        EllipsoidSum::new(terms)
    }
}

/// Boundary point of `E_1 + ⋯ + E_m` with outward normal `n/‖n‖`.
///
/// ```
/// use ellipsum::geometry::{sum_boundary_point, Ellipsoid, EllipsoidSum};
/// use nalgebra::DVector;
///
/// let scene = EllipsoidSum::new(vec![Ellipsoid::ball(2, 1.0), Ellipsoid::ball(2, 2.0)]).unwrap();
/// let x = sum_boundary_point(&scene, &DVector::from_vec(vec![0.0, 5.0])).unwrap();
/// assert!((x - DVector::from_vec(vec![0.0, 3.0])).norm() < 1e-15);
/// ```
pub fn sum_boundary_point(scene: &EllipsoidSum, n: &DVector<f64>) -> Result<DVector<f64>> {
    scene.boundary_point(n)
}

/// Older two-ellipsoid offset parameterization by the preimage `u` on the
/// sphere of the first term: `A₁u + A₂ (A₂A₁⁻¹u / ‖A₂A₁⁻¹u‖)`.
///
/// It agrees with [`sum_boundary_point`] at `n` when `u = A₁n/‖A₁n‖`, but is
/// not symmetric in the two terms.
pub fn legacy_pair_boundary(a1: &SpdMatrix, a2: &SpdMatrix, u: &DVector<f64>) -> DVector<f64> {
    let w = a2.matrix() * a1.inverse().matrix() * u;
    a1.mul_vec(u) + a2.mul_vec(&(&w / w.norm()))
}

/// `h(n) = Σ‖A_i n‖`.
pub fn support_value(scene: &EllipsoidSum, n: &DVector<f64>) -> f64 {
    scene.support(n)
}

/// Apply a nonsingular linear map to every term of the scene.
pub fn transform_scene(scene: &EllipsoidSum, s: &DMatrix<f64>) -> Result<EllipsoidSum> {
    scene.transform(s)
}

/// Result of a point-membership query against a Minkowski sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Containment {
    Inside,
    Outside,
    Boundary,
}

/// Classify `x` against the sum by maximizing `φ(n) = x·n − h(n)` over the
/// sphere: grid search over `grid`'s nodes, then 20 preconditioned projected
/// ascent steps from the 5 best nodes.
pub fn contains_point(
    scene: &EllipsoidSum,
    x: &DVector<f64>,
    grid: &SphereQuadrature,
    tol: f64,
) -> Result<Containment> {
    let tester = MembershipTester::new(scene, grid)?;
    tester.check_point(x)?;
    Ok(tester.classify(x.as_slice(), tol).0)
}

/// Default membership tolerance, `1e-8 · diameter` of the sum.
pub fn default_tolerance(scene: &EllipsoidSum, grid: &SphereQuadrature) -> f64 {
    let h_max = grid
        .nodes()
        .iter()
        .map(|n| scene.support(n))
        .fold(0.0_f64, f64::max);
    1e-8 * 2.0 * h_max
}

const REFINE_STARTS: usize = 5;
const REFINE_STEPS: usize = 20;

/// Precomputed state for repeated membership queries against one scene.
///
/// Grid support values do not depend on the query point, so each query costs
/// one dot product per grid node plus a short local refinement.
#[derive(Debug, Clone)]
pub struct MembershipTester {
    n: usize,
    shapes: Vec<Vec<f64>>,
    shapes_sq: Vec<Vec<f64>>,
    nodes: Vec<f64>,
    node_support: Vec<f64>,
    inner_inverse: Vec<f64>,
    inner_min_eig: f64,
    /// `δ²/2` for the grid's covering radius `δ`.
    half_cover_sq: Option<f64>,
    /// `Σ λ_max(A_i)²/λ_min(A_i) ≥ λ_max(C(n))` for every `n`.
    radius_max: f64,
}

impl MembershipTester {
    pub fn new(scene: &EllipsoidSum, grid: &SphereQuadrature) -> Result<Self> {
        let n = scene.dim();
        if grid.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: grid.dim(),
            });
        }
        let flat = |m: &DMatrix<f64>| -> Vec<f64> { m.transpose().as_slice().to_vec() };
        let shapes = scene.shapes().map(|a| flat(a.matrix())).collect();
        let shapes_sq = scene.terms().iter().map(|t| flat(t.shape_squared())).collect();
        let mut nodes = Vec::with_capacity(grid.len() * n);
        let mut node_support = Vec::with_capacity(grid.len());
        for node in grid.nodes() {
            nodes.extend_from_slice(node.as_slice());
            node_support.push(scene.support(node));
        }
        let inner = SpdMatrix::from_positive_symmetrized(
            scene
                .shapes()
                .fold(DMatrix::zeros(n, n), |acc, a| acc + a.matrix()),
        )?;
        Ok(Self {
            n,
            shapes,
            shapes_sq,
            nodes,
            node_support,
            inner_inverse: flat(inner.inverse().matrix()),
            inner_min_eig: inner.min_eigenvalue(),
            half_cover_sq: grid.covering_radius().map(|d| 0.5 * d * d),
            radius_max: scene
                .shapes()
                .map(|a| a.max_eigenvalue().powi(2) / a.min_eigenvalue())
                .sum(),
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    fn check_point(&self, x: &DVector<f64>) -> Result<()> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: x.len(),
            });
        }
        Ok(())
    }

    /// Classification plus the largest `x·n − h(n)` found. For outside points
    /// the search stops at the first value above `tol`.
    pub fn classify(&self, x: &[f64], tol: f64) -> (Containment, f64) {
        let n = self.n;
        // Points well inside E_{ΣA_i} are inside: φ(n) ≤ (ρ−1)·λ_min(ΣA_i).
        let rho = {
            let mut s = 0.0;
            for i in 0..n {
                let mut yi = 0.0;
                for j in 0..n {
                    yi += self.inner_inverse[i * n + j] * x[j];
                }
                s += yi * yi;
            }
            s.sqrt()
        };
        let bound = (rho - 1.0) * self.inner_min_eig;
        if bound < -tol {
            return (Containment::Inside, bound);
        }

        let mut best = [(f64::NEG_INFINITY, usize::MAX); REFINE_STARTS];
        for (k, (node, h)) in self.nodes.chunks_exact(n).zip(&self.node_support).enumerate() {
            let phi = dot(x, node) - h;
            if phi > tol {
                return (Containment::Outside, phi);
            }
            if phi > best[REFINE_STARTS - 1].0 {
                let mut pos = REFINE_STARTS - 1;
                while pos > 0 && phi > best[pos - 1].0 {
                    best[pos] = best[pos - 1];
                    pos -= 1;
                }
                best[pos] = (phi, k);
            }
        }
        let mut max_phi = best[0].0;
        // Along a unit-speed great circle φ'' = h − x·n − vᵀC(n)v ≥ −|x| − λ_max(C),
        // and ∇φ vanishes at the maximiser, so the nearest node is below the
        // maximum by at most (|x| + λ_max(C))·δ²/2.
        if let Some(half_sq) = self.half_cover_sq {
            let bound = max_phi + (self.radius_max + dot(x, x).sqrt()) * half_sq;
            if bound < -tol {
                return (Containment::Inside, max_phi);
            }
        }
        if max_phi <= tol {
            let mut scratch = Scratch::new(n);
            for &(_, k) in best.iter().filter(|(_, k)| *k != usize::MAX) {
                let start = &self.nodes[k * n..(k + 1) * n];
                let phi = self.refine(x, start, &mut scratch);
                max_phi = max_phi.max(phi);
                if max_phi > tol {
                    break;
                }
            }
        }
        let verdict = if max_phi > tol {
            Containment::Outside
        } else if max_phi < -tol {
            Containment::Inside
        } else {
            Containment::Boundary
        };
        (verdict, max_phi)
    }

    /// Support value, boundary point and curvature matrix at unit `dir`.
    fn evaluate(&self, dir: &[f64], s: &mut Scratch) -> f64 {
        let n = self.n;
        s.bx.iter_mut().for_each(|v| *v = 0.0);
        s.c.iter_mut().for_each(|v| *v = 0.0);
        let mut h = 0.0;
        for (a, a2) in self.shapes.iter().zip(&self.shapes_sq) {
            let mut norm2 = 0.0;
            for i in 0..n {
                let mut ai = 0.0;
                for j in 0..n {
                    ai += a[i * n + j] * dir[j];
                }
                norm2 += ai * ai;
                let mut bi = 0.0;
                for j in 0..n {
                    bi += a2[i * n + j] * dir[j];
                }
                s.b[i] = bi;
            }
            let len = norm2.sqrt();
            h += len;
            let inv3 = 1.0 / (len * len * len);
            for i in 0..n {
                s.bx[i] += s.b[i] / len;
                for j in 0..n {
                    s.c[i * n + j] += a2[i * n + j] / len - s.b[i] * s.b[j] * inv3;
                }
            }
        }
        h
    }

    fn refine(&self, x: &[f64], start: &[f64], s: &mut Scratch) -> f64 {
        let n = self.n;
        let mut dir = start.to_vec();
        let mut trial = vec![0.0; n];
        let mut h = self.evaluate(&dir, s);
        let mut phi = dot(x, &dir) - h;
        for _ in 0..REFINE_STEPS {
            // Tangential gradient of φ: (I − nnᵀ)(x − x(n)).
            for i in 0..n {
                s.g[i] = x[i] - s.bx[i];
            }
            let gn = dot(&s.g, &dir);
            for i in 0..n {
                s.g[i] -= gn * dir[i];
            }
            let gnorm = dot(&s.g, &s.g).sqrt();
            if gnorm <= 1e-15 * (1.0 + h) {
                break;
            }
            // Precondition with C + max(φ,0)(I − nnᵀ) + τ nnᵀ, positive
            // definite on the tangent space.
            let mu = phi.max(0.0);
            let tau = (0..n).map(|i| s.c[i * n + i]).sum::<f64>() / n as f64 + mu;
            for i in 0..n {
                for j in 0..n {
                    let delta = if i == j { 1.0 } else { 0.0 };
                    s.h[i * n + j] =
                        s.c[i * n + j] + mu * (delta - dir[i] * dir[j]) + tau * dir[i] * dir[j];
                }
            }
            s.step.copy_from_slice(&s.g);
            if !solve_in_place(n, &mut s.h, &mut s.step) {
                s.step.copy_from_slice(&s.g);
            }
            let snorm = dot(&s.step, &s.step).sqrt();
            let mut t = if snorm > 0.5 { 0.5 / snorm } else { 1.0 };
            let mut accepted = false;
            for _ in 0..30 {
                for i in 0..n {
                    trial[i] = dir[i] + t * s.step[i];
                }
                let norm = dot(&trial, &trial).sqrt();
                trial.iter_mut().for_each(|v| *v /= norm);
                let h_trial = self.evaluate(&trial, s);
                let phi_trial = dot(x, &trial) - h_trial;
                if phi_trial >= phi {
                    dir.copy_from_slice(&trial);
                    h = h_trial;
                    phi = phi_trial;
                    accepted = true;
                    break;
                }
                t *= 0.5;
            }
            if !accepted {
                break;
            }
        }
        phi
    }
}

struct Scratch {
    b: Vec<f64>,
    bx: Vec<f64>,
    g: Vec<f64>,
    step: Vec<f64>,
    c: Vec<f64>,
    h: Vec<f64>,
}

impl Scratch {
    fn new(n: usize) -> Self {
        Self {
            b: vec![0.0; n],
            bx: vec![0.0; n],
            g: vec![0.0; n],
            step: vec![0.0; n],
            c: vec![0.0; n * n],
            h: vec![0.0; n * n],
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Gaussian elimination with partial pivoting; `a` is row-major and is
/// destroyed. Returns false for a numerically singular system.
fn solve_in_place(n: usize, a: &mut [f64], b: &mut [f64]) -> bool {
    for col in 0..n {
        let mut piv = col;
        for r in (col + 1)..n {
            if a[r * n + col].abs() > a[piv * n + col].abs() {
                piv = r;
            }
        }
        if a[piv * n + col].abs() < 1e-300 {
            return false;
        }
        if piv != col {
            for k in 0..n {
                a.swap(col * n + k, piv * n + k);
            }
            b.swap(col, piv);
        }
        let d = a[col * n + col];
        for r in (col + 1)..n {
            let f = a[r * n + col] / d;
            if f != 0.0 {
                for k in col..n {
                    a[r * n + k] -= f * a[col * n + k];
                }
                b[r] -= f * b[col];
            }
        }
    }
    for col in (0..n).rev() {
        let mut s = b[col];
        for k in (col + 1)..n {
            s -= a[col * n + k] * b[k];
        }
        b[col] = s / a[col * n + col];
    }
    true
}
