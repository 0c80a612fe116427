//! Inner and outer ellipsoids of a Minkowski sum, and the volume bounds they
//! imply.
//!
//! An origin-centred ellipsoid `E_B` lies inside the sum exactly when its
//! support function is dominated, `‖Bn‖ ≤ Σ‖A_i n‖` for every `n`, and
//! contains the sum when the inequality is reversed. The inner candidates are
//! `A_sum = ΣA_i` and the maximal-volume pair ellipsoid
//!
//! ```text
//! F(A, B) = [A² + 2 A²#B² + B²]^{1/2}
//! ```
//!
//! The outer candidates are the family `A_γ = (Σγ_i A_i²)^{1/2}` with
//! `Σ1/γ_i = 1`, which contains the sum by Cauchy–Schwarz.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{unit_ball_volume, EllipsoidSum};
use crate::optimize::{nelder_mead, sphere_maximize, sphere_minimize, SearchBudget};
use crate::quadrature::{build_quadrature, default_resolution, volume_divergence, SphereQuadrature};
use crate::spd::{geometric_mean, SpdMatrix};
use crate::steiner::{area_sum_2d_pair, area_sum_2d_recursive};

/// `A_sum = ΣA_i`, whose ellipsoid always lies inside the sum.
pub fn inner_sum_matrix(scene: &EllipsoidSum) -> SpdMatrix {
    let n = scene.dim();
    let total = scene
        .shapes()
        .fold(DMatrix::zeros(n, n), |acc, a| acc + a.matrix());
    SpdMatrix::from_positive_symmetrized(total).expect("sum of SPD matrices is SPD")
}

fn check_dims(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

fn search_grid(dim: usize) -> Result<SphereQuadrature> {
    // At least 360 directions in the plane and 1000 in space.
    let res = match dim {
        2 => 360,
        3 => 32,
        _ => (1000f64.powf(1.0 / (dim as f64 - 1.0))).ceil() as usize,
    };
    build_quadrature(dim, res.max(4))
}

/// Largest value of `‖Bn‖ − Σ‖A_i n‖` found by grid search plus local
/// refinement, together with the scale `Σλ_max(A_i)` it is measured against.
pub fn containment_gap(candidate: &SpdMatrix, scene: &EllipsoidSum) -> Result<(f64, f64)> {
    check_dims(scene.dim(), candidate.dim())?;
    let grid = search_grid(scene.dim())?;
    let b = candidate.matrix();
    let (_, gap) = sphere_maximize(
        |n| (b * n).norm() - scene.support(n),
        grid.nodes(),
        SearchBudget::default(),
    );
    let scale: f64 = scene.shapes().map(|a| a.max_eigenvalue()).sum();
    Ok((gap, scale))
}

/// Whether `E_candidate ⊆ E_1 + ⋯ + E_m`, up to `1e-9` of the scene scale.
pub fn containment_check(candidate: &SpdMatrix, scene: &EllipsoidSum) -> Result<bool> {
    let (gap, scale) = containment_gap(candidate, scene)?;
    Ok(gap <= 1e-9 * scale)
}

/// The `2N` points where `∂E_{A₁+A₂}` touches `∂(E₁ + E₂)`.
///
/// Contact happens at normals `v` with `A₁v ∥ A₂v`, i.e. eigenvectors of
/// `A₁⁻¹A₂`; these are `A₁^{-1/2}w` for eigenvectors `w` of the symmetric
/// `A₁^{-1/2}A₂A₁^{-1/2}`. Returned as `+x(v_1), −x(v_1), +x(v_2), …`.
pub fn contact_points(a1: &SpdMatrix, a2: &SpdMatrix) -> Result<Vec<DVector<f64>>> {
    check_dims(a1.dim(), a2.dim())?;
    let contacts = contact_normals(a1, a2)?;
    let a_sum = a1.add(a2)?;
    let a_sum_sq = a_sum.matrix() * a_sum.matrix();
    let mut points = Vec::with_capacity(2 * contacts.len());
    for v in contacts {
        let x = &a_sum_sq * &v / (a_sum.matrix() * &v).norm();
        points.push(x.clone());
        points.push(-x);
    }
    Ok(points)
}

/// Unit normals `v_j` at which `‖(A₁+A₂)v‖ = ‖A₁v‖ + ‖A₂v‖`.
pub fn contact_normals(a1: &SpdMatrix, a2: &SpdMatrix) -> Result<Vec<DVector<f64>>> {
    check_dims(a1.dim(), a2.dim())?;
    let half = a1.inv_sqrt();
    let sym = a2.congruence(half.matrix())?;
    let vecs = &sym.eigen().eigenvectors;
    Ok((0..a1.dim())
        .map(|j| {
            let v = half.matrix() * vecs.column(j);
            let v = &v / v.norm();
            v.into_owned()
        })
        .collect())
}

/// `F(A, B) = [A² + 2 A²#B² + B²]^{1/2}`, the maximal-volume ellipsoid
/// inside `E_A + E_B`.
///
/// ```
/// use ellipsum::bounds::john_inner_pair;
/// use ellipsum::spd::SpdMatrix;
///
/// let a = SpdMatrix::from_diagonal(&[5.0, 0.5]).unwrap();
/// let b = SpdMatrix::from_rows(&[vec![2.0, 2.0], vec![2.0, 5.0]]).unwrap();
/// let area = std::f64::consts::PI * john_inner_pair(&a, &b).unwrap().det();
/// assert!((area - 113.14).abs() < 0.01);
/// ```
pub fn john_inner_pair(a: &SpdMatrix, b: &SpdMatrix) -> Result<SpdMatrix> {
    check_dims(a.dim(), b.dim())?;
    let a2 = a.square();
    let b2 = b.square();
    let mean = geometric_mean(&a2, &b2)?;
    SpdMatrix::from_positive_symmetrized(a2.matrix() + mean.matrix() * 2.0 + b2.matrix()).map(|m| m.sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Combine {
    John,
    Sum,
}

fn combine(op: Combine, a: &SpdMatrix, b: &SpdMatrix) -> Result<SpdMatrix> {
    match op {
        Combine::John => john_inner_pair(a, b),
        Combine::Sum => a.add(b),
    }
}

/// All inner matrices obtained from binary bracketings of the terms in
/// `mask`, each internal node being `F(·,·)` or `+`. Both operations map
/// inner ellipsoids of two partial sums to an inner ellipsoid of their union.
fn bracketings(shapes: &[SpdMatrix], mask: u32) -> Result<Vec<SpdMatrix>> {
    if mask.count_ones() == 1 {
        return Ok(vec![shapes[mask.trailing_zeros() as usize].clone()]);
    }
    let low = mask & mask.wrapping_neg();
    let rest = mask ^ low;
    let mut out = Vec::new();
    // Left part always contains the lowest index, so each split appears once.
    let mut sub = rest;
    let mut splits = Vec::new();
    loop {
        let left = low | (rest & !sub);
        let right = sub;
        if right != 0 {
            splits.push((left, right));
        }
        if sub == 0 {
            break;
        }
        sub = (sub - 1) & rest;
    }
    splits.sort();
    for (left, right) in splits {
        let ls = bracketings(shapes, left)?;
        let rs = bracketings(shapes, right)?;
        for l in &ls {
            for r in &rs {
                for op in [Combine::John, Combine::Sum] {
                    out.push(combine(op, l, r)?);
                }
            }
        }
    }
    Ok(out)
}

/// Largest scene size searched exhaustively by [`john_inner_recursive`].
pub const EXHAUSTIVE_BRACKETING_MAX: usize = 4;

/// Best inner ellipsoid found by composing `F` and `+` over the terms.
///
/// Up to [`EXHAUSTIVE_BRACKETING_MAX`] terms every binary bracketing is
/// tried with every choice of operation at its nodes (`ΣA_i` is one of
/// them, so the result never has smaller determinant). Larger scenes use
/// greedy pairing: repeatedly replace the pair whose `F` has the largest
/// determinant. The winning candidate is confirmed by [`containment_check`];
/// ties keep the first candidate constructed.
pub fn john_inner_recursive(scene: &EllipsoidSum) -> Result<SpdMatrix> {
    let shapes: Vec<SpdMatrix> = scene.shapes().cloned().collect();
    let mut candidates = match shapes.len() {
        1 => vec![shapes[0].clone()],
        2 => vec![john_inner_pair(&shapes[0], &shapes[1])?],
        m if m <= EXHAUSTIVE_BRACKETING_MAX => bracketings(&shapes, (1u32 << m) - 1)?,
        _ => vec![greedy_pairing(shapes.clone())?],
    };
    candidates.push(inner_sum_matrix(scene));
    let mut order: Vec<usize> = (0..candidates.len()).collect();
    order.sort_by(|&i, &j| candidates[j].det().total_cmp(&candidates[i].det()).then(i.cmp(&j)));
    for idx in order {
        if containment_check(&candidates[idx], scene)? {
            return Ok(candidates.swap_remove(idx));
        }
        log::warn!("inner candidate {idx} failed the containment check");
    }
    Ok(inner_sum_matrix(scene))
}

fn greedy_pairing(mut pool: Vec<SpdMatrix>) -> Result<SpdMatrix> {
    while pool.len() > 1 {
        let mut best: Option<(usize, usize, SpdMatrix)> = None;
        for i in 0..pool.len() {
            for j in i + 1..pool.len() {
                let f = john_inner_pair(&pool[i], &pool[j])?;
                if best.as_ref().map_or(true, |(_, _, b)| f.det() > b.det()) {
                    best = Some((i, j, f));
                }
            }
        }
        let (i, j, f) = best.expect("pool has at least two entries");
        pool.remove(j);
        pool[i] = f;
    }
    Ok(pool.pop().expect("non-empty pool"))
}

/// Inner family `Ŝ² = S⁻¹[(SA²S)^{1/2} + (SB²S)^{1/2}]²S⁻¹` for SPD `S`;
/// `S = A⁻¹` and `S = B⁻¹` both give `F(A, B)`.
pub fn kv_inner_family(a: &SpdMatrix, b: &SpdMatrix, s: &SpdMatrix) -> Result<SpdMatrix> {
    check_dims(a.dim(), b.dim())?;
    check_dims(a.dim(), s.dim())?;
    let pa = a.square().congruence(s.matrix())?.sqrt();
    let pb = b.square().congruence(s.matrix())?.sqrt();
    let p = pa.add(&pb)?;
    Ok(p.square().congruence(s.inverse().matrix())?.sqrt())
}

/// Outer ellipsoid `A_γ = (Σγ_i A_i²)^{1/2}`; requires `γ_i > 0` and
/// `|Σ1/γ_i − 1| < 1e-12`.
pub fn outer_gamma_matrix(scene: &EllipsoidSum, gammas: &[f64]) -> Result<SpdMatrix> {
    if gammas.len() != scene.len() {
        return Err(Error::DimensionMismatch {
            expected: scene.len(),
            found: gammas.len(),
        });
    }
    if gammas.iter().any(|g| !(*g > 0.0) || !g.is_finite()) {
        return Err(Error::InvalidArgument("weights must be positive and finite".into()));
    }
    let defect = gammas.iter().map(|g| 1.0 / g).sum::<f64>() - 1.0;
    if defect.abs() >= 1e-12 {
        return Err(Error::InvalidArgument(format!(
            "weights violate the reciprocal-sum constraint by {defect:.3e}"
        )));
    }
    Ok(gamma_matrix_unchecked(scene, gammas)?.sqrt())
}

fn gamma_matrix_unchecked(scene: &EllipsoidSum, gammas: &[f64]) -> Result<SpdMatrix> {
    let n = scene.dim();
    let total = scene
        .terms()
        .iter()
        .zip(gammas)
        .fold(DMatrix::zeros(n, n), |acc, (t, g)| acc + t.shape_squared() * *g);
    SpdMatrix::from_positive_symmetrized(total)
}

/// Minimizer of `det A_γ` over pair weights `γ = (1 + 1/β, 1 + β)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BetaSolution {
    pub beta: f64,
    pub gammas: [f64; 2],
    pub residual: f64,
}

/// Eigenvalues `μ_j` of `A₁⁻²A₂²`, computed from the similar symmetric
/// matrix `A₁⁻¹A₂²A₁⁻¹`.
fn beta_spectrum(a1: &SpdMatrix, a2: &SpdMatrix) -> Result<Vec<f64>> {
    check_dims(a1.dim(), a2.dim())?;
    let m = a2.square().congruence(a1.inverse().matrix())?;
    Ok(m.eigen().eigenvalues.iter().copied().collect())
}

/// `Σ_j (1 − β²μ_j)/(1 + βμ_j)`, zero exactly at the optimal `β`.
pub fn beta_residual(a1: &SpdMatrix, a2: &SpdMatrix, beta: f64) -> Result<f64> {
    Ok(beta_sum(&beta_spectrum(a1, a2)?, beta))
}

fn beta_sum(mu: &[f64], beta: f64) -> f64 {
    mu.iter().map(|m| (1.0 - beta * beta * m) / (1.0 + beta * m)).sum()
}

/// Optimal pair weight `β`: stationarity of `log det(γ₁A₁² + γ₂A₂²)` along
/// `γ = (1 + 1/β, 1 + β)` reduces to `Σ(1 − β²μ_j)/(1 + βμ_j) = 0` with
/// `μ_j = λ_j(A₁⁻²A₂²)`. Each summand is decreasing and vanishes at
/// `β = μ_j^{-1/2}`, so the root is bracketed by `[μ_max^{-1/2}, μ_min^{-1/2}]`
/// and found by bisection.
pub fn optimal_beta(a1: &SpdMatrix, a2: &SpdMatrix) -> Result<BetaSolution> {
    let mu = beta_spectrum(a1, a2)?;
    let mu_min = mu.iter().copied().fold(f64::INFINITY, f64::min);
    let mu_max = mu.iter().copied().fold(0.0, f64::max);
    let mut lo = 1.0 / mu_max.sqrt();
    let mut hi = 1.0 / mu_min.sqrt();
    let mut beta = 0.5 * (lo + hi);
    for _ in 0..200 {
        if hi - lo <= 1e-14 * beta {
            break;
        }
        beta = 0.5 * (lo + hi);
        if beta_sum(&mu, beta) > 0.0 {
            lo = beta;
        } else {
            hi = beta;
        }
    }
    // Take whichever of the final bracket and midpoint has the smallest residual.
    beta = [lo, 0.5 * (lo + hi), hi]
        .into_iter()
        .min_by(|x, y| beta_sum(&mu, *x).abs().total_cmp(&beta_sum(&mu, *y).abs()))
        .expect("three candidates");
    Ok(BetaSolution {
        beta,
        gammas: [1.0 + 1.0 / beta, 1.0 + beta],
        residual: beta_sum(&mu, beta),
    })
}

/// `γ'_i = Σ_j √tr(A_j²) / √tr(A_i²)`.
pub fn heuristic_gammas(scene: &EllipsoidSum) -> Vec<f64> {
    let norms: Vec<f64> = scene.shapes().map(|a| a.matrix().norm()).collect();
    let total: f64 = norms.iter().sum();
    norms.iter().map(|t| total / t).collect()
}

/// Search settings for [`minvol_outer`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinVolBudget {
    /// Sphere resolution of the coarse grid; `None` picks at least 360
    /// directions in the plane and 1000 in space.
    pub grid_resolution: Option<usize>,
    pub search: SearchBudget,
}

impl Default for MinVolBudget {
    fn default() -> Self {
        Self {
            grid_resolution: None,
            search: SearchBudget::default(),
        }
    }
}

/// Outer ellipsoid `A(l)` chosen by [`minvol_outer`].
#[derive(Debug, Clone, PartialEq)]
pub struct MinVolOuter {
    pub direction: DVector<f64>,
    pub gammas: Vec<f64>,
    pub matrix: SpdMatrix,
}

/// Weights `γ_i(l) = h(l)/‖A_i l‖`, which satisfy `Σ1/γ_i = 1` identically.
pub fn direction_gammas(scene: &EllipsoidSum, l: &DVector<f64>) -> Vec<f64> {
    let h = scene.support(l);
    scene.terms().iter().map(|t| h / t.support(l)).collect()
}

fn log_det(m: DMatrix<f64>) -> f64 {
    match m.cholesky() {
        Some(c) => 2.0 * c.l_dirty().diagonal().iter().map(|d| d.ln()).sum::<f64>(),
        None => f64::INFINITY,
    }
}

/// `½ log det(Σγ_i A_i²)` without the constraint check.
fn log_det_outer(scene: &EllipsoidSum, gammas: &[f64]) -> f64 {
    let n = scene.dim();
    let total = scene
        .terms()
        .iter()
        .zip(gammas)
        .fold(DMatrix::zeros(n, n), |acc, (t, g)| acc + t.shape_squared() * *g);
    0.5 * log_det(total)
}

/// Minimum-volume member of `A(l) = (Σ‖A_j l‖)^{1/2}(ΣA_i²/‖A_i l‖)^{1/2}`
/// over unit `l`: coarse sphere grid, then Nelder–Mead from the best starts.
/// `A(l)` is even in `l`.
pub fn minvol_outer(scene: &EllipsoidSum, budget: MinVolBudget) -> Result<MinVolOuter> {
    let grid = match budget.grid_resolution {
        Some(r) => build_quadrature(scene.dim(), r)?,
        None => search_grid(scene.dim())?,
    };
    let objective = |l: &DVector<f64>| log_det_outer(scene, &direction_gammas(scene, l));
    let (l, _) = sphere_minimize(objective, grid.nodes(), budget.search);
    let gammas = direction_gammas(scene, &l);
    let matrix = gamma_matrix_unchecked(scene, &gammas)?.sqrt();
    Ok(MinVolOuter {
        direction: l,
        gammas,
        matrix,
    })
}

/// Nelder–Mead directly on the weights, `1/γ_i = softmax(z)_i`, from `start`.
/// Returns the refined weights, or `start` if nothing better was found.
pub fn refine_outer_gammas(scene: &EllipsoidSum, start: &[f64]) -> Vec<f64> {
    let m = start.len();
    if m < 2 {
        return start.to_vec();
    }
    let to_gammas = |z: &[f64]| -> Vec<f64> {
        let max = z.iter().copied().fold(0.0, f64::max);
        let e: Vec<f64> = (0..m).map(|i| (if i < m - 1 { z[i] } else { 0.0 } - max).exp()).collect();
        let total: f64 = e.iter().sum();
        e.iter().map(|w| total / w).collect()
    };
    let z0: Vec<f64> = (0..m - 1).map(|i| start[m - 1].ln() - start[i].ln()).collect();
    let (z, v) = nelder_mead(|z| log_det_outer(scene, &to_gammas(z)), &z0, 0.05, 2000, 1e-15);
    if v < log_det_outer(scene, start) {
        to_gammas(&z)
    } else {
        start.to_vec()
    }
}

/// Smallest-determinant outer matrix found among: [`minvol_outer`], the
/// [`optimal_beta`] weights for pairs, the heuristic weights, and
/// [`refine_outer_gammas`] from the best of those. Returns the weights too.
pub fn optimal_outer(scene: &EllipsoidSum) -> Result<(Vec<f64>, SpdMatrix)> {
    let mut outers: Vec<Vec<f64>> = Vec::new();
    if scene.len() == 1 {
        outers.push(vec![1.0]);
    } else {
        outers.push(minvol_outer(scene, MinVolBudget::default())?.gammas);
        if scene.len() == 2 {
            let shapes: Vec<&SpdMatrix> = scene.shapes().collect();
            outers.push(optimal_beta(shapes[0], shapes[1])?.gammas.to_vec());
        }
        outers.push(heuristic_gammas(scene));
        let best = pick_min(scene, &outers);
        outers.push(refine_outer_gammas(scene, &outers[best]));
    }
    let best = pick_min(scene, &outers);
    let gammas = outers.swap_remove(best);
    let matrix = gamma_matrix_unchecked(scene, &gammas)?.sqrt();
    Ok((gammas, matrix))
}

/// Volume bounds from inner and outer ellipsoids.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub inner_sum: SpdMatrix,
    pub inner_john: SpdMatrix,
    pub outer_optimal: SpdMatrix,
    pub outer_optimal_gammas: Vec<f64>,
    pub outer_heuristic: SpdMatrix,
    pub outer_heuristic_gammas: Vec<f64>,
    pub lower_volume: f64,
    pub upper_volume: f64,
    /// Volume of the sum by the divergence theorem on the supplied rule.
    pub divergence_volume: f64,
    /// `N`-th roots of the volumes of the sum (exact in the plane), the John
    /// ellipsoid, `E_{ΣA_i}`, and the sum of the terms' own roots.
    pub bm_chain: [f64; 4],
}

/// Serialized form of a [`BoundReport`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundSummary {
    pub inner_sum_det: f64,
    pub inner_john_det: f64,
    pub outer_optimal_det: f64,
    pub outer_heuristic_det: f64,
    pub lower_volume: f64,
    pub upper_volume: f64,
    pub bm_chain: [f64; 4],
}

impl BoundReport {
    pub fn summary(&self) -> BoundSummary {
        BoundSummary {
            inner_sum_det: self.inner_sum.det(),
            inner_john_det: self.inner_john.det(),
            outer_optimal_det: self.outer_optimal.det(),
            outer_heuristic_det: self.outer_heuristic.det(),
            lower_volume: self.lower_volume,
            upper_volume: self.upper_volume,
            bm_chain: self.bm_chain,
        }
    }
}

/// Inner and outer bounds for any scene, with the divergence-theorem volume
/// on `quad` as reference. The outer matrix comes from [`optimal_outer`].
pub fn volume_bounds(scene: &EllipsoidSum, quad: &SphereQuadrature) -> Result<BoundReport> {
    check_dims(scene.dim(), quad.dim())?;
    let n = scene.dim();
    let vb = unit_ball_volume(n);
    let inner_sum = inner_sum_matrix(scene);
    let inner_john = john_inner_recursive(scene)?;

    let heuristic = heuristic_gammas(scene);
    let outer_heuristic = gamma_matrix_unchecked(scene, &heuristic)?.sqrt();

    let (outer_optimal_gammas, outer_optimal) = optimal_outer(scene)?;

    let lower_volume = vb * inner_sum.det().max(inner_john.det());
    let upper_volume = vb * outer_optimal.det().min(outer_heuristic.det());
    let divergence_volume = volume_divergence(scene, quad)?;
    if !(lower_volume <= divergence_volume * (1.0 + 1e-9) && divergence_volume <= upper_volume * (1.0 + 1e-9)) {
        log::warn!(
            "volume {divergence_volume:.12e} outside bounds [{lower_volume:.12e}, {upper_volume:.12e}]; quadrature may be under-resolved"
        );
    }
    let singles: f64 = scene.shapes().map(|a| (vb * a.det()).powf(1.0 / n as f64)).sum();
    let root = |v: f64| v.powf(1.0 / n as f64);
    // The planar area is exact; quadrature can be far off for crossed thin terms.
    let volume = if n == 2 { area_sum_2d_recursive(scene)? } else { divergence_volume };
    let bm_chain = [
        root(volume),
        root(vb * inner_john.det()),
        root(vb * inner_sum.det()),
        singles,
    ];
    Ok(BoundReport {
        inner_sum,
        inner_john,
        outer_optimal,
        outer_optimal_gammas,
        outer_heuristic,
        outer_heuristic_gammas: heuristic,
        lower_volume,
        upper_volume,
        divergence_volume,
        bm_chain,
    })
}

fn pick_min(scene: &EllipsoidSum, candidates: &[Vec<f64>]) -> usize {
    let mut best = 0;
    let mut best_val = f64::INFINITY;
    for (i, g) in candidates.iter().enumerate() {
        let v = log_det_outer(scene, g);
        if v < best_val {
            best = i;
            best_val = v;
        }
    }
    best
}

/// Lower-bound chain for a pair, in units of `Vol^{1/N}`:
///
/// ```text
/// Vol(E₁+E₂)^{1/N} ≥ (V_B det F)^{1/N} ≥ (V_B det(A₁+A₂))^{1/N} ≥ Vol(E₁)^{1/N} + Vol(E₂)^{1/N}
/// ```
///
/// The first entry is the exact area in the plane and the divergence-theorem
/// volume at the default resolution otherwise.
pub fn brunn_minkowski_chain(a1: &SpdMatrix, a2: &SpdMatrix) -> Result<[f64; 4]> {
    check_dims(a1.dim(), a2.dim())?;
    let n = a1.dim();
    let vb = unit_ball_volume(n);
    let volume = if n == 2 {
        area_sum_2d_pair(a1, a2)?
    } else {
        let scene = EllipsoidSum::from_shapes([a1.clone(), a2.clone()])?;
        volume_divergence(&scene, &build_quadrature(n, default_resolution(n))?)?
    };
    let root = |v: f64| v.powf(1.0 / n as f64);
    Ok([
        root(volume),
        root(vb * john_inner_pair(a1, a2)?.det()),
        root(vb * a1.add(a2)?.det()),
        root(vb * a1.det()) + root(vb * a2.det()),
    ])
}
