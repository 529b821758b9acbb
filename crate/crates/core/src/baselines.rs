//! Reference algorithms the iterative method is measured against.
//!
//! * [`hpsm_hrep`] + [`exact_force_polytope`]: the exact pipeline. The
//!   hyperplane shifting method gives the H-rep of the zonotope `{B y}`;
//!   composing it with `A` and enumerating vertices through the dual hull
//!   gives the exact V-rep of `P_x`. Cost grows combinatorially in `d`.
//! * [`rsm_approximate`]: ray shooting, one LP per direction of a fixed
//!   Euler-angle grid. Inner approximation without an error bound.
//! * [`support_oracle`] and [`corner_map_oracle`]: brute-force references
//!   used by the test suites.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chull::{HullState, DEFAULT_REL_COPLANAR_TOL};
use crate::error::{Error, Result};
use crate::ichm::{ExplicitForm, FeasibilityProblem};
use crate::lp::{self, LinearProgram, LpStatus};
use crate::numerics::{bbox_diagonal, svd_split, DEFAULT_RANK_TOL_FACTOR};

/// Cap on hyperplane candidates `C(d, n - 1)` for [`hpsm_hrep`].
pub const HPSM_CANDIDATE_LIMIT: u128 = 1_000_000;
/// Largest `d` accepted by [`corner_map_oracle`].
pub const CORNER_ORACLE_MAX_D: usize = 14;

/// Half-space representation `normals * x <= offsets`.
#[derive(Debug, Clone, PartialEq)]
pub struct HRep {
    pub normals: DMatrix<f64>,
    pub offsets: DVector<f64>,
}

impl HRep {
    pub fn len(&self) -> usize {
        self.offsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.offsets.is_empty()
    }

    /// Largest violation `max_i (h_i . p - d_i)`.
    pub fn violation(&self, p: &DVector<f64>) -> f64 {
        (&self.normals * p - &self.offsets).max()
    }
}

/// Ray directions from a two-Euler-angle grid with step `delta_deg` on both
/// angles.
#[derive(Debug, Clone)]
pub struct RayGrid {
    pub delta_deg: f64,
    /// Distinct unit directions.
    pub directions: Vec<DVector<f64>>,
    /// Grid size before merging coincident directions, `(360 / delta)^2`.
    pub raw_count: usize,
}

impl RayGrid {
    pub fn new(delta_deg: f64) -> Result<Self> {
        if !(delta_deg > 0.0 && delta_deg <= 180.0) {
            return Err(Error::InvalidArgument(format!(
                "grid step must lie in (0, 180] degrees, got {delta_deg}"
            )));
        }
        let steps = Float::round(360.0 / delta_deg) as usize;
        let step = Float::to_radians(360.0 / steps as f64);
        let mut directions: Vec<DVector<f64>> = Vec::new();
        for i in 0..steps {
            let yaw = i as f64 * step;
            for j in 0..steps {
                let pitch = j as f64 * step;
                let c = DVector::from_vec(vec![
                    Float::cos(yaw) * Float::cos(pitch),
                    Float::sin(yaw) * Float::cos(pitch),
                    Float::sin(pitch),
                ]);
                if directions.iter().all(|e| (e - &c).norm() > 1e-9) {
                    directions.push(c);
                }
            }
        }
        Ok(Self {
            delta_deg,
            directions,
            raw_count: steps * steps,
        })
    }
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Lexicographic `k`-subsets of `0..n`.
fn for_each_subset(n: usize, k: usize, mut f: impl FnMut(&[usize]) -> Result<()>) -> Result<()> {
    if k > n {
        return Ok(());
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx)?;
        let Some(pos) = (0..k).rev().find(|&i| idx[i] != i + n - k) else {
            return Ok(());
        };
        idx[pos] += 1;
        for i in pos + 1..k {
            idx[i] = idx[i - 1] + 1;
        }
    }
}

/// Exact H-rep of the zonotope `{B y | y_lo <= y <= y_hi}` by hyperplane
/// shifting: every `(n - 1)`-subset of generators spans a candidate facet
/// direction; its normal is shifted out to the zonotope support.
pub fn hpsm_hrep(b: &DMatrix<f64>, y_lo: &DVector<f64>, y_hi: &DVector<f64>) -> Result<HRep> {
    let (n, d) = b.shape();
    if y_lo.len() != d || y_hi.len() != d {
        return Err(Error::Dimension(format!(
            "B has {d} columns but bounds have {} and {} entries",
            y_lo.len(),
            y_hi.len()
        )));
    }
    if n == 0 {
        return Err(Error::Dimension("B has no rows".into()));
    }
    if b.iter().chain(y_lo.iter()).chain(y_hi.iter()).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }

    let center = b * ((y_lo + y_hi) * 0.5);
    let generators: Vec<DVector<f64>> = (0..d)
        .filter(|&j| y_hi[j] > y_lo[j])
        .map(|j| b.column(j) * (0.5 * (y_hi[j] - y_lo[j])))
        .filter(|g| g.amax() > 0.0)
        .collect();
    let candidates = binomial(generators.len(), n - 1);
    if candidates > HPSM_CANDIDATE_LIMIT {
        return Err(Error::ComplexityGuard {
            candidates,
            limit: HPSM_CANDIDATE_LIMIT,
        });
    }

    let mut planes: Vec<(DVector<f64>, f64)> = Vec::new();
    let mut push_pair = |normal: DVector<f64>| {
        let spread: f64 = generators.iter().map(|g| normal.dot(g).abs()).sum();
        let c = normal.dot(&center);
        planes.push((normal.clone(), c + spread));
        planes.push((-normal, -c + spread));
    };

    if n == 1 {
        push_pair(DVector::from_element(1, 1.0));
    } else {
        let mut sub = DMatrix::<f64>::zeros(n, n - 1);
        for_each_subset(generators.len(), n - 1, |subset| {
            for (k, &j) in subset.iter().enumerate() {
                sub.set_column(k, &generators[j]);
            }
            let split = svd_split(&sub, DEFAULT_RANK_TOL_FACTOR)?;
            if split.rank() == n - 1 {
                push_pair(split.null_basis.column(0).into_owned());
            }
            Ok(())
        })?;
    }

    let mut normals = DMatrix::zeros(planes.len(), n);
    let mut offsets = DVector::zeros(planes.len());
    for (i, (h, o)) in planes.into_iter().enumerate() {
        normals.set_row(i, &h.transpose());
        offsets[i] = o;
    }
    Ok(HRep { normals, offsets })
}

/// Vertices of `{x | normals * x <= offsets}` in `m <= 3` dimensions via the
/// dual hull: rows become points `h_i / (d_i - h_i . x0)` about an interior
/// point `x0`, and each face of their hull is one primal vertex.
pub fn hrep_vertices(hrep: &HRep) -> Result<Vec<DVector<f64>>> {
    let m = hrep.normals.ncols();
    if !(1..=3).contains(&m) {
        return Err(Error::Dimension(format!(
            "vertex enumeration supports 1 to 3 dimensions, got {m}"
        )));
    }
    if hrep.normals.nrows() != hrep.offsets.len() {
        return Err(Error::Dimension("H-rep rows and offsets differ in length".into()));
    }

    // Unit rows; zero rows are either redundant or make the set empty.
    let mut rows: Vec<(DVector<f64>, f64)> = Vec::new();
    for i in 0..hrep.len() {
        let h = hrep.normals.row(i).transpose();
        let norm = h.norm();
        if norm <= 1e-14 {
            if hrep.offsets[i] < 0.0 {
                return Err(Error::Infeasible);
            }
            continue;
        }
        rows.push((h / norm, hrep.offsets[i] / norm));
    }

    let (x0, radius) = chebyshev_center(&rows, m)?;
    let scale = rows.iter().fold(1.0, |acc: f64, (_, o)| acc.max(o.abs()));
    if radius <= 1e-10 * scale {
        return Err(Error::DegenerateInput {
            dim: m - 1,
            required: m,
        });
    }

    let dual: Vec<DVector<f64>> = rows
        .iter()
        .map(|(h, o)| h / (o - h.dot(&x0)))
        .collect();
    let hull = match HullState::build(&dual, DEFAULT_REL_COPLANAR_TOL) {
        Ok(h) => h,
        Err(Error::DegenerateInput { .. }) => return Err(Error::UnboundedRegion),
        Err(e) => return Err(e),
    };
    let min_offset = hull.faces().iter().map(|f| f.offset).fold(f64::INFINITY, f64::min);
    if min_offset <= hull.coplanar_tol() {
        return Err(Error::UnboundedRegion);
    }

    let mut vertices: Vec<DVector<f64>> = Vec::new();
    for f in hull.faces() {
        let v = &x0 + &f.normal / f.offset;
        vertices.push(v);
    }
    Ok(dedup_points(vertices, 1e-9))
}

/// Center and radius of the largest ball inside unit-row half-spaces,
/// through the dual program `min d^T l  s.t.  H^T l = 0, 1^T l = 1, l >= 0`
/// whose row multipliers are `(-x0, -r)`.
fn chebyshev_center(rows: &[(DVector<f64>, f64)], m: usize) -> Result<(DVector<f64>, f64)> {
    let k = rows.len();
    if k == 0 {
        return Err(Error::UnboundedRegion);
    }
    let mut eq = DMatrix::zeros(m + 1, k);
    for (j, (h, _)) in rows.iter().enumerate() {
        for i in 0..m {
            eq[(i, j)] = h[i];
        }
        eq[(m, j)] = 1.0;
    }
    let mut rhs = vec![0.0; m + 1];
    rhs[m] = 1.0;
    let program = LinearProgram {
        objective: rows.iter().map(|(_, o)| -o).collect(),
        eq_matrix: eq,
        eq_rhs: rhs,
        lower: vec![0.0; k],
        upper: vec![f64::INFINITY; k],
    };
    let solution = lp::solve(&program, lp::DEFAULT_TOL)?;
    match solution.status {
        LpStatus::Optimal => {
            let x0 = DVector::from_iterator(m, solution.duals[..m].iter().map(|v| -v));
            let radius = -solution.duals[m];
            Ok((x0, radius))
        }
        // No convex combination of normals cancels: the region is unbounded.
        LpStatus::Infeasible => Err(Error::UnboundedRegion),
        LpStatus::Unbounded => Err(Error::Infeasible),
    }
}

/// Exact V-rep of `{f | J^T f in P_tau}` given the H-rep of `P_tau`.
pub fn exact_force_polytope(jacobian_t: &DMatrix<f64>, torque: &HRep) -> Result<Vec<DVector<f64>>> {
    if torque.normals.ncols() != jacobian_t.nrows() {
        return Err(Error::Dimension(format!(
            "torque H-rep lives in R^{}, J^T maps into R^{}",
            torque.normals.ncols(),
            jacobian_t.nrows()
        )));
    }
    let split = svd_split(jacobian_t, DEFAULT_RANK_TOL_FACTOR)?;
    if split.rank() < jacobian_t.ncols() {
        return Err(Error::RankDeficient {
            rank: split.rank(),
            required: jacobian_t.ncols(),
        });
    }
    let composed = HRep {
        normals: &torque.normals * jacobian_t,
        offsets: torque.offsets.clone(),
    };
    hrep_vertices(&composed)
}

/// The exact pipeline on a feasibility problem: HPSM on `B`, then vertex
/// enumeration through `A`.
pub fn hpsm_pipeline(problem: &FeasibilityProblem) -> Result<Vec<DVector<f64>>> {
    problem.validate()?;
    let torque = hpsm_hrep(&problem.b, &problem.y_lo, &problem.y_hi)?;
    exact_force_polytope(&problem.a, &torque)
}

/// One LP per grid direction; the deduplicated optima.
pub fn rsm_approximate(problem: &FeasibilityProblem, grid: &RayGrid) -> Result<Vec<DVector<f64>>> {
    if problem.output_dim() != 3 {
        return Err(Error::Dimension(format!(
            "ray shooting grid is three-dimensional, problem has m = {}",
            problem.output_dim()
        )));
    }
    let form = ExplicitForm::new(problem, lp::DEFAULT_TOL)?;
    let mut points = Vec::with_capacity(grid.directions.len());
    for c in &grid.directions {
        points.push(form.support(c)?.x);
    }
    Ok(dedup_points(points, 1e-9))
}

/// Exact support values `max c . x` over `P_x`, one per direction.
pub fn support_oracle(form: &ExplicitForm, directions: &[DVector<f64>]) -> Result<Vec<f64>> {
    directions.iter().map(|c| form.support(c).map(|sp| sp.value)).collect()
}

/// `max_c (support(c) - max_v c . v)`: how far the hull of `vertices` falls
/// short of the true polytope over the probed directions.
pub fn max_underestimation(
    support: &[f64],
    directions: &[DVector<f64>],
    vertices: &[DVector<f64>],
) -> f64 {
    support
        .iter()
        .zip(directions)
        .map(|(s, c)| {
            let hull_support = vertices
                .iter()
                .map(|v| c.dot(v))
                .fold(f64::NEG_INFINITY, f64::max);
            s - hull_support
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Smallest `|map y - x|_1` over inputs `y` in the box with
/// `constraint y = 0`; zero (up to LP tolerance) iff `x` is in `P_x`.
pub fn membership_gap(form: &ExplicitForm, x: &DVector<f64>) -> Result<f64> {
    let m = form.output_dim();
    if x.len() != m {
        return Err(Error::Dimension(format!(
            "point has {} entries, output space is R^{m}",
            x.len()
        )));
    }
    let d = form.map.ncols();
    let k = form.constraint.nrows();
    let vars = d + 2 * m;
    let mut eq = DMatrix::zeros(k + m, vars);
    eq.view_mut((0, 0), (k, d)).copy_from(&form.constraint);
    eq.view_mut((k, 0), (m, d)).copy_from(&form.map);
    for i in 0..m {
        eq[(k + i, d + i)] = -1.0;
        eq[(k + i, d + m + i)] = 1.0;
    }
    let mut rhs = vec![0.0; k + m];
    rhs[k..].copy_from_slice(x.as_slice());
    let mut objective = vec![0.0; vars];
    objective[d..].iter_mut().for_each(|c| *c = -1.0);
    let mut lower = vec![0.0; vars];
    let mut upper = vec![f64::INFINITY; vars];
    lower[..d].copy_from_slice(form.y_lo.as_slice());
    upper[..d].copy_from_slice(form.y_hi.as_slice());
    let program = LinearProgram {
        objective,
        eq_matrix: eq,
        eq_rhs: rhs,
        lower,
        upper,
    };
    let solution = lp::solve(&program, lp::DEFAULT_TOL)?;
    match solution.status {
        LpStatus::Optimal => Ok(-solution.objective_value),
        LpStatus::Infeasible => Err(Error::Infeasible),
        LpStatus::Unbounded => Err(Error::Unbounded),
    }
}

/// Hull vertices of `{A^-1 B c}` over all box corners `c`.
pub fn corner_map_oracle(
    a: &DMatrix<f64>,
    b: &DMatrix<f64>,
    y_lo: &DVector<f64>,
    y_hi: &DVector<f64>,
) -> Result<Vec<DVector<f64>>> {
    let (n, m) = a.shape();
    let d = b.ncols();
    if n != m || m > 3 || b.nrows() != n || y_lo.len() != d || y_hi.len() != d {
        return Err(Error::Dimension(format!(
            "corner oracle needs square A (m <= 3) and matching B, got A {n}x{m}, B {}x{d}",
            b.nrows()
        )));
    }
    if d > CORNER_ORACLE_MAX_D {
        return Err(Error::ComplexityGuard {
            candidates: 1u128 << d,
            limit: 1u128 << CORNER_ORACLE_MAX_D,
        });
    }
    let inv = a
        .clone()
        .try_inverse()
        .ok_or(Error::RankDeficient { rank: m - 1, required: m })?;
    let map = inv * b;
    let corners: Vec<DVector<f64>> = (0..1usize << d)
        .map(|mask| {
            let y = DVector::from_fn(d, |j, _| if mask >> j & 1 == 1 { y_hi[j] } else { y_lo[j] });
            &map * y
        })
        .collect();
    Ok(HullState::build(&corners, DEFAULT_REL_COPLANAR_TOL)?.vertices())
}

/// `count` unit vectors drawn uniformly from the sphere in `R^m`.
pub fn random_unit_directions(seed: u64, count: usize, m: usize) -> Vec<DVector<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let v = DVector::from_fn(m, |_, _| rng.random_range(-1.0..1.0));
        let norm = v.norm();
        if norm > 1e-3 && norm <= 1.0 {
            out.push(v / norm);
        }
    }
    out
}

/// Drops points within `rel_tol * diagonal` of an earlier one.
pub fn dedup_points(points: Vec<DVector<f64>>, rel_tol: f64) -> Vec<DVector<f64>> {
    let tol = rel_tol * bbox_diagonal(&points).max(f64::MIN_POSITIVE);
    let mut out: Vec<DVector<f64>> = Vec::new();
    for p in points {
        if out.iter().all(|q| (q - &p).norm() > tol) {
            out.push(p);
        }
    }
    out
}
