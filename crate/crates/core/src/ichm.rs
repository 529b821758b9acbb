//! Iterative convex-hull evaluation of
//!
//! ```text
//! P_x = { x in R^m | A x = B y,  y_lo <= y <= y_hi }
//! ```
//!
//! to a user-chosen accuracy `eps`.
//!
//! The implicit set is made explicit through the SVD of `A`: `x = A^+ B y`
//! holds exactly when `B y` lies in the image of `A`, i.e. `U2^T B y = 0`.
//! The support function of `P_x` in a direction `c` is then a bounded LP in
//! `y` (see [`ExplicitForm::support`]).
//!
//! Starting from the LP optima along `±v_i` (right singular vectors of `A`),
//! the method repeatedly takes every new face of the current hull, pushes an
//! LP along its outward normal and either accepts the optimum as a new vertex
//! (when it sits at least `eps` beyond the face) or records the face plane as
//! a half-space of the result. It stops when a full pass yields no vertex.
//!
//! Passing every face test only bounds the gap along face normals. With
//! [`EvaluateOptions::certify`] each hull vertex (and edge, for `m = 3`) is
//! then checked: its normal cone, cut by the measured face supports, bounds
//! how far the true set can reach beyond it. Features whose bound exceeds
//! `eps` get one more LP, and the face passes resume if that finds a vertex.
//! The returned hull is then within `eps` of `P_x` in every direction.

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chull::{HullState, InsertOutcome, DEFAULT_REL_COPLANAR_TOL, DEFAULT_REL_MERGE_TOL};
use crate::error::{Error, Result};
use crate::lp::{self, LinearProgram, LpOptions, LpStatus};
use crate::numerics::{
    affine_dimension, bbox_diagonal, is_finite, orthonormal_columns, pseudo_inverse, sorted_svd, svd_split,
    DEFAULT_RANK_TOL_FACTOR,
};

/// `A x = B y` with `y` in the box `[y_lo, y_hi]`.
#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityProblem {
    /// `n x m`.
    pub a: DMatrix<f64>,
    /// `n x d`.
    pub b: DMatrix<f64>,
    pub y_lo: DVector<f64>,
    pub y_hi: DVector<f64>,
}

impl FeasibilityProblem {
    pub fn new(
        a: DMatrix<f64>,
        b: DMatrix<f64>,
        y_lo: DVector<f64>,
        y_hi: DVector<f64>,
    ) -> Result<Self> {
        let problem = Self { a, b, y_lo, y_hi };
        problem.validate()?;
        Ok(problem)
    }

    /// Output dimension `m`.
    pub fn output_dim(&self) -> usize {
        self.a.ncols()
    }

    pub fn input_dim(&self) -> usize {
        self.b.ncols()
    }

    pub fn validate(&self) -> Result<()> {
        let (n, m) = self.a.shape();
        let d = self.b.ncols();
        if self.b.nrows() != n {
            return Err(Error::Dimension(format!(
                "A has {n} rows but B has {}",
                self.b.nrows()
            )));
        }
        if self.y_lo.len() != d || self.y_hi.len() != d {
            return Err(Error::Dimension(format!(
                "B has {d} columns but bounds have {} and {} entries",
                self.y_lo.len(),
                self.y_hi.len()
            )));
        }
        if !(d >= n && n >= m && m >= 1) {
            return Err(Error::Dimension(format!(
                "expected d >= n >= m >= 1, got d={d}, n={n}, m={m}"
            )));
        }
        if !is_finite(&self.a)
            || !is_finite(&self.b)
            || self.y_lo.iter().chain(self.y_hi.iter()).any(|v| !v.is_finite())
        {
            return Err(Error::NonFinite);
        }
        if let Some(j) = (0..d).find(|&j| self.y_lo[j] > self.y_hi[j]) {
            return Err(Error::InvalidArgument(format!(
                "y_lo exceeds y_hi at index {j}"
            )));
        }
        Ok(())
    }
}

/// One LP optimum: the output point, the input that realizes it and the
/// support value `c . x`.
#[derive(Debug, Clone)]
pub struct SupportPoint {
    pub value: f64,
    pub x: DVector<f64>,
    pub y: DVector<f64>,
    /// Optimal simplex basis, reusable as a warm start for other directions.
    pub basis: Option<lp::Basis>,
}

/// The explicit LP form of a [`FeasibilityProblem`]: `x = map * y` subject
/// to `constraint * y = 0` and the box.
#[derive(Debug, Clone)]
pub struct ExplicitForm {
    /// `A^+ B`, `m x d`.
    pub map: DMatrix<f64>,
    /// `U2^T B`, `(n - r) x d`.
    pub constraint: DMatrix<f64>,
    /// Right singular vectors of `A`, `m x m`.
    pub input_basis: DMatrix<f64>,
    pub y_lo: DVector<f64>,
    pub y_hi: DVector<f64>,
    pub lp_options: LpOptions,
}

impl ExplicitForm {
    pub fn new(problem: &FeasibilityProblem, lp_tol: f64) -> Result<Self> {
        problem.validate()?;
        let split = svd_split(&problem.a, DEFAULT_RANK_TOL_FACTOR)?;
        let pinv = pseudo_inverse(&problem.a, &split)?;
        Ok(Self {
            map: pinv * &problem.b,
            constraint: split.null_basis.transpose() * &problem.b,
            input_basis: split.input_basis,
            y_lo: problem.y_lo.clone(),
            y_hi: problem.y_hi.clone(),
            lp_options: LpOptions {
                tol: lp_tol,
                max_iterations: None,
            },
        })
    }

    pub fn output_dim(&self) -> usize {
        self.map.nrows()
    }

    /// The y-space program maximizing `c^T A^+ B y`.
    pub fn program(&self, direction: &DVector<f64>) -> LinearProgram {
        let objective = self.map.tr_mul(direction);
        LinearProgram {
            objective: objective.iter().copied().collect(),
            eq_matrix: self.constraint.clone(),
            eq_rhs: vec![0.0; self.constraint.nrows()],
            lower: self.y_lo.iter().copied().collect(),
            upper: self.y_hi.iter().copied().collect(),
        }
    }

    /// Support point of `P_x` in `direction`. `Error::Infeasible` means the
    /// image constraint cuts the box to the empty set.
    pub fn support(&self, direction: &DVector<f64>) -> Result<SupportPoint> {
        self.support_from(direction, None)
    }

    /// [`support`](Self::support) warm-started from an earlier optimal basis.
    pub fn support_from(&self, direction: &DVector<f64>, warm: Option<&lp::Basis>) -> Result<SupportPoint> {
        if direction.len() != self.output_dim() {
            return Err(Error::Dimension(format!(
                "direction has {} entries, output space has {}",
                direction.len(),
                self.output_dim()
            )));
        }
        let program = self.program(direction);
        let solution = match warm {
            Some(basis) => lp::solve_warm(&program, &self.lp_options, basis)?,
            None => lp::solve_with(&program, &self.lp_options)?,
        };
        match solution.status {
            LpStatus::Optimal => {
                let y = DVector::from_vec(solution.y_star.expect("optimal LP carries a point"));
                let x = &self.map * &y;
                Ok(SupportPoint {
                    value: direction.dot(&x),
                    x,
                    y,
                    basis: solution.basis,
                })
            }
            LpStatus::Infeasible => Err(Error::Infeasible),
            LpStatus::Unbounded => Err(Error::Unbounded),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolytopeStatus {
    Converged,
    /// The feasible set spans fewer than `m` dimensions.
    Degenerate,
    /// The image constraint leaves no feasible input.
    Empty,
}

#[derive(Debug, Clone)]
pub struct PolytopeResult {
    /// V-rep.
    pub vertices: Vec<DVector<f64>>,
    /// H-rep rows, one outward unit normal per row.
    pub hrep_normals: DMatrix<f64>,
    pub hrep_offsets: DVector<f64>,
    /// Largest face deficit left on the final hull.
    pub achieved_eps: f64,
    pub lp_count: usize,
    pub iterations: usize,
    pub status: PolytopeStatus,
    /// Largest live-face deficit after each pass.
    pub eps_history: Vec<f64>,
    /// Faces the hull created over the run, including its initial faces.
    pub faces_created: usize,
    /// LPs spent outside the face tests: initial probes beyond the first
    /// `2m` and certification probes.
    pub probe_lp_count: usize,
}

impl PolytopeResult {
    fn empty(m: usize, lp_count: usize, status: PolytopeStatus) -> Self {
        Self {
            vertices: Vec::new(),
            hrep_normals: DMatrix::zeros(0, m),
            hrep_offsets: DVector::zeros(0),
            achieved_eps: 0.0,
            lp_count,
            iterations: 0,
            status,
            eps_history: Vec::new(),
            faces_created: 0,
            probe_lp_count: lp_count.saturating_sub(2 * m),
        }
    }
}

#[derive(Debug, Clone, thiserror::Error)]
pub enum EvaluateError {
    #[error(transparent)]
    Problem(#[from] Error),
    #[error("iteration or LP budget exhausted after {} LPs", .0.lp_count)]
    IterationLimit(Box<PolytopeResult>),
}

#[derive(Debug, Clone, Copy)]
pub struct EvaluateOptions {
    pub eps: f64,
    pub max_iterations: usize,
    pub max_lp: usize,
    pub lp_tol: f64,
    pub rel_coplanar_tol: f64,
    /// Seed for the fallback directions used on flat initial vertex sets.
    pub seed: u64,
    /// After the face passes converge, bound the distance from the hull to
    /// the outer polytope cut by the measured face supports, and probe
    /// wherever it exceeds `eps`. Without it only the face-normal deficits
    /// are bounded.
    pub certify: bool,
}

impl EvaluateOptions {
    pub fn with_eps(eps: f64) -> Self {
        Self {
            eps,
            ..Self::default()
        }
    }
}

impl Default for EvaluateOptions {
    fn default() -> Self {
        Self {
            eps: 1.0,
            max_iterations: 1_000,
            max_lp: 1_000_000,
            lp_tol: lp::DEFAULT_TOL,
            rel_coplanar_tol: DEFAULT_REL_COPLANAR_TOL,
            seed: 0x1c4d_5eed,
            certify: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct InitialVertices {
    pub points: Vec<DVector<f64>>,
    pub witnesses: Vec<DVector<f64>>,
    pub lp_count: usize,
    /// Affine dimension spanned by `points`.
    pub affine_dim: usize,
}

/// LP optima along `±v_i` for each right singular vector of `A`,
/// deduplicated. Flat sets get one retry with random orthonormal directions.
/// `Error::Infeasible` signals an empty polytope.
pub fn initial_vertices(form: &ExplicitForm, options: &EvaluateOptions) -> Result<InitialVertices> {
    let m = form.output_dim();
    let mut init = InitialVertices {
        points: Vec::new(),
        witnesses: Vec::new(),
        lp_count: 0,
        affine_dim: 0,
    };
    let directions: Vec<DVector<f64>> = form.input_basis.column_iter().map(|c| c.into_owned()).collect();
    push_axis_optima(form, &directions, &mut init)?;
    init.affine_dim = spanned_dim(&init.points, options.rel_coplanar_tol);

    if init.affine_dim < m {
        let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
        let raw: Vec<DVector<f64>> = (0..m)
            .map(|_| DVector::from_fn(m, |_, _| rng.random_range(-1.0..1.0)))
            .collect();
        let extra = orthonormal_columns(&raw);
        push_axis_optima(form, &extra, &mut init)?;
        init.affine_dim = spanned_dim(&init.points, options.rel_coplanar_tol);
    }

    // Thin polytopes can return the same few extremes in every probed
    // direction. Probing the normals of the current affine span either finds
    // an off-span point or certifies that the set is flat.
    for _ in 0..m {
        if init.affine_dim >= m {
            break;
        }
        let normals = span_complement(&init.points, init.affine_dim);
        let before = init.points.len();
        push_axis_optima(form, &normals, &mut init)?;
        init.affine_dim = spanned_dim(&init.points, options.rel_coplanar_tol);
        if init.points.len() == before {
            break;
        }
    }
    Ok(init)
}

/// Unit directions orthogonal to the affine span of `points`, assuming that
/// span has dimension `dim`.
fn span_complement(points: &[DVector<f64>], dim: usize) -> Vec<DVector<f64>> {
    let m = points.first().map_or(0, |p| p.len());
    let mut mean = DVector::zeros(m);
    for p in points {
        mean += p;
    }
    mean /= points.len().max(1) as f64;
    let mut scatter = DMatrix::zeros(m, m);
    for p in points {
        let c = p - &mean;
        scatter += &c * c.transpose();
    }
    // The scatter matrix is symmetric, so the trailing right singular
    // vectors span its null space; left vectors of zero singular values are
    // not defined.
    let (_, _, v_t) = sorted_svd(&scatter);
    (dim..m).map(|j| v_t.row(j).transpose()).collect()
}

fn push_axis_optima(
    form: &ExplicitForm,
    directions: &[DVector<f64>],
    init: &mut InitialVertices,
) -> Result<()> {
    for v in directions {
        for c in [v.clone(), -v] {
            let sp = form.support(&c)?;
            init.lp_count += 1;
            let merge = DEFAULT_REL_MERGE_TOL * bbox_diagonal(&init.points).max(sp.x.norm());
            if init.points.iter().all(|p| (p - &sp.x).norm() > merge) {
                init.points.push(sp.x);
                init.witnesses.push(sp.y);
            }
        }
    }
    Ok(())
}

fn spanned_dim(points: &[DVector<f64>], rel_tol: f64) -> usize {
    let diag = bbox_diagonal(points);
    if diag == 0.0 {
        return 0;
    }
    affine_dimension(points, rel_tol.max(1e-12) * diag)
}

/// Orients a face normal away from the centroid; a tie keeps `+normal`.
pub fn orient_normal(
    normal: &DVector<f64>,
    witness: &DVector<f64>,
    centroid: &DVector<f64>,
) -> DVector<f64> {
    if normal.dot(&(witness - centroid)) >= 0.0 {
        normal.clone()
    } else {
        -normal
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FaceTest {
    /// The candidate lies at least `eps` from the face plane.
    Vertex(f64),
    /// The face is a face of the polytope to within `eps`.
    OnFace(f64),
}

impl FaceTest {
    pub fn delta(self) -> f64 {
        match self {
            FaceTest::Vertex(d) | FaceTest::OnFace(d) => d,
        }
    }
}

/// `delta = normal . (witness - candidate)`; a vertex iff `|delta| >= eps`.
pub fn face_test(
    normal: &DVector<f64>,
    witness: &DVector<f64>,
    candidate: &DVector<f64>,
    eps: f64,
) -> FaceTest {
    let delta = normal.dot(&(witness - candidate));
    if delta.abs() >= eps {
        FaceTest::Vertex(delta)
    } else {
        FaceTest::OnFace(delta)
    }
}

/// Runs the iterative convex-hull method on `problem`.
pub fn evaluate(
    problem: &FeasibilityProblem,
    options: &EvaluateOptions,
) -> core::result::Result<PolytopeResult, EvaluateError> {
    if options.eps.is_nan() || options.eps <= 0.0 || !options.eps.is_finite() {
        return Err(Error::InvalidArgument(format!("eps must be positive, got {}", options.eps)).into());
    }
    let form = ExplicitForm::new(problem, options.lp_tol)?;
    evaluate_form(&form, options)
}

/// [`evaluate`] on a prepared explicit form.
pub fn evaluate_form(
    form: &ExplicitForm,
    options: &EvaluateOptions,
) -> core::result::Result<PolytopeResult, EvaluateError> {
    let m = form.output_dim();
    let eps = options.eps;

    let init = match initial_vertices(form, options) {
        Ok(init) => init,
        Err(Error::Infeasible) => return Ok(PolytopeResult::empty(m, 0, PolytopeStatus::Empty)),
        Err(e) => return Err(e.into()),
    };
    if init.affine_dim < m {
        let mut result = PolytopeResult::empty(m, init.lp_count, PolytopeStatus::Degenerate);
        result.vertices = init.points;
        return Ok(result);
    }

    let mut hull = match HullState::build(&init.points, options.rel_coplanar_tol) {
        Ok(h) => h,
        Err(Error::DegenerateInput { .. }) => {
            let mut result = PolytopeResult::empty(m, init.lp_count, PolytopeStatus::Degenerate);
            result.vertices = init.points;
            return Ok(result);
        }
        Err(e) => return Err(e.into()),
    };

    let mut run = Run {
        lp_count: init.lp_count,
        probe_lp_count: init.lp_count.saturating_sub(2 * m),
        iterations: 0,
        planes: Vec::new(),
        deltas: BTreeMap::new(),
        supports: BTreeMap::new(),
        cuts: BTreeMap::new(),
        eps_history: Vec::new(),
    };
    let mut since: Option<u64> = None;

    loop {
        loop {
            let faces = hull.new_faces(since);
            if faces.is_empty() {
                break;
            }
            if run.iterations >= options.max_iterations {
                return Err(run.limit(&hull));
            }
            run.iterations += 1;
            since = Some(hull.generation());
            let centroid = hull.centroid();

            let mut found: Vec<DVector<f64>> = Vec::new();
            let mut warm: Option<lp::Basis> = None;
            for face in &faces {
                if run.lp_count >= options.max_lp {
                    return Err(run.limit(&hull));
                }
                let witness = &hull.points()[face.witness_vertex];
                let direction = orient_normal(&face.normal, witness, &centroid);
                let mut sp = form.support_from(&direction, warm.as_ref())?;
                run.lp_count += 1;
                warm = sp.basis.take();
                let test = face_test(&direction, witness, &sp.x, eps);
                run.deltas.insert(face.vertex_indices.clone(), test.delta().abs());
                run.supports.insert(face.vertex_indices.clone(), (direction.clone(), sp.value));
                match test {
                    FaceTest::Vertex(_) => found.push(sp.x),
                    FaceTest::OnFace(_) => {
                        let offset = direction.dot(witness);
                        run.planes.push((direction, offset));
                    }
                }
            }

            run.eps_history.push(run.live_max_delta(&hull));
            if found.is_empty() {
                break;
            }
            for x in &found {
                hull.insert(x)?;
            }
        }
        if !options.certify || !run.certify(form, &mut hull, options)? {
            break;
        }
    }

    Ok(run.finish(&hull, PolytopeStatus::Converged))
}

/// Rounds of feature checks before certification gives up.
const MAX_CERTIFY_ROUNDS: usize = 64;

/// Vertex set of a hull vertex or edge; unused slots hold `usize::MAX`.
type FeatureKey = [usize; 2];

struct Run {
    lp_count: usize,
    probe_lp_count: usize,
    iterations: usize,
    planes: Vec<(DVector<f64>, f64)>,
    deltas: BTreeMap<Vec<usize>, f64>,
    /// Probed direction and support value per tested face.
    supports: BTreeMap<Vec<usize>, (DVector<f64>, f64)>,
    /// Support half-spaces from certification probes, by feature.
    cuts: BTreeMap<FeatureKey, Vec<(DVector<f64>, f64)>>,
    eps_history: Vec<f64>,
}

impl Run {
    fn live_max_delta(&self, hull: &HullState) -> f64 {
        hull.faces()
            .iter()
            .filter_map(|f| self.deltas.get(&f.vertex_indices))
            .fold(0.0, |acc, &d| acc.max(d))
    }

    fn limit(&self, hull: &HullState) -> EvaluateError {
        EvaluateError::IterationLimit(Box::new(self.finish(hull, PolytopeStatus::Converged)))
    }

    /// Bounds the distance from the hull of every point of `P_x`.
    ///
    /// A point whose nearest hull point lies on a vertex or edge `S` is
    /// `q + z` with `z` in the normal cone of `S`, and `n_f . z <= delta_f`
    /// for every face `f` around `S` because `delta_f` is the measured
    /// support excess of `f`. Maximising `|z|` over that polyhedron bounds
    /// the distance; faces are bounded by their own `delta_f`. Where the
    /// bound exceeds `eps` an LP along the maximiser either finds a point
    /// more than `eps` beyond the hull, which is inserted, or gives a cut
    /// that removes the maximiser.
    ///
    /// Returns `true` when points were inserted and the face passes must
    /// resume.
    fn certify(
        &mut self,
        form: &ExplicitForm,
        hull: &mut HullState,
        options: &EvaluateOptions,
    ) -> core::result::Result<bool, EvaluateError> {
        let eps = options.eps;
        for _ in 0..MAX_CERTIFY_ROUNDS {
            let far = self.far_features(hull, eps);
            if far.is_empty() {
                return Ok(false);
            }
            let mut inserted = false;
            for (key, u) in far {
                if self.lp_count >= options.max_lp {
                    return Err(self.limit(hull));
                }
                let sp = form.support(&u)?;
                self.lp_count += 1;
                self.probe_lp_count += 1;
                let inner = hull.support(&u);
                if sp.value - inner > eps && matches!(hull.insert(&sp.x)?, InsertOutcome::Added(_)) {
                    inserted = true;
                }
                self.cuts.entry(key).or_default().push((u, sp.value));
            }
            if inserted {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// Vertices and edges whose local distance bound exceeds `eps`, with
    /// the unit direction of the maximising offset.
    fn far_features(&self, hull: &HullState, eps: f64) -> Vec<(FeatureKey, DVector<f64>)> {
        let m = hull.dim();
        if m < 2 {
            return Vec::new();
        }
        let faces = hull.faces();
        let mut around: BTreeMap<FeatureKey, Vec<usize>> = BTreeMap::new();
        for (fi, f) in faces.iter().enumerate() {
            let v = &f.vertex_indices;
            for (i, &a) in v.iter().enumerate() {
                around.entry([a, usize::MAX]).or_default().push(fi);
                if m == 3 {
                    for &b in &v[i + 1..] {
                        around.entry([a.min(b), a.max(b)]).or_default().push(fi);
                    }
                }
            }
        }

        let points = hull.points();
        let centroid = hull.centroid();
        let tol = 1e-9 * bbox_diagonal(&hull.vertices()).max(1.0);
        let arr = |v: &DVector<f64>| -> [f64; 3] {
            let mut out = [0.0; 3];
            out[..m].copy_from_slice(v.as_slice());
            out
        };
        let mut far = Vec::new();
        let mut rows: Vec<([f64; 3], f64)> = Vec::new();
        let mut neighbours: Vec<usize> = Vec::new();
        'features: for (key, incident) in &around {
            let members: &[usize] = if key[1] == usize::MAX { &key[..1] } else { &key[..] };
            let s0 = &points[members[0]];
            let eq: Vec<[f64; 3]> = members[1..].iter().map(|&i| arr(&(&points[i] - s0))).collect();
            rows.clear();
            neighbours.clear();
            for &fi in incident {
                let f = &faces[fi];
                let Some((n, value)) = self.supports.get(&f.vertex_indices) else {
                    continue 'features;
                };
                rows.push((arr(n), value - n.dot(s0)));
                neighbours.extend(f.vertex_indices.iter().filter(|a| !members.contains(a)));
            }
            neighbours.sort_unstable();
            neighbours.dedup();
            for &a in &neighbours {
                rows.push((arr(&(&points[a] - s0)), 0.0));
            }
            rows.push((arr(&(&centroid - s0)), 0.0));
            if let Some(cuts) = self.cuts.get(key) {
                for (u, value) in cuts {
                    rows.push((arr(u), value - u.dot(s0)));
                }
            }
            if let Some(z) = farthest_vertex(m, &eq, &rows, tol) {
                let z = DVector::from_column_slice(&z[..m]);
                let r = z.norm();
                if r > eps {
                    far.push((*key, z / r));
                }
            }
        }
        far
    }

    fn finish(&self, hull: &HullState, status: PolytopeStatus) -> PolytopeResult {
        let vertices = hull.vertices();
        let m = hull.dim();
        let scale = bbox_diagonal(&vertices).max(1.0);
        // Kept planes ordered by first normal component, so near-duplicates
        // sit in a narrow window.
        let mut order: Vec<usize> = Vec::new();
        let mut kept: Vec<&(DVector<f64>, f64)> = Vec::new();
        for plane in &self.planes {
            let key = plane.0[0];
            let start = order.partition_point(|&k| kept[k].0[0] < key - 1e-8);
            let duplicate = order[start..]
                .iter()
                .take_while(|&&k| kept[k].0[0] <= key + 1e-8)
                .any(|&k| {
                    let (n, d) = kept[k];
                    (n - &plane.0).norm() < 1e-8 && (d - plane.1).abs() < 1e-8 * scale
                });
            if !duplicate {
                let at = order.partition_point(|&k| kept[k].0[0] < key);
                order.insert(at, kept.len());
                kept.push(plane);
            }
        }
        let mut normals = DMatrix::zeros(kept.len(), m);
        let mut offsets = DVector::zeros(kept.len());
        for (i, (n, d)) in kept.iter().enumerate() {
            normals.set_row(i, &n.transpose());
            offsets[i] = *d;
        }
        PolytopeResult {
            vertices,
            hrep_normals: normals,
            hrep_offsets: offsets,
            achieved_eps: self.live_max_delta(hull),
            lp_count: self.lp_count,
            iterations: self.iterations,
            status,
            eps_history: self.eps_history.clone(),
            faces_created: hull.faces_created(),
            probe_lp_count: self.probe_lp_count,
        }
    }
}

/// The longest vertex of `{z | e . z = 0 for e in eq, a . z <= b for (a, b)
/// in rows}` in `R^m`, found by solving every square system of the
/// equalities plus `m - eq.len()` tight rows.
fn farthest_vertex(m: usize, eq: &[[f64; 3]], rows: &[([f64; 3], f64)], tol: f64) -> Option<[f64; 3]> {
    let dot = |a: &[f64; 3], b: &[f64; 3]| a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    let norms: Vec<f64> = rows.iter().map(|(n, _)| num_traits::Float::sqrt(dot(n, n))).collect();
    let mut best: Option<([f64; 3], f64)> = None;
    let mut visit = |chosen: &[usize]| {
        let mut a = [[0.0; 3]; 3];
        let mut b = [0.0; 3];
        a[..eq.len()].copy_from_slice(eq);
        for (k, &j) in chosen.iter().enumerate() {
            a[eq.len() + k] = rows[j].0;
            b[eq.len() + k] = rows[j].1;
        }
        let Some(z) = solve_small(a, b, m) else {
            return;
        };
        let len = dot(&z, &z);
        if best.is_some_and(|(_, l)| len <= l) {
            return;
        }
        if rows.iter().zip(&norms).all(|((n, rhs), norm)| dot(n, &z) <= rhs + tol * (1.0 + norm)) {
            best = Some((z, len));
        }
    };
    let k = rows.len();
    match m - eq.len() {
        1 => {
            for i in 0..k {
                visit(&[i]);
            }
        }
        2 => {
            for i in 0..k {
                for j in i + 1..k {
                    visit(&[i, j]);
                }
            }
        }
        3 => {
            for i in 0..k {
                for j in i + 1..k {
                    for l in j + 1..k {
                        visit(&[i, j, l]);
                    }
                }
            }
        }
        _ => {}
    }
    best.map(|(z, _)| z)
}

/// Gaussian elimination with partial pivoting on the leading `m x m` block,
/// rows scaled to unit length; `None` when nearly singular.
fn solve_small(mut a: [[f64; 3]; 3], mut b: [f64; 3], m: usize) -> Option<[f64; 3]> {
    for r in 0..m {
        let norm = num_traits::Float::sqrt(a[r][..m].iter().map(|v| v * v).sum::<f64>());
        if norm == 0.0 {
            return None;
        }
        for v in &mut a[r][..m] {
            *v /= norm;
        }
        b[r] /= norm;
    }
    for c in 0..m {
        let p = (c..m).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))?;
        if a[p][c].abs() < 1e-10 {
            return None;
        }
        a.swap(c, p);
        b.swap(c, p);
        for r in c + 1..m {
            let f = a[r][c] / a[c][c];
            let pivot_row = a[c];
            for (x, p) in a[r][c..m].iter_mut().zip(&pivot_row[c..m]) {
                *x -= f * p;
            }
            b[r] -= f * b[c];
        }
    }
    let mut x = [0.0; 3];
    for c in (0..m).rev() {
        let s: f64 = (c + 1..m).map(|k| a[c][k] * x[k]).sum();
        x[c] = (b[c] - s) / a[c][c];
    }
    Some(x)
}
