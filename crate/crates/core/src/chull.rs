//! Incremental convex hull in one, two and three dimensions.
//!
//! Faces are simplices (a point for `m = 1`, an edge for `m = 2`, a triangle
//! for `m = 3`) with unit outward normals. Every insertion that changes the
//! hull bumps a generation counter and stamps the replacement faces with it,
//! which lets a caller ask for the faces created since its last look.
//!
//! Visibility uses a tolerance relative to the bounding-box diagonal of the
//! hull vertices, so rescaling every input leaves the topology unchanged.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DVector;

use crate::error::{Error, Result};

/// Coplanarity tolerance as a fraction of the bounding-box diagonal.
pub const DEFAULT_REL_COPLANAR_TOL: f64 = 1e-10;
/// Points closer than this fraction of the diagonal are merged.
pub const DEFAULT_REL_MERGE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct HullFace {
    /// Unit outward normal.
    pub normal: DVector<f64>,
    /// `normal . witness`.
    pub offset: f64,
    /// Index (into [`HullState::points`]) of one vertex on the face.
    pub witness_vertex: usize,
    /// Sorted vertex indices; also the face identity.
    pub vertex_indices: Vec<usize>,
    pub created_generation: u64,
}

impl HullFace {
    pub fn signed_distance(&self, p: &DVector<f64>) -> f64 {
        self.normal.dot(p) - self.offset
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InsertOutcome {
    /// The point became a hull vertex with this index.
    Added(usize),
    /// The point lies inside or on the hull; nothing changed.
    Inside,
    /// The point merged with an existing hull vertex.
    Duplicate(usize),
}

#[derive(Debug, Clone)]
pub struct HullState {
    dim: usize,
    rel_tol: f64,
    points: Vec<DVector<f64>>,
    on_hull: Vec<bool>,
    faces: Vec<HullFace>,
    lo: DVector<f64>,
    hi: DVector<f64>,
    /// Strictly interior reference used to orient new faces.
    interior: DVector<f64>,
    generation: u64,
    faces_created: usize,
    diagonal: f64,
}

impl HullState {
    /// Builds the hull of `points`; `rel_coplanar_tol` scales the bounding
    /// box diagonal into an absolute visibility tolerance.
    pub fn build(points: &[DVector<f64>], rel_coplanar_tol: f64) -> Result<Self> {
        let Some(first) = points.first() else {
            return Err(Error::DegenerateInput { dim: 0, required: 1 });
        };
        let dim = first.len();
        if !(1..=3).contains(&dim) {
            return Err(Error::Dimension(format!(
                "hulls are supported for dimensions 1 to 3, got {dim}"
            )));
        }
        for p in points {
            if p.len() != dim {
                return Err(Error::Dimension("points of mixed dimension".into()));
            }
            if p.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite);
            }
        }

        let mut lo = first.clone();
        let mut hi = first.clone();
        for p in points {
            for k in 0..dim {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        let diagonal = (&hi - &lo).norm();
        let tol = rel_coplanar_tol * diagonal;
        let simplex = initial_simplex(points, dim, tol)?;

        let mut interior = DVector::zeros(dim);
        for &i in &simplex {
            interior += &points[i];
        }
        interior /= simplex.len() as f64;

        let mut state = HullState {
            dim,
            rel_tol: rel_coplanar_tol,
            points: simplex.iter().map(|&i| points[i].clone()).collect(),
            on_hull: vec![true; simplex.len()],
            faces: Vec::new(),
            lo,
            hi,
            interior,
            generation: 0,
            faces_created: 0,
            diagonal,
        };
        let all: Vec<usize> = (0..=dim).collect();
        for skip in 0..=dim {
            let ridge: Vec<usize> = all.iter().copied().filter(|&i| i != skip).collect();
            let face = state.make_face(ridge, 0);
            state.faces.push(face);
        }

        for (i, p) in points.iter().enumerate() {
            if simplex.contains(&i) {
                continue;
            }
            state.insert_point(p, false)?;
        }
        // Construction is generation zero regardless of how many inserts it took.
        state.generation = 0;
        for f in &mut state.faces {
            f.created_generation = 0;
        }
        state.faces_created = state.faces.len();
        state.refresh();
        Ok(state)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Faces of the constructed hull plus every face added by later inserts.
    pub fn faces_created(&self) -> usize {
        self.faces_created
    }

    pub fn generation(&self) -> u64 {
        self.generation
    }

    pub fn faces(&self) -> &[HullFace] {
        &self.faces
    }

    pub fn centroid(&self) -> DVector<f64> {
        let idx = self.vertex_indices();
        let mut c = DVector::zeros(self.dim);
        for &i in &idx {
            c += &self.points[i];
        }
        c / idx.len() as f64
    }

    /// Every point ever accepted as a hull vertex, indexed as in the faces.
    pub fn points(&self) -> &[DVector<f64>] {
        &self.points
    }

    /// Indices of the current hull vertices.
    pub fn vertex_indices(&self) -> Vec<usize> {
        (0..self.points.len()).filter(|&i| self.on_hull[i]).collect()
    }

    /// Current hull vertices.
    pub fn vertices(&self) -> Vec<DVector<f64>> {
        self.vertex_indices()
            .into_iter()
            .map(|i| self.points[i].clone())
            .collect()
    }

    pub fn coplanar_tol(&self) -> f64 {
        self.rel_tol * self.diagonal
    }

    fn merge_tol(&self) -> f64 {
        DEFAULT_REL_MERGE_TOL * self.diagonal
    }

    /// Inserts a point, replacing the faces that see it.
    pub fn insert(&mut self, point: &DVector<f64>) -> Result<InsertOutcome> {
        self.insert_point(point, true)
    }

    /// Faces created strictly after `since` (`None` returns every face), in
    /// creation order.
    pub fn new_faces(&self, since: Option<u64>) -> Vec<HullFace> {
        self.faces
            .iter()
            .filter(|f| since.is_none_or(|g| f.created_generation > g))
            .cloned()
            .collect()
    }

    /// `true` when the point is inside or within tolerance of every face.
    pub fn contains(&self, p: &DVector<f64>, tol: f64) -> bool {
        self.faces.iter().all(|f| f.signed_distance(p) <= tol)
    }

    /// `max_v c . v` over hull vertices.
    pub fn support(&self, direction: &DVector<f64>) -> f64 {
        self.vertex_indices()
            .into_iter()
            .map(|i| direction.dot(&self.points[i]))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Length, area or volume.
    pub fn volume(&self) -> f64 {
        match self.dim {
            1 => {
                let hi = self.support(&DVector::from_element(1, 1.0));
                let lo = -self.support(&DVector::from_element(1, -1.0));
                hi - lo
            }
            _ => {
                // Cone from the interior point over each face.
                let mut total = 0.0;
                for f in &self.faces {
                    let height = f.offset - f.normal.dot(&self.interior);
                    total += height * self.face_measure(f) / self.dim as f64;
                }
                total
            }
        }
    }

    fn face_measure(&self, f: &HullFace) -> f64 {
        let p = |k: usize| &self.points[f.vertex_indices[k]];
        match self.dim {
            2 => (p(1) - p(0)).norm(),
            3 => {
                let a = p(1) - p(0);
                let b = p(2) - p(0);
                0.5 * cross(&a, &b).norm()
            }
            _ => 1.0,
        }
    }

    /// Distinct edges of a three-dimensional hull.
    pub fn edge_count(&self) -> usize {
        let mut edges = BTreeMap::new();
        for f in &self.faces {
            let v = &f.vertex_indices;
            for (a, b) in [(0, 1), (0, 2), (1, 2)].into_iter().filter(|&(_, b)| b < v.len()) {
                edges.insert((v[a], v[b]), ());
            }
        }
        edges.len()
    }

    /// Face vertex indices ordered so the right-hand rule gives the outward
    /// normal (counter-clockwise seen from outside).
    pub fn oriented_face(&self, f: &HullFace) -> Vec<usize> {
        let mut v = f.vertex_indices.clone();
        if self.dim == 3 {
            let a = &self.points[v[0]];
            let n = cross(&(&self.points[v[1]] - a), &(&self.points[v[2]] - a));
            if n.dot(&f.normal) < 0.0 {
                v.swap(1, 2);
            }
        }
        v
    }

    fn insert_point(&mut self, p: &DVector<f64>, stamp: bool) -> Result<InsertOutcome> {
        if p.len() != self.dim {
            return Err(Error::Dimension(format!(
                "point of dimension {} inserted into a {}-dimensional hull",
                p.len(),
                self.dim
            )));
        }
        if p.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }

        for k in 0..self.dim {
            self.lo[k] = self.lo[k].min(p[k]);
            self.hi[k] = self.hi[k].max(p[k]);
        }
        self.diagonal = self.diagonal.max((&self.hi - &self.lo).norm());

        let merge_sq = self.merge_tol() * self.merge_tol();
        let dim = self.dim;
        if let Some(i) = (0..self.points.len()).find(|&i| {
            self.on_hull[i] && {
                let q = &self.points[i];
                (0..dim).map(|k| (q[k] - p[k]) * (q[k] - p[k])).sum::<f64>() <= merge_sq
            }
        }) {
            return Ok(InsertOutcome::Duplicate(i));
        }

        let tol = self.coplanar_tol();
        let visible: Vec<usize> = (0..self.faces.len())
            .filter(|&f| self.faces[f].signed_distance(p) > tol)
            .collect();
        if visible.is_empty() {
            return Ok(InsertOutcome::Inside);
        }

        // Ridges of visible faces seen exactly once form the horizon.
        let mut ridges: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
        for &f in &visible {
            let verts = &self.faces[f].vertex_indices;
            for skip in 0..verts.len() {
                let ridge: Vec<usize> = verts
                    .iter()
                    .enumerate()
                    .filter(|&(k, _)| k != skip)
                    .map(|(_, &v)| v)
                    .collect();
                *ridges.entry(ridge).or_insert(0) += 1;
            }
        }

        let new_index = self.points.len();
        self.points.push(p.clone());
        self.on_hull.push(true);
        let generation = if stamp { self.generation + 1 } else { self.generation };

        let mut keep = vec![true; self.faces.len()];
        for &f in &visible {
            keep[f] = false;
            for &v in &self.faces[f].vertex_indices {
                self.on_hull[v] = false;
            }
        }
        let mut k = 0;
        self.faces.retain(|_| {
            let r = keep[k];
            k += 1;
            r
        });
        for (ridge, count) in ridges {
            if count == 1 {
                let mut verts = ridge;
                verts.push(new_index);
                verts.sort_unstable();
                for &v in &verts {
                    self.on_hull[v] = true;
                }
                let face = self.make_face(verts, generation);
                self.faces.push(face);
                self.faces_created += 1;
            }
        }

        self.generation = generation;
        Ok(InsertOutcome::Added(new_index))
    }

    fn make_face(&self, mut verts: Vec<usize>, generation: u64) -> HullFace {
        verts.sort_unstable();
        let p = |k: usize| &self.points[verts[k]];
        let mut normal = match self.dim {
            1 => DVector::from_element(1, 1.0),
            2 => {
                let t = p(1) - p(0);
                DVector::from_vec(vec![t[1], -t[0]])
            }
            _ => cross(&(p(1) - p(0)), &(p(2) - p(0))),
        };
        let norm = normal.norm();
        if norm > 0.0 {
            normal /= norm;
        }
        if normal.dot(&(p(0) - &self.interior)) < 0.0 {
            normal = -normal;
        }
        let offset = normal.dot(p(0));
        HullFace {
            normal,
            offset,
            witness_vertex: verts[0],
            vertex_indices: verts,
            created_generation: generation,
        }
    }

    fn refresh(&mut self) {
        self.on_hull.iter_mut().for_each(|v| *v = false);
        for f in &self.faces {
            for &v in &f.vertex_indices {
                self.on_hull[v] = true;
            }
        }
    }
}

pub(crate) fn cross(a: &DVector<f64>, b: &DVector<f64>) -> DVector<f64> {
    DVector::from_vec(vec![
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ])
}

/// Picks `dim + 1` affinely independent points greedily, each the farthest
/// from the affine span of the previous ones.
fn initial_simplex(points: &[DVector<f64>], dim: usize, tol: f64) -> Result<Vec<usize>> {
    let degenerate = |achieved: usize| Error::DegenerateInput {
        dim: achieved,
        required: dim,
    };

    // Start from the farthest pair among the axis extremes.
    let mut extremes = Vec::new();
    for axis in 0..dim {
        let (mut lo, mut hi) = (0, 0);
        for (i, p) in points.iter().enumerate() {
            if p[axis] < points[lo][axis] {
                lo = i;
            }
            if p[axis] > points[hi][axis] {
                hi = i;
            }
        }
        extremes.push(lo);
        extremes.push(hi);
    }
    let mut best = (0, 0, 0.0);
    for &a in &extremes {
        for &b in &extremes {
            let dist = (&points[a] - &points[b]).norm();
            if dist > best.2 {
                best = (a, b, dist);
            }
        }
    }
    if best.2 <= tol {
        return Err(degenerate(0));
    }
    let mut chosen = vec![best.0, best.1];
    // Orthonormal basis of the span of chosen - origin.
    let origin = points[best.0].clone();
    let first = &points[best.1] - &origin;
    let mut basis = vec![&first / first.norm()];

    while chosen.len() < dim + 1 {
        let mut far = (usize::MAX, 0.0, DVector::zeros(dim));
        for (i, p) in points.iter().enumerate() {
            let mut r = p - &origin;
            for b in &basis {
                let proj = b.dot(&r);
                r -= b * proj;
            }
            let dist = r.norm();
            if dist > far.1 {
                far = (i, dist, r);
            }
        }
        if far.1 <= tol {
            return Err(degenerate(chosen.len() - 1));
        }
        basis.push(&far.2 / far.1);
        chosen.push(far.0);
    }
    Ok(chosen)
}
