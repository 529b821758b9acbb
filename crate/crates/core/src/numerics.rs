//! Dense linear-algebra kernels: SVD split into image and left null-space
//! bases, pseudoinverse, and numerical rank decisions.
//!
//! The SVD itself comes from `nalgebra`; this module owns the rank policy.

use alloc::format;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
use num_traits::Float;

use crate::error::{Error, Result};

/// Relative rank tolerance, scaled by `max(n, m) * sigma_max`.
pub const DEFAULT_RANK_TOL_FACTOR: f64 = 1e-12;

/// `A = U1 * diag(sigma) * V^T`, with `U2` spanning the null space of `A^T`.
#[derive(Debug, Clone)]
pub struct SvdSplit {
    /// `n x r` orthonormal basis of the image of `A`.
    pub image_basis: DMatrix<f64>,
    /// `n x (n - r)` orthonormal basis of the left null space.
    pub null_basis: DMatrix<f64>,
    /// `r` nonincreasing positive singular values.
    pub singular_values: DVector<f64>,
    /// `m x r` right singular vectors.
    pub input_basis: DMatrix<f64>,
}

impl SvdSplit {
    pub fn rank(&self) -> usize {
        self.singular_values.len()
    }
}

pub fn is_finite(a: &DMatrix<f64>) -> bool {
    a.iter().all(|v| v.is_finite())
}

/// Splits `A` (`n x m`, `n >= m >= 1`) into image and left-null-space bases.
pub fn svd_split(a: &DMatrix<f64>, rank_tol_factor: f64) -> Result<SvdSplit> {
    let (n, m) = a.shape();
    if m == 0 || n < m {
        return Err(Error::Dimension(format!(
            "svd_split expects n >= m >= 1, got {n}x{m}"
        )));
    }
    if !is_finite(a) {
        return Err(Error::NonFinite);
    }

    let (u, sigma, v_t) = sorted_svd(a);

    let sigma_max = sigma.iter().copied().fold(0.0, f64::max);
    let threshold = rank_tol_factor * (n.max(m) as f64) * sigma_max;
    let rank = if sigma_max > 0.0 {
        sigma.iter().filter(|&&s| s > threshold).count()
    } else {
        0
    };

    let image_basis = u.columns(0, rank).into_owned();
    let null_basis = complement(&image_basis, n);
    let singular_values = DVector::from_iterator(rank, sigma.iter().take(rank).copied());
    let input_basis = v_t.rows(0, rank).transpose();

    Ok(SvdSplit {
        image_basis,
        null_basis,
        singular_values,
        input_basis,
    })
}

/// Thin SVD `A = U diag(sigma) V^T` with singular values in nonincreasing
/// order; `U` is `rows x k`, `V^T` is `k x cols`, `k = min(rows, cols)`.
/// Columns of `U` past the numerical rank carry no information; `V` is
/// always orthogonal when `rows >= cols`.
///
/// One-sided Jacobi rotations on the columns. `nalgebra`'s bidiagonal SVD
/// returns inaccurate factors on some rank-deficient inputs, and the
/// matrices here are small enough for Jacobi to be cheap.
pub fn sorted_svd(a: &DMatrix<f64>) -> (DMatrix<f64>, DVector<f64>, DMatrix<f64>) {
    let (rows, cols) = a.shape();
    if rows < cols {
        let (u, sigma, v_t) = sorted_svd(&a.transpose());
        return (v_t.transpose(), sigma, u.transpose());
    }
    let mut w = a.clone();
    let mut v = DMatrix::<f64>::identity(cols, cols);
    for _sweep in 0..80 {
        let mut rotated = false;
        for p in 0..cols {
            for q in p + 1..cols {
                let alpha = w.column(p).norm_squared();
                let beta = w.column(q).norm_squared();
                let gamma = w.column(p).dot(&w.column(q));
                if alpha == 0.0 || beta == 0.0 || gamma.abs() <= 1e-15 * Float::sqrt(alpha * beta) {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + Float::sqrt(1.0 + zeta * zeta));
                let c = 1.0 / Float::sqrt(1.0 + t * t);
                let s = c * t;
                rotate_columns(&mut w, p, q, c, s);
                rotate_columns(&mut v, p, q, c, s);
            }
        }
        if !rotated {
            break;
        }
    }

    let norms: Vec<f64> = (0..cols).map(|j| w.column(j).norm()).collect();
    let mut order: Vec<usize> = (0..cols).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));
    let sigma = DVector::from_fn(cols, |i, _| norms[order[i]]);
    let u = DMatrix::from_fn(rows, cols, |r, c| {
        let n = norms[order[c]];
        if n > 0.0 {
            w[(r, order[c])] / n
        } else {
            0.0
        }
    });
    let v_t = DMatrix::from_fn(cols, cols, |r, c| v[(c, order[r])]);
    (u, sigma, v_t)
}

fn rotate_columns(m: &mut DMatrix<f64>, p: usize, q: usize, c: f64, s: f64) {
    for r in 0..m.nrows() {
        let x = m[(r, p)];
        let y = m[(r, q)];
        m[(r, p)] = c * x - s * y;
        m[(r, q)] = s * x + c * y;
    }
}

/// Orthonormal basis of the orthogonal complement of the columns of `basis`
/// (assumed orthonormal): coordinate axes are projected out twice and the
/// largest remainder is kept at each step.
fn complement(basis: &DMatrix<f64>, n: usize) -> DMatrix<f64> {
    let r = basis.ncols();
    let mut found: Vec<DVector<f64>> = Vec::with_capacity(n - r);
    let mut candidates: Vec<DVector<f64>> = (0..n)
        .map(|i| {
            let mut e = DVector::zeros(n);
            e[i] = 1.0;
            e
        })
        .collect();
    let project_out = |v: &mut DVector<f64>, found: &[DVector<f64>]| {
        for _ in 0..2 {
            for j in 0..r {
                let c = basis.column(j).dot(v);
                v.axpy(-c, &basis.column(j), 1.0);
            }
            for f in found {
                let c = f.dot(v);
                v.axpy(-c, f, 1.0);
            }
        }
    };
    while found.len() < n - r {
        let mut best: Option<(usize, DVector<f64>, f64)> = None;
        for (i, e) in candidates.iter().enumerate() {
            let mut v = e.clone();
            project_out(&mut v, &found);
            let norm = v.norm();
            if best.as_ref().is_none_or(|(_, _, b)| norm > *b) {
                best = Some((i, v, norm));
            }
        }
        let (i, mut v, norm) = best.expect("candidates remain while the complement is incomplete");
        v /= norm;
        // A second pass removes what the division amplified.
        project_out(&mut v, &found);
        v.normalize_mut();
        found.push(v);
        candidates.swap_remove(i);
    }
    let mut out = DMatrix::zeros(n, n - r);
    for (j, f) in found.iter().enumerate() {
        out.set_column(j, f);
    }
    out
}

/// `A^+ = V * diag(1/sigma) * U1^T`; requires full column rank.
pub fn pseudo_inverse(a: &DMatrix<f64>, split: &SvdSplit) -> Result<DMatrix<f64>> {
    let m = a.ncols();
    if split.input_basis.nrows() != m || split.image_basis.nrows() != a.nrows() {
        return Err(Error::Dimension(
            "SVD split does not match the matrix shape".into(),
        ));
    }
    if split.rank() < m {
        return Err(Error::RankDeficient {
            rank: split.rank(),
            required: m,
        });
    }
    let mut scaled = split.input_basis.clone();
    for (j, mut col) in scaled.column_iter_mut().enumerate() {
        col /= split.singular_values[j];
    }
    Ok(scaled * split.image_basis.transpose())
}

/// Affine dimension of a point cloud (rows are points) under an absolute
/// tolerance on singular values of the centered cloud.
pub fn affine_dimension(points: &[DVector<f64>], tol: f64) -> usize {
    if points.len() < 2 {
        return 0;
    }
    let dim = points[0].len();
    let count = points.len();
    let mut mean = DVector::<f64>::zeros(dim);
    for p in points {
        mean += p;
    }
    mean /= count as f64;
    let mut centered = DMatrix::<f64>::zeros(count, dim);
    for (i, p) in points.iter().enumerate() {
        centered.row_mut(i).copy_from(&(p - &mean).transpose());
    }
    let (_, sv, _) = sorted_svd(&centered);
    sv.iter().filter(|&&s| s > tol).count()
}

/// Solves `min ||M x - b||` through the SVD, dropping directions below the
/// relative rank tolerance.
pub fn least_squares(mat: &DMatrix<f64>, rhs: &DVector<f64>) -> DVector<f64> {
    let (rows, cols) = mat.shape();
    if rows == 0 || cols == 0 {
        return DVector::zeros(cols);
    }
    let (u, sigma, v_t) = sorted_svd(mat);
    let smax = sigma.iter().copied().fold(0.0, f64::max);
    let eps = DEFAULT_RANK_TOL_FACTOR * (rows.max(cols) as f64) * smax;
    let mut x = DVector::zeros(cols);
    for i in 0..sigma.len() {
        if sigma[i] > eps && sigma[i] > 0.0 {
            let coeff = u.column(i).dot(rhs) / sigma[i];
            x += v_t.row(i).transpose() * coeff;
        }
    }
    x
}

/// Bounding-box diagonal of a point set.
pub fn bbox_diagonal(points: &[DVector<f64>]) -> f64 {
    let Some(first) = points.first() else {
        return 0.0;
    };
    let mut lo = first.clone();
    let mut hi = first.clone();
    for p in points.iter().skip(1) {
        for k in 0..p.len() {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    (hi - lo).norm()
}

pub fn max_abs(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, |acc, v| acc.max(v.abs()))
}

/// Orthonormal basis completion (Gram-Schmidt against the identity).
pub(crate) fn orthonormal_columns(vectors: &[DVector<f64>]) -> Vec<DVector<f64>> {
    let mut basis: Vec<DVector<f64>> = Vec::new();
    for v in vectors {
        let mut w = v.clone();
        for b in &basis {
            let proj = b.dot(&w);
            w -= b * proj;
        }
        let norm = w.norm();
        if norm > 1e-9 {
            basis.push(w / norm);
        }
    }
    basis
}
