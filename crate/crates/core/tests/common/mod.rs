//! Generators and brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use polyfeas_core::ichm::{ExplicitForm, FeasibilityProblem};
use polyfeas_core::msk::MuscleSnapshot;
use polyfeas_core::numerics::bbox_diagonal;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn random_problem(seed: u64, square: bool) -> FeasibilityProblem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = rng.random_range(1..=3usize);
    let n = if square { m } else { rng.random_range(m..=m + 3) };
    let d = rng.random_range(n..=(n + 8).min(12));
    let a = DMatrix::from_fn(n, m, |_, _| rng.random_range(-1.0..1.0));
    let b = DMatrix::from_fn(n, d, |_, _| rng.random_range(-1.0..1.0));
    let lo = DVector::from_fn(d, |_, _| rng.random_range(-2.0..0.0));
    let hi = DVector::from_fn(d, |j, _| lo[j] + rng.random_range(0.5..3.0));
    FeasibilityProblem::new(a, b, lo, hi).unwrap()
}

/// `n = m = 3` with `d` drawn from `3..=12`.
pub fn square_problem(seed: u64) -> FeasibilityProblem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = rng.random_range(3..=12usize);
    let a = DMatrix::from_fn(3, 3, |_, _| rng.random_range(-1.0..1.0));
    let b = DMatrix::from_fn(3, d, |_, _| rng.random_range(-1.0..1.0));
    let lo = DVector::from_fn(d, |_, _| rng.random_range(-2.0..0.0));
    let hi = DVector::from_fn(d, |j, _| lo[j] + rng.random_range(0.5..3.0));
    FeasibilityProblem::new(a, b, lo, hi).unwrap()
}

/// Bounding-box diagonal of `P_x` from the `2m` axis LPs; `None` when empty.
pub fn scale(form: &ExplicitForm, m: usize) -> Option<f64> {
    let mut extent = Vec::new();
    for k in 0..m {
        for s in [1.0, -1.0] {
            let mut e = DVector::zeros(m);
            e[k] = s;
            extent.push(form.support(&e).ok()?.x);
        }
    }
    Some(bbox_diagonal(&extent).max(1e-9))
}

pub fn hull_support(vertices: &[DVector<f64>], c: &DVector<f64>) -> f64 {
    vertices.iter().map(|v| c.dot(v)).fold(f64::NEG_INFINITY, f64::max)
}

/// Snapshot with `d <= 6` muscles, a nonzero passive floor and a torque
/// bias produced by a known feasible force `F*`, which is returned too.
pub fn small_snapshot(seed: u64) -> (MuscleSnapshot, DVector<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = rng.random_range(1..=6usize);
    let n = rng.random_range(1..=d);
    let m = rng.random_range(1..=n);
    let jacobian_t = DMatrix::from_fn(n, m, |_, _| rng.random_range(-1.0..1.0));
    let moment_arm_t = DMatrix::from_fn(n, d, |_, _| rng.random_range(-1.0..1.0));
    let f_passive = DVector::from_fn(d, |_, _| {
        if rng.random_bool(0.5) {
            0.0
        } else {
            rng.random_range(0.0..50.0)
        }
    });
    let f_max = DVector::from_fn(d, |i, _| f_passive[i] + rng.random_range(10.0..500.0));
    // Pull F* toward the bounds so that some constraints end up active.
    let f_star = DVector::from_fn(d, |i, _| {
        let t: f64 = rng.random_range(-0.3..1.3);
        f_passive[i] + t.clamp(0.0, 1.0) * (f_max[i] - f_passive[i])
    });
    let torque_bias = -&moment_arm_t * &f_star;
    let snapshot = MuscleSnapshot {
        jacobian_t,
        moment_arm_t,
        f_passive,
        f_max,
        torque_bias,
    };
    (snapshot, f_star)
}

/// Global minimum of `1/2 sum (F_i / r_i)^2` over `-L^T F = tau`,
/// `F_p <= F <= F_m`, `r = F_m - F_p`, by trying every assignment of each
/// muscle to free, lower or upper. Free muscles take the minimum-norm
/// solution of the remaining equality system; an assignment counts when
/// that solution is consistent and inside the box. The best such point is
/// the optimum because the optimal point itself is reached by its own
/// assignment.
pub fn brute_force_bias(s: &MuscleSnapshot) -> Option<(f64, DVector<f64>)> {
    let d = s.f_max.len();
    let c = -&s.moment_arm_t;
    let range = DVector::from_fn(d, |i, _| s.f_max[i] - s.f_passive[i]);
    let tscale = 1.0 + s.torque_bias.amax() + c.amax() * s.f_max.amax();
    let mut best: Option<(f64, DVector<f64>)> = None;
    for code in 0..3usize.pow(d as u32) {
        let mut state = vec![0u8; d];
        let mut k = code;
        for v in state.iter_mut() {
            *v = (k % 3) as u8;
            k /= 3;
        }
        let mut f = DVector::zeros(d);
        let free: Vec<usize> = (0..d).filter(|&i| state[i] == 0).collect();
        for i in 0..d {
            match state[i] {
                1 => f[i] = s.f_passive[i],
                2 => f[i] = s.f_max[i],
                _ => {}
            }
        }
        let rhs = &s.torque_bias - &c * &f;
        if !free.is_empty() {
            // Scaled free variables: columns multiplied by r_i.
            let cf = DMatrix::from_fn(c.nrows(), free.len(), |r, j| c[(r, free[j])] * range[free[j]]);
            let z = min_norm_solution(&cf, &rhs);
            for (j, &i) in free.iter().enumerate() {
                f[i] = z[j] * range[i];
            }
        }
        if (&c * &f - &s.torque_bias).amax() > 1e-9 * tscale {
            continue;
        }
        if (0..d).any(|i| f[i] < s.f_passive[i] - 1e-9 * range[i] || f[i] > s.f_max[i] + 1e-9 * range[i]) {
            continue;
        }
        let obj: f64 = (0..d).map(|i| 0.5 * (f[i] / range[i]).powi(2)).sum();
        if best.as_ref().is_none_or(|(b, _)| obj < *b) {
            best = Some((obj, f));
        }
    }
    best
}

/// `C^T w` with `w` from the eigen-pseudo-inverse of `C C^T`: the
/// minimum-norm least-squares solution of `C z = r`.
fn min_norm_solution(c: &DMatrix<f64>, r: &DVector<f64>) -> DVector<f64> {
    let gram = c * c.transpose();
    let eig = gram.clone().symmetric_eigen();
    let top = eig.eigenvalues.amax();
    let mut w = DVector::zeros(r.len());
    for k in 0..eig.eigenvalues.len() {
        let lambda = eig.eigenvalues[k];
        if lambda > 1e-12 * top {
            let q = eig.eigenvectors.column(k);
            w += q * (q.dot(r) / lambda);
        }
    }
    c.transpose() * w
}
