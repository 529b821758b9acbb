//! Musculoskeletal layer: wrench-capacity problems from model snapshots,
//! minimal-activation bias forces, directional capacity and assist shares.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::ichm::{ExplicitForm, FeasibilityProblem};
use crate::lp::{self, LinearProgram, LpStatus};
use crate::numerics::{is_finite, pseudo_inverse, svd_split, DEFAULT_RANK_TOL_FACTOR};

/// Standard gravity for kilogram conversions.
pub const GRAVITY: f64 = 9.81;

/// Instantaneous model state defining one wrench-capacity query.
#[derive(Debug, Clone, PartialEq)]
pub struct MuscleSnapshot {
    /// `J^T`, `n x m`.
    pub jacobian_t: DMatrix<f64>,
    /// `L^T`, `n x d`. Muscle tensions map to joint torques as `-L^T F`.
    pub moment_arm_t: DMatrix<f64>,
    pub f_passive: DVector<f64>,
    pub f_max: DVector<f64>,
    /// Gravity plus dynamic torque, length `n`.
    pub torque_bias: DVector<f64>,
}

impl MuscleSnapshot {
    pub fn dof(&self) -> usize {
        self.jacobian_t.nrows()
    }

    pub fn muscles(&self) -> usize {
        self.moment_arm_t.ncols()
    }

    pub fn output_dim(&self) -> usize {
        self.jacobian_t.ncols()
    }

    pub fn validate(&self) -> Result<()> {
        let (n, m) = self.jacobian_t.shape();
        let d = self.moment_arm_t.ncols();
        if self.moment_arm_t.nrows() != n
            || self.f_passive.len() != d
            || self.f_max.len() != d
            || self.torque_bias.len() != n
        {
            return Err(Error::Dimension(format!(
                "snapshot shapes disagree: J^T {n}x{m}, L^T {}x{d}, F_p {}, F_m {}, tau {}",
                self.moment_arm_t.nrows(),
                self.f_passive.len(),
                self.f_max.len(),
                self.torque_bias.len()
            )));
        }
        if m == 0 || n < m || d < n {
            return Err(Error::Dimension(format!(
                "snapshot needs d >= n >= m >= 1, got d={d}, n={n}, m={m}"
            )));
        }
        if !is_finite(&self.jacobian_t)
            || !is_finite(&self.moment_arm_t)
            || self
                .f_passive
                .iter()
                .chain(self.f_max.iter())
                .chain(self.torque_bias.iter())
                .any(|v| !v.is_finite())
        {
            return Err(Error::NonFinite);
        }
        for i in 0..d {
            if self.f_passive[i] < 0.0 || self.f_passive[i] > self.f_max[i] {
                return Err(Error::InvalidArgument(format!(
                    "muscle {i} needs 0 <= F_p <= F_m, got [{}, {}]",
                    self.f_passive[i], self.f_max[i]
                )));
            }
        }
        Ok(())
    }

    /// `-L^T`, the muscle-to-torque map.
    pub fn torque_map(&self) -> DMatrix<f64> {
        -&self.moment_arm_t
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BiasForceResult {
    pub f_bias: DVector<f64>,
    /// Largest KKT violation in scaled variables `F_i / (F_m,i - F_p,i)`.
    pub kkt_residual: f64,
    /// `1/2 F^T P F` with `p_ii = 1 / (F_m,i - F_p,i)^2`.
    pub objective: f64,
}

/// Equality-constrained box QP in scaled variables:
/// `min 1/2 |z|^2  s.t.  C z = t,  lo <= z <= hi`.
struct ScaledQp {
    c: DMatrix<f64>,
    t: DVector<f64>,
    lo: DVector<f64>,
    hi: DVector<f64>,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Bound {
    Free,
    Lower,
    Upper,
}

impl ScaledQp {
    fn dim(&self) -> usize {
        self.lo.len()
    }

    fn columns(&self, set: &[usize]) -> DMatrix<f64> {
        DMatrix::from_fn(self.c.nrows(), set.len(), |i, j| self.c[(i, set[j])])
    }

    fn rank_of(&self, set: &[usize]) -> usize {
        if set.is_empty() {
            return 0;
        }
        let cols = self.columns(set);
        let split = if cols.ncols() >= cols.nrows() {
            svd_split(&cols.transpose(), DEFAULT_RANK_TOL_FACTOR)
        } else {
            svd_split(&cols, DEFAULT_RANK_TOL_FACTOR)
        };
        split.map(|s| s.rank()).unwrap_or(0)
    }

    /// Replaces `C z = t` by an equivalent system with independent rows.
    fn reduce_rows(&mut self) {
        let (rows, cols) = self.c.shape();
        if rows == 0 || cols == 0 {
            self.c = DMatrix::zeros(0, cols);
            self.t = DVector::zeros(0);
            return;
        }
        let (u, sigma, _) = crate::numerics::sorted_svd(&self.c);
        let smax = sigma.amax();
        let threshold = DEFAULT_RANK_TOL_FACTOR * rows.max(cols) as f64 * smax;
        let keep: Vec<usize> = (0..sigma.len())
            .filter(|&i| smax > 0.0 && sigma[i] > threshold)
            .collect();
        let basis = DMatrix::from_fn(rows, keep.len(), |i, j| u[(i, keep[j])]);
        self.c = basis.transpose() * &self.c;
        self.t = basis.transpose() * &self.t;
    }

    /// Phase-1 LP; `None` when the constraints admit no point.
    fn feasible_point(&self) -> Result<Option<DVector<f64>>> {
        let k = self.dim();
        let program = LinearProgram {
            objective: vec![0.0; k],
            eq_matrix: self.c.clone(),
            eq_rhs: self.t.iter().copied().collect(),
            lower: self.lo.iter().copied().collect(),
            upper: self.hi.iter().copied().collect(),
        };
        let solution = lp::solve(&program, lp::DEFAULT_TOL)?;
        Ok(match solution.status {
            LpStatus::Optimal => solution.y_star.map(DVector::from_vec),
            _ => None,
        })
    }

    /// Primal active-set iterations from a feasible start. Returns the
    /// optimum and the equality multipliers.
    fn solve(&self, start: DVector<f64>, tol: f64) -> Result<(DVector<f64>, DVector<f64>)> {
        let k = self.dim();
        let full_rank = self.rank_of(&(0..k).collect::<Vec<_>>());
        let mut z = start;
        let mut state = vec![Bound::Free; k];

        // Working set: bounds the start sits on, kept only while the free
        // columns still span the constraint rows.
        let mut free: Vec<usize> = (0..k).collect();
        for i in 0..k {
            let side = if z[i] <= self.lo[i] + 1e-12 * (1.0 + self.lo[i].abs()) {
                Bound::Lower
            } else if z[i] >= self.hi[i] - 1e-12 * (1.0 + self.hi[i].abs()) {
                Bound::Upper
            } else {
                continue;
            };
            let trial: Vec<usize> = free.iter().copied().filter(|&j| j != i).collect();
            if self.rank_of(&trial) == full_rank {
                free = trial;
                state[i] = side;
                z[i] = if side == Bound::Lower { self.lo[i] } else { self.hi[i] };
            }
        }

        let limit = 50 * (k + 1) + 100;
        for _ in 0..limit {
            let free: Vec<usize> = (0..k).filter(|&i| state[i] == Bound::Free).collect();
            let z_free = DVector::from_iterator(free.len(), free.iter().map(|&i| z[i]));

            // Null-space step: minimize 1/2 |z_F + p|^2 over C_F p = 0.
            let step_free = if free.is_empty() {
                DVector::zeros(0)
            } else if full_rank == 0 {
                -&z_free
            } else {
                let split = svd_split(&self.columns(&free).transpose(), DEFAULT_RANK_TOL_FACTOR)?;
                let z_basis = &split.null_basis;
                -(z_basis * (z_basis.transpose() * &z_free))
            };
            let scale = 1.0 + z.amax();

            if step_free.amax() <= 1e-12 * scale {
                let lambda = self.multipliers(&free, &z_free)?;
                let grad = self.c.transpose() * &lambda;
                let mut worst: Option<(usize, f64)> = None;
                for i in 0..k {
                    let mu = z[i] - grad[i];
                    let violation = match state[i] {
                        Bound::Lower => -mu,
                        Bound::Upper => mu,
                        Bound::Free => continue,
                    };
                    if violation > tol && worst.is_none_or(|(_, v)| violation > v) {
                        worst = Some((i, violation));
                    }
                }
                match worst {
                    None => return Ok((z, lambda)),
                    Some((i, _)) => state[i] = Bound::Free,
                }
                continue;
            }

            let mut alpha = 1.0;
            let mut blocking: Option<(usize, Bound)> = None;
            for (pos, &i) in free.iter().enumerate() {
                let p = step_free[pos];
                let (room, side) = if p < 0.0 {
                    (z[i] - self.lo[i], Bound::Lower)
                } else if p > 0.0 {
                    (self.hi[i] - z[i], Bound::Upper)
                } else {
                    continue;
                };
                let ratio = room.max(0.0) / p.abs();
                if ratio < alpha {
                    alpha = ratio;
                    blocking = Some((i, side));
                }
            }
            for (pos, &i) in free.iter().enumerate() {
                z[i] = (z[i] + alpha * step_free[pos]).clamp(self.lo[i], self.hi[i]);
            }
            if let Some((i, side)) = blocking {
                state[i] = side;
                z[i] = if side == Bound::Lower { self.lo[i] } else { self.hi[i] };
            }
        }
        Err(Error::CycleLimit { limit })
    }

    /// `lambda` with `C_F^T lambda = z_F`.
    fn multipliers(&self, free: &[usize], z_free: &DVector<f64>) -> Result<DVector<f64>> {
        let rows = self.c.nrows();
        if free.is_empty() {
            return Ok(DVector::zeros(rows));
        }
        let cf_t = self.columns(free).transpose();
        if cf_t.nrows() >= cf_t.ncols() {
            let split = svd_split(&cf_t, DEFAULT_RANK_TOL_FACTOR)?;
            if split.rank() == rows {
                return Ok(pseudo_inverse(&cf_t, &split)? * z_free);
            }
        }
        Ok(crate::numerics::least_squares(&cf_t, z_free))
    }

    fn kkt_residual(&self, z: &DVector<f64>, lambda: &DVector<f64>) -> f64 {
        let t_scale = 1.0 + self.t.amax();
        let mut worst = (&self.c * z - &self.t).amax() / t_scale;
        let grad = self.c.transpose() * lambda;
        for i in 0..self.dim() {
            let mu = z[i] - grad[i];
            let lower_gap = z[i] - self.lo[i];
            let upper_gap = self.hi[i] - z[i];
            worst = worst.max(-lower_gap).max(-upper_gap);
            // Split mu into lower and upper bound multipliers.
            let (mu_lo, mu_hi) = if mu >= 0.0 { (mu, 0.0) } else { (0.0, -mu) };
            worst = worst.max((mu_lo * lower_gap).abs()).max((mu_hi * upper_gap).abs());
        }
        worst
    }
}

/// Minimal-activation muscle forces holding `torque_bias`:
/// `min 1/2 F^T P F  s.t.  -L^T F = tau,  F_p <= F <= F_m`.
///
/// Muscles with `F_m = F_p` stay pinned at `F_p`.
pub fn bias_force(snapshot: &MuscleSnapshot, tol: f64) -> Result<BiasForceResult> {
    snapshot.validate()?;
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidArgument(format!("tol must be positive, got {tol}")));
    }
    let d = snapshot.muscles();
    let torque_map = snapshot.torque_map();

    let active: Vec<usize> = (0..d)
        .filter(|&i| snapshot.f_max[i] > snapshot.f_passive[i])
        .collect();
    let mut rhs = snapshot.torque_bias.clone();
    for i in 0..d {
        if snapshot.f_max[i] <= snapshot.f_passive[i] {
            rhs -= torque_map.column(i) * snapshot.f_passive[i];
        }
    }
    let ranges: Vec<f64> = active
        .iter()
        .map(|&i| snapshot.f_max[i] - snapshot.f_passive[i])
        .collect();
    let mut qp = ScaledQp {
        c: DMatrix::from_fn(torque_map.nrows(), active.len(), |r, j| {
            torque_map[(r, active[j])] * ranges[j]
        }),
        t: rhs,
        lo: DVector::from_fn(active.len(), |j, _| snapshot.f_passive[active[j]] / ranges[j]),
        hi: DVector::from_fn(active.len(), |j, _| snapshot.f_max[active[j]] / ranges[j]),
    };

    let Some(start) = qp.feasible_point()? else {
        return Err(Error::InfeasibleTorque);
    };
    let original = (qp.c.clone(), qp.t.clone());
    qp.reduce_rows();
    let (z, lambda) = qp.solve(start, tol)?;
    let primal = (&original.0 * &z - &original.1).amax() / (1.0 + original.1.amax());

    let mut f_bias = snapshot.f_passive.clone();
    for (j, &i) in active.iter().enumerate() {
        f_bias[i] = (z[j] * ranges[j]).clamp(snapshot.f_passive[i], snapshot.f_max[i]);
    }
    Ok(BiasForceResult {
        f_bias,
        kkt_residual: qp.kkt_residual(&z, &lambda).max(primal),
        objective: 0.5 * z.norm_squared(),
    })
}

/// `1/2 F^T P F` for any force vector, with pinned muscles excluded.
pub fn bias_objective(snapshot: &MuscleSnapshot, forces: &DVector<f64>) -> f64 {
    (0..snapshot.muscles())
        .filter(|&i| snapshot.f_max[i] > snapshot.f_passive[i])
        .map(|i| {
            let z = forces[i] / (snapshot.f_max[i] - snapshot.f_passive[i]);
            0.5 * z * z
        })
        .sum()
}

/// Residual wrench set about the held load: `y in [0, F_m - F_b]`.
pub fn residual_problem(snapshot: &MuscleSnapshot, bias: &BiasForceResult) -> Result<FeasibilityProblem> {
    let d = snapshot.muscles();
    let y_hi = DVector::from_fn(d, |i, _| (snapshot.f_max[i] - bias.f_bias[i]).max(0.0));
    FeasibilityProblem::new(
        snapshot.jacobian_t.clone(),
        snapshot.torque_map(),
        DVector::zeros(d),
        y_hi,
    )
}

/// Residual set with the unshifted lower bound `F_p - F_b`.
pub fn residual_problem_unshifted(
    snapshot: &MuscleSnapshot,
    bias: &BiasForceResult,
) -> Result<FeasibilityProblem> {
    let d = snapshot.muscles();
    let y_hi = DVector::from_fn(d, |i, _| (snapshot.f_max[i] - bias.f_bias[i]).max(0.0));
    let y_lo = DVector::from_fn(d, |i, _| (snapshot.f_passive[i] - bias.f_bias[i]).min(y_hi[i]));
    FeasibilityProblem::new(snapshot.jacobian_t.clone(), snapshot.torque_map(), y_lo, y_hi)
}

/// Total wrench set `y in [F_p, F_m]`, ignoring the held load.
pub fn raw_problem(snapshot: &MuscleSnapshot) -> Result<FeasibilityProblem> {
    FeasibilityProblem::new(
        snapshot.jacobian_t.clone(),
        snapshot.torque_map(),
        snapshot.f_passive.clone(),
        snapshot.f_max.clone(),
    )
}

/// Largest output along a unit `direction`.
pub fn capacity_along(problem: &FeasibilityProblem, direction: &DVector<f64>) -> Result<f64> {
    if direction.len() != problem.output_dim() {
        return Err(Error::Dimension(format!(
            "direction has {} entries, output space is R^{}",
            direction.len(),
            problem.output_dim()
        )));
    }
    if !direction.iter().all(|v| v.is_finite()) {
        return Err(Error::NonFinite);
    }
    if (direction.norm() - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidArgument(format!(
            "direction must have unit norm, got {}",
            direction.norm()
        )));
    }
    let form = ExplicitForm::new(problem, lp::DEFAULT_TOL)?;
    Ok(form.support(direction)?.value)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AssistShare {
    pub human: f64,
    pub robot: f64,
}

/// The human carries `ratio * capacity`, up to the full load; the robot
/// takes the rest.
pub fn assist_share(capacity: f64, ratio: f64, total_load: f64) -> Result<AssistShare> {
    if !(capacity.is_finite() && ratio.is_finite() && total_load.is_finite()) {
        return Err(Error::NonFinite);
    }
    if !(0.0..=1.0).contains(&ratio) || capacity < 0.0 || total_load < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "need 0 <= ratio <= 1 and nonnegative capacity and load, got ratio {ratio}, capacity {capacity}, load {total_load}"
        )));
    }
    let human = (ratio * capacity).clamp(0.0, total_load);
    Ok(AssistShare {
        human,
        robot: total_load - human,
    })
}

/// Random snapshot: `J^T`, `L^T` uniform on `[-1, 1]`, `F_p = 0`,
/// `F_m` uniform on `[100, 1000]`, zero torque bias.
pub fn mock_model(seed: u64, n: usize, d: usize, m: usize) -> Result<MuscleSnapshot> {
    if m == 0 || n < m || d < n {
        return Err(Error::Dimension(format!(
            "mock model needs d >= n >= m >= 1, got d={d}, n={n}, m={m}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let jacobian_t = loop {
        let j = DMatrix::from_fn(n, m, |_, _| rng.random_range(-1.0..=1.0));
        if svd_split(&j, DEFAULT_RANK_TOL_FACTOR)?.rank() == m {
            break j;
        }
    };
    let moment_arm_t = DMatrix::from_fn(n, d, |_, _| rng.random_range(-1.0..=1.0));
    let f_max = DVector::from_fn(d, |_, _| rng.random_range(100.0..=1000.0));
    Ok(MuscleSnapshot {
        jacobian_t,
        moment_arm_t,
        f_passive: DVector::zeros(d),
        f_max,
        torque_bias: DVector::zeros(n),
    })
}
