//! Bounded-variable primal simplex for dense programs of the form
//!
//! ```text
//! maximize   objective^T y
//! subject to eq_matrix * y = eq_rhs
//!            lower <= y <= upper
//! ```
//!
//! Nonbasic variables rest at one of their bounds, so box constraints never
//! enter the basis as rows. Phase one drives artificial variables out with a
//! `-sum(artificial)` objective; phase two keeps them pinned to `[0, 0]`.
//! Dantzig pricing is used until a run of degenerate pivots is seen, then
//! Bland's rule takes over until the objective moves again.
//!
//! A program that differs from a solved one only in its objective can start
//! phase two directly from the earlier optimal [`Basis`].

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct LinearProgram {
    /// Maximized.
    pub objective: Vec<f64>,
    /// `k x d` equality rows.
    pub eq_matrix: DMatrix<f64>,
    pub eq_rhs: Vec<f64>,
    pub lower: Vec<f64>,
    /// May be `+inf`; lower bounds must be finite.
    pub upper: Vec<f64>,
}

impl LinearProgram {
    /// Box-only program (no equality rows).
    pub fn boxed(objective: Vec<f64>, lower: Vec<f64>, upper: Vec<f64>) -> Self {
        let d = objective.len();
        Self {
            objective,
            eq_matrix: DMatrix::zeros(0, d),
            eq_rhs: Vec::new(),
            lower,
            upper,
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    fn validate(&self) -> Result<()> {
        let d = self.objective.len();
        let k = self.eq_matrix.nrows();
        if self.eq_matrix.ncols() != d
            || self.eq_rhs.len() != k
            || self.lower.len() != d
            || self.upper.len() != d
        {
            return Err(Error::Dimension(format!(
                "LP with {d} variables: eq_matrix {}x{}, rhs {}, bounds {}/{}",
                self.eq_matrix.nrows(),
                self.eq_matrix.ncols(),
                self.eq_rhs.len(),
                self.lower.len(),
                self.upper.len()
            )));
        }
        let finite = self.objective.iter().all(|v| v.is_finite())
            && self.eq_matrix.iter().all(|v| v.is_finite())
            && self.eq_rhs.iter().all(|v| v.is_finite())
            && self.lower.iter().all(|v| v.is_finite())
            && self.upper.iter().all(|v| !v.is_nan() && *v != f64::NEG_INFINITY);
        if !finite {
            return Err(Error::NonFinite);
        }
        if let Some(j) = (0..d).find(|&j| self.lower[j] > self.upper[j]) {
            return Err(Error::InvalidArgument(format!(
                "lower bound exceeds upper bound for variable {j}"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Present iff `status == Optimal`.
    pub y_star: Option<Vec<f64>>,
    pub objective_value: f64,
    /// Total pivots and bound flips over both phases.
    pub iterations: usize,
    /// Multipliers of the equality rows at the optimal basis.
    pub duals: Vec<f64>,
    /// Final basis, present iff `status == Optimal`.
    pub basis: Option<Basis>,
}

/// Basic columns and upper-bound flags of a simplex vertex. Column indices
/// `>= d` are the artificial columns of the equality rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Basis {
    basic: Vec<usize>,
    at_upper: Vec<bool>,
}

impl LpSolution {
    fn without_point(status: LpStatus, iterations: usize) -> Self {
        Self {
            status,
            y_star: None,
            objective_value: f64::NAN,
            iterations,
            duals: Vec::new(),
            basis: None,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct LpOptions {
    /// Absolute tolerance on residuals and bound violations.
    pub tol: f64,
    /// Pivot cap; `None` means `50 * (d + k)`.
    pub max_iterations: Option<usize>,
}

impl Default for LpOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            max_iterations: None,
        }
    }
}

pub fn solve(lp: &LinearProgram, tol: f64) -> Result<LpSolution> {
    solve_with(
        lp,
        &LpOptions {
            tol,
            ..LpOptions::default()
        },
    )
}

pub fn solve_with(lp: &LinearProgram, options: &LpOptions) -> Result<LpSolution> {
    lp.validate()?;
    let mut tableau = Tableau::new(lp, options);
    tableau.run()
}

/// Like [`solve_with`], starting phase two from `warm` when that basis is
/// still nonsingular and primal feasible for `lp`; otherwise a cold start.
pub fn solve_warm(lp: &LinearProgram, options: &LpOptions, warm: &Basis) -> Result<LpSolution> {
    lp.validate()?;
    if let Some(mut tableau) = Tableau::from_basis(lp, options, warm) {
        return tableau.run_phase_two();
    }
    Tableau::new(lp, options).run()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum VarState {
    Basic,
    AtLower,
    AtUpper,
}

enum PhaseOutcome {
    Optimal,
    Unbounded,
}

struct Tableau<'a> {
    lp: &'a LinearProgram,
    tol: f64,
    opt_tol: f64,
    max_iterations: usize,
    d: usize,
    k: usize,
    /// `B^{-1} [E | diag(sign)]`, row-major `k x (d + k)`.
    t: Vec<f64>,
    /// Reduced costs for the active phase.
    rc: Vec<f64>,
    cost: Vec<f64>,
    x: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    state: Vec<VarState>,
    basis: Vec<usize>,
    art_sign: Vec<f64>,
    iterations: usize,
}

impl<'a> Tableau<'a> {
    fn new(lp: &'a LinearProgram, options: &LpOptions) -> Self {
        let d = lp.num_vars();
        let k = lp.eq_matrix.nrows();
        let n = d + k;

        let mut x = vec![0.0; n];
        let mut state = vec![VarState::AtLower; n];
        let mut lower = lp.lower.clone();
        let mut upper = lp.upper.clone();
        for j in 0..d {
            // Start each structural variable at the bound nearer zero.
            if upper[j].is_finite() && upper[j].abs() < lower[j].abs() {
                x[j] = upper[j];
                state[j] = VarState::AtUpper;
            } else {
                x[j] = lower[j];
            }
        }

        let mut art_sign = vec![1.0; k];
        let mut t = vec![0.0; k * n];
        let mut basis = Vec::with_capacity(k);
        for i in 0..k {
            let mut residual = lp.eq_rhs[i];
            for (j, xj) in x.iter().enumerate().take(d) {
                residual -= lp.eq_matrix[(i, j)] * xj;
            }
            let sign = if residual < 0.0 { -1.0 } else { 1.0 };
            art_sign[i] = sign;
            for j in 0..d {
                t[i * n + j] = sign * lp.eq_matrix[(i, j)];
            }
            t[i * n + d + i] = 1.0;
            x[d + i] = residual.abs();
            state[d + i] = VarState::Basic;
            basis.push(d + i);
        }
        lower.extend(core::iter::repeat_n(0.0, k));
        upper.extend(core::iter::repeat_n(f64::INFINITY, k));

        let obj_scale = lp.objective.iter().fold(1.0, |acc: f64, v| acc.max(v.abs()));
        Self {
            lp,
            tol: options.tol,
            opt_tol: options.tol * obj_scale,
            max_iterations: options.max_iterations.unwrap_or(50 * n.max(1)),
            d,
            k,
            t,
            rc: vec![0.0; n],
            cost: vec![0.0; n],
            x,
            lower,
            upper,
            state,
            basis,
            art_sign,
            iterations: 0,
        }
    }

    fn from_basis(lp: &'a LinearProgram, options: &LpOptions, warm: &Basis) -> Option<Self> {
        let d = lp.num_vars();
        let k = lp.eq_matrix.nrows();
        let n = d + k;
        if warm.basic.len() != k || warm.at_upper.len() != d || warm.basic.iter().any(|&b| b >= n) {
            return None;
        }
        let mut lower = lp.lower.clone();
        let mut upper = lp.upper.clone();
        lower.extend(core::iter::repeat_n(0.0, k));
        upper.extend(core::iter::repeat_n(0.0, k));

        let mut state = vec![VarState::AtLower; n];
        let mut x = vec![0.0; n];
        for j in 0..d {
            if warm.at_upper[j] && upper[j].is_finite() {
                state[j] = VarState::AtUpper;
                x[j] = upper[j];
            } else {
                x[j] = lower[j];
            }
        }
        for &b in &warm.basic {
            state[b] = VarState::Basic;
        }

        let column = |j: usize| -> DVector<f64> {
            if j < d {
                lp.eq_matrix.column(j).into_owned()
            } else {
                let mut c = DVector::zeros(k);
                c[j - d] = 1.0;
                c
            }
        };
        let mut basis_matrix = DMatrix::<f64>::zeros(k, k);
        for (i, &b) in warm.basic.iter().enumerate() {
            basis_matrix.set_column(i, &column(b));
        }
        let inverse = basis_matrix.try_inverse()?;
        let mut full = DMatrix::<f64>::zeros(k, n);
        full.view_mut((0, 0), (k, d)).copy_from(&lp.eq_matrix);
        full.view_mut((0, d), (k, k)).fill_with_identity();
        let body = &inverse * full;
        if body.iter().any(|v| !v.is_finite()) {
            return None;
        }

        let mut rhs = DVector::from_column_slice(&lp.eq_rhs);
        for j in 0..d {
            if state[j] != VarState::Basic && x[j] != 0.0 {
                rhs -= lp.eq_matrix.column(j) * x[j];
            }
        }
        let xb = &inverse * rhs;

        let mut t = vec![0.0; k * n];
        for i in 0..k {
            for j in 0..n {
                t[i * n + j] = body[(i, j)];
            }
        }
        let obj_scale = lp.objective.iter().fold(1.0, |acc: f64, v| acc.max(v.abs()));
        let mut tableau = Self {
            lp,
            tol: options.tol,
            opt_tol: options.tol * obj_scale,
            max_iterations: options.max_iterations.unwrap_or(50 * n.max(1)),
            d,
            k,
            t,
            rc: vec![0.0; n],
            cost: vec![0.0; n],
            x,
            lower,
            upper,
            state,
            basis: warm.basic.clone(),
            art_sign: vec![1.0; k],
            iterations: 0,
        };
        let ftol = tableau.feasibility_tol();
        for (i, &b) in warm.basic.iter().enumerate() {
            if xb[i] < tableau.lower[b] - ftol || xb[i] > tableau.upper[b] + ftol {
                return None;
            }
            tableau.x[b] = xb[i];
        }
        Some(tableau)
    }

    fn n(&self) -> usize {
        self.d + self.k
    }

    fn recompute_reduced_costs(&mut self) {
        let n = self.n();
        for j in 0..n {
            let mut r = self.cost[j];
            for i in 0..self.k {
                r -= self.cost[self.basis[i]] * self.t[i * n + j];
            }
            self.rc[j] = if self.state[j] == VarState::Basic { 0.0 } else { r };
        }
    }

    fn run(&mut self) -> Result<LpSolution> {
        let (d, k) = (self.d, self.k);

        if k > 0 {
            for j in 0..d {
                self.cost[j] = 0.0;
            }
            for i in 0..k {
                self.cost[d + i] = -1.0;
            }
            self.recompute_reduced_costs();
            let saved_opt_tol = self.opt_tol;
            self.opt_tol = self.tol;
            self.iterate()?;
            self.opt_tol = saved_opt_tol;

            let infeasibility: f64 = (0..k).map(|i| self.x[d + i].abs()).sum();
            if infeasibility > self.feasibility_tol() {
                return Ok(LpSolution::without_point(
                    LpStatus::Infeasible,
                    self.iterations,
                ));
            }
            for i in 0..k {
                self.upper[d + i] = 0.0;
                if self.state[d + i] != VarState::Basic {
                    self.x[d + i] = 0.0;
                    self.state[d + i] = VarState::AtLower;
                }
            }
        }

        self.run_phase_two()
    }

    fn run_phase_two(&mut self) -> Result<LpSolution> {
        let (d, k) = (self.d, self.k);
        for j in 0..d {
            self.cost[j] = self.lp.objective[j];
        }
        for i in 0..k {
            self.cost[d + i] = 0.0;
        }
        self.recompute_reduced_costs();
        if let PhaseOutcome::Unbounded = self.iterate()? {
            return Ok(LpSolution::without_point(
                LpStatus::Unbounded,
                self.iterations,
            ));
        }

        let duals = self.polish();
        let y: Vec<f64> = self.x[..d].to_vec();
        let value = y
            .iter()
            .zip(&self.lp.objective)
            .map(|(a, b)| a * b)
            .sum();
        Ok(LpSolution {
            status: LpStatus::Optimal,
            y_star: Some(y),
            objective_value: value,
            iterations: self.iterations,
            duals,
            basis: Some(Basis {
                basic: self.basis.clone(),
                at_upper: self.state[..d]
                    .iter()
                    .map(|s| *s == VarState::AtUpper)
                    .collect(),
            }),
        })
    }

    fn feasibility_tol(&self) -> f64 {
        let bound_scale = self
            .lp
            .lower
            .iter()
            .chain(self.lp.upper.iter().filter(|v| v.is_finite()))
            .fold(1.0, |acc: f64, v| acc.max(v.abs()));
        let entry_scale = self
            .lp
            .eq_matrix
            .iter()
            .chain(self.lp.eq_rhs.iter())
            .fold(1.0, |acc: f64, v| acc.max(v.abs()));
        self.tol * bound_scale * entry_scale
    }

    fn iterate(&mut self) -> Result<PhaseOutcome> {
        let n = self.n();
        let degenerate_limit = 3 * self.d.max(1);
        let mut degenerate_run = 0usize;

        loop {
            let bland = degenerate_run >= degenerate_limit;
            let Some((q, dir)) = self.choose_entering(bland) else {
                return Ok(PhaseOutcome::Optimal);
            };
            if self.iterations >= self.max_iterations {
                return Err(Error::CycleLimit {
                    limit: self.max_iterations,
                });
            }
            self.iterations += 1;

            let col_scale = (0..self.k).fold(1.0, |acc: f64, i| acc.max(self.t[i * n + q].abs()));
            let piv_tol = 1e-9 * col_scale;

            let mut step = self.upper[q] - self.lower[q];
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.k {
                let alpha = dir * self.t[i * n + q];
                if alpha.abs() <= piv_tol {
                    continue;
                }
                let b = self.basis[i];
                let room = if alpha > 0.0 {
                    self.x[b] - self.lower[b]
                } else {
                    self.upper[b] - self.x[b]
                };
                if !room.is_finite() {
                    continue;
                }
                let ratio = room.max(0.0) / alpha.abs();
                let better = match leave {
                    None => ratio < step,
                    Some((r, _)) => {
                        let best = step;
                        if ratio < best - 1e-12 {
                            true
                        } else if ratio <= best + 1e-12 {
                            if bland {
                                b < self.basis[r]
                            } else {
                                alpha.abs() > (dir * self.t[r * n + q]).abs()
                            }
                        } else {
                            false
                        }
                    }
                };
                if better {
                    step = ratio;
                    leave = Some((i, alpha));
                }
            }

            if !step.is_finite() {
                return Ok(PhaseOutcome::Unbounded);
            }

            if step <= 1e-12 {
                degenerate_run += 1;
            } else {
                degenerate_run = 0;
            }

            self.x[q] += dir * step;
            for i in 0..self.k {
                let b = self.basis[i];
                self.x[b] -= dir * step * self.t[i * n + q];
            }

            match leave {
                None => {
                    self.state[q] = match self.state[q] {
                        VarState::AtLower => {
                            self.x[q] = self.upper[q];
                            VarState::AtUpper
                        }
                        _ => {
                            self.x[q] = self.lower[q];
                            VarState::AtLower
                        }
                    };
                }
                Some((r, alpha)) => {
                    let b = self.basis[r];
                    if alpha > 0.0 {
                        self.x[b] = self.lower[b];
                        self.state[b] = VarState::AtLower;
                    } else {
                        self.x[b] = self.upper[b];
                        self.state[b] = VarState::AtUpper;
                    }
                    self.pivot(r, q);
                    self.basis[r] = q;
                    self.state[q] = VarState::Basic;
                }
            }
        }
    }

    fn choose_entering(&self, bland: bool) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64, f64)> = None;
        for j in 0..self.n() {
            if self.upper[j] - self.lower[j] <= 0.0 {
                continue;
            }
            let r = self.rc[j];
            let dir = match self.state[j] {
                VarState::Basic => continue,
                VarState::AtLower if r > self.opt_tol => 1.0,
                VarState::AtUpper if r < -self.opt_tol => -1.0,
                _ => continue,
            };
            if bland {
                return Some((j, dir));
            }
            if best.is_none_or(|(_, _, score)| r.abs() > score) {
                best = Some((j, dir, r.abs()));
            }
        }
        best.map(|(j, dir, _)| (j, dir))
    }

    fn pivot(&mut self, r: usize, q: usize) {
        let n = self.n();
        let pivot = self.t[r * n + q];
        for j in 0..n {
            self.t[r * n + j] /= pivot;
        }
        for i in 0..self.k {
            if i == r {
                continue;
            }
            let factor = self.t[i * n + q];
            if factor == 0.0 {
                continue;
            }
            for j in 0..n {
                self.t[i * n + j] -= factor * self.t[r * n + j];
            }
            self.t[i * n + q] = 0.0;
        }
        let factor = self.rc[q];
        for j in 0..n {
            self.rc[j] -= factor * self.t[r * n + j];
        }
        self.rc[q] = 0.0;
    }

    fn column(&self, j: usize) -> DVector<f64> {
        if j < self.d {
            self.lp.eq_matrix.column(j).into_owned()
        } else {
            let mut c = DVector::zeros(self.k);
            c[j - self.d] = self.art_sign[j - self.d];
            c
        }
    }

    /// Recomputes basic values and row duals from a fresh factorization of
    /// the final basis, removing drift accumulated by tableau updates.
    fn polish(&mut self) -> Vec<f64> {
        let k = self.k;
        if k == 0 {
            return Vec::new();
        }
        let mut basis_matrix = DMatrix::<f64>::zeros(k, k);
        for (i, &b) in self.basis.iter().enumerate() {
            basis_matrix.set_column(i, &self.column(b));
        }
        let mut rhs = DVector::from_column_slice(&self.lp.eq_rhs);
        for j in 0..self.n() {
            if self.state[j] != VarState::Basic && self.x[j] != 0.0 {
                rhs -= self.column(j) * self.x[j];
            }
        }
        let lu = basis_matrix.clone().lu();
        if let Some(xb) = lu.solve(&rhs) {
            if xb.iter().all(|v| v.is_finite()) {
                for (i, &b) in self.basis.iter().enumerate() {
                    self.x[b] = xb[i];
                }
            }
        }
        let cb = DVector::from_iterator(k, self.basis.iter().map(|&b| self.cost[b]));
        basis_matrix
            .transpose()
            .lu()
            .solve(&cb)
            .map(|pi| pi.iter().copied().collect())
            .unwrap_or_default()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lp(obj: &[f64], rows: usize, eq: &[f64], rhs: &[f64], lo: &[f64], hi: &[f64]) -> LinearProgram {
        LinearProgram {
            objective: obj.to_vec(),
            eq_matrix: DMatrix::from_row_slice(rows, obj.len(), eq),
            eq_rhs: rhs.to_vec(),
            lower: lo.to_vec(),
            upper: hi.to_vec(),
        }
    }

    #[test]
    fn box_corner() {
        let p = LinearProgram::boxed(vec![1.0, 0.0], vec![0.0; 2], vec![1.0; 2]);
        let s = solve(&p, DEFAULT_TOL).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert_eq!(s.y_star.as_ref().unwrap()[0], 1.0);
        assert_eq!(s.objective_value, 1.0);
    }

    #[test]
    fn inactive_equality() {
        let p = lp(&[1.0, 0.0], 1, &[0.0, 1.0], &[0.0], &[0.0, 0.0], &[1.0, 1.0]);
        let s = solve(&p, DEFAULT_TOL).unwrap();
        let y = s.y_star.unwrap();
        assert!((y[0] - 1.0).abs() < 1e-12 && y[1].abs() < 1e-12);
        assert!((s.objective_value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn diagonal_segment() {
        // Feasible set is the segment {(0,0), (1,1)}; enumerating its two
        // endpoints gives objective values 0 and 2.
        let p = lp(&[1.0, 1.0], 1, &[1.0, -1.0], &[0.0], &[0.0, 0.0], &[1.0, 1.0]);
        let s = solve(&p, DEFAULT_TOL).unwrap();
        let y = s.y_star.unwrap();
        assert!((y[0] - 1.0).abs() < 1e-12 && (y[1] - 1.0).abs() < 1e-12);
        assert!((s.objective_value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn infeasible_equality() {
        let p = lp(&[1.0, 1.0], 1, &[1.0, 1.0], &[3.0], &[0.0, 0.0], &[1.0, 1.0]);
        let s = solve(&p, DEFAULT_TOL).unwrap();
        assert_eq!(s.status, LpStatus::Infeasible);
        assert!(s.y_star.is_none());
    }

    #[test]
    fn unbounded_with_infinite_upper() {
        let p = LinearProgram::boxed(vec![1.0], vec![0.0], vec![f64::INFINITY]);
        assert_eq!(solve(&p, DEFAULT_TOL).unwrap().status, LpStatus::Unbounded);
    }

    #[test]
    fn rejects_bad_input() {
        let p = LinearProgram::boxed(vec![1.0], vec![1.0], vec![0.0]);
        assert!(matches!(solve(&p, DEFAULT_TOL), Err(Error::InvalidArgument(_))));
        let p = LinearProgram::boxed(vec![f64::NAN], vec![0.0], vec![1.0]);
        assert_eq!(solve(&p, DEFAULT_TOL).unwrap_err(), Error::NonFinite);
        let p = LinearProgram::boxed(vec![1.0, 2.0], vec![0.0], vec![1.0]);
        assert!(matches!(solve(&p, DEFAULT_TOL), Err(Error::Dimension(_))));
    }

    #[test]
    fn redundant_rows() {
        // Second row duplicates the first; an artificial stays basic at zero.
        let p = lp(
            &[1.0, 2.0, 0.0],
            2,
            &[1.0, 1.0, 1.0, 2.0, 2.0, 2.0],
            &[1.0, 2.0],
            &[0.0; 3],
            &[1.0; 3],
        );
        let s = solve(&p, DEFAULT_TOL).unwrap();
        let y = s.y_star.unwrap();
        assert!((y[1] - 1.0).abs() < 1e-12);
        assert!((s.objective_value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn duals_price_the_rows() {
        // max y0 + y1 s.t. y0 + 2 y1 = 2, y in [0, 5]^2: optimum (2, 0), the
        // row multiplier is 1 (y0 prices the row).
        let p = lp(&[1.0, 1.0], 1, &[1.0, 2.0], &[2.0], &[0.0, 0.0], &[5.0, 5.0]);
        let s = solve(&p, DEFAULT_TOL).unwrap();
        assert!((s.objective_value - 2.0).abs() < 1e-12);
        assert!((s.duals[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn iteration_cap() {
        let p = LinearProgram::boxed(vec![1.0, 1.0, 1.0], vec![0.0; 3], vec![1.0; 3]);
        let err = solve_with(
            &p,
            &LpOptions {
                tol: DEFAULT_TOL,
                max_iterations: Some(1),
            },
        )
        .unwrap_err();
        assert_eq!(err, Error::CycleLimit { limit: 1 });
    }

    #[test]
    fn fixed_variables_respected() {
        let p = lp(&[1.0, 1.0], 1, &[1.0, 1.0], &[1.5], &[0.5, 0.0], &[0.5, 3.0]);
        let y = solve(&p, DEFAULT_TOL).unwrap().y_star.unwrap();
        assert_eq!(y[0], 0.5);
        assert!((y[1] - 1.0).abs() < 1e-12);
    }
}
