//! Oracle suites on fixed seeds, for checking an installed build.

use nalgebra::DVector;
use polyfeas_core::baselines::{
    corner_map_oracle, hpsm_pipeline, max_underestimation, random_unit_directions, support_oracle,
};
use polyfeas_core::chull::{HullState, DEFAULT_REL_COPLANAR_TOL};
use polyfeas_core::ichm::{evaluate_form, EvaluateOptions, ExplicitForm, FeasibilityProblem, PolytopeResult};
use polyfeas_core::msk::{bias_force, mock_model, raw_problem, residual_problem};
use polyfeas_core::numerics::bbox_diagonal;
use polyfeas_core::{lp, Error};
use serde::Serialize;

use crate::error::CliError;

#[derive(Debug, Clone, Serialize)]
pub struct CheckRow {
    pub suite: &'static str,
    pub cases: usize,
    /// Worst observed value of the suite's measure.
    pub worst: f64,
    /// The measure passes while it stays at or below this.
    pub tolerance: f64,
    pub passed: bool,
}

/// Deliberate damage applied to every evaluated vertex set, so the suites
/// can be shown to catch a broken build.
#[derive(Debug, Clone, Copy, Default)]
pub struct Fixture {
    /// Fraction by which vertices move toward their centroid.
    pub shrink: f64,
}

impl Fixture {
    pub fn broken() -> Self {
        Self { shrink: 0.05 }
    }

    fn apply(&self, mut vertices: Vec<DVector<f64>>) -> Vec<DVector<f64>> {
        if self.shrink == 0.0 || vertices.is_empty() {
            return vertices;
        }
        let centroid = vertices.iter().fold(DVector::zeros(vertices[0].len()), |acc, v| acc + v)
            / vertices.len() as f64;
        for v in &mut vertices {
            *v = &centroid + (&*v - &centroid) * (1.0 - self.shrink);
        }
        vertices
    }
}

pub fn run(fixture: Fixture) -> Result<Vec<CheckRow>, CliError> {
    Ok(vec![
        corner_map_suite(fixture)?,
        hpsm_containment_suite(fixture)?,
        support_deficit_suite(fixture)?,
        hrep_soundness_suite()?,
    ])
}

fn row(suite: &'static str, cases: usize, worst: f64, tolerance: f64) -> CheckRow {
    CheckRow {
        suite,
        cases,
        worst,
        tolerance,
        passed: cases > 0 && worst <= tolerance,
    }
}

fn solve(form: &ExplicitForm, eps: f64) -> Result<PolytopeResult, CliError> {
    Ok(evaluate_form(form, &EvaluateOptions::with_eps(eps))?)
}

fn max_nearest(from: &[DVector<f64>], to: &[DVector<f64>]) -> f64 {
    from.iter()
        .map(|p| to.iter().map(|q| (p - q).norm()).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max)
}

/// Square problems: the evaluated vertex set equals the hull of all box
/// corners mapped through `A^-1 B`. Measure: Hausdorff distance between the
/// two vertex sets over the polytope diameter.
fn corner_map_suite(fixture: Fixture) -> Result<CheckRow, CliError> {
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for seed in 0..20u64 {
        let d = 3 + (seed as usize % 8);
        let problem = raw_problem(&mock_model(seed, 3, d, 3)?)?;
        let exact = corner_map_oracle(&problem.a, &problem.b, &problem.y_lo, &problem.y_hi)?;
        let scale = bbox_diagonal(&exact);
        let form = ExplicitForm::new(&problem, lp::DEFAULT_TOL)?;
        let got = fixture.apply(solve(&form, 1e-9 * scale)?.vertices);
        let gap = max_nearest(&exact, &got).max(max_nearest(&got, &exact));
        worst = worst.max(gap / scale);
        cases += 1;
    }
    Ok(row("corner map vs ichm", cases, worst, 1e-6))
}

/// The evaluated vertices lie inside the exact polytope from the hyperplane
/// shifting pipeline, and no exact vertex lies more than `eps` beyond a face
/// of the evaluated hull. Measure: worst violation over `eps`.
fn hpsm_containment_suite(fixture: Fixture) -> Result<CheckRow, CliError> {
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for seed in 100..140u64 {
        if cases == 10 {
            break;
        }
        let problem = residual(seed, 5, 10)?;
        let exact = match hpsm_pipeline(&problem) {
            Ok(v) => v,
            // Flat mock zonotopes have no full-dimensional exact hull.
            Err(Error::DegenerateInput { .. }) => continue,
            Err(e) => return Err(e.into()),
        };
        let scale = bbox_diagonal(&exact);
        let eps = 1e-3 * scale;
        let form = ExplicitForm::new(&problem, lp::DEFAULT_TOL)?;
        let got = fixture.apply(solve(&form, eps)?.vertices);

        let exact_hull = HullState::build(&exact, DEFAULT_REL_COPLANAR_TOL)?;
        let got_hull = HullState::build(&got, DEFAULT_REL_COPLANAR_TOL)?;
        let outside = |hull: &HullState, p: &DVector<f64>| {
            hull.faces().iter().map(|f| f.signed_distance(p)).fold(f64::NEG_INFINITY, f64::max)
        };
        for v in &got {
            worst = worst.max(outside(&exact_hull, v) / eps - 1e-4);
        }
        for v in &exact {
            worst = worst.max(outside(&got_hull, v) / eps - 1.0);
        }
        cases += 1;
    }
    Ok(row("hpsm containment", cases, worst, 0.0))
}

/// Support deficits of the evaluated hull over 500 random directions stay
/// within `eps`. Measure: worst deficit over `eps`.
fn support_deficit_suite(fixture: Fixture) -> Result<CheckRow, CliError> {
    let eps = 1.0;
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for seed in 200..206u64 {
        let problem = residual(seed, 7, 20 + 4 * (seed as usize - 200))?;
        let form = ExplicitForm::new(&problem, lp::DEFAULT_TOL)?;
        let got = fixture.apply(solve(&form, eps)?.vertices);
        let directions = random_unit_directions(seed, 500, 3);
        let support = support_oracle(&form, &directions)?;
        worst = worst.max(max_underestimation(&support, &directions, &got) / eps);
        cases += 1;
    }
    Ok(row("support deficits", cases, worst, 1.0))
}

/// Every recorded face is within `eps` of a supporting plane. Measure: worst
/// LP optimum past the recorded offset, over `eps`.
fn hrep_soundness_suite() -> Result<CheckRow, CliError> {
    let eps = 1.0;
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for seed in 300..304u64 {
        let problem = residual(seed, 7, 20)?;
        let form = ExplicitForm::new(&problem, lp::DEFAULT_TOL)?;
        let result = solve(&form, eps)?;
        for i in 0..result.hrep_offsets.len() {
            let normal = result.hrep_normals.row(i).transpose();
            let excess = form.support(&normal)?.value - result.hrep_offsets[i];
            worst = worst.max(excess / eps);
        }
        cases += 1;
    }
    Ok(row("h-rep soundness", cases, worst, 1.0))
}

fn residual(seed: u64, n: usize, d: usize) -> Result<FeasibilityProblem, CliError> {
    let snapshot = mock_model(seed, n, d, 3)?;
    let bias = bias_force(&snapshot, 1e-10)?;
    Ok(residual_problem(&snapshot, &bias)?)
}

pub fn table(rows: &[CheckRow]) -> String {
    let mut out = format!("{:<22} {:>5} {:>12} {:>10}  result\n", "suite", "cases", "worst", "tolerance");
    for r in rows {
        out += &format!(
            "{:<22} {:>5} {:>12.3e} {:>10.1e}  {}\n",
            r.suite,
            r.cases,
            r.worst,
            r.tolerance,
            if r.passed { "PASS" } else { "FAIL" }
        );
    }
    out
}
