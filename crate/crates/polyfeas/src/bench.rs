//! Timing, error and vertex-count study over random mock models.
//!
//! Each `(d, seed)` pair fixes one residual wrench problem and 200 probe
//! directions; every algorithm and parameter then runs on that problem.
//! Jobs fan out over a rayon pool and the rows are sorted before writing,
//! so the CSV content apart from `wall_time_ms` depends only on the seeds.

use std::io::Write;
use std::time::Instant;

use nalgebra::DVector;
use polyfeas_core::baselines::{
    hpsm_pipeline, max_underestimation, random_unit_directions, rsm_approximate, support_oracle, RayGrid,
};
use polyfeas_core::ichm::{evaluate, EvaluateError, EvaluateOptions, ExplicitForm, PolytopeResult};
use polyfeas_core::msk::{bias_force, mock_model, residual_problem};
use polyfeas_core::{lp, Error};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::io::status_name;

/// Directions per run used to measure underestimation.
pub const PROBE_DIRECTIONS: usize = 200;
/// Output dimension of the benchmark problems.
pub const OUTPUT_DIM: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, clap::ValueEnum)]
pub enum Algorithm {
    #[value(name = "ichm")]
    Ichm,
    #[value(name = "rsm")]
    Rsm,
    #[value(name = "hpsm_exact")]
    HpsmExact,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Self::Ichm => "ichm",
            Self::Rsm => "rsm",
            Self::HpsmExact => "hpsm_exact",
        }
    }
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    /// Joint count of the mock models.
    pub n: usize,
    pub d_list: Vec<usize>,
    /// Runs per `(algorithm, d, parameter)`.
    pub seeds: usize,
    /// Run `k` uses seed `base_seed + k`.
    pub base_seed: u64,
    pub algorithms: Vec<Algorithm>,
    /// ICHM accuracies.
    pub eps_list: Vec<f64>,
    /// Read `eps_list` as fractions of each polytope's bounding-box diagonal.
    pub relative_eps: bool,
    /// RSM grid steps in degrees.
    pub delta_list: Vec<f64>,
    pub max_lp: usize,
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkRecord {
    pub algorithm: String,
    pub d: usize,
    /// `eps` for ichm (as given, so a fraction with relative accuracies),
    /// grid step for rsm, 0 for hpsm_exact.
    pub parameter: f64,
    pub wall_time_ms: f64,
    pub vertex_count: usize,
    /// Empty when the run produced no vertices.
    pub max_underestimation: Option<f64>,
    pub seed: u64,
    pub status: String,
    pub lp_count: usize,
}

impl BenchConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        if self.n < OUTPUT_DIM || self.d_list.iter().any(|&d| d < self.n) {
            return Err(CliError::Usage(format!(
                "need d >= n >= {OUTPUT_DIM}, got n = {} and d in {:?}",
                self.n, self.d_list
            )));
        }
        if self.eps_list.iter().chain(&self.delta_list).any(|p| !(p.is_finite() && *p > 0.0)) {
            return Err(CliError::Usage("--eps and --delta values must be positive".into()));
        }
        if self.threads == Some(0) {
            return Err(CliError::Usage("--threads must be at least 1".into()));
        }
        Ok(())
    }

    pub fn expected_rows(&self) -> usize {
        let per_problem: usize = self
            .algorithms
            .iter()
            .map(|a| match a {
                Algorithm::Ichm => self.eps_list.len(),
                Algorithm::Rsm => self.delta_list.len(),
                Algorithm::HpsmExact => 1,
            })
            .sum();
        per_problem * self.d_list.len() * self.seeds
    }
}

pub fn run(config: &BenchConfig) -> Result<Vec<BenchmarkRecord>, CliError> {
    config.validate()?;
    let mut algorithms = config.algorithms.clone();
    algorithms.sort();
    algorithms.dedup();

    let jobs: Vec<(usize, u64)> = config
        .d_list
        .iter()
        .flat_map(|&d| (0..config.seeds as u64).map(move |k| (d, config.base_seed.wrapping_add(k))))
        .collect();
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = config.threads {
        builder = builder.num_threads(t);
    }
    let pool = builder
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start worker pool: {e}")))?;

    let per_job: Vec<Result<Vec<BenchmarkRecord>, CliError>> = pool.install(|| {
        jobs.par_iter()
            .map(|&(d, seed)| run_problem(config, &algorithms, d, seed))
            .collect()
    });
    let mut rows = Vec::with_capacity(config.expected_rows());
    for r in per_job {
        rows.extend(r?);
    }
    rows.sort_by(|a, b| {
        (rank(&a.algorithm), a.d)
            .cmp(&(rank(&b.algorithm), b.d))
            .then(a.parameter.total_cmp(&b.parameter))
            .then(a.seed.cmp(&b.seed))
    });
    Ok(rows)
}

/// Diagonal of the axis-aligned bounding box, from `2m` support LPs.
fn box_diagonal(form: &ExplicitForm) -> Result<f64, CliError> {
    let m = form.output_dim();
    let mut sum = 0.0;
    for i in 0..m {
        let axis = DVector::from_fn(m, |k, _| if k == i { 1.0 } else { 0.0 });
        let width = form.support(&axis)?.value + form.support(&-&axis)?.value;
        sum += width * width;
    }
    Ok(sum.sqrt())
}

fn ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

fn rank(name: &str) -> usize {
    ["ichm", "rsm", "hpsm_exact"].iter().position(|n| *n == name).unwrap_or(usize::MAX)
}

fn run_problem(
    config: &BenchConfig,
    algorithms: &[Algorithm],
    d: usize,
    seed: u64,
) -> Result<Vec<BenchmarkRecord>, CliError> {
    let snapshot = mock_model(seed, config.n, d, OUTPUT_DIM)?;
    let bias = bias_force(&snapshot, 1e-10)?;
    let problem = residual_problem(&snapshot, &bias)?;
    let form = ExplicitForm::new(&problem, lp::DEFAULT_TOL)?;
    let directions = random_unit_directions(seed ^ 0xd1e5_7a11, PROBE_DIRECTIONS, OUTPUT_DIM);
    let support = support_oracle(&form, &directions)?;
    let scale = if config.relative_eps { box_diagonal(&form)? } else { 1.0 };

    let record = |algorithm: Algorithm, parameter: f64, elapsed_ms: f64, vertices: &[DVector<f64>], status: &str, lps: usize| {
        BenchmarkRecord {
            algorithm: algorithm.name().into(),
            d,
            parameter,
            wall_time_ms: elapsed_ms,
            vertex_count: vertices.len(),
            max_underestimation: (!vertices.is_empty()).then(|| max_underestimation(&support, &directions, vertices)),
            seed,
            status: status.into(),
            lp_count: lps,
        }
    };

    let mut rows = Vec::new();
    for &algorithm in algorithms {
        match algorithm {
            Algorithm::Ichm => {
                for &eps in &config.eps_list {
                    let options = EvaluateOptions {
                        eps: eps * scale,
                        max_lp: config.max_lp,
                        seed,
                        ..EvaluateOptions::default()
                    };
                    let start = Instant::now();
                    let (result, status): (PolytopeResult, &str) = match evaluate(&problem, &options) {
                        Ok(r) => {
                            let s = status_name(r.status);
                            (r, s)
                        }
                        Err(EvaluateError::IterationLimit(partial)) => (*partial, "limit"),
                        Err(EvaluateError::Problem(e)) => return Err(e.into()),
                    };
                    rows.push(record(algorithm, eps, ms(start), &result.vertices, status, result.lp_count));
                }
            }
            Algorithm::Rsm => {
                for &delta in &config.delta_list {
                    let grid = RayGrid::new(delta)?;
                    let start = Instant::now();
                    let vertices = rsm_approximate(&problem, &grid)?;
                    rows.push(record(algorithm, delta, ms(start), &vertices, "converged", grid.directions.len()));
                }
            }
            Algorithm::HpsmExact => {
                let start = Instant::now();
                let (vertices, status) = match hpsm_pipeline(&problem) {
                    Ok(v) => (v, "converged"),
                    Err(Error::ComplexityGuard { .. }) => (Vec::new(), "skipped"),
                    Err(Error::DegenerateInput { .. }) => (Vec::new(), "degenerate"),
                    Err(e) => return Err(e.into()),
                };
                rows.push(record(algorithm, 0.0, ms(start), &vertices, status, 0));
            }
        }
    }
    Ok(rows)
}

pub fn write_csv<W: Write>(rows: &[BenchmarkRecord], out: W) -> Result<(), CliError> {
    let mut writer = csv::Writer::from_writer(out);
    for r in rows {
        writer.serialize(r).map_err(|e| CliError::Usage(format!("csv: {e}")))?;
    }
    writer.flush().map_err(|e| CliError::Usage(format!("csv: {e}")))
}
