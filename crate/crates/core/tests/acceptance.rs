//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Built with `harness = false` so the lines always show.

mod common;

use std::time::Instant;

use common::{brute_force_bias, hull_support, random_problem, scale, small_snapshot, square_problem};
use nalgebra::DVector;
use polyfeas_core::baselines::{
    corner_map_oracle, hpsm_pipeline, max_underestimation, membership_gap, random_unit_directions,
    rsm_approximate, support_oracle, RayGrid,
};
use polyfeas_core::chull::{HullState, DEFAULT_REL_COPLANAR_TOL};
use polyfeas_core::ichm::{evaluate, EvaluateOptions, ExplicitForm, FeasibilityProblem, PolytopeStatus};
use polyfeas_core::lp::DEFAULT_TOL;
use polyfeas_core::msk::{bias_force, mock_model, residual_problem, residual_problem_unshifted};
use polyfeas_core::numerics::bbox_diagonal;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Fixed direction set shared by the deficit checks.
const DIRECTION_SEED: u64 = 0xd1_5ec7;

struct Outcome {
    pass: bool,
    detail: String,
}

fn residual_mock(seed: u64, d: usize) -> FeasibilityProblem {
    let s = mock_model(seed, 7, d, 3).unwrap();
    let bias = bias_force(&s, 1e-10).unwrap();
    residual_problem(&s, &bias).unwrap()
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let k = v.len();
    if k % 2 == 1 {
        v[k / 2]
    } else {
        0.5 * (v[k / 2 - 1] + v[k / 2])
    }
}

/// `eps` at half a percent of the bounding-box diagonal.
fn relative_eps(p: &FeasibilityProblem) -> f64 {
    let form = ExplicitForm::new(p, DEFAULT_TOL).unwrap();
    0.005 * scale(&form, p.output_dim()).unwrap()
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut bad = Vec::new();
    let mut worst_gap: f64 = 0.0;
    for seed in 0..50 {
        let p = square_problem(seed);
        let exact = corner_map_oracle(&p.a, &p.b, &p.y_lo, &p.y_hi).unwrap();
        let s = bbox_diagonal(&exact);
        let r = evaluate(&p, &EvaluateOptions::with_eps(1e-6 * s)).unwrap();
        let matched = r.vertices.len() == exact.len()
            && exact.iter().all(|e| r.vertices.iter().any(|v| (e - v).norm() <= 1e-5))
            && r.vertices.iter().all(|v| exact.iter().any(|e| (e - v).norm() <= 1e-5));
        let gap = random_unit_directions(DIRECTION_SEED, 500, 3)
            .iter()
            .map(|c| (hull_support(&exact, c) - hull_support(&r.vertices, c)).abs())
            .fold(0.0, f64::max);
        worst_gap = worst_gap.max(gap);
        if !matched || gap > 1e-5 || r.status != PolytopeStatus::Converged {
            bad.push(seed);
        }
    }
    let secs = start.elapsed().as_secs_f64();
    Outcome {
        pass: bad.is_empty() && secs < 30.0,
        detail: format!("50 problems, failing seeds {bad:?}, worst support gap {worst_gap:.2e}, {secs:.1} s"),
    }
}

fn eps_completeness() -> Outcome {
    let start = Instant::now();
    let dirs = random_unit_directions(DIRECTION_SEED, 200, 3);
    let mut bad = Vec::new();
    let mut worst: f64 = f64::NEG_INFINITY;
    for seed in 0..50u64 {
        let d = if seed < 25 { 20 } else { 40 };
        let p = residual_mock(seed, d);
        let form = ExplicitForm::new(&p, DEFAULT_TOL).unwrap();
        let support = support_oracle(&form, &dirs).unwrap();
        for eps in [0.1, 1.0, 10.0] {
            let r = evaluate(&p, &EvaluateOptions::with_eps(eps)).unwrap();
            let deficit = max_underestimation(&support, &dirs, &r.vertices);
            worst = worst.max(deficit - eps);
            if deficit > eps + 1e-7 {
                bad.push((seed, eps));
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    Outcome {
        pass: bad.is_empty() && secs < 300.0,
        detail: format!(
            "50 problems x 3 eps, failing {bad:?}, worst (deficit - eps) {worst:.3e}, {secs:.1} s"
        ),
    }
}

fn time_ichm(p: &FeasibilityProblem, eps: f64) -> f64 {
    let start = Instant::now();
    let r = evaluate(p, &EvaluateOptions::with_eps(eps)).unwrap();
    assert_eq!(r.status, PolytopeStatus::Converged);
    start.elapsed().as_secs_f64()
}

/// Least-squares slope of `ln y` against `ln x`.
fn log_log_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let mx = lx.iter().sum::<f64>() / lx.len() as f64;
    let my = ly.iter().sum::<f64>() / ly.len() as f64;
    let num: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let den: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    num / den
}

fn scaling_shape() -> Outcome {
    let sizes = [20usize, 30, 40, 50, 60];
    let mut medians = Vec::new();
    for &d in &sizes {
        let mut times = Vec::new();
        for seed in 0..7 {
            let p = residual_mock(1000 + seed, d);
            let eps = relative_eps(&p);
            time_ichm(&p, eps);
            times.push(time_ichm(&p, eps));
        }
        medians.push(median(times));
    }
    let x: Vec<f64> = sizes.iter().map(|&d| d as f64).collect();
    let slope = log_log_slope(&x, &medians);

    let hpsm_sizes = [8usize, 10, 12, 14];
    let mut hpsm = Vec::new();
    for &d in &hpsm_sizes {
        // Seeds whose polytope is flat make the pipeline stop early, so
        // the first three full-dimensional ones are timed.
        let mut times = Vec::new();
        let mut seed = 2000;
        while times.len() < 3 {
            let p = residual_mock(seed, d);
            seed += 1;
            let start = Instant::now();
            if hpsm_pipeline(&p).is_ok() {
                times.push(start.elapsed().as_secs_f64());
            }
        }
        hpsm.push(median(times));
    }
    let ratios: Vec<f64> = hpsm.windows(2).map(|w| w[1] / w[0]).collect();
    let pass = (0.5..=1.8).contains(&slope) && ratios.iter().all(|&r| r > 1.5);
    Outcome {
        pass,
        detail: format!(
            "ichm slope {slope:.2} (medians ms {:?}), hpsm step ratios {:?}",
            medians.iter().map(|t| format!("{:.2}", t * 1e3)).collect::<Vec<_>>(),
            ratios.iter().map(|r| format!("{r:.2}")).collect::<Vec<_>>()
        ),
    }
}

fn throughput() -> Outcome {
    let mut times = Vec::new();
    for seed in 0..7 {
        let p = residual_mock(3000 + seed, 32);
        times.push(time_ichm(&p, relative_eps(&p)));
    }
    let med = median(times);
    Outcome {
        pass: med <= 1.0,
        detail: format!("d = 32 median {:.2} ms", med * 1e3),
    }
}

fn rsm_comparison() -> Outcome {
    let dirs = random_unit_directions(DIRECTION_SEED, 200, 3);
    let grid = RayGrid::new(18.0).unwrap();
    let mut rsm_median = Vec::new();
    let mut above = 0;
    let mut runs = 0;
    for d in [20usize, 60] {
        let mut gaps = Vec::new();
        for seed in 0..20 {
            let p = residual_mock(4000 + seed, d);
            let form = ExplicitForm::new(&p, DEFAULT_TOL).unwrap();
            let support = support_oracle(&form, &dirs).unwrap();
            let rsm = rsm_approximate(&p, &grid).unwrap();
            let gap = max_underestimation(&support, &dirs, &rsm);
            let r = evaluate(&p, &EvaluateOptions::with_eps(1.0)).unwrap();
            runs += 1;
            if gap > r.achieved_eps {
                above += 1;
            }
            gaps.push(gap);
        }
        rsm_median.push(median(gaps));
    }
    let share = above as f64 / runs as f64;
    Outcome {
        pass: rsm_median[1] > rsm_median[0] && share >= 0.9,
        detail: format!(
            "rsm median underestimation d=20 {:.2}, d=60 {:.2}; above ichm achieved_eps in {above}/{runs} runs",
            rsm_median[0], rsm_median[1]
        ),
    }
}

fn bias_qp() -> Outcome {
    let mut bad = Vec::new();
    let mut worst_obj: f64 = 0.0;
    let mut worst_kkt: f64 = 0.0;
    for seed in 0..100 {
        let (s, _) = small_snapshot(5000 + seed);
        let r = bias_force(&s, 1e-10).unwrap();
        let (best, _) = brute_force_bias(&s).unwrap();
        let diff = (r.objective - best).abs();
        worst_obj = worst_obj.max(diff);
        worst_kkt = worst_kkt.max(r.kkt_residual);
        if diff > 1e-8 || r.kkt_residual > 1e-6 {
            bad.push(5000 + seed);
        }
    }
    Outcome {
        pass: bad.is_empty(),
        detail: format!(
            "100 snapshots, failing seeds {bad:?}, worst objective gap {worst_obj:.1e}, worst KKT {worst_kkt:.1e}"
        ),
    }
}

fn random_cloud(seed: u64) -> Vec<DVector<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = rng.random_range(1..=3usize);
    let count = rng.random_range(dim + 1..=120usize);
    (0..count)
        .map(|_| DVector::from_fn(dim, |_, _| rng.random_range(-10.0..10.0)))
        .collect()
}

fn hull_equivalence(seed: u64) -> bool {
    let points = random_cloud(seed);
    let dim = points[0].len();
    let Ok(batch) = HullState::build(&points, DEFAULT_REL_COPLANAR_TOL) else {
        return false;
    };
    let Some((mut inc, start)) = (dim + 1..=points.len())
        .find_map(|k| HullState::build(&points[..k], DEFAULT_REL_COPLANAR_TOL).ok().map(|h| (h, k)))
    else {
        return false;
    };
    for p in &points[start..] {
        if inc.insert(p).is_err() {
            return false;
        }
    }
    let a = batch.vertices();
    let b = inc.vertices();
    a.len() == b.len()
        && a.iter().all(|p| b.iter().any(|q| (p - q).norm() <= 1e-9))
        && (batch.volume() - inc.volume()).abs() <= 1e-9 * batch.volume().max(1.0)
}

fn property_suites() -> Outcome {
    const TRIALS: u64 = 1000;
    let base = 6000;
    let mut hull_bad = Vec::new();
    let mut vertex_bad = Vec::new();
    let mut origin_bad = Vec::new();
    let mut hrep_bad = Vec::new();
    for seed in base..base + TRIALS {
        if !hull_equivalence(seed) {
            hull_bad.push(seed);
        }

        let p = random_problem(seed, false);
        let m = p.output_dim();
        let form = ExplicitForm::new(&p, DEFAULT_TOL).unwrap();
        if let Some(s) = scale(&form, m) {
            let eps = 1e-3 * s;
            let r = evaluate(&p, &EvaluateOptions::with_eps(eps)).unwrap();
            if r.vertices.iter().any(|v| membership_gap(&form, v).unwrap() > 1e-7) {
                vertex_bad.push(seed);
            }
            let sound = (0..r.hrep_offsets.len()).all(|i| {
                let n = r.hrep_normals.row(i).transpose();
                form.support(&n).unwrap().value - r.hrep_offsets[i] < eps
            });
            if !sound {
                hrep_bad.push(seed);
            }
        }

        let (snap, _) = small_snapshot(seed);
        let bias = bias_force(&snap, 1e-10).unwrap();
        let zero = DVector::zeros(snap.output_dim());
        for rp in [residual_problem(&snap, &bias).unwrap(), residual_problem_unshifted(&snap, &bias).unwrap()] {
            let rf = ExplicitForm::new(&rp, DEFAULT_TOL).unwrap();
            if membership_gap(&rf, &zero).unwrap() > 1e-6 {
                origin_bad.push(seed);
            }
        }
    }
    let pass = hull_bad.is_empty() && vertex_bad.is_empty() && origin_bad.is_empty() && hrep_bad.is_empty();
    Outcome {
        pass,
        detail: format!(
            "{TRIALS} trials per suite, seeds {base}..{}; failing hull {hull_bad:?}, vertex feasibility {vertex_bad:?}, origin {origin_bad:?}, h-rep {hrep_bad:?}",
            base + TRIALS
        ),
    }
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 7] = [
        ("oracle equivalence", oracle_equivalence),
        ("eps-completeness", eps_completeness),
        ("scaling shape", scaling_shape),
        ("throughput", throughput),
        ("rsm comparison", rsm_comparison),
        ("bias-force qp", bias_qp),
        ("property suites", property_suites),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        let verdict = if outcome.pass { "PASS" } else { "FAIL" };
        if !outcome.pass {
            failed += 1;
        }
        println!("criterion {} {name}: {verdict} ({}; {secs:.1} s)", i + 1, outcome.detail);
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
