//! Argument parsing and the four subcommands.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::thread;
use std::time::{Duration, SystemTime};

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::DVector;
use polyfeas_core::ichm::{evaluate, EvaluateError, EvaluateOptions, FeasibilityProblem, PolytopeResult, PolytopeStatus};
use polyfeas_core::msk::{
    assist_share, bias_force, capacity_along, raw_problem, residual_problem, AssistShare, BiasForceResult,
    MuscleSnapshot, GRAVITY,
};
use serde::Serialize;

use crate::bench::{self, Algorithm, BenchConfig};
use crate::error::CliError;
use crate::io::{status_name, Problem, ProblemFile, ResultFile};
use crate::mesh;
use crate::selfcheck::{self, Fixture};

/// Tolerance for the bias-force QP.
const QP_TOL: f64 = 1e-10;

#[derive(Debug, Parser)]
#[command(name = "polyfeas", version, about = "Feasible-output polytopes of A x = B y over a box of inputs")]
pub struct Cli {
    /// Output style for summaries on stdout.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Worker threads for `bench`.
    #[arg(long, global = true, env = "POLYFEAS_THREADS")]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate the polytope of a problem file.
    Solve(SolveArgs),
    /// Time ichm, rsm and the exact pipeline on random mock models; writes CSV.
    Bench(BenchArgs),
    /// Directional wrench capacity of a musculoskeletal snapshot.
    Capacity(CapacityArgs),
    /// Run the oracle suites on fixed seeds.
    Selfcheck(SelfcheckArgs),
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// Problem file (JSON).
    pub input: PathBuf,
    /// Accuracy; defaults to the file's `epsilon`.
    #[arg(long)]
    pub eps: Option<f64>,
    /// Seed for fallback probe directions; defaults to the file's `seed`.
    #[arg(long)]
    pub seed: Option<u64>,
    /// LP budget; the run stops with exit code 5 when it is spent.
    #[arg(long)]
    pub max_lp: Option<usize>,
    /// Face-pass budget.
    #[arg(long)]
    pub max_iterations: Option<usize>,
    /// Result file; stdout when absent.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Also write the hull as an OFF mesh (three-dimensional outputs only).
    #[arg(long)]
    pub mesh: Option<PathBuf>,
    /// For snapshots: use the total set `[F_p, F_m]` instead of the residual
    /// set about the bias force.
    #[arg(long)]
    pub raw: bool,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Joints per mock model.
    #[arg(long, default_value_t = 7)]
    pub n: usize,
    /// Muscle counts.
    #[arg(long, value_delimiter = ',', default_value = "20,40,60")]
    pub d: Vec<usize>,
    /// Runs per configuration.
    #[arg(long, default_value_t = 10)]
    pub seeds: usize,
    /// First seed; run `k` uses `seed + k`.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_delimiter = ',', value_enum, default_value = "ichm,rsm,hpsm_exact")]
    pub algorithms: Vec<Algorithm>,
    /// ICHM accuracies in newtons.
    #[arg(long, value_delimiter = ',', default_value = "0.1,1,10")]
    pub eps: Vec<f64>,
    /// Treat --eps values as fractions of each polytope's bounding-box
    /// diagonal.
    #[arg(long)]
    pub relative_eps: bool,
    /// RSM grid steps in degrees.
    #[arg(long, value_delimiter = ',', default_value = "18")]
    pub delta: Vec<f64>,
    /// LP budget per ICHM run.
    #[arg(long, default_value_t = 1_000_000)]
    pub max_lp: usize,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CapacityArgs {
    /// Snapshot file (JSON, kind "msk"). Ignored with --watch.
    #[arg(required_unless_present = "watch")]
    pub snapshot: Option<PathBuf>,
    /// Direction in output space, comma separated; normalised before use.
    /// Defaults to the last axis.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub direction: Option<Vec<f64>>,
    /// Share of the capacity the human should carry.
    #[arg(long, requires = "load_group")]
    pub ratio: Option<f64>,
    /// Total load in newtons.
    #[arg(long, group = "load_group")]
    pub load: Option<f64>,
    /// Total load in kilograms.
    #[arg(long, group = "load_group", conflicts_with = "load")]
    pub load_kg: Option<f64>,
    /// Capacity of the total set instead of the residual set.
    #[arg(long)]
    pub raw: bool,
    /// Re-read every `*.json` in this directory when it changes and print one
    /// line per update.
    #[arg(long)]
    pub watch: Option<PathBuf>,
    /// Polling period for --watch.
    #[arg(long, default_value_t = 100)]
    pub interval_ms: u64,
    /// Stop watching after this many updates.
    #[arg(long)]
    pub max_updates: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SelfcheckArgs {
    /// Shrink every evaluated vertex set by 5% so the suites must fail.
    #[arg(long)]
    pub break_fixture: bool,
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Solve(args) => solve(args, cli.format),
        Command::Bench(args) => run_bench(args, cli.format, cli.threads),
        Command::Capacity(args) => capacity(args, cli.format),
        Command::Selfcheck(args) => run_selfcheck(args, cli.format),
    }
}

fn print(text: &str) -> Result<(), CliError> {
    let mut out = io::stdout().lock();
    out.write_all(text.as_bytes())
        .and_then(|_| out.flush())
        .map_err(|e| CliError::io(Path::new("<stdout>"), e))
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

fn solve(args: &SolveArgs, format: Format) -> Result<(), CliError> {
    let file = ProblemFile::read(&args.input)?;
    let eps = args
        .eps
        .or(file.epsilon)
        .ok_or_else(|| CliError::Usage("no accuracy given: pass --eps or set epsilon in the file".into()))?;
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(CliError::Usage(format!("--eps must be positive, got {eps}")));
    }
    let defaults = EvaluateOptions::default();
    let seed = args.seed.or(file.seed).unwrap_or(defaults.seed);
    let problem = match file.to_problem()? {
        Problem::Generic(p) => p,
        Problem::Msk(s) if args.raw => raw_problem(&s)?,
        Problem::Msk(s) => residual_problem(&s, &bias_force(&s, QP_TOL)?)?,
    };
    if args.mesh.is_some() && problem.output_dim() != 3 {
        return Err(CliError::Usage(format!(
            "--mesh needs a three-dimensional output space, problem has m = {}",
            problem.output_dim()
        )));
    }
    let options = EvaluateOptions {
        eps,
        seed,
        max_lp: args.max_lp.unwrap_or(defaults.max_lp),
        max_iterations: args.max_iterations.unwrap_or(defaults.max_iterations),
        ..defaults
    };

    let (result, status, failure) = match evaluate(&problem, &options) {
        Ok(r) => {
            let failure = match r.status {
                PolytopeStatus::Converged => None,
                PolytopeStatus::Empty => Some(CliError::Empty),
                PolytopeStatus::Degenerate => Some(CliError::Degenerate(format!(
                    "the feasible set spans fewer than {} dimensions",
                    problem.output_dim()
                ))),
            };
            let status = status_name(r.status);
            (r, status, failure)
        }
        Err(EvaluateError::IterationLimit(partial)) => {
            let e = CliError::Limit(format!(
                "budget exhausted after {} LPs and {} passes; partial result written",
                partial.lp_count, partial.iterations
            ));
            (*partial, "limit", Some(e))
        }
        Err(e) => return Err(e.into()),
    };

    let json = ResultFile::new(&result, status, eps, seed).to_json() + "\n";
    match &args.output {
        Some(path) => {
            write_file(path, &json)?;
            print(&solve_summary(&result, status, format))?;
        }
        None => print(&json)?,
    }
    if let Some(path) = &args.mesh {
        if result.vertices.len() > 3 && status != "degenerate" {
            write_file(path, &mesh::off_string(&result.vertices)?)?;
        }
    }
    failure.map_or(Ok(()), Err)
}

fn solve_summary(result: &PolytopeResult, status: &str, format: Format) -> String {
    match format {
        Format::Text => format!(
            "{status}: {} vertices, {} faces, achieved eps {:.3e}, {} LPs over {} passes\n",
            result.vertices.len(),
            result.hrep_offsets.len(),
            result.achieved_eps,
            result.lp_count,
            result.iterations
        ),
        Format::Json => {
            serde_json::json!({
                "status": status,
                "vertices": result.vertices.len(),
                "faces": result.hrep_offsets.len(),
                "achieved_eps": result.achieved_eps,
                "lp_count": result.lp_count,
                "iterations": result.iterations,
            })
            .to_string()
                + "\n"
        }
    }
}

fn run_bench(args: &BenchArgs, format: Format, threads: Option<usize>) -> Result<(), CliError> {
    let config = BenchConfig {
        n: args.n,
        d_list: args.d.clone(),
        seeds: args.seeds,
        base_seed: args.seed,
        algorithms: args.algorithms.clone(),
        eps_list: args.eps.clone(),
        relative_eps: args.relative_eps,
        delta_list: args.delta.clone(),
        max_lp: args.max_lp,
        threads,
    };
    let rows = bench::run(&config)?;
    match (&args.out, format) {
        (Some(path), _) => {
            let file = fs::File::create(path).map_err(|e| CliError::io(path, e))?;
            bench::write_csv(&rows, io::BufWriter::new(file))?;
            let message = match format {
                Format::Text => format!("{} rows written to {}\n", rows.len(), path.display()),
                Format::Json => serde_json::json!({ "rows": rows.len(), "out": path }).to_string() + "\n",
            };
            print(&message)
        }
        (None, Format::Text) => bench::write_csv(&rows, io::stdout().lock()),
        (None, Format::Json) => print(&(serde_json::to_string_pretty(&rows).expect("rows serialise") + "\n")),
    }
}

#[derive(Debug, Serialize)]
struct CapacityReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    file: Option<String>,
    mode: &'static str,
    f_bias: Vec<f64>,
    bias_objective: f64,
    bias_kkt_residual: f64,
    direction: Vec<f64>,
    capacity_n: f64,
    capacity_kg: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    assist: Option<AssistJson>,
}

#[derive(Debug, Serialize)]
struct AssistJson {
    ratio: f64,
    load_n: f64,
    human_n: f64,
    robot_n: f64,
}

impl CapacityArgs {
    fn load_n(&self) -> Option<f64> {
        self.load.or(self.load_kg.map(|kg| kg * GRAVITY))
    }

    fn unit_direction(&self, m: usize) -> Result<DVector<f64>, CliError> {
        let c = match &self.direction {
            Some(v) => DVector::from_column_slice(v),
            None => {
                let mut c = DVector::zeros(m);
                c[m - 1] = 1.0;
                c
            }
        };
        if c.len() != m {
            return Err(CliError::Usage(format!(
                "direction has {} entries, output space is R^{m}",
                c.len()
            )));
        }
        let norm = c.norm();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(CliError::Usage("direction must be nonzero and finite".into()));
        }
        Ok(c / norm)
    }
}

fn capacity_report(args: &CapacityArgs, snapshot: &MuscleSnapshot) -> Result<CapacityReport, CliError> {
    let bias: BiasForceResult = bias_force(snapshot, QP_TOL)?;
    let problem: FeasibilityProblem = if args.raw {
        raw_problem(snapshot)?
    } else {
        residual_problem(snapshot, &bias)?
    };
    let direction = args.unit_direction(problem.output_dim())?;
    let capacity = capacity_along(&problem, &direction)?;
    let assist = match (args.ratio, args.load_n()) {
        (Some(ratio), Some(load)) => {
            let AssistShare { human, robot } = assist_share(capacity.max(0.0), ratio, load)?;
            Some(AssistJson {
                ratio,
                load_n: load,
                human_n: human,
                robot_n: robot,
            })
        }
        _ => None,
    };
    Ok(CapacityReport {
        file: None,
        mode: if args.raw { "raw" } else { "residual" },
        f_bias: bias.f_bias.iter().copied().collect(),
        bias_objective: bias.objective,
        bias_kkt_residual: bias.kkt_residual,
        direction: direction.iter().copied().collect(),
        capacity_n: capacity,
        capacity_kg: capacity / GRAVITY,
        assist,
    })
}

fn render_capacity(report: &CapacityReport, format: Format, compact: bool) -> String {
    if format == Format::Json {
        let body = if compact {
            serde_json::to_string(report)
        } else {
            serde_json::to_string_pretty(report)
        };
        return body.expect("reports serialise") + "\n";
    }
    let direction: Vec<String> = report.direction.iter().map(|v| format!("{v:.4}")).collect();
    let assist = report.assist.as_ref().map(|a| {
        format!(
            "assist at ratio {} of {:.2} N load: human {:.2} N, robot {:.2} N",
            a.ratio, a.load_n, a.human_n, a.robot_n
        )
    });
    if compact {
        let mut line = format!(
            "{}: {} capacity {:.3} N ({:.3} kg) along [{}]",
            report.file.as_deref().unwrap_or("-"),
            report.mode,
            report.capacity_n,
            report.capacity_kg,
            direction.join(", ")
        );
        if let Some(a) = assist {
            line += "; ";
            line += &a;
        }
        return line + "\n";
    }
    let peak = report.f_bias.iter().fold(0.0, |acc: f64, v| acc.max(v.abs()));
    let mut out = format!(
        "bias force: {} muscles, peak {:.3} N, objective {:.6e}, kkt residual {:.2e}\n",
        report.f_bias.len(),
        peak,
        report.bias_objective,
        report.bias_kkt_residual
    );
    out += &format!(
        "{} capacity along [{}]: {:.3} N ({:.3} kg)\n",
        report.mode,
        direction.join(", "),
        report.capacity_n,
        report.capacity_kg
    );
    if let Some(a) = assist {
        out += &a;
        out.push('\n');
    }
    out
}

fn read_snapshot(path: &Path) -> Result<MuscleSnapshot, CliError> {
    match ProblemFile::read(path)?.to_problem()? {
        Problem::Msk(s) => Ok(s),
        Problem::Generic(_) => Err(CliError::Parse(format!(
            "{}: capacity needs a snapshot (kind \"msk\")",
            path.display()
        ))),
    }
}

fn capacity(args: &CapacityArgs, format: Format) -> Result<(), CliError> {
    if args.ratio.is_some() != args.load_n().is_some() {
        return Err(CliError::Usage("--ratio needs --load or --load-kg, and vice versa".into()));
    }
    match (&args.watch, &args.snapshot) {
        (Some(dir), _) => watch(args, dir, format),
        (None, Some(path)) => {
            let report = capacity_report(args, &read_snapshot(path)?)?;
            print(&render_capacity(&report, format, false))
        }
        (None, None) => Err(CliError::Usage("pass a snapshot file or --watch".into())),
    }
}

/// Polls `dir` and reports every snapshot whose modification time changed.
/// Failing snapshots print an error line and the watch continues.
fn watch(args: &CapacityArgs, dir: &Path, format: Format) -> Result<(), CliError> {
    let mut seen: BTreeMap<PathBuf, SystemTime> = BTreeMap::new();
    let mut updates = 0;
    loop {
        let mut entries: Vec<(PathBuf, SystemTime)> = Vec::new();
        for entry in fs::read_dir(dir).map_err(|e| CliError::io(dir, e))? {
            let path = entry.map_err(|e| CliError::io(dir, e))?.path();
            if path.extension().is_some_and(|e| e == "json") {
                if let Ok(modified) = fs::metadata(&path).and_then(|m| m.modified()) {
                    entries.push((path, modified));
                }
            }
        }
        entries.sort();
        for (path, modified) in entries {
            if seen.get(&path) == Some(&modified) {
                continue;
            }
            seen.insert(path.clone(), modified);
            let line = match read_snapshot(&path).and_then(|s| capacity_report(args, &s)) {
                Ok(mut report) => {
                    report.file = Some(path.display().to_string());
                    render_capacity(&report, format, true)
                }
                Err(e) => match format {
                    Format::Json => e.to_json() + "\n",
                    Format::Text => format!("{}: error: {e}\n", path.display()),
                },
            };
            print(&line)?;
            updates += 1;
            if args.max_updates.is_some_and(|max| updates >= max) {
                return Ok(());
            }
        }
        thread::sleep(Duration::from_millis(args.interval_ms));
    }
}

fn run_selfcheck(args: &SelfcheckArgs, format: Format) -> Result<(), CliError> {
    let fixture = if args.break_fixture {
        Fixture::broken()
    } else {
        Fixture::default()
    };
    let rows = selfcheck::run(fixture)?;
    match format {
        Format::Text => print(&selfcheck::table(&rows))?,
        Format::Json => print(&(serde_json::to_string_pretty(&rows).expect("rows serialise") + "\n"))?,
    }
    let failed = rows.iter().filter(|r| !r.passed).count();
    if failed == 0 {
        Ok(())
    } else {
        Err(CliError::ChecksFailed(failed))
    }
}
