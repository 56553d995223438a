//! Batch front end: run one configured command and write its artifacts.
//!
//! Exit status is 0 when every requested check passes, 2 when a check fails
//! and 1 on configuration or solver errors, which are also printed to
//! standard error as a JSON object.

use std::path::{Path, PathBuf};

use clap::Parser;
use serde::Serialize;

use crate::config::{CheckSpec, Command, JetsSpec, ProblemSpec, RunConfig, Shape, Source};
use crate::error::{Error, Result};
use crate::io::{write_json, write_jsonl, write_profiles_csv, write_solution_csv};
use crate::jet::{check_chain, sample_jet_stream, ChainReport, JetSpec, StepKind, CORRECTIONS};
use crate::oracle::{Circle, EccentricHarmonic, LevelOracle, RadialMinimal, RadialRing};
use crate::profile::{
    check_affine, check_concave, check_convex, check_endpoint_bound, profile_from_oracle, profile_from_solution,
    CheckKind, CheckReport, HeightProfile, ProfileKind,
};
use crate::solver::{sample_solution, solve, Equation, SupportSolution};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_CHECK_FAILED: i32 = 2;

/// Environment variable capping the number of jet worker threads.
pub const THREADS_ENV: &str = "LEVELCURVE_THREADS";

#[derive(Debug, Parser)]
#[command(name = "levelcurve", version, about = "Level-set curvature checks for convex rings")]
pub struct Cli {
    /// JSON run configuration.
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory; overrides `outputDir` in the config.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Seed for the `jets` command; overrides `jets.seed`.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Suppress the summary on standard output.
    #[arg(long)]
    pub quiet: bool,
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub passed: bool,
    pub artifacts: Vec<PathBuf>,
    pub summary: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SolveSummary {
    pub equation: Equation,
    pub n_theta: usize,
    pub n_t: usize,
    pub residual_norm: f64,
    pub iterations: usize,
    pub grad_max: f64,
    pub grad_max_row: usize,
    pub grad_max_node: usize,
    /// Whether the grid maximum of `|∇u|` sits on `t = 0` or `t = 1`.
    pub grad_max_on_boundary: bool,
    pub min_radius: f64,
}

impl SolveSummary {
    pub fn of(sol: &SupportSolution) -> Self {
        let (k, j) = sol.grad_argmax();
        let min_radius = sol.radii.iter().map(|r| r.min_radius().0).fold(f64::INFINITY, f64::min);
        Self {
            equation: sol.equation,
            n_theta: sol.grid.len(),
            n_t: sol.n_t(),
            residual_norm: sol.residual_norm,
            iterations: sol.iterations,
            grad_max: sol.grad(j, k),
            grad_max_row: k,
            grad_max_node: j,
            grad_max_on_boundary: k == 0 || k + 1 == sol.n_t(),
            min_radius,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
struct ProfileReport {
    command: Command,
    source: Source,
    #[serde(skip_serializing_if = "Option::is_none")]
    solve: Option<SolveSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle: Option<OracleInfo>,
    profiles: Vec<ProfileEnds>,
    checks: Vec<CheckReport>,
    pass: bool,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
struct ProfileEnds {
    kind: ProfileKind,
    f0: f64,
    f1: f64,
    max_abs: f64,
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "handle", rename_all = "camelCase")]
pub enum OracleInfo {
    RadialRing(RadialRing),
    EccentricHarmonic { a: f64, rho: f64, outer: Circle, inner: Circle },
    RadialMinimal(RadialMinimal),
}

enum AnyOracle {
    Ring(RadialRing),
    Eccentric(EccentricHarmonic),
    Minimal(RadialMinimal),
}

impl LevelOracle for AnyOracle {
    fn sample(&self, theta: f64, t: f64) -> crate::oracle::LevelSample {
        match self {
            AnyOracle::Ring(o) => o.sample(theta, t),
            AnyOracle::Eccentric(o) => o.sample(theta, t),
            AnyOracle::Minimal(o) => o.sample(theta, t),
        }
    }
}

impl AnyOracle {
    fn info(&self) -> OracleInfo {
        match self {
            AnyOracle::Ring(o) => OracleInfo::RadialRing(*o),
            AnyOracle::Eccentric(o) => OracleInfo::EccentricHarmonic {
                a: o.a,
                rho: o.rho,
                outer: o.outer,
                inner: o.inner,
            },
            AnyOracle::Minimal(o) => OracleInfo::RadialMinimal(*o),
        }
    }
}

fn as_circle(shape: &Shape) -> Option<Circle> {
    match *shape {
        Shape::Circle { r } => Some(Circle::new(0.0, 0.0, r)),
        Shape::OffsetCircle { r, cx, cy } => Some(Circle::new(cx, cy, r)),
        _ => None,
    }
}

/// The closed-form solution matching a problem, when one is available.
fn oracle_for(problem: &ProblemSpec) -> Result<AnyOracle> {
    let none = || Error::Config("no closed-form solution for this problem; use source \"solve\"".into());
    let (o, i) = match (as_circle(&problem.outer), as_circle(&problem.inner)) {
        (Some(o), Some(i)) => (o, i),
        _ => return Err(none()),
    };
    let concentric = o.cx == i.cx && o.cy == i.cy;
    let n = problem.dimension();
    match problem.equation {
        Equation::PLaplace { p } if concentric => Ok(AnyOracle::Ring(RadialRing::new(n, p, o.r, i.r)?)),
        Equation::HarmonicAxisym3D if concentric => Ok(AnyOracle::Ring(RadialRing::new(3, 2.0, o.r, i.r)?)),
        Equation::PLaplace { p } if p == 2.0 && n == 2 => Ok(AnyOracle::Eccentric(EccentricHarmonic::new(o, i)?)),
        Equation::MinimalSurface if concentric && n == 2 => Ok(AnyOracle::Minimal(RadialMinimal::new(o.r, i.r)?)),
        _ => Err(none()),
    }
}

fn default_kinds(problem: &ProblemSpec) -> Vec<ProfileKind> {
    let mut k = vec![ProfileKind::MaxGradOverK1, ProfileKind::MinLogK1];
    if !problem.is_axisymmetric() {
        k.push(ProfileKind::Gauss2d);
    }
    k
}

fn default_checks(problem: &ProblemSpec) -> Vec<CheckSpec> {
    default_kinds(problem)
        .into_iter()
        .flat_map(|kind| {
            let shape = if kind.expects_convex() {
                CheckKind::Convex
            } else {
                CheckKind::Concave
            };
            [shape, CheckKind::EndpointBound].map(|check| CheckSpec {
                profile: kind,
                check,
                tol: None,
                rel_tol: None,
            })
        })
        .collect()
}

fn run_check(spec: &CheckSpec, profile: &HeightProfile, tol: f64) -> Result<CheckReport> {
    match spec.check {
        CheckKind::Convex => check_convex(profile, tol),
        CheckKind::Concave => check_concave(profile, tol),
        CheckKind::Affine => check_affine(profile, tol),
        CheckKind::EndpointBound => check_endpoint_bound(profile, profile.f0, profile.f1, tol),
    }
}

fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.display().to_string(),
        source,
    })
}

/// Run one configuration, writing artifacts into `out_dir`.
pub fn run(cfg: &RunConfig, out_dir: &Path) -> Result<Outcome> {
    cfg.validate()?;
    create_dir(out_dir)?;
    match cfg.command {
        Command::Solve => run_solve(cfg, out_dir),
        Command::Profile | Command::Check => run_profiles(cfg, out_dir),
        Command::Oracle => run_oracle(cfg, out_dir),
        Command::Jets => run_jets(cfg.jets.as_ref().expect("validated"), out_dir),
    }
}

fn run_solve(cfg: &RunConfig, out: &Path) -> Result<Outcome> {
    let sol = solve(&cfg.problem()?.build()?)?;
    let summary = SolveSummary::of(&sol);
    let (csv, json) = (out.join("solution.csv"), out.join("report.json"));
    write_solution_csv(&sol, &csv)?;
    write_json(&summary, &json)?;
    Ok(Outcome {
        passed: true,
        artifacts: vec![csv, json],
        summary: vec![format!(
            "solve: {} Newton steps, residual {:.3e}, max |grad u| on row {}",
            summary.iterations, summary.residual_norm, summary.grad_max_row
        )],
    })
}

fn run_oracle(cfg: &RunConfig, out: &Path) -> Result<Outcome> {
    let problem = cfg.problem()?;
    let oracle = oracle_for(problem)?;
    let pb = problem.build()?;
    let sol = sample_solution(&oracle, problem.equation, pb.grid, pb.n_t);
    let kinds = default_kinds(problem);
    let profiles = kinds
        .iter()
        .map(|&k| profile_from_oracle(&oracle, &pb.grid, pb.n_t, k, problem.equation.p()))
        .collect::<Result<Vec<_>>>()?;
    let (csv, pcsv, json) = (out.join("solution.csv"), out.join("profile.csv"), out.join("report.json"));
    write_solution_csv(&sol, &csv)?;
    write_profiles_csv(&profiles, &pcsv)?;
    write_json(&oracle.info(), &json)?;
    Ok(Outcome {
        passed: true,
        artifacts: vec![csv, pcsv, json],
        summary: vec![format!("oracle: {}", serde_json::to_string(&oracle.info()).unwrap_or_default())],
    })
}

fn run_profiles(cfg: &RunConfig, out: &Path) -> Result<Outcome> {
    let problem = cfg.problem()?;
    let pb = problem.build()?;
    let checks = if cfg.checks.is_empty() {
        default_checks(problem)
    } else {
        cfg.checks.clone()
    };
    let mut kinds: Vec<ProfileKind> = Vec::new();
    for c in &checks {
        if !kinds.contains(&c.profile) {
            kinds.push(c.profile);
        }
    }
    if cfg.command == Command::Profile && cfg.checks.is_empty() {
        kinds = default_kinds(problem);
    }
    let (solve_summary, oracle_info, profiles) = match cfg.source {
        Source::Solve => {
            let sol = solve(&pb)?;
            let profiles = kinds
                .iter()
                .map(|&k| profile_from_solution(&sol, k))
                .collect::<Result<Vec<_>>>()?;
            (Some(SolveSummary::of(&sol)), None, profiles)
        }
        Source::Exact => {
            let oracle = oracle_for(problem)?;
            let profiles = kinds
                .iter()
                .map(|&k| profile_from_oracle(&oracle, &pb.grid, pb.n_t, k, problem.equation.p()))
                .collect::<Result<Vec<_>>>()?;
            (None, Some(oracle.info()), profiles)
        }
    };
    let dtheta = pb.grid.spacing();
    let mut reports = Vec::new();
    if cfg.command == Command::Check {
        for c in &checks {
            let profile = profiles.iter().find(|p| p.kind == c.profile).expect("profile built");
            let tol = c.tolerance(&cfg.tolerance, profile, dtheta);
            reports.push(run_check(c, profile, tol)?);
        }
    }
    let passed = reports.iter().all(|r| r.pass);
    let report = ProfileReport {
        command: cfg.command,
        source: cfg.source,
        solve: solve_summary,
        oracle: oracle_info,
        profiles: profiles
            .iter()
            .map(|p| ProfileEnds {
                kind: p.kind,
                f0: p.f0,
                f1: p.f1,
                max_abs: p.scale(),
            })
            .collect(),
        checks: reports.clone(),
        pass: passed,
    };
    let (pcsv, json) = (out.join("profile.csv"), out.join("report.json"));
    write_profiles_csv(&profiles, &pcsv)?;
    write_json(&report, &json)?;
    let summary = reports
        .iter()
        .map(|r| {
            format!(
                "{} {:?}: worst {:.3e} at {} (tol {:.3e}) {}",
                r.profile.name(),
                r.kind,
                r.worst_value,
                r.location,
                r.tol_used,
                if r.pass { "PASS" } else { "FAIL" }
            )
        })
        .collect();
    Ok(Outcome {
        passed,
        artifacts: vec![pcsv, json],
        summary,
    })
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct JetsSummary {
    pub jets: JetsSpec,
    pub failures: usize,
    pub worst_identity: f64,
    pub worst_identity_step: String,
    /// Smallest inequality slack divided by its scale.
    pub worst_inequality: f64,
    pub worst_inequality_step: String,
    /// Range of the normalized exploratory bound, when present.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exploratory_range: Option<(f64, f64)>,
    pub corrections: usize,
    pub pass: bool,
}

/// Worker count: `LEVELCURVE_THREADS` if set to a positive integer, else the
/// available parallelism.
pub fn thread_count() -> usize {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

/// Check `count` jets drawn from independent streams of one seed. Output
/// order is the stream order whatever the thread count.
pub fn check_jets(spec: &JetsSpec, threads: usize) -> Vec<ChainReport> {
    let js = JetSpec::new(spec.mode, spec.n, spec.p, spec.alpha, spec.beta);
    let threads = threads.clamp(1, spec.count.max(1));
    let chunk = spec.count.div_ceil(threads).max(1);
    let mut out = Vec::with_capacity(spec.count);
    std::thread::scope(|s| {
        let handles: Vec<_> = (0..spec.count)
            .step_by(chunk)
            .map(|start| {
                let js = &js;
                let end = (start + chunk).min(spec.count);
                s.spawn(move || {
                    (start..end)
                        .map(|k| check_chain(&sample_jet_stream(js, spec.seed, k as u64)))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        for h in handles {
            out.extend(h.join().expect("jet worker panicked"));
        }
    });
    out
}

pub fn summarize_jets(spec: &JetsSpec, reports: &[ChainReport]) -> JetsSummary {
    let mut worst_id = (0.0, String::new());
    let mut worst_ineq = (f64::INFINITY, String::new());
    let mut explore: Option<(f64, f64)> = None;
    for r in reports {
        for s in &r.steps {
            match s.kind {
                StepKind::Identity | StepKind::Vanishing if s.value > worst_id.0 || worst_id.1.is_empty() => {
                    worst_id = (s.value, s.name.clone());
                }
                StepKind::Inequality => {
                    let v = s.value / s.scale.max(f64::MIN_POSITIVE);
                    if v < worst_ineq.0 {
                        worst_ineq = (v, s.name.clone());
                    }
                }
                StepKind::Exploratory => {
                    let (lo, hi) = explore.unwrap_or((s.value, s.value));
                    explore = Some((lo.min(s.value), hi.max(s.value)));
                }
                _ => {}
            }
        }
    }
    let failures = reports.iter().filter(|r| !r.passed()).count();
    JetsSummary {
        jets: *spec,
        failures,
        worst_identity: worst_id.0,
        worst_identity_step: worst_id.1,
        worst_inequality: worst_ineq.0,
        worst_inequality_step: worst_ineq.1,
        exploratory_range: explore,
        corrections: CORRECTIONS.len(),
        pass: failures == 0,
    }
}

fn run_jets(spec: &JetsSpec, out: &Path) -> Result<Outcome> {
    let reports = check_jets(spec, thread_count());
    let summary = summarize_jets(spec, &reports);
    let (jsonl, json) = (out.join("jets.jsonl"), out.join("report.json"));
    write_jsonl(&reports, &jsonl)?;
    write_json(&summary, &json)?;
    Ok(Outcome {
        passed: summary.pass,
        artifacts: vec![jsonl, json],
        summary: vec![format!(
            "jets {:?} n={} p={} alpha={} beta={}: {} of {} failed; worst identity {:.3e} ({}), worst inequality {:.3e} ({})",
            spec.mode,
            spec.n,
            spec.p,
            spec.alpha,
            spec.beta,
            summary.failures,
            spec.count,
            summary.worst_identity,
            summary.worst_identity_step,
            summary.worst_inequality,
            summary.worst_inequality_step
        )],
    })
}

#[derive(Debug, Serialize)]
struct ErrorJson<'a> {
    error: &'a str,
    message: String,
}

/// Parse arguments, run, and map the outcome to an exit status.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            if !e.use_stderr() {
                print!("{e}");
                return EXIT_OK;
            }
            report_error(&Error::Config(e.to_string().trim().to_string()));
            return EXIT_ERROR;
        }
    };
    match execute(&cli) {
        Ok(outcome) => {
            if !cli.quiet {
                for line in &outcome.summary {
                    println!("{line}");
                }
            }
            if outcome.passed {
                EXIT_OK
            } else {
                EXIT_CHECK_FAILED
            }
        }
        Err(e) => {
            report_error(&e);
            EXIT_ERROR
        }
    }
}

fn execute(cli: &Cli) -> Result<Outcome> {
    let mut cfg = RunConfig::load(&cli.config)?;
    if let (Some(seed), Some(j)) = (cli.seed, cfg.jets.as_mut()) {
        j.seed = seed;
    }
    let out = cli
        .out
        .clone()
        .or_else(|| cfg.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("."));
    run(&cfg, &out)
}

fn report_error(e: &Error) {
    let body = ErrorJson {
        error: e.kind(),
        message: e.to_string(),
    };
    eprintln!("{}", serde_json::to_string(&body).unwrap_or_else(|_| e.to_string()));
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::JetMode;

    #[test]
    fn jets_are_independent_of_thread_count() {
        let spec = JetsSpec {
            mode: JetMode::PLaplace,
            n: 3,
            p: 2.0,
            alpha: 0.0,
            beta: 0.0,
            count: 13,
            seed: 4,
        };
        let a = check_jets(&spec, 1);
        let b = check_jets(&spec, 4);
        assert_eq!(a, b);
        assert_eq!(a.len(), 13);
        assert!(summarize_jets(&spec, &a).pass);
    }

    #[test]
    fn oracle_selection() {
        let cfg = RunConfig::from_json(
            r#"{"command":"oracle","problem":{"equation":{"kind":"pLaplace","p":2.0},
            "outer":{"shape":"circle","r":1.0},"inner":{"shape":"offsetCircle","r":0.3,"cx":0.2,"cy":0.0},
            "grid":{"nTheta":16,"nT":9}}}"#,
        )
        .unwrap();
        assert!(matches!(oracle_for(cfg.problem().unwrap()), Ok(AnyOracle::Eccentric(_))));
        let cfg = RunConfig::from_json(
            r#"{"command":"oracle","problem":{"equation":{"kind":"pLaplace","p":3.0},
            "outer":{"shape":"ellipse","a":1.3,"b":1.0},"inner":{"shape":"circle","r":0.3},
            "grid":{"nTheta":16,"nT":9}}}"#,
        )
        .unwrap();
        assert!(matches!(oracle_for(cfg.problem().unwrap()), Err(Error::Config(_))));
    }
}
