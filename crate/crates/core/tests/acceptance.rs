//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Built with `harness = false` so the lines always reach the terminal. Every
//! fixture writes its artifacts into a directory; the whole suite runs twice and
//! the two directories must match byte for byte.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use levelcurve::cli::{check_jets, summarize_jets};
use levelcurve::config::JetsSpec;
use levelcurve::io::{write_json, write_jsonl, write_profiles_csv, write_solution_csv};
use levelcurve::jet::JetMode;
use levelcurve::oracle::{exact_radial_green, Circle, EccentricHarmonic, LevelOracle, RadialMinimal, RadialRing};
use levelcurve::profile::{
    check_affine, check_concave, check_convex, check_endpoint_bound, profile_from_oracle, profile_from_solution,
    CheckReport, HeightProfile, ProfileKind,
};
use levelcurve::solver::{solve, Equation, RingProblem, SupportSolution};
use levelcurve::stencil::ThetaGrid;
use levelcurve::support::{
    support_of_circle, support_of_ellipse, support_of_offset_circle, support_of_sphere, support_of_spheroid,
};

const AFFINE_TOL: f64 = 1e-10;
const CONCENTRIC_ERR: f64 = 1e-3;
const CONVERGENCE_RATIO: f64 = 3.0;
/// Errors below this are round-off; the ratio test is meaningless there.
const ROUND_OFF: f64 = 1e-12;
const REL_TOL_2D: f64 = 1e-3;
const REL_TOL_AXISYM: f64 = 2e-3;
const ORACLE_TOL: f64 = 1e-3;
const JET_COUNT: usize = 1000;

struct Line {
    id: &'static str,
    pass: bool,
    detail: String,
}

struct Suite {
    dir: PathBuf,
    threads: usize,
    lines: Vec<Line>,
    /// Solutions checked by the maximum-principle criterion.
    argmax: Vec<(String, usize, usize)>,
}

impl Suite {
    fn new(dir: &Path, threads: usize) -> Self {
        Suite {
            dir: dir.to_path_buf(),
            threads,
            lines: Vec::new(),
            argmax: Vec::new(),
        }
    }

    fn push(&mut self, id: &'static str, pass: bool, detail: String) {
        self.lines.push(Line { id, pass, detail });
    }

    fn solved(&mut self, name: &str, sol: &SupportSolution) {
        let (k, _) = sol.grad_argmax();
        self.argmax.push((name.to_string(), k, sol.n_t()));
        write_solution_csv(sol, &self.dir.join(format!("{name}.solution.csv"))).unwrap();
    }

    fn artifacts(&self, name: &str, profiles: &[HeightProfile], checks: &[CheckReport]) {
        write_profiles_csv(profiles, &self.dir.join(format!("{name}.profile.csv"))).unwrap();
        write_json(checks, &self.dir.join(format!("{name}.checks.json"))).unwrap();
    }
}

fn run_solve(pb: &RingProblem) -> SupportSolution {
    solve(pb).unwrap_or_else(|e| panic!("fixture failed to solve: {e}"))
}

fn sup_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn radial_affine(s: &mut Suite) {
    let mut worst_res: f64 = 0.0;
    let mut worst_slope: f64 = 0.0;
    let mut pass = true;
    for (n, p) in [(3, 2.0), (3, 1.5), (4, 3.0), (2, 2.0), (3, 3.0)] {
        let ring = exact_radial_green(n, p, 1.0, 0.5).unwrap();
        let grid = if n == 2 { ThetaGrid::Circle { n: 16 } } else { ThetaGrid::Meridian { m: 8 } };
        let prof = profile_from_oracle(&ring, &grid, 65, ProfileKind::MaxGradOverK1, p).unwrap();
        let rep = check_affine(&prof, AFFINE_TOL).unwrap();
        let slope = rep.slope.unwrap();
        pass &= rep.pass;
        worst_res = worst_res.max(rep.worst_value);
        if p == n as f64 {
            worst_slope = worst_slope.max(slope.abs());
            pass &= slope.abs() < AFFINE_TOL;
        }
        s.artifacts(&format!("radial_n{n}_p{p}"), &[prof], &[rep]);
    }
    s.push(
        "C1 affine maxGradOverK1 on radial rings",
        pass,
        format!("worst residual {worst_res:.2e}, worst |slope| at p=n {worst_slope:.2e} (tol {AFFINE_TOL:.0e})"),
    );
}

fn concentric_error(s: &mut Suite, p: f64, n: usize, n_t: usize) -> f64 {
    let pb = RingProblem::planar(
        Equation::PLaplace { p },
        &support_of_circle(1.0, n).unwrap(),
        &support_of_circle(0.5, n).unwrap(),
        n_t,
    )
    .unwrap();
    let sol = run_solve(&pb);
    s.solved(&format!("concentric_p{p}_{n}x{n_t}"), &sol);
    let ring = RadialRing::new(2, p, 1.0, 0.5).unwrap();
    (0..n_t)
        .flat_map(|k| sol.h[k].iter().map(move |h| (k, *h)))
        .map(|(k, h)| (h - ring.radius(sol.t[k])).abs())
        .fold(0.0, f64::max)
}

fn concentric(s: &mut Suite) {
    let mut pass = true;
    let mut parts = Vec::new();
    for p in [1.5, 2.0, 3.0] {
        let coarse = concentric_error(s, p, 128, 65);
        let fine = concentric_error(s, p, 256, 129);
        let exact = coarse < ROUND_OFF && fine < ROUND_OFF;
        let ratio = coarse / fine;
        pass &= coarse < CONCENTRIC_ERR && (exact || ratio >= CONVERGENCE_RATIO);
        if exact {
            parts.push(format!("p={p}: err {coarse:.1e}/{fine:.1e}, exact to round-off"));
        } else {
            parts.push(format!("p={p}: err {coarse:.1e}, ratio {ratio:.2}"));
        }
    }
    s.push("C2 concentric solve vs radial oracle", pass, parts.join("; "));
}

struct Fixture {
    name: &'static str,
    sol: SupportSolution,
}

fn ellipse_fixtures(s: &mut Suite) -> Vec<Fixture> {
    let mut out = Vec::new();
    for (name, p) in [("ellipse_p1.5", 1.5), ("ellipse_p2", 2.0), ("ellipse_p3", 3.0)] {
        let pb = RingProblem::planar(
            Equation::PLaplace { p },
            &support_of_ellipse(1.3, 1.0, 96).unwrap(),
            &support_of_circle(0.4, 96).unwrap(),
            49,
        )
        .unwrap();
        let sol = run_solve(&pb);
        s.solved(name, &sol);
        out.push(Fixture { name, sol });
    }
    let pb = RingProblem::planar(
        Equation::PLaplace { p: 2.0 },
        &support_of_circle(1.0, 128).unwrap(),
        &support_of_offset_circle(0.3, 0.2, 0.0, 128).unwrap(),
        65,
    )
    .unwrap();
    let sol = run_solve(&pb);
    s.solved("eccentric_p2", &sol);
    out.push(Fixture {
        name: "eccentric_p2",
        sol,
    });
    out
}

fn convex_with_endpoint(prof: &HeightProfile, rel: f64) -> (CheckReport, CheckReport) {
    let tol = rel * prof.scale();
    let shape = if prof.kind.expects_convex() {
        check_convex(prof, tol).unwrap()
    } else {
        check_concave(prof, tol).unwrap()
    };
    (shape, check_endpoint_bound(prof, prof.f0, prof.f1, tol).unwrap())
}

fn ellipse_convexity(s: &mut Suite, fx: &[Fixture]) {
    let mut pass = true;
    let mut worst: f64 = 0.0;
    for f in fx {
        let prof = profile_from_solution(&f.sol, ProfileKind::MaxGradOverK1).unwrap();
        let (shape, end) = convex_with_endpoint(&prof, REL_TOL_2D);
        pass &= shape.pass && end.pass;
        worst = worst.max(-shape.worst_value / shape.tol_used).max(end.worst_value / end.tol_used);
        s.artifacts(&format!("{}.maxGradOverK1", f.name), &[prof], &[shape, end]);
    }
    let e = EccentricHarmonic::new(Circle::new(0.0, 0.0, 1.0), Circle::new(0.2, 0.0, 0.3)).unwrap();
    let ecc = &fx.last().unwrap().sol;
    let ps = profile_from_solution(ecc, ProfileKind::MaxGradOverK1).unwrap();
    let po = profile_from_oracle(&e, &ecc.grid, ecc.n_t(), ProfileKind::MaxGradOverK1, 2.0).unwrap();
    let d = sup_diff(&ps.f, &po.f);
    pass &= d < ORACLE_TOL;
    s.push(
        "C3 maxGradOverK1 convex with endpoint bound",
        pass,
        format!(
            "{} fixtures, worst violation/tol {worst:.2e}; eccentric vs oracle profile {d:.2e} (tol {ORACLE_TOL:.0e})",
            fx.len()
        ),
    );
}

fn axisym(s: &mut Suite) {
    let pb = RingProblem::axisym(
        Equation::HarmonicAxisym3D,
        &support_of_spheroid(1.2, 1.0, 96).unwrap(),
        &support_of_sphere(0.4, 96).unwrap(),
        49,
    )
    .unwrap();
    let sol = run_solve(&pb);
    s.solved("spheroid_3d", &sol);
    let prof = profile_from_solution(&sol, ProfileKind::MinLogK1).unwrap();
    let tol = REL_TOL_AXISYM * prof.scale();
    let rep = check_concave(&prof, tol).unwrap();
    let detail = format!("max second difference {:.3e}, tol {:.3e}", rep.worst_value, tol);
    let pass = rep.pass;
    s.artifacts("spheroid_3d.minLogK1", &[prof], &[rep]);
    s.push("C4 axisymmetric minLogK1 concave", pass, detail);
}

fn minimal(s: &mut Suite) {
    let pb = RingProblem::planar(
        Equation::MinimalSurface,
        &support_of_circle(3.0, 128).unwrap(),
        &support_of_offset_circle(0.9, 0.6, 0.0, 128).unwrap(),
        65,
    )
    .unwrap();
    let sol = run_solve(&pb);
    s.solved("minimal_eccentric", &sol);
    let mut pass = true;
    let mut profiles = Vec::new();
    let mut checks = Vec::new();
    let mut parts = Vec::new();
    for kind in [ProfileKind::MaxGradOverK1, ProfileKind::MinLogK1] {
        let prof = profile_from_solution(&sol, kind).unwrap();
        let tol = REL_TOL_2D * prof.scale();
        let rep = if kind.expects_convex() {
            check_convex(&prof, tol).unwrap()
        } else {
            check_concave(&prof, tol).unwrap()
        };
        pass &= rep.pass;
        parts.push(format!("{} {:.2e} (tol {:.2e})", kind.name(), rep.worst_value, tol));
        profiles.push(prof);
        checks.push(rep);
    }
    s.artifacts("minimal_eccentric", &profiles, &checks);

    let m = RadialMinimal::new(3.0, 1.5).unwrap();
    let pb = RingProblem::planar(
        Equation::MinimalSurface,
        &support_of_circle(3.0, 128).unwrap(),
        &support_of_circle(1.5, 128).unwrap(),
        65,
    )
    .unwrap();
    let sol = run_solve(&pb);
    s.solved("minimal_radial", &sol);
    let d = (0..sol.n_t())
        .flat_map(|k| sol.h[k].iter().map(move |h| (k, *h)))
        .map(|(k, h)| (h - m.sample(0.0, sol.t[k]).h).abs())
        .fold(0.0, f64::max);
    pass &= d < ORACLE_TOL;
    parts.push(format!("radial vs catenoid {d:.2e} (tol {ORACLE_TOL:.0e})"));
    s.push("C5 minimal surface rings", pass, parts.join("; "));
}

fn gauss(s: &mut Suite, fx: &[Fixture]) {
    let mut pass = true;
    let mut worst: f64 = f64::NEG_INFINITY;
    for f in fx {
        let prof = profile_from_solution(&f.sol, ProfileKind::Gauss2d).unwrap();
        let tol = REL_TOL_2D * prof.scale();
        let rep = check_concave(&prof, tol).unwrap();
        pass &= rep.pass;
        worst = worst.max(rep.worst_value / tol);
        s.artifacts(&format!("{}.gauss2d", f.name), &[prof], &[rep]);
    }
    s.push(
        "C6 gauss2d concave",
        pass,
        format!("{} fixtures, worst second difference/tol {worst:.2e}", fx.len()),
    );
}

fn jets(s: &mut Suite) {
    let mut total = 0;
    let mut failures = 0;
    let mut worst_id: f64 = 0.0;
    let mut worst_ineq = f64::INFINITY;
    let mut seed = 0;
    for mode in [JetMode::PLaplace, JetMode::Minimal] {
        for n in [2, 3, 5] {
            for p in [1.2, 2.0, 3.7] {
                let mut pairs = vec![(-1.0, 1.0)];
                if n == 3 {
                    pairs.push((0.0, 0.0));
                }
                for (alpha, beta) in pairs {
                    seed += 1;
                    let spec = JetsSpec {
                        mode,
                        n,
                        p,
                        alpha,
                        beta,
                        count: JET_COUNT,
                        seed,
                    };
                    let reports = check_jets(&spec, s.threads);
                    let sum = summarize_jets(&spec, &reports);
                    total += reports.len();
                    failures += sum.failures;
                    worst_id = worst_id.max(sum.worst_identity);
                    worst_ineq = worst_ineq.min(sum.worst_inequality);
                    let stem = format!("jets_{mode:?}_n{n}_p{p}_a{alpha}_b{beta}");
                    write_jsonl(&reports, &s.dir.join(format!("{stem}.jsonl"))).unwrap();
                    write_json(&sum, &s.dir.join(format!("{stem}.json"))).unwrap();
                }
            }
        }
    }
    s.push(
        "C7 identity chain on random jets",
        failures == 0,
        format!(
            "{failures} of {total} jets failed; worst identity {worst_id:.2e}, worst normalized slack {worst_ineq:.2e}"
        ),
    );
}

fn max_principle(s: &mut Suite) {
    let off: Vec<String> = s
        .argmax
        .iter()
        .filter(|(_, k, nt)| *k != 0 && *k != nt - 1)
        .map(|(name, k, _)| format!("{name} row {k}"))
        .collect();
    let detail = if off.is_empty() {
        format!("{} solutions, gradient maximum on a boundary row in each", s.argmax.len())
    } else {
        format!("interior maxima: {}", off.join(", "))
    };
    s.push("C8 gradient maximum on the boundary", off.is_empty(), detail);
}

fn run_all(dir: &Path, threads: usize) -> Vec<Line> {
    let mut s = Suite::new(dir, threads);
    radial_affine(&mut s);
    concentric(&mut s);
    let fx = ellipse_fixtures(&mut s);
    ellipse_convexity(&mut s, &fx);
    axisym(&mut s);
    minimal(&mut s);
    gauss(&mut s, &fx);
    jets(&mut s);
    max_principle(&mut s);
    s.lines
}

fn read_dir(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
        })
        .collect()
}

fn main() {
    let started = std::time::Instant::now();
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let mut lines = run_all(a.path(), 1);
    run_all(b.path(), 4);
    let (fa, fb) = (read_dir(a.path()), read_dir(b.path()));
    let differing: Vec<&String> = fa.keys().filter(|k| fa.get(*k) != fb.get(*k)).collect();
    let same_set = fa.len() == fb.len();
    lines.push(Line {
        id: "C9 deterministic artifacts",
        pass: same_set && differing.is_empty(),
        detail: if same_set && differing.is_empty() {
            format!("{} files byte-identical across two runs (1 and 4 jet threads)", fa.len())
        } else {
            format!("differing: {differing:?}")
        },
    });

    let mut failed = 0;
    for l in &lines {
        let tag = if l.pass { "PASS" } else { "FAIL" };
        println!("[{tag}] {}: {}", l.id, l.detail);
        failed += usize::from(!l.pass);
    }
    println!(
        "acceptance: {} of {} criteria passed in {:.1?}",
        lines.len() - failed,
        lines.len(),
        started.elapsed()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
