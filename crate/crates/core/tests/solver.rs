use levelcurve::oracle::{Circle, EccentricHarmonic, LevelOracle};
use levelcurve::solver::{residual, solve, Equation, NewtonOptions, RingProblem};
use levelcurve::support::{support_of_circle, support_of_ellipse, support_of_offset_circle, CircleSupport};
use levelcurve::Error;

fn ellipse_problem(eq: Equation, n: usize, n_t: usize) -> RingProblem {
    RingProblem::planar(eq, &support_of_ellipse(1.3, 1.0, n).unwrap(), &support_of_circle(0.4, n).unwrap(), n_t).unwrap()
}

fn sup(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    a.iter().flatten().zip(b.iter().flatten()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

#[test]
fn eccentric_harmonic_matches_oracle() {
    let pb = RingProblem::planar(
        Equation::PLaplace { p: 2.0 },
        &support_of_circle(1.0, 64).unwrap(),
        &support_of_offset_circle(0.3, 0.2, 0.0, 64).unwrap(),
        33,
    )
    .unwrap();
    let sol = solve(&pb).unwrap();
    let e = EccentricHarmonic::new(Circle::new(0.0, 0.0, 1.0), Circle::new(0.2, 0.0, 0.3)).unwrap();
    let mut err: f64 = 0.0;
    for k in 0..sol.n_t() {
        for j in 0..sol.grid.len() {
            err = err.max((sol.h[k][j] - e.sample(sol.grid.theta(j), sol.t[k]).h).abs());
        }
    }
    assert!(err < 1e-3, "sup error {err:e}");
}

#[test]
fn ellipse_converges_quickly_for_each_p() {
    for p in [1.5, 2.0, 3.0] {
        let sol = solve(&ellipse_problem(Equation::PLaplace { p }, 64, 33)).unwrap();
        assert!(sol.residual_norm < 1e-10);
        assert!(sol.iterations <= 30, "p = {p}: {} iterations", sol.iterations);
        let (k, _) = sol.grad_argmax();
        assert!(k == 0 || k == sol.n_t() - 1);
    }
}

#[test]
fn relabelling_levels_preserves_the_residual() {
    for eq in [Equation::PLaplace { p: 1.7 }, Equation::MinimalSurface] {
        let pb = ellipse_problem(eq, 48, 17);
        let h = pb.initial_guess();
        let r = residual(&h, &pb).unwrap();
        // the same surface read from the inner body outwards
        let flipped = RingProblem {
            h_outer: pb.h_inner.clone(),
            h_inner: pb.h_outer.clone(),
            ..pb.clone()
        };
        let hf: Vec<Vec<f64>> = h.iter().rev().cloned().collect();
        let mut rf = residual(&hf, &flipped).unwrap();
        rf.reverse();
        assert!(sup(&r, &rf) < 1e-12, "{:e}", sup(&r, &rf));
    }
}

#[test]
fn translating_both_bodies_translates_the_solution() {
    let eq = Equation::PLaplace { p: 2.5 };
    let base = solve(&ellipse_problem(eq, 64, 33)).unwrap();
    let (vx, vy) = (0.07, -0.04);
    let shift = |s: &CircleSupport| {
        let th = s.grid();
        CircleSupport::new(
            s.values().iter().enumerate().map(|(j, h)| h + vx * th.theta(j).cos() + vy * th.theta(j).sin()).collect(),
        )
        .unwrap()
    };
    let pb = RingProblem::planar(
        eq,
        &shift(&support_of_ellipse(1.3, 1.0, 64).unwrap()),
        &shift(&support_of_circle(0.4, 64).unwrap()),
        33,
    )
    .unwrap();
    let moved = solve(&pb).unwrap();
    let expected: Vec<Vec<f64>> = base
        .h
        .iter()
        .map(|row| {
            row.iter()
                .enumerate()
                .map(|(j, h)| h + vx * base.grid.theta(j).cos() + vy * base.grid.theta(j).sin())
                .collect()
        })
        .collect();
    assert!(sup(&moved.h, &expected) < 1e-9);
    assert!(sup(&moved.h_t, &base.h_t) < 1e-8);
}

#[test]
fn rotating_the_ring_rotates_the_solution() {
    let eq = Equation::MinimalSurface;
    let outer = support_of_ellipse(3.6, 3.0, 64).unwrap();
    let inner = support_of_offset_circle(0.9, 0.5, 0.2, 64).unwrap();
    let base = solve(&RingProblem::planar(eq, &outer, &inner, 33).unwrap()).unwrap();
    let rot = solve(&RingProblem::planar(eq, &outer.rotated(5), &inner.rotated(5), 33).unwrap()).unwrap();
    let expected: Vec<Vec<f64>> = base
        .h
        .iter()
        .map(|row| (0..row.len()).map(|j| rot_index(row, j, 5)).collect())
        .collect();
    assert!(sup(&rot.h, &expected) < 1e-9);
}

fn rot_index(row: &[f64], j: usize, k: usize) -> f64 {
    let n = row.len();
    let rotated = CircleSupport::new(row.to_vec()).unwrap().rotated(k);
    assert_eq!(rotated.values().len(), n);
    rotated.values()[j]
}

#[test]
fn iteration_cap_is_reported() {
    let pb = ellipse_problem(Equation::PLaplace { p: 1.5 }, 48, 17).with_newton(NewtonOptions {
        max_iter: 1,
        ..NewtonOptions::default()
    });
    assert!(matches!(solve(&pb), Err(Error::NewtonDiverged { iterations: 1, .. })));
}
