//! Newton solver for the Dirichlet problem on a convex ring, posed for the
//! support function `h(θ, t)` of the level sets `{u = t}`.
//!
//! In these coordinates the equation reads
//! `h_tt = Σ (c δ_ij + h_ti h_tj) b^{ij}` with `c = s h_t² + κ`:
//! `s = 1/(p-1), κ = 0` for the p-Laplacian and `s = κ = 1` for minimal
//! graphs. On the circle the sum is `(c + h_tθ²)/b`; on a meridian of an
//! axisymmetric body it is `(c + h_tθ²)/b_mer + c/b_par`.
//!
//! Rows `t = 0` and `t = 1` hold the outer and inner supports. Interior rows
//! use central differences in `t` and the fourth-order θ-stencils.

use serde::{Deserialize, Serialize};

use crate::blocktri::BlockTridiag;
use crate::error::{Error, Result};
use crate::oracle::{LevelOracle, LevelSample};
use crate::stencil::{SparseRows, ThetaGrid};
use crate::support::{radii_on_grid, CircleSupport, MeridianSupport, PrincipalRadii, EPS_B};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum Equation {
    PLaplace { p: f64 },
    MinimalSurface,
    /// Laplace equation in ℝ³ for axisymmetric rings; same as `PLaplace { p: 2 }`
    /// on a meridian grid.
    HarmonicAxisym3D,
}

impl Equation {
    /// `(s, κ)` in `c = s h_t² + κ`.
    pub fn coefficients(&self) -> (f64, f64) {
        match *self {
            Equation::PLaplace { p } => (1.0 / (p - 1.0), 0.0),
            Equation::MinimalSurface => (1.0, 1.0),
            Equation::HarmonicAxisym3D => (1.0, 0.0),
        }
    }

    /// Exponent used by the Gaussian-curvature profile; 2 for minimal graphs.
    pub fn p(&self) -> f64 {
        match *self {
            Equation::PLaplace { p } => p,
            _ => 2.0,
        }
    }

    fn validate(&self, grid: &ThetaGrid) -> Result<()> {
        match *self {
            Equation::PLaplace { p } if !(p > 1.0 && p.is_finite()) => {
                Err(Error::InvalidProblem(format!("p must lie in (1, inf), got {p}")))
            }
            Equation::HarmonicAxisym3D if matches!(grid, ThetaGrid::Circle { .. }) => Err(
                Error::InvalidProblem("harmonicAxisym3D needs meridian supports".into()),
            ),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, rename_all = "camelCase")]
pub struct NewtonOptions {
    /// Sup-norm of the residual at convergence.
    pub tol: f64,
    pub max_iter: usize,
    /// Step shrink factor of the backtracking line search.
    pub damping: f64,
    /// Reject iterates whose level sets lose strict convexity.
    pub convexity_guard: bool,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 50,
            damping: 0.5,
            convexity_guard: true,
        }
    }
}

impl NewtonOptions {
    fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) || self.max_iter == 0 || !(self.damping > 0.0 && self.damping < 1.0) {
            return Err(Error::InvalidProblem(format!("bad Newton options {self:?}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RingProblem {
    pub equation: Equation,
    pub grid: ThetaGrid,
    /// Support of the outer body, level `t = 0`.
    pub h_outer: Vec<f64>,
    /// Support of the inner body, level `t = 1`.
    pub h_inner: Vec<f64>,
    pub n_t: usize,
    pub newton: NewtonOptions,
}

impl RingProblem {
    /// Planar ring. The inner support is resampled onto the outer grid.
    pub fn planar(equation: Equation, outer: &CircleSupport, inner: &CircleSupport, n_t: usize) -> Result<Self> {
        let inner = inner.resample(outer.n_theta())?;
        Self::build(equation, outer.grid(), outer.values().to_vec(), inner.values().to_vec(), n_t)
    }

    /// Axisymmetric ring in ℝ³.
    pub fn axisym(
        equation: Equation,
        outer: &MeridianSupport,
        inner: &MeridianSupport,
        n_t: usize,
    ) -> Result<Self> {
        let inner = inner.resample(outer.m_theta())?;
        Self::build(equation, outer.grid(), outer.values().to_vec(), inner.values().to_vec(), n_t)
    }

    fn build(equation: Equation, grid: ThetaGrid, h_outer: Vec<f64>, h_inner: Vec<f64>, n_t: usize) -> Result<Self> {
        equation.validate(&grid)?;
        if n_t < 5 {
            return Err(Error::InvalidProblem(format!("need at least 5 t-levels, got {n_t}")));
        }
        if h_outer == h_inner {
            return Err(Error::InvalidProblem("inner and outer bodies coincide".into()));
        }
        if let Some(j) = (0..h_outer.len()).find(|&j| !(h_inner[j] < h_outer[j])) {
            return Err(Error::InvalidProblem(format!(
                "inner body is not strictly inside the outer one (normal index {j})"
            )));
        }
        for h in [&h_outer, &h_inner] {
            let (min_radius, node) = radii_on_grid(&grid, h).min_radius();
            if !(min_radius > EPS_B) {
                return Err(Error::NonConvexBody { min_radius, node });
            }
        }
        Ok(Self {
            equation,
            grid,
            h_outer,
            h_inner,
            n_t,
            newton: NewtonOptions::default(),
        })
    }

    pub fn with_newton(mut self, newton: NewtonOptions) -> Self {
        self.newton = newton;
        self
    }

    pub fn dt(&self) -> f64 {
        1.0 / (self.n_t - 1) as f64
    }

    pub fn t(&self, k: usize) -> f64 {
        k as f64 * self.dt()
    }

    /// `(1 - t) h_outer + t h_inner`, rows indexed by level.
    pub fn initial_guess(&self) -> Vec<Vec<f64>> {
        (0..self.n_t)
            .map(|k| {
                let t = self.t(k);
                self.h_outer
                    .iter()
                    .zip(&self.h_inner)
                    .map(|(o, i)| (1.0 - t) * o + t * i)
                    .collect()
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SupportSolution {
    pub equation: Equation,
    pub grid: ThetaGrid,
    pub t: Vec<f64>,
    /// `h[k][j] = h(θ_j, t_k)`.
    pub h: Vec<Vec<f64>>,
    /// Central in the interior, second-order one-sided on the boundary rows.
    pub h_t: Vec<Vec<f64>>,
    pub h_ttheta: Vec<Vec<f64>>,
    pub h_tt: Vec<Vec<f64>>,
    pub radii: Vec<PrincipalRadii>,
    pub residual_norm: f64,
    pub iterations: usize,
}

impl SupportSolution {
    pub fn n_t(&self) -> usize {
        self.t.len()
    }

    pub fn value(&self, j: usize, k: usize) -> f64 {
        self.h[k][j]
    }

    /// `|∇u| = -1/h_t`.
    pub fn grad(&self, j: usize, k: usize) -> f64 {
        -1.0 / self.h_t[k][j]
    }

    /// Location `(k, j)` of the grid maximum of `|∇u|`.
    pub fn grad_argmax(&self) -> (usize, usize) {
        let mut best = (f64::NEG_INFINITY, 0, 0);
        for k in 0..self.n_t() {
            for j in 0..self.grid.len() {
                let g = self.grad(j, k);
                if g > best.0 {
                    best = (g, k, j);
                }
            }
        }
        (best.1, best.2)
    }
}

struct Stencils {
    d1: SparseRows,
    d2: SparseRows,
    cot: Vec<f64>,
}

impl Stencils {
    fn new(grid: &ThetaGrid) -> Self {
        let cot = (0..grid.len())
            .map(|j| {
                let th = grid.theta(j);
                if grid.is_pole(j) {
                    0.0
                } else {
                    th.cos() / th.sin()
                }
            })
            .collect();
        Self {
            d1: grid.d1(),
            d2: grid.d2(),
            cot,
        }
    }
}

fn non_convex(iteration: usize, reason: String) -> Error {
    Error::NonConvexIterate { iteration, reason }
}

/// Residual and, on request, its Jacobian with respect to the interior rows.
fn evaluate(
    problem: &RingProblem,
    st: &Stencils,
    h: &[Vec<f64>],
    iteration: usize,
    with_jacobian: bool,
) -> Result<(Vec<Vec<f64>>, Option<BlockTridiag>)> {
    let grid = &problem.grid;
    let nj = grid.len();
    let nt = problem.n_t;
    let dt = problem.dt();
    let (s, kappa) = problem.equation.coefficients();
    let axisym = matches!(grid, ThetaGrid::Meridian { .. });
    let guard = problem.newton.convexity_guard;

    let mut res = Vec::with_capacity(nt - 2);
    let mut lower = Vec::new();
    let mut diag = Vec::new();
    let mut upper = Vec::new();
    for k in 1..nt - 1 {
        let ht: Vec<f64> = (0..nj).map(|j| (h[k + 1][j] - h[k - 1][j]) / (2.0 * dt)).collect();
        let w = st.d1.apply(&ht);
        let d2h = st.d2.apply(&h[k]);
        let d1h = if axisym { st.d1.apply(&h[k]) } else { Vec::new() };
        let mut row = Vec::with_capacity(nj);
        let mut lo = Vec::with_capacity(nj);
        let mut di = Vec::with_capacity(nj);
        let mut up = Vec::with_capacity(nj);
        for j in 0..nj {
            let bm = h[k][j] + d2h[j];
            let pole = grid.is_pole(j);
            let bp = if !axisym || pole { bm } else { h[k][j] + st.cot[j] * d1h[j] };
            if guard && !(bm > EPS_B && bp > EPS_B) {
                return Err(non_convex(
                    iteration,
                    format!("principal radius {:.3e} at node {j}, level {k}", bm.min(bp)),
                ));
            }
            let c = s * ht[j] * ht[j] + kappa;
            let c1 = 2.0 * s * ht[j];
            let mut f = (c + w[j] * w[j]) / bm;
            let mut f_ht = c1 / bm;
            let f_w = 2.0 * w[j] / bm;
            let mut f_bm = -(c + w[j] * w[j]) / (bm * bm);
            let mut f_bp = 0.0;
            if axisym {
                f += c / bp;
                f_ht += c1 / bp;
                if pole {
                    f_bm -= c / (bm * bm);
                } else {
                    f_bp = -c / (bp * bp);
                }
            }
            let htt = (h[k + 1][j] - 2.0 * h[k][j] + h[k - 1][j]) / (dt * dt);
            row.push(htt - f);
            if !with_jacobian {
                continue;
            }
            // dR/dh at rows k-1 and k+1 through h_t and h_tθ
            let mut lrow: Vec<(usize, f64)> = vec![(j, 1.0 / (dt * dt) + f_ht / (2.0 * dt))];
            let mut urow: Vec<(usize, f64)> = vec![(j, 1.0 / (dt * dt) - f_ht / (2.0 * dt))];
            for &(col, wt) in &st.d1.rows[j] {
                push(&mut lrow, col, f_w * wt / (2.0 * dt));
                push(&mut urow, col, -f_w * wt / (2.0 * dt));
            }
            let mut drow: Vec<(usize, f64)> = vec![(j, -2.0 / (dt * dt) - f_bm - f_bp)];
            for &(col, wt) in &st.d2.rows[j] {
                push(&mut drow, col, -f_bm * wt);
            }
            if f_bp != 0.0 {
                for &(col, wt) in &st.d1.rows[j] {
                    push(&mut drow, col, -f_bp * st.cot[j] * wt);
                }
            }
            lo.push(lrow);
            di.push(drow);
            up.push(urow);
        }
        res.push(row);
        if with_jacobian {
            if k > 1 {
                lower.push(SparseRows { rows: lo });
            }
            diag.push(SparseRows { rows: di });
            if k < nt - 2 {
                upper.push(SparseRows { rows: up });
            }
        }
    }
    let jac = with_jacobian.then_some(BlockTridiag { lower, diag, upper });
    Ok((res, jac))
}

fn push(row: &mut Vec<(usize, f64)>, col: usize, v: f64) {
    match row.iter_mut().find(|(c, _)| *c == col) {
        Some(e) => e.1 += v,
        None => row.push((col, v)),
    }
}

fn sup_norm(r: &[Vec<f64>]) -> f64 {
    r.iter().flatten().fold(0.0, |m, v| if v.is_nan() { f64::NAN } else { m.max(v.abs()) })
}

/// `∂h/∂t` on every row: central inside, one-sided second order at the ends.
fn t_derivative(h: &[Vec<f64>], dt: f64) -> Vec<Vec<f64>> {
    let nt = h.len();
    let nj = h[0].len();
    (0..nt)
        .map(|k| {
            (0..nj)
                .map(|j| {
                    if k == 0 {
                        (-3.0 * h[0][j] + 4.0 * h[1][j] - h[2][j]) / (2.0 * dt)
                    } else if k == nt - 1 {
                        (3.0 * h[k][j] - 4.0 * h[k - 1][j] + h[k - 2][j]) / (2.0 * dt)
                    } else {
                        (h[k + 1][j] - h[k - 1][j]) / (2.0 * dt)
                    }
                })
                .collect()
        })
        .collect()
}

fn second_t_derivative(h: &[Vec<f64>], dt: f64) -> Vec<Vec<f64>> {
    let nt = h.len();
    let nj = h[0].len();
    (0..nt)
        .map(|k| {
            (0..nj)
                .map(|j| {
                    let v = if k == 0 {
                        2.0 * h[0][j] - 5.0 * h[1][j] + 4.0 * h[2][j] - h[3][j]
                    } else if k == nt - 1 {
                        2.0 * h[k][j] - 5.0 * h[k - 1][j] + 4.0 * h[k - 2][j] - h[k - 3][j]
                    } else {
                        h[k + 1][j] - 2.0 * h[k][j] + h[k - 1][j]
                    };
                    v / (dt * dt)
                })
                .collect()
        })
        .collect()
}

fn monotone(h: &[Vec<f64>], dt: f64) -> std::result::Result<(), String> {
    for (k, row) in t_derivative(h, dt).iter().enumerate() {
        if let Some(j) = row.iter().position(|v| !(*v < 0.0)) {
            return Err(format!("h_t = {:.3e} >= 0 at node {j}, level {k}", row[j]));
        }
    }
    Ok(())
}

/// Residual `D²_t h - Σ (c δ_ij + h_ti h_tj) b^{ij}` at the interior rows of
/// `h` (rows indexed by level, boundary rows included in the input).
pub fn residual(h: &[Vec<f64>], problem: &RingProblem) -> Result<Vec<Vec<f64>>> {
    if h.len() != problem.n_t || h.iter().any(|r| r.len() != problem.grid.len()) {
        return Err(Error::InvalidProblem("grid shape does not match the problem".into()));
    }
    let st = Stencils::new(&problem.grid);
    Ok(evaluate(problem, &st, h, 0, false)?.0)
}

/// Damped Newton iteration from the linear interpolation of the boundary
/// supports.
pub fn solve(problem: &RingProblem) -> Result<SupportSolution> {
    problem.newton.validate()?;
    let opts = problem.newton;
    let st = Stencils::new(&problem.grid);
    let dt = problem.dt();
    let nt = problem.n_t;
    let mut h = problem.initial_guess();
    let (mut res, mut jac) = evaluate(problem, &st, &h, 0, true)?;
    let mut norm = sup_norm(&res);
    let mut iterations = 0;
    while !(norm <= opts.tol) {
        if iterations == opts.max_iter {
            return Err(Error::NewtonDiverged {
                iterations,
                last_residual: norm,
            });
        }
        iterations += 1;
        let rhs: Vec<Vec<f64>> = res.iter().map(|r| r.iter().map(|v| -v).collect()).collect();
        let step = jac.as_ref().expect("jacobian requested").solve(&rhs)?;
        let mut lambda = 1.0;
        let mut last_reject: Option<Error> = None;
        loop {
            if lambda < 1e-10 {
                return Err(match last_reject {
                    Some(e) if matches!(e, Error::NonConvexIterate { .. }) => e,
                    _ => Error::NewtonDiverged {
                        iterations,
                        last_residual: norm,
                    },
                });
            }
            let mut trial = h.clone();
            for k in 1..nt - 1 {
                for (v, d) in trial[k].iter_mut().zip(&step[k - 1]) {
                    *v += lambda * d;
                }
            }
            let attempt = monotone(&trial, dt)
                .map_err(|reason| non_convex(iterations, reason))
                .and_then(|_| evaluate(problem, &st, &trial, iterations, true));
            match attempt {
                Ok((r, j)) => {
                    let n = sup_norm(&r);
                    if n < norm {
                        h = trial;
                        res = r;
                        jac = j;
                        norm = n;
                        break;
                    }
                    last_reject = None;
                }
                Err(e @ Error::NonConvexIterate { .. }) => last_reject = Some(e),
                Err(e) => return Err(e),
            }
            lambda *= opts.damping;
        }
    }
    finish(problem, h, norm, iterations)
}

/// A closed-form solution sampled on `grid` at `n_t` levels, shaped like a
/// solver result. `h_t` comes from the exact gradient and the radii from the
/// exact level sets.
pub fn sample_solution(oracle: &impl LevelOracle, equation: Equation, grid: ThetaGrid, n_t: usize) -> SupportSolution {
    let st = Stencils::new(&grid);
    let t: Vec<f64> = (0..n_t).map(|k| k as f64 / (n_t - 1) as f64).collect();
    let thetas = grid.thetas();
    let samples: Vec<Vec<LevelSample>> = t
        .iter()
        .map(|&tk| thetas.iter().map(|&th| oracle.sample(th, tk)).collect())
        .collect();
    let h: Vec<Vec<f64>> = samples.iter().map(|r| r.iter().map(|s| s.h).collect()).collect();
    let h_t: Vec<Vec<f64>> = samples.iter().map(|r| r.iter().map(|s| -1.0 / s.grad).collect()).collect();
    let axisym = matches!(grid, ThetaGrid::Meridian { .. });
    let radii = samples
        .iter()
        .map(|r| PrincipalRadii {
            b_meridian: r.iter().map(|s| s.b_min).collect(),
            b_parallel: axisym.then(|| r.iter().map(|s| s.b_max).collect()),
        })
        .collect();
    SupportSolution {
        equation,
        grid,
        h_ttheta: h_t.iter().map(|r| st.d1.apply(r)).collect(),
        h_tt: second_t_derivative(&h, 1.0 / (n_t - 1) as f64),
        t,
        h,
        h_t,
        radii,
        residual_norm: 0.0,
        iterations: 0,
    }
}

fn finish(problem: &RingProblem, h: Vec<Vec<f64>>, residual_norm: f64, iterations: usize) -> Result<SupportSolution> {
    let dt = problem.dt();
    monotone(&h, dt).map_err(|reason| non_convex(iterations, reason))?;
    let st = Stencils::new(&problem.grid);
    let h_t = t_derivative(&h, dt);
    let h_ttheta = h_t.iter().map(|r| st.d1.apply(r)).collect();
    let h_tt = second_t_derivative(&h, dt);
    let radii: Vec<PrincipalRadii> = h.iter().map(|r| radii_on_grid(&problem.grid, r)).collect();
    for (k, b) in radii.iter().enumerate() {
        let (m, j) = b.min_radius();
        if !(m > EPS_B) {
            return Err(non_convex(iterations, format!("principal radius {m:.3e} at node {j}, level {k}")));
        }
    }
    Ok(SupportSolution {
        equation: problem.equation,
        grid: problem.grid,
        t: (0..problem.n_t).map(|k| problem.t(k)).collect(),
        h,
        h_t,
        h_ttheta,
        h_tt,
        radii,
        residual_norm,
        iterations,
    })
}
