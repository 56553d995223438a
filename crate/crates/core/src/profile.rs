//! Height profiles `t ↦ f(t)` of level-set curvature functionals and the
//! discrete convexity, concavity, affineness and chord checks run on them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracle::{LevelOracle, LevelSample};
use crate::solver::SupportSolution;
use crate::stencil::ThetaGrid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum ProfileKind {
    /// `max_Γt |∇u| / k_1`, expected convex.
    MaxGradOverK1,
    /// `min_Γt log k_1`, expected concave.
    MinLogK1,
    /// `min_Γt |∇u|^{3-2p} k` on planar rings, expected concave.
    Gauss2d,
}

impl ProfileKind {
    pub fn name(&self) -> &'static str {
        match self {
            ProfileKind::MaxGradOverK1 => "maxGradOverK1",
            ProfileKind::MinLogK1 => "minLogK1",
            ProfileKind::Gauss2d => "gauss2d",
        }
    }

    /// Whether the functional is expected to be convex (else concave) in `t`.
    pub fn expects_convex(&self) -> bool {
        matches!(self, ProfileKind::MaxGradOverK1)
    }

    /// Extremum over one level of the per-point integrand.
    fn reduce(&self, samples: impl Iterator<Item = LevelSample>, p: f64) -> f64 {
        match self {
            ProfileKind::MaxGradOverK1 => samples.map(|s| s.grad * s.b_max).fold(f64::NEG_INFINITY, f64::max),
            ProfileKind::MinLogK1 => -samples.map(|s| s.b_max).fold(f64::NEG_INFINITY, f64::max).ln(),
            ProfileKind::Gauss2d => samples
                .map(|s| s.grad.powf(3.0 - 2.0 * p) / s.b_max)
                .fold(f64::INFINITY, f64::min),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeightProfile {
    pub kind: ProfileKind,
    /// Interior levels, uniformly spaced.
    pub t: Vec<f64>,
    pub f: Vec<f64>,
    /// Values on the outer (`t = 0`) and inner (`t = 1`) boundaries.
    pub f0: f64,
    pub f1: f64,
}

impl HeightProfile {
    pub fn new(kind: ProfileKind, t: Vec<f64>, f: Vec<f64>, f0: f64, f1: f64) -> Result<Self> {
        if t.len() != f.len() {
            return Err(Error::InvalidProblem("profile t and f lengths differ".into()));
        }
        if t.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidProblem("profile levels must increase".into()));
        }
        if let Some(k) = f.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidProblem(format!("profile value at index {k} is not finite")));
        }
        Ok(Self { kind, t, f, f0, f1 })
    }

    pub fn dt(&self) -> f64 {
        if self.t.len() < 2 {
            0.0
        } else {
            (self.t[self.t.len() - 1] - self.t[0]) / (self.t.len() - 1) as f64
        }
    }

    pub fn scale(&self) -> f64 {
        self.f.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn negated(&self) -> Self {
        Self {
            kind: self.kind,
            t: self.t.clone(),
            f: self.f.iter().map(|v| -v).collect(),
            f0: -self.f0,
            f1: -self.f1,
        }
    }
}

/// Tolerance `max(floor, c_disc (Δt² + Δθ⁴)) · max|f|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, rename_all = "camelCase")]
pub struct ToleranceModel {
    pub c_disc: f64,
    pub floor: f64,
}

impl Default for ToleranceModel {
    fn default() -> Self {
        Self {
            c_disc: 10.0,
            floor: 1e-9,
        }
    }
}

impl ToleranceModel {
    pub fn tol(&self, profile: &HeightProfile, dtheta: f64) -> f64 {
        let dt = profile.dt();
        self.floor.max(self.c_disc * (dt * dt + dtheta.powi(4))) * profile.scale()
    }
}

fn solution_samples(sol: &SupportSolution, k: usize) -> impl Iterator<Item = LevelSample> + '_ {
    (0..sol.grid.len()).map(move |j| {
        let r = &sol.radii[k];
        let b_min = match &r.b_parallel {
            Some(par) => r.b_meridian[j].min(par[j]),
            None => r.b_meridian[j],
        };
        LevelSample {
            h: sol.h[k][j],
            grad: sol.grad(j, k),
            b_max: r.b_max(j),
            b_min,
        }
    })
}

fn gauss_needs_circle(kind: ProfileKind, grid: &ThetaGrid) -> Result<()> {
    if kind == ProfileKind::Gauss2d && !matches!(grid, ThetaGrid::Circle { .. }) {
        return Err(Error::InvalidProblem("gauss2d profiles are defined for planar rings".into()));
    }
    Ok(())
}

/// Extremal functional on every interior row of a converged solution.
pub fn profile_from_solution(sol: &SupportSolution, kind: ProfileKind) -> Result<HeightProfile> {
    gauss_needs_circle(kind, &sol.grid)?;
    let p = sol.equation.p();
    let nt = sol.n_t();
    let row = |k: usize| kind.reduce(solution_samples(sol, k), p);
    HeightProfile::new(
        kind,
        sol.t[1..nt - 1].to_vec(),
        (1..nt - 1).map(row).collect(),
        row(0),
        row(nt - 1),
    )
}

/// The same functional from an analytic handle, scanned over the nodes of
/// `grid` at `n_t` uniform levels.
pub fn profile_from_oracle(
    oracle: &impl LevelOracle,
    grid: &ThetaGrid,
    n_t: usize,
    kind: ProfileKind,
    p: f64,
) -> Result<HeightProfile> {
    gauss_needs_circle(kind, grid)?;
    if n_t < 3 {
        return Err(Error::TooFewSamples(n_t));
    }
    let thetas = grid.thetas();
    let level = |t: f64| kind.reduce(thetas.iter().map(|&th| oracle.sample(th, t)), p);
    let ts: Vec<f64> = (1..n_t - 1).map(|k| k as f64 / (n_t - 1) as f64).collect();
    let f = ts.iter().map(|&t| level(t)).collect();
    HeightProfile::new(kind, ts, f, level(0.0), level(1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum CheckKind {
    Convex,
    Concave,
    Affine,
    EndpointBound,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CheckReport {
    pub kind: CheckKind,
    pub profile: ProfileKind,
    pub worst_value: f64,
    /// Index into the profile samples.
    pub location: usize,
    pub tol_used: f64,
    pub pass: bool,
    /// Fitted slope, affine checks only.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub slope: Option<f64>,
}

fn second_differences(p: &HeightProfile) -> Result<Vec<f64>> {
    if p.f.len() < 3 {
        return Err(Error::TooFewSamples(p.f.len()));
    }
    let dt2 = p.dt().powi(2);
    Ok(p.f.windows(3).map(|w| (w[2] + w[0] - 2.0 * w[1]) / dt2).collect())
}

/// Smallest second difference quotient; passes when it is `>= -tol`.
pub fn check_convex(profile: &HeightProfile, tol: f64) -> Result<CheckReport> {
    let d = second_differences(profile)?;
    let (i, worst) = d
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |b, (i, &v)| if v < b.1 { (i, v) } else { b });
    Ok(CheckReport {
        kind: CheckKind::Convex,
        profile: profile.kind,
        worst_value: worst,
        location: i + 1,
        tol_used: tol,
        pass: worst >= -tol,
        slope: None,
    })
}

/// Largest second difference quotient; passes when it is `<= tol`.
pub fn check_concave(profile: &HeightProfile, tol: f64) -> Result<CheckReport> {
    let d = second_differences(profile)?;
    let (i, worst) = d
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |b, (i, &v)| if v > b.1 { (i, v) } else { b });
    Ok(CheckReport {
        kind: CheckKind::Concave,
        profile: profile.kind,
        worst_value: worst,
        location: i + 1,
        tol_used: tol,
        pass: worst <= tol,
        slope: None,
    })
}

/// Largest deviation from the least-squares line.
pub fn check_affine(profile: &HeightProfile, tol: f64) -> Result<CheckReport> {
    let n = profile.f.len();
    if n < 3 {
        return Err(Error::TooFewSamples(n));
    }
    let tm = profile.t.iter().sum::<f64>() / n as f64;
    let fm = profile.f.iter().sum::<f64>() / n as f64;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (t, f) in profile.t.iter().zip(&profile.f) {
        sxy += (t - tm) * (f - fm);
        sxx += (t - tm) * (t - tm);
    }
    let slope = sxy / sxx;
    let (i, worst) = profile
        .t
        .iter()
        .zip(&profile.f)
        .map(|(t, f)| (f - fm - slope * (t - tm)).abs())
        .enumerate()
        .fold((0, 0.0), |b, (i, v)| if v > b.1 { (i, v) } else { b });
    Ok(CheckReport {
        kind: CheckKind::Affine,
        profile: profile.kind,
        worst_value: worst,
        location: i,
        tol_used: tol,
        pass: worst <= tol,
        slope: Some(slope),
    })
}

/// Largest violation of the chord bound through the boundary values: `f`
/// below the chord for convex kinds, above it for concave ones.
pub fn check_endpoint_bound(profile: &HeightProfile, f0: f64, f1: f64, tol: f64) -> Result<CheckReport> {
    let sign = if profile.kind.expects_convex() { 1.0 } else { -1.0 };
    let (i, worst) = profile
        .t
        .iter()
        .zip(&profile.f)
        .map(|(t, f)| sign * (f - ((1.0 - t) * f0 + t * f1)))
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |b, (i, v)| if v > b.1 { (i, v) } else { b });
    Ok(CheckReport {
        kind: CheckKind::EndpointBound,
        profile: profile.kind,
        worst_value: worst,
        location: i,
        tol_used: tol,
        pass: worst <= tol,
        slope: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{exact_radial_green, Circle, EccentricHarmonic, RadialRing};
    use proptest::prelude::*;

    fn sampled(kind: ProfileKind, n: usize, f: impl Fn(f64) -> f64) -> HeightProfile {
        let t: Vec<f64> = (1..n - 1).map(|k| k as f64 / (n - 1) as f64).collect();
        let v = t.iter().map(|&x| f(x)).collect();
        HeightProfile::new(kind, t, v, f(0.0), f(1.0)).unwrap()
    }

    #[test]
    fn affine_and_quadratic() {
        let p = sampled(ProfileKind::MaxGradOverK1, 33, |t| 2.0 - 3.0 * t);
        let c = check_convex(&p, 1e-9).unwrap();
        assert!(c.pass && c.worst_value.abs() < 1e-9);
        assert!(check_concave(&p, 1e-9).unwrap().pass);
        let a = check_affine(&p, 1e-12).unwrap();
        assert!(a.pass);
        assert!((a.slope.unwrap() + 3.0).abs() < 1e-12);
        assert!(check_endpoint_bound(&p, p.f0, p.f1, 1e-12).unwrap().pass);

        let q = sampled(ProfileKind::MaxGradOverK1, 33, |t| t * t);
        let c = check_convex(&q, 1e-9).unwrap();
        assert!((c.worst_value - 2.0).abs() < 1e-9);
        assert!(!check_affine(&q, 1e-6).unwrap().pass);
    }

    #[test]
    fn too_few_samples() {
        let p = HeightProfile::new(ProfileKind::MinLogK1, vec![0.5, 0.6], vec![1.0, 2.0], 0.0, 0.0).unwrap();
        assert!(matches!(check_convex(&p, 1.0), Err(Error::TooFewSamples(2))));
        assert!(matches!(check_affine(&p, 1.0), Err(Error::TooFewSamples(2))));
    }

    #[test]
    fn bump_above_chord_fails() {
        let p = sampled(ProfileKind::MaxGradOverK1, 33, |t| 1.0 + 0.1 * (std::f64::consts::PI * t).sin());
        let r = check_endpoint_bound(&p, 1.0, 1.0, 1e-6).unwrap();
        assert!(!r.pass);
        assert!((r.worst_value - 0.1).abs() < 1e-3);
    }

    #[test]
    fn radial_green_profiles() {
        let g = exact_radial_green(3, 2.0, 1.0, 0.5).unwrap();
        let grid = ThetaGrid::Meridian { m: 16 };
        let p = profile_from_oracle(&g, &grid, 65, ProfileKind::MaxGradOverK1, 2.0).unwrap();
        for (t, f) in p.t.iter().zip(&p.f) {
            assert!((f - (t + 1.0)).abs() < 1e-13);
        }
        let a = check_affine(&p, 1e-12).unwrap();
        assert!(a.pass, "{a:?}");
        let l = profile_from_oracle(&g, &grid, 65, ProfileKind::MinLogK1, 2.0).unwrap();
        assert!(l.f.windows(2).all(|w| w[1] > w[0]));
        assert!(check_concave(&l, 0.0).unwrap().pass);

        let flat = exact_radial_green(2, 2.0, 1.0, 0.5).unwrap();
        let p = profile_from_oracle(&flat, &ThetaGrid::Circle { n: 16 }, 65, ProfileKind::MaxGradOverK1, 2.0).unwrap();
        let a = check_affine(&p, 1e-12).unwrap();
        assert!(a.pass && a.slope.unwrap().abs() < 1e-12);
    }

    #[test]
    fn eccentric_profile_is_convex() {
        let e = EccentricHarmonic::new(Circle::new(0.0, 0.0, 1.0), Circle::new(0.2, 0.0, 0.3)).unwrap();
        let grid = ThetaGrid::Circle { n: 128 };
        let p = profile_from_oracle(&e, &grid, 65, ProfileKind::MaxGradOverK1, 2.0).unwrap();
        let tol = 1e-3 * p.scale();
        assert!(check_convex(&p, tol).unwrap().pass);
        assert!(check_endpoint_bound(&p, p.f0, p.f1, tol).unwrap().pass);
    }

    #[test]
    fn gauss_rejects_meridian() {
        let g = RadialRing::new(3, 2.0, 1.0, 0.5).unwrap();
        let r = profile_from_oracle(&g, &ThetaGrid::Meridian { m: 8 }, 9, ProfileKind::Gauss2d, 2.0);
        assert!(matches!(r, Err(Error::InvalidProblem(_))));
    }

    #[test]
    fn default_tolerance() {
        let p = sampled(ProfileKind::MaxGradOverK1, 5, |t| 2.0 * t + 1.0);
        let tol = ToleranceModel::default().tol(&p, 0.1);
        assert!((tol - 10.0 * (1.0 / 16.0 + 1e-4) * p.scale()).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn convex_of_negation_is_concave(c in proptest::collection::vec(-1.0..1.0f64, 4), tol in 0.0..1.0f64) {
            let f = |t: f64| c[0] + c[1] * t + c[2] * t * t + c[3] * (5.0 * t).sin();
            let p = sampled(ProfileKind::MaxGradOverK1, 17, f);
            let a = check_convex(&p, tol).unwrap();
            let b = check_concave(&p.negated(), tol).unwrap();
            prop_assert_eq!(a.worst_value.abs(), b.worst_value.abs());
            prop_assert_eq!(a.pass, b.pass);
            prop_assert_eq!(a.location, b.location);
        }

        #[test]
        fn discrete_convexity_bounds_chord(c in proptest::collection::vec(-1.0..1.0f64, 4)) {
            let f = |t: f64| c[0] + c[1] * t + c[2] * t * t + 0.05 * c[3] * (7.0 * t).sin();
            let n = 65;
            let p = sampled(ProfileKind::MaxGradOverK1, n, f);
            // sharp tolerance at which the convexity check just passes
            let tol = (-check_convex(&p, 0.0).unwrap().worst_value).max(0.0);
            let dt = p.dt();
            let slack = tol / 4.0 + 10.0 * dt * dt * p.scale().max(1.0);
            prop_assert!(check_endpoint_bound(&p, p.f0, p.f1, slack).unwrap().pass);
        }
    }
}
