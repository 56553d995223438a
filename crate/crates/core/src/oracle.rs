//! Closed-form solutions used as ground truth for the solver.
//!
//! Every handle describes a potential `u` with `u = 0` on the outer boundary
//! and `u = 1` on the inner one, and answers point queries through
//! [`LevelOracle`]: for a level `t` and an outer normal angle `θ`, the support
//! value of the level set, `|∇u|` at the matching point, and the principal
//! radii there.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Level-set data at the point of `Γ_t` whose outer normal has angle `θ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelSample {
    pub h: f64,
    pub grad: f64,
    pub b_max: f64,
    pub b_min: f64,
}

pub trait LevelOracle {
    fn sample(&self, theta: f64, t: f64) -> LevelSample;
}

/// Radial p-harmonic potential in the ring `r_inner < |x| < r_outer` of
/// `ℝ^n`, valid for every `p > 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RadialRing {
    pub n: usize,
    pub p: f64,
    pub r_outer: f64,
    pub r_inner: f64,
}

impl RadialRing {
    pub fn new(n: usize, p: f64, r_outer: f64, r_inner: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::OutOfRange(format!("dimension must be >= 2, got {n}")));
        }
        if !(p > 1.0 && p.is_finite()) {
            return Err(Error::OutOfRange(format!("p must lie in (1, inf), got {p}")));
        }
        if !(r_inner > 0.0 && r_inner < r_outer && r_outer.is_finite()) {
            return Err(Error::GeometryNotNested(format!(
                "need 0 < r_inner < r_outer, got {r_inner} and {r_outer}"
            )));
        }
        Ok(Self {
            n,
            p,
            r_outer,
            r_inner,
        })
    }

    /// Exponent of the fundamental solution, `(p - n)/(p - 1)`.
    pub fn gamma(&self) -> f64 {
        (self.p - self.n as f64) / (self.p - 1.0)
    }

    fn is_log(&self) -> bool {
        self.p == self.n as f64
    }

    fn g(&self, r: f64) -> f64 {
        if self.is_log() {
            r.ln()
        } else {
            r.powf(self.gamma())
        }
    }

    fn g_inv(&self, v: f64) -> f64 {
        if self.is_log() {
            v.exp()
        } else {
            v.powf(1.0 / self.gamma())
        }
    }

    fn dg(&self) -> f64 {
        self.g(self.r_inner) - self.g(self.r_outer)
    }

    pub fn u(&self, r: f64) -> f64 {
        (self.g(r) - self.g(self.r_outer)) / self.dg()
    }

    /// Radius of the level sphere `Γ_t`.
    pub fn radius(&self, t: f64) -> f64 {
        self.g_inv(self.g(self.r_outer) + t * self.dg())
    }

    pub fn grad_at_radius(&self, r: f64) -> f64 {
        let dg = if self.is_log() {
            1.0 / r
        } else {
            self.gamma() * r.powf(self.gamma() - 1.0)
        };
        (dg / self.dg()).abs()
    }

    pub fn grad(&self, t: f64) -> f64 {
        self.grad_at_radius(self.radius(t))
    }

    /// `|∇u| / k_1` on `Γ_t`; affine in `t`.
    pub fn grad_over_k1(&self, t: f64) -> f64 {
        self.grad(t) * self.radius(t)
    }

    /// `∂h/∂t = -1/|∇u|`.
    pub fn h_t(&self, t: f64) -> f64 {
        -1.0 / self.grad(t)
    }
}

impl LevelOracle for RadialRing {
    fn sample(&self, _theta: f64, t: f64) -> LevelSample {
        let r = self.radius(t);
        LevelSample {
            h: r,
            grad: self.grad_at_radius(r),
            b_max: r,
            b_min: r,
        }
    }
}

/// Radial p-Green ring restricted to `p <= n`, the range where the
/// fundamental solution decays at infinity.
pub fn exact_radial_green(n: usize, p: f64, r_outer: f64, r_inner: f64) -> Result<RadialRing> {
    if p > n as f64 {
        return Err(Error::OutOfRange(format!("p = {p} exceeds the dimension {n}")));
    }
    RadialRing::new(n, p, r_outer, r_inner)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Circle {
    pub cx: f64,
    pub cy: f64,
    pub r: f64,
}

impl Circle {
    pub fn new(cx: f64, cy: f64, r: f64) -> Self {
        Self { cx, cy, r }
    }
}

/// Harmonic potential between two nested, possibly eccentric circles.
///
/// After translating and scaling the outer circle to the unit circle and
/// rotating the inner center onto the positive real axis, the disk automorphism
/// `w = (z - a)/(1 - a z)` makes the pair concentric, and
/// `u = log|w| / log ρ'`. Level sets are circles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct EccentricHarmonic {
    pub outer: Circle,
    pub inner: Circle,
    /// Real Möbius parameter in `(-1, 1)`.
    pub a: f64,
    /// Radius of the image of the inner circle.
    pub rho: f64,
    /// Direction of the inner center relative to the outer one.
    psi: f64,
}

type C = (f64, f64);

fn cmul(x: C, y: C) -> C {
    (x.0 * y.0 - x.1 * y.1, x.0 * y.1 + x.1 * y.0)
}

fn cdiv(x: C, y: C) -> C {
    let d = y.0 * y.0 + y.1 * y.1;
    ((x.0 * y.0 + x.1 * y.1) / d, (x.1 * y.0 - x.0 * y.1) / d)
}

fn cabs(x: C) -> f64 {
    x.0.hypot(x.1)
}

impl EccentricHarmonic {
    pub fn new(outer: Circle, inner: Circle) -> Result<Self> {
        for c in [outer, inner] {
            if !(c.r > 0.0 && c.r.is_finite() && c.cx.is_finite() && c.cy.is_finite()) {
                return Err(Error::InvalidGeometry(format!("bad circle {c:?}")));
            }
        }
        let (dx, dy) = ((inner.cx - outer.cx) / outer.r, (inner.cy - outer.cy) / outer.r);
        let d = dx.hypot(dy);
        let rho0 = inner.r / outer.r;
        if d + rho0 >= 1.0 {
            return Err(Error::GeometryNotNested(format!(
                "inner circle {inner:?} is not strictly inside {outer:?}"
            )));
        }
        let (a, psi) = if d == 0.0 {
            (0.0, 0.0)
        } else {
            let (x1, x2) = (d - rho0, d + rho0);
            let (s, pr) = (x1 + x2, x1 * x2);
            // root of a² s - 2a(1 + P) + s = 0 inside the unit disk
            let a = s / ((1.0 + pr) + ((1.0 + pr).powi(2) - s * s).sqrt());
            (a, dy.atan2(dx))
        };
        let w2 = (d + rho0 - a) / (1.0 - a * (d + rho0));
        Ok(Self {
            outer,
            inner,
            a,
            rho: w2.abs(),
            psi,
        })
    }

    fn unit_coords(&self, x: f64, y: f64) -> C {
        let (u, v) = ((x - self.outer.cx) / self.outer.r, (y - self.outer.cy) / self.outer.r);
        let (s, c) = self.psi.sin_cos();
        (c * u + s * v, -s * u + c * v)
    }

    fn w(&self, z: C) -> C {
        cdiv((z.0 - self.a, z.1), (1.0 - self.a * z.0, -self.a * z.1))
    }

    fn z_of_w(&self, w: C) -> C {
        cdiv((w.0 + self.a, w.1), (1.0 + self.a * w.0, self.a * w.1))
    }

    pub fn u(&self, x: f64, y: f64) -> f64 {
        cabs(self.w(self.unit_coords(x, y))).ln() / self.rho.ln()
    }

    pub fn grad(&self, x: f64, y: f64) -> f64 {
        let z = self.unit_coords(x, y);
        let one_minus = (1.0 - self.a * z.0, -self.a * z.1);
        let dw = (1.0 - self.a * self.a) / cabs(cmul(one_minus, one_minus));
        dw / (cabs(self.w(z)) * self.rho.ln().abs()) / self.outer.r
    }

    /// Center and radius of the level circle `Γ_t` in physical coordinates.
    pub fn level_circle(&self, t: f64) -> Circle {
        let s = self.rho.powf(t);
        let (p, q) = (self.z_of_w((s, 0.0)).0, self.z_of_w((-s, 0.0)).0);
        let (m, r) = (0.5 * (p + q), 0.5 * (p - q).abs());
        let (sn, cs) = self.psi.sin_cos();
        Circle {
            cx: self.outer.cx + self.outer.r * cs * m,
            cy: self.outer.cy + self.outer.r * sn * m,
            r: self.outer.r * r,
        }
    }

    /// Smallest and largest `|∇u|` on `Γ_t`, attained where the level circle
    /// meets the line of centers.
    pub fn grad_range(&self, t: f64) -> (f64, f64) {
        let c = self.level_circle(t);
        let (s, co) = self.psi.sin_cos();
        let g1 = self.grad(c.cx + c.r * co, c.cy + c.r * s);
        let g2 = self.grad(c.cx - c.r * co, c.cy - c.r * s);
        (g1.min(g2), g1.max(g2))
    }
}

impl LevelOracle for EccentricHarmonic {
    fn sample(&self, theta: f64, t: f64) -> LevelSample {
        let c = self.level_circle(t);
        let (s, co) = theta.sin_cos();
        LevelSample {
            h: c.r + c.cx * co + c.cy * s,
            grad: self.grad(c.cx + c.r * co, c.cy + c.r * s),
            b_max: c.r,
            b_min: c.r,
        }
    }
}

/// Rotationally symmetric minimal graph over a ring, a catenoid piece
/// `u(r) = c (acosh(r_outer/c) - acosh(r/c))` rising from the outer circle to
/// height 1 on the inner one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RadialMinimal {
    pub r_outer: f64,
    pub r_inner: f64,
    /// Neck parameter, `0 < c <= r_inner`.
    pub c: f64,
}

impl RadialMinimal {
    pub fn new(r_outer: f64, r_inner: f64) -> Result<Self> {
        if !(r_inner > 0.0 && r_inner < r_outer && r_outer.is_finite()) {
            return Err(Error::GeometryNotNested(format!(
                "need 0 < r_inner < r_outer, got {r_inner} and {r_outer}"
            )));
        }
        let height = |c: f64| c * ((r_outer / c).acosh() - (r_inner / c).acosh());
        let top = height(r_inner);
        if !(top > 1.0) {
            return Err(Error::NoRadialSolution(format!(
                "catenoid pieces over this ring reach height at most {top:.6}"
            )));
        }
        // height is increasing in c on (0, r_inner]
        let (mut lo, mut hi) = (0.0, r_inner);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid == lo || mid == hi {
                break;
            }
            if height(mid) < 1.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let c = if (height(lo) - 1.0).abs() < (height(hi) - 1.0).abs() {
            lo
        } else {
            hi
        };
        Ok(Self {
            r_outer,
            r_inner,
            c,
        })
    }

    pub fn u(&self, r: f64) -> f64 {
        self.c * ((self.r_outer / self.c).acosh() - (r / self.c).acosh())
    }

    pub fn grad_at_radius(&self, r: f64) -> f64 {
        self.c / (r * r - self.c * self.c).sqrt()
    }

    pub fn radius(&self, t: f64) -> f64 {
        self.c * ((self.r_outer / self.c).acosh() - t / self.c).cosh()
    }

    pub fn grad(&self, t: f64) -> f64 {
        self.grad_at_radius(self.radius(t))
    }

    pub fn h_t(&self, t: f64) -> f64 {
        -1.0 / self.grad(t)
    }
}

impl LevelOracle for RadialMinimal {
    fn sample(&self, _theta: f64, t: f64) -> LevelSample {
        let r = self.radius(t);
        LevelSample {
            h: r,
            grad: self.grad_at_radius(r),
            b_max: r,
            b_min: r,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn green_3d_profile_is_t_plus_one() {
        let g = exact_radial_green(3, 2.0, 1.0, 0.5).unwrap();
        for k in 0..=10 {
            let t = k as f64 / 10.0;
            assert!((g.grad_over_k1(t) - (t + 1.0)).abs() < 1e-14);
            assert!((g.u(g.radius(t)) - t).abs() < 1e-14);
        }
    }

    #[test]
    fn green_critical_exponent_is_constant() {
        let g = exact_radial_green(2, 2.0, 1.3, 0.2).unwrap();
        let f0 = g.grad_over_k1(0.0);
        for k in 1..=10 {
            assert!((g.grad_over_k1(k as f64 / 10.0) - f0).abs() < 1e-14);
        }
    }

    #[test]
    fn green_guard() {
        assert!(matches!(exact_radial_green(2, 2.5, 1.0, 0.5), Err(Error::OutOfRange(_))));
        assert!(RadialRing::new(2, 2.5, 1.0, 0.5).is_ok());
        assert!(matches!(RadialRing::new(2, 1.0, 1.0, 0.5), Err(Error::OutOfRange(_))));
        assert!(matches!(RadialRing::new(2, 2.0, 0.5, 0.5), Err(Error::GeometryNotNested(_))));
    }

    #[test]
    fn radial_ode_by_differences() {
        // (r^{n-1} |u'|^{p-2} u')' = 0, checked with centered differences
        for (n, p) in [(2, 3.0), (3, 1.5), (4, 3.0)] {
            let g = RadialRing::new(n, p, 1.0, 0.5).unwrap();
            let flux = |r: f64| {
                let e = 1e-6;
                let du = (g.u(r + e) - g.u(r - e)) / (2.0 * e);
                r.powi(n as i32 - 1) * du.abs().powf(p - 2.0) * du
            };
            let (f1, f2) = (flux(0.6), flux(0.9));
            assert!((f1 - f2).abs() < 1e-6 * f1.abs(), "n={n} p={p}");
            let e = 1e-6;
            let fd = (g.u(0.7 - e) - g.u(0.7 + e)) / (2.0 * e);
            assert!((fd - g.grad_at_radius(0.7)).abs() < 1e-6);
        }
    }

    #[test]
    fn concentric_eccentric_matches_radial() {
        let e = EccentricHarmonic::new(Circle::new(0.0, 0.0, 1.0), Circle::new(0.0, 0.0, 0.5)).unwrap();
        let g = exact_radial_green(2, 2.0, 1.0, 0.5).unwrap();
        assert_eq!(e.a, 0.0);
        for k in 0..=8 {
            let t = k as f64 / 8.0;
            let r = g.radius(t);
            assert!((e.level_circle(t).r - r).abs() < 1e-12);
            assert!((e.grad(r, 0.0) - g.grad(t)).abs() < 1e-12);
            assert!((e.u(0.0, r) - t).abs() < 1e-12);
        }
    }

    #[test]
    fn eccentric_boundary_values_and_harmonicity() {
        let e = EccentricHarmonic::new(Circle::new(0.0, 0.0, 1.0), Circle::new(0.2, 0.0, 0.3)).unwrap();
        for k in 0..12 {
            let th = k as f64 * 0.5;
            assert!(e.u(th.cos(), th.sin()).abs() < 1e-13);
            assert!((e.u(0.2 + 0.3 * th.cos(), 0.3 * th.sin()) - 1.0).abs() < 1e-13);
        }
        // five-point Laplacian and finite-difference gradient
        let (x, y, d) = (-0.4, 0.3, 1e-3);
        let lap = e.u(x + d, y) + e.u(x - d, y) + e.u(x, y + d) + e.u(x, y - d) - 4.0 * e.u(x, y);
        assert!((lap / (d * d)).abs() < 1e-5);
        let gx = (e.u(x + 1e-6, y) - e.u(x - 1e-6, y)) / 2e-6;
        let gy = (e.u(x, y + 1e-6) - e.u(x, y - 1e-6)) / 2e-6;
        assert!((gx.hypot(gy) - e.grad(x, y)).abs() < 1e-7);
        // level circle points have the right level
        let c = e.level_circle(0.37);
        for k in 0..8 {
            let th = k as f64 * 0.8;
            assert!((e.u(c.cx + c.r * th.cos(), c.cy + c.r * th.sin()) - 0.37).abs() < 1e-12);
        }
    }

    #[test]
    fn eccentric_rotation_and_scaling() {
        let base = EccentricHarmonic::new(Circle::new(0.0, 0.0, 1.0), Circle::new(0.2, 0.0, 0.3)).unwrap();
        let moved = EccentricHarmonic::new(Circle::new(1.0, -2.0, 2.0), Circle::new(1.0, -1.6, 0.6)).unwrap();
        let (a, b) = (base.level_circle(0.5), moved.level_circle(0.5));
        assert!((2.0 * a.r - b.r).abs() < 1e-12);
        assert!((1.0 - b.cx).abs() < 1e-12);
        assert!((-2.0 + 2.0 * a.cx - b.cy).abs() < 1e-12);
    }

    #[test]
    fn eccentric_not_nested() {
        let r = EccentricHarmonic::new(Circle::new(0.0, 0.0, 1.0), Circle::new(0.5, 0.0, 0.5));
        assert!(matches!(r, Err(Error::GeometryNotNested(_))));
    }

    #[test]
    fn catenoid_ode_and_height() {
        let m = RadialMinimal::new(3.0, 1.5).unwrap();
        assert!(m.u(3.0).abs() < 1e-15);
        assert!((m.u(1.5) - 1.0).abs() < 1e-12);
        for k in 0..=20 {
            let r = 1.5 + 1.5 * k as f64 / 20.0;
            let g = m.grad_at_radius(r);
            // r u' / sqrt(1 + u'^2) is constant
            assert!((r * g / (1.0 + g * g).sqrt() - m.c).abs() < 1e-12);
        }
        // height by Simpson quadrature of u'
        let nq = 2000;
        let hq = 1.5 / nq as f64;
        let mut s = 0.0;
        for i in 0..=nq {
            let w = if i == 0 || i == nq { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * m.grad_at_radius(1.5 + i as f64 * hq);
        }
        assert!((s * hq / 3.0 - 1.0).abs() < 1e-6);
        let t = 0.3;
        assert!((m.u(m.radius(t)) - t).abs() < 1e-12);
    }

    #[test]
    fn catenoid_infeasible_ring() {
        assert!(matches!(RadialMinimal::new(1.0, 0.5), Err(Error::NoRadialSolution(_))));
        assert!(matches!(RadialMinimal::new(1.0, 0.999), Err(Error::NoRadialSolution(_))));
    }

    #[test]
    fn catenoid_height_monotone_in_neck() {
        let (r0, r1) = (3.0f64, 1.5f64);
        let height = |c: f64| c * ((r0 / c).acosh() - (r1 / c).acosh());
        let mut last = 0.0;
        for k in 1..=1000 {
            let h = height(r1 * k as f64 / 1000.0);
            assert!(h > last);
            last = h;
        }
    }

    proptest! {
        #[test]
        fn green_profile_affine(n in 2usize..6, p in 1.1..6.0f64, r1 in 0.1..0.9f64) {
            let g = RadialRing::new(n, p, 1.0, r1).unwrap();
            let (f0, f1) = (g.grad_over_k1(0.0), g.grad_over_k1(1.0));
            for k in 1..10 {
                let t = k as f64 / 10.0;
                let lin = (1.0 - t) * f0 + t * f1;
                prop_assert!((g.grad_over_k1(t) - lin).abs() <= 1e-10 * f0.abs().max(f1.abs()));
            }
        }

        #[test]
        fn swapped_catenoid_sums_to_one(r1 in 1.0..1.8f64) {
            // 1 - u solves the same equation with the boundary values exchanged
            let m = RadialMinimal::new(3.0, r1).unwrap();
            for k in 0..=10 {
                let r = r1 + (3.0 - r1) * k as f64 / 10.0;
                let e = 1e-6;
                let up = ((1.0 - m.u(r + e)) - (1.0 - m.u(r - e))) / (2.0 * e);
                prop_assert!((up.abs() - m.grad_at_radius(r)).abs() < 1e-5 * m.grad_at_radius(r).max(1.0));
            }
        }
    }
}
