//! Support functions sampled on the unit circle or on a meridian of the unit
//! sphere, and the principal radii they determine.
//!
//! A planar body is stored as `h(θ_j)` with `θ_j = 2πj/N`. An axisymmetric
//! body in three dimensions is stored along one meridian, `θ_j = πj/M`, with
//! `θ` the angle between the outer normal and the symmetry axis.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stencil::ThetaGrid;

/// Absolute floor below which a principal radius counts as degenerate.
pub const EPS_B: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircleSupport {
    values: Vec<f64>,
}

impl CircleSupport {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        let n = values.len();
        if n < 16 || !n.is_multiple_of(2) {
            return Err(Error::InvalidGeometry(format!(
                "circle grid needs an even number of nodes >= 16, got {n}"
            )));
        }
        check_finite(&values)?;
        Ok(Self { values })
    }

    pub fn from_fn(n_theta: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        let grid = ThetaGrid::Circle { n: n_theta };
        Self::new(grid.thetas().into_iter().map(f).collect())
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn n_theta(&self) -> usize {
        self.values.len()
    }

    pub fn grid(&self) -> ThetaGrid {
        ThetaGrid::Circle { n: self.values.len() }
    }

    /// Trigonometric interpolation onto an `n`-node grid.
    pub fn resample(&self, n: usize) -> Result<Self> {
        if n == self.n_theta() {
            return Ok(self.clone());
        }
        Self::new(trig_resample(&self.values, n))
    }

    /// Cyclic shift by `k` nodes, i.e. the body rotated by `2πk/N`.
    pub fn rotated(&self, k: usize) -> Self {
        let n = self.values.len();
        let values = (0..n).map(|j| self.values[(j + n - k % n) % n]).collect();
        Self { values }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeridianSupport {
    values: Vec<f64>,
}

impl MeridianSupport {
    /// `values` has `M + 1` entries, pole to pole.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 9 {
            return Err(Error::InvalidGeometry(format!(
                "meridian grid needs M >= 8 intervals, got {}",
                values.len().saturating_sub(1)
            )));
        }
        check_finite(&values)?;
        Ok(Self { values })
    }

    pub fn from_fn(m_theta: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        let grid = ThetaGrid::Meridian { m: m_theta };
        Self::new(grid.thetas().into_iter().map(f).collect())
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn m_theta(&self) -> usize {
        self.values.len() - 1
    }

    pub fn grid(&self) -> ThetaGrid {
        ThetaGrid::Meridian { m: self.m_theta() }
    }

    /// Cosine-series interpolation onto an `m`-interval meridian.
    pub fn resample(&self, m: usize) -> Result<Self> {
        if m == self.m_theta() {
            return Ok(self.clone());
        }
        let old = self.m_theta();
        // even extension around the full circle, length 2M
        let mut ext = self.values.clone();
        ext.extend((1..old).rev().map(|j| self.values[j]));
        let fine = trig_resample(&ext, 2 * m);
        Self::new(fine[..=m].to_vec())
    }
}

fn check_finite(values: &[f64]) -> Result<()> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(j) => Err(Error::InvalidGeometry(format!("non-finite support value at node {j}"))),
        None => Ok(()),
    }
}

/// Band-limited resampling of periodic samples on a uniform grid.
fn trig_resample(f: &[f64], n_new: usize) -> Vec<f64> {
    let n = f.len();
    let kmax = n.min(n_new) / 2;
    let mut a = vec![0.0; kmax + 1];
    let mut b = vec![0.0; kmax + 1];
    for (j, &v) in f.iter().enumerate() {
        let th = std::f64::consts::TAU * j as f64 / n as f64;
        for k in 0..=kmax {
            let (s, c) = (k as f64 * th).sin_cos();
            a[k] += v * c;
            b[k] += v * s;
        }
    }
    let scale = 2.0 / n as f64;
    (0..n_new)
        .map(|j| {
            let th = std::f64::consts::TAU * j as f64 / n_new as f64;
            let mut v = 0.5 * a[0] * scale;
            for k in 1..=kmax {
                let (s, c) = (k as f64 * th).sin_cos();
                // the Nyquist mode of an even grid is shared between a and its alias
                let w = if 2 * k == n.min(n_new) { 0.5 } else { 1.0 };
                v += w * scale * (a[k] * c + b[k] * s);
            }
            v
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrincipalRadii {
    pub b_meridian: Vec<f64>,
    /// Absent for planar bodies.
    pub b_parallel: Option<Vec<f64>>,
}

impl PrincipalRadii {
    pub fn len(&self) -> usize {
        self.b_meridian.len()
    }

    pub fn is_empty(&self) -> bool {
        self.b_meridian.is_empty()
    }

    /// Largest radius at node `j`, the reciprocal of the smallest curvature.
    pub fn b_max(&self, j: usize) -> f64 {
        match &self.b_parallel {
            Some(par) => self.b_meridian[j].max(par[j]),
            None => self.b_meridian[j],
        }
    }

    /// Smallest radius over all nodes and its node index.
    pub fn min_radius(&self) -> (f64, usize) {
        let mut best = (f64::INFINITY, 0);
        let par = self.b_parallel.as_deref();
        for j in 0..self.len() {
            let v = par.map_or(self.b_meridian[j], |p| self.b_meridian[j].min(p[j]));
            // NaN counts as degenerate
            if !(v >= best.0) {
                best = (v, j);
            }
        }
        best
    }
}

/// Radii of the level body with support samples `h` on `grid`, without the
/// convexity check.
pub fn radii_on_grid(grid: &ThetaGrid, h: &[f64]) -> PrincipalRadii {
    let d2 = grid.d2().apply(h);
    let b_meridian: Vec<f64> = h.iter().zip(&d2).map(|(a, b)| a + b).collect();
    let b_parallel = match grid {
        ThetaGrid::Circle { .. } => None,
        ThetaGrid::Meridian { .. } => {
            let d1 = grid.d1().apply(h);
            Some(
                (0..h.len())
                    .map(|j| {
                        if grid.is_pole(j) {
                            b_meridian[j]
                        } else {
                            let th = grid.theta(j);
                            h[j] + th.cos() / th.sin() * d1[j]
                        }
                    })
                    .collect(),
            )
        }
    };
    PrincipalRadii {
        b_meridian,
        b_parallel,
    }
}

fn checked(b: PrincipalRadii) -> Result<PrincipalRadii> {
    let (min_radius, node) = b.min_radius();
    if min_radius > EPS_B {
        Ok(b)
    } else {
        Err(Error::NonConvexBody { min_radius, node })
    }
}

/// `b = h + h''` on the circle.
pub fn principal_radius_2d(h: &CircleSupport) -> Result<PrincipalRadii> {
    checked(radii_on_grid(&h.grid(), h.values()))
}

/// Meridian radius `h + h_θθ` and parallel radius `h + cot θ h_θ` of a body
/// of revolution; the two agree at the poles.
pub fn principal_radii_axisym(h: &MeridianSupport) -> Result<PrincipalRadii> {
    checked(radii_on_grid(&h.grid(), h.values()))
}

pub fn check_strict_convexity(b: &PrincipalRadii) -> bool {
    b.min_radius().0 > EPS_B
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidGeometry(format!("{name} must be positive, got {v}")))
    }
}

/// Ellipse with semi-axes `a` along x and `b` along y, centered at the origin.
pub fn support_of_ellipse(a: f64, b: f64, n_theta: usize) -> Result<CircleSupport> {
    positive("semi-axis a", a)?;
    positive("semi-axis b", b)?;
    CircleSupport::from_fn(n_theta, |t| (a * a * t.cos().powi(2) + b * b * t.sin().powi(2)).sqrt())
}

pub fn support_of_circle(r: f64, n_theta: usize) -> Result<CircleSupport> {
    support_of_offset_circle(r, 0.0, 0.0, n_theta)
}

/// Circle of radius `r` centered at `(cx, cy)`.
pub fn support_of_offset_circle(r: f64, cx: f64, cy: f64, n_theta: usize) -> Result<CircleSupport> {
    positive("radius", r)?;
    if !(cx.is_finite() && cy.is_finite()) {
        return Err(Error::InvalidGeometry("circle center must be finite".into()));
    }
    CircleSupport::from_fn(n_theta, |t| r + cx * t.cos() + cy * t.sin())
}

/// Spheroid with equatorial radius `a` and polar semi-axis `c`.
pub fn support_of_spheroid(a: f64, c: f64, m_theta: usize) -> Result<MeridianSupport> {
    positive("equatorial radius a", a)?;
    positive("polar semi-axis c", c)?;
    MeridianSupport::from_fn(m_theta, |t| (c * c * t.cos().powi(2) + a * a * t.sin().powi(2)).sqrt())
}

pub fn support_of_sphere(r: f64, m_theta: usize) -> Result<MeridianSupport> {
    support_of_spheroid(r, r, m_theta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    // radius of curvature of the ellipse as a function of the normal angle,
    // from the parametric curvature formula
    fn ellipse_radius(a: f64, b: f64, t: f64) -> f64 {
        a * a * b * b / (a * a * t.cos().powi(2) + b * b * t.sin().powi(2)).powf(1.5)
    }

    #[test]
    fn circle_radius_is_constant() {
        let b = principal_radius_2d(&support_of_circle(1.0, 32).unwrap()).unwrap();
        assert!(b.b_meridian.iter().all(|v| (v - 1.0).abs() < 1e-13));
        assert!(b.b_parallel.is_none());
    }

    #[test]
    fn ellipse_vertex_radius() {
        let h = support_of_ellipse(2.0, 1.0, 256).unwrap();
        assert_eq!(h.values()[0], 2.0);
        assert!((h.values()[64] - 1.0).abs() < 1e-15);
        let b = principal_radius_2d(&h).unwrap();
        assert!((b.b_meridian[0] - 0.5).abs() < 1e-6);
        assert!(check_strict_convexity(&b));
    }

    #[test]
    fn ellipse_converges() {
        let err = |n: usize| {
            let h = support_of_ellipse(2.0, 1.0, n).unwrap();
            let b = principal_radius_2d(&h).unwrap();
            let g = h.grid();
            (0..n)
                .map(|j| (b.b_meridian[j] - ellipse_radius(2.0, 1.0, g.theta(j))).abs())
                .fold(0.0, f64::max)
        };
        let (e1, e2) = (err(32), err(64));
        assert!(e1 / e2 >= 3.5, "ratio {}", e1 / e2);
    }

    #[test]
    fn bad_inputs() {
        assert!(matches!(support_of_ellipse(1.0, -1.0, 32), Err(Error::InvalidGeometry(_))));
        assert!(matches!(CircleSupport::new(vec![1.0; 15]), Err(Error::InvalidGeometry(_))));
        // h = 1 + 0.5 cos 3θ has h + h'' = 1 - 4 cos 3θ < 0 somewhere
        let h = CircleSupport::from_fn(64, |t| 1.0 + 0.5 * (3.0 * t).cos()).unwrap();
        assert!(matches!(principal_radius_2d(&h), Err(Error::NonConvexBody { .. })));
        let zero = PrincipalRadii {
            b_meridian: vec![1.0, 0.0],
            b_parallel: None,
        };
        assert!(!check_strict_convexity(&zero));
    }

    #[test]
    fn sphere_radii() {
        let b = principal_radii_axisym(&support_of_sphere(1.7, 32).unwrap()).unwrap();
        let par = b.b_parallel.as_ref().unwrap();
        for j in 0..=32 {
            assert!((b.b_meridian[j] - 1.7).abs() < 1e-12);
            assert!((par[j] - 1.7).abs() < 1e-12);
        }
    }

    #[test]
    fn spheroid_radii() {
        let (a, c) = (1.0, 1.5);
        let h = support_of_spheroid(a, c, 96).unwrap();
        let b = principal_radii_axisym(&h).unwrap();
        let par = b.b_parallel.as_ref().unwrap();
        assert!((par[48] - a).abs() < 1e-12);
        assert_eq!(par[0], b.b_meridian[0]);
        assert_eq!(par[96], b.b_meridian[96]);
        let g = h.grid();
        for j in 0..=96 {
            let t = g.theta(j);
            let q = (c * c * t.cos().powi(2) + a * a * t.sin().powi(2)).sqrt();
            assert!((b.b_meridian[j] - a * a * c * c / q.powi(3)).abs() < 1e-5, "node {j}");
            assert!((par[j] - a * a / q).abs() < 1e-5, "node {j}");
        }
    }

    #[test]
    fn resample_round_trip() {
        let h = support_of_ellipse(1.3, 1.0, 64).unwrap();
        let fine = h.resample(128).unwrap();
        for j in 0..64 {
            assert!((fine.values()[2 * j] - h.values()[j]).abs() < 1e-12);
        }
        let s = support_of_spheroid(1.2, 1.0, 32).unwrap();
        let sf = s.resample(64).unwrap();
        let exact = support_of_spheroid(1.2, 1.0, 64).unwrap();
        for j in 0..=64 {
            assert!((sf.values()[j] - exact.values()[j]).abs() < 1e-6);
        }
    }

    proptest! {
        #[test]
        fn translation_leaves_radii(vx in -2.0..2.0f64, vy in -2.0..2.0f64, a in 0.5..2.0f64, b in 0.5..2.0f64) {
            let h = support_of_ellipse(a, b, 64).unwrap();
            let g = h.grid();
            let moved = CircleSupport::new(
                (0..64).map(|j| h.values()[j] + vx * g.theta(j).cos() + vy * g.theta(j).sin()).collect(),
            ).unwrap();
            let b0 = principal_radius_2d(&h).unwrap();
            let b1 = principal_radius_2d(&moved).unwrap();
            for j in 0..64 {
                prop_assert!((b0.b_meridian[j] - b1.b_meridian[j]).abs() <= 1e-10 * b0.b_meridian[j].abs());
            }
        }

        #[test]
        fn rotation_permutes_radii(k in 0usize..64, a in 0.5..2.0f64, b in 0.5..2.0f64) {
            let h = support_of_ellipse(a, b, 64).unwrap();
            let b0 = principal_radius_2d(&h).unwrap();
            let b1 = principal_radius_2d(&h.rotated(k)).unwrap();
            for j in 0..64 {
                prop_assert_eq!(b1.b_meridian[(j + k) % 64], b0.b_meridian[j]);
            }
        }
    }

    #[test]
    fn meridian_pole_angles() {
        let g = support_of_sphere(1.0, 8).unwrap().grid();
        assert_eq!(g.theta(0), 0.0);
        assert!((g.theta(8) - PI).abs() < 1e-15);
    }
}
