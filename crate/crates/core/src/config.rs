//! JSON run configuration for the `levelcurve` binary.
//!
//! ```json
//! {
//!   "command": "check",
//!   "problem": {
//!     "equation": { "kind": "pLaplace", "p": 2.0 },
//!     "outer": { "shape": "ellipse", "a": 1.3, "b": 1.0 },
//!     "inner": { "shape": "circle", "r": 0.4 },
//!     "grid": { "nTheta": 96, "nT": 49 }
//!   },
//!   "checks": [ { "profile": "maxGradOverK1", "check": "convex", "relTol": 1e-3 } ],
//!   "outputDir": "out"
//! }
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::read_support_csv;
use crate::jet::JetMode;
use crate::profile::{CheckKind, ProfileKind, ToleranceModel};
use crate::solver::{Equation, NewtonOptions, RingProblem};
use crate::support::{
    support_of_circle, support_of_ellipse, support_of_offset_circle, support_of_sphere, support_of_spheroid,
    CircleSupport, MeridianSupport,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Command {
    Solve,
    Profile,
    Check,
    Jets,
    Oracle,
}

/// A boundary body. Planar rings accept every shape but `spheroid`;
/// axisymmetric rings accept `circle` (read as a sphere), `spheroid` and
/// `samples`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "camelCase", deny_unknown_fields)]
pub enum Shape {
    Circle { r: f64 },
    Ellipse { a: f64, b: f64 },
    /// Equatorial radius `a`, polar semi-axis `c`.
    Spheroid { a: f64, c: f64 },
    OffsetCircle { r: f64, cx: f64, cy: f64 },
    /// CSV with columns `theta,h` on a uniform grid starting at 0.
    Samples { path: PathBuf },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct GridSpec {
    /// `N` on the circle, `M` on the meridian.
    pub n_theta: usize,
    pub n_t: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ProblemSpec {
    pub equation: Equation,
    pub outer: Shape,
    pub inner: Shape,
    pub grid: GridSpec,
    /// Three-dimensional body of revolution; implied by `harmonicAxisym3D`.
    #[serde(default)]
    pub axisymmetric: bool,
    #[serde(default)]
    pub newton: NewtonOptions,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct CheckSpec {
    pub profile: ProfileKind,
    pub check: CheckKind,
    /// Absolute tolerance.
    #[serde(default)]
    pub tol: Option<f64>,
    /// Tolerance relative to `max|f|`; ignored when `tol` is set.
    #[serde(default)]
    pub rel_tol: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Source {
    /// Newton solve on the grid.
    #[default]
    Solve,
    /// Closed-form solution sampled on the same grid.
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct JetsSpec {
    pub mode: JetMode,
    pub n: usize,
    #[serde(default = "two")]
    pub p: f64,
    pub alpha: f64,
    pub beta: f64,
    pub count: usize,
    #[serde(default)]
    pub seed: u64,
}

fn two() -> f64 {
    2.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    #[serde(default)]
    pub problem: Option<ProblemSpec>,
    #[serde(default)]
    pub checks: Vec<CheckSpec>,
    #[serde(default)]
    pub tolerance: ToleranceModel,
    #[serde(default)]
    pub source: Source,
    #[serde(default)]
    pub jets: Option<JetsSpec>,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Config(format!("invalid config JSON: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        let mut cfg = Self::from_json(&text)?;
        // sample files are resolved next to the config
        if let Some(problem) = cfg.problem.as_mut() {
            let base = path.parent().unwrap_or(Path::new("."));
            for shape in [&mut problem.outer, &mut problem.inner] {
                if let Shape::Samples { path: p } = shape {
                    if p.is_relative() {
                        *p = base.join(&*p);
                    }
                }
            }
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        match self.command {
            Command::Jets => {
                let j = self.jets.as_ref().ok_or_else(|| Error::Config("`jets` command needs a `jets` section".into()))?;
                if j.n < 2 {
                    return Err(Error::Config(format!("jet dimension must be >= 2, got {}", j.n)));
                }
                if !(j.p > 1.0 && j.p.is_finite()) {
                    return Err(Error::Config(format!("jet p must lie in (1, inf), got {}", j.p)));
                }
                if !(j.alpha.is_finite() && j.beta.is_finite()) {
                    return Err(Error::Config("jet alpha and beta must be finite".into()));
                }
            }
            _ => {
                let p = self.problem()?;
                for shape in [&p.outer, &p.inner] {
                    shape.validate()?;
                }
                if p.grid.n_t < 5 {
                    return Err(Error::Config(format!("nT must be >= 5, got {}", p.grid.n_t)));
                }
            }
        }
        for c in &self.checks {
            for v in [c.tol, c.rel_tol].into_iter().flatten() {
                if !(v >= 0.0) {
                    return Err(Error::Config(format!("tolerances must be >= 0, got {v}")));
                }
            }
        }
        Ok(())
    }

    pub fn problem(&self) -> Result<&ProblemSpec> {
        self.problem
            .as_ref()
            .ok_or_else(|| Error::Config(format!("`{:?}` command needs a `problem` section", self.command)))
    }
}

impl Shape {
    fn validate(&self) -> Result<()> {
        let vals: Vec<(&str, f64)> = match *self {
            Shape::Circle { r } => vec![("r", r)],
            Shape::Ellipse { a, b } => vec![("a", a), ("b", b)],
            Shape::Spheroid { a, c } => vec![("a", a), ("c", c)],
            Shape::OffsetCircle { r, .. } => vec![("r", r)],
            Shape::Samples { .. } => vec![],
        };
        for (name, v) in vals {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("shape parameter {name} must be positive, got {v}")));
            }
        }
        Ok(())
    }

    fn circle_support(&self, n: usize) -> Result<CircleSupport> {
        match *self {
            Shape::Circle { r } => support_of_circle(r, n),
            Shape::Ellipse { a, b } => support_of_ellipse(a, b, n),
            Shape::OffsetCircle { r, cx, cy } => support_of_offset_circle(r, cx, cy, n),
            Shape::Spheroid { .. } => Err(Error::Config("spheroid needs an axisymmetric problem".into())),
            Shape::Samples { ref path } => {
                let h = uniform_samples(path, std::f64::consts::TAU, false)?;
                CircleSupport::new(h)?.resample(n)
            }
        }
    }

    fn meridian_support(&self, m: usize) -> Result<MeridianSupport> {
        match *self {
            Shape::Circle { r } => support_of_sphere(r, m),
            Shape::Spheroid { a, c } => support_of_spheroid(a, c, m),
            Shape::Samples { ref path } => {
                let h = uniform_samples(path, std::f64::consts::PI, true)?;
                MeridianSupport::new(h)?.resample(m)
            }
            _ => Err(Error::Config(format!("{self:?} is not a body of revolution"))),
        }
    }
}

/// Values of a support CSV after checking that `theta` is the uniform grid
/// on `[0, span)` (or `[0, span]` when `closed`).
fn uniform_samples(path: &Path, span: f64, closed: bool) -> Result<Vec<f64>> {
    let rows = read_support_csv(path)?;
    let n = rows.len();
    let intervals = if closed { n.saturating_sub(1) } else { n };
    if intervals == 0 {
        return Err(Error::Config(format!("{} has no samples", path.display())));
    }
    for (j, (th, _)) in rows.iter().enumerate() {
        let expect = span * j as f64 / intervals as f64;
        if (th - expect).abs() > 1e-9 {
            return Err(Error::Config(format!(
                "{}: theta at row {j} is {th}, expected the uniform grid value {expect}",
                path.display()
            )));
        }
    }
    Ok(rows.into_iter().map(|(_, h)| h).collect())
}

impl ProblemSpec {
    pub fn is_axisymmetric(&self) -> bool {
        self.axisymmetric || self.equation == Equation::HarmonicAxisym3D
    }

    pub fn build(&self) -> Result<RingProblem> {
        let GridSpec { n_theta, n_t } = self.grid;
        let pb = if self.is_axisymmetric() {
            let o = self.outer.meridian_support(n_theta)?;
            let i = self.inner.meridian_support(n_theta)?;
            RingProblem::axisym(self.equation, &o, &i, n_t)?
        } else {
            let o = self.outer.circle_support(n_theta)?;
            let i = self.inner.circle_support(n_theta)?;
            RingProblem::planar(self.equation, &o, &i, n_t)?
        };
        Ok(pb.with_newton(self.newton))
    }

    /// Spatial dimension of the ring.
    pub fn dimension(&self) -> usize {
        if self.is_axisymmetric() {
            3
        } else {
            2
        }
    }
}

impl CheckSpec {
    pub fn tolerance(&self, model: &ToleranceModel, profile: &crate::profile::HeightProfile, dtheta: f64) -> f64 {
        match (self.tol, self.rel_tol) {
            (Some(t), _) => t,
            (None, Some(r)) => r * profile.scale(),
            (None, None) => model.tol(profile, dtheta),
        }
    }
}
