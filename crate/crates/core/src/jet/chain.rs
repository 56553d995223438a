//! Step-by-step check of the identity chain on one jet.
//!
//! Identity steps compare a chain-rule evaluation with a regrouped closed
//! form on an unconstrained jet. Inequality steps run on the same jet after
//! [`enforce_first_order_condition`], where every `∇_θφ` term vanishes.
//!
//! All sides are evaluated in [`Tracked`] arithmetic; the relative error of an
//! identity is `|lhs - rhs| / max(mag)`. Steps whose error lands in the gray
//! zone `[TOL_ID, 1e-6]` are re-evaluated in [`DoubleDouble`].

use serde::{Deserialize, Serialize};

use super::scalar::{DoubleDouble, Real, Tracked};
use super::{enforce_first_order_condition, minimal, plaplace, Direct, Jet, JetMode};

/// Identity pass threshold (relative error) and inequality slack scale.
pub const TOL_ID: f64 = 1e-9;
/// Threshold for the closed-form comparisons that should hold to round-off.
pub const TOL_EXACT: f64 = 1e-12;
const GRAY_HI: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum StepKind {
    /// Two evaluations of the same quantity; value is the relative error.
    Identity,
    /// `lhs ≥ rhs`; value is the slack `lhs - rhs`.
    Inequality,
    /// A quantity that must be zero on critical jets; value is `|x| / mag`.
    Vanishing,
    /// Reported only, no verdict; value is `x / mag`.
    Exploratory,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepResult {
    pub name: String,
    pub kind: StepKind,
    pub value: f64,
    /// Magnitude bound used to normalize `value`.
    pub scale: f64,
    pub tol: f64,
    /// `None` for exploratory steps.
    pub pass: Option<bool>,
    /// Set when the verdict comes from the double-double re-run.
    #[serde(default)]
    pub extended: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainReport {
    pub mode: JetMode,
    pub n: usize,
    pub p: f64,
    pub alpha: f64,
    pub beta: f64,
    pub steps: Vec<StepResult>,
}

impl ChainReport {
    pub fn passed(&self) -> bool {
        self.steps.iter().all(|s| s.pass != Some(false))
    }

    pub fn step(&self, name: &str) -> Option<&StepResult> {
        self.steps.iter().find(|s| s.name == name)
    }

    /// Largest identity relative error.
    pub fn worst_identity(&self) -> f64 {
        self.steps
            .iter()
            .filter(|s| s.kind == StepKind::Identity)
            .map(|s| s.value)
            .fold(0.0, f64::max)
    }

    /// Smallest inequality slack divided by its scale.
    pub fn worst_inequality(&self) -> f64 {
        self.steps
            .iter()
            .filter(|s| s.kind == StepKind::Inequality)
            .map(|s| s.value / s.scale.max(f64::MIN_POSITIVE))
            .fold(f64::INFINITY, f64::min)
    }
}

/// One place where a reference formula and its derivation disagree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Correction {
    pub step: &'static str,
    pub reference_form: &'static str,
    pub derived_form: &'static str,
}

/// Transcription fixes applied by the closed forms in this module. Each entry
/// is exercised by the identity step named in `step`.
pub const CORRECTIONS: &[Correction] = &[
    Correction {
        step: "j2",
        reference_form: "+4 h_t b^{11 Σ_j h_tj b^{jj}} b_11,j",
        derived_form: "+4 h_t b^{11} Σ_j h_tj b^{jj} b_11,j",
    },
    Correction {
        step: "r_coefficients",
        reference_form: "r_2 = (α²+2α)/(p-1) (b^{11})2 - ...",
        derived_form: "r_2 = (α²+2α)/(p-1) (b^{11})² - 2(1+α)/(p-1) b^{11} Σ_{i≥2} b^{ii}",
    },
    Correction {
        step: "l_b11",
        reference_form: "2 Σ_{i,j} A_ij b^{ii} b^{jj} b^{kk} b_ik,1 b_jk,1 (k unsummed)",
        derived_form: "2 Σ_{i,j,k} A_ij b^{ii} b^{jj} b^{kk} b_ik,1 b_jk,1",
    },
    Correction {
        step: "i4",
        reference_form: "2 b^{11} Σ_{i,j} A_ij b^{ii} b^{jj} b^{kk} b_ik,1 b_jk,1 (k unsummed)",
        derived_form: "2 b^{11} Σ_{i,j,k} A_ij b^{ii} b^{jj} b^{kk} b_ik,1 b_jk,1",
    },
    Correction {
        step: "p_split",
        reference_form: "minimal-surface P̄_4 = q_1 h_t² + q_2 h_t1² + Σ q_{3,i} h_ti² + ...",
        derived_form: "minimal-surface P̄_4 = q̄_1 h_t² + q̄_2 h_t1² + Σ q̄_{3,i} h_ti² + ...",
    },
    Correction {
        step: "p3_expansion",
        reference_form: "minimal-surface P̄_3: 2α² b^{11}(1+h_t⁻²) Σ_{i≥2} h_ti² b_ii",
        derived_form: "2α² b^{11}(1+h_t⁻²) Σ_{i≥2} h_ti² b^{ii}",
    },
    Correction {
        step: "final_inequality",
        reference_form: "minimal-surface P̄_3 = (bound after dropping the b_1l,i terms) + R̄_3",
        derived_form: "P̄_3 ≥ (bound after dropping the b_1l,i terms) + R̄_3",
    },
];

struct Raw<R> {
    name: &'static str,
    kind: StepKind,
    lhs: R,
    rhs: R,
    tol: f64,
}

fn ident<R>(name: &'static str, lhs: R, rhs: R) -> Raw<R> {
    Raw {
        name,
        kind: StepKind::Identity,
        lhs,
        rhs,
        tol: TOL_ID,
    }
}

fn exact<R>(name: &'static str, lhs: R, rhs: R) -> Raw<R> {
    Raw {
        name,
        kind: StepKind::Identity,
        lhs,
        rhs,
        tol: TOL_EXACT,
    }
}

fn ineq<R>(name: &'static str, lhs: R, rhs: R) -> Raw<R> {
    Raw {
        name,
        kind: StepKind::Inequality,
        lhs,
        rhs,
        tol: TOL_ID,
    }
}

fn vanish<R: Real>(name: &'static str, x: R, tol: f64) -> Raw<R> {
    Raw {
        name,
        kind: StepKind::Vanishing,
        lhs: x,
        rhs: R::zero(),
        tol,
    }
}

/// Which special parameter pair the jet carries.
#[derive(Clone, Copy, PartialEq)]
enum Case {
    /// `α = -1, β = 1`.
    MaxRatio,
    /// `α = β = 0` with three dimensions (and p = 2 for the p-Laplacian).
    LogCurvature3d,
    Other,
}

fn case_of(jet: &Jet) -> Case {
    if jet.alpha == -1.0 && jet.beta == 1.0 {
        Case::MaxRatio
    } else if jet.alpha == 0.0
        && jet.beta == 0.0
        && jet.n == 3
        && (jet.mode == JetMode::Minimal || jet.p == 2.0)
    {
        Case::LogCurvature3d
    } else {
        Case::Other
    }
}

/// Closed forms of one chain, selected by mode.
struct Forms<R: Real> {
    i1: fn(&Direct<R>) -> R,
    i2: fn(&Direct<R>) -> R,
    i12: fn(&Direct<R>) -> R,
    j: [fn(&Direct<R>) -> R; 4],
    l_b11: fn(&Direct<R>) -> R,
    i4: fn(&Direct<R>) -> R,
    l_phi: fn(&Direct<R>) -> R,
    beta_phi_t2: fn(&Direct<R>) -> R,
    p: [fn(&Direct<R>) -> R; 4],
    p2_lower: fn(&Direct<R>) -> R,
    p2_expanded: fn(&Direct<R>) -> R,
    r2: fn(&Direct<R>) -> R,
    p30: fn(&Direct<R>) -> R,
    r3: fn(&Direct<R>) -> R,
    p31_terms: fn(&Direct<R>) -> R,
    p31_stage1: fn(&Direct<R>) -> R,
    p31_stage2: fn(&Direct<R>) -> R,
    final_closed: fn(&Direct<R>) -> R,
    case_3d_closed: fn(&Direct<R>) -> R,
}

fn forms<R: Real>(mode: JetMode) -> Forms<R> {
    match mode {
        JetMode::PLaplace => Forms {
            i1: plaplace::i1,
            i2: plaplace::i2,
            i12: plaplace::i12,
            j: [plaplace::j1, plaplace::j2, plaplace::j3, plaplace::j4],
            l_b11: plaplace::l_b11,
            i4: plaplace::i4,
            l_phi: plaplace::l_phi,
            beta_phi_t2: plaplace::beta_phi_t2,
            p: [plaplace::p1, plaplace::p2, plaplace::p3, plaplace::p4],
            p2_lower: plaplace::p2_lower,
            p2_expanded: plaplace::p2_expanded,
            r2: plaplace::r2,
            p30: plaplace::p30,
            r3: plaplace::r3,
            p31_terms: plaplace::p31_terms,
            p31_stage1: plaplace::p31_stage1,
            p31_stage2: plaplace::p31_stage2,
            final_closed: plaplace::final_closed_form,
            case_3d_closed: plaplace::case_ii_closed_form,
        },
        JetMode::Minimal => Forms {
            i1: minimal::i1,
            i2: minimal::i2,
            i12: minimal::i12,
            j: [minimal::j1, minimal::j2, minimal::j3, minimal::j4],
            l_b11: minimal::l_b11,
            i4: minimal::i4,
            l_phi: minimal::l_phi,
            beta_phi_t2: minimal::beta_phi_t2,
            p: [minimal::p1, minimal::p2, minimal::p3, minimal::p4],
            p2_lower: minimal::p2_lower,
            p2_expanded: minimal::p2_expanded,
            r2: minimal::r2,
            p30: minimal::p30,
            r3: minimal::r3,
            p31_terms: minimal::p31_terms,
            p31_stage1: minimal::p31_stage1,
            p31_stage2: minimal::p31_stage2,
            final_closed: minimal::final_closed_form,
            case_3d_closed: minimal::case_3d_closed_form,
        },
    }
}

/// The final lower bound for `L(φ) + βφ_t²` in each chain.
fn final_bound<R: Real>(mode: JetMode, d: &Direct<R>) -> R {
    match mode {
        JetMode::PLaplace => plaplace::degenerate(d),
        JetMode::Minimal => minimal::q_bar1(d) + minimal::q_bar2(d),
    }
}

/// Sum of the lower bounds before the final regrouping: `P_2`, `P_3` after
/// both stages, and `P_4`, all without remainder terms.
fn pre_regroup<R: Real>(mode: JetMode, d: &Direct<R>) -> R {
    match mode {
        JetMode::PLaplace => plaplace::p2_expanded(d) + plaplace::p33(d) + plaplace::p4(d),
        JetMode::Minimal => minimal::p2_expanded(d) + minimal::p32(d) + minimal::p4(d),
    }
}

fn raw_steps<R: Real>(jet: &Jet, crit: &Jet, zero: &Jet) -> Vec<Raw<R>> {
    let mode = jet.mode;
    let f = forms::<R>(mode);
    let u = Direct::<R>::new(jet);
    let c = Direct::<R>::new(crit);
    let z = Direct::<R>::new(zero);
    let case = case_of(jet);
    let beta_ok = jet.beta > -1.0;
    let mut out = Vec::new();

    // L(φ) and its pieces
    let pieces = u.l_phi_pieces();
    let l_phi = u.l_phi();
    out.push(ident("l_phi_split", l_phi, pieces[0] + pieces[1] + pieces[2] + pieces[3]));
    out.push(ident("i1", pieces[0], (f.i1)(&u)));
    out.push(ident("i2", pieces[1], (f.i2)(&u)));
    out.push(ident("i1_plus_i2", pieces[0] + pieces[1], (f.i12)(&u)));
    for (k, name) in ["j1", "j2", "j3", "j4"].into_iter().enumerate() {
        out.push(ident(name, u.j_raw[k], (f.j[k])(&u)));
    }
    out.push(ident("l_b11", u.l_b11(), (f.l_b11)(&u)));
    out.push(ident("i4", pieces[3], (f.i4)(&u)));
    out.push(ident("l_phi", l_phi, (f.l_phi)(&u)));
    let q_zero = match mode {
        JetMode::PLaplace => plaplace::q_poly(&z),
        JetMode::Minimal => minimal::q_poly(&z) + minimal::l_phi_kappa_terms(&z),
    };
    out.push(ident("q_coefficients", z.l_phi(), q_zero));

    // L(e^{βφ})
    let bpt = u.beta_phi_t2();
    out.push(ident("beta_phi_t2", bpt, (f.beta_phi_t2)(&u)));
    let be = u.beta;
    let pt = u.phi_t();
    let mut grad = u.a_form(|i| u.phi_i(i), |j| u.phi_i(j));
    for i in 0..u.m {
        grad -= u.h_ti[i] * u.binv[i] * u.phi_i(i) * pt * 2.0;
    }
    out.push(ident(
        "exp_beta_phi",
        u.l_exp_beta_phi_scaled(),
        be * (l_phi + bpt) + be * be * grad,
    ));
    out.push(ident(
        "p_split",
        l_phi + bpt,
        (f.p[0])(&u) + (f.p[1])(&u) + (f.p[2])(&u) + (f.p[3])(&u),
    ));
    if jet.beta != -1.0 {
        out.push(ident("p2_expansion", (f.p2_lower)(&u), (f.p2_expanded)(&u) + (f.r2)(&u)));
    }
    out.push(ident("p3_expansion", (f.p[2])(&u), (f.p30)(&u) + (f.r3)(&u)));
    if jet.beta != -1.0 {
        match mode {
            JetMode::PLaplace => {
                let q = plaplace::q_poly(&u);
                out.push(ident("r_coefficients", plaplace::r_poly(&u), pre_regroup(mode, &u) - q));
                out.push(ident(
                    "degenerate_coefficients",
                    plaplace::degenerate(&u),
                    q + plaplace::r_poly(&u),
                ));
            }
            JetMode::Minimal => {
                out.push(ident("q_bar_regrouping", final_bound(mode, &u), pre_regroup(mode, &u)));
            }
        }
        match case {
            Case::MaxRatio => out.push(exact("final_closed_form", final_bound(mode, &u), (f.final_closed)(&u))),
            Case::LogCurvature3d => out.push(exact(
                "case_3d_closed_form",
                final_bound(mode, &u),
                (f.case_3d_closed)(&u),
            )),
            Case::Other => {}
        }
    }

    // Inequalities on the critical jet.
    out.push(ineq("p1_nonneg", (f.p[0])(&c), R::zero()));
    if beta_ok {
        out.push(ineq("p2_bound", (f.p[1])(&c), (f.p2_lower)(&c)));
    }
    out.push(ineq("p31_stage1", (f.p31_terms)(&c), (f.p31_stage1)(&c)));
    out.push(ineq("p31_stage2", (f.p31_stage1)(&c), (f.p31_stage2)(&c)));
    if jet.beta != -1.0 {
        out.push(vanish("r2_critical", (f.r2)(&c), TOL_ID));
    }
    out.push(vanish("r3_critical", (f.r3)(&c), TOL_ID));
    if beta_ok {
        let bound = final_bound(mode, &c);
        out.push(ineq("final_inequality", c.l_phi() + c.beta_phi_t2(), bound));
        match case {
            Case::MaxRatio => {
                out.push(ineq("final_bound_nonneg", (f.final_closed)(&c), R::zero()));
                if jet.n == 2 && mode == JetMode::PLaplace {
                    out.push(vanish("final_bound_zero_2d", bound, TOL_EXACT));
                }
            }
            Case::LogCurvature3d => out.push(ineq("case_3d_nonneg", bound, R::zero())),
            Case::Other => out.push(Raw {
                name: "exploratory_bound",
                kind: StepKind::Exploratory,
                lhs: bound,
                rhs: R::zero(),
                tol: 0.0,
            }),
        }
    }
    out
}

fn judge(kind: StepKind, diff: f64, scale: f64, tol: f64) -> (f64, Option<bool>) {
    let s = scale.max(f64::MIN_POSITIVE);
    match kind {
        StepKind::Identity => {
            let e = diff.abs() / s;
            (e, Some(e < tol))
        }
        StepKind::Inequality => (diff, Some(diff >= -tol * s)),
        StepKind::Vanishing => {
            let e = diff.abs() / s;
            (e, Some(e <= tol))
        }
        StepKind::Exploratory => (diff / s, None),
    }
}

/// Evaluate every step of the chain that applies to the jet's mode and
/// `(α, β)`. Steps that divide by `1 + β` are skipped when `β = -1`; the
/// completed-square bound needs `β > -1`.
pub fn check_chain(jet: &Jet) -> ChainReport {
    let crit = enforce_first_order_condition(jet);
    let zero = jet.with_zero_tensors();
    let raw = raw_steps::<Tracked>(jet, &crit, &zero);
    let mut dd: Option<Vec<Raw<DoubleDouble>>> = None;
    let steps = raw
        .iter()
        .enumerate()
        .map(|(k, r)| {
            let scale = r.lhs.mag.max(r.rhs.mag);
            let (mut value, mut pass) = judge(r.kind, r.lhs.v - r.rhs.v, scale, r.tol);
            let mut extended = false;
            if r.kind == StepKind::Identity && value >= r.tol && value <= GRAY_HI {
                let hi = dd.get_or_insert_with(|| raw_steps::<DoubleDouble>(jet, &crit, &zero));
                let diff = (hi[k].lhs - hi[k].rhs).value();
                (value, pass) = judge(r.kind, diff, scale, r.tol);
                extended = true;
            }
            StepResult {
                name: r.name.to_string(),
                kind: r.kind,
                value,
                scale,
                tol: r.tol,
                pass,
                extended,
            }
        })
        .collect();
    ChainReport {
        mode: jet.mode,
        n: jet.n,
        p: jet.p,
        alpha: jet.alpha,
        beta: jet.beta,
        steps,
    }
}

/// Evaluate the closed forms of both chains on the same free data, the
/// minimal-surface ones with `κ = 0` and the p-Laplace ones with `p = 2`.
/// Returns `(name, p-Laplace value, minimal value)`; the pairs must agree.
pub fn kappa_zero_pairs(jet: &Jet) -> Vec<(&'static str, f64, f64)> {
    let mut pl = jet.clone();
    pl.mode = JetMode::PLaplace;
    pl.p = 2.0;
    pl.kappa = 0.0;
    pl.refresh();
    let mut mn = pl.clone();
    mn.mode = JetMode::Minimal;
    mn.refresh();
    let a = Direct::<f64>::new(&pl);
    let b = Direct::<f64>::new(&mn);
    let fa = forms::<f64>(JetMode::PLaplace);
    let fb = forms::<f64>(JetMode::Minimal);
    let mut out = vec![
        ("i1", (fa.i1)(&a), (fb.i1)(&b)),
        ("i2", (fa.i2)(&a), (fb.i2)(&b)),
        ("i1_plus_i2", (fa.i12)(&a), (fb.i12)(&b)),
        ("l_b11", (fa.l_b11)(&a), (fb.l_b11)(&b)),
        ("i4", (fa.i4)(&a), (fb.i4)(&b)),
        ("l_phi", (fa.l_phi)(&a), (fb.l_phi)(&b)),
        ("beta_phi_t2", (fa.beta_phi_t2)(&a), (fb.beta_phi_t2)(&b)),
        ("p2_expanded", (fa.p2_expanded)(&a), (fb.p2_expanded)(&b)),
        ("p30", (fa.p30)(&a), (fb.p30)(&b)),
        ("r3", (fa.r3)(&a), (fb.r3)(&b)),
        ("final_bound", final_bound(JetMode::PLaplace, &a), final_bound(JetMode::Minimal, &b)),
    ];
    for k in 0..4 {
        out.push(("j", (fa.j[k])(&a), (fb.j[k])(&b)));
        out.push(("p", (fa.p[k])(&a), (fb.p[k])(&b)));
    }
    out
}
