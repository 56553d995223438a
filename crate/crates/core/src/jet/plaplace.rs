//! Regrouped closed forms of the p-Laplace chain, written in terms of `p`.
//!
//! Each function transcribes one displayed formula. Where the reference form
//! differs from what its derivation produces, the derived form is used here
//! and the difference is listed in [`super::CORRECTIONS`].

use super::scalar::Real;
use super::Direct;

type D<R> = Direct<R>;

fn pm1<R: Real>(d: &D<R>) -> R {
    d.p - 1.0
}

/// `b^{11}`.
fn bb<R: Real>(d: &D<R>) -> R {
    d.binv[0]
}

pub fn i1<R: Real>(d: &D<R>) -> R {
    let q = pm1(d);
    -(d.alpha / q) * d.sum_hb_sq() - d.alpha / (q * q) * d.h_t.sq() * d.sigma.sq()
}

pub fn i2<R: Real>(d: &D<R>) -> R {
    let q = pm1(d);
    let a = d.alpha;
    -(a / q) * d.h_t.sq() * d.sum_binv_sq() - a * d.sum_hb_sq()
        + a * 2.0 / (q * q) * d.h_t.sq() * d.sigma.sq()
        + a * 2.0 / q * d.sigma * d.sum_h2b()
}

pub fn i12<R: Real>(d: &D<R>) -> R {
    let q = pm1(d);
    let a = d.alpha;
    -(d.p * a / q) * d.sum_hb_sq() + a / (q * q) * d.h_t.sq() * d.sigma.sq()
        - a / q * d.h_t.sq() * d.sum_binv_sq()
        + a * 2.0 / q * d.sigma * d.sum_h2b()
}

/// Terms of `J_1` / `L(b_11)` that do not involve `b_11,it`.
fn j1_common<R: Real>(d: &D<R>) -> R {
    let q = pm1(d);
    let b = bb(d);
    let ht = d.h_t;
    let ht1 = d.h_ti[0];
    let s_rest = d.sum_binv_rest();
    let mut v = R::zero();
    for i in 0..d.m {
        v += d.binv[i] * d.bt(0, i).sq() * 2.0;
    }
    v + ht * d.sigma * d.b11_t() * 2.0 / q - ht * b * d.b11_t() * 4.0
        + (d.p * 2.0 - 4.0) / q * ht.sq() * b
        - ht.sq() * s_rest * 2.0 / q
        + (-(d.p * 2.0) + 4.0) / q * ht1.sq() * b
        + ht1.sq() * s_rest * 2.0 / q
}

pub fn j1<R: Real>(d: &D<R>) -> R {
    let mut v = j1_common(d);
    for i in 0..d.m {
        v += d.h_ti[i] * d.binv[i] * d.b11_it[i] * 2.0;
    }
    v
}

/// `Σ_i (b^{ii})² b_ii,1`, optionally skipping the first index.
fn sum_b2_bii1<R: Real>(d: &D<R>, from: usize) -> R {
    (from..d.m).fold(R::zero(), |a, i| a + d.binv[i].sq() * d.d3(i, i, 0))
}

/// `Σ_{ij} h_tj b^{ii} b^{jj} b_ij,1 b_1i,t`.
fn cross_term<R: Real>(d: &D<R>) -> R {
    let mut v = R::zero();
    for i in 0..d.m {
        for j in 0..d.m {
            v += d.h_ti[j] * d.binv[i] * d.binv[j] * d.d3(i, j, 0) * d.bt(0, i);
        }
    }
    v
}

/// `Σ_j h_tj b^{jj} b_11,j`.
fn sum_hb_b11j<R: Real>(d: &D<R>) -> R {
    (0..d.m).fold(R::zero(), |a, j| a + d.h_ti[j] * d.binv[j] * d.b11_i(j))
}

pub fn j2<R: Real>(d: &D<R>) -> R {
    let q = pm1(d);
    -(d.h_t * d.h_ti[0] * 4.0 / q) * sum_b2_bii1(d, 0) - cross_term(d) * 4.0
        + d.h_t * bb(d) * sum_hb_b11j(d) * 4.0
}

/// `2 Σ_{ijk} A_ij b^{ii} b^{jj} b^{kk} b_ik,1 b_jk,1`.
pub fn j3<R: Real>(d: &D<R>) -> R {
    let mut v = R::zero();
    for k in 0..d.m {
        v += d.binv[k] * d.a_form(|i| d.d3(i, k, 0), |j| d.d3(j, k, 0));
    }
    v * 2.0
}

pub fn j4<R: Real>(d: &D<R>) -> R {
    let q = pm1(d);
    let mut v = R::zero();
    for i in 0..d.m {
        for j in 0..d.m {
            v -= d.a(i, j) * d.binv[i] * d.binv[j] * d.b11_ij(i, j);
        }
    }
    v - d.h_tt + d.h_t.sq() * d.b[0] * d.sum_binv_sq() / q + d.b[0] * d.sum_hb_sq()
}

pub fn l_b11<R: Real>(d: &D<R>) -> R {
    let q = pm1(d);
    j1_common(d) - d.h_t * d.h_ti[0] * 4.0 / q * sum_b2_bii1(d, 0) - cross_term(d) * 4.0
        + d.h_t * bb(d) * sum_hb_b11j(d) * 4.0
        + j3(d)
        + d.h_t.sq() * d.b[0] * d.sum_binv_sq() / q
        + d.b[0] * d.sum_hb_sq()
}

pub fn i4<R: Real>(d: &D<R>) -> R {
    let q = pm1(d);
    let b = bb(d);
    let ht = d.h_t;
    let ht1 = d.h_ti[0];
    let s_rest = d.sum_binv_rest();
    let mut first = R::zero();
    for i in 0..d.m {
        first += d.binv[i] * d.bt(0, i).sq();
    }
    let mut cross = R::zero();
    for i in 0..d.m {
        for l in 0..d.m {
            cross += d.h_ti[i] * d.binv[i] * d.binv[l] * d.d3(0, l, i) * d.bt(0, l);
        }
    }
    b * first * 2.0 + ht * d.sigma * b * d.b11_t() * 2.0 / q - ht * b.sq() * d.b11_t() * 4.0
        + (d.p * 2.0 - 4.0) / q * ht.sq() * b.sq()
        - ht.sq() * b * s_rest * 2.0 / q
        + (-(d.p * 2.0) + 4.0) / q * ht1.sq() * b.sq()
        + ht1.sq() * b * s_rest * 2.0 / q
        - ht * ht1 * b * sum_b2_bii1(d, 0) * 4.0 / q
        - b * cross * 4.0
        + ht * b.sq() * sum_hb_b11j(d) * 4.0
        + b * j3(d)
        + ht.sq() * d.sum_binv_sq() / q
        + d.sum_hb_sq()
}

pub fn q1<R: Real>(d: &D<R>) -> R {
    let q = pm1(d);
    let a = d.alpha;
    let b = bb(d);
    let s = d.sum_binv_rest();
    (a / (q * q) + (d.p * 2.0 - 3.0 - a) / q) * b.sq() + (a * 2.0 / (q * q) - R::lit(2.0) / q) * b * s
        + (-a + 1.0) / q * d.sum_binv_sq_rest()
        + a / (q * q) * s.sq()
}

pub fn q2<R: Real>(d: &D<R>) -> R {
    let q = pm1(d);
    let a = d.alpha;
    let b = bb(d);
    ((-d.p + 2.0) * a - d.p + 3.0) / q * b.sq() + (a + 1.0) * 2.0 / q * b * d.sum_binv_rest()
}

pub fn q3<R: Real>(d: &D<R>, i: usize) -> R {
    let q = pm1(d);
    let a = d.alpha;
    a * 2.0 / q * d.sigma * d.binv[i] + (q - d.p * a) / q * d.binv[i].sq()
}

/// `q_1 h_t² + q_2 h_t1² + Σ_{i≥2} q_{3,i} h_ti²`.
pub fn q_poly<R: Real>(d: &D<R>) -> R {
    let mut v = q1(d) * d.h_t.sq() + q2(d) * d.h_ti[0].sq();
    for i in 1..d.m {
        v += q3(d, i) * d.h_ti[i].sq();
    }
    v
}

/// `(b^{11})² [Σ A b b b_11,i b_11,j - 2 Σ h_ti b^{ii} b_11,i b_11,t + b_11,t²]`.
pub fn bracket_11<R: Real>(d: &D<R>) -> R {
    let b = bb(d);
    let mut v = d.a_form(|i| d.b11_i(i), |j| d.b11_i(j)) + d.b11_t().sq();
    for i in 0..d.m {
        v -= d.h_ti[i] * d.binv[i] * d.b11_i(i) * d.b11_t() * 2.0;
    }
    b.sq() * v
}

/// `2 b^{11} Σ_{l≥2} b^{ll} [form(b_1l,·) - 2 Σ h_ti b^{ii} b_1l,i b_1l,t + b_1l,t²]`,
/// with the quadratic form supplied by the caller.
pub fn bracket_rest<R: Real>(d: &D<R>, form: impl Fn(usize) -> R) -> R {
    let mut v = R::zero();
    for l in 1..d.m {
        let mut inner = form(l) + d.bt(0, l).sq();
        for i in 0..d.m {
            inner -= d.h_ti[i] * d.binv[i] * d.d3(0, l, i) * d.bt(0, l) * 2.0;
        }
        v += d.binv[l] * inner;
    }
    bb(d) * v * 2.0
}

pub fn l_phi<R: Real>(d: &D<R>) -> R {
    let q = pm1(d);
    let b = bb(d);
    let ht = d.h_t;
    bracket_11(d)
        + bracket_rest(d, |l| d.a_form(|i| d.d3(0, l, i), |j| d.d3(0, l, j)))
        + ht * d.sigma * b * d.b11_t() * 2.0 / q
        - ht * b.sq() * d.b11_t() * 4.0
        - ht * d.h_ti[0] * b * sum_b2_bii1(d, 0) * 4.0 / q
        + ht * b.sq() * sum_hb_b11j(d) * 4.0
        + q_poly(d)
}

pub fn beta_phi_t2<R: Real>(d: &D<R>) -> R {
    let q = pm1(d);
    let (a, be) = (d.alpha, d.beta);
    let h = d.sum_h2b();
    let bb11t = bb(d) * d.b11_t();
    be * a * a / (q * q) * d.h_t.sq() * d.sigma.sq() + be * a * a * 2.0 / q * d.sigma * h
        + be * a * a / d.h_t.sq() * h.sq()
        + be * a * 2.0 / q * d.h_t * d.sigma * bb11t
        + be * a * 2.0 / d.h_t * h * bb11t
        + be * bb11t.sq()
}

pub fn p1<R: Real>(d: &D<R>) -> R {
    bracket_rest(d, |l| d.hh_form(|i| d.d3(0, l, i), |j| d.d3(0, l, j)))
}

/// The factor multiplying `-2 b^{11} b_11,t` in `P_2`.
pub fn p2_linear<R: Real>(d: &D<R>) -> R {
    let q = pm1(d);
    let (a, be) = (d.alpha, d.beta);
    let b = bb(d);
    let mut v = R::zero();
    for i in 0..d.m {
        v += d.h_ti[i] * d.binv[i] * b * d.b11_i(i);
    }
    v - d.h_t * d.sigma / q + d.h_t * b * 2.0 - be * a / q * d.h_t * d.sigma
        - be * a / d.h_t * d.sum_h2b()
}

pub fn p2<R: Real>(d: &D<R>) -> R {
    let bb11t = bb(d) * d.b11_t();
    (d.beta + 1.0) * bb11t.sq() - p2_linear(d) * bb11t * 2.0
}

/// The quantity `Y` in `P_2 ≥ -Y²/(1+β)`.
pub fn p2_square_arg<R: Real>(d: &D<R>) -> R {
    let q = pm1(d);
    let (a, be) = (d.alpha, d.beta);
    let b = bb(d);
    let mut v = R::zero();
    for i in 0..d.m {
        v += d.h_ti[i] * d.binv[i] * b * d.b11_i(i);
    }
    v - (be * a + 1.0) / q * d.h_t * d.sigma + d.h_t * b * 2.0 - be * a / d.h_t * d.sum_h2b()
}

pub fn p2_lower<R: Real>(d: &D<R>) -> R {
    -(p2_square_arg(d).sq() / (d.beta + 1.0))
}

/// `Y` with `b^{11} b_11,i` replaced by `-α h_t⁻¹ h_ti`.
fn p2_x<R: Real>(d: &D<R>) -> R {
    let q = pm1(d);
    let (a, be) = (d.alpha, d.beta);
    -(a * (be + 1.0) / d.h_t * d.sum_h2b()) - (be * a + 1.0) / q * d.h_t * d.sigma
        + d.h_t * bb(d) * 2.0
}

/// Expanded `-X²/(1+β)`.
pub fn p2_expanded<R: Real>(d: &D<R>) -> R {
    let q = pm1(d);
    let (a, be) = (d.alpha, d.beta);
    let b = bb(d);
    let h = d.sum_h2b();
    let ht2 = d.h_t.sq();
    let one_ba = be * a + 1.0;
    -(a * a * (be + 1.0) / ht2 * h.sq()) - one_ba.sq() / ((be + 1.0) * q * q) * ht2 * d.sigma.sq()
        - ht2 * b.sq() * 4.0 / (be + 1.0)
        - a * one_ba * 2.0 / q * d.sigma * h
        + a * b * h * 4.0
        + one_ba * 4.0 / ((be + 1.0) * q) * ht2 * b * d.sigma
}

pub fn r2<R: Real>(d: &D<R>) -> R {
    let z = d.sum_hb_phi();
    let one_b = d.beta + 1.0;
    -(z.sq() / one_b) - p2_x(d) * z * 2.0 / one_b
}

pub fn p3<R: Real>(d: &D<R>) -> R {
    let q = pm1(d);
    let b = bb(d);
    let ht = d.h_t;
    let mut mid = R::zero();
    for l in 1..d.m {
        let mut inner = R::zero();
        for i in 0..d.m {
            inner += d.binv[i].sq() * d.d3(0, l, i).sq();
        }
        mid += d.binv[l] * inner;
    }
    b.sq() * d.a_form(|i| d.b11_i(i), |j| d.b11_i(j)) + ht.sq() * b * mid * 2.0 / q
        - ht * d.h_ti[0] * b * sum_b2_bii1(d, 0) * 4.0 / q
        + ht * b.sq() * sum_hb_b11j(d) * 4.0
}

pub fn p4<R: Real>(d: &D<R>) -> R {
    let q = pm1(d);
    let (a, be) = (d.alpha, d.beta);
    let h = d.sum_h2b();
    q_poly(d) + be * a * a / (q * q) * d.h_t.sq() * d.sigma.sq() + be * a * a * 2.0 / q * d.sigma * h
        + be * a * a / d.h_t.sq() * h.sq()
}

/// `Σ_{i,l≥2} b^{ll} (b^{ii})² b_1l,i²`.
fn sum_rest_rest<R: Real>(d: &D<R>) -> R {
    let mut v = R::zero();
    for i in 1..d.m {
        for l in 1..d.m {
            v += d.binv[l] * d.binv[i].sq() * d.d3(0, l, i).sq();
        }
    }
    v
}

/// The two terms of `P_3` bounded from below in two stages.
pub fn p31_terms<R: Real>(d: &D<R>) -> R {
    let q = pm1(d);
    d.h_t.sq() * bb(d) * sum_rest_rest(d) * 2.0 / q
        - d.h_t * d.h_ti[0] * bb(d) * sum_b2_bii1(d, 1) * 4.0 / q
}

pub fn p31_stage1<R: Real>(d: &D<R>) -> R {
    let q = pm1(d);
    let mut v = R::zero();
    for i in 1..d.m {
        let x = d.h_t * d.binv[i] * d.d3(i, i, 0);
        v += d.binv[i] * (x.sq() - x * d.h_ti[0] * 2.0);
    }
    bb(d) * v * 2.0 / q
}

pub fn p31_stage2<R: Real>(d: &D<R>) -> R {
    -(d.h_ti[0].sq() * bb(d) * d.sum_binv_rest() * 2.0 / pm1(d))
}

pub fn p30<R: Real>(d: &D<R>) -> R {
    let q = pm1(d);
    let a = d.alpha;
    let b = bb(d);
    let h = d.sum_h2b();
    a * a / q * d.sum_hb_sq() + a * a / d.h_t.sq() * h.sq() + a * a * 2.0 / q * b * d.sum_h2b_rest()
        + p31_terms(d)
        + a * 4.0 / q * d.h_ti[0].sq() * b.sq()
        - a * b * h * 4.0
}

pub fn r3<R: Real>(d: &D<R>) -> R {
    let q = pm1(d);
    let a = d.alpha;
    let b = bb(d);
    let ht = d.h_t;
    let first = d.a_form(|i| d.phi_i(i), |j| d.phi_i(j))
        - d.a_form(|i| d.phi_i(i), |j| d.h_ti[j]) * a * 2.0 / ht;
    let mut second = R::zero();
    for l in 1..d.m {
        let pl = d.phi_i(l);
        second += d.binv[l] * (pl.sq() - a * 2.0 / ht * d.h_ti[l] * pl);
    }
    first + ht.sq() * b * second * 2.0 / q - ht * d.h_ti[0] * b.sq() * d.phi_i(0) * 4.0 / q
        + ht * b * d.sum_hb_phi() * 4.0
}

/// `P_3` lower bound after both stages, without `R_3`.
pub fn p33<R: Real>(d: &D<R>) -> R {
    let q = pm1(d);
    let a = d.alpha;
    let b = bb(d);
    let h = d.sum_h2b();
    a * a / q * d.sum_hb_sq() + a * a / d.h_t.sq() * h.sq() + a * a * 2.0 / q * b * d.sum_h2b_rest()
        + p31_stage2(d)
        + a * 4.0 / q * d.h_ti[0].sq() * b.sq()
        - a * b * h * 4.0
}

pub fn r_poly<R: Real>(d: &D<R>) -> R {
    let q = pm1(d);
    let (a, be) = (d.alpha, d.beta);
    let b = bb(d);
    let s = d.sum_binv_rest();
    let one_b = be + 1.0;
    let k = (be * a * a - be * a * 2.0 - 1.0) / (q * q * one_b);
    let r1 = (k + (be * a * 4.0 - d.p * 4.0 + 8.0) / (q * one_b)) * b.sq()
        + (k * 2.0 + (be * a + 1.0) * 4.0 / (q * one_b)) * b * s
        + k * s.sq();
    let r2 = (a * a + a * 2.0) / q * b.sq() - (a + 1.0) * 2.0 / q * b * s;
    let mut v = r1 * d.h_t.sq() + r2 * d.h_ti[0].sq();
    for i in 1..d.m {
        let bi = d.binv[i];
        let r3 = a * a / q * bi.sq() + a * a * 2.0 / q * b * bi - a * 2.0 / q * d.sigma * bi;
        v += r3 * d.h_ti[i].sq();
    }
    v
}

/// The final lower bound for `L(φ) + β φ_t²` on critical jets.
pub fn degenerate<R: Real>(d: &D<R>) -> R {
    let q = pm1(d);
    let (a, be) = (d.alpha, d.beta);
    let b = bb(d);
    let s = d.sum_binv_rest();
    let one_b = be + 1.0;
    let p = d.p;
    let k = (be * a * a - be * a + a - 1.0) / (q * q * one_b);
    let c11 = k + (be * a * 3.0 - a + (p * 2.0 - 3.0) * be - p * 2.0 + 5.0) / (q * one_b);
    let c1s = (be * a * a * 2.0 - be * a * 2.0 + a * 2.0 - 2.0) / (q * q * one_b)
        + (be * a * 4.0 - be * 2.0 + 2.0) / (q * one_b);
    let bracket = c11 * b.sq() + c1s * b * s + k * s.sq() + (-a + 1.0) / q * d.sum_binv_sq_rest();
    let mut v = d.h_t.sq() * bracket + (a * a + (-p + 4.0) * a - p + 3.0) / q * (d.h_ti[0] * b).sq();
    for i in 1..d.m {
        let bi = d.binv[i];
        v += d.h_ti[i].sq() * (a * a * 2.0 / q * b * bi + (a * a - p * a + p - 1.0) / q * bi.sq());
    }
    v
}

/// Closed form of the bound at `α = -1, β = 1`.
pub fn final_closed_form<R: Real>(d: &D<R>) -> R {
    let q = pm1(d);
    let b = bb(d);
    let mut v = R::zero();
    for i in 1..d.m {
        let bi = d.binv[i];
        v += d.h_t.sq() * bi * (bi - b) * 2.0 / q + d.h_ti[i].sq() * bi * (b + d.p * bi) * 2.0 / q;
    }
    v
}

/// Closed form of the bound at `α = β = 0`, `n = 3`, `p = 2`.
pub fn case_ii_closed_form<R: Real>(d: &D<R>) -> R {
    (0..d.m).fold(R::zero(), |v, i| v + (d.h_ti[i] * d.binv[i]).sq())
}
