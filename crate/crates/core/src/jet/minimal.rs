//! Regrouped closed forms of the minimal-surface chain.
//!
//! The coefficient is `c = κ + h_t²` with `κ = 1` for the minimal surface
//! equation. Every form keeps track of which terms come from the constant
//! `κ`, so that `κ = 0` reproduces the p = 2 forms of the p-Laplace chain
//! term by term.

use super::scalar::Real;
use super::Direct;

type D<R> = Direct<R>;

fn bb<R: Real>(d: &D<R>) -> R {
    d.binv[0]
}

/// `κ + h_t²`.
fn hbar<R: Real>(d: &D<R>) -> R {
    d.kappa + d.h_t.sq()
}

fn ht2inv<R: Real>(d: &D<R>) -> R {
    R::lit(1.0) / d.h_t.sq()
}

pub fn i1<R: Real>(d: &D<R>) -> R {
    let hb = hbar(d);
    -(d.alpha * ht2inv(d) * hb) * d.sum_hb_sq() - d.alpha * ht2inv(d) * hb.sq() * d.sigma.sq()
}

pub fn i2<R: Real>(d: &D<R>) -> R {
    let a = d.alpha;
    let hb = hbar(d);
    -(a * hb) * d.sum_binv_sq() - a * d.sum_hb_sq() + a * hb * d.sigma.sq() * 2.0
        + a * d.sigma * d.sum_h2b() * 2.0
}

pub fn i12<R: Real>(d: &D<R>) -> R {
    let a = d.alpha;
    let k = d.kappa;
    let hb = hbar(d);
    -(a * k * ht2inv(d)) * d.sum_hb_sq() - a * d.sum_hb_sq() * 2.0
        + a * (-(k * ht2inv(d)) + 1.0) * hb * d.sigma.sq()
        - a * hb * d.sum_binv_sq()
        + a * d.sigma * d.sum_h2b() * 2.0
}

fn j1_common<R: Real>(d: &D<R>) -> R {
    let b = bb(d);
    let ht = d.h_t;
    let s_rest = d.sum_binv_rest();
    let mut v = R::zero();
    for i in 0..d.m {
        v += d.binv[i] * d.bt(0, i).sq() * 2.0;
    }
    v + ht * d.sigma * d.b11_t() * 2.0 - ht * b * d.b11_t() * 4.0 - ht.sq() * s_rest * 2.0
        + d.h_ti[0].sq() * s_rest * 2.0
}

pub fn j1<R: Real>(d: &D<R>) -> R {
    let mut v = j1_common(d);
    for i in 0..d.m {
        v += d.h_ti[i] * d.binv[i] * d.b11_it[i] * 2.0;
    }
    v
}

fn sum_b2_bii1<R: Real>(d: &D<R>, from: usize) -> R {
    (from..d.m).fold(R::zero(), |a, i| a + d.binv[i].sq() * d.d3(i, i, 0))
}

fn cross_term<R: Real>(d: &D<R>) -> R {
    let mut v = R::zero();
    for i in 0..d.m {
        for j in 0..d.m {
            v += d.h_ti[j] * d.binv[i] * d.binv[j] * d.d3(i, j, 0) * d.bt(0, i);
        }
    }
    v
}

fn sum_hb_b11j<R: Real>(d: &D<R>) -> R {
    (0..d.m).fold(R::zero(), |a, j| a + d.h_ti[j] * d.binv[j] * d.b11_i(j))
}

pub fn j2<R: Real>(d: &D<R>) -> R {
    -(d.h_t * d.h_ti[0] * 4.0) * sum_b2_bii1(d, 0) - cross_term(d) * 4.0
        + d.h_t * bb(d) * sum_hb_b11j(d) * 4.0
}

pub fn j3<R: Real>(d: &D<R>) -> R {
    let mut v = R::zero();
    for k in 0..d.m {
        v += d.binv[k] * d.a_form(|i| d.d3(i, k, 0), |j| d.d3(j, k, 0));
    }
    v * 2.0
}

pub fn j4<R: Real>(d: &D<R>) -> R {
    let mut v = R::zero();
    for i in 0..d.m {
        for j in 0..d.m {
            v -= d.a(i, j) * d.binv[i] * d.binv[j] * d.b11_ij(i, j);
        }
    }
    v - d.h_tt + hbar(d) * d.b[0] * d.sum_binv_sq() + d.b[0] * d.sum_hb_sq()
}

pub fn l_b11<R: Real>(d: &D<R>) -> R {
    j1_common(d) - d.h_t * d.h_ti[0] * sum_b2_bii1(d, 0) * 4.0 - cross_term(d) * 4.0
        + d.h_t * bb(d) * sum_hb_b11j(d) * 4.0
        + j3(d)
        + hbar(d) * d.b[0] * d.sum_binv_sq()
        + d.b[0] * d.sum_hb_sq()
}

pub fn i4<R: Real>(d: &D<R>) -> R {
    let b = bb(d);
    let ht = d.h_t;
    let ht1 = d.h_ti[0];
    let s_rest = d.sum_binv_rest();
    let mut first = R::zero();
    for i in 0..d.m {
        first += d.binv[i] * d.bt(0, i).sq();
    }
    b * first * 2.0 + ht * d.sigma * b * d.b11_t() * 2.0 - ht * b.sq() * d.b11_t() * 4.0
        - ht.sq() * b * s_rest * 2.0
        + ht1.sq() * b * s_rest * 2.0
        - ht * ht1 * b * sum_b2_bii1(d, 0) * 4.0
        - b * cross_term(d) * 4.0
        + ht * b.sq() * sum_hb_b11j(d) * 4.0
        + b * j3(d)
        + hbar(d) * d.sum_binv_sq()
        + d.sum_hb_sq()
}

pub fn q1<R: Real>(d: &D<R>) -> R {
    let a = d.alpha;
    let b = bb(d);
    let s = d.sum_binv_rest();
    b.sq() - (-a + 1.0) * b * s * 2.0 + (-a + 1.0) * d.sum_binv_sq_rest() + a * s.sq()
}

pub fn q2<R: Real>(d: &D<R>) -> R {
    let b = bb(d);
    b.sq() + (d.alpha + 1.0) * b * d.sum_binv_rest() * 2.0
}

pub fn q3<R: Real>(d: &D<R>, i: usize) -> R {
    let a = d.alpha;
    a * d.sigma * d.binv[i] * 2.0 + (-(a * 2.0) + 1.0) * d.binv[i].sq()
}

pub fn q_poly<R: Real>(d: &D<R>) -> R {
    let mut v = q1(d) * d.h_t.sq() + q2(d) * d.h_ti[0].sq();
    for i in 1..d.m {
        v += q3(d, i) * d.h_ti[i].sq();
    }
    v
}

/// Terms of `L̄(φ)` that come only from the constant `κ`.
pub fn l_phi_kappa_terms<R: Real>(d: &D<R>) -> R {
    let a = d.alpha;
    let k = d.kappa;
    -(a * k * ht2inv(d)) * d.sum_hb_sq() - a * k * k * ht2inv(d) * d.sigma.sq()
        + (-a + 1.0) * k * d.sum_binv_sq()
}

pub fn l_phi<R: Real>(d: &D<R>) -> R {
    let b = bb(d);
    let ht = d.h_t;
    super::plaplace::bracket_11(d)
        + super::plaplace::bracket_rest(d, |l| d.a_form(|i| d.d3(0, l, i), |j| d.d3(0, l, j)))
        + ht * d.sigma * b * d.b11_t() * 2.0
        - ht * b.sq() * d.b11_t() * 4.0
        - ht * d.h_ti[0] * b * sum_b2_bii1(d, 0) * 4.0
        + ht * b.sq() * sum_hb_b11j(d) * 4.0
        + q_poly(d)
        + l_phi_kappa_terms(d)
}

pub fn beta_phi_t2<R: Real>(d: &D<R>) -> R {
    let (a, be, k) = (d.alpha, d.beta, d.kappa);
    let h = d.sum_h2b();
    let ht = d.h_t;
    let s = d.sigma;
    let bb11t = bb(d) * d.b11_t();
    be * a * a * ht.sq() * s.sq() + be * a * a * s * h * 2.0 + be * a * a * ht2inv(d) * h.sq()
        + be * a * ht * s * bb11t * 2.0
        + be * a / ht * h * bb11t * 2.0
        + be * bb11t.sq()
        + be * a * a * k * k * ht2inv(d) * s.sq()
        + be * a * k / ht * s * bb11t * 2.0
        + be * a * a * k * ht2inv(d) * s * (ht.sq() * s + h) * 2.0
}

pub fn p1<R: Real>(d: &D<R>) -> R {
    super::plaplace::p1(d)
}

fn sum_bb11<R: Real>(d: &D<R>) -> R {
    let b = bb(d);
    (0..d.m).fold(R::zero(), |v, i| v + d.h_ti[i] * d.binv[i] * b * d.b11_i(i))
}

pub fn p2<R: Real>(d: &D<R>) -> R {
    let (a, be, k) = (d.alpha, d.beta, d.kappa);
    let ht = d.h_t;
    let bb11t = bb(d) * d.b11_t();
    let lin = sum_bb11(d) - ht * d.sigma + ht * bb(d) * 2.0 - be * a * ht * d.sigma
        - be * a / ht * d.sum_h2b()
        - be * a * k / ht * d.sigma;
    (be + 1.0) * bb11t.sq() - lin * bb11t * 2.0
}

pub fn p2_square_arg<R: Real>(d: &D<R>) -> R {
    let (a, be, k) = (d.alpha, d.beta, d.kappa);
    let ht = d.h_t;
    sum_bb11(d) - (be * a + 1.0) * ht * d.sigma + ht * bb(d) * 2.0 - be * a / ht * d.sum_h2b()
        - be * a * k / ht * d.sigma
}

pub fn p2_lower<R: Real>(d: &D<R>) -> R {
    -(p2_square_arg(d).sq() / (d.beta + 1.0))
}

fn p2_x<R: Real>(d: &D<R>) -> R {
    let (a, be, k) = (d.alpha, d.beta, d.kappa);
    let ht = d.h_t;
    -(a * (be + 1.0) / ht * d.sum_h2b()) - (be * a + 1.0) * ht * d.sigma + ht * bb(d) * 2.0
        - be * a * k / ht * d.sigma
}

pub fn p2_expanded<R: Real>(d: &D<R>) -> R {
    let (a, be, k) = (d.alpha, d.beta, d.kappa);
    let b = bb(d);
    let h = d.sum_h2b();
    let s = d.sigma;
    let ht2 = d.h_t.sq();
    let one_b = be + 1.0;
    let one_ba = be * a + 1.0;
    -(a * a * one_b * ht2inv(d) * h.sq()) - one_ba.sq() / one_b * ht2 * s.sq() - ht2 * b.sq() * 4.0 / one_b
        - a * one_ba * s * h * 2.0
        + a * b * h * 4.0
        + one_ba * 4.0 / one_b * ht2 * s * b
        - be * be * a * a * k * k / one_b * ht2inv(d) * s.sq()
        - be * a * a * k * ht2inv(d) * s * h * 2.0
        - be * a * one_ba * k * 2.0 / one_b * s.sq()
        + be * a * k * 4.0 / one_b * b * s
}

pub fn r2<R: Real>(d: &D<R>) -> R {
    let z = d.sum_hb_phi();
    let one_b = d.beta + 1.0;
    -(z.sq() / one_b) - p2_x(d) * z * 2.0 / one_b
}

fn sum_rest_rest<R: Real>(d: &D<R>) -> R {
    let mut v = R::zero();
    for i in 1..d.m {
        for l in 1..d.m {
            v += d.binv[l] * d.binv[i].sq() * d.d3(0, l, i).sq();
        }
    }
    v
}

pub fn p3<R: Real>(d: &D<R>) -> R {
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
    b.sq() * d.a_form(|i| d.b11_i(i), |j| d.b11_i(j)) - ht * d.h_ti[0] * b * sum_b2_bii1(d, 0) * 4.0
        + hbar(d) * b * mid * 2.0
        + ht * b.sq() * sum_hb_b11j(d) * 4.0
}

pub fn p4<R: Real>(d: &D<R>) -> R {
    let (a, be, k) = (d.alpha, d.beta, d.kappa);
    let h = d.sum_h2b();
    let s = d.sigma;
    q_poly(d) + be * a * a * d.h_t.sq() * s.sq() + be * a * a * s * h * 2.0
        + be * a * a * ht2inv(d) * h.sq()
        + l_phi_kappa_terms(d)
        + be * a * a * k * k * ht2inv(d) * s.sq()
        + be * a * a * k * s.sq() * 2.0
        + be * a * a * k * ht2inv(d) * s * h * 2.0
}

pub fn p31_terms<R: Real>(d: &D<R>) -> R {
    hbar(d) * bb(d) * sum_rest_rest(d) * 2.0 - d.h_t * d.h_ti[0] * bb(d) * sum_b2_bii1(d, 1) * 4.0
}

pub fn p31_stage1<R: Real>(d: &D<R>) -> R {
    let mut v = R::zero();
    for i in 1..d.m {
        let x = d.h_t * d.binv[i] * d.d3(i, i, 0);
        v += d.binv[i] * (x.sq() - x * d.h_ti[0] * 2.0);
    }
    bb(d) * v * 2.0
}

pub fn p31_stage2<R: Real>(d: &D<R>) -> R {
    -(d.h_ti[0].sq() * bb(d) * d.sum_binv_rest() * 2.0)
}

fn p3_common<R: Real>(d: &D<R>) -> R {
    let a = d.alpha;
    let b = bb(d);
    let h = d.sum_h2b();
    let lift = d.kappa * ht2inv(d) + 1.0;
    a * a * lift * d.sum_hb_sq() + a * a * ht2inv(d) * h.sq() + a * a * b * lift * d.sum_h2b_rest() * 2.0
        + a * d.h_ti[0].sq() * b.sq() * 4.0
        - a * b * h * 4.0
}

pub fn p30<R: Real>(d: &D<R>) -> R {
    p3_common(d) + p31_terms(d)
}

pub fn r3<R: Real>(d: &D<R>) -> R {
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
    first + hbar(d) * b * second * 2.0 - ht * d.h_ti[0] * b.sq() * d.phi_i(0) * 4.0
        + ht * b * d.sum_hb_phi() * 4.0
}

pub fn p32<R: Real>(d: &D<R>) -> R {
    p3_common(d) + p31_stage2(d)
}

pub fn q_bar1<R: Real>(d: &D<R>) -> R {
    let (a, be) = (d.alpha, d.beta);
    let b = bb(d);
    let s = d.sum_binv_rest();
    let one_b = be + 1.0;
    let bracket = be * (a + 1.0).sq() / one_b * b.sq()
        + (be * a * a * 2.0 + be * a * 2.0 + a * 2.0 - be * 2.0) / one_b * b * s
        + (-a + 1.0) * d.sum_binv_sq_rest()
        + (be * a + 1.0) * (a - 1.0) / one_b * s.sq();
    let mut v = d.h_t.sq() * bracket + (a + 1.0).sq() * (d.h_ti[0] * b).sq();
    for i in 1..d.m {
        let bi = d.binv[i];
        v += d.h_ti[i].sq() * (a * a * b * bi * 2.0 + (-a + 1.0).sq() * bi.sq());
    }
    v
}

pub fn q_bar2<R: Real>(d: &D<R>) -> R {
    let (a, be, k) = (d.alpha, d.beta, d.kappa);
    let b = bb(d);
    let s = d.sigma;
    let one_b = be + 1.0;
    k * a * (a - 1.0) * ht2inv(d) * d.sum_hb_sq() + k * a * a * ht2inv(d) * b * d.sum_h2b_rest() * 2.0
        + k * k * a * (be * a - be - 1.0) / one_b * ht2inv(d) * s.sq()
        + k * be * a * (a - 1.0) * 2.0 / one_b * s.sq()
        + k * (-a + 1.0) * d.sum_binv_sq()
        + k * be * a * 4.0 / one_b * s * b
}

/// Closed form of `Q̄_1 + Q̄_2` at `α = -1, β = 1`.
pub fn final_closed_form<R: Real>(d: &D<R>) -> R {
    let b = bb(d);
    let k = d.kappa;
    let s = d.sigma;
    let mut v = R::zero();
    for i in 1..d.m {
        let bi = d.binv[i];
        v += hbar(d) * bi * (bi - b) * 2.0 + d.h_ti[i].sq() * bi * (b + bi * 2.0) * 2.0;
    }
    v + k * ht2inv(d) * d.sum_hb_sq() * 2.0 + k * ht2inv(d) * b * d.sum_h2b_rest() * 2.0
        + k * k * ht2inv(d) * s.sq() * 1.5
        + k * s.sq() * 2.0
}

/// Closed form of `Q̄_1 + Q̄_2` at `α = β = 0`, `n = 3`.
pub fn case_3d_closed_form<R: Real>(d: &D<R>) -> R {
    (0..d.m).fold(R::zero(), |v, i| {
        v + (d.h_ti[i] * d.binv[i]).sq() + d.kappa * d.binv[i].sq()
    })
}
