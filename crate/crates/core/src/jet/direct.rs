//! Chain-rule evaluation of every quantity on a jet.
//!
//! Nothing here uses a regrouped closed form: derived derivatives come from
//! differentiating the equation, φ's derivatives from differentiating
//! `α log(-h_t) + log b_11`, and `L` is applied coefficient by coefficient.
//! These values are the reference side of each identity.

use super::scalar::Real;
use super::Jet;

/// Jet data lifted into `R` together with the chain-rule derived quantities.
#[derive(Debug, Clone)]
pub struct Direct<R: Real> {
    pub m: usize,
    pub alpha: R,
    pub beta: R,
    pub p: R,
    pub s: R,
    pub kappa: R,
    pub h_t: R,
    pub h_ti: Vec<R>,
    pub b: Vec<R>,
    pub binv: Vec<R>,
    pub d3: Vec<R>,
    pub bt: Vec<R>,
    pub b11_ij: Vec<R>,
    pub b11_it: Vec<R>,
    /// `c = s h_t² + κ` and its first two `h_t`-derivatives.
    pub c: R,
    pub c1: R,
    pub c2: R,
    pub sigma: R,
    pub h_tt: R,
    pub h_tij: Vec<R>,
    pub h_tti: Vec<R>,
    pub h_ttt: R,
    pub j_raw: [R; 4],
    pub h_tt11: R,
    pub b11_tt: R,
}

impl<R: Real> Direct<R> {
    pub fn new(jet: &Jet) -> Self {
        let m = jet.m();
        let lift = |v: &[f64]| v.iter().map(|&x| R::lit(x)).collect::<Vec<R>>();
        let h_t = R::lit(jet.h_t);
        let s = match jet.mode {
            super::JetMode::PLaplace => R::lit(1.0) / (R::lit(jet.p) - 1.0),
            super::JetMode::Minimal => R::lit(1.0),
        };
        let kappa = R::lit(jet.kappa);
        let b = lift(&jet.b_diag);
        let binv: Vec<R> = b.iter().map(|&x| R::lit(1.0) / x).collect();
        let mut d = Direct {
            m,
            alpha: R::lit(jet.alpha),
            beta: R::lit(jet.beta),
            p: R::lit(jet.p),
            s,
            kappa,
            h_t,
            h_ti: lift(&jet.h_ti),
            b,
            binv,
            d3: lift(&jet.d3_b),
            bt: lift(&jet.bt),
            b11_ij: lift(&jet.b11_ij),
            b11_it: lift(&jet.b11_it),
            c: s * h_t * h_t + kappa,
            c1: s * h_t * 2.0,
            c2: s * 2.0,
            sigma: R::zero(),
            h_tt: R::zero(),
            h_tij: Vec::new(),
            h_tti: Vec::new(),
            h_ttt: R::zero(),
            j_raw: [R::zero(); 4],
            h_tt11: R::zero(),
            b11_tt: R::zero(),
        };
        d.derive();
        d
    }

    pub fn d3(&self, i: usize, j: usize, k: usize) -> R {
        self.d3[(i * self.m + j) * self.m + k]
    }

    pub fn bt(&self, i: usize, j: usize) -> R {
        self.bt[i * self.m + j]
    }

    pub fn b11_ij(&self, i: usize, j: usize) -> R {
        self.b11_ij[i * self.m + j]
    }

    pub fn h_tij(&self, i: usize, j: usize) -> R {
        self.h_tij[i * self.m + j]
    }

    /// `A_ij = c δ_ij + h_ti h_tj`.
    pub fn a(&self, i: usize, j: usize) -> R {
        let hh = self.h_ti[i] * self.h_ti[j];
        if i == j {
            self.c + hh
        } else {
            hh
        }
    }

    /// `b_11,i`.
    pub fn b11_i(&self, i: usize) -> R {
        self.d3(0, 0, i)
    }

    /// `b_11,t`.
    pub fn b11_t(&self) -> R {
        self.bt(0, 0)
    }

    fn derive(&mut self) {
        let m = self.m;
        let zero = R::zero();
        self.sigma = self.binv.iter().fold(zero, |a, &x| a + x);
        let hh: R = (0..m).fold(zero, |a, i| a + self.h_ti[i].sq() * self.binv[i]);
        self.h_tt = self.c * self.sigma + hh;

        // commutation: h_tij = b_ij,t - h_t δ_ij
        self.h_tij = (0..m * m)
            .map(|ij| {
                let (i, j) = (ij / m, ij % m);
                if i == j {
                    self.bt[ij] - self.h_t
                } else {
                    self.bt[ij]
                }
            })
            .collect();

        // θ_i-derivative of the equation
        self.h_tti = (0..m)
            .map(|i| {
                let mut v = self.c1 * self.h_ti[i] * self.sigma;
                for k in 0..m {
                    v += self.h_tij(k, i) * self.h_ti[k] * self.binv[k] * 2.0;
                }
                for k in 0..m {
                    for l in 0..m {
                        v -= self.a(k, l) * self.d3(k, l, i) * self.binv[k] * self.binv[l];
                    }
                }
                v
            })
            .collect();

        // t-derivative of the equation
        let mut httt = self.c1 * self.h_tt * self.sigma;
        for k in 0..m {
            httt += self.h_tti[k] * self.h_ti[k] * self.binv[k] * 2.0;
        }
        for k in 0..m {
            for l in 0..m {
                httt -= self.a(k, l) * self.bt(k, l) * self.binv[k] * self.binv[l];
            }
        }
        self.h_ttt = httt;

        // second θ_1-derivative of the equation
        let h_t1 = self.h_ti[0];
        let h_t11 = self.h_tij(0, 0);
        let h_tk1 = |k: usize| self.h_tij(k, 0);
        let h_tk11 = |k: usize| {
            if k == 0 {
                self.b11_it[k] - h_t1
            } else {
                self.b11_it[k]
            }
        };
        let delta = |k: usize, l: usize| if k == l { R::lit(1.0) } else { zero };

        let mut j1 = (self.c2 * h_t1 * h_t1 + self.c1 * h_t11) * self.sigma;
        for k in 0..m {
            j1 += (h_tk11(k) * self.h_ti[k] * 2.0 + h_tk1(k).sq() * 2.0) * self.binv[k];
        }

        let a1 = |k: usize, l: usize| {
            self.c1 * h_t1 * delta(k, l) + h_tk1(k) * self.h_ti[l] + self.h_ti[k] * h_tk1(l)
        };
        let mut j2 = zero;
        for k in 0..m {
            for l in 0..m {
                j2 -= a1(k, l) * self.binv[k] * self.binv[l] * self.d3(k, l, 0) * 2.0;
            }
        }

        let mut j3 = zero;
        for k in 0..m {
            for l in 0..m {
                for r in 0..m {
                    j3 += self.a(k, l)
                        * self.binv[k]
                        * self.binv[r]
                        * self.binv[l]
                        * self.d3(k, r, 0)
                        * self.d3(r, l, 0)
                        * 2.0;
                }
            }
        }

        // b_pq,11 = b_11,pq + b_pq - b_11 δ_pq (+ terms vanishing at a diagonal point)
        let mut j4 = zero;
        for k in 0..m {
            for l in 0..m {
                let mut bpq11 = self.b11_ij(k, l);
                if k == l {
                    bpq11 += self.b[k] - self.b[0];
                }
                j4 -= self.a(k, l) * self.binv[k] * self.binv[l] * bpq11;
            }
        }
        self.j_raw = [j1, j2, j3, j4];
        self.h_tt11 = j1 + j2 + j3 + j4;
        // h_11tt = b_11,tt - h_tt
        self.b11_tt = self.h_tt + self.h_tt11;
    }

    /// Apply `L` to a function given by its second derivatives at the point.
    pub fn apply_l(&self, f_ij: impl Fn(usize, usize) -> R, f_it: impl Fn(usize) -> R, f_tt: R) -> R {
        let m = self.m;
        let mut v = f_tt;
        for i in 0..m {
            for j in 0..m {
                v += self.a(i, j) * self.binv[i] * self.binv[j] * f_ij(i, j);
            }
        }
        for i in 0..m {
            v -= self.h_ti[i] * self.binv[i] * f_it(i) * 2.0;
        }
        v
    }

    /// `∂φ/∂θ_i`.
    pub fn phi_i(&self, i: usize) -> R {
        self.alpha / self.h_t * self.h_ti[i] + self.binv[0] * self.b11_i(i)
    }

    /// `∂φ/∂t`.
    pub fn phi_t(&self) -> R {
        self.alpha / self.h_t * self.h_tt + self.binv[0] * self.b11_t()
    }

    pub fn phi_ij(&self, i: usize, j: usize) -> R {
        let a = self.alpha;
        let ht = self.h_t;
        let b0 = self.binv[0];
        -(a / (ht * ht)) * self.h_ti[i] * self.h_ti[j] + a / ht * self.h_tij(j, i)
            - b0 * b0 * self.b11_i(i) * self.b11_i(j)
            + b0 * self.b11_ij(j, i)
    }

    pub fn phi_it(&self, i: usize) -> R {
        let a = self.alpha;
        let ht = self.h_t;
        let b0 = self.binv[0];
        -(a / (ht * ht)) * self.h_ti[i] * self.h_tt + a / ht * self.h_tti[i]
            - b0 * b0 * self.b11_i(i) * self.b11_t()
            + b0 * self.b11_it[i]
    }

    pub fn phi_tt(&self) -> R {
        let a = self.alpha;
        let ht = self.h_t;
        let b0 = self.binv[0];
        -(a / (ht * ht)) * self.h_tt * self.h_tt + a / ht * self.h_ttt
            - b0 * b0 * self.b11_t() * self.b11_t()
            + b0 * self.b11_tt
    }

    /// `L(φ)` straight from φ's second derivatives.
    pub fn l_phi(&self) -> R {
        self.apply_l(|i, j| self.phi_ij(i, j), |i| self.phi_it(i), self.phi_tt())
    }

    /// `L(b_11)` straight from `b_11,ij`, `b_11,it`, `b_11,tt`.
    pub fn l_b11(&self) -> R {
        self.apply_l(|i, j| self.b11_ij(i, j), |i| self.b11_it[i], self.b11_tt)
    }

    /// `β φ_t²`.
    pub fn beta_phi_t2(&self) -> R {
        self.beta * self.phi_t().sq()
    }

    /// `L(e^{βφ}) / e^{βφ}` from the second derivatives of `e^{βφ}`.
    pub fn l_exp_beta_phi_scaled(&self) -> R {
        let bt = self.beta;
        let pt = self.phi_t();
        self.apply_l(
            |i, j| bt * self.phi_ij(i, j) + bt * bt * self.phi_i(i) * self.phi_i(j),
            |i| bt * self.phi_it(i) + bt * bt * self.phi_i(i) * pt,
            bt * self.phi_tt() + bt * bt * pt * pt,
        )
    }

    /// The four bracketed pieces of `L(φ)` before any use of the equation.
    pub fn l_phi_pieces(&self) -> [R; 4] {
        let m = self.m;
        let a = self.alpha;
        let ht = self.h_t;
        let b0 = self.binv[0];
        let zero = R::zero();
        let mut q1 = zero;
        let mut q2 = zero;
        let mut q3 = zero;
        for i in 0..m {
            for j in 0..m {
                let w = self.a(i, j) * self.binv[i] * self.binv[j];
                q1 += w * self.h_ti[i] * self.h_ti[j];
                q2 += w * self.h_tij(j, i);
                q3 += w * self.b11_i(i) * self.b11_i(j);
            }
        }
        for i in 0..m {
            q1 -= self.h_ti[i].sq() * self.binv[i] * self.h_tt * 2.0;
            q2 -= self.h_ti[i] * self.binv[i] * self.h_tti[i] * 2.0;
            q3 -= self.h_ti[i] * self.binv[i] * self.b11_i(i) * self.b11_t() * 2.0;
        }
        q1 += self.h_tt.sq();
        q2 += self.h_ttt;
        q3 += self.b11_t().sq();
        [
            -(a / (ht * ht)) * q1,
            a / ht * q2,
            -(b0 * b0) * q3,
            b0 * self.l_b11(),
        ]
    }

    // Recurring sums.

    /// `Σ_i h_ti² b^{ii}`.
    pub fn sum_h2b(&self) -> R {
        (0..self.m).fold(R::zero(), |a, i| a + self.h_ti[i].sq() * self.binv[i])
    }

    /// `Σ_{i≥2} h_ti² b^{ii}`.
    pub fn sum_h2b_rest(&self) -> R {
        (1..self.m).fold(R::zero(), |a, i| a + self.h_ti[i].sq() * self.binv[i])
    }

    /// `Σ_i (h_ti b^{ii})²`.
    pub fn sum_hb_sq(&self) -> R {
        (0..self.m).fold(R::zero(), |a, i| a + (self.h_ti[i] * self.binv[i]).sq())
    }

    /// `Σ_i (b^{ii})²`.
    pub fn sum_binv_sq(&self) -> R {
        (0..self.m).fold(R::zero(), |a, i| a + self.binv[i].sq())
    }

    /// `Σ_{i≥2} b^{ii}`.
    pub fn sum_binv_rest(&self) -> R {
        (1..self.m).fold(R::zero(), |a, i| a + self.binv[i])
    }

    /// `Σ_{i≥2} (b^{ii})²`.
    pub fn sum_binv_sq_rest(&self) -> R {
        (1..self.m).fold(R::zero(), |a, i| a + self.binv[i].sq())
    }

    /// `Σ_i h_ti b^{ii} ∂φ/∂θ_i`.
    pub fn sum_hb_phi(&self) -> R {
        (0..self.m).fold(R::zero(), |a, i| a + self.h_ti[i] * self.binv[i] * self.phi_i(i))
    }

    /// `Σ_{ij} A_ij b^{ii} b^{jj} x_i y_j`.
    pub fn a_form(&self, x: impl Fn(usize) -> R, y: impl Fn(usize) -> R) -> R {
        let mut v = R::zero();
        for i in 0..self.m {
            for j in 0..self.m {
                v += self.a(i, j) * self.binv[i] * self.binv[j] * x(i) * y(j);
            }
        }
        v
    }

    /// `Σ_{ij} h_ti h_tj b^{ii} b^{jj} x_i y_j` (the part of `a_form` without `c`).
    pub fn hh_form(&self, x: impl Fn(usize) -> R, y: impl Fn(usize) -> R) -> R {
        let mut v = R::zero();
        for i in 0..self.m {
            for j in 0..self.m {
                v += self.h_ti[i] * self.h_ti[j] * self.binv[i] * self.binv[j] * x(i) * y(j);
            }
        }
        v
    }
}
