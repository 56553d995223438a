//! Constrained random jets and the identity/inequality chain evaluated on them.
//!
//! A [`Jet`] is the list of point values at a point where `b_ij` is diagonal:
//! free data (`h_t`, `h_ti`, the radii, third derivatives of `b`, mixed
//! derivatives of `b_11`) plus derived data obtained from the equation and its
//! θ/t derivatives. Index 0 plays the role of the distinguished direction whose
//! radius `b_11` is the largest one.
//!
//! The equation at the point is `h_tt = Σ (c δ_ij + h_ti h_tj) b^{ij}` with
//! `c = s h_t² + κ`: `s = 1/(p-1), κ = 0` for the p-Laplacian and
//! `s = 1, κ = 1` for the minimal surface equation.

mod chain;
mod direct;
mod minimal;
mod plaplace;
pub mod scalar;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use chain::{
    check_chain, kappa_zero_pairs, ChainReport, Correction, StepKind, StepResult, CORRECTIONS,
    TOL_EXACT, TOL_ID,
};
pub use direct::Direct;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum JetMode {
    PLaplace,
    Minimal,
}

/// What to sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JetSpec {
    pub n: usize,
    pub p: f64,
    pub mode: JetMode,
    pub alpha: f64,
    pub beta: f64,
    /// Radially symmetric jet: `h_ti = 0`, equal radii, zero tensors.
    #[serde(default)]
    pub radial: bool,
}

impl JetSpec {
    pub fn new(mode: JetMode, n: usize, p: f64, alpha: f64, beta: f64) -> Self {
        JetSpec {
            n,
            p,
            mode,
            alpha,
            beta,
            radial: false,
        }
    }
}

/// Point values of the support function and its derivatives (see module docs).
///
/// Tensors are stored flat in row-major order over `m = n - 1` indices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Jet {
    pub n: usize,
    pub p: f64,
    pub mode: JetMode,
    /// Constant part of `c`; 1 for the minimal surface equation. Setting it
    /// to 0 turns the minimal-surface chain into the p = 2 chain.
    pub kappa: f64,
    pub alpha: f64,
    pub beta: f64,
    pub h_t: f64,
    pub h_ti: Vec<f64>,
    pub b_diag: Vec<f64>,
    /// `b_ij,k`, fully symmetric.
    pub d3_b: Vec<f64>,
    /// `b_ij,t`, symmetric.
    pub bt: Vec<f64>,
    /// `b_11,ij`, symmetric.
    pub b11_ij: Vec<f64>,
    /// `b_11,it`.
    pub b11_it: Vec<f64>,
    pub derived: Derived,
}

/// Fields fixed by the equation and the commutation rules.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Derived {
    pub sigma1: f64,
    pub h_tt: f64,
    pub h_tij: Vec<f64>,
    pub h_tti: Vec<f64>,
    pub h_ttt: f64,
    pub h_tt11: f64,
    pub b11_tt: f64,
}

impl Jet {
    pub fn m(&self) -> usize {
        self.n - 1
    }

    /// `s` in `c = s h_t² + κ`.
    pub fn s(&self) -> f64 {
        match self.mode {
            JetMode::PLaplace => 1.0 / (self.p - 1.0),
            JetMode::Minimal => 1.0,
        }
    }

    pub fn d3(&self, i: usize, j: usize, k: usize) -> f64 {
        let m = self.m();
        self.d3_b[(i * m + j) * m + k]
    }

    /// `b_11,j`.
    pub fn b11_j(&self, j: usize) -> f64 {
        self.d3(0, 0, j)
    }

    fn set_d3_sym(&mut self, i: usize, j: usize, k: usize, v: f64) {
        let m = self.m();
        for (a, b, c) in [(i, j, k), (i, k, j), (j, i, k), (j, k, i), (k, i, j), (k, j, i)] {
            self.d3_b[(a * m + b) * m + c] = v;
        }
    }

    /// Recompute every derived field from the free data.
    pub fn refresh(&mut self) {
        let d = Direct::<f64>::new(self);
        self.derived = Derived {
            sigma1: d.sigma,
            h_tt: d.h_tt,
            h_tij: d.h_tij.clone(),
            h_tti: d.h_tti.clone(),
            h_ttt: d.h_ttt,
            h_tt11: d.h_tt11,
            b11_tt: d.b11_tt,
        };
    }

    /// Same free data with the three tensors and the `b_11` derivative block
    /// set to zero.
    pub fn with_zero_tensors(&self) -> Jet {
        let mut j = self.clone();
        j.d3_b.iter_mut().for_each(|x| *x = 0.0);
        j.bt.iter_mut().for_each(|x| *x = 0.0);
        j.b11_ij.iter_mut().for_each(|x| *x = 0.0);
        j.b11_it.iter_mut().for_each(|x| *x = 0.0);
        j.refresh();
        j
    }

    /// Multiply every length-valued quantity by `lambda` (p-Laplace mode is
    /// homogeneous under this map).
    pub fn scaled(&self, lambda: f64) -> Jet {
        let mut j = self.clone();
        j.h_t *= lambda;
        for v in [
            &mut j.h_ti,
            &mut j.b_diag,
            &mut j.d3_b,
            &mut j.bt,
            &mut j.b11_ij,
            &mut j.b11_it,
        ] {
            v.iter_mut().for_each(|x| *x *= lambda);
        }
        j.refresh();
        j
    }
}

fn draw(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    rng.random_range(lo..=hi)
}

/// Deterministic jet for `(seed, stream 0)`.
pub fn sample_jet(spec: &JetSpec, seed: u64) -> Jet {
    sample_jet_stream(spec, seed, 0)
}

/// Deterministic jet for `(seed, stream)`; distinct streams are independent.
///
/// The same free values are drawn in the same order for every mode, so the
/// p-Laplace and minimal chains can be compared on identical data.
pub fn sample_jet_stream(spec: &JetSpec, seed: u64, stream: u64) -> Jet {
    assert!(spec.n >= 2, "jet dimension must be at least 2");
    assert!(spec.p > 1.0 && spec.p.is_finite(), "p must lie in (1, inf)");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let m = spec.n - 1;

    let h_t = draw(&mut rng, -3.0, -0.2);
    let mut h_ti: Vec<f64> = (0..m).map(|_| draw(&mut rng, -2.0, 2.0)).collect();
    let mut b_diag: Vec<f64> = (0..m).map(|_| draw(&mut rng, 0.2, 5.0)).collect();
    let imax = (0..m).fold(0, |a, i| if b_diag[i] > b_diag[a] { i } else { a });
    b_diag.swap(0, imax);

    let mut jet = Jet {
        n: spec.n,
        p: if spec.mode == JetMode::Minimal { 2.0 } else { spec.p },
        mode: spec.mode,
        kappa: if spec.mode == JetMode::Minimal { 1.0 } else { 0.0 },
        alpha: spec.alpha,
        beta: spec.beta,
        h_t,
        h_ti: Vec::new(),
        b_diag: Vec::new(),
        d3_b: vec![0.0; m * m * m],
        bt: vec![0.0; m * m],
        b11_ij: vec![0.0; m * m],
        b11_it: vec![0.0; m],
        derived: Derived {
            sigma1: 0.0,
            h_tt: 0.0,
            h_tij: Vec::new(),
            h_tti: Vec::new(),
            h_ttt: 0.0,
            h_tt11: 0.0,
            b11_tt: 0.0,
        },
    };
    for i in 0..m {
        for j in i..m {
            for k in j..m {
                let v = draw(&mut rng, -2.0, 2.0);
                jet.set_d3_sym(i, j, k, v);
            }
        }
    }
    for mat in [&mut jet.bt, &mut jet.b11_ij] {
        for i in 0..m {
            for j in i..m {
                let v = draw(&mut rng, -2.0, 2.0);
                mat[i * m + j] = v;
                mat[j * m + i] = v;
            }
        }
    }
    for i in 0..m {
        jet.b11_it[i] = draw(&mut rng, -2.0, 2.0);
    }

    if spec.radial {
        h_ti.iter_mut().for_each(|x| *x = 0.0);
        let r = b_diag[0];
        b_diag.iter_mut().for_each(|x| *x = r);
        jet.h_ti = h_ti;
        jet.b_diag = b_diag;
        jet = jet.with_zero_tensors();
    } else {
        jet.h_ti = h_ti;
        jet.b_diag = b_diag;
        jet.refresh();
    }
    debug_assert!(jet.is_consistent());
    jet
}

/// Override `b_11,j` so that the spatial gradient of
/// `φ = α log(-h_t) + log b_11` vanishes: `b_11,j = -α h_t⁻¹ h_tj b_11`.
pub fn enforce_first_order_condition(jet: &Jet) -> Jet {
    let mut j = jet.clone();
    for k in 0..j.m() {
        let v = -j.alpha / j.h_t * j.h_ti[k] * j.b_diag[0];
        j.set_d3_sym(0, 0, k, v);
    }
    j.refresh();
    j
}

impl Jet {
    /// Re-assert the structural invariants.
    pub fn is_consistent(&self) -> bool {
        let m = self.m();
        let sized = self.h_ti.len() == m
            && self.b_diag.len() == m
            && self.d3_b.len() == m * m * m
            && self.bt.len() == m * m
            && self.b11_ij.len() == m * m
            && self.b11_it.len() == m;
        if !sized || self.h_t >= 0.0 || self.b_diag.iter().any(|&b| b <= 0.0) {
            return false;
        }
        if self.b_diag.iter().any(|&b| b > self.b_diag[0]) {
            return false;
        }
        for i in 0..m {
            for j in 0..m {
                if self.bt[i * m + j] != self.bt[j * m + i]
                    || self.b11_ij[i * m + j] != self.b11_ij[j * m + i]
                {
                    return false;
                }
                for k in 0..m {
                    let v = self.d3(i, j, k);
                    if v != self.d3(j, i, k) || v != self.d3(k, j, i) || v != self.d3(i, k, j) {
                        return false;
                    }
                }
            }
        }
        let mut fresh = self.clone();
        fresh.refresh();
        fresh.derived == self.derived
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(n: usize) -> JetSpec {
        JetSpec::new(JetMode::PLaplace, n, 3.7, -1.0, 1.0)
    }

    #[test]
    fn same_seed_same_jet() {
        let a = sample_jet(&spec(5), 42);
        let b = sample_jet(&spec(5), 42);
        assert_eq!(a, b);
        assert_ne!(a, sample_jet_stream(&spec(5), 42, 1));
    }

    #[test]
    fn invariants_hold_by_construction() {
        for s in 0..50 {
            for n in [2, 3, 5] {
                let j = sample_jet_stream(&spec(n), 7, s);
                assert!(j.is_consistent());
                assert!((-3.0..=-0.2).contains(&j.h_t));
                let sum: f64 = j.b_diag.iter().map(|b| 1.0 / b).sum();
                assert_eq!(j.derived.sigma1, sum);
            }
        }
    }

    #[test]
    fn radial_jet_reduces_equation() {
        let mut sp = spec(4);
        sp.radial = true;
        let j = sample_jet(&sp, 3);
        let expected = j.h_t * j.h_t * j.derived.sigma1 / (j.p - 1.0);
        assert_eq!(j.derived.h_tt, expected);
        assert!(j.h_ti.iter().all(|&x| x == 0.0));
        assert!(j.b_diag.iter().all(|&b| b == j.b_diag[0]));
    }

    #[test]
    fn two_dimensional_jet_has_single_direction() {
        let j = sample_jet(&spec(2), 11);
        assert_eq!(j.m(), 1);
        assert_eq!(j.d3_b.len(), 1);
    }

    #[test]
    fn first_order_condition_substitution() {
        let mut j = sample_jet(&spec(2), 1);
        j.alpha = -1.0;
        j.h_t = -1.0;
        j.h_ti[0] = 0.5;
        j.b_diag[0] = 2.0;
        let c = enforce_first_order_condition(&j);
        assert_eq!(c.b11_j(0), -1.0);
    }

    #[test]
    fn first_order_condition_alpha_zero_and_idempotent() {
        let mut sp = spec(5);
        sp.alpha = 0.0;
        let j = enforce_first_order_condition(&sample_jet(&sp, 9));
        assert!((0..4).all(|k| j.b11_j(k) == 0.0));
        let once = enforce_first_order_condition(&sample_jet(&spec(5), 9));
        assert_eq!(once, enforce_first_order_condition(&once));
        assert!(once.is_consistent());
    }
}
