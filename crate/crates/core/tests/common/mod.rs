//! Independent oracles shared by the integration tests.

#![allow(dead_code)]

use std::f64::consts::PI;

use grushin_hardy::fields::build_test_field;
use grushin_hardy::weights::make_pair;
use grushin_hardy::{PairId, PairParams, SpaceParams, TestField, TestFieldSpec, WeightPair};
use num_complex::Complex64;

pub const SPACES: [(usize, usize, f64); 3] = [(1, 1, 1.0), (2, 1, 0.0), (1, 1, 2.0)];

pub fn space(m: usize, k: usize, g: f64) -> SpaceParams {
    SpaceParams::new(m, k, g).unwrap()
}

pub fn pair(id: PairId, s: SpaceParams, p: f64) -> WeightPair {
    make_pair(id, s, p, PairParams::default_for(id)).unwrap()
}

/// Default bump for the pair; `kappa` ≠ 0 gives the phase-twisted variant.
pub fn bump(pair: &WeightPair, kappa: f64) -> TestField {
    build_test_field(pair.space(), &TestFieldSpec::for_pair(pair, kappa)).unwrap()
}

/// |ξ|^p − |ξ−η|^p − p|ξ−η|^{p−2} Re⟨ξ−η, η⟩ straight from the definition.
pub fn cp_naive(xi: &[Complex64], eta: &[Complex64], p: f64) -> f64 {
    let n = |v: &mut dyn Iterator<Item = Complex64>| v.map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let a = n(&mut xi.iter().copied());
    let d: Vec<Complex64> = xi.iter().zip(eta).map(|(x, e)| x - e).collect();
    let b = n(&mut d.iter().copied());
    let re: f64 = d.iter().zip(eta).map(|(u, e)| (u * e.conj()).re).sum();
    let mid = if b == 0.0 {
        0.0
    } else {
        p * b.powf(p - 2.0) * re
    };
    a.powf(p) - b.powf(p) - mid
}

/// Brute-force min of the c_p objective over a log-polar grid.
pub fn cp_dense_grid(p: f64, n_theta: usize, n_r: usize, decades: (f64, f64)) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..n_theta {
        let th = 2.0 * PI * i as f64 / n_theta as f64;
        let (st, ct) = th.sin_cos();
        for j in 0..n_r {
            let r = 10f64.powf(decades.0 + (decades.1 - decades.0) * j as f64 / (n_r - 1) as f64);
            let (s, t) = (r * ct, r * st);
            let num = ((s + 1.0).powi(2) + t * t).powf(p / 2.0) - 1.0 - p * s;
            best = best.min(num / r.powf(p));
        }
    }
    best
}

pub fn golden_cp() -> serde_json::Value {
    serde_json::from_str(include_str!("../data/cp_dense_grid.json")).unwrap()
}
