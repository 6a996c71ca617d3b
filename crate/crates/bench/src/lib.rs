//! Fixtures shared by the criterion benches.

use grushin_hardy::fields::build_test_field;
use grushin_hardy::weights::make_pair;
use grushin_hardy::{
    CubatureSettings, PairId, PairParams, SpaceParams, TestField, TestFieldSpec, VerifySettings,
    WeightPair,
};
use num_complex::Complex64;

/// Pair and phase-twisted bump on (1,1,1).
pub fn planar_fixture(id: PairId, p: f64) -> (WeightPair, TestField) {
    let space = SpaceParams::new(1, 1, 1.0).expect("valid space");
    let pair =
        make_pair(id, space, p, PairParams::default_for(id)).expect("default params are valid");
    let field = build_test_field(&space, &TestFieldSpec::for_pair(&pair, 1.0))
        .expect("default spec is valid");
    (pair, field)
}

pub fn settings(rel_tol: f64) -> VerifySettings {
    VerifySettings {
        quadrature: CubatureSettings {
            rel_tol,
            ..Default::default()
        },
        ..Default::default()
    }
}

/// Deterministic complex vectors for C_p timing.
pub fn cp_inputs(n: usize, len: usize) -> Vec<(Vec<Complex64>, Vec<Complex64>)> {
    let c = |i: usize, j: usize, s: f64| {
        Complex64::new(
            ((i * 7 + j * 3) as f64 * s).sin(),
            ((i + j * 11) as f64 * s).cos(),
        )
    };
    (0..n)
        .map(|i| {
            (
                (0..len).map(|j| c(i, j, 0.37)).collect(),
                (0..len).map(|j| c(i, j, 0.91)).collect(),
            )
        })
        .collect()
}
