//! Property tests and independent oracles across modules.

mod common;

use grushin_hardy::cp::{cp_scalar, cp_value, find_constant};
use grushin_hardy::cubature::{integrate, integrate_many};
use grushin_hardy::fields::build_test_field;
use grushin_hardy::geometry::{
    default_fd_step, dilate, div_weighted_rho_closed_form, fd_divergence, rho, weighted_rho_field,
};
use grushin_hardy::verifier::verify_identity;
use grushin_hardy::{
    ConstantKind, ConstantSettings, CpObjectiveKind, CubatureSettings, FieldFamily, PairId, Region,
    ScalarField, SpaceParams, TestFieldSpec, VerifySettings,
};
use num_complex::Complex64;
use proptest::prelude::*;

use common::{bump, cp_dense_grid, cp_naive, golden_cp, pair, space, SPACES};

fn cvec(n: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec(
        (-2.0..2.0f64, -2.0..2.0f64).prop_map(|(a, b)| Complex64::new(a, b)),
        n,
    )
}

fn cpair() -> impl Strategy<Value = (Vec<Complex64>, Vec<Complex64>)> {
    (1usize..=4).prop_flat_map(|n| (cvec(n), cvec(n)))
}

fn scale(xi: &[Complex64], eta: &[Complex64], p: f64) -> f64 {
    let n = |v: &[Complex64]| v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let d: Vec<Complex64> = xi.iter().zip(eta).map(|(a, b)| a - b).collect();
    n(xi).powf(p) + n(&d).powf(p) + p * n(&d).powf(p - 1.0) * n(eta) + 1e-300
}

/// Point with ρ ∈ [0.4, 2] and |x|/ρ ∈ [0.15, 1] built from block directions.
fn point(s: SpaceParams) -> impl Strategy<Value = Vec<f64>> {
    (
        0.4..2.0f64,
        0.15..1.0f64,
        prop::collection::vec(-1.0..1.0f64, s.m()),
        prop::collection::vec(-1.0..1.0f64, s.k()),
    )
        .prop_filter_map("degenerate direction", move |(r, t, dx, dy)| {
            let n = |v: &[f64]| v.iter().map(|c| c * c).sum::<f64>().sqrt();
            let (nx, ny) = (n(&dx), n(&dy));
            if nx < 1e-3 || ny < 1e-3 {
                return None;
            }
            let a = 1.0 + s.gamma();
            let ax = r * t;
            let ay = (r.powf(2.0 * a) - ax.powf(2.0 * a)).max(0.0).sqrt() / a;
            let mut z: Vec<f64> = dx.iter().map(|c| c / nx * ax).collect();
            z.extend(dy.iter().map(|c| c / ny * ay));
            Some(z)
        })
}

fn any_space() -> impl Strategy<Value = SpaceParams> {
    (0..SPACES.len()).prop_map(|i| {
        let (m, k, g) = SPACES[i];
        space(m, k, g)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn cp_two_is_eta_squared((xi, eta) in cpair()) {
        let e2: f64 = eta.iter().map(|c| c.norm_sqr()).sum();
        prop_assert!((cp_value(&xi, &eta, 2.0).unwrap() - e2).abs() <= 1e-12 * (1.0 + e2));
    }

    #[test]
    fn cp_nonnegative_and_homogeneous((xi, eta) in cpair(), p in 1.05..5.0f64, lam in 0.01..100.0f64) {
        let v = cp_value(&xi, &eta, p).unwrap();
        let s = scale(&xi, &eta, p);
        prop_assert!(v >= -1e-12 * s);
        let sx: Vec<Complex64> = xi.iter().map(|c| c * lam).collect();
        let se: Vec<Complex64> = eta.iter().map(|c| c * lam).collect();
        let vl = cp_value(&sx, &se, p).unwrap();
        prop_assert!((vl - lam.powf(p) * v).abs() <= 1e-12 * lam.powf(p) * s);
    }

    #[test]
    fn cp_matches_definition((xi, eta) in cpair(), p in 1.05..5.0f64) {
        let v = cp_value(&xi, &eta, p).unwrap();
        prop_assert!((v - cp_naive(&xi, &eta, p)).abs() <= 1e-12 * scale(&xi, &eta, p));
    }

    #[test]
    fn cp_scalar_is_one_dimensional_cp(a in -2.0..2.0f64, b in -2.0..2.0f64, c in -2.0..2.0f64, d in -2.0..2.0f64, p in 1.05..5.0f64) {
        let (xi, eta) = (Complex64::new(a, b), Complex64::new(c, d));
        let v = cp_value(&[xi], &[eta], p).unwrap();
        prop_assert!((cp_scalar(xi, eta, p) - v).abs() <= 1e-13 * scale(&[xi], &[eta], p));
    }

    #[test]
    fn rho_is_dilation_homogeneous((s, z) in any_space().prop_flat_map(|s| (Just(s), point(s))), lam in 0.05..20.0f64) {
        let zl = dilate(&s, &z, lam).unwrap().into_coords();
        prop_assert!((rho(&s, &zl) - lam * rho(&s, &z)).abs() <= 1e-12 * lam * rho(&s, &z));
    }

    #[test]
    fn divergence_closed_form_matches_fd(
        (s, z) in any_space().prop_flat_map(|s| (Just(s), point(s))),
        c in -2.0..2.0f64,
        e in -0.5..1.5f64,
    ) {
        let exact = div_weighted_rho_closed_form(&s, &z, c, e).unwrap();
        let fd = fd_divergence(&s, &weighted_rho_field(s, c, e), &z, default_fd_step(&z)).unwrap();
        prop_assert!((fd - exact).abs() <= 1e-6 * exact.abs().max(1e-3), "{fd} vs {exact}");
    }
}

/// Richardson-extrapolated central difference of a complex field along `i`.
fn richardson(f: &dyn ScalarField, z: &[f64], i: usize, h: f64) -> Complex64 {
    let cd = |h: f64| {
        let mut a = z.to_vec();
        let mut b = z.to_vec();
        a[i] += h;
        b[i] -= h;
        (f.eval(&a).value - f.eval(&b).value) / (2.0 * h)
    };
    (cd(h / 2.0) * 4.0 - cd(h)) / 3.0
}

#[test]
fn field_gradients_match_finite_differences() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    for (m, k, g) in SPACES {
        let s = space(m, k, g);
        for id in PairId::ALL {
            let pr = pair(id, s, 2.0);
            for kappa in [0.0, 1.5] {
                let f = bump(&pr, kappa);
                let mut tested = 0;
                while tested < 50 {
                    let z: Vec<f64> = (0..s.n()).map(|_| rng.gen_range(-2.0..2.0)).collect();
                    let r = rho(&s, &z);
                    if !(r > 0.45 && r < 2.05) {
                        continue;
                    }
                    let fv = f.eval(&z);
                    for i in 0..s.n() {
                        let fd = richardson(&f, &z, i, 1e-5);
                        assert!(
                            (fd - fv.euclid_grad[i]).norm() <= 1e-6,
                            "({m},{k},{g}) {id} κ={kappa} z={z:?} axis {i}: {fd} vs {}",
                            fv.euclid_grad[i]
                        );
                    }
                    tested += 1;
                }
            }
        }
    }
}

#[test]
fn field_vanishes_outside_support() {
    let s = space(1, 1, 1.0);
    let pr = pair(PairId::NchBall, s, 2.0);
    let f = bump(&pr, 1.0);
    let sup = f.support();
    for z in [
        [0.0, 0.1],
        [0.3, 0.0],
        [2.5, 0.0],
        [0.05, 1.0],
        [sup.x_floor, 0.8],
    ] {
        assert_eq!(f.eval(&z).value, Complex64::new(0.0, 0.0), "{z:?}");
    }
}

#[test]
fn global_phase_changes_no_term() {
    struct Rotated<F>(F, Complex64);
    impl<F: ScalarField> ScalarField for Rotated<F> {
        fn space(&self) -> &SpaceParams {
            self.0.space()
        }
        fn eval_into(&self, z: &[f64], grad: &mut [Complex64]) -> Complex64 {
            let v = self.0.eval_into(z, grad);
            for g in grad.iter_mut() {
                *g *= self.1;
            }
            v * self.1
        }
        fn support(&self) -> grushin_hardy::fields::Support {
            self.0.support()
        }
    }
    let pr = pair(PairId::LogBall, space(1, 1, 1.0), 1.5);
    let settings = VerifySettings::default();
    let a = verify_identity(&pr, &bump(&pr, 1.0), &settings).unwrap();
    let b = verify_identity(
        &pr,
        &Rotated(bump(&pr, 1.0), Complex64::from_polar(1.0, 0.7)),
        &settings,
    )
    .unwrap();
    for (x, y) in [
        (a.lhs, b.lhs),
        (a.w_term, b.w_term),
        (a.cp_term, b.cp_term),
        (a.phi_term, b.phi_term),
    ] {
        assert!((x - y).abs() <= 1e-10 * x.abs(), "{x} vs {y}");
    }
}

// ---------------------------------------------------------------- cubature

fn unit_square() -> Region {
    Region::new(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap()
}

#[test]
fn integrate_many_examples() {
    let one = |_: &[f64]| 1.0;
    let x = |z: &[f64]| z[0];
    let x2 = |z: &[f64]| z[0] * z[0];
    let r = integrate_many(
        &[&one, &x, &x2],
        &unit_square(),
        &CubatureSettings::default(),
    )
    .unwrap();
    for (got, want) in r.values.iter().zip([1.0, 0.5, 1.0 / 3.0]) {
        assert!((got - want).abs() < 1e-14, "{got} vs {want}");
    }
    assert!(integrate_many(&[], &unit_square(), &CubatureSettings::default()).is_err());
}

#[test]
fn cubature_is_linear_and_deterministic() {
    let f = |z: &[f64]| (3.0 * z[0]).sin() * (-z[1] * z[1]).exp();
    let g = |z: &[f64]| (z[0] - 0.3).abs().sqrt() + z[1];
    let s = CubatureSettings {
        rel_tol: 1e-11,
        abs_tol: 1e-14,
        ..Default::default()
    };
    let sq = unit_square();
    let (a, b) = (2.5, -0.75);
    let fi = integrate(&f, &sq, &s).unwrap();
    let gi = integrate(&g, &sq, &s).unwrap();
    let h = |z: &[f64]| a * f(z) + b * g(z);
    let hi = integrate(&h, &sq, &s).unwrap();
    let want = a * fi.value() + b * gi.value();
    let tol = 10.0 * (a.abs() * fi.error() + b.abs() * gi.error() + hi.error());
    assert!((hi.value() - want).abs() <= tol, "{} vs {want}", hi.value());
    let again = integrate(&h, &sq, &s).unwrap();
    assert_eq!(hi.value().to_bits(), again.value().to_bits());
    assert_eq!(hi.evals, again.evals);
}

/// Box containing {ρ < b}: |x| ≤ b, |y| ≤ b^{1+γ}/(1+γ).
fn rho_box(s: &SpaceParams, b: f64) -> Region {
    let a = 1.0 + s.gamma();
    let hi: Vec<f64> = (0..s.n())
        .map(|i| if i < s.m() { b } else { b.powf(a) / a })
        .collect();
    Region::new(hi.iter().map(|v| -v).collect(), hi)
        .unwrap()
        .with_all_folds()
        .unwrap()
}

#[test]
fn dilation_scales_mass_by_minus_q() {
    let s = space(1, 1, 1.0);
    let spec = TestFieldSpec::default();
    let f = build_test_field(&s, &spec).unwrap();
    let settings = CubatureSettings {
        rel_tol: 1e-10,
        abs_tol: 1e-14,
        ..Default::default()
    };
    let region = rho_box(&s, spec.outer_rho);
    let base = integrate(&|z: &[f64]| f.eval(z).value.norm_sqr(), &region, &settings).unwrap();
    for lam in [1.7, 2.5] {
        let fl = |z: &[f64]| {
            f.eval(&dilate(&s, z, lam).unwrap().into_coords())
                .value
                .norm_sqr()
        };
        let r = integrate(&fl, &region, &settings).unwrap();
        let want = base.value() * lam.powf(-s.q());
        assert!(
            (r.value() - want).abs() <= 1e-8 * want,
            "λ={lam}: {} vs {want}",
            r.value()
        );
    }
}

/// Γ(1/4), Γ(3/2), Γ(7/4).
const GAMMA_QUARTER: f64 = 3.625_609_908_221_908_3;
const GAMMA_THREE_HALVES: f64 = 0.886_226_925_452_758;
const GAMMA_SEVEN_QUARTERS: f64 = 0.919_062_526_848_882_5;

#[test]
fn bump_mass_matches_radial_reduction() {
    // On (1,1,1) with a radial bump, ∫|f|² = Q·|{ρ<1}|·∫B(ρ)²ρ^{Q−1}dρ and
    // |{ρ<1}| = ∫_{−1}^{1}(1−x⁴)^{1/2}dx = B(1/4, 3/2)/2.
    let s = space(1, 1, 1.0);
    let spec = TestFieldSpec {
        family: FieldFamily::BumpRadial,
        ..Default::default()
    };
    let f = build_test_field(&s, &spec).unwrap();
    let area = GAMMA_QUARTER * GAMMA_THREE_HALVES / GAMMA_SEVEN_QUARTERS / 2.0;
    let band = spec.smoothness_margin * (spec.outer_rho - spec.inner_rho);
    let knots = [
        spec.inner_rho,
        spec.inner_rho + band,
        spec.outer_rho - band,
        spec.outer_rho,
    ];
    let q = s.q();
    let radial = |r: f64| f.profile(r, r).0.norm_sqr() * r.powf(q - 1.0);
    // Composite Simpson on each smooth piece, 20000 panels each (ten times the
    // finest cubature cell count along ρ).
    let mut one_d = 0.0;
    for w in knots.windows(2) {
        let n = 20_000;
        let h = (w[1] - w[0]) / n as f64;
        let mut acc = radial(w[0]) + radial(w[1]);
        for i in 1..n {
            acc += radial(w[0] + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        one_d += acc * h / 3.0;
    }
    let want = q * area * one_d;
    let settings = CubatureSettings {
        rel_tol: 1e-11,
        abs_tol: 1e-14,
        ..Default::default()
    };
    let r = integrate(
        &|z: &[f64]| f.eval(z).value.norm_sqr(),
        &rho_box(&s, spec.outer_rho),
        &settings,
    )
    .unwrap();
    assert!(
        (r.value() - want).abs() <= 1e-8 * want,
        "{} vs {want}",
        r.value()
    );
}

// ---------------------------------------------------------------- constants

#[test]
fn dense_grid_golden_values_reproduce() {
    let g = golden_cp();
    let n_theta = g["theta_samples"].as_u64().unwrap() as usize;
    let n_r = g["radius_samples"].as_u64().unwrap() as usize;
    let range = &g["log10_radius_range"];
    let dec = (range[0].as_f64().unwrap(), range[1].as_f64().unwrap());
    for p in [3.0, 4.0] {
        let want = g["values"][format!("{p}")].as_f64().unwrap();
        let got = cp_dense_grid(p, n_theta, n_r, dec);
        assert!((got - want).abs() <= 1e-15, "p={p}: {got} vs {want}");
    }
}

#[test]
fn find_constant_never_exceeds_a_grid_value() {
    // The infimum lies below every sampled value, so a coarse independent grid
    // bounds the search from above.
    for p in [2.5, 3.0, 3.5] {
        let e = find_constant(
            CpObjectiveKind::new(ConstantKind::CpPge2, p).unwrap(),
            &ConstantSettings::default(),
        )
        .unwrap();
        let grid = cp_dense_grid(p, 512, 256, (-4.0, 4.0));
        assert!(e.bracket.0 <= grid, "p={p}: {:?} vs {grid}", e.bracket);
    }
}
