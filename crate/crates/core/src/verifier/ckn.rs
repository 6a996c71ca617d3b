//! Interpolation (CKN-type) and uncertainty (HPW-type) inequalities built on
//! the identity's terms.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::ScalarField;
use crate::geometry::SpaceParams;
use crate::report::{CheckRecord, ToRecord};
use crate::weights::{make_pair, PairId, PairParams, WeightPair};

use super::{integrate_terms, Term, VerifySettings};

const EQ_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CknParams {
    pub p: f64,
    pub q: f64,
    pub r: f64,
    pub delta: f64,
    pub b: f64,
    pub c: f64,
}

impl CknParams {
    pub fn validate(&self) -> Result<()> {
        let CknParams {
            p,
            q,
            r,
            delta,
            b,
            c,
        } = *self;
        let fail = |s: &str| Err(Error::Constraint(format!("requires {s}")));
        if !(p > 1.0 && p.is_finite() && q > 1.0 && q.is_finite()) {
            return fail("1 < p, q < ∞");
        }
        if !(r > 0.0 && r.is_finite()) {
            return fail("0 < r < ∞");
        }
        if p + q < r {
            return fail("p + q ≥ r");
        }
        let lo = ((r - q) / r).max(0.0);
        let hi = (p / r).min(1.0);
        if !(delta >= lo - EQ_TOL && delta <= hi + EQ_TOL) {
            return fail("δ ∈ [0,1] ∩ [(r−q)/r, p/r]");
        }
        if (delta * r / p + (1.0 - delta) * r / q - 1.0).abs() > EQ_TOL {
            return fail("δr/p + (1−δ)r/q = 1");
        }
        if (c - (delta / p + b * (1.0 - delta))).abs() > EQ_TOL {
            return fail("c = δ/p + b(1−δ)");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CknReport {
    pub params: CknParams,
    pub lhs: f64,
    pub cp_term: f64,
    pub w_term: f64,
    pub phi_term: f64,
    /// lhs − cp_term
    pub bracket: f64,
    /// bracket − w_term − phi_term
    pub consistency_residual: f64,
    /// ∫w^{bq}|f|^q
    pub q_integral: f64,
    /// ∫w^{cr}|f|^r
    pub r_integral: f64,
    pub left: f64,
    pub right: f64,
    pub quadrature_error: f64,
    pub consistent: bool,
    pub passed: bool,
}

impl ToRecord for CknReport {
    fn to_record(&self, name: &str) -> CheckRecord {
        CheckRecord::new(
            name,
            self.passed,
            self.left - self.right,
            self.quadrature_error,
        )
        .term("delta", self.params.delta)
        .term("lhs", self.lhs)
        .term("cp_term", self.cp_term)
        .term("bracket", self.bracket)
        .term("consistency_residual", self.consistency_residual)
        .term("left", self.left)
        .term("right", self.right)
    }
}

/// a^e, with 0^0 = 1 and negative bases clamped to 0.
fn pw(a: f64, e: f64) -> f64 {
    if e == 0.0 {
        1.0
    } else {
        a.max(0.0).powf(e)
    }
}

/// [lhs − ∫C_p]^{δ/p}·(∫w^{bq}|f|^q)^{(1−δ)/q} ≥ (∫w^{cr}|f|^r)^{1/r}.
pub fn verify_ckn(
    pair: &WeightPair,
    field: &dyn ScalarField,
    ckn: &CknParams,
    settings: &VerifySettings,
) -> Result<CknReport> {
    ckn.validate()?;
    if (ckn.p - pair.p()).abs() > EQ_TOL {
        return Err(Error::Constraint(format!(
            "CKN exponent p = {} differs from the pair's p = {}",
            ckn.p,
            pair.p()
        )));
    }
    let CknParams {
        p,
        q,
        r,
        delta,
        b,
        c,
    } = *ckn;
    let terms = [
        Term::Lhs,
        Term::W,
        Term::Cp,
        Term::Phi,
        Term::WPow { e: b * q, q },
        Term::WPow { e: c * r, q: r },
    ];
    let t = integrate_terms(pair, field, &terms, &settings.quadrature)?;
    let v = &t.values;
    let e = &t.errors;
    let bracket = v[0] - v[2];
    let eb = e[0] + e[2];
    let consistency_residual = bracket - v[1] - v[3];
    let consistent = consistency_residual.abs() <= 10.0 * (eb + e[1] + e[3]);

    let left_of = |bb: f64, jq: f64| pw(bb, delta / p) * pw(jq, (1.0 - delta) / q);
    let left = left_of(bracket, v[4]);
    let right = pw(v[5], 1.0 / r);
    // Refutation needs a gap beyond ten times the quadrature error.
    let left_hi = left_of(bracket + 10.0 * eb, v[4] + 10.0 * e[4]);
    let right_lo = pw(v[5] - 10.0 * e[5], 1.0 / r);
    Ok(CknReport {
        params: *ckn,
        lhs: v[0],
        cp_term: v[2],
        w_term: v[1],
        phi_term: v[3],
        bracket,
        consistency_residual,
        q_integral: v[4],
        r_integral: v[5],
        left,
        right,
        quadrature_error: e.iter().sum(),
        consistent,
        passed: consistent && left_hi >= right_lo,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HpwCase {
    BallNch,
    WholeDambrosio,
    LogBall,
}

impl HpwCase {
    pub const ALL: [HpwCase; 3] = [HpwCase::BallNch, HpwCase::WholeDambrosio, HpwCase::LogBall];

    pub fn as_str(&self) -> &'static str {
        match self {
            HpwCase::BallNch => "ball_nch",
            HpwCase::WholeDambrosio => "whole_dambrosio",
            HpwCase::LogBall => "log_ball",
        }
    }

    /// Weight pair behind each case: R = 4 for the balls, v ≡ 1 for the
    /// whole-space case (α = p(1+γ), β = γp) and α = −3 for the log case.
    pub fn pair(&self, space: SpaceParams, p: f64) -> Result<WeightPair> {
        let g = space.gamma();
        let (id, params) = match self {
            HpwCase::BallNch => (PairId::NchBall, PairParams::NchBall { r: 4.0 }),
            HpwCase::WholeDambrosio => (
                PairId::DambrosioPower,
                PairParams::DambrosioPower {
                    alpha: p * (1.0 + g),
                    beta: g * p,
                },
            ),
            HpwCase::LogBall => (
                PairId::LogBall,
                PairParams::LogBall {
                    alpha: -3.0,
                    r: 4.0,
                },
            ),
        };
        make_pair(id, space, p, params)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassicalHpw {
    /// ∫|∇f|²
    pub grad_sq: f64,
    /// ∫|z|²|f|²
    pub moment_sq: f64,
    /// grad_sq·moment_sq/(∫|f|²)²
    pub ratio: f64,
    /// (n−2)²/4
    pub constant: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HpwReport {
    pub case: HpwCase,
    pub p: f64,
    pub kappa: f64,
    /// ∫v|Df|^p
    pub lhs: f64,
    pub cp_term: f64,
    /// ∫(w/κ^p)^{−p'/2}|f|^{p'}
    pub moment: f64,
    /// ∫|f|²
    pub mass: f64,
    /// lhs^{1/p}·moment^{1/p'}
    pub display_left: f64,
    /// κ·mass
    pub display_right: f64,
    /// (lhs − cp_term)^{1/p}·moment^{1/p'}
    pub bracket_left: f64,
    /// Product form at p = 2: lhs·moment against κ²·mass².
    pub product_ratio: Option<f64>,
    pub classical: Option<ClassicalHpw>,
    pub quadrature_error: f64,
    pub passed: bool,
}

impl ToRecord for HpwReport {
    fn to_record(&self, name: &str) -> CheckRecord {
        let mut r = CheckRecord::new(
            name,
            self.passed,
            self.display_left - self.display_right,
            self.quadrature_error,
        )
        .term("p", self.p)
        .term("kappa", self.kappa)
        .term("lhs", self.lhs)
        .term("cp_term", self.cp_term)
        .term("moment", self.moment)
        .term("mass", self.mass)
        .term("display_left", self.display_left)
        .term("display_right", self.display_right)
        .term("bracket_left", self.bracket_left);
        if let Some(x) = self.product_ratio {
            r = r.term("product_ratio", x);
        }
        if let Some(c) = &self.classical {
            r = r
                .term("classical_ratio", c.ratio)
                .term("classical_constant", c.constant);
        }
        r
    }
}

/// (∫v|Df|^p)^{1/p}(∫(w/κ^p)^{−p'/2}|f|^{p'})^{1/p'} ≥ κ∫|f|², with the
/// bracketed version alongside. At p = 2 on the whole-space case this is the
/// product form ((Q−2)/2)², and at γ = 0 the classical (n−2)²/4 is checked too.
pub fn verify_hpw(
    case: HpwCase,
    space: SpaceParams,
    p: f64,
    field: &dyn ScalarField,
    settings: &VerifySettings,
) -> Result<HpwReport> {
    let pair = case.pair(space, p)?;
    let pp = p / (p - 1.0);
    let kappa = pair.kappa();
    let sharp = pair.sharp_constant();
    let classical = case == HpwCase::WholeDambrosio && p == 2.0 && space.gamma() == 0.0;
    let mut terms = vec![
        Term::Lhs,
        Term::Cp,
        Term::WPow {
            e: -0.5 * pp,
            q: pp,
        },
        Term::WPow { e: 0.0, q: 2.0 },
    ];
    if classical {
        terms.extend([Term::GradSq, Term::MomentSq]);
    }
    let t = integrate_terms(&pair, field, &terms, &settings.quadrature)?;
    let v = &t.values;
    let e = &t.errors;
    // w carries κ^p; undo it for the moment weight.
    let scale = sharp.powf(0.5 * pp);
    let (lhs, cp_term, moment, mass) = (v[0], v[1], v[2] * scale, v[3]);
    let em = e[2] * scale;

    let left_of = |a: f64, mo: f64| pw(a, 1.0 / p) * pw(mo, 1.0 / pp);
    let display_left = left_of(lhs, moment);
    let display_right = kappa * mass;
    let bracket_left = left_of(lhs - cp_term, moment);
    let display_ok = left_of(lhs + 10.0 * e[0], moment + 10.0 * em) >= kappa * (mass - 10.0 * e[3]);
    let bracket_ok = left_of(lhs - cp_term + 10.0 * (e[0] + e[1]), moment + 10.0 * em)
        >= kappa * (mass - 10.0 * e[3]);

    let product_ratio =
        (p == 2.0 && mass > 0.0).then(|| lhs * moment / (kappa * kappa * mass * mass));
    let classical = classical.then(|| {
        let n = space.n() as f64;
        let constant = (n - 2.0) * (n - 2.0) / 4.0;
        let ratio = if mass > 0.0 {
            v[4] * v[5] / (mass * mass)
        } else {
            f64::INFINITY
        };
        let slack = 10.0
            * (e[4] / v[4].max(f64::MIN_POSITIVE)
                + e[5] / v[5].max(f64::MIN_POSITIVE)
                + 2.0 * e[3] / mass.max(f64::MIN_POSITIVE));
        ClassicalHpw {
            grad_sq: v[4],
            moment_sq: v[5],
            ratio,
            constant,
            passed: ratio * (1.0 + slack) >= constant,
        }
    });
    // The bracketed form is what the interpolation argument proves at p = 2.
    let mut passed = display_ok && (p != 2.0 || bracket_ok);
    if let Some(c) = &classical {
        passed &= c.passed;
    }
    Ok(HpwReport {
        case,
        p,
        kappa,
        lhs,
        cp_term,
        moment,
        mass,
        display_left,
        display_right,
        bracket_left,
        product_ratio,
        classical,
        quadrature_error: t.errors.iter().sum(),
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cubature::CubatureSettings;
    use crate::fields::{build_test_field, TestField, TestFieldSpec};
    use crate::verifier::testing::ZeroField;

    fn quick() -> VerifySettings {
        VerifySettings {
            quadrature: CubatureSettings {
                rel_tol: 1e-7,
                ..Default::default()
            },
            ..Default::default()
        }
    }

    fn field_for(pair: &WeightPair, kappa: f64) -> TestField {
        build_test_field(pair.space(), &TestFieldSpec::for_pair(pair, kappa)).unwrap()
    }

    fn dambrosio(p: f64) -> WeightPair {
        make_pair(
            PairId::DambrosioPower,
            SpaceParams::new(1, 1, 1.0).unwrap(),
            p,
            PairParams::default_for(PairId::DambrosioPower),
        )
        .unwrap()
    }

    #[test]
    fn validation_names_the_invariant() {
        let base = CknParams {
            p: 2.0,
            q: 2.0,
            r: 2.0,
            delta: 0.5,
            b: -0.5,
            c: 0.0,
        };
        assert!(base.validate().is_ok());
        let bad_c = CknParams { c: 0.1, ..base };
        assert_eq!(
            bad_c.validate().unwrap_err().to_string(),
            "requires c = δ/p + b(1−δ)"
        );
        let bad_h = CknParams { q: 3.0, ..base };
        assert!(bad_h.validate().unwrap_err().to_string().contains("δr/p"));
        let bad_sum = CknParams { r: 5.0, ..base };
        assert!(bad_sum
            .validate()
            .unwrap_err()
            .to_string()
            .contains("p + q ≥ r"));
    }

    #[test]
    fn delta_zero_is_an_equality() {
        let pr = dambrosio(2.0);
        let ckn = CknParams {
            p: 2.0,
            q: 2.0,
            r: 2.0,
            delta: 0.0,
            b: 0.25,
            c: 0.25,
        };
        let r = verify_ckn(&pr, &field_for(&pr, 1.0), &ckn, &quick()).unwrap();
        assert!(r.passed, "{r:?}");
        assert_eq!(r.left, r.right);
    }

    #[test]
    fn delta_one_and_half() {
        let pr = dambrosio(2.0);
        let f = field_for(&pr, 1.0);
        for ckn in [
            CknParams {
                p: 2.0,
                q: 3.0,
                r: 2.0,
                delta: 1.0,
                b: 0.0,
                c: 0.5,
            },
            CknParams {
                p: 2.0,
                q: 2.0,
                r: 2.0,
                delta: 0.5,
                b: -0.5,
                c: 0.0,
            },
        ] {
            let r = verify_ckn(&pr, &f, &ckn, &quick()).unwrap();
            assert!(r.passed && r.consistent, "{r:?}");
        }
    }

    #[test]
    fn hpw_cases_hold() {
        for (case, space) in [
            (HpwCase::BallNch, SpaceParams::new(1, 1, 1.0).unwrap()),
            (
                HpwCase::WholeDambrosio,
                SpaceParams::new(2, 1, 0.0).unwrap(),
            ),
            (HpwCase::LogBall, SpaceParams::new(1, 1, 1.0).unwrap()),
        ] {
            let pr = case.pair(space, 2.0).unwrap();
            let r = verify_hpw(case, space, 2.0, &field_for(&pr, 1.0), &quick()).unwrap();
            assert!(r.passed, "{case:?}: {r:?}");
            if case == HpwCase::WholeDambrosio {
                let c = r.classical.as_ref().unwrap();
                assert!((c.constant - 0.25).abs() < 1e-15);
                assert!(c.ratio >= c.constant);
            }
        }
    }

    #[test]
    fn zero_field_hpw() {
        let space = SpaceParams::new(1, 1, 1.0).unwrap();
        let r = verify_hpw(HpwCase::BallNch, space, 2.0, &ZeroField(space), &quick()).unwrap();
        assert_eq!((r.display_left, r.display_right), (0.0, 0.0));
        assert!(r.passed);
    }
}
