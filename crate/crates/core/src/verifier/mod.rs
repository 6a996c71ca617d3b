//! Assembly of the identity's terms and the derived inequality checks.

mod ckn;
mod sharpness;

pub use ckn::{verify_ckn, verify_hpw, CknParams, CknReport, HpwCase, HpwReport};
pub use sharpness::{sharpness_level, sharpness_probe, SharpnessLevel, SharpnessReport};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cp::{cp_scalar, find_constant, ConstantKind, ConstantSettings, CpObjectiveKind};
use crate::cubature::{integrate_vector, CubatureSettings, Region};
use crate::error::{Error, Result};
use crate::fields::{radial_derivative_from_grad, ScalarField};
use crate::geometry::{norm, rho_from_norms};
use crate::report::{CheckRecord, ToRecord};
use crate::weights::{Domain, WeightPair, WeightValues};

/// Largest m + k the verifier integrates over.
pub const MAX_DIM: usize = 4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct VerifySettings {
    pub quadrature: CubatureSettings,
    /// Relative floor of the residual tolerance.
    pub rel_tol_check: f64,
}

impl Default for VerifySettings {
    fn default() -> Self {
        Self {
            quadrature: CubatureSettings::default(),
            rel_tol_check: 1e-6,
        }
    }
}

/// Pointwise quantities an integrand is built from.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Sample {
    pub f: Complex64,
    pub df: Complex64,
    pub wv: WeightValues,
    /// |∇f|² with the full Euclidean gradient.
    pub grad_sq: f64,
    pub z_sq: f64,
}

/// Integrands over the field; each maps a sample to one real number.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Term {
    /// v|Df|^p
    Lhs,
    /// w|f|^p
    W,
    /// C_p(ξ, η), ξ = v^{1/p}Df, η = ξ + w^{1/p}f
    Cp,
    /// φ|f|^p
    Phi,
    /// |η|^p
    EtaP,
    /// (|ξ| + |ξ−η|)^{p−2}|η|²
    SandwichI,
    /// min{|η|^p, |ξ−η|^{p−2}|η|²}
    MinForm,
    /// w^e |f|^q
    WPow { e: f64, q: f64 },
    /// |∇f|²
    GradSq,
    /// |z|²|f|²
    MomentSq,
}

impl Term {
    #[inline]
    fn eval(&self, s: &Sample, p: f64) -> f64 {
        let af = s.f.norm();
        if af == 0.0 && s.df == Complex64::new(0.0, 0.0) && s.grad_sq == 0.0 {
            return 0.0;
        }
        let wv = s.wv;
        let xi = || s.df * wv.v.powf(1.0 / p);
        let wf = || s.f * wv.w.powf(1.0 / p);
        match *self {
            Term::Lhs => wv.v * s.df.norm().powf(p),
            Term::W => pos_pow(wv.w, af, p),
            Term::Cp => {
                let x = xi();
                cp_scalar(x, x + wf(), p)
            }
            Term::Phi => {
                if wv.phi == 0.0 {
                    0.0
                } else {
                    wv.phi * af.powf(p)
                }
            }
            Term::EtaP => (xi() + wf()).norm().powf(p),
            Term::SandwichI => {
                let x = xi();
                let d = wf().norm();
                let eta = (x + wf()).norm();
                let base = x.norm() + d;
                if base == 0.0 {
                    0.0
                } else {
                    base.powf(p - 2.0) * eta * eta
                }
            }
            Term::MinForm => {
                let x = xi();
                let d = wf().norm();
                let eta = (x + wf()).norm();
                let a = eta.powf(p);
                if d == 0.0 {
                    if p < 2.0 {
                        a
                    } else {
                        0.0
                    }
                } else {
                    a.min(d.powf(p - 2.0) * eta * eta)
                }
            }
            Term::WPow { e, q } => {
                if af == 0.0 {
                    0.0
                } else {
                    wv.w.powf(e) * af.powf(q)
                }
            }
            Term::GradSq => s.grad_sq,
            Term::MomentSq => s.z_sq * af * af,
        }
    }
}

/// a·b^p with 0·anything = 0.
#[inline]
fn pos_pow(a: f64, b: f64, p: f64) -> f64 {
    if b == 0.0 {
        0.0
    } else {
        a * b.powf(p)
    }
}

/// Values and error estimates of a set of terms on one mesh.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct TermValues {
    pub values: Vec<f64>,
    pub errors: Vec<f64>,
    pub evals: usize,
    pub converged: bool,
}

/// Confirms the field stays inside the pair's domain and off its singular set.
pub fn check_compatible(pair: &WeightPair, field: &dyn ScalarField) -> Result<()> {
    if pair.space() != field.space() {
        return Err(Error::Domain(format!(
            "field lives on {} but the pair on {}",
            field.space(),
            pair.space()
        )));
    }
    if pair.space().n() > MAX_DIM {
        return Err(Error::Domain(format!(
            "verification is limited to m + k ≤ {MAX_DIM}"
        )));
    }
    let sup = field.support();
    if !(sup.inner_rho > 0.0) {
        return Err(Error::Domain(
            "field support must stay away from the origin".into(),
        ));
    }
    if let Domain::RhoBall(r) = pair.domain() {
        if !(sup.outer_rho < r) {
            return Err(Error::Domain(format!(
                "field support reaches ρ = {} outside the ball of radius {r}",
                sup.outer_rho
            )));
        }
    }
    if pair.singular_set().x_axis && sup.x_floor <= 0.0 && sup.x_over_rho_floor <= 0.0 {
        return Err(Error::Domain(
            "weights are singular on {x = 0}; the field needs an x cutoff".into(),
        ));
    }
    Ok(())
}

/// Bounding box of the field support, folded onto the positive orthant.
pub(crate) fn support_region(field: &dyn ScalarField) -> Result<Region> {
    let space = field.space();
    let sup = field.support();
    let b = sup.outer_rho;
    let g = space.gamma();
    let by = b.powf(1.0 + g) / (1.0 + g);
    let mut hi = vec![b; space.m()];
    hi.extend(std::iter::repeat(by).take(space.k()));
    let lo: Vec<f64> = hi.iter().map(|h| -h).collect();
    let mut region = Region::new(lo, hi)?.with_all_folds()?;
    if space.m() == 1 && sup.x_floor > 0.0 {
        region = region.with_breaks(0, &sup.x_breaks);
    }
    Ok(region)
}

pub(crate) fn sample(
    pair: &WeightPair,
    field: &dyn ScalarField,
    z: &[f64],
    need_grad: bool,
) -> Sample {
    let space = pair.space();
    let n = z.len();
    let mut grad = [Complex64::new(0.0, 0.0); MAX_DIM];
    let f = field.eval_into(z, &mut grad[..n]);
    let zero = Complex64::new(0.0, 0.0);
    let (x, y) = space.split(z);
    let abs_x = norm(x);
    let rho = rho_from_norms(space.gamma(), abs_x, norm(y));
    let grad_sq = if need_grad {
        grad[..n].iter().map(|g| g.norm_sqr()).sum()
    } else {
        0.0
    };
    let z_sq = z.iter().map(|t| t * t).sum();
    if f == zero && grad[..n].iter().all(|g| *g == zero) {
        return Sample {
            f,
            df: zero,
            wv: WeightValues {
                v: 0.0,
                w: 0.0,
                phi: 0.0,
            },
            grad_sq: 0.0,
            z_sq,
        };
    }
    let df = radial_derivative_from_grad(space, z, rho, abs_x, &grad[..n]);
    let wv = pair.eval(&pair.coords_from(rho, abs_x));
    Sample {
        f,
        df,
        wv,
        grad_sq,
        z_sq,
    }
}

/// Integrates the given terms of `field` on one adaptive mesh.
pub(crate) fn integrate_terms(
    pair: &WeightPair,
    field: &dyn ScalarField,
    terms: &[Term],
    settings: &CubatureSettings,
) -> Result<TermValues> {
    check_compatible(pair, field)?;
    let region = support_region(field)?;
    let p = pair.p();
    let need_grad = terms.contains(&Term::GradSq);
    let integrand = |z: &[f64], out: &mut [f64]| {
        let s = sample(pair, field, z, need_grad);
        for (o, t) in out.iter_mut().zip(terms) {
            *o = t.eval(&s, p);
        }
    };
    let r = integrate_vector(&integrand, terms.len(), &region, settings)?;
    Ok(TermValues {
        values: r.values,
        errors: r.errors,
        evals: r.evals,
        converged: r.converged,
    })
}

// ---------------------------------------------------------------- identity

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub lhs: f64,
    pub w_term: f64,
    pub cp_term: f64,
    pub phi_term: f64,
    pub residual: f64,
    pub rel_residual: f64,
    pub quadrature_error: f64,
    pub evals: usize,
    pub converged: bool,
    pub passed: bool,
}

impl IdentityReport {
    fn from_terms(t: &TermValues, rel_tol_check: f64) -> Self {
        let [lhs, w_term, cp_term, phi_term] = [t.values[0], t.values[1], t.values[2], t.values[3]];
        let residual = lhs - w_term - cp_term - phi_term;
        let quadrature_error: f64 = t.errors[..4].iter().sum();
        let scale = lhs.max(w_term);
        let rel_residual = if scale > 0.0 { residual / scale } else { 0.0 };
        let passed = residual.abs() <= (10.0 * quadrature_error).max(rel_tol_check * lhs);
        Self {
            lhs,
            w_term,
            cp_term,
            phi_term,
            residual,
            rel_residual,
            quadrature_error,
            evals: t.evals,
            converged: t.converged,
            passed,
        }
    }
}

impl ToRecord for IdentityReport {
    fn to_record(&self, name: &str) -> CheckRecord {
        CheckRecord::new(name, self.passed, self.residual, self.quadrature_error)
            .term("lhs", self.lhs)
            .term("w_term", self.w_term)
            .term("cp_term", self.cp_term)
            .term("phi_term", self.phi_term)
            .term("rel_residual", self.rel_residual)
    }
}

const IDENTITY_TERMS: [Term; 4] = [Term::Lhs, Term::W, Term::Cp, Term::Phi];

/// ∫v|Df|^p = ∫w|f|^p + ∫C_p(ξ, η) + ∫φ|f|^p.
pub fn verify_identity(
    pair: &WeightPair,
    field: &dyn ScalarField,
    settings: &VerifySettings,
) -> Result<IdentityReport> {
    let t = integrate_terms(pair, field, &IDENTITY_TERMS, &settings.quadrature)?;
    Ok(IdentityReport::from_terms(&t, settings.rel_tol_check))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub lhs: f64,
    pub w_term: f64,
    pub ratio: f64,
    pub quadrature_error: f64,
    pub passed: bool,
}

impl ToRecord for InequalityReport {
    fn to_record(&self, name: &str) -> CheckRecord {
        CheckRecord::new(
            name,
            self.passed,
            self.lhs - self.w_term,
            self.quadrature_error,
        )
        .term("lhs", self.lhs)
        .term("w_term", self.w_term)
        .term("ratio", self.ratio)
    }
}

/// ∫v|Df|^p ≥ ∫w|f|^p.
pub fn verify_inequality(
    pair: &WeightPair,
    field: &dyn ScalarField,
    settings: &VerifySettings,
) -> Result<InequalityReport> {
    let t = integrate_terms(pair, field, &[Term::Lhs, Term::W], &settings.quadrature)?;
    let (lhs, w_term) = (t.values[0], t.values[1]);
    let quadrature_error = t.errors[0] + t.errors[1];
    Ok(InequalityReport {
        lhs,
        w_term,
        ratio: if w_term > 0.0 { lhs / w_term } else { f64::NAN },
        quadrature_error,
        passed: lhs >= w_term - 10.0 * quadrature_error,
    })
}

// ---------------------------------------------------------------- remainders

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RemainderReport {
    pub p: f64,
    pub cp_term: f64,
    /// c_p for p ≥ 2, c1 below 2.
    pub lower_constant: f64,
    /// ∫|η|^p for p ≥ 2, I below 2.
    pub lower_integral: f64,
    /// c2 and I (p < 2 only).
    pub upper_constant: Option<f64>,
    /// c3 and M (p < 2 only).
    pub min_constant: Option<f64>,
    pub min_integral: Option<f64>,
    /// cp_term − c·(integral) for the tightest of the bounds.
    pub margin: f64,
    /// |cp_term − ∫|η|²| / cp_term at p = 2.
    pub p2_rel_diff: Option<f64>,
    pub quadrature_error: f64,
    pub passed: bool,
}

impl ToRecord for RemainderReport {
    fn to_record(&self, name: &str) -> CheckRecord {
        let mut r = CheckRecord::new(name, self.passed, self.margin, self.quadrature_error)
            .term("p", self.p)
            .term("cp_term", self.cp_term)
            .term("lower_constant", self.lower_constant)
            .term("lower_integral", self.lower_integral);
        if let Some(c) = self.upper_constant {
            r = r.term("upper_constant", c);
        }
        if let Some(c) = self.min_constant {
            r = r.term("min_constant", c);
        }
        if let Some(m) = self.min_integral {
            r = r.term("min_integral", m);
        }
        if let Some(d) = self.p2_rel_diff {
            r = r.term("p2_rel_diff", d);
        }
        r
    }
}

fn require_zero_phi(pair: &WeightPair) -> Result<()> {
    if pair.phi_is_zero() {
        Ok(())
    } else {
        Err(Error::Constraint(format!(
            "remainder bounds need a pair with φ = 0, {} has φ ≠ 0",
            pair.id()
        )))
    }
}

/// Inf-type constants enter through their bracket's lower end, the sup-type
/// c2 through the upper end, so rounding in the search never helps a check.
fn constant(kind: ConstantKind, p: f64) -> Result<f64> {
    let e = find_constant(CpObjectiveKind::new(kind, p)?, &ConstantSettings::default())?;
    Ok(match kind {
        ConstantKind::C2Sup => e.bracket.1,
        _ => e.bracket.0,
    })
}

/// ∫C_p(ξ, η) ≥ c_p ∫|η|^p for p ≥ 2.
pub fn verify_remainder_p_ge2(
    pair: &WeightPair,
    field: &dyn ScalarField,
    settings: &VerifySettings,
) -> Result<RemainderReport> {
    require_zero_phi(pair)?;
    let p = pair.p();
    if p < 2.0 {
        return Err(Error::Constraint(format!("requires p ≥ 2, got {p}")));
    }
    let cp = constant(ConstantKind::CpPge2, p)?;
    let t = integrate_terms(pair, field, &[Term::Cp, Term::EtaP], &settings.quadrature)?;
    let (cp_term, eta) = (t.values[0], t.values[1]);
    let err = t.errors[0] + cp * t.errors[1];
    let margin = cp_term - cp * eta;
    let p2 = (p == 2.0).then(|| {
        if cp_term > 0.0 {
            (cp_term - eta).abs() / cp_term
        } else {
            0.0
        }
    });
    let mut passed = margin >= -10.0 * err;
    if let Some(d) = p2 {
        passed &= d <= 1e-8;
    }
    Ok(RemainderReport {
        p,
        cp_term,
        lower_constant: cp,
        lower_integral: eta,
        upper_constant: None,
        min_constant: None,
        min_integral: None,
        margin,
        p2_rel_diff: p2,
        quadrature_error: err,
        passed,
    })
}

/// c1·I ≤ ∫C_p ≤ c2·I and ∫C_p ≥ c3·M for 1 < p < 2.
pub fn verify_remainder_p_lt2(
    pair: &WeightPair,
    field: &dyn ScalarField,
    settings: &VerifySettings,
) -> Result<RemainderReport> {
    require_zero_phi(pair)?;
    let p = pair.p();
    if !(p > 1.0 && p < 2.0) {
        return Err(Error::Constraint(format!("requires 1 < p < 2, got {p}")));
    }
    let c1 = constant(ConstantKind::C1Inf, p)?;
    let c2 = constant(ConstantKind::C2Sup, p)?;
    let c3 = constant(ConstantKind::C3Min, p)?;
    let t = integrate_terms(
        pair,
        field,
        &[Term::Cp, Term::SandwichI, Term::MinForm],
        &settings.quadrature,
    )?;
    let (cp_term, i, m) = (t.values[0], t.values[1], t.values[2]);
    let (ec, ei, em) = (t.errors[0], t.errors[1], t.errors[2]);
    let lower = cp_term - c1 * i;
    let upper = c2 * i - cp_term;
    let minf = cp_term - c3 * m;
    let passed = lower >= -10.0 * (ec + c1 * ei)
        && upper >= -10.0 * (ec + c2 * ei)
        && minf >= -10.0 * (ec + c3 * em);
    Ok(RemainderReport {
        p,
        cp_term,
        lower_constant: c1,
        lower_integral: i,
        upper_constant: Some(c2),
        min_constant: Some(c3),
        min_integral: Some(m),
        margin: lower.min(upper).min(minf),
        p2_rel_diff: None,
        quadrature_error: ec + ei + em,
        passed,
    })
}


#[cfg(test)]
mod tests {
    use super::testing::ZeroField;
    use super::*;
    use crate::fields::{build_test_field, TestField, TestFieldSpec};
    use crate::geometry::SpaceParams;
    use crate::weights::{make_pair, PairId, PairParams};

    fn sp(m: usize, k: usize, g: f64) -> SpaceParams {
        SpaceParams::new(m, k, g).unwrap()
    }

    fn pair(id: PairId, s: SpaceParams, p: f64) -> WeightPair {
        make_pair(id, s, p, PairParams::default_for(id)).unwrap()
    }

    fn field(pair: &WeightPair, kappa: f64) -> TestField {
        build_test_field(pair.space(), &TestFieldSpec::for_pair(pair, kappa)).unwrap()
    }

    fn quick() -> VerifySettings {
        VerifySettings {
            quadrature: CubatureSettings {
                rel_tol: 1e-7,
                ..Default::default()
            },
            ..Default::default()
        }
    }

    #[test]
    fn identity_dambrosio_example() {
        let pr = pair(PairId::DambrosioPower, sp(1, 1, 1.0), 2.0);
        let r = verify_identity(&pr, &field(&pr, 0.0), &quick()).unwrap();
        assert!(r.passed, "{r:?}");
        assert!(r.rel_residual.abs() <= 1e-6, "{r:?}");
    }

    #[test]
    fn identity_nch_has_positive_phi_term() {
        let pr = pair(PairId::NchBall, sp(1, 1, 1.0), 3.0);
        let r = verify_identity(&pr, &field(&pr, 1.0), &quick()).unwrap();
        assert!(r.passed && r.phi_term > 0.0, "{r:?}");
        assert!(r.rel_residual.abs() <= 1e-6);
    }

    #[test]
    fn zero_field_gives_zero_terms() {
        let pr = pair(PairId::NchBall, sp(1, 1, 1.0), 2.0);
        let z = ZeroField(*pr.space());
        let r = verify_identity(&pr, &z, &quick()).unwrap();
        assert_eq!(
            (r.lhs, r.w_term, r.cp_term, r.phi_term),
            (0.0, 0.0, 0.0, 0.0)
        );
        assert!(r.passed);
        let i = verify_inequality(&pr, &z, &quick()).unwrap();
        assert!(i.passed);
    }

    #[test]
    fn global_phase_changes_nothing() {
        struct Rotated<'a>(&'a TestField, Complex64);
        impl ScalarField for Rotated<'_> {
            fn space(&self) -> &SpaceParams {
                self.0.space()
            }
            fn eval_into(&self, z: &[f64], grad: &mut [Complex64]) -> Complex64 {
                let v = self.0.eval_into(z, grad);
                grad.iter_mut().for_each(|g| *g *= self.1);
                v * self.1
            }
            fn support(&self) -> crate::fields::Support {
                self.0.support()
            }
        }
        let pr = pair(PairId::LogBall, sp(1, 1, 1.0), 1.5);
        let f = field(&pr, 1.0);
        let a = verify_identity(&pr, &f, &quick()).unwrap();
        let b =
            verify_identity(&pr, &Rotated(&f, Complex64::from_polar(1.0, 0.7)), &quick()).unwrap();
        for (x, y) in [
            (a.lhs, b.lhs),
            (a.w_term, b.w_term),
            (a.cp_term, b.cp_term),
            (a.phi_term, b.phi_term),
        ] {
            assert!((x - y).abs() <= 1e-10 * x.abs().max(1e-300), "{x} {y}");
        }
    }

    #[test]
    fn remainder_checks() {
        let s = quick();
        let pr = pair(PairId::DambrosioPower, sp(1, 1, 1.0), 2.0);
        let r = verify_remainder_p_ge2(&pr, &field(&pr, 1.0), &s).unwrap();
        assert!(r.passed && r.p2_rel_diff.unwrap() <= 1e-8, "{r:?}");
        let pr = pair(PairId::DambrosioPower, sp(1, 1, 1.0), 3.0);
        let r = verify_remainder_p_ge2(&pr, &field(&pr, 0.0), &s).unwrap();
        assert!(r.passed && r.margin > 0.0, "{r:?}");
        let pr = pair(PairId::DambrosioPower, sp(1, 1, 1.0), 1.5);
        let r = verify_remainder_p_lt2(&pr, &field(&pr, 1.0), &s).unwrap();
        assert!(r.passed, "{r:?}");
        let nch = pair(PairId::NchBall, sp(1, 1, 1.0), 3.0);
        assert!(verify_remainder_p_ge2(&nch, &field(&nch, 0.0), &s).is_err());
    }

    #[test]
    fn incompatible_fields_rejected() {
        let pr = pair(PairId::DambrosioPower, sp(1, 1, 1.0), 2.0);
        let spec = TestFieldSpec::default();
        let f = build_test_field(pr.space(), &spec).unwrap();
        assert!(verify_identity(&pr, &f, &quick()).is_err());
        let other = build_test_field(&sp(2, 1, 0.0), &spec).unwrap();
        assert!(verify_identity(&pr, &other, &quick()).is_err());
    }
}
