//! Rayleigh ratios of truncated extremals.
//!
//! The integrals are taken in (τ, ψ) coordinates: τ is the profile's log
//! variable and ψ parametrizes |x|^{1+γ} = ρ^{1+γ} cos ψ,
//! (1+γ)|y| = ρ^{1+γ} sin ψ. ρ and R − ρ come straight from τ, which keeps
//! full precision where the window reaches within e^{−40} of a ball's edge.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::cubature::{integrate_vector, CubatureSettings, Region};
use crate::error::{Error, Result};
use crate::fields::{build_extremal_field, ExtremalField, RadialPoint};
use crate::geometry::x_power;
use crate::report::{CheckRecord, ToRecord};
use crate::weights::{Coords, PairId, WeightPair};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SharpnessLevel {
    pub truncation_level: u32,
    pub rayleigh_ratio: f64,
    /// ∫v|Dh|^p
    pub lhs: f64,
    /// ∫(w/κ^p)|h|^p
    pub w_term: f64,
    /// Error estimate of the ratio.
    pub quadrature_error: f64,
    pub evals: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SharpnessReport {
    pub pair: PairId,
    pub levels: Vec<SharpnessLevel>,
    pub sharp_constant: f64,
    /// (last ratio − sharp constant)/sharp constant.
    pub final_gap: f64,
    pub monotone: bool,
    pub above_sharp: bool,
    pub passed: bool,
}

/// Largest relative final gap accepted.
pub const SHARPNESS_GAP_LIMIT: f64 = 0.05;

impl ToRecord for SharpnessReport {
    fn to_record(&self, name: &str) -> CheckRecord {
        let err = self
            .levels
            .iter()
            .map(|l| l.quadrature_error)
            .fold(0.0, f64::max);
        let mut r = CheckRecord::new(name, self.passed, self.final_gap, err)
            .term("sharp_constant", self.sharp_constant)
            .term("final_gap", self.final_gap);
        for l in &self.levels {
            r = r.term(
                &format!("ratio_level_{}", l.truncation_level),
                l.rayleigh_ratio,
            );
        }
        r
    }
}

/// Area of the unit sphere S^{d−1}.
fn sphere_area(d: usize) -> Result<f64> {
    Ok(match d {
        1 => 2.0,
        2 => 2.0 * PI,
        3 => 4.0 * PI,
        4 => 2.0 * PI * PI,
        _ => {
            return Err(Error::Domain(format!(
                "sphere area for dimension {d} is not tabulated"
            )))
        }
    })
}

/// Ratio for a single truncation level.
pub fn sharpness_level(
    pair: &WeightPair,
    level: u32,
    settings: &CubatureSettings,
) -> Result<SharpnessLevel> {
    let field = build_extremal_field(pair, level)?;
    let space = *pair.space();
    let (m, k, g) = (space.m(), space.k(), space.gamma());
    let sm = sphere_area(m)?;
    let sk = sphere_area(k)?;
    let p = pair.p();
    let sharp = pair.sharp_constant();
    let profile = field.profile_kind();

    let tb = field.tau_breaks();
    let mut region_hi = FRAC_PI_2;
    let mut psi_breaks = Vec::new();
    if let Some([a, b]) = field.angular_breaks() {
        region_hi = a.powf(1.0 + g).acos();
        psi_breaks.push(b.powf(1.0 + g).acos());
    }
    let region = Region::new(vec![tb[0], 0.0], vec![tb[3], region_hi])?
        .with_breaks(0, &tb[1..3])
        .with_breaks(1, &psi_breaks);

    let integrand = |u: &[f64], out: &mut [f64]| {
        let (tau, psi) = (u[0], u[1]);
        let rp = RadialPoint {
            rho: profile.rho_at(tau),
            gap: profile.gap_at(tau),
        };
        polar_terms(
            pair,
            &field,
            rp,
            profile.drho_dtau(tau),
            psi,
            (m, k, g, sm * sk),
            p,
            sharp,
            out,
        );
    };
    let r = integrate_vector(&integrand, 2, &region, settings)?;
    let (lhs, w_term) = (r.values[0], r.values[1]);
    if !(w_term > 0.0) {
        return Err(Error::Domain("extremal has vanishing weighted mass".into()));
    }
    let ratio = lhs / w_term;
    Ok(SharpnessLevel {
        truncation_level: level,
        rayleigh_ratio: ratio,
        lhs,
        w_term,
        quadrature_error: ratio * (r.errors[0] / lhs.abs() + r.errors[1] / w_term),
        evals: r.evals,
    })
}

#[allow(clippy::too_many_arguments)]
#[inline]
fn polar_terms(
    pair: &WeightPair,
    field: &ExtremalField,
    rp: RadialPoint,
    drho: f64,
    psi: f64,
    (m, k, g, spheres): (usize, usize, f64, f64),
    p: f64,
    sharp: f64,
    out: &mut [f64],
) {
    let (s, c) = psi.sin_cos();
    let rho = rp.rho;
    let t = c.max(0.0).powf(1.0 / (1.0 + g));
    let (a, _) = field.angular_factor(t);
    let (h, dh) = field.radial(rp);
    if a == 0.0 || (h == 0.0 && dh == 0.0) {
        out[0] = 0.0;
        out[1] = 0.0;
        return;
    }
    let rx = rho * t;
    let ry = rho.powf(1.0 + g) * s / (1.0 + g);
    let jac = rho.powf(1.0 + g) / (1.0 + g)
        * c.powf(-g / (1.0 + g))
        * rx.powi(m as i32 - 1)
        * ry.powi(k as i32 - 1)
        * spheres
        * drho;
    // D annihilates A(|x|/ρ), so Dh = |∇_γρ|·H'(ρ)·A.
    let dh_full = x_power(t, g) * dh * a;
    let wv = pair.eval(&Coords {
        rho,
        abs_x: rx,
        gap: rp.gap,
    });
    out[0] = wv.v * dh_full.abs().powf(p) * jac;
    out[1] = wv.w / sharp * (h * a).abs().powf(p) * jac;
}

/// Ratios for truncation levels 0..levels.
pub fn sharpness_probe(
    pair: &WeightPair,
    levels: u32,
    settings: &CubatureSettings,
) -> Result<SharpnessReport> {
    if levels < 2 {
        return Err(Error::Constraint(format!(
            "sharpness needs at least 2 levels, got {levels}"
        )));
    }
    let lv: Vec<SharpnessLevel> = (0..levels)
        .map(|l| sharpness_level(pair, l, settings))
        .collect::<Result<_>>()?;
    let sharp = pair.sharp_constant();
    let monotone = lv
        .windows(2)
        .all(|w| w[1].rayleigh_ratio < w[0].rayleigh_ratio);
    let above_sharp = lv
        .iter()
        .all(|l| l.rayleigh_ratio >= sharp - 10.0 * l.quadrature_error);
    let final_gap = (lv.last().expect("levels ≥ 2").rayleigh_ratio - sharp) / sharp;
    Ok(SharpnessReport {
        pair: pair.id(),
        passed: monotone && above_sharp && final_gap <= SHARPNESS_GAP_LIMIT,
        levels: lv,
        sharp_constant: sharp,
        final_gap,
        monotone,
        above_sharp,
    })
}
