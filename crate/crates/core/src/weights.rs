//! Catalog of weight pairs (v, w) with closed-form defect φ, parameter
//! validation and a finite-difference check of the divergence condition
//! φ = ∇_γ·(w^{(p−1)/p} v^{1/p} ∇_γρ/|∇_γρ|) − p·w.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{log_ratio, RadialPoint};
use crate::geometry::{self, norm, point_on_sphere, x_power, SpaceParams};
use crate::report::{CheckRecord, ToRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairId {
    NchBall,
    DambrosioPower,
    DarcaPower,
    LogBall,
}

impl PairId {
    pub const ALL: [PairId; 4] = [
        PairId::NchBall,
        PairId::DambrosioPower,
        PairId::DarcaPower,
        PairId::LogBall,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            PairId::NchBall => "nch_ball",
            PairId::DambrosioPower => "dambrosio_power",
            PairId::DarcaPower => "darca_power",
            PairId::LogBall => "log_ball",
        }
    }
}

impl std::fmt::Display for PairId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for PairId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        PairId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| Error::Constraint(format!("unknown pair id '{s}'")))
    }
}

/// Per-pair parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "id", rename_all = "snake_case")]
pub enum PairParams {
    NchBall { r: f64 },
    DambrosioPower { alpha: f64, beta: f64 },
    DarcaPower { alpha: f64, theta: f64, r: f64 },
    LogBall { alpha: f64, r: f64 },
}

impl PairParams {
    pub fn id(&self) -> PairId {
        match self {
            PairParams::NchBall { .. } => PairId::NchBall,
            PairParams::DambrosioPower { .. } => PairId::DambrosioPower,
            PairParams::DarcaPower { .. } => PairId::DarcaPower,
            PairParams::LogBall { .. } => PairId::LogBall,
        }
    }

    /// Parameters used by the default sweeps.
    pub fn default_for(id: PairId) -> Self {
        match id {
            PairId::NchBall => PairParams::NchBall { r: 4.0 },
            PairId::DambrosioPower => PairParams::DambrosioPower {
                alpha: 0.0,
                beta: 0.0,
            },
            PairId::DarcaPower => PairParams::DarcaPower {
                alpha: 1.0,
                theta: 0.5,
                r: 4.0,
            },
            PairId::LogBall => PairParams::LogBall {
                alpha: -3.0,
                r: 4.0,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Domain {
    WholeSpace,
    RhoBall(f64),
}

/// Where v, w or ∇_γρ/|∇_γρ| are undefined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SingularSet {
    pub origin: bool,
    pub x_axis: bool,
    pub boundary: bool,
}

/// Radial data a weight depends on: ρ, |x| and the gap R − ρ (infinite on
/// whole-space pairs).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coords {
    pub rho: f64,
    pub abs_x: f64,
    pub gap: f64,
}

impl Coords {
    fn radial(&self) -> RadialPoint {
        RadialPoint {
            rho: self.rho,
            gap: self.gap,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightValues {
    pub v: f64,
    pub w: f64,
    pub phi: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightPair {
    space: SpaceParams,
    p: f64,
    params: PairParams,
    kappa: f64,
    allow_negative_phi: bool,
}

#[inline]
fn pow0(t: f64, e: f64) -> f64 {
    if e == 0.0 {
        1.0
    } else {
        t.powf(e)
    }
}

pub fn make_pair(id: PairId, space: SpaceParams, p: f64, params: PairParams) -> Result<WeightPair> {
    make_pair_with(id, space, p, params, false)
}

/// As [`make_pair`]; `allow_negative_phi` admits log_ball with Q < p, where the
/// identity still holds but φ < 0.
pub fn make_pair_with(
    id: PairId,
    space: SpaceParams,
    p: f64,
    params: PairParams,
    allow_negative_phi: bool,
) -> Result<WeightPair> {
    if params.id() != id {
        return Err(Error::Constraint(format!(
            "parameters for {} given to pair {id}",
            params.id()
        )));
    }
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::Constraint(format!("requires p > 1, got {p}")));
    }
    let q = space.q();
    let need_r = |r: f64| {
        if r > 0.0 && r.is_finite() {
            Ok(())
        } else {
            Err(Error::Constraint(format!("requires R > 0, got {r}")))
        }
    };
    let kappa = match params {
        PairParams::NchBall { r } => {
            need_r(r)?;
            (p - 1.0) / p
        }
        PairParams::DambrosioPower { alpha, beta } => {
            if !(q > alpha - beta) {
                return Err(Error::Constraint(format!(
                    "requires Q > α−β (Q = {q}, α−β = {})",
                    alpha - beta
                )));
            }
            (q + beta - alpha) / p
        }
        PairParams::DarcaPower { theta, r, .. } => {
            need_r(r)?;
            if !(q > p * theta) {
                return Err(Error::Constraint(format!(
                    "requires Q > pθ (Q = {q}, pθ = {})",
                    p * theta
                )));
            }
            (q - p * theta) / p
        }
        PairParams::LogBall { alpha, r } => {
            need_r(r)?;
            if !(alpha + 1.0 < 0.0) {
                return Err(Error::Constraint(format!("requires α+1 < 0 (α = {alpha})")));
            }
            if !(q >= p) && !allow_negative_phi {
                return Err(Error::Constraint(format!(
                    "requires Q ≥ p (Q = {q}, p = {p})"
                )));
            }
            (alpha + 1.0).abs() / p
        }
    };
    Ok(WeightPair {
        space,
        p,
        params,
        kappa,
        allow_negative_phi,
    })
}

impl WeightPair {
    pub fn id(&self) -> PairId {
        self.params.id()
    }

    pub fn space(&self) -> &SpaceParams {
        &self.space
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn params(&self) -> &PairParams {
        &self.params
    }

    pub fn allows_negative_phi(&self) -> bool {
        self.allow_negative_phi
    }

    /// κ with sharp constant κ^p.
    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn sharp_constant(&self) -> f64 {
        self.kappa.powf(self.p)
    }

    pub fn ball_radius(&self) -> Option<f64> {
        match self.params {
            PairParams::NchBall { r }
            | PairParams::DarcaPower { r, .. }
            | PairParams::LogBall { r, .. } => Some(r),
            PairParams::DambrosioPower { .. } => None,
        }
    }

    pub fn domain(&self) -> Domain {
        match self.ball_radius() {
            Some(r) => Domain::RhoBall(r),
            None => Domain::WholeSpace,
        }
    }

    /// True when the pair's φ vanishes identically.
    pub fn phi_is_zero(&self) -> bool {
        match self.params {
            PairParams::DambrosioPower { .. } | PairParams::DarcaPower { .. } => true,
            PairParams::NchBall { .. } => false,
            PairParams::LogBall { .. } => self.space.q() == self.p,
        }
    }

    pub fn singular_set(&self) -> SingularSet {
        let g = self.space.gamma();
        let negative_x_power = match self.params {
            PairParams::DambrosioPower { beta, .. } => beta < 0.0 || beta - g * self.p < 0.0,
            PairParams::DarcaPower { alpha, .. } => g > 0.0 && alpha < 0.0,
            _ => false,
        };
        SingularSet {
            origin: true,
            x_axis: g > 0.0 || negative_x_power,
            boundary: matches!(
                self.params,
                PairParams::NchBall { .. } | PairParams::LogBall { .. }
            ),
        }
    }

    pub fn coords(&self, z: &[f64]) -> Coords {
        let (x, y) = self.space.split(z);
        let abs_x = norm(x);
        let rho = geometry::rho_from_norms(self.space.gamma(), abs_x, norm(y));
        self.coords_from(rho, abs_x)
    }

    pub fn coords_from(&self, rho: f64, abs_x: f64) -> Coords {
        let gap = self.ball_radius().map_or(f64::INFINITY, |r| r - rho);
        Coords { rho, abs_x, gap }
    }

    /// v, w and φ at a point of the domain.
    #[inline]
    pub fn eval(&self, c: &Coords) -> WeightValues {
        let p = self.p;
        let g = self.space.gamma();
        let q = self.space.q();
        let k = self.kappa;
        let ngr = x_power(c.abs_x / c.rho, g);
        match self.params {
            PairParams::NchBall { .. } => {
                let ngr_p = ngr.powf(p);
                WeightValues {
                    v: 1.0,
                    w: k.powf(p) * ngr_p / c.gap.powf(p),
                    phi: k.powf(p - 1.0) * (q - 1.0) * ngr_p / (c.gap.powf(p - 1.0) * c.rho),
                }
            }
            PairParams::DambrosioPower { alpha, beta } => WeightValues {
                v: pow0(c.abs_x, beta - g * p) * pow0(c.rho, p * (1.0 + g) - alpha),
                w: k.powf(p) * pow0(c.abs_x, beta) / pow0(c.rho, alpha),
                phi: 0.0,
            },
            PairParams::DarcaPower { alpha, theta, .. } => WeightValues {
                v: pow0(ngr, alpha) / pow0(c.rho, p * (theta - 1.0)),
                w: k.powf(p) * pow0(ngr, alpha + p) / pow0(c.rho, p * theta),
                phi: 0.0,
            },
            PairParams::LogBall { alpha, .. } => {
                let l = log_ratio(c.radial());
                let base = ngr.powf(p) / c.rho.powf(p);
                WeightValues {
                    v: l.powf(alpha + p),
                    w: k.powf(p) * l.powf(alpha) * base,
                    phi: k.powf(p - 1.0) * (q - p) * l.powf(alpha + 1.0) * base,
                }
            }
        }
    }

    pub fn v(&self, c: &Coords) -> f64 {
        self.eval(c).v
    }

    pub fn w(&self, c: &Coords) -> f64 {
        self.eval(c).w
    }

    pub fn phi(&self, c: &Coords) -> f64 {
        self.eval(c).phi
    }

    /// Vector field w^{(p−1)/p} v^{1/p} ∇_γρ/|∇_γρ| whose divergence defines φ.
    pub fn condition_field(&self, z: &[f64]) -> Vec<f64> {
        let c = self.coords(z);
        let wv = self.eval(&c);
        let scale = wv.w.powf((self.p - 1.0) / self.p) * wv.v.powf(1.0 / self.p);
        let mut g = geometry::grad_gamma_rho(&self.space, z).unwrap_or_else(|_| vec![0.0; z.len()]);
        let n = norm(&g);
        for e in &mut g {
            *e *= scale / n;
        }
        g
    }

    fn in_domain(&self, c: &Coords) -> bool {
        c.rho > 0.0 && c.gap > 0.0
    }
}

/// φ by finite-difference divergence of the condition field, minus p·w.
pub fn phi_numeric(pair: &WeightPair, z: &[f64], step: f64) -> Result<f64> {
    let space = pair.space();
    space.check_point(z)?;
    let c = pair.coords(z);
    if !pair.in_domain(&c) {
        return Err(Error::Domain(format!(
            "ρ = {} lies outside the domain",
            c.rho
        )));
    }
    let mut clearance = c.rho.min(c.gap);
    if pair.singular_set().x_axis {
        clearance = clearance.min(c.abs_x);
    }
    let f = |q: &[f64]| pair.condition_field(q);
    let div = geometry::fd_divergence_with_clearance(space, &f, z, step, clearance)?;
    Ok(div - pair.p() * pair.w(&c))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub samples: usize,
    pub min_phi: f64,
    /// max |φ − φ_numeric| / (1 + p·w).
    pub max_abs_mismatch: f64,
    /// min φ ≥ −1e−9 (unless the pair allows negative φ) and mismatch ≤ 1e−6.
    pub passed: bool,
}

impl ToRecord for ConditionReport {
    fn to_record(&self, name: &str) -> CheckRecord {
        CheckRecord::new(name, self.passed, self.max_abs_mismatch, 0.0)
            .term("samples", self.samples as f64)
            .term("min_phi", self.min_phi)
            .term("max_abs_mismatch", self.max_abs_mismatch)
    }
}

/// Samples ρ ∈ [0.3, 0.9]·(R or 2), |x| ≥ 0.1ρ and compares φ with its
/// finite-difference counterpart.
pub fn condition_report(pair: &WeightPair, samples: usize, seed: u64) -> Result<ConditionReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = pair.ball_radius().unwrap_or(2.0);
    let mut min_phi = f64::INFINITY;
    let mut mismatch: f64 = 0.0;
    for _ in 0..samples {
        let r = scale * rng.gen_range(0.3..0.9);
        let t = rng.gen_range(0.1..1.0);
        let z = point_on_sphere(pair.space(), r, t, &mut rng);
        let c = pair.coords(&z);
        let wv = pair.eval(&c);
        let num = phi_numeric(pair, &z, geometry::default_fd_step(&z))?;
        min_phi = min_phi.min(wv.phi);
        mismatch = mismatch.max((wv.phi - num).abs() / (1.0 + pair.p() * wv.w));
    }
    Ok(ConditionReport {
        samples,
        min_phi,
        max_abs_mismatch: mismatch,
        passed: (pair.allows_negative_phi() || min_phi >= -1e-9) && mismatch <= 1e-6,
    })
}
