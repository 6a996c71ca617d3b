//! The remainder functional C_p(ξ, η) and the optimization-defined constants
//! c_p (p ≥ 2) and c_1, c_2, c_3 (1 < p < 2).

use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::simplex::{nelder_mead, SimplexSettings};

/// C_p(ξ, η) = |ξ|^p − |ξ−η|^p − p|ξ−η|^{p−2} Re((ξ−η)·η̄) for scalars.
/// The last term is taken as 0 when ξ = η.
#[inline]
pub fn cp_scalar(xi: Complex64, eta: Complex64, p: f64) -> f64 {
    let d = xi - eta;
    let b = d.norm();
    let a = xi.norm();
    let third = if b == 0.0 {
        0.0
    } else {
        p * b.powf(p - 2.0) * (d * eta.conj()).re
    };
    a.powf(p) - b.powf(p) - third
}

/// C_p on complex vectors.
pub fn cp_value(xi: &[Complex64], eta: &[Complex64], p: f64) -> Result<f64> {
    if xi.len() != eta.len() {
        return Err(Error::DimensionMismatch {
            expected: xi.len(),
            got: eta.len(),
        });
    }
    if !(p > 1.0) {
        return Err(Error::Constraint(format!("requires p > 1, got {p}")));
    }
    let a = xi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let mut b2 = 0.0;
    let mut re = 0.0;
    for (x, e) in xi.iter().zip(eta) {
        let d = x - e;
        b2 += d.norm_sqr();
        re += (d * e.conj()).re;
    }
    let b = b2.sqrt();
    let third = if b == 0.0 {
        0.0
    } else {
        p * b.powf(p - 2.0) * re
    };
    Ok(a.powf(p) - b.powf(p) - third)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstantKind {
    CpPge2,
    C1Inf,
    C2Sup,
    C3Min,
}

impl ConstantKind {
    pub fn short_name(&self) -> &'static str {
        match self {
            ConstantKind::CpPge2 => "cp",
            ConstantKind::C1Inf => "c1",
            ConstantKind::C2Sup => "c2",
            ConstantKind::C3Min => "c3",
        }
    }

    pub fn from_short(s: &str) -> Result<Self> {
        match s {
            "cp" | "cp_pge2" => Ok(ConstantKind::CpPge2),
            "c1" | "c1_inf" => Ok(ConstantKind::C1Inf),
            "c2" | "c2_sup" => Ok(ConstantKind::C2Sup),
            "c3" | "c3_min" => Ok(ConstantKind::C3Min),
            _ => Err(Error::Constraint(format!("unknown constant kind '{s}'"))),
        }
    }

    fn maximize(&self) -> bool {
        matches!(self, ConstantKind::C2Sup)
    }
}

/// A constant kind together with its exponent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CpObjectiveKind {
    pub kind: ConstantKind,
    pub p: f64,
}

impl CpObjectiveKind {
    pub fn new(kind: ConstantKind, p: f64) -> Result<Self> {
        let ok = match kind {
            ConstantKind::CpPge2 => p >= 2.0 && p.is_finite(),
            _ => p > 1.0 && p < 2.0,
        };
        if !ok {
            let need = match kind {
                ConstantKind::CpPge2 => "p ≥ 2",
                _ => "1 < p < 2",
            };
            return Err(Error::Constraint(format!(
                "{} requires {need}, got p = {p}",
                kind.short_name()
            )));
        }
        Ok(Self { kind, p })
    }

    /// The interval the constant is stated to lie in.
    pub fn stated_range(&self) -> (f64, f64) {
        let p = self.p;
        match self.kind {
            ConstantKind::CpPge2 => (0.0, 1.0),
            ConstantKind::C1Inf => (0.0, p * (p - 1.0) / (2.0 * p - 1.0)),
            ConstantKind::C2Sup => (p / 2f64.powf(p - 1.0), f64::INFINITY),
            ConstantKind::C3Min => (0.0, p * (p - 1.0) / 2.0),
        }
    }

    /// Membership in the stated range; the lower end is open except for c2.
    pub fn in_stated_range(&self, v: f64) -> bool {
        let (lo, hi) = self.stated_range();
        match self.kind {
            ConstantKind::C2Sup => v >= lo,
            _ => v > lo && v <= hi,
        }
    }
}

/// (1+u)^a − 1 − a·u without cancellation for small |u|.
fn binomial_remainder(a: f64, u: f64) -> f64 {
    if a == 1.0 {
        return 0.0;
    }
    if u.abs() < 0.1 {
        let mut term = a * (a - 1.0) / 2.0 * u * u;
        let mut sum = term;
        let mut j = 2.0;
        while term.abs() > 1e-18 * sum.abs() && j < 60.0 {
            term *= (a - j) / (j + 1.0) * u;
            sum += term;
            j += 1.0;
        }
        sum
    } else {
        (1.0 + u).powf(a) - 1.0 - a * u
    }
}

/// N(s, t) = ((s+1)² + t²)^{p/2} − 1 − ps.
pub fn numerator(p: f64, s: f64, t: f64) -> f64 {
    let r2 = s * s + t * t;
    let u = s * (2.0 + s) + t * t;
    0.5 * p * r2 + binomial_remainder(0.5 * p, u)
}

/// N/D for the given kind. For c3 the branch is selected by s² + t² ≥ 1.
pub fn objective(kind: CpObjectiveKind, s: f64, t: f64) -> Result<f64> {
    let r2 = s * s + t * t;
    if r2 == 0.0 {
        return Err(Error::Singular(
            "objective is undefined at (s, t) = (0, 0)".into(),
        ));
    }
    Ok(objective_unchecked(kind, s, t))
}

#[inline]
fn objective_unchecked(kind: CpObjectiveKind, s: f64, t: f64) -> f64 {
    let p = kind.p;
    let r2 = s * s + t * t;
    let n = numerator(p, s, t);
    let d = match kind.kind {
        ConstantKind::CpPge2 => r2.powf(0.5 * p),
        ConstantKind::C1Inf | ConstantKind::C2Sup => {
            (((s + 1.0).powi(2) + t * t).sqrt() + 1.0).powf(p - 2.0) * r2
        }
        ConstantKind::C3Min => {
            if r2 >= 1.0 {
                r2.powf(0.5 * p)
            } else {
                r2
            }
        }
    };
    n / d
}

/// Search settings for [`find_constant`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ConstantSettings {
    pub theta_samples: usize,
    /// log10 of the smallest and largest radius.
    pub radius_decades: (f64, f64),
    pub samples_per_decade: usize,
    pub refine_iters: usize,
    pub restarts: usize,
    pub diameter_tol: f64,
}

impl Default for ConstantSettings {
    fn default() -> Self {
        Self {
            theta_samples: 720,
            radius_decades: (-6.0, 6.0),
            samples_per_decade: 40,
            refine_iters: 200,
            restarts: 5,
            diameter_tol: 1e-12,
        }
    }
}

impl ConstantSettings {
    fn validate(&self) -> Result<()> {
        let (lo, hi) = self.radius_decades;
        if self.theta_samples < 8 || self.samples_per_decade < 2 || !(hi > lo) || self.restarts == 0
        {
            return Err(Error::InvalidSettings(format!(
                "constant search settings out of range: {self:?}"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantEstimate {
    pub kind: ConstantKind,
    pub p: f64,
    pub value: f64,
    pub argmin_s: f64,
    pub argmin_t: f64,
    pub grid_resolution: usize,
    pub radius_samples: usize,
    pub refined: bool,
    pub bracket: (f64, f64),
    /// Set when the extremum is a limit (r → 0 or r → ∞) rather than attained.
    pub limit: Option<String>,
}

struct Candidate {
    value: f64,
    s: f64,
    t: f64,
    limit: Option<String>,
}

/// Global polar-grid search plus multistart simplex refinement.
pub fn find_constant(
    kind: CpObjectiveKind,
    settings: &ConstantSettings,
) -> Result<ConstantEstimate> {
    settings.validate()?;
    let CpObjectiveKind { kind: k, p } = kind;
    let sign = if k.maximize() { -1.0 } else { 1.0 };
    let (mut lo, mut hi) = settings.radius_decades;

    let mut grid = polar_grid(kind, settings, lo, hi);
    if k == ConstantKind::C2Sup && grid.best_j + 1 == grid.radii {
        hi += 2.0;
        lo = lo.min(hi);
        grid = polar_grid(kind, settings, lo, hi);
    }

    let branches: Vec<(f64, f64)> = if k == ConstantKind::C3Min {
        vec![(lo, 0.0), (0.0, hi)]
    } else {
        vec![(lo, hi)]
    };

    let mut cands: Vec<Candidate> = Vec::new();
    let mut refined = false;
    for &(blo, bhi) in &branches {
        let starts = grid.best_cells(settings.restarts, |lr| lr >= blo && lr <= bhi);
        for (lr, th) in starts {
            let start_val = sign
                * objective_unchecked(kind, 10f64.powf(lr) * th.cos(), 10f64.powf(lr) * th.sin());
            let ln10 = std::f64::consts::LN_10;
            let (ulo, uhi) = (blo * ln10, bhi * ln10);
            let upper_open = k == ConstantKind::C3Min && bhi == 0.0;
            let f = |x: &[f64]| {
                let mut u = x[0].clamp(ulo, uhi);
                if upper_open && u >= 0.0 {
                    u = -1e-15;
                }
                let r = u.exp();
                sign * objective_unchecked(kind, r * x[1].cos(), r * x[1].sin())
            };
            let res = nelder_mead(
                &f,
                &[lr * ln10, th],
                &[0.05 * ln10, TAU / settings.theta_samples as f64],
                &SimplexSettings {
                    max_iters: settings.refine_iters,
                    diameter_tol: settings.diameter_tol,
                },
            );
            let mut u = res.x[0].clamp(ulo, uhi);
            if upper_open && u >= 0.0 {
                u = -1e-15;
            }
            let r = u.exp();
            if res.value < start_val {
                refined = true;
            }
            cands.push(Candidate {
                value: sign * res.value,
                s: r * res.x[1].cos(),
                t: r * res.x[1].sin(),
                limit: None,
            });
        }
    }
    cands.extend(limit_candidates(kind, lo, hi));

    let best = cands
        .into_iter()
        .reduce(|a, b| {
            if sign * b.value < sign * a.value {
                b
            } else {
                a
            }
        })
        .expect("at least one candidate");
    let grid_best = sign * grid.best_value;
    let half = (grid_best - best.value).abs().max(1e-12);
    Ok(ConstantEstimate {
        kind: k,
        p,
        value: best.value,
        argmin_s: best.s,
        argmin_t: best.t,
        grid_resolution: settings.theta_samples,
        radius_samples: grid.radii,
        refined,
        bracket: (best.value - half, best.value + half),
        limit: best.limit,
    })
}

/// Analytic r → 0 and r → ∞ limits included as candidates.
fn limit_candidates(kind: CpObjectiveKind, lo: f64, hi: f64) -> Vec<Candidate> {
    let p = kind.p;
    let far = 10f64.powf(hi);
    let near = 10f64.powf(lo);
    let at = |value: f64, r: f64, theta: f64, what: &str| Candidate {
        value,
        s: r * theta.cos(),
        t: r * theta.sin(),
        limit: Some(what.to_string()),
    };
    match kind.kind {
        ConstantKind::CpPge2 => {
            let mut v = vec![at(1.0, far, 0.0, "r → ∞")];
            if p == 2.0 {
                v.push(at(1.0, near, 0.0, "r → 0"));
            }
            v
        }
        // Small r: p(1 + (p−2)cos²θ)/2^{p−1}; extremes at cos²θ = 1 and 0.
        ConstantKind::C1Inf => vec![
            at(p * (p - 1.0) / 2f64.powf(p - 1.0), near, 0.0, "r → 0"),
            at(1.0, far, 0.0, "r → ∞"),
        ],
        ConstantKind::C2Sup => vec![
            at(
                p / 2f64.powf(p - 1.0),
                near,
                std::f64::consts::FRAC_PI_2,
                "r → 0",
            ),
            at(1.0, far, 0.0, "r → ∞"),
        ],
        ConstantKind::C3Min => vec![
            at(p * (p - 1.0) / 2.0, near, 0.0, "r → 0"),
            at(1.0, far, 0.0, "r → ∞"),
        ],
    }
}

struct Grid {
    /// Signed values, row-major over (theta, radius); minimized.
    values: Vec<f64>,
    thetas: usize,
    radii: usize,
    lo: f64,
    hi: f64,
    best_value: f64,
    best_j: usize,
}

impl Grid {
    fn log_radius(&self, j: usize) -> f64 {
        self.lo + (self.hi - self.lo) * j as f64 / (self.radii - 1) as f64
    }

    fn theta(&self, i: usize) -> f64 {
        TAU * i as f64 / self.thetas as f64
    }

    /// The `count` best grid cells whose log-radius passes `keep`, best first.
    fn best_cells(&self, count: usize, keep: impl Fn(f64) -> bool) -> Vec<(f64, f64)> {
        let mut idx: Vec<usize> = (0..self.values.len())
            .filter(|&n| keep(self.log_radius(n % self.radii)) && self.values[n].is_finite())
            .collect();
        idx.sort_by(|&a, &b| self.values[a].total_cmp(&self.values[b]).then(a.cmp(&b)));
        idx.into_iter()
            .take(count)
            .map(|n| (self.log_radius(n % self.radii), self.theta(n / self.radii)))
            .collect()
    }
}

fn polar_grid(kind: CpObjectiveKind, settings: &ConstantSettings, lo: f64, hi: f64) -> Grid {
    let sign = if kind.kind.maximize() { -1.0 } else { 1.0 };
    let radii = (settings.samples_per_decade as f64 * (hi - lo)).round() as usize + 1;
    let thetas = settings.theta_samples;
    let values: Vec<f64> = (0..thetas)
        .into_par_iter()
        .flat_map_iter(|i| {
            let th = TAU * i as f64 / thetas as f64;
            let (c, s) = (th.cos(), th.sin());
            (0..radii).map(move |j| {
                let r = 10f64.powf(lo + (hi - lo) * j as f64 / (radii - 1) as f64);
                sign * objective_unchecked(kind, r * c, r * s)
            })
        })
        .collect();
    let (best_n, best_value) = values
        .iter()
        .enumerate()
        .filter(|(_, v)| v.is_finite())
        .fold(
            (0, f64::INFINITY),
            |acc, (n, &v)| if v < acc.1 { (n, v) } else { acc },
        );
    Grid {
        values,
        thetas,
        radii,
        lo,
        hi,
        best_value,
        best_j: best_n % radii,
    }
}

/// c1 ≤ c2 and both inside their stated ranges.
pub fn sandwich_check(p: f64, c1: f64, c2: f64) -> bool {
    let (Ok(k1), Ok(k2)) = (
        CpObjectiveKind::new(ConstantKind::C1Inf, p),
        CpObjectiveKind::new(ConstantKind::C2Sup, p),
    ) else {
        return false;
    };
    c1 <= c2 && k1.in_stated_range(c1) && k2.in_stated_range(c2)
}
