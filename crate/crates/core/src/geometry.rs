//! Baouendi-Grushin geometry on R^m x R^k: the homogeneous distance ρ, the
//! sub-elliptic gradient of ρ, anisotropic dilations and the weighted
//! divergence formula, together with a finite-difference divergence oracle.
//!
//! Points are passed as flat coordinate slices `z = (x_1..x_m, y_1..y_k)`.

use std::ops::Deref;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::report::{CheckRecord, ToRecord};

/// A value of the sub-elliptic gradient: m + k complex entries.
pub type GVector = Vec<Complex64>;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpace", into = "RawSpace")]
pub struct SpaceParams {
    m: usize,
    k: usize,
    gamma: f64,
}

#[derive(Serialize, Deserialize)]
struct RawSpace {
    m: usize,
    k: usize,
    gamma: f64,
}

impl TryFrom<RawSpace> for SpaceParams {
    type Error = Error;
    fn try_from(r: RawSpace) -> Result<Self> {
        SpaceParams::new(r.m, r.k, r.gamma)
    }
}

impl From<SpaceParams> for RawSpace {
    fn from(s: SpaceParams) -> Self {
        RawSpace {
            m: s.m,
            k: s.k,
            gamma: s.gamma,
        }
    }
}

impl SpaceParams {
    pub fn new(m: usize, k: usize, gamma: f64) -> Result<Self> {
        let bad = |reason: &str| Error::InvalidSpace {
            m,
            k,
            gamma,
            reason: reason.to_string(),
        };
        if m == 0 || k == 0 {
            return Err(bad("requires m >= 1 and k >= 1"));
        }
        if !(gamma.is_finite() && gamma >= 0.0) {
            return Err(bad("requires gamma >= 0"));
        }
        Ok(Self { m, k, gamma })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Euclidean dimension m + k.
    pub fn n(&self) -> usize {
        self.m + self.k
    }

    /// Homogeneous dimension Q = m + (1 + γ)k.
    pub fn q(&self) -> f64 {
        self.m as f64 + (1.0 + self.gamma) * self.k as f64
    }

    pub fn split<'a>(&self, z: &'a [f64]) -> (&'a [f64], &'a [f64]) {
        z.split_at(self.m)
    }

    pub fn check_point(&self, z: &[f64]) -> Result<()> {
        if z.len() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                got: z.len(),
            });
        }
        Ok(())
    }
}

impl std::fmt::Display for SpaceParams {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(m={}, k={}, gamma={})", self.m, self.k, self.gamma)
    }
}

/// An owned point z = (x, y). Dereferences to the flat coordinate slice.
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    coords: Vec<f64>,
    m: usize,
}

impl Point {
    pub fn new(x: &[f64], y: &[f64]) -> Self {
        let mut coords = x.to_vec();
        coords.extend_from_slice(y);
        Self { coords, m: x.len() }
    }

    pub fn from_coords(space: &SpaceParams, coords: Vec<f64>) -> Result<Self> {
        space.check_point(&coords)?;
        Ok(Self {
            coords,
            m: space.m(),
        })
    }

    pub fn x(&self) -> &[f64] {
        &self.coords[..self.m]
    }

    pub fn y(&self) -> &[f64] {
        &self.coords[self.m..]
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.coords
    }
}

impl Deref for Point {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.coords
    }
}

pub fn homogeneous_dimension(space: &SpaceParams) -> f64 {
    space.q()
}

pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

/// ρ from the block norms |x| and |y|.
#[inline]
pub fn rho_from_norms(gamma: f64, abs_x: f64, abs_y: f64) -> f64 {
    let a = 1.0 + gamma;
    if gamma == 0.0 {
        return abs_x.hypot(abs_y);
    }
    let s = abs_x.powf(2.0 * a) + a * a * abs_y * abs_y;
    if s == 0.0 {
        0.0
    } else {
        s.powf(0.5 / a)
    }
}

/// ρ(z) = (|x|^{2(1+γ)} + (1+γ)²|y|²)^{1/(2(1+γ))}.
pub fn rho(space: &SpaceParams, z: &[f64]) -> f64 {
    let (x, y) = space.split(z);
    rho_from_norms(space.gamma, norm(x), norm(y))
}

/// ρ_ε: ρ with |x| replaced by (ε² + |x|²)^{1/2}.
pub fn rho_eps(space: &SpaceParams, z: &[f64], eps: f64) -> Result<f64> {
    if !(eps > 0.0) {
        return Err(Error::NonPositive {
            name: "eps",
            value: eps,
        });
    }
    let (x, y) = space.split(z);
    Ok(rho_from_norms(space.gamma, eps.hypot(norm(x)), norm(y)))
}

/// Euclidean partials of ρ written into `out`, given ρ(z) > 0.
///
/// ∂ρ/∂x_i = |x|^{2γ} x_i / ρ^{2γ+1}, ∂ρ/∂y_j = (1+γ) y_j / ρ^{2γ+1}.
#[inline]
pub fn euclid_grad_rho_into(space: &SpaceParams, z: &[f64], rho: f64, out: &mut [f64]) {
    let g = space.gamma;
    let m = space.m;
    let abs_x = norm(&z[..m]);
    let denom = rho.powf(2.0 * g + 1.0);
    let ax = if g == 0.0 { 1.0 } else { abs_x.powf(2.0 * g) };
    for i in 0..m {
        out[i] = ax * z[i] / denom;
    }
    for j in m..z.len() {
        out[j] = (1.0 + g) * z[j] / denom;
    }
}

fn origin_error() -> Error {
    Error::Singular("∇_γρ is undefined at the origin".into())
}

/// ∇_γρ = (|x|^{2γ}x/ρ^{2γ+1}, (1+γ)|x|^γ y/ρ^{2γ+1}); zero on {x = 0} when γ > 0.
pub fn grad_gamma_rho(space: &SpaceParams, z: &[f64]) -> Result<Vec<f64>> {
    space.check_point(z)?;
    let r = rho(space, z);
    if r == 0.0 {
        return Err(origin_error());
    }
    let mut out = vec![0.0; z.len()];
    euclid_grad_rho_into(space, z, r, &mut out);
    let scale = x_power(norm(space.split(z).0), space.gamma);
    for v in &mut out[space.m..] {
        *v *= scale;
    }
    Ok(out)
}

/// |∇_γρ| = |x|^γ / ρ^γ.
pub fn norm_grad_gamma_rho(space: &SpaceParams, z: &[f64]) -> Result<f64> {
    space.check_point(z)?;
    let r = rho(space, z);
    if r == 0.0 {
        return Err(origin_error());
    }
    Ok(x_power(norm(space.split(z).0) / r, space.gamma))
}

/// `t^γ` with the convention 0^0 = 1.
#[inline]
pub(crate) fn x_power(t: f64, gamma: f64) -> f64 {
    if gamma == 0.0 {
        1.0
    } else {
        t.powf(gamma)
    }
}

/// δ_λ(x, y) = (λx, λ^{1+γ}y).
pub fn dilate(space: &SpaceParams, z: &[f64], lambda: f64) -> Result<Point> {
    space.check_point(z)?;
    if !(lambda > 0.0) {
        return Err(Error::NonPositive {
            name: "lambda",
            value: lambda,
        });
    }
    let ly = lambda.powf(1.0 + space.gamma);
    let coords = z
        .iter()
        .enumerate()
        .map(|(i, &c)| if i < space.m { lambda * c } else { ly * c })
        .collect();
    Point::from_coords(space, coords)
}

/// Closed form of ∇_γ·(ρ^c |x|^s ∇_γρ) = (Q + c + s − 1)|x|^{2γ+s} / ρ^{2γ+1−c}.
pub fn div_weighted_rho_closed_form(space: &SpaceParams, z: &[f64], c: f64, s: f64) -> Result<f64> {
    space.check_point(z)?;
    let g = space.gamma;
    let abs_x = norm(space.split(z).0);
    let r = rho(space, z);
    let ex = 2.0 * g + s;
    let er = 2.0 * g + 1.0 - c;
    if abs_x == 0.0 && ex < 0.0 {
        return Err(Error::Singular(format!("|x|^{ex} at x = 0")));
    }
    if r == 0.0 && er > 0.0 {
        return Err(Error::Singular(format!("ρ^-{er} at the origin")));
    }
    Ok((space.q() + c + s - 1.0) * abs_x.powf(ex) / r.powf(er))
}

/// The vector field ρ^c |x|^s ∇_γρ as a closure, for divergence checks.
pub fn weighted_rho_field(space: SpaceParams, c: f64, s: f64) -> impl Fn(&[f64]) -> Vec<f64> {
    move |z: &[f64]| {
        let mut g = grad_gamma_rho(&space, z).unwrap_or_else(|_| vec![0.0; z.len()]);
        let scale = rho(&space, z).powf(c) * norm(space.split(z).0).powf(s);
        for v in &mut g {
            *v *= scale;
        }
        g
    }
}

/// Default finite-difference step h = 1e-4·max(1, |z|).
pub fn default_fd_step(z: &[f64]) -> f64 {
    1e-4 * norm(z).max(1.0)
}

/// Distance-like clearance from the singular set: |x| when γ > 0, else |z|.
pub fn singular_clearance(space: &SpaceParams, z: &[f64]) -> f64 {
    if space.gamma > 0.0 {
        norm(space.split(z).0)
    } else {
        norm(z)
    }
}

/// Central-difference divergence ∇_γ·F = Σ∂_{x_i}F_i + |x|^γ Σ∂_{y_j}F_{m+j},
/// Richardson-extrapolated from steps h and h/2.
pub fn fd_divergence(
    space: &SpaceParams,
    field: &dyn Fn(&[f64]) -> Vec<f64>,
    z: &[f64],
    step: f64,
) -> Result<f64> {
    fd_divergence_with_clearance(space, field, z, step, singular_clearance(space, z))
}

/// As [`fd_divergence`] with a caller-supplied clearance (e.g. distance to ρ = R).
pub fn fd_divergence_with_clearance(
    space: &SpaceParams,
    field: &dyn Fn(&[f64]) -> Vec<f64>,
    z: &[f64],
    step: f64,
    clearance: f64,
) -> Result<f64> {
    space.check_point(z)?;
    if !(step > 0.0) {
        return Err(Error::NonPositive {
            name: "step",
            value: step,
        });
    }
    if step > 0.5 * clearance {
        return Err(Error::StepTooLarge { step, clearance });
    }
    let mut zp = z.to_vec();
    let mut partial = |i: usize, h: f64| {
        zp[i] = z[i] + h;
        let fp = field(&zp)[i];
        zp[i] = z[i] - h;
        let fm = field(&zp)[i];
        zp[i] = z[i];
        (fp - fm) / (2.0 * h)
    };
    let mut sx = 0.0;
    let mut sy = 0.0;
    for i in 0..z.len() {
        let d1 = partial(i, step);
        let d2 = partial(i, 0.5 * step);
        let d = (4.0 * d2 - d1) / 3.0;
        if i < space.m {
            sx += d;
        } else {
            sy += d;
        }
    }
    Ok(sx + x_power(norm(space.split(z).0), space.gamma) * sy)
}

/// Draws a point with ρ = r and |x|/ρ = t from random block directions.
pub fn point_on_sphere(space: &SpaceParams, r: f64, t: f64, rng: &mut impl Rng) -> Vec<f64> {
    let g = space.gamma();
    // |x| = ρ t and (1+γ)|y| = (ρ^{2(1+γ)} − |x|^{2(1+γ)})^{1/2}.
    let ax = r * t;
    let a = 1.0 + g;
    let ay = ((r.powf(2.0 * a) - ax.powf(2.0 * a)).max(0.0)).sqrt() / a;
    let mut z = Vec::with_capacity(space.n());
    for (len, scale) in [(space.m(), ax), (space.k(), ay)] {
        let dir: Vec<f64> = loop {
            let d: Vec<f64> = (0..len).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let nd = norm(&d);
            if nd > 1e-3 && nd <= 1.0 {
                break d.into_iter().map(|c| c / nd).collect();
            }
        };
        z.extend(dir.into_iter().map(|c| c * scale));
    }
    z
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DivergenceReport {
    pub samples: usize,
    /// (c, s) exponents tried.
    pub exponents: Vec<(f64, f64)>,
    pub max_rel_error: f64,
    pub passed: bool,
}

impl ToRecord for DivergenceReport {
    fn to_record(&self, name: &str) -> CheckRecord {
        CheckRecord::new(name, self.passed, self.max_rel_error, 0.0)
            .term("samples", self.samples as f64)
            .term("max_rel_error", self.max_rel_error)
    }
}

/// Exponents used by the default divergence check.
pub const DEFAULT_EXPONENTS: [(f64, f64); 3] = [(0.0, 0.0), (2.0, -0.5), (-1.5, 1.0)];

/// Closed-form divergence of ρ^c|x|^s∇_γρ against finite differences at
/// `samples` random points per exponent pair, ρ ∈ [0.5, 2], |x|/ρ ∈ [0.2, 1).
/// Passes when the largest relative error is at most 1e−6.
pub fn divergence_check(
    space: &SpaceParams,
    exponents: &[(f64, f64)],
    samples: usize,
    seed: u64,
) -> Result<DivergenceReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for &(c, s) in exponents {
        let field = weighted_rho_field(*space, c, s);
        for _ in 0..samples {
            let z = point_on_sphere(
                space,
                rng.gen_range(0.5..2.0),
                rng.gen_range(0.2..1.0),
                &mut rng,
            );
            let exact = div_weighted_rho_closed_form(space, &z, c, s)?;
            let fd = fd_divergence(space, &field, &z, default_fd_step(&z))?;
            worst = worst.max((fd - exact).abs() / exact.abs());
        }
    }
    Ok(DivergenceReport {
        samples,
        exponents: exponents.to_vec(),
        max_rel_error: worst,
        passed: worst <= 1e-6,
    })
}
