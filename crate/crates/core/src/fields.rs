//! Compactly supported complex test fields with exact first derivatives.
//!
//! Every family is a function of (ρ, |x|) only, so the Euclidean gradient is
//! assembled from two scalar partials by the chain rule.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{self, norm, x_power, GVector, SpaceParams};
use crate::weights::{PairParams, WeightPair};

/// C² quintic smoothstep 6u⁵ − 15u⁴ + 10u³ and its derivative, clamped to [0, 1].
#[inline]
pub fn smoothstep(u: f64) -> (f64, f64) {
    if u <= 0.0 {
        (0.0, 0.0)
    } else if u >= 1.0 {
        (1.0, 0.0)
    } else {
        let u2 = u * u;
        (
            u2 * u * (10.0 - 15.0 * u + 6.0 * u2),
            30.0 * u2 * (1.0 - u) * (1.0 - u),
        )
    }
}

/// Smooth rise from 0 at `a` to 1 at `b`; returns value and derivative in t.
#[inline]
fn rise(t: f64, a: f64, b: f64) -> (f64, f64) {
    let w = b - a;
    let (s, ds) = smoothstep((t - a) / w);
    (s, ds / w)
}

/// Ramp sin(π/2·S(u)) used by extremal windows; C² at both ends.
#[inline]
fn sine_ramp(u: f64) -> (f64, f64) {
    let (s, ds) = smoothstep(u);
    let a = FRAC_PI_2 * s;
    (a.sin(), a.cos() * FRAC_PI_2 * ds)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldFamily {
    BumpRadial,
    BumpRadialXCutoff,
    PhaseTwisted,
    ExtremalTruncated,
}

/// Parameters of a bump-type test field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TestFieldSpec {
    pub family: FieldFamily,
    pub inner_rho: f64,
    pub outer_rho: f64,
    /// Inner |x| cutoff; the field vanishes for |x| ≤ x_floor and the cutoff
    /// reaches 1 at |x| = 2·x_floor. Zero disables it.
    pub x_floor: f64,
    pub smoothness_margin: f64,
    pub phase_kappa: f64,
    /// Ball radius when the field must live inside B_R.
    pub r_ball: Option<f64>,
}

impl Default for TestFieldSpec {
    fn default() -> Self {
        Self {
            family: FieldFamily::BumpRadial,
            inner_rho: 0.5,
            outer_rho: 2.0,
            x_floor: 0.0,
            smoothness_margin: 0.25,
            phase_kappa: 0.0,
            r_ball: None,
        }
    }
}

impl TestFieldSpec {
    /// Default annulus with the |x| floor 0.25·inner_rho switched on when needed.
    pub fn for_pair(pair: &WeightPair, phase_kappa: f64) -> Self {
        let mut spec = Self::default();
        if pair.singular_set().x_axis {
            spec.x_floor = 0.25 * spec.inner_rho;
        }
        spec.r_ball = pair.ball_radius();
        spec.phase_kappa = phase_kappa;
        spec.family = if phase_kappa != 0.0 {
            FieldFamily::PhaseTwisted
        } else if spec.x_floor > 0.0 {
            FieldFamily::BumpRadialXCutoff
        } else {
            FieldFamily::BumpRadial
        };
        spec
    }
}

/// Value and raw Euclidean partials of a field at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldValue {
    pub value: Complex64,
    pub euclid_grad: GVector,
}

/// Region where a field may be nonzero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Support {
    pub inner_rho: f64,
    pub outer_rho: f64,
    /// Absolute |x| floor (0 when none).
    pub x_floor: f64,
    /// Breakpoints in |x| where the field has a transition kink.
    pub x_breaks: [f64; 2],
    /// Lower bound on |x|/ρ over the support (0 when none).
    pub x_over_rho_floor: f64,
}

/// A scalar complex field on R^{m+k} with exact Euclidean gradient.
pub trait ScalarField: Send + Sync {
    fn space(&self) -> &SpaceParams;

    /// Writes ∂f/∂z into `grad` (length m + k) and returns f(z).
    fn eval_into(&self, z: &[f64], grad: &mut [Complex64]) -> Complex64;

    fn support(&self) -> Support;

    fn eval(&self, z: &[f64]) -> FieldValue {
        let mut g = vec![Complex64::new(0.0, 0.0); z.len()];
        let value = self.eval_into(z, &mut g);
        FieldValue {
            value,
            euclid_grad: g,
        }
    }
}

/// Writes F_ρ ∇ρ + F_{|x|} x/|x| into `grad`.
#[inline]
fn assemble_grad(
    space: &SpaceParams,
    z: &[f64],
    rho: f64,
    abs_x: f64,
    d_rho: Complex64,
    d_ax: Complex64,
    grad: &mut [Complex64],
) {
    let g = space.gamma();
    let m = space.m();
    let denom = rho.powf(2.0 * g + 1.0);
    let cx = x_power(abs_x, 2.0 * g) / denom;
    let cy = (1.0 + g) / denom;
    for i in 0..z.len() {
        grad[i] = if i < m {
            let mut v = d_rho * (cx * z[i]);
            if abs_x > 0.0 {
                v += d_ax * (z[i] / abs_x);
            }
            v
        } else {
            d_rho * (cy * z[i])
        };
    }
}

fn zero_grad(grad: &mut [Complex64]) -> Complex64 {
    grad.iter_mut().for_each(|g| *g = Complex64::new(0.0, 0.0));
    Complex64::new(0.0, 0.0)
}

/// Bump families: B(ρ)·X(|x|)·e^{iκρ}.
#[derive(Debug, Clone, PartialEq)]
pub struct TestField {
    space: SpaceParams,
    spec: TestFieldSpec,
    band: f64,
}

pub fn build_test_field(space: &SpaceParams, spec: &TestFieldSpec) -> Result<TestField> {
    let bad = |msg: String| Err(Error::InvalidField(msg));
    if !(spec.inner_rho > 0.0 && spec.outer_rho > spec.inner_rho) {
        return bad(format!(
            "requires 0 < inner_rho < outer_rho (got {}, {})",
            spec.inner_rho, spec.outer_rho
        ));
    }
    if !(spec.smoothness_margin > 0.0 && spec.smoothness_margin < 0.5) {
        return bad(format!(
            "smoothness_margin must lie in (0, 0.5), got {}",
            spec.smoothness_margin
        ));
    }
    if !(spec.x_floor >= 0.0) || 2.0 * spec.x_floor >= spec.outer_rho {
        return bad(format!(
            "x_floor must satisfy 0 <= 2·x_floor < outer_rho, got {}",
            spec.x_floor
        ));
    }
    if let Some(r) = spec.r_ball {
        if spec.outer_rho >= r {
            return bad(format!(
                "requires outer_rho < R (got {} >= {r})",
                spec.outer_rho
            ));
        }
    }
    match spec.family {
        FieldFamily::BumpRadial if spec.x_floor > 0.0 => {
            return bad("bump_radial takes no x_floor; use bump_radial_x_cutoff".into())
        }
        FieldFamily::BumpRadialXCutoff if spec.x_floor == 0.0 => {
            return bad("bump_radial_x_cutoff requires x_floor > 0".into())
        }
        FieldFamily::ExtremalTruncated => {
            return bad("extremal fields are built by build_extremal_field".into())
        }
        _ => {}
    }
    Ok(TestField {
        space: *space,
        spec: spec.clone(),
        band: spec.smoothness_margin * (spec.outer_rho - spec.inner_rho),
    })
}

impl TestField {
    pub fn spec(&self) -> &TestFieldSpec {
        &self.spec
    }

    /// Profile value and partials (∂/∂ρ, ∂/∂|x|) as functions of (ρ, |x|).
    #[inline]
    pub fn profile(&self, rho: f64, abs_x: f64) -> (Complex64, Complex64, Complex64) {
        let s = &self.spec;
        let zero = Complex64::new(0.0, 0.0);
        if rho <= s.inner_rho || rho >= s.outer_rho || abs_x <= s.x_floor {
            return (zero, zero, zero);
        }
        let (r1, dr1) = rise(rho, s.inner_rho, s.inner_rho + self.band);
        let (r2, dr2) = rise(rho, s.outer_rho - self.band, s.outer_rho);
        let b = r1 * (1.0 - r2);
        let db = dr1 * (1.0 - r2) - r1 * dr2;
        let (x, dx) = if s.x_floor > 0.0 {
            rise(abs_x, s.x_floor, 2.0 * s.x_floor)
        } else {
            (1.0, 0.0)
        };
        let ph = Complex64::from_polar(1.0, s.phase_kappa * rho);
        let v = ph * (b * x);
        let d_rho = ph * (db * x) + v * Complex64::new(0.0, s.phase_kappa);
        let d_ax = ph * (b * dx);
        (v, d_rho, d_ax)
    }
}

impl ScalarField for TestField {
    fn space(&self) -> &SpaceParams {
        &self.space
    }

    fn eval_into(&self, z: &[f64], grad: &mut [Complex64]) -> Complex64 {
        let (x, y) = self.space.split(z);
        let abs_x = norm(x);
        let rho = geometry::rho_from_norms(self.space.gamma(), abs_x, norm(y));
        let (v, d_rho, d_ax) = self.profile(rho, abs_x);
        if v == Complex64::new(0.0, 0.0) && d_rho == v && d_ax == v {
            return zero_grad(grad);
        }
        assemble_grad(&self.space, z, rho, abs_x, d_rho, d_ax, grad);
        v
    }

    fn support(&self) -> Support {
        let f = self.spec.x_floor;
        Support {
            inner_rho: self.spec.inner_rho,
            outer_rho: self.spec.outer_rho,
            x_floor: f,
            x_breaks: [f, 2.0 * f],
            x_over_rho_floor: 0.0,
        }
    }
}

/// (∂_x f, |x|^γ ∂_y f).
pub fn grad_gamma(space: &SpaceParams, fv: &FieldValue, z: &[f64]) -> GVector {
    let s = x_power(norm(space.split(z).0), space.gamma());
    fv.euclid_grad
        .iter()
        .enumerate()
        .map(|(i, g)| if i < space.m() { *g } else { g * s })
        .collect()
}

/// D f = (∇_γρ·∇_γf)/|∇_γρ| from the Euclidean gradient, written as
/// |x|^γ ρ^{−γ−1} (x·∂_x f + (1+γ) y·∂_y f).
#[inline]
pub fn radial_derivative_from_grad(
    space: &SpaceParams,
    z: &[f64],
    rho: f64,
    abs_x: f64,
    grad: &[Complex64],
) -> Complex64 {
    let g = space.gamma();
    let m = space.m();
    let mut zx = Complex64::new(0.0, 0.0);
    let mut zy = Complex64::new(0.0, 0.0);
    for i in 0..m {
        zx += grad[i] * z[i];
    }
    for j in m..z.len() {
        zy += grad[j] * z[j];
    }
    let euler = zx + zy * (1.0 + g);
    euler * (x_power(abs_x / rho, g) / rho)
}

/// D f = (∇_γρ·∇_γf)/|∇_γρ|; undefined at the origin and, for γ > 0, on {x = 0}.
pub fn radial_derivative(
    space: &SpaceParams,
    field: &dyn ScalarField,
    z: &[f64],
) -> Result<Complex64> {
    space.check_point(z)?;
    let abs_x = norm(space.split(z).0);
    let rho = geometry::rho(space, z);
    if rho == 0.0 {
        return Err(Error::Singular("D f is undefined at the origin".into()));
    }
    if space.gamma() > 0.0 && abs_x == 0.0 {
        return Err(Error::Singular(
            "D f is undefined on {x = 0} for γ > 0".into(),
        ));
    }
    let fv = field.eval(z);
    Ok(radial_derivative_from_grad(
        space,
        z,
        rho,
        abs_x,
        &fv.euclid_grad,
    ))
}

/// Radial variable in which an extremal profile decays like e^{−κτ}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Profile {
    /// h = ρ^e, τ = ln ρ.
    Power,
    /// h = (R − ρ)^e, τ = ln(R/(R − ρ)).
    BoundaryGap { r: f64 },
    /// h = (log R/ρ)^e, τ = −ln log(R/ρ).
    Log { r: f64 },
}

impl Profile {
    /// ρ at log-variable τ.
    pub fn rho_at(&self, tau: f64) -> f64 {
        match *self {
            Profile::Power => tau.exp(),
            Profile::BoundaryGap { r } => -r * (-tau).exp_m1(),
            Profile::Log { r } => r * (-(-tau).exp()).exp(),
        }
    }

    /// R − ρ at log-variable τ (infinite for whole-space profiles).
    pub fn gap_at(&self, tau: f64) -> f64 {
        match *self {
            Profile::Power => f64::INFINITY,
            Profile::BoundaryGap { r } => r * (-tau).exp(),
            Profile::Log { r } => -r * (-(-tau).exp()).exp_m1(),
        }
    }

    /// dρ/dτ.
    pub fn drho_dtau(&self, tau: f64) -> f64 {
        match *self {
            Profile::Power => tau.exp(),
            Profile::BoundaryGap { r } => r * (-tau).exp(),
            Profile::Log { .. } => {
                let l = (-tau).exp();
                self.rho_at(tau) * l
            }
        }
    }
}

/// Ball-aware radial data: ρ and the boundary gap R − ρ kept separately so
/// that points very close to ρ = R keep full relative precision.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialPoint {
    pub rho: f64,
    pub gap: f64,
}

/// Extremal profile h times a C² window in the log variable τ, times an
/// angular cutoff A(|x|/ρ) when the space needs one.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtremalField {
    space: SpaceParams,
    profile: Profile,
    exponent: f64,
    tau_start: f64,
    tau_end: f64,
    ramp_fraction: f64,
    angular_floor: f64,
}

/// Log-width of the level-0 window times κ.
pub const EXTREMAL_BASE_WIDTH: f64 = 5.0;
/// Fraction of the window used by each ramp.
pub const EXTREMAL_RAMP_FRACTION: f64 = 0.4;
/// Angular floor for |x|/ρ when γ > 0.
pub const EXTREMAL_ANGULAR_FLOOR: f64 = 0.125;

/// Truncated extremal for a weight pair. The window's log-width is
/// (5/κ)·2^level, so each level squares the radial aspect ratio.
pub fn build_extremal_field(pair: &WeightPair, level: u32) -> Result<ExtremalField> {
    let kappa = pair.kappa();
    if !(kappa > 0.0) {
        return Err(Error::InvalidField(format!(
            "extremal window needs κ > 0, got {kappa}"
        )));
    }
    if level > 12 {
        return Err(Error::InvalidField(format!(
            "truncation level {level} too large"
        )));
    }
    let width = EXTREMAL_BASE_WIDTH / kappa * f64::from(1u32 << level);
    let (profile, exponent, tau_start) = match *pair.params() {
        PairParams::DambrosioPower { .. } => (Profile::Power, -kappa, -0.5 * width),
        PairParams::DarcaPower { r, .. } => (Profile::Power, -kappa, (0.5 * r).ln() - width),
        PairParams::NchBall { r } => (Profile::BoundaryGap { r }, kappa, std::f64::consts::LN_2),
        PairParams::LogBall { r, .. } => (Profile::Log { r }, kappa, -2.0),
    };
    let space = *pair.space();
    Ok(ExtremalField {
        space,
        profile,
        exponent,
        tau_start,
        tau_end: tau_start + width,
        ramp_fraction: EXTREMAL_RAMP_FRACTION,
        angular_floor: if space.gamma() > 0.0 {
            EXTREMAL_ANGULAR_FLOOR
        } else {
            0.0
        },
    })
}

impl ExtremalField {
    pub fn profile_kind(&self) -> Profile {
        self.profile
    }

    pub fn exponent(&self) -> f64 {
        self.exponent
    }

    pub fn tau_range(&self) -> (f64, f64) {
        (self.tau_start, self.tau_end)
    }

    /// τ-breakpoints of the window: support ends and plateau ends.
    pub fn tau_breaks(&self) -> [f64; 4] {
        let a = self.ramp_fraction * (self.tau_end - self.tau_start);
        [
            self.tau_start,
            self.tau_start + a,
            self.tau_end - a,
            self.tau_end,
        ]
    }

    pub fn angular_floor(&self) -> f64 {
        self.angular_floor
    }

    /// Breakpoints of A in t = |x|/ρ (empty when no cutoff).
    pub fn angular_breaks(&self) -> Option<[f64; 2]> {
        (self.angular_floor > 0.0).then_some([self.angular_floor, 2.0 * self.angular_floor])
    }

    /// A(t) and A'(t), t = |x|/ρ.
    #[inline]
    pub fn angular_factor(&self, t: f64) -> (f64, f64) {
        if self.angular_floor > 0.0 {
            rise(t, self.angular_floor, 2.0 * self.angular_floor)
        } else {
            (1.0, 0.0)
        }
    }

    /// Window χ(τ) and χ'(τ).
    #[inline]
    pub fn window(&self, tau: f64) -> (f64, f64) {
        let w = self.tau_end - self.tau_start;
        let a = self.ramp_fraction * w;
        if tau <= self.tau_start || tau >= self.tau_end {
            (0.0, 0.0)
        } else if tau < self.tau_start + a {
            let (r, dr) = sine_ramp((tau - self.tau_start) / a);
            (r, dr / a)
        } else if tau > self.tau_end - a {
            let (r, dr) = sine_ramp((self.tau_end - tau) / a);
            (r, -dr / a)
        } else {
            (1.0, 0.0)
        }
    }

    /// τ and dτ/dρ at a radial point.
    #[inline]
    pub fn tau_of(&self, p: RadialPoint) -> (f64, f64) {
        match self.profile {
            Profile::Power => (p.rho.ln(), 1.0 / p.rho),
            Profile::BoundaryGap { r } => ((r / p.gap).ln(), 1.0 / p.gap),
            Profile::Log { .. } => {
                let l = log_ratio(p);
                (-l.ln(), 1.0 / (p.rho * l))
            }
        }
    }

    /// Radial factor H(ρ) = P(ρ)·χ(τ(ρ)) and dH/dρ.
    pub fn radial(&self, p: RadialPoint) -> (f64, f64) {
        let (tau, dtau) = self.tau_of(p);
        let (chi, dchi) = self.window(tau);
        if chi == 0.0 && dchi == 0.0 {
            return (0.0, 0.0);
        }
        let e = self.exponent;
        let (base, dbase) = match self.profile {
            Profile::Power => (p.rho, 1.0),
            Profile::BoundaryGap { .. } => (p.gap, -1.0),
            Profile::Log { .. } => (log_ratio(p), -1.0 / p.rho),
        };
        let pw = base.powf(e);
        let dpw = e * pw / base * dbase;
        (pw * chi, dpw * chi + pw * dchi * dtau)
    }

    /// Radial data of a Cartesian point for this field's profile.
    pub fn radial_point(&self, rho: f64) -> RadialPoint {
        let gap = match self.profile {
            Profile::Power => f64::INFINITY,
            Profile::BoundaryGap { r } | Profile::Log { r } => r - rho,
        };
        RadialPoint { rho, gap }
    }
}

/// log(R/ρ) computed from the gap for accuracy near the boundary.
#[inline]
pub fn log_ratio(p: RadialPoint) -> f64 {
    let r = p.rho + p.gap;
    -(-p.gap / r).ln_1p()
}

impl ScalarField for ExtremalField {
    fn space(&self) -> &SpaceParams {
        &self.space
    }

    fn eval_into(&self, z: &[f64], grad: &mut [Complex64]) -> Complex64 {
        let (x, y) = self.space.split(z);
        let abs_x = norm(x);
        let rho = geometry::rho_from_norms(self.space.gamma(), abs_x, norm(y));
        if rho == 0.0 {
            return zero_grad(grad);
        }
        let p = self.radial_point(rho);
        if !(p.gap > 0.0) {
            return zero_grad(grad);
        }
        let t = abs_x / rho;
        let (a, da) = self.angular_factor(t);
        let (h, dh) = self.radial(p);
        if a == 0.0 || (h == 0.0 && dh == 0.0) {
            return zero_grad(grad);
        }
        // A(|x|/ρ): ∂/∂ρ = −A'·t/ρ, ∂/∂|x| = A'/ρ.
        let d_rho = dh * a - h * da * t / rho;
        let d_ax = h * da / rho;
        assemble_grad(
            &self.space,
            z,
            rho,
            abs_x,
            Complex64::new(d_rho, 0.0),
            Complex64::new(d_ax, 0.0),
            grad,
        );
        Complex64::new(h * a, 0.0)
    }

    fn support(&self) -> Support {
        let inner = self.profile.rho_at(self.tau_start);
        let outer = self.profile.rho_at(self.tau_end);
        Support {
            inner_rho: inner,
            outer_rho: outer,
            x_floor: 0.0,
            x_breaks: [0.0, 0.0],
            x_over_rho_floor: self.angular_floor,
        }
    }
}
