//! Run configuration as read from TOML.

use grushin_hardy::fields::build_extremal_field;
use grushin_hardy::fields::{build_test_field, ScalarField};
use grushin_hardy::verifier::{check_compatible, CknParams, HpwCase};
use grushin_hardy::weights::make_pair;
use grushin_hardy::{
    CubatureSettings, FieldFamily, PairId, PairParams, SpaceParams, TestFieldSpec, VerifySettings,
    WeightPair,
};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceConfig {
    pub m: usize,
    pub k: usize,
    pub gamma: f64,
}

impl Default for SpaceConfig {
    fn default() -> Self {
        Self {
            m: 1,
            k: 1,
            gamma: 1.0,
        }
    }
}

impl SpaceConfig {
    pub fn params(&self) -> Result<SpaceParams, CliError> {
        Ok(SpaceParams::new(self.m, self.k, self.gamma)?)
    }

    pub fn label(&self) -> String {
        format!("({},{},{})", self.m, self.k, self.gamma)
    }
}

/// Field section. Unset `family` and `x_floor` follow the pair: an |x| floor
/// of 0.25·inner_rho when the pair is singular on {x = 0}, and the phase
/// twist when `phase_kappa` ≠ 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FieldConfig {
    pub family: Option<FieldFamily>,
    pub inner_rho: f64,
    pub outer_rho: f64,
    pub x_floor: Option<f64>,
    pub smoothness_margin: f64,
    pub phase_kappa: f64,
    pub truncation_level: u32,
}

impl Default for FieldConfig {
    fn default() -> Self {
        let s = TestFieldSpec::default();
        Self {
            family: None,
            inner_rho: s.inner_rho,
            outer_rho: s.outer_rho,
            x_floor: None,
            smoothness_margin: s.smoothness_margin,
            phase_kappa: 0.0,
            truncation_level: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    Identity,
    Inequality,
    RemainderPge2,
    RemainderPlt2,
    Sharpness,
    Ckn,
    Hpw,
    Divergence,
    Condition,
}

impl CheckKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            CheckKind::Identity => "identity",
            CheckKind::Inequality => "inequality",
            CheckKind::RemainderPge2 => "remainder_pge2",
            CheckKind::RemainderPlt2 => "remainder_plt2",
            CheckKind::Sharpness => "sharpness",
            CheckKind::Ckn => "ckn",
            CheckKind::Hpw => "hpw",
            CheckKind::Divergence => "divergence",
            CheckKind::Condition => "condition",
        }
    }

    /// Checks that integrate over the configured field.
    fn uses_field(&self) -> bool {
        matches!(
            self,
            CheckKind::Identity
                | CheckKind::Inequality
                | CheckKind::RemainderPge2
                | CheckKind::RemainderPlt2
                | CheckKind::Ckn
        )
    }
}

fn default_levels() -> u32 {
    3
}

fn default_samples() -> usize {
    100
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub space: SpaceConfig,
    pub pair: PairParams,
    pub p: f64,
    #[serde(default)]
    pub field: FieldConfig,
    #[serde(default)]
    pub quadrature: CubatureSettings,
    #[serde(default)]
    pub checks: Vec<CheckKind>,
    #[serde(default)]
    pub ckn: Option<CknParams>,
    /// HPW case; unset picks the case matching the pair.
    #[serde(default)]
    pub hpw_case: Option<HpwCase>,
    #[serde(default = "default_levels")]
    pub sharpness_levels: u32,
    /// Sample count for the divergence and condition checks.
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub seed: u64,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Invalid(format!("config: {}", e.message())))
    }

    pub fn verify_settings(&self) -> VerifySettings {
        VerifySettings {
            quadrature: self.quadrature.clone(),
            ..Default::default()
        }
    }

    pub fn pair(&self) -> Result<WeightPair, CliError> {
        Ok(make_pair(
            self.pair.id(),
            self.space.params()?,
            self.p,
            self.pair,
        )?)
    }

    pub fn field_spec(&self, pair: &WeightPair) -> TestFieldSpec {
        let f = &self.field;
        let mut spec = TestFieldSpec {
            inner_rho: f.inner_rho,
            outer_rho: f.outer_rho,
            smoothness_margin: f.smoothness_margin,
            phase_kappa: f.phase_kappa,
            r_ball: pair.ball_radius(),
            ..Default::default()
        };
        spec.x_floor = f.x_floor.unwrap_or(if pair.singular_set().x_axis {
            0.25 * f.inner_rho
        } else {
            0.0
        });
        spec.family = f.family.unwrap_or(if f.phase_kappa != 0.0 {
            FieldFamily::PhaseTwisted
        } else if spec.x_floor > 0.0 {
            FieldFamily::BumpRadialXCutoff
        } else {
            FieldFamily::BumpRadial
        });
        spec
    }

    pub fn field(&self, pair: &WeightPair) -> Result<Box<dyn ScalarField>, CliError> {
        let spec = self.field_spec(pair);
        Ok(if spec.family == FieldFamily::ExtremalTruncated {
            Box::new(build_extremal_field(pair, self.field.truncation_level)?)
        } else {
            Box::new(build_test_field(pair.space(), &spec)?)
        })
    }

    pub fn hpw_case(&self) -> Result<HpwCase, CliError> {
        if let Some(c) = self.hpw_case {
            return Ok(c);
        }
        match self.pair.id() {
            PairId::NchBall => Ok(HpwCase::BallNch),
            PairId::DambrosioPower => Ok(HpwCase::WholeDambrosio),
            PairId::LogBall => Ok(HpwCase::LogBall),
            PairId::DarcaPower => Err(CliError::Invalid(
                "hpw needs hpw_case for darca_power (no matching case)".into(),
            )),
        }
    }

    /// Checks every precondition of the requested checks before any
    /// integration starts.
    pub fn validate(&self) -> Result<(), CliError> {
        let pair = self.pair()?;
        if self.checks.iter().any(CheckKind::uses_field) {
            let field = self.field(&pair)?;
            check_compatible(&pair, field.as_ref())?;
        }
        let p = self.p;
        for c in &self.checks {
            match c {
                CheckKind::RemainderPge2 | CheckKind::RemainderPlt2 if !pair.phi_is_zero() => {
                    return Err(CliError::Invalid(format!(
                        "{} requires a pair with φ = 0, {} has φ ≠ 0",
                        c.as_str(),
                        pair.id()
                    )))
                }
                CheckKind::RemainderPge2 if p < 2.0 => {
                    return Err(CliError::Invalid(format!(
                        "remainder_pge2 requires p ≥ 2, got {p}"
                    )))
                }
                CheckKind::RemainderPlt2 if p >= 2.0 => {
                    return Err(CliError::Invalid(format!(
                        "remainder_plt2 requires 1 < p < 2, got {p}"
                    )))
                }
                CheckKind::Sharpness if self.sharpness_levels < 2 => {
                    return Err(CliError::Invalid(format!(
                        "sharpness requires sharpness_levels ≥ 2, got {}",
                        self.sharpness_levels
                    )))
                }
                CheckKind::Ckn => {
                    let ckn = self.ckn.ok_or_else(|| {
                        CliError::Invalid("ckn check requires a [ckn] section".into())
                    })?;
                    ckn.validate()?;
                    if ckn.p != p {
                        return Err(CliError::Invalid(format!(
                            "ckn requires ckn.p = p ({} ≠ {p})",
                            ckn.p
                        )));
                    }
                }
                CheckKind::Hpw => {
                    let case = self.hpw_case()?;
                    let hp = case.pair(self.space.params()?, p)?;
                    let field = self.field(&hp)?;
                    check_compatible(&hp, field.as_ref())?;
                }
                CheckKind::Divergence | CheckKind::Condition if self.samples == 0 => {
                    return Err(CliError::Invalid("requires samples > 0".into()))
                }
                _ => {}
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
p = 2.0
checks = ["identity"]
[pair]
id = "dambrosio_power"
alpha = 0.0
beta = 0.0
"#;

    #[test]
    fn minimal_config_fills_defaults() {
        let c = RunConfig::from_toml(MINIMAL).unwrap();
        assert_eq!(c.space, SpaceConfig::default());
        assert_eq!(c.sharpness_levels, 3);
        assert_eq!(c.quadrature, CubatureSettings::default());
        c.validate().unwrap();
        let pr = c.pair().unwrap();
        let spec = c.field_spec(&pr);
        assert_eq!(spec.family, FieldFamily::BumpRadialXCutoff);
        assert_eq!(spec.x_floor, 0.125);
    }

    #[test]
    fn toml_round_trip() {
        let c = RunConfig::from_toml(MINIMAL).unwrap();
        let text = toml::to_string(&c).unwrap();
        assert_eq!(RunConfig::from_toml(&text).unwrap(), c);
    }

    #[test]
    fn unknown_keys_rejected() {
        let e = RunConfig::from_toml(&format!("{MINIMAL}\n[field]\nradius = 1.0\n")).unwrap_err();
        assert!(e.to_string().contains("radius"), "{e}");
    }

    #[test]
    fn preconditions_checked_up_front() {
        let mut c = RunConfig::from_toml(MINIMAL).unwrap();
        c.checks = vec![CheckKind::RemainderPlt2];
        assert!(c.validate().unwrap_err().to_string().contains("1 < p < 2"));
        c.checks = vec![CheckKind::Ckn];
        assert!(c.validate().unwrap_err().to_string().contains("[ckn]"));
        c.checks = vec![CheckKind::Identity];
        c.field.outer_rho = 0.4;
        assert!(c.validate().is_err());
    }
}
