//! Executes the checks of a [`RunConfig`].

use std::time::Instant;

use grushin_hardy::geometry::{divergence_check, DEFAULT_EXPONENTS};
use grushin_hardy::verifier::{
    sharpness_probe, verify_ckn, verify_hpw, verify_identity, verify_inequality,
    verify_remainder_p_ge2, verify_remainder_p_lt2,
};
use grushin_hardy::weights::condition_report;
use grushin_hardy::{CheckRecord, ToRecord};

use crate::config::{CheckKind, RunConfig};
use crate::report::{ConfigEcho, VerificationReport};
use crate::CliError;

/// Runs the checks in declared order. Everything is validated first, so a
/// bad config fails before any integration.
pub fn run_checks(config: &RunConfig) -> Result<Vec<CheckRecord>, CliError> {
    config.validate()?;
    let pair = config.pair()?;
    let settings = config.verify_settings();
    let space = config.space.params()?;
    let p = config.p;
    let field = if config
        .checks
        .iter()
        .any(|c| !matches!(c, CheckKind::Divergence))
    {
        Some(config.field(&pair)?)
    } else {
        None
    };
    let family = config.field_spec(&pair).family;
    let family = serde_json::to_value(family)?;
    let tag = |c: CheckKind| {
        format!(
            "{}/{}/p={p}/{}/{}",
            c.as_str(),
            pair.id(),
            config.space.label(),
            family.as_str().unwrap_or("field")
        )
    };
    let mut out = Vec::with_capacity(config.checks.len());
    for &c in &config.checks {
        let f = || field.as_deref().expect("field built for field checks");
        let rec = match c {
            CheckKind::Identity => verify_identity(&pair, f(), &settings)?.to_record(&tag(c)),
            CheckKind::Inequality => verify_inequality(&pair, f(), &settings)?.to_record(&tag(c)),
            CheckKind::RemainderPge2 => {
                verify_remainder_p_ge2(&pair, f(), &settings)?.to_record(&tag(c))
            }
            CheckKind::RemainderPlt2 => {
                verify_remainder_p_lt2(&pair, f(), &settings)?.to_record(&tag(c))
            }
            CheckKind::Ckn => {
                let ckn = config.ckn.expect("validated");
                verify_ckn(&pair, f(), &ckn, &settings)?.to_record(&format!(
                    "{}/delta={}",
                    tag(c),
                    ckn.delta
                ))
            }
            CheckKind::Hpw => {
                let case = config.hpw_case()?;
                let hp = case.pair(space, p)?;
                let hf = config.field(&hp)?;
                verify_hpw(case, space, p, hf.as_ref(), &settings)?.to_record(&format!(
                    "hpw/{}/p={p}/{}",
                    case.as_str(),
                    config.space.label()
                ))
            }
            CheckKind::Sharpness => {
                sharpness_probe(&pair, config.sharpness_levels, &config.quadrature)?.to_record(
                    &format!(
                        "sharpness/{}/p={p}/{}/levels={}",
                        pair.id(),
                        config.space.label(),
                        config.sharpness_levels
                    ),
                )
            }
            CheckKind::Divergence => {
                divergence_check(&space, &DEFAULT_EXPONENTS, config.samples, config.seed)?
                    .to_record(&format!("divergence/{}", config.space.label()))
            }
            CheckKind::Condition => condition_report(&pair, config.samples, config.seed)?
                .to_record(&format!(
                    "condition/{}/p={p}/{}",
                    pair.id(),
                    config.space.label()
                )),
        };
        out.push(rec);
    }
    Ok(out)
}

pub fn run(config: &RunConfig) -> Result<VerificationReport, CliError> {
    let t0 = Instant::now();
    let checks = run_checks(config)?;
    Ok(VerificationReport::new(
        ConfigEcho::Single(Box::new(config.clone())),
        checks,
        t0.elapsed().as_secs_f64(),
    ))
}

/// Runs several configs into one report; all are validated before any runs.
pub fn run_suite(configs: &[RunConfig]) -> Result<VerificationReport, CliError> {
    let t0 = Instant::now();
    for c in configs {
        c.validate()?;
    }
    let mut checks = Vec::new();
    for c in configs {
        checks.extend(run_checks(c)?);
    }
    Ok(VerificationReport::new(
        ConfigEcho::Suite(configs.to_vec()),
        checks,
        t0.elapsed().as_secs_f64(),
    ))
}
