//! The pinned `verify --all` suite.
//!
//! Everything runs on (m,k,γ) = (1,1,1) so the suite finishes in seconds;
//! the three-dimensional sweep lives in the acceptance tests.

use grushin_hardy::verifier::{CknParams, HpwCase};
use grushin_hardy::{CubatureSettings, PairId, PairParams};

use crate::config::{CheckKind, FieldConfig, RunConfig, SpaceConfig};

pub const SUITE_SEED: u64 = 20_240_917;

fn base(id: PairId, p: f64, phase_kappa: f64, checks: Vec<CheckKind>) -> RunConfig {
    RunConfig {
        space: SpaceConfig::default(),
        pair: PairParams::default_for(id),
        p,
        field: FieldConfig {
            phase_kappa,
            ..Default::default()
        },
        quadrature: CubatureSettings::default(),
        checks,
        ckn: None,
        hpw_case: None,
        sharpness_levels: 3,
        samples: 200,
        seed: SUITE_SEED,
    }
}

pub fn default_suite() -> Vec<RunConfig> {
    use CheckKind::*;
    let mut v = Vec::new();
    for id in PairId::ALL {
        for p in [1.5, 2.0, 3.0] {
            for kappa in [0.0, 1.0] {
                v.push(base(id, p, kappa, vec![Identity, Inequality]));
            }
        }
        v.push(base(id, 2.0, 0.0, vec![Sharpness, Condition]));
    }
    let mut ckn = base(
        PairId::DambrosioPower,
        2.0,
        1.0,
        vec![RemainderPge2, Ckn, Hpw],
    );
    // α = β = 0 would make w constant and the CKN case trivial.
    ckn.pair = PairParams::DambrosioPower {
        alpha: 1.0,
        beta: 0.5,
    };
    ckn.ckn = Some(CknParams {
        p: 2.0,
        q: 2.0,
        r: 2.0,
        delta: 0.5,
        b: -0.5,
        c: 0.0,
    });
    v.push(ckn);
    for case in [HpwCase::BallNch, HpwCase::LogBall] {
        let id = if case == HpwCase::BallNch {
            PairId::NchBall
        } else {
            PairId::LogBall
        };
        let mut c = base(id, 2.0, 1.0, vec![Hpw]);
        c.hpw_case = Some(case);
        v.push(c);
    }
    v.push(base(PairId::DambrosioPower, 3.0, 0.0, vec![RemainderPge2]));
    v.push(base(PairId::DarcaPower, 4.0, 1.0, vec![RemainderPge2]));
    v.push(base(PairId::DambrosioPower, 1.5, 1.0, vec![RemainderPlt2]));
    v.push(base(PairId::DambrosioPower, 1.25, 0.0, vec![RemainderPlt2]));
    for (m, k, gamma) in [(1, 1, 1.0), (2, 1, 0.0), (1, 1, 2.0)] {
        let mut c = base(PairId::DambrosioPower, 2.0, 0.0, vec![Divergence]);
        c.space = SpaceConfig { m, k, gamma };
        c.samples = 100;
        v.push(c);
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_validates() {
        let s = default_suite();
        assert_eq!(s.len(), 4 * 7 + 1 + 2 + 4 + 3);
        for c in &s {
            c.validate().unwrap();
        }
    }
}
