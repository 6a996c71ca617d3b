//! Numerical verification of weighted L^p Hardy identities for the
//! Baouendi–Grushin operator.

pub mod cp;
pub mod cubature;
pub mod error;
pub mod fields;
pub mod geometry;
pub mod report;
pub(crate) mod simplex;
pub mod verifier;
pub mod weights;

pub use cp::{ConstantEstimate, ConstantKind, ConstantSettings, CpObjectiveKind};
pub use cubature::{CubatureSettings, Region, RuleChoice};
pub use error::{Error, Result};
pub use fields::{FieldFamily, ScalarField, TestField, TestFieldSpec};
pub use geometry::{Point, SpaceParams};
pub use report::{CheckRecord, ToRecord};
pub use verifier::VerifySettings;
pub use weights::{PairId, PairParams, WeightPair};
