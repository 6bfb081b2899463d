//! Distributed obnoxious facility location under metric distortion: models,
//! mechanisms, worst-case distortion tools and instance generators.

pub mod distortion;
pub mod error;
pub mod forge;
pub mod io;
pub mod matching;
pub mod mechanisms;
pub mod model;

pub use distortion::{
    adversarial_distortion, discrete_adversary, distortion_on_metric,
    mechanism_distortion_bound_check, Bound, DistortionReport, Method,
};
pub use error::{BoundViolation, Error, Result};
pub use io::{parse_instance, Instance, InstanceFile};
pub use mechanisms::{
    max_weight_of_domination, max_weight_of_optimal, Mechanism, MechanismOutcome,
};
pub use model::{
    derive_profile, optimal_alternative, social_welfare, validate_metric, Grouping, LinePositions,
    MetricInstance, OrdinalProfile, PointId, PointKind, Precedence, TieRule, ValidationError,
    TAU_METRIC,
};
