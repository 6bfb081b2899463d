use distvote_lp::LpError;

use crate::model::ValidationError;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid metric: {0}")]
    Validation(#[from] ValidationError),
    #[error("{what} index {index} out of range (len {len})")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        len: usize,
    },
    #[error("invalid grouping: {0}")]
    InvalidGrouping(String),
    #[error("invalid ranking for agent {agent}: {reason}")]
    InvalidRanking { agent: usize, reason: String },
    #[error("invalid tie rule: {0}")]
    InvalidTieRule(String),
    #[error("invalid agent order: {0}")]
    InvalidAgentOrder(String),
    #[error("group has no agents")]
    EmptyGroup,
    #[error("instance carries no line positions")]
    NotALineInstance,
    #[error("agents of the group are not co-located")]
    NotCoLocated,
    #[error("parameter out of range: {0}")]
    ParamOutOfRange(String),
    #[error("group fraction is not integral at this resolution: {0}")]
    NonIntegralFraction(String),
    #[error("value grid is empty or contains negative or non-finite values")]
    InvalidGrid,
    #[error("search space of {candidates:e} candidate matrices exceeds cap {cap:e}")]
    SearchSpaceTooLarge { candidates: f64, cap: f64 },
    #[error("representative {candidate} of group {group} has no perfect domination matching")]
    CertificationFailed { group: usize, candidate: usize },
    #[error("adversarial LP failed: {0}")]
    Lp(#[from] LpError),
    #[error("adversarial LP for alternative {alternative} is infeasible")]
    AdversaryInfeasible { alternative: usize },
    #[error("{0}")]
    BoundViolation(Box<BoundViolation>),
    #[error("information model mismatch: {0}")]
    InformationModel(String),
    #[error("schema error: {0}")]
    Schema(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Counterexample produced when a mechanism exceeds a distortion bound.
#[derive(Debug, Clone)]
pub struct BoundViolation {
    pub trial: usize,
    pub mechanism: String,
    pub distortion: f64,
    pub bound: f64,
    /// Offending instance in the JSON instance schema.
    pub instance_json: String,
}

impl std::fmt::Display for BoundViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{} exceeded bound {} with distortion {} on trial {}",
            self.mechanism, self.bound, self.distortion, self.trial
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
