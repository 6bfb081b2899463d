//! JSON instance schema shared by the library and the CLI.
//!
//! A file carries `n`, `m`, `k`, the group assignment `groups`, and exactly
//! one payload: a flat `(n+m)^2` distance matrix `dist`, `line_positions`, or
//! ordinal `rankings`. Metric payloads may carry a `tie_rule` used when an
//! ordinal view is derived from them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    derive_profile, validate_metric, Grouping, LinePositions, MetricInstance, OrdinalProfile,
    TieRule,
};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub groups: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dist: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub line_positions: Option<LinePositions>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rankings: Option<Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tie_rule: Option<TieRule>,
}

/// A parsed instance: either a metric (full information) or rankings only.
#[derive(Clone, Debug, PartialEq)]
pub enum Instance {
    Metric {
        instance: MetricInstance,
        tie_rule: TieRule,
    },
    Ordinal(OrdinalProfile),
}

impl Instance {
    pub fn n(&self) -> usize {
        match self {
            Instance::Metric { instance, .. } => instance.n(),
            Instance::Ordinal(p) => p.n(),
        }
    }

    pub fn m(&self) -> usize {
        match self {
            Instance::Metric { instance, .. } => instance.m(),
            Instance::Ordinal(p) => p.m(),
        }
    }

    pub fn k(&self) -> usize {
        match self {
            Instance::Metric { instance, .. } => instance.k(),
            Instance::Ordinal(p) => p.k(),
        }
    }

    /// The metric, or an information-model error for ordinal-only input.
    pub fn metric(&self) -> Result<&MetricInstance> {
        match self {
            Instance::Metric { instance, .. } => Ok(instance),
            Instance::Ordinal(_) => Err(Error::InformationModel(
                "instance carries rankings only; a metric is required".into(),
            )),
        }
    }

    pub fn tie_rule(&self) -> Option<&TieRule> {
        match self {
            Instance::Metric { tie_rule, .. } => Some(tie_rule),
            Instance::Ordinal(_) => None,
        }
    }

    /// The rankings, derived from the metric with the recorded tie rule when
    /// needed.
    pub fn profile(&self) -> Result<OrdinalProfile> {
        match self {
            Instance::Metric { instance, tie_rule } => derive_profile(instance, tie_rule),
            Instance::Ordinal(p) => Ok(p.clone()),
        }
    }
}

impl InstanceFile {
    pub fn from_metric(instance: &MetricInstance, tie_rule: Option<&TieRule>) -> Self {
        let (dist, line_positions) = match instance.line() {
            Some(line) => (None, Some(line.clone())),
            None => (Some(instance.matrix().to_vec()), None),
        };
        Self {
            n: instance.n(),
            m: instance.m(),
            k: instance.k(),
            groups: instance.grouping().assignment().to_vec(),
            dist,
            line_positions,
            rankings: None,
            tie_rule: tie_rule.filter(|r| **r != TieRule::IndexOrder).cloned(),
        }
    }

    pub fn from_profile(profile: &OrdinalProfile) -> Self {
        Self {
            n: profile.n(),
            m: profile.m(),
            k: profile.k(),
            groups: profile.grouping().assignment().to_vec(),
            dist: None,
            line_positions: None,
            rankings: Some(profile.rankings().to_vec()),
            tie_rule: None,
        }
    }

    /// Checks the schema and the metric axioms.
    pub fn into_instance(self) -> Result<Instance> {
        let payloads = [
            self.dist.is_some(),
            self.line_positions.is_some(),
            self.rankings.is_some(),
        ];
        if payloads.iter().filter(|&&b| b).count() != 1 {
            return Err(Error::Schema(
                "exactly one of `dist`, `line_positions`, `rankings` is required".into(),
            ));
        }
        if self.groups.len() != self.n {
            return Err(Error::Schema(format!(
                "`groups` has {} entries, n = {}",
                self.groups.len(),
                self.n
            )));
        }
        let grouping = Grouping::new(self.groups, self.k)?;
        if let Some(rankings) = self.rankings {
            if self.tie_rule.is_some() {
                return Err(Error::Schema("`tie_rule` applies to metric payloads only".into()));
            }
            if rankings.len() != self.n {
                return Err(Error::Schema(format!(
                    "`rankings` has {} rows, n = {}",
                    rankings.len(),
                    self.n
                )));
            }
            return Ok(Instance::Ordinal(OrdinalProfile::new(self.m, rankings, grouping)?));
        }
        let instance = match (self.dist, self.line_positions) {
            (Some(dist), None) => MetricInstance::from_matrix(self.n, self.m, dist, grouping)?,
            (None, Some(line)) => {
                if line.agents.len() != self.n || line.alternatives.len() != self.m {
                    return Err(Error::Schema(format!(
                        "line positions have {} agents and {} alternatives, expected {} and {}",
                        line.agents.len(),
                        line.alternatives.len(),
                        self.n,
                        self.m
                    )));
                }
                MetricInstance::from_line(line.agents, line.alternatives, grouping)?
            }
            _ => unreachable!("payload count checked above"),
        };
        validate_metric(&instance)?;
        let tie_rule = self.tie_rule.unwrap_or_default();
        // surface malformed tie rules at parse time
        derive_profile(&instance, &tie_rule)?;
        Ok(Instance::Metric { instance, tie_rule })
    }
}

impl From<&Instance> for InstanceFile {
    fn from(inst: &Instance) -> Self {
        match inst {
            Instance::Metric { instance, tie_rule } => Self::from_metric(instance, Some(tie_rule)),
            Instance::Ordinal(p) => Self::from_profile(p),
        }
    }
}

pub fn parse_instance(json: &str) -> Result<Instance> {
    serde_json::from_str::<InstanceFile>(json)?.into_instance()
}

pub fn instance_to_json(instance: &MetricInstance, tie_rule: Option<&TieRule>) -> String {
    serde_json::to_string(&InstanceFile::from_metric(instance, tie_rule))
        .expect("instance files always serialize")
}

pub fn profile_to_json(profile: &OrdinalProfile) -> String {
    serde_json::to_string(&InstanceFile::from_profile(profile)).expect("profiles always serialize")
}

/// Serde adapter for ratios that may be infinite: finite values are plain
/// numbers, infinity is the string `"inf"`.
pub mod ratio {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_infinite() && *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(*v)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Text(t) if t == "inf" => Ok(f64::INFINITY),
            Repr::Text(t) => Err(serde::de::Error::custom(format!("expected a number or \"inf\", got {t:?}"))),
        }
    }
}
