//! Distortion of a chosen alternative: exact on a known metric, or
//! worst-case over every metric consistent with a profile.

mod adversary;
mod bounds;
mod discrete;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub use adversary::{
    adversarial_distortion, adversarial_distortion_with, adversary_lp, pair_count, pair_index,
    AdversaryOptions,
};
pub use bounds::{mechanism_distortion_bound_check, Bound, BoundCheckReport, DistortionRow};
pub use discrete::{
    discrete_adversary, discrete_adversary_all, DiscreteOptions, DEFAULT_CANDIDATE_CAP,
};

use crate::error::{Error, Result};
use crate::io::{ratio, InstanceFile};
use crate::model::{optimal_alternative, social_welfare, MetricInstance, TieRule};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    ExactMetric,
    LpAdversary,
    DiscreteBruteForce,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DistortionReport {
    pub winner: usize,
    pub winner_welfare: f64,
    pub best_alt: usize,
    pub best_welfare: f64,
    /// `best_welfare / winner_welfare`; `f64::INFINITY` when the winner has
    /// zero welfare and some alternative does not.
    pub distortion: f64,
    /// Every alternative has zero welfare; distortion is reported as 1.
    pub degenerate: bool,
    pub witness: Option<MetricInstance>,
    /// Tie rule under which `witness` reproduces the input profile.
    pub tie_rule: Option<TieRule>,
    pub method: Method,
}

impl DistortionReport {
    pub fn is_infinite(&self) -> bool {
        self.distortion.is_infinite()
    }
}

/// Ratio convention shared by every method. Returns `(distortion, degenerate)`.
pub(crate) fn welfare_ratio(best: f64, winner: f64) -> (f64, bool) {
    if winner > 0.0 {
        ((best / winner).max(1.0), false)
    } else if best > 0.0 {
        (f64::INFINITY, false)
    } else {
        (1.0, true)
    }
}

/// Exact distortion of `winner` on a known metric.
pub fn distortion_on_metric(instance: &MetricInstance, winner: usize) -> Result<DistortionReport> {
    let winner_welfare = social_welfare(instance, winner)?;
    let (best_alt, best_welfare) = optimal_alternative(instance);
    let (distortion, degenerate) = welfare_ratio(best_welfare, winner_welfare);
    Ok(DistortionReport {
        winner,
        winner_welfare,
        best_alt,
        best_welfare,
        distortion,
        degenerate,
        witness: None,
        tie_rule: None,
        method: Method::ExactMetric,
    })
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ReportFile {
    winner: usize,
    winner_welfare: f64,
    best_alt: usize,
    #[serde(with = "ratio")]
    best_welfare: f64,
    #[serde(with = "ratio")]
    distortion: f64,
    #[serde(default)]
    degenerate: bool,
    method: Method,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tie_rule: Option<TieRule>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    witness: Option<InstanceFile>,
}

impl Serialize for DistortionReport {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ReportFile {
            winner: self.winner,
            winner_welfare: self.winner_welfare,
            best_alt: self.best_alt,
            best_welfare: self.best_welfare,
            distortion: self.distortion,
            degenerate: self.degenerate,
            method: self.method,
            tie_rule: self.tie_rule.clone(),
            witness: self
                .witness
                .as_ref()
                .map(|w| InstanceFile::from_metric(w, None)),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for DistortionReport {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let f = ReportFile::deserialize(d)?;
        let witness = match f.witness {
            None => None,
            Some(w) => match w.into_instance().map_err(serde::de::Error::custom)? {
                crate::io::Instance::Metric { instance, .. } => Some(instance),
                crate::io::Instance::Ordinal(_) => {
                    return Err(serde::de::Error::custom(Error::Schema(
                        "witness must be a metric".into(),
                    )))
                }
            },
        };
        Ok(Self {
            winner: f.winner,
            winner_welfare: f.winner_welfare,
            best_alt: f.best_alt,
            best_welfare: f.best_welfare,
            distortion: f.distortion,
            degenerate: f.degenerate,
            witness,
            tie_rule: f.tie_rule,
            method: f.method,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Grouping;

    #[test]
    fn optimal_winner_has_distortion_one() {
        let inst =
            MetricInstance::from_line(vec![0.2, 0.3], vec![0.0, 1.0], Grouping::single(2).unwrap())
                .unwrap();
        let r = distortion_on_metric(&inst, 1).unwrap();
        assert_eq!(r.distortion, 1.0);
        assert_eq!(r.best_alt, 1);
    }

    #[test]
    fn centralized_lower_bound_instance() {
        // agents at {1,1,0,0}, a at 0, b at 2
        let inst = MetricInstance::from_line(
            vec![1.0, 1.0, 0.0, 0.0],
            vec![0.0, 2.0],
            Grouping::single(4).unwrap(),
        )
        .unwrap();
        let r = distortion_on_metric(&inst, 0).unwrap();
        assert_eq!((r.winner_welfare, r.best_welfare), (2.0, 6.0));
        assert_eq!(r.distortion, 3.0);
    }

    #[test]
    fn zero_welfare_conventions() {
        let colocated =
            MetricInstance::from_line(vec![0.0], vec![0.0, 0.0], Grouping::single(1).unwrap())
                .unwrap();
        let r = distortion_on_metric(&colocated, 1).unwrap();
        assert!(r.degenerate);
        assert_eq!(r.distortion, 1.0);
        let inf = MetricInstance::from_line(vec![0.0], vec![0.0, 1.0], Grouping::single(1).unwrap())
            .unwrap();
        assert!(distortion_on_metric(&inf, 0).unwrap().is_infinite());
    }

    #[test]
    fn report_json_round_trip() {
        let inst = MetricInstance::from_line(vec![0.0], vec![0.0, 1.0], Grouping::single(1).unwrap())
            .unwrap();
        let mut r = distortion_on_metric(&inst, 0).unwrap();
        r.witness = Some(inst);
        let json = serde_json::to_string(&r).unwrap();
        assert!(json.contains("\"distortion\":\"inf\""));
        let back: DistortionReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, r);
    }
}
