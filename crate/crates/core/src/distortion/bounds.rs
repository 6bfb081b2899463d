use serde::{Deserialize, Serialize};

use super::distortion_on_metric;
use crate::error::{BoundViolation, Error, Result};
use crate::io::{instance_to_json, ratio};
use crate::mechanisms::Mechanism;
use crate::model::{MetricInstance, TAU_METRIC};

/// Distortion bound, possibly depending on the instance size.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Bound {
    Constant(f64),
    /// `2 min{m, k} - 1`
    FullInfo,
    /// `4 min{m, k} - 1`
    Ordinal,
}

impl Bound {
    pub fn value(&self, m: usize, k: usize) -> f64 {
        let q = m.min(k) as f64;
        match *self {
            Bound::Constant(b) => b,
            Bound::FullInfo => 2.0 * q - 1.0,
            Bound::Ordinal => 4.0 * q - 1.0,
        }
    }
}

/// CSV row of a batch sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistortionRow {
    pub instance_id: usize,
    pub mechanism: String,
    pub m: usize,
    pub k: usize,
    pub n: usize,
    #[serde(with = "ratio")]
    pub distortion: f64,
    pub bound: f64,
    pub slack: f64,
}

#[derive(Clone, Debug)]
pub struct BoundCheckReport {
    pub mechanism: String,
    pub trials: usize,
    pub max_distortion: f64,
    /// Smallest `bound - distortion` seen.
    pub min_slack: f64,
    pub argmax_trial: Option<usize>,
    pub argmax: Option<MetricInstance>,
    pub rows: Vec<DistortionRow>,
}

/// Runs `mechanism` on `trials` instances drawn from `source` and measures
/// the winner's distortion on the true metric. Fails with the first
/// counterexample above `bound + TAU_METRIC`.
pub fn mechanism_distortion_bound_check<M, S>(
    mechanism: &M,
    mut source: S,
    bound: Bound,
    trials: usize,
) -> Result<BoundCheckReport>
where
    M: Mechanism + ?Sized,
    S: FnMut(usize) -> Result<MetricInstance>,
{
    let name = mechanism.name();
    let mut report = BoundCheckReport {
        mechanism: name.clone(),
        trials,
        max_distortion: 1.0,
        min_slack: f64::INFINITY,
        argmax_trial: None,
        argmax: None,
        rows: Vec::with_capacity(trials),
    };
    for trial in 0..trials {
        let instance = source(trial)?;
        let outcome = mechanism.run(&instance)?;
        let d = distortion_on_metric(&instance, outcome.winner)?.distortion;
        let b = bound.value(instance.m(), instance.k());
        if d > b + TAU_METRIC {
            return Err(Error::BoundViolation(Box::new(BoundViolation {
                trial,
                mechanism: name,
                distortion: d,
                bound: b,
                instance_json: instance_to_json(&instance, None),
            })));
        }
        report.rows.push(DistortionRow {
            instance_id: trial,
            mechanism: name.clone(),
            m: instance.m(),
            k: instance.k(),
            n: instance.n(),
            distortion: d,
            bound: b,
            slack: b - d,
        });
        report.min_slack = report.min_slack.min(b - d);
        if report.argmax.is_none() || d > report.max_distortion {
            report.max_distortion = d;
            report.argmax_trial = Some(trial);
            report.argmax = Some(instance);
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::parse_instance;
    use crate::mechanisms::{ConstantMechanism, MaxWeightOfOptimal};
    use crate::model::Grouping;

    fn source(trial: usize) -> Result<MetricInstance> {
        let t = trial as f64 / 10.0;
        MetricInstance::from_line(vec![t, 1.0 - t], vec![0.0, 1.0], Grouping::new(vec![0, 1], 2)?)
    }

    #[test]
    fn bound_values() {
        assert_eq!(Bound::FullInfo.value(5, 3), 5.0);
        assert_eq!(Bound::Ordinal.value(2, 9), 7.0);
        assert_eq!(Bound::Constant(7.0).value(1, 1), 7.0);
    }

    #[test]
    fn full_info_mechanism_passes() {
        let r = mechanism_distortion_bound_check(&MaxWeightOfOptimal::default(), source, Bound::FullInfo, 10)
            .unwrap();
        assert_eq!(r.rows.len(), 10);
        assert!(r.max_distortion <= 3.0 + TAU_METRIC);
        assert!(r.min_slack >= -TAU_METRIC);
    }

    #[test]
    fn constant_control_is_caught() {
        let src = |_| {
            MetricInstance::from_line(vec![0.0], vec![0.0, 1.0], Grouping::single(1).unwrap())
        };
        match mechanism_distortion_bound_check(&ConstantMechanism(1), src, Bound::Constant(1.0), 3) {
            Ok(_) => {}
            Err(e) => panic!("{e}"),
        }
        let err = mechanism_distortion_bound_check(&ConstantMechanism(0), src, Bound::Constant(1.0), 3)
            .unwrap_err();
        let Error::BoundViolation(v) = err else {
            panic!("expected a violation, got {err}")
        };
        assert_eq!(v.trial, 0);
        assert!(v.distortion.is_infinite());
        assert!(parse_instance(&v.instance_json).is_ok());
    }
}
