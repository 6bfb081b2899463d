//! Two-step distributed mechanisms: every group picks a representative, then
//! the representative carrying the most agents wins.

mod domination;
mod line;
mod veto;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use domination::{certify_domination, domination_graph, DominationCertificate};
pub use line::{reduce_line_instance, LineReduced, LineReduction};
pub use veto::{plurality_veto, VetoTrace};

use crate::error::{Error, Result};
use crate::model::{
    derive_profile, Grouping, MetricInstance, OrdinalProfile, Precedence, TieRule, TAU_METRIC,
};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MechanismOutcome {
    /// `representatives[g]` is the alternative chosen by group `g`.
    pub representatives: Vec<usize>,
    pub winner: usize,
    /// Groups represented by each alternative in `R`.
    pub rep_groups: BTreeMap<usize, Vec<usize>>,
    /// Total agents represented by each alternative in `R`.
    pub rep_weights: BTreeMap<usize, usize>,
    /// Full-information audit: `group_scores[g][x]` is group `g`'s total
    /// distance from `x`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group_scores: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub veto_traces: Option<Vec<VetoTrace>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificates: Option<Vec<DominationCertificate>>,
}

impl MechanismOutcome {
    /// Second step shared by both mechanisms: tally represented weight and
    /// pick the heaviest representative (ties by `precedence`).
    fn tally(representatives: Vec<usize>, grouping: &Grouping, precedence: &Precedence) -> Self {
        let mut rep_groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        let mut rep_weights: BTreeMap<usize, usize> = BTreeMap::new();
        for (g, &r) in representatives.iter().enumerate() {
            rep_groups.entry(r).or_default().push(g);
            *rep_weights.entry(r).or_default() += grouping.size(g);
        }
        let keys = precedence.keys();
        let winner = rep_weights
            .iter()
            .max_by(|(a, wa), (b, wb)| wa.cmp(wb).then(keys[**b].cmp(&keys[**a])))
            .map(|(&x, _)| x)
            .expect("at least one group");
        Self {
            representatives,
            winner,
            rep_groups,
            rep_weights,
            group_scores: None,
            veto_traces: None,
            certificates: None,
        }
    }

    pub fn winner_weight(&self) -> usize {
        self.rep_weights[&self.winner]
    }

    /// Relabels alternatives through `map` (reduced index -> original index)
    /// into an instance with `m` alternatives. Group scores are dropped.
    pub fn map_alternatives(&self, map: &[usize], m: usize) -> Self {
        Self {
            representatives: self.representatives.iter().map(|&x| map[x]).collect(),
            winner: map[self.winner],
            rep_groups: self
                .rep_groups
                .iter()
                .map(|(&x, gs)| (map[x], gs.clone()))
                .collect(),
            rep_weights: self.rep_weights.iter().map(|(&x, &w)| (map[x], w)).collect(),
            group_scores: None,
            veto_traces: self
                .veto_traces
                .as_ref()
                .map(|ts| ts.iter().map(|t| t.map_alternatives(map, m)).collect()),
            certificates: self.certificates.as_ref().map(|cs| {
                cs.iter()
                    .map(|c| DominationCertificate {
                        winner: map[c.winner],
                        ..c.clone()
                    })
                    .collect()
            }),
        }
    }
}

/// Full-information mechanism: each group's representative maximizes the
/// group's total distance; the heaviest representative wins. Ties (group
/// scores within a relative [`TAU_METRIC`]) go to the lowest index.
pub fn max_weight_of_optimal(instance: &MetricInstance) -> MechanismOutcome {
    max_weight_of_optimal_with(instance, &Precedence::identity(instance.m()))
}

pub fn max_weight_of_optimal_with(
    instance: &MetricInstance,
    precedence: &Precedence,
) -> MechanismOutcome {
    let scores = instance.group_welfare();
    let keys = precedence.keys();
    let reps = scores
        .iter()
        .map(|row| {
            // scores within a relative TAU_METRIC of the best count as tied
            let best = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let cut = best - TAU_METRIC * best.abs();
            (0..row.len())
                .filter(|&x| row[x] >= cut)
                .min_by_key(|&x| keys[x])
                .expect("m >= 1")
        })
        .collect();
    let mut out = MechanismOutcome::tally(reps, instance.grouping(), precedence);
    out.group_scores = Some(scores);
    out
}

/// Centralized rule used inside each group of [`max_weight_of_domination`].
/// Whatever it returns is re-certified, never trusted.
pub trait CentralizedRule {
    fn select(&self, rankings: &[&[usize]]) -> Result<(usize, Option<VetoTrace>)>;
}

/// Plurality-Veto with agents vetoing in ascending index order.
#[derive(Clone, Copy, Debug, Default)]
pub struct PluralityVeto;

impl CentralizedRule for PluralityVeto {
    fn select(&self, rankings: &[&[usize]]) -> Result<(usize, Option<VetoTrace>)> {
        let order: Vec<usize> = (0..rankings.len()).collect();
        let (w, trace) = plurality_veto(rankings, &order)?;
        Ok((w, Some(trace)))
    }
}

/// Ordinal mechanism: each group's representative is its Plurality-Veto
/// winner, certified by a perfect domination matching; the heaviest
/// representative wins.
pub fn max_weight_of_domination(profile: &OrdinalProfile) -> Result<MechanismOutcome> {
    max_weight_of_domination_with(profile, &PluralityVeto, &Precedence::identity(profile.m()))
}

pub fn max_weight_of_domination_with(
    profile: &OrdinalProfile,
    rule: &dyn CentralizedRule,
    precedence: &Precedence,
) -> Result<MechanismOutcome> {
    let mut reps = Vec::with_capacity(profile.k());
    let mut traces = Vec::with_capacity(profile.k());
    let mut certificates = Vec::with_capacity(profile.k());
    for g in 0..profile.k() {
        let rankings = profile.group_rankings(g);
        let (rep, trace) = rule.select(&rankings)?;
        let mut cert = certify_domination(&rankings, rep)
            .filter(|c| c.verify(&rankings))
            .ok_or(Error::CertificationFailed {
                group: g,
                candidate: rep,
            })?;
        cert.agents = profile.grouping().members(g).to_vec();
        reps.push(rep);
        traces.extend(trace);
        certificates.push(cert);
    }
    let mut out = MechanismOutcome::tally(reps, profile.grouping(), precedence);
    if traces.len() == profile.k() {
        out.veto_traces = Some(traces);
    }
    out.certificates = Some(certificates);
    Ok(out)
}

/// Plurality-Veto over the whole population, ignoring the grouping.
pub fn centralized_veto(profile: &OrdinalProfile) -> Result<MechanismOutcome> {
    let single = profile.with_grouping(Grouping::single(profile.n())?)?;
    max_weight_of_domination(&single)
}

/// A mechanism evaluated against a known metric. Ordinal mechanisms derive
/// their rankings from the metric with their tie rule.
pub trait Mechanism {
    fn name(&self) -> String;
    fn run(&self, instance: &MetricInstance) -> Result<MechanismOutcome>;
}

impl<M: Mechanism + ?Sized> Mechanism for &M {
    fn name(&self) -> String {
        (**self).name()
    }

    fn run(&self, instance: &MetricInstance) -> Result<MechanismOutcome> {
        (**self).run(instance)
    }
}

impl<M: Mechanism + ?Sized> Mechanism for Box<M> {
    fn name(&self) -> String {
        (**self).name()
    }

    fn run(&self, instance: &MetricInstance) -> Result<MechanismOutcome> {
        (**self).run(instance)
    }
}

#[derive(Clone, Debug, Default)]
pub struct MaxWeightOfOptimal {
    pub precedence: Option<Precedence>,
}

impl Mechanism for MaxWeightOfOptimal {
    fn name(&self) -> String {
        "mwo".into()
    }

    fn run(&self, instance: &MetricInstance) -> Result<MechanismOutcome> {
        Ok(match &self.precedence {
            Some(p) => max_weight_of_optimal_with(instance, p),
            None => max_weight_of_optimal(instance),
        })
    }
}

#[derive(Clone, Debug, Default)]
pub struct MaxWeightOfDomination {
    pub tie_rule: TieRule,
}

impl Mechanism for MaxWeightOfDomination {
    fn name(&self) -> String {
        "mwd".into()
    }

    fn run(&self, instance: &MetricInstance) -> Result<MechanismOutcome> {
        let profile = derive_profile(instance, &self.tie_rule)?;
        max_weight_of_domination_with(&profile, &PluralityVeto, &self.tie_rule.precedence(instance.m()))
    }
}

#[derive(Clone, Debug, Default)]
pub struct CentralizedVeto {
    pub tie_rule: TieRule,
}

impl Mechanism for CentralizedVeto {
    fn name(&self) -> String {
        "veto".into()
    }

    fn run(&self, instance: &MetricInstance) -> Result<MechanismOutcome> {
        centralized_veto(&derive_profile(instance, &self.tie_rule)?)
    }
}

/// Every group proposes the same fixed alternative. Useful as a control.
#[derive(Clone, Copy, Debug)]
pub struct ConstantMechanism(pub usize);

impl Mechanism for ConstantMechanism {
    fn name(&self) -> String {
        format!("constant({})", self.0)
    }

    fn run(&self, instance: &MetricInstance) -> Result<MechanismOutcome> {
        if self.0 >= instance.m() {
            return Err(Error::IndexOutOfRange {
                what: "alternative",
                index: self.0,
                len: instance.m(),
            });
        }
        Ok(MechanismOutcome::tally(
            vec![self.0; instance.k()],
            instance.grouping(),
            &Precedence::identity(instance.m()),
        ))
    }
}

/// For a single group of co-located agents: does the mechanism pick the
/// farthest alternative? `None` when no alternative is strictly farthest.
pub fn is_group_unanimous_on(
    mechanism: &dyn Mechanism,
    instance: &MetricInstance,
) -> Result<Option<bool>> {
    if instance.k() != 1 {
        return Err(Error::ParamOutOfRange(format!(
            "expected a single group, got k = {}",
            instance.k()
        )));
    }
    let n = instance.n();
    for i in 0..n {
        for j in i + 1..n {
            if instance.d(i, j) > TAU_METRIC {
                return Err(Error::NotCoLocated);
            }
        }
    }
    let d: Vec<f64> = (0..instance.m()).map(|x| instance.agent_alt(0, x)).collect();
    let far = d.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let farthest: Vec<usize> = (0..d.len()).filter(|&x| d[x] >= far - TAU_METRIC).collect();
    if farthest.len() != 1 {
        return Ok(None);
    }
    let out = mechanism.run(instance)?;
    Ok(Some(out.representatives[0] == farthest[0]))
}
