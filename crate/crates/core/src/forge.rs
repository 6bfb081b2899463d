//! Deterministic instance generators: the worst-case families for each
//! bound, plus seeded random instances.
//!
//! In every worst-case family the alternative a mechanism is steered into
//! ("bad" alternative) has index 0.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{validate_metric, Grouping, MetricInstance, OrdinalProfile, TieRule};

/// Generator output. `profile` is present for ordinal families and is
/// reproduced from `instance` by `tie_rule`.
#[derive(Clone, Debug, PartialEq)]
pub struct Generated {
    pub instance: MetricInstance,
    pub profile: Option<OrdinalProfile>,
    pub tie_rule: TieRule,
    pub bad_alternative: usize,
    /// Agents-per-unit-mass resolution for quantized line families.
    pub q: Option<usize>,
}

impl Generated {
    fn metric(instance: MetricInstance) -> Result<Self> {
        validate_metric(&instance)?;
        Ok(Self {
            instance,
            profile: None,
            tie_rule: TieRule::IndexOrder,
            bad_alternative: 0,
            q: None,
        })
    }

    /// Pairs a witness metric with explicit rankings.
    fn ordinal(instance: MetricInstance, rankings: Vec<Vec<usize>>, q: Option<usize>) -> Result<Self> {
        validate_metric(&instance)?;
        let profile = OrdinalProfile::new(instance.m(), rankings, instance.grouping().clone())?;
        if !profile.is_consistent_with(&instance) {
            return Err(Error::ParamOutOfRange(
                "generated rankings disagree with the witness metric".into(),
            ));
        }
        Ok(Self {
            tie_rule: TieRule::PerAgent {
                orders: profile.rankings().to_vec(),
            },
            instance,
            profile: Some(profile),
            bad_alternative: 0,
            q,
        })
    }
}

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps < 0.125 {
        Ok(())
    } else {
        Err(Error::ParamOutOfRange(format!("eps must lie in (0, 1/8), got {eps}")))
    }
}

/// `m = k` alternatives pairwise at distance 1. Groups `1..k-1` sit next to
/// alternative 0 and each has a distinct unique farthest alternative; the
/// last group is marginally farther from alternative 0 than from the rest.
/// Every representative carries the same weight, so alternative 0 wins the
/// tie and realizes distortion `2k - 1 - O(eps)`.
pub fn gen_equidistant_full_info(k: usize, lambda: usize, eps: f64) -> Result<MetricInstance> {
    gen_equidistant_variants(k, k, lambda, eps)
}

/// Extends the equidistant family to `m != k`: extra alternatives are
/// appended as dummies when `m > k`, and when `m < k` (with `m | k`) every
/// group role is copied `k / m` times.
pub fn gen_equidistant_variants(k: usize, m: usize, lambda: usize, eps: f64) -> Result<MetricInstance> {
    if k < 2 || m < 2 || lambda < 1 {
        return Err(Error::ParamOutOfRange(format!(
            "need k >= 2, m >= 2, lambda >= 1 (got k = {k}, m = {m}, lambda = {lambda})"
        )));
    }
    check_eps(eps)?;
    if m < k && !k.is_multiple_of(m) {
        return Err(Error::ParamOutOfRange(format!(
            "k = {k} must be a multiple of m = {m} when m < k"
        )));
    }
    let roles = m.min(k);
    let copies = k / roles;
    let t = eps / (4.0 * roles as f64);
    // distances of one agent of each role to alternatives 0..m
    let role_row = |r: usize| -> Vec<f64> {
        (0..m)
            .map(|x| {
                if r + 1 < roles {
                    let own = r + 1;
                    match x {
                        0 => t,
                        _ if x == own => 1.0,
                        _ => 1.0 - t,
                    }
                } else if x == 0 {
                    0.5 + t
                } else {
                    0.5
                }
            })
            .collect()
    };
    let mut agent_alt = Vec::with_capacity(k * lambda);
    let mut assignment = Vec::with_capacity(k * lambda);
    for g in 0..k {
        let row = role_row(g / copies);
        for _ in 0..lambda {
            agent_alt.push(row.clone());
            assignment.push(g);
        }
    }
    let alt_alt: Vec<Vec<f64>> = (0..m)
        .map(|x| (0..m).map(|y| if x == y { 0.0 } else { 1.0 }).collect())
        .collect();
    let inst = MetricInstance::from_bipartite(&agent_alt, &alt_alt, Grouping::new(assignment, k)?)?;
    Ok(Generated::metric(inst)?.instance)
}

/// `m = k + 1` alternatives `a = 0`, `b = 1` and one favourite per group
/// for groups `1..k-1`, pairwise at distance 1. Groups `1..k-1` sit on `a`;
/// the last group splits into agents equidistant from everything (ranking
/// `a` first) and agents on `a` (ranking `b` first). Plurality-Veto returns
/// `a` in the last group, `a` wins the weight tie, and the witness has
/// distortion exactly `4k - 1`.
pub fn gen_ordinal_general(k: usize, lambda: usize) -> Result<Generated> {
    if k < 2 || lambda < 2 || !lambda.is_multiple_of(2) {
        return Err(Error::ParamOutOfRange(format!(
            "need k >= 2 and an even lambda >= 2 (got k = {k}, lambda = {lambda})"
        )));
    }
    let m = k + 1;
    let mut agent_alt = Vec::new();
    let mut rankings = Vec::new();
    let mut assignment = Vec::new();
    let on_a: Vec<f64> = (0..m).map(|x| if x == 0 { 0.0 } else { 1.0 }).collect();
    for g in 0..k - 1 {
        let fav = g + 2;
        let mut ranking = vec![fav];
        ranking.extend((1..m).filter(|&x| x != fav));
        ranking.push(0);
        for _ in 0..lambda {
            agent_alt.push(on_a.clone());
            rankings.push(ranking.clone());
            assignment.push(g);
        }
    }
    for t in 0..lambda {
        if t < lambda / 2 {
            agent_alt.push(vec![0.5; m]);
            rankings.push((0..m).collect());
        } else {
            agent_alt.push(on_a.clone());
            let mut ranking: Vec<usize> = (1..m).collect();
            ranking.push(0);
            rankings.push(ranking);
        }
        assignment.push(k - 1);
    }
    let alt_alt: Vec<Vec<f64>> = (0..m)
        .map(|x| (0..m).map(|y| if x == y { 0.0 } else { 1.0 }).collect())
        .collect();
    let inst = MetricInstance::from_bipartite(&agent_alt, &alt_alt, Grouping::new(assignment, k)?)?;
    Generated::ordinal(inst, rankings, None)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum LineKind {
    /// Induction-step instance with parameter `ell >= 1`.
    ChainStep { ell: usize },
    /// Smallest chain instance (`ell = 1`); ordinal family only.
    BaseCase,
    /// Limit instance with parameter `eps` in `(0, 1/8)`.
    Final { eps: f64 },
}

/// Full-information line family on alternatives `0` and `1`.
///
/// `ChainStep(ell)`: `ell` single-agent groups at `(2 ell + 1) / (4 ell)` and
/// `ell + 1` single-agent groups at 0, ratio `SW(1) / SW(0) = 3`.
/// `Final(eps)`: one agent at `1/2 + eps`, one at 0.
pub fn gen_line_full_info(kind: LineKind) -> Result<MetricInstance> {
    let agents = match kind {
        LineKind::ChainStep { ell } => {
            if ell == 0 {
                return Err(Error::ParamOutOfRange("ell must be at least 1".into()));
            }
            let x = (2 * ell + 1) as f64 / (4 * ell) as f64;
            let mut agents = vec![x; ell];
            agents.extend(vec![0.0; ell + 1]);
            agents
        }
        LineKind::Final { eps } => {
            check_eps(eps)?;
            vec![0.5 + eps, 0.0]
        }
        LineKind::BaseCase => {
            return Err(Error::ParamOutOfRange(
                "base-case is defined for the ordinal line family only".into(),
            ))
        }
    };
    let n = agents.len();
    let inst = MetricInstance::from_line(agents, vec![0.0, 1.0], Grouping::new((0..n).collect(), n)?)?;
    Ok(Generated::metric(inst)?.instance)
}

/// Ordinal line family on alternatives `0` and `1`, group mass quantized to
/// `q` agents per unit.
///
/// `ChainStep(ell)`: `ell` groups of `4 ell q` agents where `(2 ell + 1) q`
/// prefer 0 and sit at `1/2`, the rest sit at 0; plus `ell + 1` groups of
/// `4 ell q` agents at 0. `BaseCase` is `ChainStep(1)`.
/// `Final(eps)`: a group of `q` agents, `q (1/2 + eps)` of them at `1/2`
/// preferring 0 and the rest at 0, plus `q` agents at 0.
pub fn gen_line_ordinal(kind: LineKind, q: usize) -> Result<Generated> {
    if q == 0 {
        return Err(Error::ParamOutOfRange("q must be at least 1".into()));
    }
    // (size, agents preferring 0) per group
    let groups: Vec<(usize, usize)> = match kind {
        LineKind::BaseCase => return gen_line_ordinal(LineKind::ChainStep { ell: 1 }, q),
        LineKind::ChainStep { ell } => {
            if ell == 0 {
                return Err(Error::ParamOutOfRange("ell must be at least 1".into()));
            }
            let size = 4 * ell * q;
            let mut g = vec![(size, (2 * ell + 1) * q); ell];
            g.extend(vec![(size, 0); ell + 1]);
            g
        }
        LineKind::Final { eps } => {
            check_eps(eps)?;
            let exact = q as f64 * (0.5 + eps);
            let near = exact.round();
            if (exact - near).abs() > 1e-9 * q as f64 {
                return Err(Error::NonIntegralFraction(format!(
                    "q * (1/2 + eps) = {exact} with q = {q}"
                )));
            }
            vec![(q, near as usize), (q, 0)]
        }
    };
    let mut agents = Vec::new();
    let mut rankings = Vec::new();
    let mut assignment = Vec::new();
    for (g, &(size, prefer0)) in groups.iter().enumerate() {
        for t in 0..size {
            if t < prefer0 {
                agents.push(0.5);
                rankings.push(vec![0, 1]);
            } else {
                agents.push(0.0);
                rankings.push(vec![1, 0]);
            }
            assignment.push(g);
        }
    }
    let k = groups.len();
    let inst = MetricInstance::from_line(agents, vec![0.0, 1.0], Grouping::new(assignment, k)?)?;
    Generated::ordinal(inst, rankings, Some(q))
}

/// Uniform points in `[0,1]^dim` with Euclidean distances and a balanced
/// random grouping. `dim = 1` keeps line positions.
pub fn gen_random_euclidean(n: usize, m: usize, k: usize, dim: usize, seed: u64) -> Result<MetricInstance> {
    if k == 0 || n < k || m == 0 || !(1..=3).contains(&dim) {
        return Err(Error::ParamOutOfRange(format!(
            "need n >= k >= 1, m >= 1, dim in 1..=3 (got n = {n}, m = {m}, k = {k}, dim = {dim})"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let point = |rng: &mut ChaCha8Rng| -> Vec<f64> { (0..dim).map(|_| rng.gen::<f64>()).collect() };
    let agents: Vec<Vec<f64>> = (0..n).map(|_| point(&mut rng)).collect();
    let alternatives: Vec<Vec<f64>> = (0..m).map(|_| point(&mut rng)).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let mut assignment = vec![0; n];
    for (slot, &i) in order.iter().enumerate() {
        assignment[i] = slot % k;
    }
    let grouping = Grouping::new(assignment, k)?;
    if dim == 1 {
        MetricInstance::from_line(
            agents.into_iter().map(|p| p[0]).collect(),
            alternatives.into_iter().map(|p| p[0]).collect(),
            grouping,
        )
    } else {
        MetricInstance::from_points(&agents, &alternatives, grouping)
    }
}

pub fn gen_random_line(n: usize, m: usize, k: usize, seed: u64) -> Result<MetricInstance> {
    gen_random_euclidean(n, m, k, 1, seed)
}

/// Uniformly random rankings with a balanced random grouping.
pub fn gen_random_profile(n: usize, m: usize, k: usize, seed: u64) -> Result<OrdinalProfile> {
    if k == 0 || n < k || m == 0 {
        return Err(Error::ParamOutOfRange(format!(
            "need n >= k >= 1 and m >= 1 (got n = {n}, m = {m}, k = {k})"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rankings = (0..n)
        .map(|_| {
            let mut r: Vec<usize> = (0..m).collect();
            r.shuffle(&mut rng);
            r
        })
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let mut assignment = vec![0; n];
    for (slot, &i) in order.iter().enumerate() {
        assignment[i] = slot % k;
    }
    OrdinalProfile::new(m, rankings, Grouping::new(assignment, k)?)
}

/// Size limits for a stream of random instances.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RandomLimits {
    pub n_max: usize,
    pub m_max: usize,
    pub k_max: usize,
    pub dim_max: usize,
}

impl Default for RandomLimits {
    fn default() -> Self {
        Self {
            n_max: 12,
            m_max: 5,
            k_max: 5,
            dim_max: 3,
        }
    }
}

/// Instance number `trial` of a seeded random stream: sizes drawn uniformly
/// within `limits` (`k <= n`), then [`gen_random_euclidean`]. Pure in
/// `(seed, trial)`.
pub fn random_trial(seed: u64, trial: usize, limits: &RandomLimits) -> Result<MetricInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    let k = rng.gen_range(1..=limits.k_max.max(1));
    let n = rng.gen_range(k..=limits.n_max.max(k));
    let m = rng.gen_range(1..=limits.m_max.max(1));
    let dim = rng.gen_range(1..=limits.dim_max.clamp(1, 3));
    gen_random_euclidean(n, m, k, dim, rng.gen())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    #[serde(alias = "equidistant")]
    EquidistantFullInfo,
    OrdinalGeneral,
    LineFullInfoChain,
    LineOrdinalChain,
    LineFinal3,
    LineFinal7,
    RandomEuclidean,
    RandomLine,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ell: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorSpec {
    pub family: Family,
    #[serde(default)]
    pub params: GeneratorParams,
}

fn need<T: Copy>(v: Option<T>, name: &str) -> Result<T> {
    v.ok_or_else(|| Error::ParamOutOfRange(format!("missing parameter `{name}`")))
}

impl GeneratorSpec {
    pub fn generate(&self) -> Result<Generated> {
        let p = &self.params;
        match self.family {
            Family::EquidistantFullInfo => {
                let k = need(p.k, "k")?;
                let inst = gen_equidistant_variants(
                    k,
                    p.m.unwrap_or(k),
                    p.lambda.unwrap_or(2),
                    p.eps.unwrap_or(1e-3),
                )?;
                Generated::metric(inst)
            }
            Family::OrdinalGeneral => gen_ordinal_general(need(p.k, "k")?, p.lambda.unwrap_or(4)),
            Family::LineFullInfoChain => Generated::metric(gen_line_full_info(LineKind::ChainStep {
                ell: need(p.ell, "ell")?,
            })?),
            Family::LineFinal3 => Generated::metric(gen_line_full_info(LineKind::Final {
                eps: p.eps.unwrap_or(1e-3),
            })?),
            Family::LineOrdinalChain => {
                let kind = match p.ell {
                    Some(ell) => LineKind::ChainStep { ell },
                    None => LineKind::BaseCase,
                };
                gen_line_ordinal(kind, p.q.unwrap_or(8))
            }
            Family::LineFinal7 => gen_line_ordinal(
                LineKind::Final {
                    eps: p.eps.unwrap_or(1e-3),
                },
                p.q.unwrap_or(1000),
            ),
            Family::RandomEuclidean | Family::RandomLine => {
                let dim = if self.family == Family::RandomLine {
                    1
                } else {
                    p.dim.unwrap_or(2)
                };
                let inst = gen_random_euclidean(
                    need(p.n, "n")?,
                    need(p.m, "m")?,
                    need(p.k, "k")?,
                    dim,
                    p.seed.unwrap_or(0),
                )?;
                Generated::metric(inst)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distortion::distortion_on_metric;
    use crate::mechanisms::{max_weight_of_domination, max_weight_of_optimal};
    use crate::model::derive_profile;

    fn realized(inst: &MetricInstance, winner: usize) -> f64 {
        distortion_on_metric(inst, winner).unwrap().distortion
    }

    #[test]
    fn equidistant_k3() {
        let eps = 0.01;
        let inst = gen_equidistant_full_info(3, 2, eps).unwrap();
        let out = max_weight_of_optimal(&inst);
        assert_eq!(out.winner, 0);
        assert_eq!(out.representatives, vec![1, 2, 0]);
        assert!(realized(&inst, 0) >= 5.0 - 10.0 * eps);
    }

    #[test]
    fn equidistant_k2() {
        let inst = gen_equidistant_full_info(2, 1, 0.01).unwrap();
        assert!(realized(&inst, max_weight_of_optimal(&inst).winner) >= 3.0 - 0.1);
    }

    #[test]
    fn equidistant_variants() {
        for (k, m) in [(2, 4), (4, 2)] {
            let inst = gen_equidistant_variants(k, m, 2, 0.01).unwrap();
            assert_eq!((inst.k(), inst.m()), (k, m));
            assert_eq!(max_weight_of_optimal(&inst).winner, 0);
            assert!(realized(&inst, 0) >= 3.0 - 0.1);
        }
        assert_eq!(
            gen_equidistant_variants(3, 3, 2, 0.01).unwrap(),
            gen_equidistant_full_info(3, 2, 0.01).unwrap()
        );
        assert!(gen_equidistant_variants(5, 2, 2, 0.01).is_err());
        assert!(gen_equidistant_full_info(3, 2, 0.2).is_err());
    }

    #[test]
    fn ordinal_general_k2() {
        let g = gen_ordinal_general(2, 4).unwrap();
        let profile = g.profile.as_ref().unwrap();
        assert_eq!(&derive_profile(&g.instance, &g.tie_rule).unwrap(), profile);
        let out = max_weight_of_domination(profile).unwrap();
        assert_eq!(out.winner, 0);
        assert!((realized(&g.instance, 0) - 7.0).abs() < 1e-12);
        assert!(gen_ordinal_general(2, 3).is_err());
    }

    #[test]
    fn ordinal_general_k3() {
        let g = gen_ordinal_general(3, 4).unwrap();
        assert_eq!(max_weight_of_domination(g.profile.as_ref().unwrap()).unwrap().winner, 0);
        assert!((realized(&g.instance, 0) - 11.0).abs() < 1e-12);
    }

    #[test]
    fn line_full_info_chain() {
        let inst = gen_line_full_info(LineKind::ChainStep { ell: 1 }).unwrap();
        let sw0 = crate::social_welfare(&inst, 0).unwrap();
        let sw1 = crate::social_welfare(&inst, 1).unwrap();
        assert!((sw0 - 0.75).abs() < 1e-12 && (sw1 - 2.25).abs() < 1e-12);
        assert!(inst.line().is_some());
        let fin = gen_line_full_info(LineKind::Final { eps: 0.001 }).unwrap();
        assert!((realized(&fin, 0) - 3.0).abs() < 0.01);
    }

    #[test]
    fn line_ordinal_base_case() {
        let g = gen_line_ordinal(LineKind::BaseCase, 8).unwrap();
        let sw0 = crate::social_welfare(&g.instance, 0).unwrap();
        let sw1 = crate::social_welfare(&g.instance, 1).unwrap();
        // 3/8 and 21/8 per unit of group mass (4q agents)
        assert!((sw0 - 3.0 / 8.0 * 32.0).abs() < 1e-9);
        assert!((sw1 - 21.0 / 8.0 * 32.0).abs() < 1e-9);
        assert!((realized(&g.instance, 0) - 7.0).abs() < 1e-12);
        assert_eq!(g.q, Some(8));
    }

    #[test]
    fn line_ordinal_final_needs_integral_fraction() {
        assert!(matches!(
            gen_line_ordinal(LineKind::Final { eps: 0.001 }, 8),
            Err(Error::NonIntegralFraction(_))
        ));
        let g = gen_line_ordinal(LineKind::Final { eps: 0.001 }, 1000).unwrap();
        assert!(realized(&g.instance, 0) >= 7.0 - 0.02);
    }

    #[test]
    fn random_is_deterministic() {
        let a = gen_random_euclidean(7, 3, 2, 2, 42).unwrap();
        assert_eq!(a, gen_random_euclidean(7, 3, 2, 2, 42).unwrap());
        assert_ne!(a, gen_random_euclidean(7, 3, 2, 2, 43).unwrap());
        assert_eq!(a.grouping().sizes(), vec![4, 3]);
        assert!(gen_random_line(5, 3, 2, 1).unwrap().line().is_some());
        assert!(gen_random_euclidean(2, 3, 3, 2, 0).is_err());
    }

    #[test]
    fn random_profiles() {
        let p = gen_random_profile(6, 4, 2, 9).unwrap();
        assert_eq!(p, gen_random_profile(6, 4, 2, 9).unwrap());
        assert_eq!(p.grouping().sizes(), vec![3, 3]);
    }

    #[test]
    fn random_trials_respect_limits() {
        let limits = RandomLimits {
            n_max: 4,
            m_max: 2,
            k_max: 3,
            dim_max: 1,
        };
        for t in 0..50 {
            let inst = random_trial(5, t, &limits).unwrap();
            assert!(inst.n() <= 4 && inst.m() <= 2 && inst.k() <= 3);
            assert!(inst.line().is_some());
            assert_eq!(inst, random_trial(5, t, &limits).unwrap());
        }
    }

    #[test]
    fn spec_json() {
        let spec: GeneratorSpec =
            serde_json::from_str(r#"{"family":"equidistant","params":{"k":3,"lambda":2,"eps":0.01}}"#)
                .unwrap();
        assert_eq!(spec.family, Family::EquidistantFullInfo);
        assert_eq!(spec.generate().unwrap().instance.m(), 3);
        assert!(serde_json::from_str::<GeneratorSpec>(r#"{"family":"nope"}"#).is_err());
    }
}
